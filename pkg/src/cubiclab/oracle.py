"""Exhaustive generation of small triangulations (the ground truth).

Everything here is deliberately brute force: maps are built by peeling one
triangle at a time from the first open hole edge, branching over every way
the triangle can close (fresh apex, apex at any hole corner, or reusing
the neighbouring hole edges).  The dart surgery is genus-blind, so
non-spherical completions are discarded by the Euler check at the end.

The closed-form counting formulas and every sampler in the package are
validated against these lists before being trusted.  Bounds are enforced:
this is an oracle for desk-scale cross-checks, not a generator.
"""

from __future__ import annotations

from cubiclab.maps import CombinatorialMap, MapError

__all__ = [
    "brute_force_polygon_triangulations",
    "all_triangulations_of_polygon",
    "all_quasi_simple",
]

_MAX_INNER = 4
_MAX_BOUNDARY = 6


class _State:
    """Partially built map: growable sigma/alpha plus open holes.

    A hole is a face walk [d_0, ..., d_{m-1}] (phi-orbit order) that still
    has to be subdivided into triangles.
    """

    __slots__ = ("sigma", "alpha", "holes")

    def __init__(self, sigma, alpha, holes):
        self.sigma = sigma
        self.alpha = alpha
        self.holes = holes

    def copy(self) -> "_State":
        return _State(list(self.sigma), list(self.alpha), [list(h) for h in self.holes])

    def new_edge(self) -> tuple[int, int]:
        d = len(self.sigma)
        self.sigma.extend((0, 0))
        self.alpha.extend((d + 1, d))
        return d, d + 1

    def insert_after(self, at: int, new: int) -> None:
        """Insert `new` right after `at` in the rotation (sigma[at] = new)."""
        self.sigma[new] = self.sigma[at]
        self.sigma[at] = new

    def insert_before(self, at: int, new: int) -> None:
        """Insert `new` so that sigma[new] = at."""
        x = at
        while self.sigma[x] != at:
            x = self.sigma[x]
        self.sigma[x] = new
        self.sigma[new] = at


def _initial_state(p: int) -> _State:
    """Polygon with p boundary edges; root dart 0, hole = inner face walk."""
    if p == 1:
        return _State([1, 0], [1, 0], [[1]])
    sigma = [0] * (2 * p)
    alpha = [0] * (2 * p)
    for i in range(p):
        d = 2 * i
        alpha[d] = d + 1
        alpha[d + 1] = d
        prev_twin = 2 * ((i - 1) % p) + 1
        sigma[d] = prev_twin
        sigma[prev_twin] = d
    hole = [2 * i + 1 for i in range(p - 1, -1, -1)]
    return _State(sigma, alpha, [hole])


def _complete(state: _State, budget: int, max_edges: int, out: list) -> None:
    """Triangulate every hole, spending exactly `budget` inner vertices."""
    if not state.holes:
        if budget == 0:
            m = CombinatorialMap(state.sigma, state.alpha, 0)
            try:
                m.validate()
            except MapError:
                return  # non-spherical gluing
            out.append(m)
        return

    # prune: a 1- or 2-gon hole cannot be triangulated without an inner
    # vertex of its own; together with the edge-count invariant this bounds
    # the whole search tree.
    need_v = sum(1 for h in state.holes if len(h) < 3)
    if need_v > budget:
        return
    assert len(state.sigma) // 2 <= max_edges

    hole = state.holes[-1]
    m = len(hole)
    e = hole[0]

    # B1: apex is a fresh inner vertex.
    if budget > 0:
        if m == 1:
            # pendant: triangle (e, f, f~) around a new degree-1 vertex;
            # only a 1-gon hole lets the triangle reuse one edge twice
            st = state.copy()
            st.holes.pop()
            f, fb = st.new_edge()
            st.sigma[fb] = fb
            st.insert_after(st.alpha[e], f)
            _complete(st, budget - 1, max_edges, out)
        # two fresh edges to the new apex (all m >= 1)
        st = state.copy()
        st.holes.pop()
        s2, s2b = st.new_edge()  # w -> z
        s3, s3b = st.new_edge()  # z -> u
        st.insert_after(st.alpha[e], s2)
        st.sigma[s2b] = s3
        st.sigma[s3] = s2b
        st.insert_before(e, s3b)
        st.holes.append(hole[1:] + [s3b, s2b])
        _complete(st, budget - 1, max_edges, out)

    # B2[k]: apex at the hole corner before hole[k] (k=m: the corner at u).
    for k in range(1, m + 1):
        st = state.copy()
        st.holes.pop()
        s2, s2b = st.new_edge()  # w -> apex
        s3, s3b = st.new_edge()  # apex -> u
        st.insert_after(st.alpha[e], s2)
        if k < m:
            st.insert_before(e, s3b)
            st.insert_before(hole[k], s3)
            st.insert_before(s3, s2b)
            st.holes.append(hole[k:] + [s3b])
            st.holes.append(hole[1:k] + [s2b])
        else:
            # apex = u: parallel edge w->u plus a loop at u
            st.insert_before(e, s3b)
            st.insert_before(s3b, s3)
            st.insert_before(s3, s2b)
            st.holes.append(hole[1:] + [s2b])
            st.holes.append([s3b])
        _complete(st, budget, max_edges, out)

    # B3: second side reuses the hole edge hole[1].
    if m >= 2:
        d1 = hole[1]
        # B3a: third side is a new edge from head(d1) back to u.
        st = state.copy()
        st.holes.pop()
        s3, s3b = st.new_edge()
        if m >= 3:
            st.insert_before(hole[2], s3)
            st.insert_before(e, s3b)
        else:
            # head(d1) = u: the new edge is a loop at u
            st.insert_before(e, s3b)
            st.insert_before(s3b, s3)
        st.holes.append(hole[2:] + [s3b])
        _complete(st, budget, max_edges, out)

        # B3b: the hole is exactly a triangle and closes as a face.  (The
        # apex is a walk position, not a vertex, so this needs m == 3.)
        if m == 3:
            st = state.copy()
            st.holes.pop()
            _complete(st, budget, max_edges, out)

    # B4: third side reuses hole[-1], second side is new.
    if m >= 2:
        dm = hole[-1]
        st = state.copy()
        st.holes.pop()
        s2, s2b = st.new_edge()
        st.insert_after(st.alpha[e], s2)
        st.insert_before(dm, s2b)
        st.holes.append((hole[1:-1] + [s2b]) if m >= 3 else [s2b])
        _complete(st, budget, max_edges, out)


def all_triangulations_of_polygon(
    n: int, p: int, simple: bool = False
) -> list[CombinatorialMap]:
    """Every rooted triangulation of the p-gon with n inner vertices.

    With ``simple=True`` only simple maps (the |T_{n,p}| family) are kept;
    otherwise loops and multiple edges are allowed.  Each returned map is
    rooted at a boundary dart whose face orbit is the p-gon.
    """
    if n > _MAX_INNER or p > _MAX_BOUNDARY:
        raise ValueError(
            f"oracle bounds exceeded: n={n} (max {_MAX_INNER}), p={p} (max {_MAX_BOUNDARY})"
        )
    state = _initial_state(p)
    out: list[CombinatorialMap] = []
    _complete(state, n, 3 * n + 2 * p - 3, out)
    if simple:
        out = [m for m in out if m.is_simple_map()]
    forms = {m.canonical_form() for m in out}
    assert len(forms) == len(out), "oracle produced duplicate rooted maps"
    return out


def brute_force_polygon_triangulations(n: int, p: int) -> list[CombinatorialMap]:
    """Exhaustive list of rooted simple triangulations of the p-gon.

    Bounded to n <= 3, p <= 5; rooted maps have no nontrivial automorphism,
    so canonical-form equality makes the list exact.
    """
    if n > 3 or p > 5:
        raise ValueError(f"brute-force oracle bounded to n <= 3, p <= 5, got n={n}, p={p}")
    if p < 3:
        raise ValueError("simple triangulations need p >= 3")
    return all_triangulations_of_polygon(n, p, simple=True)


def all_quasi_simple(n: int, p: int) -> list[tuple[CombinatorialMap, int]]:
    """Every (rooted map, marked inner vertex) pair that is quasi-simple.

    A pair qualifies iff every 1-cycle and 2-cycle separates the root face
    from the mark (a mark sitting on the cycle counts as not separated).
    """
    out = []
    for m in all_triangulations_of_polygon(n, p):
        boundary = {m.vertex_of(d) for d in m.faces[m.root_face()]}
        cycles = [[d] for d in m.loops()] + [[a, b] for a, b in m.parallel_pairs()]
        for v in range(m.n_vertices):
            if v in boundary:
                continue
            if all(m.cycle_separates(c, v) for c in cycles):
                out.append((m, v))
    return out
