"""Quasi-simple triangulations of the 1-gon: counts, sampling, decomposition.

A quasi-simple triangulation of the 1-gon decomposes along its nested
chain of separating 1- and 2-cycles.  Walking inward:

* the root loop is followed by a forced triangle: a pendant edge (n = 1)
  or a double edge opening a 2-gon region;
* a 2-gon region either carries a *sandwich* triangle using both of its
  boundary edges plus a loop at one loop-free endpoint (an atom whose
  loop interior is again a 1-gon region), or its boundary pair merges
  into a single edge, leaving a sphere triangulation with a marked edge;
* a merged region is either simple (terminal: a rooted simple
  triangulation with the marked vertex inside) or is cut at its
  outermost separating 2-cycle into a simple outer piece (rooted at the
  outer merged edge, carrying the next merged edge) and an inner 2-gon
  region.

No edge can be parallel to the current merged edge, and no vertex can
carry two loops (either would create a non-separating 2-cycle), so the
chain counts close:

    Q(n)      = [n = 1] + g2(n-1, 1)
    g2(n, f)  = f * Q(n) + ged(n, f)
    ged(n, 1) = n t(n) + sum_m [ W(m) g2(n-m, 1)
                                 + ((3m-1) t(m) - W(m)) g2(n-m, 2) ]
    ged(n, 2) = n t(n) + sum_m (3m-1) t(m) g2(n-m, 2)

where f is the number of loop-free endpoints of the region's boundary
pair, t(m) counts rooted simple triangulations (t(1) = 1: the double
triangle), and W(m) = sum of (root-vertex degree - 1) over them splits
marked-edge choices by incidence to the loop-carrying root vertex.
The grammar is validated against the closed formula before sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

from cubiclab.counts import count_quasi_simple, count_simple_sphere
from cubiclab.maps import CombinatorialMap, MapError
from cubiclab.rng import Rng
from cubiclab.sampler import shared_sampler
from cubiclab.series import root_degree_weight_series

__all__ = [
    "QuasiTriangulation",
    "chain_counts_validation",
    "sample_quasi_1gon",
    "decompose_chain",
    "largest_simple_component",
    "psi",
    "psi_inverse",
]


@dataclass
class QuasiTriangulation:
    """Rooted-at-a-loop triangulation of the 1-gon with a marked vertex."""

    map: CombinatorialMap
    marked_vertex: int
    inner_vertices: int

    def check(self) -> "QuasiTriangulation":
        m = self.map
        m.validate()
        rf = m.root_face()
        if m.face_degree(rf) != 1:
            raise MapError("root face is not a 1-gon")
        for f in range(m.n_faces):
            if f != rf and m.face_degree(f) != 3:
                raise MapError("non-root face of degree != 3")
        if m.n_vertices != self.inner_vertices + 1:
            raise MapError("vertex count mismatch")
        if self.marked_vertex == m.vertex_of(m.root):
            raise MapError("marked vertex must be inner")
        cycles = [[d] for d in m.loops()] + [list(p) for p in m.parallel_pairs()]
        for c in cycles:
            if not m.cycle_separates(c, self.marked_vertex):
                raise MapError("a short cycle fails to separate root from mark")
        return self


# -- exact chain counts ----------------------------------------------------------


class ChainCounts:
    """Memoised exact counts for the nested-cycle chain."""

    def __init__(self, n_max: int):
        self.n_max = n_max
        self.t = [0] * (n_max + 2)
        if n_max >= 0:
            self.t[1] = 1  # the double triangle
        for m in range(2, n_max + 2):
            self.t[m] = count_simple_sphere(m)
        W = root_degree_weight_series(min(n_max + 1, 10**6))
        self.W = [0] * (n_max + 2)
        self.W[1] = 1  # double triangle: root degree 2
        for m in range(2, n_max + 2):
            self.W[m] = W[m]
        self._g2: dict[tuple[int, int], int] = {}
        self._ged: dict[tuple[int, int], int] = {}

    def Q(self, n: int) -> int:
        if n < 1:
            return 0
        return (1 if n == 1 else 0) + self.g2(n - 1, 1)

    def g2(self, n: int, f: int) -> int:
        if n < 1:
            return 0
        key = (n, f)
        if key not in self._g2:
            self._g2[key] = f * self.Q(n) + self.ged(n, f)
        return self._g2[key]

    def ged(self, n: int, f: int) -> int:
        if n < 1:
            return 0
        key = (n, f)
        if key not in self._ged:
            total = n * self.t[n]
            for m in range(1, n):
                rest = n - m
                if f == 1:
                    total += self.W[m] * self.g2(rest, 1)
                    total += ((3 * m - 1) * self.t[m] - self.W[m]) * self.g2(rest, 2)
                else:
                    total += (3 * m - 1) * self.t[m] * self.g2(rest, 2)
            self._ged[key] = total
        return self._ged[key]


_counts: ChainCounts | None = None


def chain_tables(n_max: int) -> ChainCounts:
    global _counts
    if _counts is None or _counts.n_max < n_max:
        _counts = ChainCounts(n_max)
    return _counts


def chain_counts_validation(n_max: int = 60) -> None:
    """Assert the chain grammar reproduces the closed quasi-simple counts."""
    cc = chain_tables(n_max)
    for n in range(1, n_max + 1):
        if cc.Q(n) != count_quasi_simple(n, 1):
            raise AssertionError(f"chain count mismatch at n={n}")


# -- cutting along a separating pair -----------------------------------------------
#
# Cutting a sphere map along a separating pair of parallel edges only
# rewires the twin involution: each side keeps its own darts of the pair,
# re-twinned with each other into a single merged edge.


def cut_at_pair(m: CombinatorialMap, d1: int, d2: int):
    """Cut along the separating 2-cycle {edge(d1), edge(d2)}.

    Returns ((map1, dartmap1), (map2, dartmap2)); side 1 holds the faces
    of d1, and each side is rooted at its merged boundary edge.
    """
    cut = {m.edge_of(d1), m.edge_of(d2)}
    label = m.face_regions(cut)
    if max(label) != 1:
        raise ValueError("pair does not separate the sphere into two sides")
    r1 = label[m.face_of(d1)]

    def side(region: int, keep1: int, keep2: int):
        darts = []
        for d in range(m.n_darts):
            if d in (keep1, keep2) or (
                m.edge_of(d) not in cut and label[m.face_of(d)] == region
            ):
                darts.append(d)
        dartset = set(darts)
        idx = {d: i for i, d in enumerate(darts)}
        sigma = [0] * len(darts)
        for d in darts:
            x = m.sigma[d]
            while x not in dartset:
                x = m.sigma[x]
            sigma[idx[d]] = idx[x]
        alpha = [0] * len(darts)
        for d in darts:
            a = m.alpha[d]
            if d == keep1:
                a = keep2
            elif d == keep2:
                a = keep1
            alpha[idx[d]] = idx[a]
        return CombinatorialMap(sigma, alpha, idx[keep1]), idx

    a1, a2 = m.alpha[d1], m.alpha[d2]
    if label[m.face_of(d2)] != r1:
        # d2 faces the other way: pair d1 with alpha(d2) on d1's side
        d2, a2 = a2, d2
    assert label[m.face_of(d2)] == r1 and label[m.face_of(a1)] != r1
    side1 = side(r1, d1, d2)
    side2 = side(1 - r1, a1, a2)
    return side1, side2


# -- builder ----------------------------------------------------------------------


class _QBuilder:
    """Growable dart arrays with dead-dart support (compacted at the end)."""

    def __init__(self):
        self.sigma: list[int] = []
        self.alpha: list[int] = []
        self.dead: set[int] = set()
        self.vertex_anchor: list[int] = []  # one live dart per logical vertex

    def new_darts(self, k: int) -> list[int]:
        base = len(self.sigma)
        self.sigma.extend([0] * k)
        self.alpha.extend([0] * k)
        return list(range(base, base + k))

    def append_map(self, m: CombinatorialMap) -> list[int]:
        base = len(self.sigma)
        self.sigma.extend(s + base for s in m.sigma)
        self.alpha.extend(a + base for a in m.alpha)
        return [base + d for d in range(m.n_darts)]

    def sigma_pred(self, d: int) -> int:
        x = d
        while self.sigma[x] != d:
            x = self.sigma[x]
        return x

    def finish(self, root: int, mark_dart: int) -> tuple[CombinatorialMap, int]:
        """Compact dead darts; return (map, vertex id of mark_dart's tail)."""
        live = [d for d in range(len(self.sigma)) if d not in self.dead]
        idx = {d: i for i, d in enumerate(live)}
        sigma = [idx[self.sigma[d]] for d in live]
        alpha = [idx[self.alpha[d]] for d in live]
        m = CombinatorialMap(sigma, alpha, idx[root])
        return m, m.vertex_of(idx[mark_dart])


def _start_gadget(b: _QBuilder):
    """Root loop + triangle + double edge; returns (root, dA, dB, looped_dart).

    dA, dB are the content-side darts of the 2-gon face; the looped
    endpoint (the root vertex) is the tail of dB.
    """
    l, lb, e1, e1b, e2, e2b = b.new_darts(6)
    # rotation at the root vertex: l -> lb -> e1 -> e2 -> l
    _set_cycle(b, [l, lb, e1, e2])
    _set_cycle(b, [e1b, e2b])
    b.alpha[l], b.alpha[lb] = lb, l
    b.alpha[e1], b.alpha[e1b] = e1b, e1
    b.alpha[e2], b.alpha[e2b] = e2b, e2
    # faces: root {lb}? phi(lb) = sigma[alpha(lb)] = sigma[l] = lb: root face
    # = orbit of lb requires sigma[l] = lb (true).  Triangle = [l, e1, e2b]:
    # phi(l) = sigma[lb] = e1; phi(e1) = sigma[e1b] = e2b; phi(e2b) =
    # sigma[e2] = l.  Two-gon face = [e1b, e2]: phi(e1b) = sigma[e1] = e2,
    # phi(e2) = sigma[e2b] = e1b.
    return lb, e1b, e2, lb


def _set_cycle(b: _QBuilder, darts: list[int]) -> None:
    for i, d in enumerate(darts):
        b.sigma[d] = darts[(i + 1) % len(darts)]


def _sandwich_insert(b: _QBuilder, dA: int, dB: int, at_tail_of_dB: bool):
    """Insert the sandwich triangle + loop into the 2-gon face [dA, dB].

    The loop goes at tail(dB) if `at_tail_of_dB` else at tail(dA).
    Returns the loop's interior dart (a 1-gon face to fill next).
    """
    if not at_tail_of_dB:
        dA, dB = dB, dA
    # now the pivot is tail(dB); face orbit is [dA, dB] either way
    l, lb = b.new_darts(2)
    b.alpha[l], b.alpha[lb] = lb, l
    # triangle [dA, l, dB]: phi(dA) = sigma[alpha(dA)] = l, phi(l) =
    # sigma[lb] = dB, phi(dB) unchanged; loop interior: phi(lb) = sigma[l] = lb
    oA = b.alpha[dA]
    nxt = b.sigma[oA]
    assert nxt == dB, "not a 2-gon face"
    b.sigma[oA] = l
    b.sigma[l] = lb
    b.sigma[lb] = dB
    return lb


def _pendant_insert(b: _QBuilder, hole: int):
    """Fill a 1-gon face [hole] with a pendant edge; returns the leaf dart."""
    f, fb = b.new_darts(2)
    b.alpha[f], b.alpha[fb] = fb, f
    # alpha(hole) is the outer loop side, whose sigma closes the 1-gon
    ah = b.alpha[hole]
    assert b.sigma[ah] == hole
    b.sigma[ah] = f
    b.sigma[f] = hole
    b.sigma[fb] = fb
    return fb


def _double_edge_insert(b: _QBuilder, hole: int):
    """Fill a 1-gon face [hole] with triangle + double edge to a new vertex.

    Returns (dA, dB): the content-side darts of the new 2-gon face, with
    tail(dB) = the loop vertex (the carried endpoint).
    """
    g1, g1b, g2, g2b = b.new_darts(4)
    b.alpha[g1], b.alpha[g1b] = g1b, g1
    b.alpha[g2], b.alpha[g2b] = g2b, g2
    ah = b.alpha[hole]  # outer loop side, tail = the loop vertex w
    assert b.sigma[ah] == hole
    # rotation at w: ... ah -> g1 -> g2 -> hole ...; at the new vertex b:
    # g1b -> g2b.  Triangle [hole, g1, g2b]; new 2-gon face [g1b, g2].
    b.sigma[ah] = g1
    b.sigma[g1] = g2
    b.sigma[g2] = hole
    _set_cycle(b, [g1b, g2b])
    return g1b, g2


def _glue_merged(b: _QBuilder, dA: int, dB: int, tri: CombinatorialMap, root_at_dB_tail: bool):
    """Fill the 2-gon face [dA, dB] with a merged-edge region.

    `tri` is a sphere triangulation rooted at the merged edge; its root
    tail is identified with tail(dB) if `root_at_dB_tail` else tail(dA).
    Returns the dart translation for tri.
    """
    if not root_at_dB_tail:
        dA, dB = dB, dA
    tr = b.append_map(tri)
    rd = tr[tri.root]
    ard = b.alpha[rd]
    oA, oB = b.alpha[dA], b.alpha[dB]
    assert b.sigma[oA] == dB and b.sigma[oB] == dA, "not a 2-gon face"
    # rewire twins: the outer sides pair with the opposite-direction root darts
    b.alpha[oB] = rd
    b.alpha[rd] = oB
    b.alpha[oA] = ard
    b.alpha[ard] = oA
    # splice rotations: the root-tail cycle replaces dB (entering right after
    # rd so the faces of tri are preserved), the head cycle replaces dA
    tri_next_rd = b.sigma[rd]
    tri_next_ard = b.sigma[ard]
    old_after_dB = b.sigma[dB]
    old_after_dA = b.sigma[dA]
    b.sigma[oA] = tri_next_rd
    b.sigma[rd] = old_after_dB
    b.sigma[oB] = tri_next_ard
    b.sigma[ard] = old_after_dA
    b.dead.add(dA)
    b.dead.add(dB)
    return tr


def _open_edge(b: _QBuilder, gd: int):
    """Open edge(gd) into a double edge; returns the new 2-gon face darts
    (dA, dB) with tail(dB) = tail(gd)."""
    agd = b.alpha[gd]
    e2, e2b = b.new_darts(2)
    b.alpha[e2], b.alpha[e2b] = e2b, e2
    # rotation: e2 right after gd at tail(gd); e2b right before agd at head
    pred_agd = b.sigma_pred(agd)
    b.sigma[e2] = b.sigma[gd]
    b.sigma[gd] = e2
    b.sigma[pred_agd] = e2b
    b.sigma[e2b] = agd
    # 2-gon face [agd, e2]: phi(agd) = sigma[gd] = e2, phi(e2) = sigma[e2b] = agd
    return agd, e2


# -- reference gadget maps ----------------------------------------------------------


def pendant_quasi_map() -> CombinatorialMap:
    """The unique element of Q_{1,1}: root loop plus a pendant edge."""
    return CombinatorialMap([1, 2, 0, 3], [1, 0, 3, 2], 1)


def double_triangle_map() -> CombinatorialMap:
    """The rooted simple triangulation on 3 vertices (two triangle faces)."""
    return CombinatorialMap([5, 2, 1, 4, 3, 0], [1, 0, 3, 2, 5, 4], 0)


# -- sampling ------------------------------------------------------------------------


def _sample_marked_triangulation(m: int, rng: Rng) -> tuple[CombinatorialMap, int]:
    """Uniform rooted simple triangulation (m+2 vertices; m = 1 is the
    double triangle) with a uniform marked vertex off the root edge.
    Returns the map and one dart whose tail is the mark."""
    if m == 1:
        tri = double_triangle_map()
    else:
        tri = shared_sampler().sample(m - 1, 3, rng).map
    rv = tri.vertex_of(tri.root)
    rw = tri.head(tri.root)
    k = rng.randint(m)
    count = -1
    for v in range(tri.n_vertices):
        if v not in (rv, rw):
            count += 1
            if count == k:
                break
    return tri, tri.vertices[v][0]


def _sample_cut_piece(m: int, mode: str, rng: Rng) -> tuple[CombinatorialMap, int]:
    """Uniform (rooted simple triangulation O, marked non-root edge) pair.

    mode "tail": the edge touches the root tail (the returned dart starts
    there); "other": it avoids the root tail; "any": unconditioned.  The
    conditioned modes are drawn by rejection on the root degree.
    """
    tries = 0
    while True:
        tries += 1
        sub = rng.split(tries)
        if m == 1:
            tri = double_triangle_map()
        else:
            tri = shared_sampler().sample(m - 1, 3, sub).map
        rv = tri.vertex_of(tri.root)
        d_root = tri.degree(rv)
        root_edge = tri.edge_of(tri.root)
        if mode == "tail":
            if sub.rand_below(m + 1) < d_root - 1:
                cands = [d for d in tri.vertices[rv] if tri.edge_of(d) != root_edge]
                return tri, cands[sub.randint(len(cands))]
        elif mode == "other":
            if sub.rand_below(3 * m - 1) < 3 * m - d_root:
                cands = [
                    d
                    for d in range(tri.n_darts)
                    if d < tri.alpha[d]
                    and tri.edge_of(d) != root_edge
                    and rv not in (tri.vertex_of(d), tri.head(d))
                ]
                return tri, cands[sub.randint(len(cands))]
        else:
            cands = [
                d for d in range(tri.n_darts) if d < tri.alpha[d] and tri.edge_of(d) != root_edge
            ]
            d = cands[sub.randint(len(cands))]
            if tri.vertex_of(d) != rv and tri.head(d) == rv:
                d = tri.alpha[d]  # start tail-incident darts at the tail
            return tri, d


def _fill_loop(b: _QBuilder, cc, rng: Rng, hole: int, n: int) -> int:
    """Fill a 1-gon face with n inner vertices; returns the mark dart."""
    if n == 1 and rng.rand_below(cc.Q(n)) < 1:
        return _pendant_insert(b, hole)
    dA, dB = _double_edge_insert(b, hole)
    return _fill_2gon(b, cc, rng, dA, dB, n - 1, 1)


def _fill_2gon(b: _QBuilder, cc, rng: Rng, dA: int, dB: int, n: int, f: int) -> int:
    """Fill the 2-gon face [dA, dB] having f loop-free endpoints (when
    f = 1 the carrier is tail(dB)).  Returns the mark dart."""
    r = rng.rand_below(cc.g2(n, f))
    w = cc.Q(n)
    if r < w:
        lb = _sandwich_insert(b, dA, dB, at_tail_of_dB=False)
        return _fill_loop(b, cc, rng, lb, n)
    r -= w
    if f == 2:
        if r < w:
            lb = _sandwich_insert(b, dA, dB, at_tail_of_dB=True)
            return _fill_loop(b, cc, rng, lb, n)
        r -= w
    w = n * cc.t[n]
    if r < w:
        tri, mark = _sample_marked_triangulation(n, rng)
        tr = _glue_merged(b, dA, dB, tri, root_at_dB_tail=True)
        return tr[mark]
    r -= w
    for m in range(1, n):
        rest = n - m
        if f == 1:
            w = cc.W[m] * cc.g2(rest, 1)
            if r < w:
                O, gd = _sample_cut_piece(m, "tail", rng)
                tr = _glue_merged(b, dA, dB, O, root_at_dB_tail=True)
                nA, nB = _open_edge(b, tr[gd])
                return _fill_2gon(b, cc, rng, nA, nB, rest, 1)
            r -= w
            w = ((3 * m - 1) * cc.t[m] - cc.W[m]) * cc.g2(rest, 2)
        else:
            w = (3 * m - 1) * cc.t[m] * cc.g2(rest, 2)
        if r < w:
            O, gd = _sample_cut_piece(m, "other" if f == 1 else "any", rng)
            tr = _glue_merged(b, dA, dB, O, root_at_dB_tail=True)
            nA, nB = _open_edge(b, tr[gd])
            return _fill_2gon(b, cc, rng, nA, nB, rest, 2)
        r -= w
    raise AssertionError("2-gon draw fell through")


def sample_quasi_1gon(n: int, rng: Rng) -> QuasiTriangulation:
    """Uniform quasi-simple triangulation of the 1-gon with n inner vertices."""
    if n < 1:
        raise ValueError("need n >= 1")
    cc = chain_tables(n)
    if n == 1:
        m = pendant_quasi_map()
        return QuasiTriangulation(m, m.vertex_of(3), 1)
    b = _QBuilder()
    root, dA, dB, _ = _start_gadget(b)
    mark = _fill_2gon(b, cc, rng, dA, dB, n - 1, 1)
    m, markv = b.finish(root, mark)
    return QuasiTriangulation(m, markv, n)


# -- forward decomposition -------------------------------------------------------------


def _restricted_submap(m: CombinatorialMap, darts: list[int], root: int):
    dartset = set(darts)
    idx = {d: i for i, d in enumerate(darts)}
    sigma = [0] * len(darts)
    for d in darts:
        x = m.sigma[d]
        while x not in dartset:
            x = m.sigma[x]
        sigma[idx[d]] = idx[x]
    alpha = [idx[m.alpha[d]] if m.alpha[d] in dartset else -1 for d in darts]
    return CombinatorialMap(sigma, alpha, idx[root]), idx


def _merge_pair_keep_side(m: CombinatorialMap, d1: int, d2: int, mark: int, tail_vertex: int):
    """Cut at the pair and keep the side holding `mark`; root the merged
    edge with its tail at (the image of) `tail_vertex`."""
    (s1, i1), (s2, i2) = cut_at_pair(m, d1, d2)
    for mm, idx in ((s1, i1), (s2, i2)):
        hit = [d for d in m.vertices[mark] if d in idx]
        if hit:
            new_mark = mm.vertex_of(idx[hit[0]])
            rd = mm.root
            tail_hit = [d for d in m.vertices[tail_vertex] if d in idx]
            if tail_hit and mm.vertex_of(rd) != mm.vertex_of(idx[tail_hit[0]]):
                rd = mm.alpha[rd]
            return mm.with_root(rd), new_mark
    raise AssertionError("mark vanished during cut")


def _extract_loop_interior(m: CombinatorialMap, inner_dart: int, mark: int):
    """Submap strictly inside the loop, rooted so the 1-gon is the root face."""
    ld = m.alpha[inner_dart]
    label = m.face_regions({m.edge_of(ld)})
    keep = label[m.face_of(inner_dart)]
    darts = [
        d
        for d in range(m.n_darts)
        if d in (ld, inner_dart)
        or (m.edge_of(d) != m.edge_of(ld) and label[m.face_of(d)] == keep)
    ]
    sub, idx = _restricted_submap(m, darts, ld)
    # root such that the root face is the 1-gon (outer side of the loop)
    if sub.face_degree(sub.root_face()) != 1:
        sub = sub.with_root(sub.alpha[sub.root])
    new_mark = sub.vertex_of(idx[[d for d in m.vertices[mark] if d in idx][0]])
    return sub, new_mark


def _find_merged_sandwich(m: CombinatorialMap):
    """A triangle face using both sides of the root edge plus a loop."""
    r, ar = m.root, m.alpha[m.root]
    for d0 in (r, ar):
        f = m.faces[m.face_of(d0)]
        if len(f) == 3 and r in f and ar in f:
            ld = [d for d in f if d not in (r, ar)][0]
            assert m.vertex_of(ld) == m.head(ld), "sandwich third side must be a loop"
            return ld
    return None


def decompose_chain(q: QuasiTriangulation) -> list[tuple]:
    """Forward decomposition along the nested chain of short cycles.

    Items: ('pendant',) | ('atom', pivot_at_tail: bool) |
    ('terminal', map, mark_vertex) | ('piece', map, g_dart, tail_incident).
    Terminal and piece maps are rooted at their outer merged edge with the
    tail at the loop-carrying endpoint where one exists.
    """
    m, mark = q.map, q.marked_vertex
    items: list[tuple] = []
    state = "1gon"
    while True:
        if state == "1gon":
            loop_vertex = m.vertex_of(m.root)
            tri = m.faces[m.face_of(m.alpha[m.root])]
            assert len(tri) == 3
            sides = [d for d in tri if d != m.alpha[m.root]]
            X, Y = sides
            if m.edge_of(X) == m.edge_of(Y):
                items.append(("pendant",))
                return items
            m, mark = _merge_pair_keep_side(m, m.alpha[X], m.alpha[Y], mark, loop_vertex)
            state = "edge"
        else:
            ld = _find_merged_sandwich(m)
            if ld is not None:
                pivot = m.vertex_of(ld)
                items.append(("atom", pivot == m.vertex_of(m.root)))
                tri_face_id = m.face_of(m.root) if ld in m.faces[m.face_of(m.root)] else m.face_of(m.alpha[m.root])
                inner = ld if m.face_of(ld) != tri_face_id else m.alpha[ld]
                m, mark = _extract_loop_interior(m, inner, mark)
                state = "1gon"
                continue
            pairs = m.parallel_pairs()
            if not pairs:
                assert not m.loops(), "stray loop without sandwich"
                items.append(("terminal", m, mark))
                return items
            best = None
            root_face = m.root_face()
            for (p1, p2) in pairs:
                label = m.face_regions({m.edge_of(p1), m.edge_of(p2)})
                if max(label) != 1:
                    continue
                root_side = sum(1 for f in range(m.n_faces) if label[f] == label[root_face])
                if best is None or root_side < best[0]:
                    best = (root_side, p1, p2)
            assert best is not None
            _, p1, p2 = best
            (s1, i1), (s2, i2) = cut_at_pair(m, p1, p2)
            if m.root in i1:
                outer, oidx, inner_map, iidx = s1, i1, s2, i2
            else:
                outer, oidx, inner_map, iidx = s2, i2, s1, i1
            outer = outer.with_root(oidx[m.root])
            g_dart = oidx[p1] if p1 in oidx else oidx[m.alpha[p1]]
            rv = outer.vertex_of(outer.root)
            tail_incident = rv in (outer.vertex_of(g_dart), outer.head(g_dart))
            if tail_incident and outer.vertex_of(g_dart) != rv:
                g_dart = outer.alpha[g_dart]
            elif not tail_incident:
                g_dart = min(g_dart, outer.alpha[g_dart])
            items.append(("piece", outer, g_dart, tail_incident))
            # continue inside, rooted at the new merged edge with its tail
            # matching the builder convention (tail of the opened dart)
            inner_root = iidx[p1 if p1 in iidx else m.alpha[p1]]
            mm = inner_map.with_root(inner_root)
            # orient: tail of the inner merged edge = image of tail(g in outer)
            target = None
            for d in m.vertices[_outer_tail_origin(m, outer, oidx, g_dart)]:
                if d in iidx:
                    target = mm.vertex_of(iidx[d])
                    break
            if target is not None and mm.vertex_of(mm.root) != target:
                mm = mm.with_root(mm.alpha[mm.root])
            hit = [d for d in m.vertices[mark] if d in iidx][0]
            mark = mm.vertex_of(iidx[hit])
            m = mm
            state = "edge"


def _outer_tail_origin(m, outer, oidx, g_dart):
    """Original vertex id of tail(g_dart in outer)."""
    inv = {i: d for d, i in oidx.items()}
    for i in outer.vertices[outer.vertex_of(g_dart)]:
        d = inv[i]
        return m.vertex_of(d)
    raise AssertionError


# -- derived operations -----------------------------------------------------------------


def largest_simple_component(q: QuasiTriangulation):
    """Largest simple piece along the chain decomposition.

    Returns (map | None, family_tag, remainder): the tag is marked-vertex
    for the terminal piece, marked-edge-at-root / marked-edge-not-root for
    cut pieces (by incidence of the carried edge to the root tail), and
    marked-edge when the chain is all atoms; remainder = n - half-faces.
    """
    items = decompose_chain(q)
    best = None
    for it in items:
        if it[0] == "terminal":
            size, tag = it[1].n_vertices - 2, "marked-vertex"
        elif it[0] == "piece":
            size = it[1].n_vertices - 2
            tag = "marked-edge-at-root" if it[3] else "marked-edge-not-root"
        else:
            continue
        if best is None or size > best[0]:
            best = (size, it[1], tag)
    if best is None:
        return None, "marked-edge", q.inner_vertices
    return best[1], best[2], q.inner_vertices - best[0]


def psi(q: QuasiTriangulation) -> tuple[CombinatorialMap, int]:
    """Merge the root loop's double edge into a rooted sphere triangulation.

    Returns (map, marked vertex); graph distances between surviving
    vertices are preserved.  Needs n >= 2 (n = 1 degenerates).
    """
    m = q.map
    if q.inner_vertices < 2:
        raise ValueError("psi needs n >= 2")
    tri = m.faces[m.face_of(m.alpha[m.root])]
    sides = [d for d in tri if d != m.alpha[m.root]]
    X, Y = sides
    assert m.edge_of(X) != m.edge_of(Y)
    root_vertex = m.vertex_of(m.root)
    out, mark = _merge_pair_keep_side(m, m.alpha[X], m.alpha[Y], q.marked_vertex, root_vertex)
    return out, mark


def psi_inverse(tri: CombinatorialMap, marked_vertex: int) -> QuasiTriangulation:
    """Open the root edge into a double edge and insert the root loop.

    Inverse of psi on its image; requires the mark off the root edge.
    """
    rv, rw = tri.vertex_of(tri.root), tri.head(tri.root)
    if marked_vertex in (rv, rw):
        raise ValueError("marked vertex must avoid the root edge")
    b = _QBuilder()
    tr = b.append_map(tri)
    r = tr[tri.root]
    dA, dB = _open_edge(b, r)
    lb = _sandwich_insert(b, dA, dB, at_tail_of_dB=True)
    mark_dart = tr[tri.vertices[marked_vertex][0]]
    m, markv = b.finish(lb, mark_dart)
    return QuasiTriangulation(m, markv, tri.n_vertices - 1)
