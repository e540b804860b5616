"""Rooted combinatorial maps: darts, rotation, twins, and map surgery.

Encoding conventions (fixed once, used everywhere):

* darts are dense ints ``0..2E-1``; ``alpha`` is the fixed-point-free twin
  involution, ``sigma[d]`` the next dart counterclockwise around the tail
  of ``d``.
* faces are the orbits of ``phi = sigma o alpha``; the orbit of a dart is
  the face on its *right*, so the root face is simply the orbit of the
  root dart.
* the dual uses ``sigma* = alpha o sigma^-1`` with root ``alpha(root)``;
  with this pairing the double dual returns the original map with its
  root edge reversed, and dual vertices inherit primal face degrees.

Maps are immutable after :meth:`CombinatorialMap.validate`; the builder
functions at the bottom are the only code that mutates rotation tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

__all__ = [
    "CombinatorialMap",
    "MapError",
    "polygon_map",
    "loop_map",
    "parse_map",
    "PolygonTriangulation",
]


class MapError(ValueError):
    """Raised when a dart structure fails validation."""


class CombinatorialMap:
    """A rooted planar map given by rotation and twin permutations."""

    __slots__ = ("sigma", "alpha", "root", "_vertex_of", "_vertices", "_face_of", "_faces")

    def __init__(self, sigma: list[int], alpha: list[int], root: int):
        self.sigma = list(sigma)
        self.alpha = list(alpha)
        self.root = root
        self._vertex_of = None
        self._vertices = None
        self._face_of = None
        self._faces = None

    # -- structure ----------------------------------------------------------

    @property
    def n_darts(self) -> int:
        return len(self.alpha)

    @property
    def n_edges(self) -> int:
        return len(self.alpha) // 2

    def phi(self, d: int) -> int:
        """Next dart along the face on the right of d."""
        return self.sigma[self.alpha[d]]

    def _orbits(self, perm) -> tuple[list[int], list[list[int]]]:
        n = self.n_darts
        label = [-1] * n
        orbits = []
        for d in range(n):
            if label[d] >= 0:
                continue
            idx = len(orbits)
            cyc = []
            x = d
            while label[x] < 0:
                label[x] = idx
                cyc.append(x)
                x = perm(x)
            orbits.append(cyc)
        return label, orbits

    def _ensure_vertices(self):
        if self._vertex_of is None:
            self._vertex_of, self._vertices = self._orbits(lambda d: self.sigma[d])

    def _ensure_faces(self):
        if self._face_of is None:
            self._face_of, self._faces = self._orbits(self.phi)

    @property
    def vertices(self) -> list[list[int]]:
        self._ensure_vertices()
        return self._vertices

    @property
    def faces(self) -> list[list[int]]:
        self._ensure_faces()
        return self._faces

    def vertex_of(self, d: int) -> int:
        self._ensure_vertices()
        return self._vertex_of[d]

    def face_of(self, d: int) -> int:
        self._ensure_faces()
        return self._face_of[d]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def head(self, d: int) -> int:
        """Vertex at the tip of dart d."""
        return self.vertex_of(self.alpha[d])

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def face_degree(self, f: int) -> int:
        return len(self.faces[f])

    def root_face(self) -> int:
        return self.face_of(self.root)

    def edge_of(self, d: int) -> int:
        return min(d, self.alpha[d])

    def edge_endpoints(self, d: int) -> tuple[int, int]:
        return self.vertex_of(d), self.head(d)

    # -- validation ---------------------------------------------------------

    def validate(self) -> "CombinatorialMap":
        n = self.n_darts
        if n == 0 or n % 2:
            raise MapError("dart count must be positive and even")
        if sorted(self.sigma) != list(range(n)):
            raise MapError("sigma is not a permutation")
        for d in range(n):
            a = self.alpha[d]
            if not 0 <= a < n or a == d or self.alpha[a] != d:
                raise MapError("alpha is not a fixed-point-free involution")
        if not 0 <= self.root < n:
            raise MapError("root dart out of range")
        # connectedness on darts under <sigma, alpha>
        seen = [False] * n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            d = stack.pop()
            for e in (self.sigma[d], self.alpha[d]):
                if not seen[e]:
                    seen[e] = True
                    count += 1
                    stack.append(e)
        if count != n:
            raise MapError("map is not connected")
        if self.n_vertices - self.n_edges + self.n_faces != 2:
            raise MapError("Euler characteristic is not 2")
        return self

    # -- canonical form and equality -----------------------------------------

    def canonical_form(self) -> tuple:
        """Root-preserving canonical relabeling (rooted maps are rigid).

        Darts are renumbered in BFS order from the root following
        (sigma, alpha); two rooted maps are isomorphic iff the forms match.
        """
        n = self.n_darts
        new = [-1] * n
        new[self.root] = 0
        order = [self.root]
        nxt = 1
        i = 0
        while i < len(order):
            d = order[i]
            i += 1
            for e in (self.sigma[d], self.alpha[d]):
                if new[e] < 0:
                    new[e] = nxt
                    nxt += 1
                    order.append(e)
        sig = [0] * n
        alp = [0] * n
        for d in range(n):
            sig[new[d]] = new[self.sigma[d]]
            alp[new[d]] = new[self.alpha[d]]
        return tuple(sig), tuple(alp)

    def is_isomorphic(self, other: "CombinatorialMap") -> bool:
        return self.n_darts == other.n_darts and self.canonical_form() == other.canonical_form()

    # -- basic derived maps ---------------------------------------------------

    def relabeled(self) -> "CombinatorialMap":
        sig, alp = self.canonical_form()
        return CombinatorialMap(list(sig), list(alp), 0)

    def with_root(self, d: int) -> "CombinatorialMap":
        return CombinatorialMap(self.sigma, self.alpha, d)

    def mirror(self) -> "CombinatorialMap":
        """Reflected map (rotations reversed), same root dart."""
        n = self.n_darts
        inv = [0] * n
        for d in range(n):
            inv[self.sigma[d]] = d
        return CombinatorialMap(inv, self.alpha, self.root)

    def dual(self) -> "CombinatorialMap":
        """Dual map; primal faces become vertices with equal degrees.

        The dual root crosses the primal root edge (the chirality is the
        one that makes ``m.dual().dual()`` equal m with root reversed).
        """
        n = self.n_darts
        inv = [0] * n
        for d in range(n):
            inv[self.sigma[d]] = d
        sigma_star = [self.alpha[inv[d]] for d in range(n)]
        return CombinatorialMap(sigma_star, list(self.alpha), self.alpha[self.root])

    # -- graph-level helpers ---------------------------------------------------

    def adjacency(self) -> dict[int, list[int]]:
        """Vertex adjacency with multiplicity (loops appear twice)."""
        adj: dict[int, list[int]] = {v: [] for v in range(self.n_vertices)}
        for d in range(self.n_darts):
            adj[self.vertex_of(d)].append(self.head(d))
        return adj

    def graph_distances(self, sources: Iterable[int]) -> list[int]:
        """Multi-source BFS distances on vertices."""
        dist = [-1] * self.n_vertices
        queue = []
        for s in sources:
            if dist[s] < 0:
                dist[s] = 0
                queue.append(s)
        i = 0
        while i < len(queue):
            v = queue[i]
            i += 1
            for d in self.vertices[v]:
                w = self.head(d)
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def loops(self) -> list[int]:
        """One dart per loop edge."""
        out = []
        for d in range(self.n_darts):
            if d < self.alpha[d] and self.vertex_of(d) == self.head(d):
                out.append(d)
        return out

    def parallel_pairs(self) -> list[tuple[int, int]]:
        """One (dart, dart) pair per pair of distinct parallel non-loop edges."""
        by_ends: dict[tuple[int, int], list[int]] = {}
        for d in range(self.n_darts):
            if d < self.alpha[d]:
                u, v = self.vertex_of(d), self.head(d)
                if u != v:
                    by_ends.setdefault((min(u, v), max(u, v)), []).append(d)
        out = []
        for darts in by_ends.values():
            for i in range(len(darts)):
                for j in range(i + 1, len(darts)):
                    out.append((darts[i], darts[j]))
        # two loops at a common vertex also form a 2-cycle
        by_vertex: dict[int, list[int]] = {}
        for d in self.loops():
            by_vertex.setdefault(self.vertex_of(d), []).append(d)
        for darts in by_vertex.values():
            for i in range(len(darts)):
                for j in range(i + 1, len(darts)):
                    out.append((darts[i], darts[j]))
        return out

    def is_simple_map(self) -> bool:
        return not self.loops() and not self.parallel_pairs()

    # -- separation test for short cycles ---------------------------------------

    def face_regions(self, cut_edges: set[int]) -> list[int]:
        """Label faces by the region they fall in when `cut_edges` are cut.

        Two faces are in the same region iff connected through an edge not
        in `cut_edges` (edges given as min-dart ids).
        """
        self._ensure_faces()
        nfaces = self.n_faces
        label = [-1] * nfaces
        nreg = 0
        for f0 in range(nfaces):
            if label[f0] >= 0:
                continue
            label[f0] = nreg
            stack = [f0]
            while stack:
                f = stack.pop()
                for d in self.faces[f]:
                    if self.edge_of(d) in cut_edges:
                        continue
                    g = self.face_of(self.alpha[d])
                    if label[g] < 0:
                        label[g] = nreg
                        stack.append(g)
            nreg += 1
        return label

    def cycle_separates(self, cycle_darts: list[int], marked_vertex: int) -> bool:
        """True iff cutting along the 1- or 2-cycle splits the sphere into
        two sides with the root face on one and `marked_vertex` strictly on
        the other.

        A mark sitting on the cycle is not separated; neither is anything
        separated by two loops at a common vertex (the cut then has three
        regions, so no two-sided separation exists).
        """
        on_cycle = {self.vertex_of(d) for d in cycle_darts} | {self.head(d) for d in cycle_darts}
        if marked_vertex in on_cycle:
            return False
        cut = {self.edge_of(d) for d in cycle_darts}
        label = self.face_regions(cut)
        if max(label) != 1:
            return False
        root_region = label[self.root_face()]
        mark_regions = {label[self.face_of(d)] for d in self.vertices[marked_vertex]}
        return root_region not in mark_regions

    # -- serialization ------------------------------------------------------------

    def dumps(self) -> str:
        """Text format: header, one ccw dart list per vertex, one twin pair per edge."""
        lines = [f"MAP v1 {self.n_darts} {self.root}"]
        for cyc in self.vertices:
            lines.append("v " + " ".join(str(d) for d in cyc))
        for d in range(self.n_darts):
            if d < self.alpha[d]:
                lines.append(f"e {d} {self.alpha[d]}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"CombinatorialMap(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces})"


def parse_map(text: str) -> CombinatorialMap:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[:2] != ["MAP", "v1"]:
        raise MapError(f"bad header: {lines[0]!r}")
    n, root = int(head[2]), int(head[3])
    sigma = [-1] * n
    alpha = [-1] * n
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "v":
            cyc = [int(x) for x in parts[1:]]
            for i, d in enumerate(cyc):
                sigma[d] = cyc[(i + 1) % len(cyc)]
        elif parts[0] == "e":
            a, b = int(parts[1]), int(parts[2])
            alpha[a], alpha[b] = b, a
        else:
            raise MapError(f"bad line: {ln!r}")
    m = CombinatorialMap(sigma, alpha, root)
    return m.validate()


# -- elementary builders -------------------------------------------------------


def polygon_map(p: int) -> CombinatorialMap:
    """Simple cycle with p >= 1 vertices; root face = the orbit of the root.

    Darts 2i (v_i -> v_{i+1}) and 2i+1 (its twin).  The root dart is 0 and
    its face orbit is 0, 2, 4, ...; the complementary face is the "hole"
    that triangulation builders fill.
    """
    if p < 1:
        raise ValueError("polygon needs p >= 1")
    if p == 1:
        return loop_map()
    n = 2 * p
    sigma = [0] * n
    alpha = [0] * n
    for i in range(p):
        d = 2 * i
        alpha[d] = d + 1
        alpha[d + 1] = d
        prev_twin = 2 * ((i - 1) % p) + 1
        sigma[d] = prev_twin
        sigma[prev_twin] = d
    return CombinatorialMap(sigma, alpha, 0)


def loop_map() -> CombinatorialMap:
    """Single vertex with one loop; root face is one side of the loop."""
    return CombinatorialMap([1, 0], [1, 0], 0)


@dataclass
class PolygonTriangulation:
    """A triangulation of the p-gon: root face a simple p-cycle, rest triangles."""

    map: CombinatorialMap
    p: int
    inner_vertices: int
    marked_vertex: Optional[int] = None

    def check(self, simple: bool = True) -> "PolygonTriangulation":
        m = self.map
        m.validate()
        rf = m.root_face()
        if m.face_degree(rf) != self.p:
            raise MapError(f"root face degree {m.face_degree(rf)} != {self.p}")
        for f in range(m.n_faces):
            if f != rf and m.face_degree(f) != 3:
                raise MapError("non-root face of degree != 3")
        boundary = {m.vertex_of(d) for d in m.faces[rf]}
        if self.p >= 3 and len(boundary) != self.p:
            raise MapError("root face is not a simple cycle")
        if m.n_vertices - len(boundary) != self.inner_vertices:
            raise MapError("inner vertex count mismatch")
        if simple and not m.is_simple_map():
            raise MapError("map is not simple")
        return self
