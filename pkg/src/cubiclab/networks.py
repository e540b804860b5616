"""Critical Boltzmann cubic networks and 3-connected core assembly.

A cubic network has two degree-1 poles and cubic internal vertices; under
the critical Boltzmann law each network d of size n carries probability
proportional to rho^n over its labelings.  Sampling follows the grammar

    D = 1 + L + S + P + H
    L: poles at distance 2, a loop-carrier behind an isthmus (type 1), or
       an unordered pair of L-networks sharing the carrier (type 2);
    S: series composition of >= 2 non-S parts;
    P: double edge with two substituted networks (not both trivial for
       simple graphs);
    H: a 3-connected core (dual of a uniform simple triangulation drawn
       from the critical Boltzmann law, using rho D(rho)^3 = 27/256) with
       all plain edges substituted independently.

The chi statistic that dominates the pole distance follows the recursion
1 / 2 / sum / sum+2 / 2+outer-edge-parts along the same tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from cubiclab.counts import count_simple_sphere
from cubiclab.maps import CombinatorialMap
from cubiclab.rng import Rng
from cubiclab.sampler import shared_sampler
from cubiclab.series import (
    frac_log,
    series_value_at,
    solve_graph_system,
    solve_multigraph_system,
)

__all__ = [
    "NetworkLaw",
    "CubicNetwork",
    "MultiGraph",
    "sample_boltzmann_network",
    "sample_boltzmann_polygon_size",
    "pole_distance",
    "chi",
    "build_core_substituted",
    "sample_labeled_core",
    "nu_star_table",
    "SubstitutionRecord",
]

RHO_T = 27.0 / 256.0


class MultiGraph:
    """Plain multigraph on integer vertices (loops and parallels allowed)."""

    def __init__(self, n_vertices: int = 0):
        self.n = n_vertices
        self.edges: list[tuple[int, int]] = []

    def add_vertex(self) -> int:
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int) -> int:
        self.edges.append((u, v))
        return len(self.edges) - 1

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def bfs_distances(self, source: int, adj=None) -> list[int]:
        if adj is None:
            adj = self.adjacency()
        dist = [-1] * self.n
        dist[source] = 0
        queue = [source]
        i = 0
        while i < len(queue):
            u = queue[i]
            i += 1
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist


class SizeCapExceeded(Exception):
    pass


@dataclass
class CubicNetwork:
    """A sampled network with its generative decomposition tree."""

    tag: str  # trivial | L | S | P | H
    size: int
    children: list = field(default_factory=list)
    subtype: int = 0  # L-networks: 1 or 2
    core: CombinatorialMap | None = None  # H: dual cubic rooted map
    core_edge_children: list = field(default_factory=list)  # H: per plain edge
    core_outer_flags: list = field(default_factory=list)  # H: True if outer edge
    _chi: int | None = None
    _built: tuple | None = None

    @property
    def chi(self) -> int:
        if self._chi is None:
            self._chi = chi(self)
        return self._chi

    def build(self) -> tuple[MultiGraph, int, int]:
        """Materialise the network; returns (graph, minus_pole, plus_pole)."""
        if self._built is None:
            g = MultiGraph(2)
            _build_into(self, g, 0, 1)
            self._built = (g, 0, 1)
        return self._built


def chi(net: CubicNetwork) -> int:
    """Pole-distance dominating statistic along the decomposition tree."""
    if net.tag == "trivial":
        return 1
    if net.tag == "L":
        return 2
    if net.tag == "S":
        return sum(chi(c) for c in net.children)
    if net.tag == "P":
        return 2 + sum(chi(c) for c in net.children)
    if net.tag == "H":
        total = 2
        for child, outer in zip(net.core_edge_children, net.core_outer_flags):
            if outer:
                total += chi(child)
        return total
    raise ValueError(f"unknown tag {net.tag!r}")


def pole_distance(net: CubicNetwork) -> int:
    """Graph distance between the two poles of the built network."""
    g, pm, pp = net.build()
    dist = g.bfs_distances(pm)
    if dist[pp] < 0:
        raise ValueError("network is disconnected")
    return dist[pp]


# -- building ---------------------------------------------------------------------


def _substitute(net: CubicNetwork, g: MultiGraph, u: int, v: int) -> None:
    """Substitute `net` into the slot (u, v): u gets the minus side."""
    if net.tag == "trivial":
        g.add_edge(u, v)
    else:
        a, b = _build_stripped(net, g)
        g.add_edge(u, a)
        g.add_edge(b, v)


def _build_into(net: CubicNetwork, g: MultiGraph, pm: int, pp: int) -> None:
    """Attach the network between pole vertices pm and pp."""
    _substitute(net, g, pm, pp)


def _build_stripped(net: CubicNetwork, g: MultiGraph) -> tuple[int, int]:
    """Build the internal structure; return the two leg attachment vertices.

    Stripping the poles is what makes series composition smooth correctly:
    the merged pole of N1 + N2 disappears into a direct edge b1 - a2.
    """
    tag = net.tag
    if tag == "trivial":
        raise ValueError("the trivial network has no internal structure")
    if tag == "L":
        u = g.add_vertex()
        if net.subtype == 1:
            w = g.add_vertex()
            g.add_edge(u, w)
            content = net.children[0]
            if content is None:
                g.add_edge(w, w)  # bare loop (multigraph model)
            else:
                _substitute(content, g, w, w)
        else:
            # pair composition: v carries the pole-stripped branches of the
            # two component L-networks
            v = g.add_vertex()
            g.add_edge(u, v)
            for branch in net.children:
                _graft_L_branch(branch, g, v)
        return u, u
    if tag == "S":
        ends = [_build_stripped(part, g) for part in net.children]
        for (a1, b1), (a2, b2) in zip(ends, ends[1:]):
            g.add_edge(b1, a2)
        return ends[0][0], ends[-1][1]
    if tag == "P":
        a = g.add_vertex()
        b = g.add_vertex()
        for part in net.children:
            _substitute(part, g, a, b)
        return a, b
    if tag == "H":
        core = net.core
        base = g.n
        for _ in range(core.n_vertices):
            g.add_vertex()
        root = core.root
        rv = core.vertex_of(root)
        rw = core.head(root)
        root_edge = min(root, core.alpha[root])
        idx = 0
        for d in range(core.n_darts):
            if d < core.alpha[d]:
                if d == root_edge:
                    continue
                x, y = core.vertex_of(d), core.head(d)
                _substitute(net.core_edge_children[idx], g, base + x, base + y)
                idx += 1
        return base + rv, base + rw
    raise ValueError(tag)


def _graft_L_branch(branch: CubicNetwork, g: MultiGraph, v: int) -> None:
    """Attach an L-network minus its poles and pole-neighbor onto v.

    The pole-neighbor loses its two leg edges; its one remaining edge is
    re-attached to v.
    """
    gb = MultiGraph(2)
    _build_into(branch, gb, 0, 1)
    ui = None
    for a, b in gb.edges:
        if a in (0, 1):
            ui = b
        elif b in (0, 1):
            ui = a
    remap = {}
    for w in range(2, gb.n):
        if w != ui:
            remap[w] = g.add_vertex()
    for a, b in gb.edges:
        if a in (0, 1) or b in (0, 1):
            continue
        if a == ui:
            g.add_edge(v, remap[b])
        elif b == ui:
            g.add_edge(v, remap[a])
        else:
            g.add_edge(remap[a], remap[b])


# -- the law and the samplers --------------------------------------------------------


class NetworkLaw:
    """Evaluations of the network series at criticality, for one variant."""

    def __init__(self, variant: str = "graphs", order: int = 320):
        if variant not in ("graphs", "multigraphs"):
            raise ValueError(variant)
        self.variant = variant
        self.order = order
        system = (
            solve_multigraph_system(order) if variant == "multigraphs" else solve_graph_system(order)
        )
        self.system = system
        if variant == "multigraphs":
            self.rho = 54.0 / 79.0**1.5
        else:
            from cubiclab.series import _estimate_rho

            logs = [frac_log(c) if c > 0 else None for c in system["D"]]
            self.rho = _estimate_rho(logs)
        self.D = series_value_at(system["D"], self.rho)
        self.L = series_value_at(system["L"], self.rho, tail_exponent=1.5)
        self.S = series_value_at(system["S"], self.rho, tail_exponent=1.5)
        self.P = series_value_at(system["P"], self.rho, tail_exponent=1.5)
        self.H = series_value_at(system["H"], self.rho, tail_exponent=1.5)
        # core-size law: P(m) ~ t_m (rho D^3)^m; rho D(rho)^3 = 27/256
        self.x_core = self.rho * self.D**3
        self._core_cdf = None
        self.size_cap_default = 10**6

    def normalization_check(self) -> float:
        """|1 + L + S + P + H - D| at rho (grammar consistency)."""
        return abs(1.0 + self.L + self.S + self.P + self.H - self.D)

    def coefficient(self, n: int) -> float:
        c = self.system["D"][n]
        return math.exp(frac_log(c)) if c > 0 else 0.0

    def size_probability(self, n: int) -> float:
        """P(|N| = n) under the critical Boltzmann law."""
        return self.coefficient(n) * self.rho**n / self.D

    def core_size_cdf(self, cap: int = 2000):
        if self._core_cdf is None:
            weights = []
            for m in range(2, cap + 1):
                lg = (
                    math.log(count_simple_sphere(m))
                    if m < 400
                    else frac_log(Fraction(count_simple_sphere(m)))
                )
                weights.append(math.exp(lg + m * math.log(self.x_core)))
            total = sum(weights)
            acc = 0.0
            cdf = []
            for w in weights:
                acc += w
                cdf.append(acc / total)
            self._core_cdf = cdf
        return self._core_cdf


_polygon_cdfs: dict[tuple[int, int], tuple] = {}


def _polygon_boltzmann_cdf(p: int, n_cap: int):
    key = (p, n_cap)
    if key not in _polygon_cdfs:
        lrho = math.log(RHO_T)
        base = math.log(2) + math.lgamma(2 * p - 2) - math.lgamma(p) - math.lgamma(p - 2)
        weights = []
        for n in range(0, n_cap + 1):
            lg = (
                base
                + math.lgamma(4 * n + 2 * p - 4)
                - math.lgamma(n + 1)
                - math.lgamma(3 * n + 2 * p - 2)
            )
            weights.append(math.exp(lg + n * lrho))
        total = sum(weights)
        acc = 0.0
        cdf = []
        for w in weights:
            acc += w
            cdf.append(acc / total)
        tail = weights[-1] * n_cap / 1.5 / total
        _polygon_cdfs[key] = (cdf, tail)
    return _polygon_cdfs[key]


def sample_boltzmann_polygon_size(p: int, rng: Rng, n_cap: int = 3000) -> tuple[int, float]:
    """Size n with P(n) prop. to |T_{n,p}| (27/256)^n, truncated at n_cap.

    Returns (n, truncated tail mass estimate); the draw is exact
    inverse-CDF on the truncated support.
    """
    cdf, tail = _polygon_boltzmann_cdf(p, n_cap)
    r = rng.random()
    lo, hi = 0, len(cdf) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if r < cdf[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo, tail


def _draw_type(law: NetworkLaw, rng: Rng, weights: dict[str, float]) -> str:
    total = sum(weights.values())
    r = rng.random() * total
    for tag, w in weights.items():
        if r < w:
            return tag
        r -= w
    return tag


def sample_boltzmann_network(
    law: NetworkLaw, rng: Rng, size_cap: int | None = None, _budget: list | None = None
) -> CubicNetwork:
    """A network drawn from the critical Boltzmann law (conditioned on the cap).

    Retries on cap overflow are counted in `law.last_retries`.
    """
    cap = size_cap if size_cap is not None else law.size_cap_default
    retries = 0
    while True:
        try:
            budget = [cap]
            net = _gen_D(law, rng, budget)
            law.last_retries = retries
            return net
        except SizeCapExceeded:
            retries += 1
            if retries > 10000:
                raise


def _spend(budget, amount):
    budget[0] -= amount
    if budget[0] < 0:
        raise SizeCapExceeded


def _gen_D(law, rng, budget) -> CubicNetwork:
    w = {"trivial": 1.0, "L": law.L, "S": law.S, "P": law.P, "H": law.H}
    tag = _draw_type(law, rng, w)
    return _gen_tagged(law, rng, budget, tag)


def _gen_nontrivial(law, rng, budget, exclude: str) -> CubicNetwork:
    w = {"L": law.L, "S": law.S, "P": law.P, "H": law.H}
    w.pop(exclude, None)
    tag = _draw_type(law, rng, w)
    return _gen_tagged(law, rng, budget, tag)


def _gen_tagged(law, rng, budget, tag) -> CubicNetwork:
    if tag == "trivial":
        return CubicNetwork("trivial", 0)
    if tag == "L":
        return _gen_L(law, rng, budget)
    if tag == "S":
        return _gen_S(law, rng, budget)
    if tag == "P":
        return _gen_P(law, rng, budget)
    return _gen_H(law, rng, budget)


def _gen_L(law, rng, budget) -> CubicNetwork:
    multi = law.variant == "multigraphs"
    w1 = 0.5 * law.rho * (law.D if multi else law.D - 1.0 - law.L)
    w2 = 0.5 * law.L * law.L
    if rng.random() * (w1 + w2) < w1:
        _spend(budget, 1)
        if multi:
            content = None
            if rng.random() * law.D >= 1.0:  # non-trivial loop content
                content = _gen_nontrivial(law, rng, budget, exclude="")
        else:
            content = _gen_nontrivial(law, rng, budget, exclude="L")
        node = CubicNetwork("L", 1 + (content.size if content else 0), [content], subtype=1)
        return node
    b1 = _gen_L(law, rng, budget)
    b2 = _gen_L(law, rng, budget)
    return CubicNetwork("L", b1.size + b2.size, [b1, b2], subtype=2)


def _gen_S(law, rng, budget) -> CubicNetwork:
    # S = (D - 1 - S)(D - 1): a non-S head and a non-trivial tail
    head = _gen_nontrivial(law, rng, budget, exclude="S")
    tail_w = {"L": law.L, "S": law.S, "P": law.P, "H": law.H}
    tag = _draw_type(law, rng, tail_w)
    tail = _gen_tagged(law, rng, budget, tag)
    parts = [head] + (tail.children if tail.tag == "S" else [tail])
    return CubicNetwork("S", sum(p.size for p in parts), parts)


def _gen_P(law, rng, budget) -> CubicNetwork:
    multi = law.variant == "multigraphs"
    _spend(budget, 1)
    while True:
        n1 = _gen_D(law, rng, budget)
        n2 = _gen_D(law, rng, budget)
        if multi or n1.tag != "trivial" or n2.tag != "trivial":
            break
        # simple graphs: both-trivial would be a double edge; redraw
    return CubicNetwork("P", 1 + n1.size + n2.size, [n1, n2])


def _gen_H(law, rng, budget) -> CubicNetwork:
    cdf = law.core_size_cdf()
    r = rng.random()
    m = 2
    for i, c in enumerate(cdf):
        if r < c:
            m = i + 2
            break
    else:
        m = len(cdf) + 1
    _spend(budget, m)
    tri = shared_sampler().sample(m - 1, 3, rng)
    core = tri.map.dual()
    children = []
    flags = []
    root_edge = min(core.root, core.alpha[core.root])
    outer_face = core.face_of(core.root)
    outer_edges = {core.edge_of(d) for d in core.faces[outer_face]} - {root_edge}
    for d in range(core.n_darts):
        if d < core.alpha[d] and d != root_edge:
            sub = _gen_D(law, rng, budget)
            children.append(sub)
            flags.append(d in outer_edges)
    size = m + sum(c.size for c in children)
    return CubicNetwork("H", size, core=core, core_edge_children=children, core_outer_flags=flags)


# -- cores with substituted edges ------------------------------------------------------


@dataclass
class SubstitutionRecord:
    """What was substituted where when building C from its core K."""

    edge: tuple[int, int]  # endpoints in K (minus side first)
    network: CubicNetwork
    delta: int
    size: int


def sample_labeled_core(q: int, rng: Rng) -> tuple[MultiGraph, CombinatorialMap, list[int]]:
    """Uniform labeled rooted 3-connected cubic planar graph of size q.

    Dual of a uniform rooted simple triangulation with q+2 vertices plus a
    uniform labeling (exact: mirror pairs of rooted maps merge into the
    same labeled graph with equal weight).
    """
    if q < 2:
        raise ValueError("cores need size >= 2 (K4)")
    tri = shared_sampler().sample(q - 1, 3, rng)
    core_map = tri.map.dual()
    labels = rng.permutation(core_map.n_vertices)
    g = MultiGraph(core_map.n_vertices)
    for d in range(core_map.n_darts):
        if d < core_map.alpha[d]:
            g.add_edge(core_map.vertex_of(d), core_map.head(d))
    return g, core_map, labels


def build_core_substituted(
    q: int, rng: Rng, variant: str = "graphs", law: NetworkLaw | None = None
) -> tuple[MultiGraph, MultiGraph, list[SubstitutionRecord]]:
    """The substituted model: uniform core of size q, i.i.d. networks on edges.

    Returns (C, K, records); C's first 2q vertices are K's vertices, so
    the identity correspondence on them is the projection used downstream.
    """
    if law is None:
        law = shared_law(variant)
    K, core_map, labels = sample_labeled_core(q, rng)
    C = MultiGraph(K.n)
    records = []
    for i, (u, v) in enumerate(K.edges):
        net = sample_boltzmann_network(law, rng.split(i), size_cap=10**6)
        if net.tag == "trivial":
            C.add_edge(u, v)
            records.append(SubstitutionRecord((u, v), net, 1, 0))
            continue
        g, pm, pp = net.build()
        base = C.n
        remap = {}
        for w in range(2, g.n):
            remap[w] = C.add_vertex()
        remap[pm] = u
        remap[pp] = v
        for (a, b) in g.edges:
            C.add_edge(remap[a], remap[b])
        dist = g.bfs_distances(pm)
        records.append(SubstitutionRecord((u, v), net, dist[pp], net.size))
    return C, K, records


_laws: dict[str, NetworkLaw] = {}


def shared_law(variant: str) -> NetworkLaw:
    if variant not in _laws:
        _laws[variant] = NetworkLaw(variant)
    return _laws[variant]


def nu_star_table(variant: str, draws: int = 10**6, seed: int = 20260810, law=None) -> dict[int, float]:
    """Empirical pole-distance law of critical Boltzmann networks.

    The table ships with its seed: same seed, same table.
    """
    if law is None:
        law = shared_law(variant)
    rng = Rng(seed)
    counts: dict[int, int] = {}
    for i in range(draws):
        net = sample_boltzmann_network(law, rng.split(i))
        d = pole_distance(net) if net.tag != "trivial" else 1
        counts[d] = counts.get(d, 0) + 1
    return {k: v / draws for k, v in sorted(counts.items())}
