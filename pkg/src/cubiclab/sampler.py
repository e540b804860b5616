"""Uniform random triangulations of a polygon (table-driven recursion).

Peeling the triangle on the root edge needs three interlocking families,
because simplicity forbids re-creating a removed edge:

    A(n,p)  simple triangulations of the p-gon, n inner vertices;
    C(n,p)  those with no chord joining one designated boundary pair
            (what the apex-inside case leaves behind);
    E(n,p)  those with no chord at all at one designated boundary vertex.

They close under peeling:

    A(n,p) = C(n-1,p+1) + sum_{k=2}^{p-1} sum_{n1+n2=n} A(n1,k) A(n2,p+1-k)
    C(n,p) = E(n,p)     + sum_{j=3}^{p-2} sum_{n1+n2=n} A(n1,j) E(n2,p-j+2)
    E(n,p) = E(n-1,p+1) + A(n,p-1)

with A(n,2) = [n == 0] (a degenerate piece whose closing chord is
identified with an existing edge).  The recurrence is validated against
the closed formula before any sampling is trusted.

Two table tiers: exact integers below `EXACT_LIMIT` inner vertices (the
samples are then exactly uniform), float64 above (per-decision rounding
is ~1e-15, far below any statistic measured at desk scale).
"""

from __future__ import annotations

import math

import numpy as np

from cubiclab.counts import count_simple_polygon
from cubiclab.maps import CombinatorialMap, PolygonTriangulation, polygon_map
from cubiclab.rng import Rng

__all__ = [
    "PolygonSampler",
    "sample_uniform_polygon",
    "sample_uniform_sphere",
    "shared_sampler",
]

EXACT_LIMIT = 300
_LOG_RHO = math.log(27.0) - math.log(256.0)


class _ExactTables:
    """Arbitrary-precision A/C/E tables, memoised."""

    def __init__(self):
        self.A: dict[tuple[int, int], int] = {}
        self.C: dict[tuple[int, int], int] = {}
        self.E: dict[tuple[int, int], int] = {}

    def a(self, n: int, p: int) -> int:
        if n < 0 or p < 2:
            return 0
        if p == 2:
            return 1 if n == 0 else 0
        key = (n, p)
        v = self.A.get(key)
        if v is None:
            v = count_simple_polygon(n, p)
            self.A[key] = v
        return v

    def e(self, n: int, p: int) -> int:
        if n < 0 or p < 3:
            return 0
        if (n, p) not in self.E:
            chain = []
            nn, pp = n, p
            while nn >= 0 and (nn, pp) not in self.E:
                chain.append((nn, pp))
                nn, pp = nn - 1, pp + 1
            for cn, cp in reversed(chain):
                prev = self.E.get((cn - 1, cp + 1), 0) if cn >= 1 else 0
                self.E[(cn, cp)] = prev + self.a(cn, cp - 1)
        return self.E[(n, p)]

    def c(self, n: int, p: int) -> int:
        if n < 0 or p < 3:
            return 0
        key = (n, p)
        v = self.C.get(key)
        if v is None:
            v = self.e(n, p)
            for j in range(3, p - 1):
                for n1 in range(n + 1):
                    a = self.a(n1, j)
                    if a:
                        ee = self.e(n - n1, p - j + 2)
                        if ee:
                            v += a * ee
            self.C[key] = v
        return v


class _FloatTables:
    """float64 tables of A(n,p) (27/256)^n (9/64)^p and the matching E, C.

    The column weight (9/64)^p is the inverse boundary growth rate, so
    every entry stays polynomial-sized (no overflow for any p).  All case
    weights pick up fixed powers of 3/4 = (27/256)(64/9), handled in the
    draw routines.
    """

    SCALE_A = 3.0 / 4.0       # apex case: rho * (64/9)
    SCALE_SPLIT = 64.0 / 9.0  # A*A split cell
    SCALE_CHORD = (64.0 / 9.0) ** 2  # A*E chord cell
    SCALE_CLOSE = 9.0 / 64.0  # E closing: A(n, p-1)

    def __init__(self, n_max: int, p_max: int):
        self.n_max = n_max
        self.p_max = p_max
        extra = 240
        na, pa = n_max + 1, p_max + extra
        A = np.zeros((na, pa + 1))
        log_col = math.log(9.0 / 64.0)
        A[0, 2] = math.exp(2 * log_col)
        ns = np.arange(na, dtype=float)
        for p in range(3, pa + 1):
            base = (
                math.log(2)
                + math.lgamma(2 * p - 2)
                - math.lgamma(p)
                - math.lgamma(p - 2)
                + p * log_col
            )
            logs = (
                base
                + _lgamma_vec(4 * ns + 2 * p - 4)
                - _lgamma_vec(ns + 1)
                - _lgamma_vec(3 * ns + 2 * p - 2)
                + ns * _LOG_RHO
            )
            A[:, p] = np.exp(logs)
        self.A = A
        # E(n,p) = (9/64) sum_m (3/4)^m A(n-m, p-1+m): the tail beyond the
        # table's extra columns is below 1e-19 relative ((3/4)^m decay)
        E = np.zeros((na, p_max + 3))
        for p in range(3, p_max + 3):
            col = np.zeros(na)
            w = 9.0 / 64.0
            for m in range(0, min(na, extra - 2)):
                if p - 1 + m > pa:
                    break
                col[m:] += w * A[: na - m, p - 1 + m]
                w *= 0.75
                if w < 1e-22:
                    break
            E[:, p] = col
        self.E = E
        self.C: dict[tuple[int, int], float] = {}

    def a(self, n, p):
        if p == 2:
            return self.A[0, 2] if n == 0 else 0.0
        if n < 0 or p < 2:
            return 0.0
        if n > self.n_max or p >= self.A.shape[1]:
            raise ValueError(f"float table bounds exceeded: n={n} p={p}")
        return float(self.A[n, p])

    def e(self, n, p):
        if n < 0 or p < 3:
            return 0.0
        if p >= self.E.shape[1]:
            raise ValueError(f"float E-table bounds exceeded: n={n} p={p}")
        return float(self.E[n, p])

    def c(self, n, p):
        if n < 0 or p < 3:
            return 0.0
        key = (n, p)
        v = self.C.get(key)
        if v is None:
            v = self.e(n, p)
            for j in range(3, p - 1):
                col = self.A[: n + 1, j]
                ecol = self.E[: n + 1, p - j + 2][::-1]
                v += self.SCALE_CHORD * float(np.dot(col, ecol))
            self.C[key] = v
        return v


def _lgamma_vec(x):
    from scipy.special import gammaln

    return gammaln(x)


# -- builder -------------------------------------------------------------------


class _Builder:
    """Growable dart structure shared by the fillers."""

    __slots__ = ("sigma", "alpha")

    def __init__(self, sigma, alpha):
        self.sigma = list(sigma)
        self.alpha = list(alpha)

    def new_edge(self):
        d = len(self.sigma)
        self.sigma.extend((0, 0))
        self.alpha.extend((d + 1, d))
        return d, d + 1

    def insert_after(self, at, new):
        self.sigma[new] = self.sigma[at]
        self.sigma[at] = new

    def insert_before(self, at, new):
        x = at
        while self.sigma[x] != at:
            x = self.sigma[x]
        self.sigma[x] = new
        self.sigma[new] = at


class PolygonSampler:
    """Uniform sampler for simple triangulations of the p-gon."""

    def __init__(self, exact_limit: int = EXACT_LIMIT, float_n_max: int = 4200,
                 float_p_max: int = 300):
        self.exact_limit = exact_limit
        self.exact = _ExactTables()
        self._float: _FloatTables | None = None
        self._float_dims = (float_n_max, float_p_max)
        self.validated_range: tuple[int, int] | None = None

    def floats(self) -> _FloatTables:
        if self._float is None:
            self._float = _FloatTables(*self._float_dims)
        return self._float

    def validate_recurrence(self, n_max: int = 60, p_max: int = 20) -> None:
        """Assert the peeling recurrence reproduces the closed formula."""
        if self.validated_range and self.validated_range >= (n_max, p_max):
            return
        t = self.exact
        for p in range(3, p_max + 1):
            for n in range(n_max + 1):
                rec = t.c(n - 1, p + 1) if n >= 1 else 0
                for k in range(2, p):
                    for n1 in range(n + 1):
                        a1 = t.a(n1, k)
                        if a1:
                            a2 = t.a(n - n1, p + 1 - k)
                            if a2:
                                rec += a1 * a2
                if rec != t.a(n, p):
                    raise AssertionError(f"A-recurrence mismatch at (n={n}, p={p})")
        self.validated_range = (n_max, p_max)

    # -- case draws --------------------------------------------------------------

    def _draw_A(self, n, p, rng, exact):
        t = self.exact if exact else self.floats()
        s_apex = 1 if exact else _FloatTables.SCALE_A
        s_split = 1 if exact else _FloatTables.SCALE_SPLIT
        if exact:
            r = rng.rand_below(t.a(n, p))
        else:
            r = rng.random() * t.a(n, p)
        if n >= 1:
            cc = s_apex * t.c(n - 1, p + 1)
            if r < cc:
                return ("apex",)
            r -= cc
        for n1 in _size_order(n):
            n2 = n - n1
            for k in range(2, p):
                a1 = t.a(n1, k)
                if a1:
                    w = s_split * a1 * t.a(n2, p + 1 - k)
                    if w:
                        if r < w:
                            return ("split", k, n1)
                        r -= w
        if exact:
            raise AssertionError("A-case draw fell through")
        return ("apex",) if n >= 1 else ("split", 2, 0)

    def _draw_C(self, n, p, rng, exact):
        t = self.exact if exact else self.floats()
        if exact:
            r = rng.rand_below(t.c(n, p))
        else:
            r = rng.random() * t.c(n, p)
        s_chord = 1 if exact else _FloatTables.SCALE_CHORD
        w = t.e(n, p)
        if r < w:
            return ("E",)
        r -= w
        for n1 in _size_order(n):
            n2 = n - n1
            for j in range(3, p - 1):
                a = t.a(n1, j)
                if a:
                    w = s_chord * a * t.e(n2, p - j + 2)
                    if w:
                        if r < w:
                            return ("chord", j, n1)
                        r -= w
        if exact:
            raise AssertionError("C-case draw fell through")
        return ("E",)

    def _draw_E(self, n, p, rng, exact):
        t = self.exact if exact else self.floats()
        s_apex = 1 if exact else _FloatTables.SCALE_A
        if exact:
            r = rng.rand_below(t.e(n, p))
        else:
            r = rng.random() * t.e(n, p)
        if n >= 1 and r < s_apex * t.e(n - 1, p + 1):
            return ("apex",)
        return ("closing",)

    # -- surgery -----------------------------------------------------------------
    #
    # Hole convention: h = [h_0 .. h_{m-1}] is the phi-orbit of the face to
    # fill; writing the polygon ccw as c_0, c_1, ..., c_{p-1}, the walk runs
    # h_0 = (c_1 -> c_0) and h_i = (c_{p+1-i} -> c_{p-i}).  The peeled
    # triangle sits on h_0; C forbids a chord (c_1, c_{p-1}) = (tail h_0,
    # tail h_2), E forbids all chords at c_1 = tail h_0.

    @staticmethod
    def _apex_surgery(bld, h):
        """Fresh apex z over h_0: triangle (h_0, c_0->z, z->c_1)."""
        e = h[0]
        s2, s2b = bld.new_edge()  # c_0 -> z
        s3, s3b = bld.new_edge()  # z -> c_1
        bld.insert_after(bld.alpha[e], s2)
        bld.sigma[s2b] = s3
        bld.sigma[s3] = s2b
        bld.insert_before(e, s3b)
        return [s3b, s2b] + h[1:]

    @staticmethod
    def _closing_surgery(bld, h):
        """Triangle (h_0, new chord c_0-c_2, existing h_{m-1})."""
        e = h[0]
        s2, s2b = bld.new_edge()  # c_0 -> c_2
        bld.insert_after(bld.alpha[e], s2)
        bld.insert_before(h[-1], s2b)
        return h[1:-1] + [s2b]

    @staticmethod
    def _reuse_w_surgery(bld, h):
        """Triangle (h_0, existing h_1, new chord c_{p-1}->c_1)."""
        e = h[0]
        s3, s3b = bld.new_edge()  # c_{p-1} -> c_1
        bld.insert_after(bld.alpha[h[1]], s3)
        bld.insert_before(e, s3b)
        return [s3b] + h[2:]

    @staticmethod
    def _generic_split_surgery(bld, h, k):
        """Triangle with apex c_k (3 <= k <= m-2): two new chords."""
        m = len(h)
        e = h[0]
        s2, s2b = bld.new_edge()  # c_0 -> c_k
        s3, s3b = bld.new_edge()  # c_k -> c_1
        apex_dart = h[m - k + 1]
        bld.insert_after(bld.alpha[e], s2)
        bld.insert_before(e, s3b)
        bld.insert_before(apex_dart, s3)
        bld.insert_before(s3, s2b)
        piece_r = [s3b] + h[m - k + 1 :]
        piece_l = h[1 : m - k + 1] + [s2b]
        return piece_r, piece_l

    @staticmethod
    def _chord_surgery(bld, h, j):
        """C-split at the outermost chord (c_1, c_j), 3 <= j <= p-2."""
        m = len(h)
        e = h[0]
        cf, cb = bld.new_edge()  # cf = c_1 -> c_j, cb = c_j -> c_1
        bld.insert_before(h[m - j + 1], cb)
        bld.insert_before(e, cf)
        piece_a = [cf] + h[m - j + 1 :]
        piece_e = h[: m - j + 1] + [cb]
        return piece_a, piece_e

    # -- the filler ----------------------------------------------------------------

    def fill(self, bld: _Builder, hole: list[int], n: int, rng: Rng, exact: bool) -> None:
        stack = [("A", hole, n)]
        while stack:
            cls, h, n = stack.pop()
            m = len(h)
            if m == 3 and n == 0:
                continue  # the hole is a finished triangle face
            if cls == "A":
                case = self._draw_A(n, m, rng, exact)
                if case[0] == "apex":
                    stack.append(("C", self._apex_surgery(bld, h), n - 1))
                else:
                    _, k, n1 = case
                    n2 = n - n1
                    if k == 2:
                        assert n1 == 0
                        stack.append(("A", self._closing_surgery(bld, h), n2))
                    elif k == m - 1:
                        assert n2 == 0
                        stack.append(("A", self._reuse_w_surgery(bld, h), n1))
                    else:
                        pr, pl = self._generic_split_surgery(bld, h, k)
                        stack.append(("A", pr, n1))
                        stack.append(("A", pl, n2))
            elif cls == "C":
                case = self._draw_C(n, m, rng, exact)
                if case[0] == "E":
                    stack.append(("E", h, n))
                else:
                    _, j, n1 = case
                    pa, pe = self._chord_surgery(bld, h, j)
                    stack.append(("A", pa, n1))
                    stack.append(("E", pe, n - n1))
            else:
                case = self._draw_E(n, m, rng, exact)
                if case[0] == "apex":
                    stack.append(("E", self._apex_surgery(bld, h), n - 1))
                else:
                    if m == 3:
                        assert n == 0
                        continue  # bare triangle: all three sides exist
                    stack.append(("A", self._closing_surgery(bld, h), n))

    # -- public API ------------------------------------------------------------------

    def sample(self, n: int, p: int, rng: Rng, exact: bool | None = None) -> PolygonTriangulation:
        """Uniform simple triangulation of the p-gon with n inner vertices."""
        if p < 3:
            raise ValueError("need p >= 3")
        if count_simple_polygon(n, p) == 0:
            raise ValueError(f"empty class (n={n}, p={p})")
        if exact is None:
            exact = n <= self.exact_limit
        if exact:
            self.validate_recurrence(min(max(n, 8), 40), min(max(p, 8), 14))
        base = polygon_map(p)
        bld = _Builder(base.sigma, base.alpha)
        hole = [base.alpha[0]]
        while True:
            nxt = base.sigma[base.alpha[hole[-1]]]
            if nxt == hole[0]:
                break
            hole.append(nxt)
        self.fill(bld, hole, n, rng, exact)
        m = CombinatorialMap(bld.sigma, bld.alpha, 0)
        return PolygonTriangulation(map=m, p=p, inner_vertices=n)


def _size_order(n):
    """0, n, 1, n-1, ...: piece sizes concentrate at the extremes."""
    lo, hi = 0, n
    while lo <= hi:
        yield lo
        if hi != lo:
            yield hi
        lo += 1
        hi -= 1


_shared: PolygonSampler | None = None


def shared_sampler() -> PolygonSampler:
    global _shared
    if _shared is None:
        _shared = PolygonSampler()
    return _shared


def sample_uniform_polygon(n: int, p: int, rng: Rng, exact: bool | None = None) -> PolygonTriangulation:
    return shared_sampler().sample(n, p, rng, exact=exact)


def sample_uniform_sphere(n_plus2_vertices: int, rng: Rng, exact: bool | None = None) -> CombinatorialMap:
    """Uniform rooted simple sphere triangulation with the given vertex count."""
    n = n_plus2_vertices - 2
    if n < 2:
        raise ValueError("need at least 4 vertices")
    return shared_sampler().sample(n - 1, 3, rng, exact=exact).map
