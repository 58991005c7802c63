"""Exact algebra of closed proper polyhedral convex functions on the line.

A function is represented by finitely many affine minorants (``pieces``)
together with a closed interval domain: finite values are the pointwise max
of the pieces on the domain, +inf outside.  Every operation below
(conjugation, recession, support functions, subdifferentials, normal cones,
epsilon-regularization) is closed form, so results are exact up to double
rounding; no iterative solves are involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import SchemaError

INF = float("inf")

# Tolerance for slope/intercept dedup during canonicalization and for
# matching breakpoints in subdifferential queries.
TOL = 1e-12


def ext_sum(terms) -> float:
    """Sum of extended reals; raises on inf - inf instead of returning nan."""
    pos = neg = False
    total = 0.0
    for t in terms:
        if t == INF:
            pos = True
        elif t == -INF:
            neg = True
        else:
            total += t
    if pos and neg:
        raise ValueError("indeterminate sum: +inf and -inf")
    if pos:
        return INF
    if neg:
        return -INF
    return total


@dataclass(frozen=True)
class Interval:
    """Closed interval with extended endpoints; ``lo > hi`` encodes empty.

    Construction normalizes every empty value to the canonical ``EMPTY``
    representative so equality tests behave.
    """

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise SchemaError("interval endpoint is nan")
        if self.lo > self.hi:
            object.__setattr__(self, "lo", INF)
            object.__setattr__(self, "hi", -INF)
        else:
            object.__setattr__(self, "lo", float(self.lo))
            object.__setattr__(self, "hi", float(self.hi))

    @staticmethod
    def empty() -> "Interval":
        return Interval(INF, -INF)

    @staticmethod
    def point(x: float) -> "Interval":
        return Interval(x, x)

    @staticmethod
    def real_line() -> "Interval":
        return Interval(-INF, INF)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return not self.is_empty and math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return (not self.is_empty) and self.lo - tol <= x <= self.hi + tol

    def subset_of(self, other: "Interval", tol: float = 0.0) -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def intersect(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return Interval.empty()
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def minkowski_add(self, other: "Interval") -> "Interval":
        if self.is_empty or other.is_empty:
            return Interval.empty()
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def scale(self, m: float) -> "Interval":
        """Image under x -> m*x."""
        if self.is_empty:
            return Interval.empty()
        if m == 0.0:
            return Interval.point(0.0)
        a = m * self.lo
        b = m * self.hi
        return Interval(min(a, b), max(a, b))

    def shift(self, c: float) -> "Interval":
        if self.is_empty:
            return Interval.empty()
        return Interval(self.lo + c, self.hi + c)

    def clamp(self, x: float) -> float:
        """Nearest point of the interval to ``x`` (interval must be nonempty)."""
        if self.is_empty:
            raise ValueError("clamp on empty interval")
        return min(max(x, self.lo), self.hi)

    def pick(self) -> float:
        """Deterministic finite representative: midpoint, or 0 clamped in."""
        if self.is_empty:
            raise ValueError("pick on empty interval")
        if self.is_bounded:
            return 0.5 * (self.lo + self.hi)
        return self.clamp(0.0)

    def __str__(self) -> str:
        return "(empty)" if self.is_empty else f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class PolyConvexFn:
    """Max of affine pieces on a closed interval domain, +inf outside.

    ``pieces`` holds (slope, intercept) pairs.  The representation is not
    required to be canonical; :func:`canonicalize` produces the unique
    canonical form (pieces sorted by slope, none dominated on the domain,
    no duplicate slopes, and a single constant piece on point domains).
    """

    pieces: tuple[tuple[float, float], ...]
    dom: Interval

    def __post_init__(self):
        if self.dom.is_empty:
            raise SchemaError("function domain is empty")
        if not self.pieces:
            raise SchemaError("function needs at least one affine piece")
        for a, b in self.pieces:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise SchemaError("piece coefficients must be finite")
        object.__setattr__(self, "pieces", tuple((float(a), float(b)) for a, b in self.pieces))


def eval_fn(f: PolyConvexFn, x: float) -> float:
    """Value of ``f`` at ``x``: exact max-affine value, +inf outside the domain."""
    if not f.dom.contains(x):
        return INF
    return max(a * x + b for a, b in f.pieces)


def _crossing(p: tuple[float, float], q: tuple[float, float]) -> float:
    """x where the lines p and q meet; requires distinct slopes."""
    return (p[1] - q[1]) / (q[0] - p[0])


def _upper_envelope(pieces) -> list[tuple[float, float]]:
    """Lines forming the upper envelope over all of R, sorted by slope."""
    ps = sorted(pieces)
    merged: list[tuple[float, float]] = []
    for a, b in ps:
        if merged and abs(a - merged[-1][0]) <= TOL:
            if b > merged[-1][1]:
                merged[-1] = (a, b)
        else:
            merged.append((a, b))
    stack: list[tuple[float, float]] = []
    for line in merged:
        while len(stack) >= 2 and _crossing(stack[-2], line) <= _crossing(stack[-2], stack[-1]):
            stack.pop()
        # A remaining pair with len(stack) == 1 is kept: two lines always cross.
        stack.append(line)
    return stack


def canonicalize(f: PolyConvexFn) -> PolyConvexFn:
    """Canonical form: same function pointwise, minimal sorted piece list."""
    lo, hi = f.dom.lo, f.dom.hi
    if lo == hi:
        return PolyConvexFn(((0.0, eval_fn(f, lo)),), f.dom)
    env = _upper_envelope(f.pieces)
    if len(env) == 1:
        return PolyConvexFn((env[0],), f.dom)
    crossings = [_crossing(env[k], env[k + 1]) for k in range(len(env) - 1)]
    kept = []
    for k, line in enumerate(env):
        left = crossings[k - 1] if k > 0 else -INF
        right = crossings[k] if k < len(crossings) else INF
        if left < hi and right > lo:
            kept.append(line)
    return PolyConvexFn(tuple(kept), f.dom)


def breakpoints(f: PolyConvexFn) -> list[float]:
    """Crossings between consecutive canonical pieces, restricted to the domain interior."""
    g = canonicalize(f)
    out = []
    for k in range(len(g.pieces) - 1):
        x = _crossing(g.pieces[k], g.pieces[k + 1])
        if g.dom.lo < x < g.dom.hi:
            out.append(x)
    return out


def conjugate(f: PolyConvexFn) -> PolyConvexFn:
    """Exact polyhedral conjugate f*(v) = sup_x {v*x - f(x)}.

    Each interior breakpoint x of f contributes the affine piece
    v -> v*x - f(x); finite domain endpoints contribute the analogous rays;
    infinite domain sides bound the conjugate domain by the extreme slopes.
    """
    g = canonicalize(f)
    lo, hi = g.dom.lo, g.dom.hi
    ps = g.pieces
    out: list[tuple[float, float]] = []
    if math.isfinite(lo):
        out.append((lo, -(ps[0][0] * lo + ps[0][1])))
    for k in range(len(ps) - 1):
        x = _crossing(ps[k], ps[k + 1])
        out.append((x, -(ps[k][0] * x + ps[k][1])))
    if math.isfinite(hi):
        out.append((hi, -(ps[-1][0] * hi + ps[-1][1])))
    dom_lo = ps[0][0] if lo == -INF else -INF
    dom_hi = ps[-1][0] if hi == INF else INF
    if not out:
        # single piece on the whole line: conjugate is an indicator point
        return PolyConvexFn(((0.0, -ps[0][1]),), Interval(ps[0][0], ps[0][0]))
    return canonicalize(PolyConvexFn(tuple(out), Interval(dom_lo, dom_hi)))


def recession(f: PolyConvexFn) -> PolyConvexFn:
    """Recession function: asymptotic slopes of ``f`` along its unbounded directions.

    Computed structurally from the domain shape and extreme slopes, not via
    the conjugate, so it can cross-check the support-function identity.
    """
    g = canonicalize(f)
    lo_inf = g.dom.lo == -INF
    hi_inf = g.dom.hi == INF
    a_min = g.pieces[0][0]
    a_max = g.pieces[-1][0]
    if not lo_inf and not hi_inf:
        return PolyConvexFn(((0.0, 0.0),), Interval.point(0.0))
    if lo_inf and hi_inf:
        if a_min == a_max:
            return PolyConvexFn(((a_min, 0.0),), Interval.real_line())
        return PolyConvexFn(((a_min, 0.0), (a_max, 0.0)), Interval.real_line())
    if hi_inf:
        return PolyConvexFn(((a_max, 0.0),), Interval(0.0, INF))
    return PolyConvexFn(((a_min, 0.0),), Interval(-INF, 0.0))


def support_function(a: Interval) -> PolyConvexFn:
    """sigma_A(x) = sup_{y in A} x*y for a nonempty interval A."""
    if a.is_empty:
        raise SchemaError("support function of the empty set")
    lo, hi = a.lo, a.hi
    if math.isfinite(lo) and math.isfinite(hi):
        if lo == hi:
            return PolyConvexFn(((lo, 0.0),), Interval.real_line())
        return PolyConvexFn(((lo, 0.0), (hi, 0.0)), Interval.real_line())
    if math.isfinite(lo):
        return PolyConvexFn(((lo, 0.0),), Interval(-INF, 0.0))
    if math.isfinite(hi):
        return PolyConvexFn(((hi, 0.0),), Interval(0.0, INF))
    return PolyConvexFn(((0.0, 0.0),), Interval.point(0.0))


def subdifferential(f: PolyConvexFn, x: float) -> Interval:
    """Subgradient interval of ``f`` at ``x`` (empty outside the domain)."""
    g = canonicalize(f)
    if not g.dom.contains(x):
        return Interval.empty()
    if g.dom.is_point:
        return Interval.real_line()
    cr = [_crossing(g.pieces[k], g.pieces[k + 1]) for k in range(len(g.pieces) - 1)]
    n_left = sum(1 for c in cr if c < x - TOL)
    n_right = sum(1 for c in cr if c < x + TOL)
    d_minus = g.pieces[n_left][0]
    d_plus = g.pieces[n_right][0]
    if math.isfinite(g.dom.lo) and abs(x - g.dom.lo) <= TOL:
        d_minus = -INF
    if math.isfinite(g.dom.hi) and abs(x - g.dom.hi) <= TOL:
        d_plus = INF
    return Interval(d_minus, d_plus)


def normal_cone(a: Interval, x: float) -> Interval:
    """Normal cone of the interval ``a`` at ``x``; empty when x is outside a."""
    if not a.contains(x):
        return Interval.empty()
    at_lo = math.isfinite(a.lo) and abs(x - a.lo) <= TOL
    at_hi = math.isfinite(a.hi) and abs(x - a.hi) <= TOL
    if at_lo and at_hi:
        return Interval.real_line()
    if at_lo:
        return Interval(-INF, 0.0)
    if at_hi:
        return Interval(0.0, INF)
    return Interval.point(0.0)


def infimum(f: PolyConvexFn) -> float:
    """inf of ``f`` over its domain (may be -inf; attained unless -inf)."""
    g = canonicalize(f)
    lo, hi = g.dom.lo, g.dom.hi
    a_min, b_min = g.pieces[0]
    a_max, b_max = g.pieces[-1]
    if lo == -INF and a_min > 0:
        return -INF
    if hi == INF and a_max < 0:
        return -INF
    cands = []
    if math.isfinite(lo):
        cands.append(eval_fn(g, lo))
    elif a_min == 0:
        cands.append(b_min)
    if math.isfinite(hi):
        cands.append(eval_fn(g, hi))
    elif a_max == 0:
        cands.append(b_max)
    for c in breakpoints(g):
        cands.append(eval_fn(g, c))
    return min(cands)


def epsilon_regularize(f: PolyConvexFn, eps: float) -> PolyConvexFn:
    """Inf-convolution with the indicator of [-eps, eps] (exact, stays polyhedral).

    Each piece (a, b) slides to (a, b - eps*|a|); when the infimum of f is
    finite a flat piece at that level fills the trough; the domain widens by
    eps on each side.  In one dimension the epsilon-ball is exactly the
    interval [-eps, eps], which is what keeps this operation closed form.
    """
    if eps <= 0:
        raise SchemaError("regularization radius must be positive")
    g = canonicalize(f)
    pieces = [(a, b - eps * abs(a)) for a, b in g.pieces]
    m = infimum(g)
    if m > -INF:
        pieces.append((0.0, m))
    dom = Interval(g.dom.lo - eps, g.dom.hi + eps)
    return canonicalize(PolyConvexFn(tuple(pieces), dom))


def add(f: PolyConvexFn, g: PolyConvexFn) -> PolyConvexFn:
    """Pointwise sum; the result's pieces are all pairwise piece sums."""
    dom = f.dom.intersect(g.dom)
    if dom.is_empty:
        raise SchemaError("sum of functions with disjoint domains is improper")
    pieces = tuple((a1 + a2, b1 + b2) for a1, b1 in f.pieces for a2, b2 in g.pieces)
    return canonicalize(PolyConvexFn(pieces, dom))


def scale(f: PolyConvexFn, s: float) -> PolyConvexFn:
    """(s*f) for s > 0; domain unchanged."""
    if s <= 0:
        raise SchemaError("scale factor must be positive")
    return PolyConvexFn(tuple((s * a, s * b) for a, b in f.pieces), f.dom)


def zero_sublevel(f: PolyConvexFn) -> Interval:
    """{x in dom f : f(x) <= 0}, an interval (possibly empty)."""
    g = canonicalize(f)
    lo, hi = g.dom.lo, g.dom.hi
    for a, b in g.pieces:
        if a > 0:
            hi = min(hi, -b / a)
        elif a < 0:
            lo = max(lo, -b / a)
        elif b > 0:
            return Interval.empty()
    if lo > hi:
        return Interval.empty()
    return Interval(lo, hi)


def fn_equal(f: PolyConvexFn, g: PolyConvexFn, tol: float = TOL) -> bool:
    """Canonical piece-list and domain equality within ``tol``."""
    cf, cg = canonicalize(f), canonicalize(g)
    if len(cf.pieces) != len(cg.pieces):
        return False

    def close(u, v):
        if u == v:
            return True
        return math.isfinite(u) and math.isfinite(v) and abs(u - v) <= tol

    if not (close(cf.dom.lo, cg.dom.lo) and close(cf.dom.hi, cg.dom.hi)):
        return False
    return all(
        close(a1, a2) and close(b1, b2)
        for (a1, b1), (a2, b2) in zip(cf.pieces, cg.pieces)
    )


# Common atoms used throughout tests and fixtures.
def abs_fn() -> PolyConvexFn:
    return PolyConvexFn(((-1.0, 0.0), (1.0, 0.0)), Interval.real_line())


def indicator(a: Interval) -> PolyConvexFn:
    if a.is_empty:
        raise SchemaError("indicator of the empty set is improper")
    return PolyConvexFn(((0.0, 0.0),), a)


def affine_fn(a: float, b: float, dom: Interval | None = None) -> PolyConvexFn:
    return PolyConvexFn(((a, b),), dom if dom is not None else Interval.real_line())
