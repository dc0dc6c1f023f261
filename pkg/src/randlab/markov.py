"""Markov-computable functions at desk scale.

Functions are presented by replayable finite data: polygonal breakpoint
tables, staged interval covers with piecewise-linear tents, truncations of a
base function across a cover, or named symbolic built-ins.  Evaluation at any
rational in [0,1] is exact.

Exact range computation over a subinterval works off a finite list of
"critical points" (points where monotonicity may change); between consecutive
critical points every function here is monotone, so min/max are attained at
the sampled candidates.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .cauchy import CauchyName, ModulusFunction
from .errors import BudgetExceeded, CoverViolation, ExtensionUndefined
from .intervals import RationalInterval

ZERO = Fraction(0)
ONE = Fraction(1)

OSCILLATION_DEPTH_BUDGET = 16
EXTENSION_PRECISION_BUDGET = 20
EXTENSION_REFINEMENTS = 8
SLOPE_GRID_PAIR_BUDGET = 2**12


class MarkovKind(enum.Enum):
    POLYGONAL = "POLYGONAL"
    COVER_BASED = "COVER_BASED"
    TRUNCATED = "TRUNCATED"
    SYMBOLIC = "SYMBOLIC"


@dataclass(frozen=True)
class PolygonalFunction:
    """Piecewise-linear data: breakpoints with strictly increasing x, 0 to 1."""

    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        xs = [x for x, _ in self.breakpoints]
        if len(xs) < 2 or xs[0] != 0 or xs[-1] != 1:
            raise ValueError("breakpoints must span [0,1]")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x-coordinates must strictly increase")

    def value(self, x: Fraction) -> Fraction:
        xs = [bx for bx, _ in self.breakpoints]
        i = bisect.bisect_right(xs, x) - 1
        if i == len(xs) - 1:
            return self.breakpoints[-1][1]
        (x0, y0), (x1, y1) = self.breakpoints[i], self.breakpoints[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


@dataclass(frozen=True)
class StagedCover:
    """A c.e. set of closed rational intervals as a replayable staged script.

    size_bound[k] is the stage after which every newly enumerated interval
    must have length < 2^{-k} (the H(C) protocol).
    """

    stages: tuple[tuple[RationalInterval, ...], ...]
    size_bound: tuple[int, ...]

    def all_intervals(self) -> list[RationalInterval]:
        return [iv for stage in self.stages for iv in stage]


@dataclass(frozen=True)
class HReport:
    ok: bool
    violation: Optional[str] = None


def check_H(c: StagedCover) -> HReport:
    """Verify non-overlap plus the staged size-bound protocol."""
    ivs = sorted(c.all_intervals(), key=lambda iv: (iv.lo, iv.hi))
    for a, b in zip(ivs, ivs[1:]):
        if b.lo < a.hi:
            return HReport(False, f"overlap between {a} and {b}")
    for k in range(len(c.stages)):
        bound_stage = c.size_bound[k] if k < len(c.size_bound) else c.size_bound[-1]
        for s in range(bound_stage + 1, len(c.stages)):
            for iv in c.stages[s]:
                if iv.length >= Fraction(1, 2**k):
                    return HReport(
                        False,
                        f"size violation at k={k}: stage {s} interval {iv} "
                        f"has length {iv.length} >= 2^-{k}",
                    )
    return HReport(True)


@dataclass(frozen=True)
class MarkovFunction:
    """A Markov computable function presented by finite replayable data.

    `critical_points` lists every x in (0,1) where monotonicity may change;
    exact range queries rely on it.  `modulus` is a declared modulus of
    uniform continuity when one exists.
    """

    kind: MarkovKind
    name: str
    eval_at: Callable[[Fraction], Fraction]
    critical_points: tuple[Fraction, ...] = ()
    modulus: Optional[ModulusFunction] = None
    payload: object = None

    def __call__(self, x: Fraction) -> Fraction:
        return self.eval_at(x)

    def range_on(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        """Exact (min, max) of the function over [lo, hi] ⊆ [0, 1]."""
        if lo > hi:
            raise ValueError("empty range query")
        candidates = [lo, hi] + [p for p in self.critical_points if lo < p < hi]
        vals = [self.eval_at(x) for x in candidates]
        return min(vals), max(vals)


def identity_fn() -> MarkovFunction:
    return MarkovFunction(
        MarkovKind.SYMBOLIC,
        "identity",
        lambda x: x,
        modulus=ModulusFunction(lambda eps: eps),
    )


def square_fn() -> MarkovFunction:
    # |x^2 - y^2| <= 2|x - y| on [0,1]
    return MarkovFunction(
        MarkovKind.SYMBOLIC,
        "square",
        lambda x: x * x,
        modulus=ModulusFunction(lambda eps: eps / 2),
    )


def const_fn(q: Fraction) -> MarkovFunction:
    return MarkovFunction(
        MarkovKind.SYMBOLIC,
        f"const({q})",
        lambda x: q,
        modulus=ModulusFunction(lambda eps: ONE),
    )


def abs_offset_fn() -> MarkovFunction:
    """|x - 1/2|: the canonical corner example."""
    h = Fraction(1, 2)
    return MarkovFunction(
        MarkovKind.SYMBOLIC,
        "abs_offset",
        lambda x: abs(x - h),
        critical_points=(h,),
        modulus=ModulusFunction(lambda eps: eps),
    )


def half_fn() -> MarkovFunction:
    return MarkovFunction(
        MarkovKind.SYMBOLIC,
        "half",
        lambda x: x / 2,
        modulus=ModulusFunction(lambda eps: 2 * eps),
    )


def complement_fn() -> MarkovFunction:
    return MarkovFunction(
        MarkovKind.SYMBOLIC,
        "complement",
        lambda x: 1 - x,
        modulus=ModulusFunction(lambda eps: eps),
    )


def polygonal_fn(breakpoints: Sequence[tuple[Fraction, Fraction]]) -> MarkovFunction:
    poly = PolygonalFunction(tuple(breakpoints))
    return MarkovFunction(
        MarkovKind.POLYGONAL,
        "polygonal",
        poly.value,
        critical_points=tuple(x for x, _ in poly.breakpoints[1:-1]),
        payload=poly,
    )


def _tent_value(iv: RationalInterval, peak: Fraction, x: Fraction) -> Fraction:
    mid = (iv.lo + iv.hi) / 2
    if x <= mid:
        if mid == iv.lo:
            return peak
        return peak * (x - iv.lo) / (mid - iv.lo)
    return peak * (iv.hi - x) / (iv.hi - mid)


def canonical_nonuc(stage_count: int) -> MarkovFunction:
    """The built-in non-uniformly-continuous example.

    Tents of height n sit on non-overlapping closed intervals
    I_n = [1 - 2^{-n}, 1 - 3·2^{-n-2}], converging toward the uncovered
    point 1; the function is 0 at every endpoint of every I_n (and 0 on the
    gaps, where the true construction would enumerate further intervals).
    """
    if stage_count < 1:
        raise ValueError("stage_count must be >= 1")
    tents: list[tuple[RationalInterval, Fraction]] = []
    for n in range(stage_count):
        lo = 1 - Fraction(1, 2**n)
        hi = 1 - Fraction(3, 2 ** (n + 2))
        tents.append((RationalInterval(lo, hi), Fraction(n)))
    los = [iv.lo for iv, _ in tents]
    crit: list[Fraction] = []
    for iv, _ in tents:
        crit.extend((iv.lo, (iv.lo + iv.hi) / 2, iv.hi))

    def ev(x: Fraction) -> Fraction:
        i = bisect.bisect_right(los, x) - 1
        if i >= 0 and tents[i][0].contains(x):
            return _tent_value(tents[i][0], tents[i][1], x)
        return ZERO

    return MarkovFunction(
        MarkovKind.COVER_BASED,
        f"canonical_nonuc({stage_count})",
        ev,
        critical_points=tuple(p for p in crit if 0 < p < 1),
        payload=tuple(tents),
    )


def cover_intervals(f: MarkovFunction) -> tuple[tuple[RationalInterval, Fraction], ...]:
    """The (interval, peak) pairs of a COVER_BASED function."""
    if f.kind is not MarkovKind.COVER_BASED:
        raise ValueError("not a cover-based function")
    return f.payload  # type: ignore[return-value]


def truncate(f: MarkovFunction, c: StagedCover) -> MarkovFunction:
    """[f, C]: equal to f outside (and at the endpoints of) every interval of
    the cover, linear across each interval's interior."""
    rep = check_H(c)
    if not rep.ok:
        raise CoverViolation(rep.violation or "H(C) fails")
    ivs = sorted(c.all_intervals(), key=lambda iv: iv.lo)
    los = [iv.lo for iv in ivs]
    endpoint_vals = [(f(iv.lo), f(iv.hi)) for iv in ivs]

    def ev(x: Fraction) -> Fraction:
        i = bisect.bisect_right(los, x) - 1
        if i >= 0:
            iv = ivs[i]
            if iv.lo < x < iv.hi:
                ylo, yhi = endpoint_vals[i]
                return ylo + (yhi - ylo) * (x - iv.lo) / (iv.hi - iv.lo)
        return f(x)

    crit = set(f.critical_points)
    for iv in ivs:
        crit.add(iv.lo)
        crit.add(iv.hi)
    return MarkovFunction(
        MarkovKind.TRUNCATED,
        f"[{f.name},C]",
        ev,
        critical_points=tuple(sorted(p for p in crit if 0 < p < 1)),
        payload=(f, tuple(ivs)),
    )


def oscillation_tree(f: MarkovFunction, n: int, depth: int) -> set[str]:
    """All strings sigma (|sigma| <= depth) whose dyadic interval [sigma)
    contains two dyadic rationals of denominator <= 2^{depth+4} with function
    values more than 2^{-n} apart.

    A witness pair exists iff max - min over the grid exceeds the threshold,
    so the search computes grid extrema bottom-up; downward closure under
    prefixes is then structural (a parent's grid contains each child's).
    """
    if depth > OSCILLATION_DEPTH_BUDGET:
        raise BudgetExceeded(f"depth {depth} > {OSCILLATION_DEPTH_BUDGET}")
    grid_bits = depth + 4
    size = 2**grid_bits
    denom = Fraction(1, size)
    vals = [f(k * denom) for k in range(size)]  # [sigma) excludes the right end
    threshold = Fraction(1, 2**n) if n >= 0 else Fraction(2 ** (-n))

    # extrema[k][v] = (min, max) over the grid slice of the v-th node at level k
    level = [(v, v) for v in vals]
    extrema: list[list[tuple[Fraction, Fraction]]] = [level]
    while len(level) > 1:
        level = [
            (min(level[2 * i][0], level[2 * i + 1][0]),
             max(level[2 * i][1], level[2 * i + 1][1]))
            for i in range(len(level) // 2)
        ]
        extrema.append(level)
    extrema.reverse()  # extrema[k] now indexed by level k = |sigma|

    tree: set[str] = set()
    for k in range(depth + 1):
        for v in range(2**k):
            mn, mx = extrema[k][v]
            if mx - mn > threshold:
                tree.add(format(v, f"0{k}b") if k else "")
    return tree


@dataclass(frozen=True)
class SlopeBoundsVerdict:
    passed: bool
    lower_clause_ok: bool
    upper_clause_ok: bool
    counterexample: Optional[str] = None


def slope_bounds_check(
    f: MarkovFunction,
    c: StagedCover,
    w: Fraction,
    z: Fraction,
    grid: int,
) -> SlopeBoundsVerdict:
    """Two-sided slope bounds for a truncation.

    Lower clause: w(b-a) < f(b) - f(a) exactly on every cover interval.
    Upper clause: [f,C](y) - [f,C](x) < z(y-x) on all ordered dyadic grid
    pairs, where the grid has `grid` subdivisions of [0,1].
    """
    if w >= z:
        raise ValueError("requires w < z")
    if grid * (grid + 1) // 2 > SLOPE_GRID_PAIR_BUDGET:
        raise BudgetExceeded("too many grid pairs")
    for iv in c.all_intervals():
        if not w * (iv.hi - iv.lo) < f(iv.hi) - f(iv.lo):
            return SlopeBoundsVerdict(
                False, False, True,
                f"lower clause fails on {iv}: w·(b-a) = {w * iv.length}, "
                f"f(b)-f(a) = {f(iv.hi) - f(iv.lo)}",
            )
    t = truncate(f, c) if c.stages else f
    pts = [Fraction(k, grid) for k in range(grid + 1)]
    tv = [t(p) for p in pts]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if not tv[j] - tv[i] < z * (pts[j] - pts[i]):
                return SlopeBoundsVerdict(
                    False, True, False,
                    f"upper clause fails at x={pts[i]}, y={pts[j]}: "
                    f"slope {(tv[j] - tv[i]) / (pts[j] - pts[i])} >= {z}",
                )
    return SlopeBoundsVerdict(True, True, True)


@dataclass(frozen=True)
class ExtensionResult:
    interval: RationalInterval
    certified: bool


def _modulus_precision(theta: ModulusFunction, eps: Fraction) -> int:
    """Least m with 2^{-m+1} <= theta(eps)."""
    delta = theta(eps)
    m = 0
    while Fraction(2, 2**m) > delta:
        m += 1
        if m > 4096:
            raise BudgetExceeded("modulus too small to realize")
    return m


def eval_extension(f: MarkovFunction, z: CauchyName, n: int) -> ExtensionResult:
    """Finite-precision evaluation of the maximal continuous extension.

    With a declared modulus the hull over the matching window is certified to
    contain the extension value and has length <= 2^{-n+2}.  Without one, the
    window is refined up to the budget; a hull that never shrinks is
    finite-scale evidence the extension is undefined here.
    """
    if n > EXTENSION_PRECISION_BUDGET:
        raise BudgetExceeded(f"precision {n} > {EXTENSION_PRECISION_BUDGET}")
    eps = Fraction(1, 2**n)

    def hull(m: int) -> tuple[Fraction, Fraction]:
        w = z.window(m)
        lo = max(ZERO, min(ONE, w.lo))
        hi = max(ZERO, min(ONE, w.hi))
        return f.range_on(lo, hi)

    if f.modulus is not None:
        m = _modulus_precision(f.modulus, eps)
        ylo, yhi = hull(m)
        return ExtensionResult(RationalInterval(ylo, yhi), certified=True)

    for m in range(n, n + EXTENSION_REFINEMENTS + 1):
        ylo, yhi = hull(m)
        if yhi - ylo <= 4 * eps:
            return ExtensionResult(RationalInterval(ylo, yhi), certified=False)
    raise ExtensionUndefined(
        f"hull of {f.name} near {z.provenance} did not shrink below 2^{{-{n}+2}} "
        f"within {EXTENSION_REFINEMENTS} refinements"
    )


BUILTIN_FUNCTIONS: dict[str, Callable[[], MarkovFunction]] = {
    "identity": identity_fn,
    "square": square_fn,
    "abs_offset": abs_offset_fn,
    "half": half_fn,
    "complement": complement_fn,
}


def function_by_name(name: str) -> MarkovFunction:
    """Resolve a CLI/config function name ("square", "canonical_nonuc:20", ...)."""
    if name in BUILTIN_FUNCTIONS:
        return BUILTIN_FUNCTIONS[name]()
    if name.startswith("canonical_nonuc:"):
        return canonical_nonuc(int(name.split(":", 1)[1]))
    if name.startswith("const:"):
        from .intervals import parse_rational

        return const_fn(parse_rational(name.split(":", 1)[1]))
    raise ValueError(f"unknown function {name!r}")
