"""Exact rational intervals, finite unions, and Lebesgue measure.

Everything here is computed with `fractions.Fraction`; there is no rounding
anywhere in this module.  Open/closed endpoint flags are carried explicitly:
measure ignores endpoints, membership queries must not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ParseError

Rational = Fraction


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (or a plain integer) into a Fraction; no decimal forms."""
    s = text.strip()
    if not re.fullmatch(r"-?\d+(/\d+)?", s):
        raise ParseError(f"bad rational {text!r}: expected p/q")
    try:
        return Fraction(s)
    except ZeroDivisionError as exc:
        raise ParseError(f"bad rational {text!r}: zero denominator") from exc


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q" in lowest terms (denominator always present)."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=False)
class RationalInterval:
    """An interval with exact rational endpoints and explicit openness flags.

    lo <= hi always; lo == hi (a point) is allowed only when both endpoints
    are closed.
    """

    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"lo > hi: {self.lo} > {self.hi}")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise ValueError("degenerate interval must be closed on both ends")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, q: Fraction) -> bool:
        if q == self.lo:
            return not self.lo_open
        if q == self.hi:
            return not self.hi_open
        return self.lo < q < self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        """Whether every point of `other` lies in `self`."""
        lo_ok = self.lo < other.lo or (
            self.lo == other.lo and (not self.lo_open or other.lo_open)
        )
        hi_ok = other.hi < self.hi or (
            other.hi == self.hi and (not self.hi_open or other.hi_open)
        )
        return lo_ok and hi_ok

    def disjoint_from(self, other: "RationalInterval") -> bool:
        """Whether the two intervals share no point."""
        if self.hi < other.lo or other.hi < self.lo:
            return True
        if self.hi == other.lo:
            return self.hi_open or other.lo_open
        if other.hi == self.lo:
            return other.hi_open or self.lo_open
        return False

    def __str__(self) -> str:
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        return f"{lb}{format_rational(self.lo)},{format_rational(self.hi)}{rb}"


def parse_interval(text: str) -> RationalInterval:
    """Parse "[lo,hi)" style interval strings; brackets encode openness."""
    s = text.strip()
    if len(s) < 2 or s[0] not in "[(" or s[-1] not in ")]":
        raise ParseError(f"bad interval {text!r}")
    body = s[1:-1].split(",")
    if len(body) != 2:
        raise ParseError(f"bad interval {text!r}")
    return RationalInterval(
        lo=parse_rational(body[0]),
        hi=parse_rational(body[1]),
        lo_open=s[0] == "(",
        hi_open=s[-1] == ")",
    )


def format_interval(iv: RationalInterval) -> str:
    return str(iv)


@dataclass(frozen=True)
class IntervalUnion:
    """A canonical finite union: parts sorted, pairwise disjoint, non-touching."""

    parts: tuple[RationalInterval, ...]

    @property
    def measure(self) -> Fraction:
        return sum((p.length for p in self.parts), Fraction(0))

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, q: Fraction) -> bool:
        return any(p.contains(q) for p in self.parts)

    def witness_containing(self, iv: RationalInterval) -> RationalInterval | None:
        """The part (if any) containing every point of `iv`."""
        for p in self.parts:
            if p.contains_interval(iv):
                return p
        return None

    def disjoint_from_interval(self, iv: RationalInterval) -> bool:
        return all(p.disjoint_from(iv) for p in self.parts)

    def __str__(self) -> str:
        return " ∪ ".join(str(p) for p in self.parts) if self.parts else "∅"


EMPTY_UNION = IntervalUnion(parts=())


def _mergeable(cur: RationalInterval, nxt: RationalInterval) -> bool:
    # Assumes cur.lo <= nxt.lo.  Merge when they overlap, or touch with at
    # least one side including the touch point.
    if nxt.lo < cur.hi:
        return True
    if nxt.lo == cur.hi:
        return not (cur.hi_open and nxt.lo_open)
    return False


def normalize_union(intervals: Iterable[RationalInterval]) -> IntervalUnion:
    """Canonical disjoint sorted form covering exactly the same points.

    Idempotent and order-insensitive; touching intervals are merged whenever
    their set union is itself an interval.
    """
    ivs = sorted(intervals, key=lambda iv: (iv.lo, iv.lo_open, iv.hi, iv.hi_open))
    out: list[RationalInterval] = []
    for iv in ivs:
        if out and _mergeable(out[-1], iv):
            cur = out[-1]
            if iv.hi > cur.hi:
                hi, hi_open = iv.hi, iv.hi_open
            elif iv.hi == cur.hi:
                hi, hi_open = cur.hi, cur.hi_open and iv.hi_open
            else:
                hi, hi_open = cur.hi, cur.hi_open
            out[-1] = RationalInterval(cur.lo, hi, cur.lo_open, hi_open)
        else:
            out.append(iv)
    return IntervalUnion(parts=tuple(out))


def measure(u: IntervalUnion) -> Fraction:
    """Exact total length of a normalized union."""
    return u.measure


def union_of(*unions: IntervalUnion) -> IntervalUnion:
    parts: list[RationalInterval] = []
    for u in unions:
        parts.extend(u.parts)
    return normalize_union(parts)


def dyadic_value(sigma: str) -> Fraction:
    """0.sigma as an exact rational (empty string -> 0)."""
    if sigma and set(sigma) - {"0", "1"}:
        raise ParseError(f"bad bit string {sigma!r}")
    return Fraction(int(sigma, 2) if sigma else 0, 2 ** len(sigma))


def dyadic_cylinder(sigma: str) -> RationalInterval:
    """The half-open interval [0.sigma, 0.sigma + 2^{-|sigma|})."""
    lo = dyadic_value(sigma)
    return RationalInterval(lo, lo + Fraction(1, 2 ** len(sigma)), hi_open=True)


def coverage_at_least(
    unions: Sequence[IntervalUnion], threshold: int
) -> IntervalUnion:
    """Points lying in at least `threshold` of the given unions.

    Exact sweep over endpoint breakpoints: open segments between consecutive
    breakpoints have constant coverage (sampled at the midpoint); breakpoints
    themselves are counted pointwise so endpoint flags come out right.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    pts: set[Fraction] = set()
    for u in unions:
        for p in u.parts:
            pts.add(p.lo)
            pts.add(p.hi)
    if not pts:
        return EMPTY_UNION
    bps = sorted(pts)
    pieces: list[RationalInterval] = []
    for a, b in zip(bps, bps[1:]):
        mid = (a + b) / 2
        if sum(1 for u in unions if u.contains(mid)) >= threshold:
            pieces.append(RationalInterval(a, b, lo_open=True, hi_open=True))
    for p in bps:
        if sum(1 for u in unions if u.contains(p)) >= threshold:
            pieces.append(RationalInterval(p, p))
    return normalize_union(pieces)
