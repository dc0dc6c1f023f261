"""Truth-table functionals, induced measures, and cylinder transport.

A total functional with a declared use bound induces a measure on Cantor
space by exact preimage counting.  Its distribution function on [0,1] is
computed through cylinder decompositions, and drives the greedy transport
of dyadic prefixes along the quantile coupling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .cauchy import ModulusFunction
from .errors import (
    AtomSuspected,
    BudgetExceeded,
    InvariantViolation,
    ZeroMassCylinder,
)
from .intervals import dyadic_value, format_rational
from .markov import MarkovFunction

USE_BOUND_BUDGET = 24
TRANSPORT_LENGTH_CAP = 64
OMEGA_CE_DEFAULT_BUDGET = 16


@dataclass(frozen=True)
class TTFunctional:
    """A total functional on Cantor space in Nerode form.

    output_bit(bits, n) computes bit n of the output from input bits
    0..use_bound(n)-1 only; use_bound must be nondecreasing.
    """

    name: str
    use_bound: Callable[[int], int]
    output_bit: Callable[[tuple[int, ...], int], int]
    _tally: dict = field(default_factory=dict, compare=False, repr=False)

    def apply_prefix(self, bits: tuple[int, ...], length: int) -> tuple[int, ...]:
        return tuple(self.output_bit(bits, n) for n in range(length))


def identity_tt() -> TTFunctional:
    return TTFunctional("identity", lambda n: n + 1, lambda bits, n: bits[n])


def bit_flip_tt() -> TTFunctional:
    return TTFunctional("bit_flip", lambda n: n + 1, lambda bits, n: 1 - bits[n])


def pairwise_or_tt() -> TTFunctional:
    """Output bit n is the OR of input bits 2n and 2n+1; pushes the uniform
    measure to Bernoulli(3/4)."""
    return TTFunctional(
        "pairwise_or", lambda n: 2 * n + 2, lambda bits, n: bits[2 * n] | bits[2 * n + 1]
    )


def _tally_for_length(phi: TTFunctional, length: int) -> dict[str, int]:
    """Count, for every output string of the given length, how many input
    blocks of length use_bound(length-1) map onto it.  One enumeration
    serves all cylinders of that length."""
    cached = phi._tally.get(length)
    if cached is not None:
        return cached
    u = phi.use_bound(length - 1) if length > 0 else 0
    if u > USE_BOUND_BUDGET:
        raise BudgetExceeded(
            f"use bound {u} at length {length} exceeds {USE_BOUND_BUDGET}"
        )
    counts: dict[str, int] = {}
    for block in range(2**u):
        bits = tuple((block >> (u - 1 - i)) & 1 for i in range(u))
        out = "".join(str(b) for b in phi.apply_prefix(bits, length))
        counts[out] = counts.get(out, 0) + 1
    phi._tally[length] = counts
    return counts


def induced_measure_of_cylinder(phi: TTFunctional, sigma: str) -> Fraction:
    """λ_Φ([σ)) = λ(Φ⁻¹[σ)), exactly, via the per-length tally."""
    if sigma == "":
        return Fraction(1)
    counts = _tally_for_length(phi, len(sigma))
    u = phi.use_bound(len(sigma) - 1)
    return Fraction(counts.get(sigma, 0), 2**u)


@dataclass(frozen=True)
class CylinderMeasure:
    """A Borel probability measure given by exact cylinder masses."""

    name: str
    mass: Callable[[str], Fraction]

    def __call__(self, sigma: str) -> Fraction:
        return self.mass(sigma)


def uniform_measure() -> CylinderMeasure:
    return CylinderMeasure("uniform", lambda s: Fraction(1, 2 ** len(s)))


def bernoulli_measure(p: Fraction) -> CylinderMeasure:
    if not Fraction(0) < p < Fraction(1):
        raise ValueError("bias must lie strictly between 0 and 1")

    def mass(sigma: str) -> Fraction:
        out = Fraction(1)
        for b in sigma:
            out *= p if b == "1" else 1 - p
        return out

    return CylinderMeasure(f"bernoulli {format_rational(p)}", mass)


def table_measure(name: str, table: dict[str, Fraction]) -> CylinderMeasure:
    def mass(sigma: str) -> Fraction:
        if sigma in table:
            return table[sigma]
        raise KeyError(f"no mass recorded for cylinder {sigma!r}")

    return CylinderMeasure(name, mass)


def materialize_measure(phi: TTFunctional) -> CylinderMeasure:
    return CylinderMeasure(
        f"induced({phi.name})", lambda s: induced_measure_of_cylinder(phi, s)
    )


@dataclass(frozen=True)
class MeasureCheck:
    name: str
    passed: bool
    detail: str = ""


def validate_measure(mu: CylinderMeasure, depth: int) -> tuple[MeasureCheck, ...]:
    """Exact additivity μ(σ) = μ(σ0) + μ(σ1) at every node to the depth,
    plus total mass 1 at the root."""
    checks = [
        MeasureCheck(
            "total_mass",
            mu("") == 1,
            f"mass(ε) = {format_rational(mu(''))}",
        )
    ]
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for s in frontier:
            lhs = mu(s)
            rhs = mu(s + "0") + mu(s + "1")
            if lhs != rhs:
                checks.append(
                    MeasureCheck(
                        f"additivity[{s or 'ε'}]",
                        False,
                        f"{format_rational(lhs)} != {format_rational(rhs)}",
                    )
                )
            nxt.extend((s + "0", s + "1"))
        frontier = nxt
    if all(c.passed for c in checks):
        checks.append(MeasureCheck(f"additivity_to_depth_{depth}", True))
    return tuple(checks)


def cdf(mu: CylinderMeasure, d: Fraction) -> Fraction:
    """g(d) = μ[0, d) for a dyadic d in [0, 1], via the binary-expansion
    cylinder decomposition of [0, d)."""
    if d < 0 or d > 1:
        raise ValueError("argument must lie in [0, 1]")
    if d == 1:
        return mu("")
    num, den = d.numerator, d.denominator
    if den & (den - 1):
        raise ValueError("argument must be dyadic")
    length = den.bit_length() - 1
    bits = format(num, f"0{length}b") if length else ""
    total = Fraction(0)
    for i, b in enumerate(bits):
        if b == "1":
            total += mu(bits[:i] + "0")
    return total


class TransportStatus(enum.Enum):
    OK = "OK"
    NEED_MORE_INPUT = "NEED_MORE_INPUT"


@dataclass(frozen=True)
class TransportResult:
    c_prefix: str
    status: TransportStatus
    image_lo: Fraction
    image_hi: Fraction


def transport(mu: CylinderMeasure, a_prefix: str) -> TransportResult:
    """Greedy cylinder descent along the distribution function.

    The input cylinder [a) maps to the image interval [g(0.a), g(0.a+2^-|a|));
    emit output bits while a dyadic half splits the image cleanly.
    """
    lo = cdf(mu, dyadic_value(a_prefix))
    hi = cdf(mu, dyadic_value(a_prefix) + Fraction(1, 2 ** len(a_prefix)))
    if lo == hi:
        raise ZeroMassCylinder(f"cylinder {a_prefix!r} has image of length 0")
    if len(a_prefix) >= 8:
        half = a_prefix[: len(a_prefix) // 2]
        h_lo = cdf(mu, dyadic_value(half))
        h_hi = cdf(mu, dyadic_value(half) + Fraction(1, 2 ** len(half)))
        if hi - lo > (h_hi - h_lo) / 2:
            raise AtomSuspected(
                f"image of {a_prefix!r} is not shrinking against its half-prefix"
            )
    c = ""
    c_lo, c_hi = Fraction(0), Fraction(1)
    while len(c) < TRANSPORT_LENGTH_CAP:
        mid = (c_lo + c_hi) / 2
        if hi <= mid:
            c += "0"
            c_hi = mid
        elif lo >= mid:
            c += "1"
            c_lo = mid
        else:
            break
    status = TransportStatus.OK if len(c) >= len(a_prefix) else TransportStatus.NEED_MORE_INPUT
    return TransportResult(c, status, lo, hi)


@dataclass(frozen=True)
class PushforwardCheck:
    tau: str
    transported_mass: Fraction
    target_mass: Fraction
    residual: Fraction
    passed: bool


def transport_pushforward_check(
    mu: CylinderMeasure, tau: str, depth: int
) -> PushforwardCheck:
    """Sum source mass of depth-level cylinders whose transport extends τ;
    the discrepancy from 2^{-|τ|} must be explained by boundary cylinders
    (those whose output is still a proper prefix of τ)."""
    if depth < len(tau):
        raise ValueError("depth must be at least the target length")
    total = Fraction(0)
    residual = Fraction(0)
    for block in range(2**depth):
        a = format(block, f"0{depth}b")
        m = mu(a)
        if m == 0:
            continue
        c = transport(mu, a).c_prefix
        if c.startswith(tau):
            total += m
        elif tau.startswith(c):
            residual += m
    target = Fraction(1, 2 ** len(tau))
    return PushforwardCheck(
        tau, total, target, residual, abs(total - target) <= residual
    )


def tt_from_ucf(g: MarkovFunction, depth: int) -> TTFunctional:
    """Build a truth-table functional from a uniformly continuous function
    with declared modulus θ: use u(n) = the least k with θ(2^{-n-2}) >= 2^{-k},
    and emit bit n of the lower endpoint of the certified output hull
    (rounding down at the boundary)."""
    if g.modulus is None:
        raise InvariantViolation("a declared modulus is required")
    theta: ModulusFunction = g.modulus

    use_cache: dict[int, int] = {}

    def use_bound(n: int) -> int:
        if n not in use_cache:
            eps = theta(Fraction(1, 2 ** (n + 2)))
            k = 0
            while Fraction(1, 2**k) > eps:
                k += 1
                if k > USE_BOUND_BUDGET:
                    raise BudgetExceeded(
                        f"modulus demands use beyond {USE_BOUND_BUDGET} at bit {n}"
                    )
            use_cache[n] = max(k, n + 1)
        return use_cache[n]

    def output_bit(bits: tuple[int, ...], n: int) -> int:
        u = use_bound(n)
        prefix = "".join(str(b) for b in bits[:u])
        lo = dyadic_value(prefix)
        hi = lo + Fraction(1, 2**u)
        ylo = min(g(lo), g(hi))
        for cp in getattr(g, "critical_points", ()) or ():
            if lo < cp < hi:
                ylo = min(ylo, g(cp))
        if ylo >= 1:
            return 1
        scaled = ylo * 2 ** (n + 1)
        return int(scaled) & 1

    return TTFunctional(f"tt({g.name})", use_bound, output_bit)


@dataclass(frozen=True)
class LimitOracle:
    """A stage-wise approximation with per-query mind-change budgets, the
    finite surrogate for a halting-style oracle."""

    script: Callable[[object, int], object]
    budget: int = OMEGA_CE_DEFAULT_BUDGET

    def value(self, query: object, stage: int) -> object:
        return self.script(query, stage)

    def final(self, query: object, horizon: int) -> object:
        return self.script(query, horizon)

    def changes(self, query: object, horizon: int) -> int:
        count = 0
        prev = self.script(query, 0)
        for s in range(1, horizon + 1):
            cur = self.script(query, s)
            if cur != prev:
                count += 1
                prev = cur
        return count

    def validate_budget(self, query: object, horizon: int) -> bool:
        return self.changes(query, horizon) <= self.budget


@dataclass(frozen=True)
class MonotoneCDF:
    """The distribution function of a cylinder measure, tabulated at dyadic
    points and packaged as a monotone map on [0, 1]."""

    mu: CylinderMeasure
    depth: int

    def __call__(self, d: Fraction) -> Fraction:
        return cdf(self.mu, d)

    def knots(self) -> tuple[tuple[Fraction, Fraction], ...]:
        pts = [Fraction(i, 2**self.depth) for i in range(2**self.depth + 1)]
        return tuple((p, cdf(self.mu, p)) for p in pts)

    def is_monotone(self) -> bool:
        ks = self.knots()
        return all(a[1] <= b[1] for a, b in zip(ks, ks[1:]))
