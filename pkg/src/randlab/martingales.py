"""Computable martingales with exact fairness and the savings transform.

A martingale at desk scale is an exact rational table on all bit strings
within a depth budget, satisfying 2M(σ) = M(σ0) + M(σ1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import BudgetExceeded, InvariantViolation

FAIRNESS_DEPTH_BUDGET = 16


@dataclass(frozen=True)
class Martingale:
    name: str
    value_at: Callable[[str], Fraction]
    depth_budget: int = FAIRNESS_DEPTH_BUDGET

    def value(self, sigma: str) -> Fraction:
        if len(sigma) > self.depth_budget:
            raise BudgetExceeded(f"|sigma| > {self.depth_budget}")
        v = self.value_at(sigma)
        if v < 0:
            raise InvariantViolation(f"negative capital at {sigma!r}")
        return v

    @property
    def initial_capital(self) -> Fraction:
        return self.value("")


def constant_martingale(capital: Fraction = Fraction(1)) -> Martingale:
    return Martingale("constant", lambda s: capital)


def all_in_on_0() -> Martingale:
    """Bets everything on the next bit being 0; busts on the first 1."""

    def v(s: str) -> Fraction:
        return Fraction(2 ** len(s)) if "1" not in s else Fraction(0)

    return Martingale("all_in_on_0", v)


def split_bet(p: Fraction) -> Martingale:
    """Stakes fraction: M(σ0) = 2p·M(σ), M(σ1) = 2(1-p)·M(σ)."""
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0,1]")

    def v(s: str) -> Fraction:
        out = Fraction(1)
        for bit in s:
            out *= 2 * p if bit == "0" else 2 * (1 - p)
        return out

    return Martingale(f"split_bet({p})", v)


def table_martingale(table: dict[str, Fraction], name: str = "table") -> Martingale:
    depth = max((len(k) for k in table), default=0)

    def v(s: str) -> Fraction:
        return table[s]

    return Martingale(name, v, depth_budget=depth)


@dataclass(frozen=True)
class FairnessReport:
    ok: bool
    violation: Optional[str] = None


def check_fairness(m: Martingale, depth: int) -> FairnessReport:
    """2M(σ) = M(σ0) + M(σ1) exactly, for every σ with |σ| < depth."""
    if depth > FAIRNESS_DEPTH_BUDGET:
        raise BudgetExceeded(f"depth > {FAIRNESS_DEPTH_BUDGET}")
    stack = [""]
    while stack:
        s = stack.pop()
        if len(s) >= depth:
            continue
        v, v0, v1 = m.value(s), m.value(s + "0"), m.value(s + "1")
        if 2 * v != v0 + v1:
            return FairnessReport(
                False, f"fairness fails at {s!r}: 2·{v} != {v0} + {v1}"
            )
        stack.extend((s + "0", s + "1"))
    return FairnessReport(True)


@dataclass(frozen=True)
class CapitalTrace:
    capitals: tuple[Fraction, ...]
    running_max: tuple[Fraction, ...]


def capital_trace(m: Martingale, prefix: str) -> CapitalTrace:
    """Exact capital at each prefix length plus the running supremum."""
    caps = [m.value(prefix[:i]) for i in range(len(prefix) + 1)]
    run: list[Fraction] = []
    best = caps[0]
    for c in caps:
        best = max(best, c)
        run.append(best)
    return CapitalTrace(tuple(caps), tuple(run))


def savings_transform(m: Martingale, depth: int) -> Martingale:
    """Bank/side-account transform yielding the savings property.

    Working capital follows the base martingale's proportional bets; whenever
    it reaches twice the initial capital, half is moved to the bank, which
    never shrinks.  The result is fair and satisfies
    M'(τ) >= M'(σ) - 2·M(ε) for all τ ⊒ σ within depth.
    """
    ref = m.initial_capital
    state: dict[str, tuple[Fraction, Fraction]] = {"": (ref, Fraction(0))}
    table: dict[str, Fraction] = {"": ref}
    frontier = [""]
    for _ in range(depth):
        nxt: list[str] = []
        for s in frontier:
            w, b = state[s]
            base = m.value(s)
            for bit in "01":
                child = s + bit
                ratio = m.value(child) / base if base != 0 else Fraction(1)
                wc = w * ratio
                if ref > 0 and wc >= 2 * ref:
                    bc = b + wc / 2
                    wc = wc / 2
                else:
                    bc = b
                state[child] = (wc, bc)
                table[child] = wc + bc
                nxt.append(child)
        frontier = nxt
    return Martingale(f"savings({m.name})", lambda s: table[s], depth_budget=depth)


def savings_violation_search(
    m: Martingale, depth: int, drop: Fraction = Fraction(2)
) -> Optional[tuple[str, str]]:
    """First pair σ ⊑ τ (|τ| <= depth) with M(τ) < M(σ) - drop, if any."""
    for sigma_len in range(depth + 1):
        for si in range(2**sigma_len):
            sigma = format(si, f"0{sigma_len}b") if sigma_len else ""
            vs = m.value(sigma)
            stack = [sigma]
            while stack:
                tau = stack.pop()
                if m.value(tau) < vs - drop:
                    return sigma, tau
                if len(tau) < depth:
                    stack.extend((tau + "0", tau + "1"))
    return None


def savings_growth_constants(
    base: Martingale, transformed: Martingale, depth: int
) -> tuple[Fraction, Fraction]:
    """Achieved (c, const) with max M' >= c·log2(max M) - const over all paths.

    c is fixed at the initial capital (one banking event per doubling); const
    is the smallest value making the inequality hold on every depth-bounded
    path.
    """
    c = base.initial_capital
    worst = Fraction(0)
    for leaf in range(2**depth):
        path = format(leaf, f"0{depth}b")
        mx_base = max(capital_trace(base, path).capitals)
        mx_tr = max(capital_trace(transformed, path).capitals)
        log2_floor = max(0, mx_base.numerator.bit_length() - 1) if mx_base >= 1 else 0
        worst = max(worst, c * log2_floor - mx_tr)
    return c, worst
