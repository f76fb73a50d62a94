"""Support-size sweep of {0,1}-weight classifiers and the tradeoff bound.

For weight vectors w in {0,1}^n the task distribution is coordinate
exchangeable, so both exact losses depend only on the support size k; one
representative per k (w = 1^k 0^(n-k)) covers the whole subclass. Each row
of the sweep carries two exponents:

* ``gamma_paper``: the constant as originally stated, built on a
  per-coordinate mean of 0.01;
* ``gamma_valid``: the largest exponent the concentration argument
  actually certifies, built on the exact mean 2p - 1 (= 0.02 at the
  default p).

The inequality  adv_loss + std_loss**gamma >= 1  is guaranteed for
``gamma_valid``; the sweep reports (never assumes) the outcome under the
literal ``gamma_paper``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .construction1 import (
    LinearThresholdClassifier,
    exact_adv_loss_ltf,
    exact_std_loss_ltf,
)
from .core import HypothesisError, ParameterError

__all__ = [
    "CSV_HEADER",
    "TradeoffReport",
    "TradeoffRow",
    "gamma_paper",
    "gamma_valid",
    "rows_to_csv",
    "sweep_support",
    "verify_tradeoff",
]

_BOUND_SLACK = 1e-10

CSV_HEADER = ("k,eps,p,n,std_loss,adv_loss,gamma_paper,gamma_valid,"
              "bound_lhs_paper,bound_lhs_valid")

_LN_1_OVER_049 = math.log(1.0 / 0.49)


def gamma_paper(eps: float) -> float:
    """(eps - 0.01)^2 / (2 ln(1/0.49)), the exponent as originally stated."""
    if not 0.01 < eps < 1.0:
        raise HypothesisError(f"eps must lie in (0.01, 1), got {eps}")
    return (eps - 0.01) ** 2 / (2.0 * _LN_1_OVER_049)


def gamma_valid(eps: float, p: float) -> float:
    """(eps - (2p-1))^2 / (2 ln(1/(1-p))): the exponent the proof chain certifies.

    Strictly smaller than ``gamma_paper`` at p = 0.51 (exact mean 0.02 vs the
    stated 0.01), hence a weaker but guaranteed inequality.
    """
    mean = 2.0 * p - 1.0
    if eps <= mean:
        raise HypothesisError(f"eps must exceed 2p-1 = {mean:.4f}, got {eps}")
    if not 0.5 < p < 1.0:
        raise ParameterError(f"p must lie in (0.5, 1), got {p}")
    return (eps - mean) ** 2 / (2.0 * math.log(1.0 / (1.0 - p)))


@dataclass(frozen=True)
class TradeoffRow:
    """Exact losses and bound values for one support size."""

    k: int
    eps: float
    p: float
    n: int
    std_loss: float
    adv_loss: float
    gamma_paper: float
    gamma_valid: float

    @property
    def bound_lhs_paper(self) -> float:
        return self.adv_loss + self.std_loss**self.gamma_paper

    @property
    def bound_lhs_valid(self) -> float:
        return self.adv_loss + self.std_loss**self.gamma_valid


def sweep_support(n: int, eps: float, p: float = 0.51,
                  ks: list[int] | None = None) -> list[TradeoffRow]:
    """Exact sweep over support sizes; rows sorted by k."""
    if ks is None:
        ks = list(range(1, n + 1))
    for k in ks:
        if not 1 <= k <= n:
            raise ParameterError(f"support size {k} outside [1, {n}]")
    gp = gamma_paper(eps)
    gv = gamma_valid(eps, p)
    rows = []
    for k in sorted(ks):
        w = np.zeros(n)
        w[:k] = 1.0
        c = LinearThresholdClassifier(w=w)
        rows.append(TradeoffRow(
            k=k, eps=eps, p=p, n=n,
            std_loss=exact_std_loss_ltf(c, p).value,
            adv_loss=exact_adv_loss_ltf(c, p, eps).value,
            gamma_paper=gp, gamma_valid=gv,
        ))
    return rows


@dataclass(frozen=True)
class TradeoffReport:
    """Outcome of checking adv + std**gamma >= 1 over a sweep."""

    gamma: float
    passed: bool
    min_slack: float
    worst_row: TradeoffRow

    def describe(self) -> str:
        state = "holds" if self.passed else "VIOLATED"
        return (f"bound adv + std^{self.gamma:.6f} >= 1 {state}; "
                f"min slack {self.min_slack:.3e} at k={self.worst_row.k} "
                f"(n={self.worst_row.n}, eps={self.worst_row.eps})")


def verify_tradeoff(rows: list[TradeoffRow], gamma: float) -> TradeoffReport:
    """Check the bound at a given exponent; the counterexample row rides along."""
    if not rows:
        raise ParameterError("no rows to verify")
    slacks = [(row.adv_loss + row.std_loss**gamma - 1.0, row) for row in rows]
    min_slack, worst = min(slacks, key=lambda t: t[0])
    return TradeoffReport(gamma=gamma, passed=min_slack >= -_BOUND_SLACK,
                          min_slack=min_slack, worst_row=worst)


def rows_to_csv(rows: list[TradeoffRow]) -> str:
    """Header plus one line per row, 17 significant digits."""
    out = [CSV_HEADER]
    for r in rows:
        out.append(",".join([
            str(r.k), f"{r.eps:.17g}", f"{r.p:.17g}", str(r.n),
            f"{r.std_loss:.17g}", f"{r.adv_loss:.17g}",
            f"{r.gamma_paper:.17g}", f"{r.gamma_valid:.17g}",
            f"{r.bound_lhs_paper:.17g}", f"{r.bound_lhs_valid:.17g}",
        ]))
    return "\n".join(out) + "\n"
