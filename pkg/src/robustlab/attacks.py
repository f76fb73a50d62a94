"""Generic adversaries and the adversarial-loss evaluation harness.

Worst-case loss over a continuum of perturbations is not computable for a
black-box classifier, so adversarial loss is always evaluated against a
concrete adversary, and every result says what it is: an exact value when
the adversary is per-instance optimal for the classifier at hand, a
certified lower bound otherwise. Brute-force corner search doubles as the
exactness oracle at small dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    BudgetViolationError,
    LossEstimate,
    ParameterError,
    ResourceError,
    RngSeed,
    Sampler,
    monte_carlo_loss,
    uniform_block,
)

__all__ = [
    "AdversarialLossEstimate",
    "AttackOutcome",
    "UniformNoisePerturber",
    "ZeroAdversary",
    "adversarial_loss",
    "corner_search_attack",
    "uniform_noise_perturber",
]

_CORNER_BATCH = 1 << 14


@dataclass(frozen=True)
class AttackOutcome:
    """Result of attacking one labeled example.

    ``margin`` is the classifier-specific decision score at x+delta (None
    for black-box classifiers). ``guarantee`` records whether the search was
    exhaustive for this classifier family ("exact") or merely found/failed
    to find a witness ("lower_bound").
    """

    delta: np.ndarray
    success: bool
    margin: float | None
    guarantee: str  # "exact" | "lower_bound"

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=np.float64))
        if self.guarantee not in ("exact", "lower_bound"):
            raise ParameterError(f"unknown guarantee {self.guarantee!r}")


def corner_search_attack(
    classifier: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    y,
    eps: float,
    dim_limit: int = 20,
    monotone_decision: bool = False,
) -> AttackOutcome:
    """Try delta = 0 and every corner delta in {-eps,+eps}^d.

    For classifiers whose decision regions are coordinate-monotone on each
    eps-cube face (every linear threshold function; the rounding classifier
    for eps < 1) the worst perturbation sits at a corner, so the search is an
    exact maximizer and the caller may pass ``monotone_decision=True`` to tag
    the outcome accordingly. Otherwise the outcome is a certified lower
    bound: a found witness proves vulnerability, absence proves nothing.

    Corners are scanned in a fixed order (bit j of the corner index set ->
    +eps on coordinate j), and the first witness is returned.
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    if d > dim_limit:
        raise ResourceError(f"dimension {d} exceeds corner-search limit {dim_limit}")
    if eps < 0:
        raise ParameterError("eps must be >= 0")
    guarantee = "exact" if monotone_decision else "lower_bound"

    zero = np.zeros(d)
    if classifier(x[None, :])[0] != y:
        return AttackOutcome(delta=zero, success=True, margin=None, guarantee=guarantee)
    if eps == 0:
        return AttackOutcome(delta=zero, success=False, margin=None, guarantee=guarantee)

    n_corners = 1 << d
    bits = np.arange(d, dtype=np.uint64)
    for start in range(0, n_corners, _CORNER_BATCH):
        idx = np.arange(start, min(start + _CORNER_BATCH, n_corners), dtype=np.uint64)
        signs = ((idx[:, None] >> bits[None, :]) & 1).astype(np.float64) * 2.0 - 1.0
        deltas = signs * eps
        pred = np.asarray(classifier(x[None, :] + deltas))
        hits = np.nonzero(pred != y)[0]
        if hits.size:
            return AttackOutcome(delta=deltas[hits[0]], success=True, margin=None,
                                 guarantee=guarantee)
    return AttackOutcome(delta=zero, success=False, margin=None, guarantee=guarantee)


@dataclass(frozen=True)
class UniformNoisePerturber:
    """delta_i ~ Uniform[-eps, +eps], independent per coordinate and per sample."""

    eps: float
    optimal: bool = False

    def __post_init__(self) -> None:
        if self.eps < 0:
            raise ParameterError("eps must be >= 0")

    def __call__(self, seed: RngSeed, start: int, count: int,
                 x: np.ndarray, y: np.ndarray) -> np.ndarray:
        u = uniform_block(seed, start, count, x.shape[1])
        return (2.0 * u - 1.0) * self.eps


def uniform_noise_perturber(eps: float) -> UniformNoisePerturber:
    return UniformNoisePerturber(eps=eps)


@dataclass(frozen=True)
class ZeroAdversary:
    """No perturbation; adversarial loss against it is the standard loss."""

    eps: float = 0.0
    optimal: bool = False

    def __call__(self, seed: RngSeed, start: int, count: int,
                 x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)


@dataclass(frozen=True)
class AdversarialLossEstimate:
    """A loss estimate plus what it means.

    ``guarantee == "exact"``: the adversary is per-instance optimal for the
    classifier under evaluation, so this estimates the worst-case loss
    itself. ``guarantee == "lower_bound"``: the adversary is merely *an*
    adversary, so the true worst-case loss is at least this (up to the
    Monte Carlo interval).
    """

    estimate: LossEstimate
    guarantee: str

    def __post_init__(self) -> None:
        if self.guarantee not in ("exact", "lower_bound"):
            raise ParameterError(f"unknown guarantee {self.guarantee!r}")


def adversarial_loss(
    classifier: Callable[[np.ndarray], np.ndarray],
    sampler: Sampler,
    adversary,
    m: int,
    seed: RngSeed,
    confidence: float = 0.99,
    workers: int = 1,
) -> AdversarialLossEstimate:
    """Monte Carlo estimate of E[1{f(x + adversary(x,y)) != y}].

    The adversary must expose ``eps`` (budget, enforced per batch) and
    ``optimal`` (a caller-level assertion that it is per-instance optimal
    against this classifier; that is what upgrades the result from a lower
    bound to an estimate of the worst case).
    """
    if not hasattr(adversary, "eps"):
        raise BudgetViolationError("adversary must declare its eps budget")
    est = monte_carlo_loss(sampler, classifier, adversary, m, seed,
                           confidence=confidence, workers=workers)
    guarantee = "exact" if getattr(adversary, "optimal", False) else "lower_bound"
    return AdversarialLossEstimate(estimate=est, guarantee=guarantee)
