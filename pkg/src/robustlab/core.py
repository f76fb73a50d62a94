"""Shared domain types, deterministic randomness, and the Monte Carlo loss engine.

Everything downstream (both classification tasks, the attack harness, the
tradeoff sweep) builds on three things defined here:

* a counter-based randomness contract: the draws consumed by sample ``i``
  depend only on ``(seed, stream_id, i)``, never on chunking or worker count;
* ``monte_carlo_loss``, the generic estimator of misclassification
  probability with a non-asymptotic (Hoeffding) confidence half-width;
* ``circular_distance``, the unit-circle metric used by all mod-1
  comparisons of the pair-encoded task.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

__all__ = [
    "BoundaryError",
    "BudgetViolationError",
    "HypothesisError",
    "LabeledExample",
    "LossEstimate",
    "ParameterError",
    "PerturbationBudget",
    "ResourceError",
    "RngSeed",
    "SCORE_TOL",
    "UnsupportedExactError",
    "circular_distance",
    "hoeffding_half_width",
    "ks_critical_value",
    "ks_statistic_two_sample",
    "ks_statistic_uniform",
    "monte_carlo_loss",
    "uniform_block",
]

DEFAULT_CONFIDENCE = 0.99

# Decision scores within this distance of a threshold are treated as exactly
# ON it and resolved by the documented tie rule. Rationale: an optimal attack
# can land a score exactly on the boundary in real arithmetic, where float
# summation order would otherwise decide the outcome. Every evaluator (lattice
# DP, closed-form attack, corner search, Monte Carlo prediction) quantizes
# comparisons the same way, so they can only disagree about genuinely distinct
# outcomes. Genuine nonzero margins in all certified parameter ranges are
# >= 0.01; float error is <= ~1e-13.
SCORE_TOL = 1e-9

# Fixed evaluation granularity. Results never depend on it (randomness is
# per-sample), so it is tuned for throughput only.
_CHUNK = 1 << 16

_UINT64_MAX = 2**64 - 1

# Interval slack allowed by the LossEstimate invariants.
_EPS_BOUND = 1e-12


class ParameterError(ValueError):
    """An argument violates an operation's precondition."""


class HypothesisError(ValueError):
    """A parameter lies outside the range a bound is certified for."""


class BudgetViolationError(RuntimeError):
    """A perturber returned a vector exceeding its declared l-inf budget."""


class BoundaryError(ValueError):
    """An input sits on a measure-zero decision boundary (reported, not guessed)."""


class ResourceError(RuntimeError):
    """An exact computation would exceed its declared size guard."""


class UnsupportedExactError(TypeError):
    """Exact evaluation requested for inputs it does not cover."""


# ---------------------------------------------------------------------------
# deterministic randomness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RngSeed:
    """Root of a deterministic random stream.

    ``seed`` identifies the experiment, ``stream_id`` separates independent
    uses inside one experiment (data draws vs. noise draws vs. repeated
    adversary rounds). Identical ``(seed, stream_id, draw index)`` always
    yields identical draws, for any worker count or chunking.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= _UINT64_MAX:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def stream(self, offset: int) -> "RngSeed":
        """Derived seed for an independent sub-stream."""
        return RngSeed(self.seed, (self.stream_id + offset) % (_UINT64_MAX + 1))


def uniform_block(seed: RngSeed, index: int, count: int, draws_per_item: int) -> np.ndarray:
    """Uniform[0,1) doubles for items ``index .. index+count-1``.

    Returns shape ``(count, draws_per_item)``. Item ``i`` owns a fixed span
    of Philox counter blocks (4 doubles per block), so the row produced for
    a given item is the same no matter how a caller splits the index range
    into chunks. This is what makes every estimator in the package
    reproducible under parallel evaluation.
    """
    if count < 0 or index < 0:
        raise ParameterError("index and count must be nonnegative")
    if draws_per_item < 1:
        raise ParameterError("draws_per_item must be >= 1")
    blocks = (draws_per_item + 3) // 4
    bg = np.random.Philox(key=[seed.seed, seed.stream_id]).advance(index * blocks)
    raw = np.random.Generator(bg).random(count * blocks * 4)
    return raw.reshape(count, blocks * 4)[:, :draws_per_item]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationBudget:
    """An l-infinity perturbation radius."""

    eps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ParameterError(f"eps must be a positive finite real, got {self.eps!r}")


@dataclass(frozen=True)
class LabeledExample:
    """One input vector with its label (+-1 or {0,1} depending on the task)."""

    x: np.ndarray
    y: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64))
        if self.x.ndim != 1:
            raise ParameterError("x must be a 1-d vector")


@dataclass(frozen=True)
class LossEstimate:
    """A loss value in [0,1] with its provenance.

    ``method == "exact"`` means the value came from closed-form/lattice
    arithmetic (``samples == 0``, ``half_width == 0``). Monte Carlo values
    carry a two-sided Hoeffding half-width at ``confidence``; the quoted
    half-width is truncated so the interval never extends past [0, 1]
    (conservative in the reported width near the boundary, never in the
    point value; the raw width is recoverable from ``samples`` and
    ``confidence``).
    """

    value: float
    method: str  # "exact" | "monte-carlo"
    samples: int
    half_width: float
    confidence: float

    def __post_init__(self) -> None:
        if self.method not in ("exact", "monte-carlo"):
            raise ParameterError(f"unknown method {self.method!r}")
        if not -_EPS_BOUND <= self.value <= 1 + _EPS_BOUND:
            raise ParameterError(f"loss value {self.value} outside [0,1]")
        if not 0 < self.confidence < 1:
            raise ParameterError(f"confidence {self.confidence} outside (0,1)")
        if self.method == "exact":
            if self.half_width != 0 or self.samples != 0:
                raise ParameterError("exact estimates carry no interval and no sample count")
        else:
            if self.samples < 1 or self.half_width < 0:
                raise ParameterError("monte-carlo estimates need samples >= 1, half_width >= 0")
        if self.value - self.half_width < -_EPS_BOUND or self.value + self.half_width > 1 + _EPS_BOUND:
            raise ParameterError("interval extends past [0,1]; truncate the half-width")

    @property
    def lower(self) -> float:
        return max(0.0, self.value - self.half_width)

    @property
    def upper(self) -> float:
        return min(1.0, self.value + self.half_width)

    @staticmethod
    def exact(value: float) -> "LossEstimate":
        return LossEstimate(value=value, method="exact", samples=0, half_width=0.0,
                            confidence=DEFAULT_CONFIDENCE)


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def hoeffding_half_width(m: int, confidence: float) -> float:
    """Two-sided Hoeffding half-width for a mean of m [0,1]-bounded draws.

    sqrt(ln(2 / (1 - confidence)) / (2 m)); non-asymptotic, so the coverage
    guarantee holds at every m, not just in a CLT limit.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError(f"sample count must be a positive integer, got {m!r}")
    if not 0 < confidence < 1:
        raise ParameterError(f"confidence must lie in (0,1), got {confidence!r}")
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * m))


class Sampler(Protocol):
    """Batch source of labeled examples for indices [start, start+count)."""

    def __call__(self, seed: RngSeed, start: int, count: int) -> tuple[np.ndarray, np.ndarray]: ...


class Perturber(Protocol):
    """Batch perturbation; must have an ``eps`` attribute declaring its budget."""

    eps: float

    def __call__(self, seed: RngSeed, start: int, count: int,
                 x: np.ndarray, y: np.ndarray) -> np.ndarray: ...


def _truncated_half_width(value: float, raw: float) -> float:
    # v - min(raw, v, 1-v) >= 0 and v + min(...) <= 1 hold exactly in floats
    return min(raw, value, 1.0 - value)


def monte_carlo_loss(
    sampler: Sampler,
    classifier: Callable[[np.ndarray], np.ndarray],
    perturber: Perturber | None,
    m: int,
    seed: RngSeed,
    confidence: float = DEFAULT_CONFIDENCE,
    workers: int = 1,
) -> LossEstimate:
    """Estimate E[1{classifier(x + delta) != y}] over m indexed samples.

    The sampler draws from ``seed``; the perturber (if any) draws from
    ``seed.stream(1)``. Per-sample error indicators are summed as integers,
    so the result is bit-identical for any ``workers`` value. A perturber
    exceeding its declared budget raises ``BudgetViolationError``: the checks
    here are what downstream bound-vs-estimate comparisons lean on.
    """
    if m < 1:
        raise ParameterError("m must be >= 1")
    noise_seed = seed.stream(1)

    def run_chunk(start: int) -> int:
        count = min(_CHUNK, m - start)
        x, y = sampler(seed, start, count)
        if perturber is not None:
            delta = perturber(noise_seed, start, count, x, y)
            if delta.shape != x.shape:
                raise BudgetViolationError(
                    f"perturber returned shape {delta.shape}, expected {x.shape}")
            worst = float(np.max(np.abs(delta))) if delta.size else 0.0
            if worst > perturber.eps + _EPS_BOUND:
                raise BudgetViolationError(
                    f"perturbation {worst} exceeds budget eps={perturber.eps}")
            x = x + delta
        pred = classifier(x)
        return int(np.count_nonzero(np.asarray(pred) != y))

    starts = range(0, m, _CHUNK)
    if workers <= 1:
        errors = sum(run_chunk(s) for s in starts)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = sum(pool.map(run_chunk, starts))

    value = errors / m
    raw_hw = hoeffding_half_width(m, confidence)
    return LossEstimate(value=value, method="monte-carlo", samples=m,
                        half_width=_truncated_half_width(value, raw_hw),
                        confidence=confidence)


# ---------------------------------------------------------------------------
# circle geometry
# ---------------------------------------------------------------------------


def circular_distance(u, v):
    """Distance between u and v on the unit circle R/Z, in [0, 0.5].

    min(d, 1-d) with d = (u - v) mod 1. Defined for all finite reals, which
    matters because perturbed coordinates may leave [0,1]; adding any integer
    to either argument changes nothing.

    Accepts scalars or arrays (broadcasting like numpy).
    """
    d = np.mod(np.asarray(u, dtype=np.float64) - np.asarray(v, dtype=np.float64), 1.0)
    out = np.minimum(d, 1.0 - d)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov helpers (used by the uniformity and independence checks)
# ---------------------------------------------------------------------------


def ks_statistic_uniform(sample: np.ndarray) -> float:
    """One-sample KS statistic against Uniform[0,1]."""
    u = np.sort(np.asarray(sample, dtype=np.float64))
    m = u.size
    if m == 0:
        raise ParameterError("empty sample")
    i = np.arange(1, m + 1, dtype=np.float64)
    return float(max(np.max(i / m - u), np.max(u - (i - 1) / m)))


def ks_statistic_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample KS statistic: sup |F_a - F_b| over the pooled sample."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ParameterError("empty sample")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(alpha: float, m: int, m2: int | None = None) -> float:
    """Asymptotic KS rejection threshold at level alpha.

    One-sample: c(alpha)/sqrt(m); two-sample: c(alpha)*sqrt((m+m2)/(m*m2)),
    with c(alpha) = sqrt(-ln(alpha/2)/2)  (c(0.01) = 1.6276).
    """
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0,1)")
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    if m2 is None:
        return c / math.sqrt(m)
    return c * math.sqrt((m + m2) / (m * m2))
