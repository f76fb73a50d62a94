"""Task c1: biased-coordinate voting, threshold classifiers, exact losses.

The distribution draws a uniform label y in {+1,-1} and n coordinates that
each equal +y with probability p (default 0.51), -y otherwise. Conditioned
on nothing, z_i := y * x_i are i.i.d. signs with P[+1] = p, so every loss of
a weighted-vote classifier reduces to the law of the integer lattice random
variable S = sum_i w_i z_i. For integer weights that law is computed exactly
by sequential convolution, which is what makes the standard and worst-case
losses here exact oracles rather than estimates.

Sign convention everywhere: sign(0) = +1 (the tie rule), and the two label
classes are handled asymmetrically at the boundary rather than assuming
symmetry, because an optimal perturbation can land the decision score
exactly on a lattice point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackOutcome, UniformNoisePerturber
from .core import (
    SCORE_TOL,
    BoundaryError,
    HypothesisError,
    LabeledExample,
    LossEstimate,
    ParameterError,
    PerturbationBudget,
    ResourceError,
    RngSeed,
    UnsupportedExactError,
    monte_carlo_loss,
    uniform_block,
)

__all__ = [
    "C1Params",
    "LinearThresholdClassifier",
    "OptimalLtfAdversary",
    "WeightedSumDistribution",
    "azuma_success_bound",
    "c1_sampler",
    "exact_adv_loss_ltf",
    "exact_std_loss_ltf",
    "ltf_predict",
    "majority_classifier",
    "noisy_loss_ltf",
    "optimal_ltf_attack",
    "rounding_predict",
    "rounding_predict_batch",
    "sample_c1",
    "sample_c1_batch",
    "weighted_sum_distribution",
]

_LATTICE_GUARD = 10**6
_MASS_TOL = 1e-12


@dataclass(frozen=True)
class C1Params:
    """Parameters of the biased-coordinate task.

    ``budget`` is optional because sampling itself needs no radius; when one
    is attached it must lie in (0.01, 1), the range the theorem-level
    verification modes are certified for.
    """

    n: int
    p: float = 0.51
    budget: PerturbationBudget | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if not 0.5 < self.p < 1.0:
            raise ParameterError(f"p must lie in (0.5, 1), got {self.p}")
        if self.budget is not None and not 0.01 < self.budget.eps < 1.0:
            raise HypothesisError(
                f"c1 verification requires eps in (0.01, 1), got {self.budget.eps}")


def sample_c1_batch(params: C1Params, seed: RngSeed, start: int, count: int
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized draws for sample indices [start, start+count).

    Each sample consumes n+1 uniforms: one for the label, n for the
    coordinate agreements.
    """
    u = uniform_block(seed, start, count, params.n + 1)
    y = np.where(u[:, 0] < 0.5, 1, -1).astype(np.int8)
    agree = u[:, 1:] < params.p
    x = np.where(agree, y[:, None], -y[:, None]).astype(np.float64)
    return x, y


def sample_c1(params: C1Params, seed: RngSeed, index: int = 0) -> LabeledExample:
    """One labeled example; ``index`` selects the draw within the stream."""
    x, y = sample_c1_batch(params, seed, index, 1)
    return LabeledExample(x=x[0], y=int(y[0]))


def c1_sampler(params: C1Params):
    """Sampler closure for the Monte Carlo harness."""

    def sampler(seed: RngSeed, start: int, count: int):
        return sample_c1_batch(params, seed, start, count)

    sampler.dim = params.n
    return sampler


# ---------------------------------------------------------------------------
# classifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearThresholdClassifier:
    """f(x) = sign(<w, x>) with sign(0) = +1."""

    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ParameterError("w must be a nonempty 1-d vector")
        if not np.any(w):
            raise ParameterError("w must not be identically zero")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.size

    @property
    def integer_weights(self) -> bool:
        """Gates the exact lattice evaluators."""
        return bool(np.all(self.w == np.round(self.w)))

    @property
    def l1(self) -> float:
        return float(np.sum(np.abs(self.w)))

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.sum(self.w**2)))

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.n:
            raise ParameterError(f"input dim {x.shape[1]} != weight dim {self.n}")
        return x @ self.w

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        # scores within SCORE_TOL of 0 count as the tie (predict +1)
        return np.where(self.scores(x) >= -SCORE_TOL, 1, -1).astype(np.int8)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.predict_batch(x)


def majority_classifier(n: int) -> LinearThresholdClassifier:
    return LinearThresholdClassifier(w=np.ones(n))


def ltf_predict(c: LinearThresholdClassifier, x: np.ndarray) -> int:
    """Single-vector prediction, +1 on ties."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size != c.n:
        raise ParameterError(f"input dim {x.shape} incompatible with weight dim {c.n}")
    return int(c.predict_batch(x[None, :])[0])


def rounding_predict_batch(x: np.ndarray) -> np.ndarray:
    """Majority vote after snapping each coordinate to the nearer of {+1,-1}.

    Any perturbation of magnitude < 1 is inverted by the rounding, so this
    classifier's worst-case loss equals the plain majority's standard loss.
    A coordinate exactly at 0 has no nearer point; that measure-zero case is
    reported, not silently resolved.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if np.any(x == 0.0):
        raise BoundaryError("coordinate exactly 0: rounding undefined on the boundary")
    r = np.where(x > 0, 1.0, -1.0)
    return np.where(r.sum(axis=1) >= 0, 1, -1).astype(np.int8)


def rounding_predict(x: np.ndarray) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError("x must be a 1-d vector")
    return int(rounding_predict_batch(x[None, :])[0])


# ---------------------------------------------------------------------------
# exact lattice law of S = sum_i w_i z_i
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedSumDistribution:
    """Exact PMF of S = sum_i w_i z_i on the integer lattice [-W, W].

    z_i are i.i.d. signs with P[+1] = p; W = sum |w_i|. ``masses[j]`` is
    P[S = j - W].
    """

    w: np.ndarray
    p: float
    masses: np.ndarray = field(repr=False)

    @property
    def values(self) -> np.ndarray:
        half = (self.masses.size - 1) // 2
        return np.arange(-half, half + 1)

    def mean(self) -> float:
        return float(np.dot(self.values, self.masses))

    def prob(self, predicate: np.ndarray) -> float:
        return float(self.masses[predicate].sum())

    # Comparisons quantized by SCORE_TOL: a lattice point within SCORE_TOL of
    # the threshold counts as exactly on it, matching the prediction paths.

    def prob_lt(self, t: float) -> float:
        return self.prob(self.values < t - SCORE_TOL)

    def prob_le(self, t: float) -> float:
        return self.prob(self.values <= t + SCORE_TOL)

    def prob_ge(self, t: float) -> float:
        return self.prob(self.values >= t - SCORE_TOL)

    def prob_gt(self, t: float) -> float:
        return self.prob(self.values > t + SCORE_TOL)


def weighted_sum_distribution(w: np.ndarray, p: float) -> WeightedSumDistribution:
    """Sequential convolution over coordinates; exact up to float rounding.

    Requires integer weights (the lattice) and sum|w_i| <= 1e6 (the guard).
    """
    w = np.asarray(w, dtype=np.float64)
    if not np.all(w == np.round(w)):
        raise UnsupportedExactError("exact lattice law requires integer weights")
    if not 0 < p < 1:
        raise ParameterError(f"p must lie in (0,1), got {p}")
    wi = np.round(w).astype(np.int64)
    total = int(np.sum(np.abs(wi)))
    if total > _LATTICE_GUARD:
        raise ResourceError(f"lattice size {total} exceeds guard {_LATTICE_GUARD}")

    size = 2 * total + 1
    masses = np.zeros(size)
    masses[total] = 1.0  # S = 0 before any coordinate
    q = 1.0 - p
    for weight in wi:
        a = abs(int(weight))
        if a == 0:
            continue  # zero weight contributes nothing to S
        nxt = np.zeros(size)
        # shift by +weight with prob p, -weight with prob q
        if weight > 0:
            nxt[a:] += p * masses[: size - a]
            nxt[: size - a] += q * masses[a:]
        else:
            nxt[: size - a] += p * masses[a:]
            nxt[a:] += q * masses[: size - a]
        masses = nxt

    drift = abs(float(masses.sum()) - 1.0)
    if drift > _MASS_TOL:
        raise ResourceError(f"PMF mass drifted by {drift:.3e}; lattice too deep for float64")
    return WeightedSumDistribution(w=wi, p=p, masses=masses)


# ---------------------------------------------------------------------------
# exact losses and the closed-form attack
# ---------------------------------------------------------------------------


def exact_std_loss_ltf(c: LinearThresholdClassifier, p: float) -> LossEstimate:
    """Exact standard loss of a threshold classifier.

    Conditioning on y = +1 the error event is {S < 0} (a tie is correct);
    on y = -1 it is {S <= 0} (a tie predicts +1, an error). Both reduce to
    the lattice law of S.
    """
    dist = weighted_sum_distribution(c.w, p)
    value = 0.5 * dist.prob_lt(0.0) + 0.5 * dist.prob_le(0.0)
    return LossEstimate.exact(min(1.0, max(0.0, value)))


def optimal_ltf_attack(c: LinearThresholdClassifier, x: np.ndarray, y: int,
                       eps: float) -> AttackOutcome:
    """The worst l-inf perturbation against a threshold classifier.

    delta_i = -eps * y * sign(w_i) (0 where w_i = 0) minimizes the signed
    margin y<w, x+delta> over the eps-ball, achieving y<w,x> - eps*||w||_1.
    No in-budget perturbation achieves a smaller margin, so success of this
    attack is definitive for the instance.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size != c.n:
        raise ParameterError(f"input dim {x.size} != weight dim {c.n}")
    if eps < 0:
        raise ParameterError("eps must be >= 0")
    if y not in (1, -1):
        raise ParameterError(f"label must be +-1, got {y!r}")
    delta = -eps * y * np.sign(c.w)
    margin = float(y * np.dot(c.w, x + delta))
    snapped = 0.0 if abs(margin) <= SCORE_TOL else margin
    # tie rule: score 0 predicts +1, so y=+1 survives a zero margin, y=-1 does not
    success = snapped < 0 if y == 1 else snapped <= 0
    return AttackOutcome(delta=delta, success=bool(success), margin=margin,
                         guarantee="exact")


@dataclass(frozen=True)
class OptimalLtfAdversary:
    """Batch form of the closed-form attack, for the Monte Carlo harness."""

    classifier: LinearThresholdClassifier
    eps: float
    optimal: bool = True

    def __call__(self, seed: RngSeed, start: int, count: int,
                 x: np.ndarray, y: np.ndarray) -> np.ndarray:
        signs = np.sign(self.classifier.w)
        return -self.eps * y[:, None].astype(np.float64) * signs[None, :]


def exact_adv_loss_ltf(c: LinearThresholdClassifier, p: float, eps: float) -> LossEstimate:
    """Exact adversarial loss under the optimal attack.

    After the optimal shift the signed margin is S - eps*||w||_1, so the
    classifier survives iff S >= eps*||w||_1 for y = +1 (tie correct) and
    iff S > eps*||w||_1 for y = -1 (tie wrong).
    """
    if eps < 0:
        raise ParameterError("eps must be >= 0")
    dist = weighted_sum_distribution(c.w, p)
    t = eps * c.l1
    survive = 0.5 * dist.prob_ge(t) + 0.5 * dist.prob_gt(t)
    return LossEstimate.exact(min(1.0, max(0.0, 1.0 - survive)))


def noisy_loss_ltf(c: LinearThresholdClassifier, p: float, eps: float, m: int,
                   seed: RngSeed, confidence: float = 0.99, workers: int = 1) -> LossEstimate:
    """Monte Carlo loss under coordinatewise Uniform[-eps, +eps] noise."""
    if eps < 0:
        raise ParameterError("eps must be >= 0")
    params = C1Params(n=c.n, p=p)
    perturber = UniformNoisePerturber(eps=eps) if eps > 0 else None
    return monte_carlo_loss(c1_sampler(params), c.predict_batch, perturber, m, seed,
                            confidence=confidence, workers=workers)


def azuma_success_bound(c: LinearThresholdClassifier, p: float, eps: float) -> float:
    """Upper bound on the survival probability under the optimal attack.

    exp(-d^2 ||w||_1^2 / (2 ||w||_2^2)) with d = eps - (2p - 1), the margin
    between the attack shift and the exact per-coordinate mean E[z_i] = 2p-1.
    Valid only when d > 0; anything else is a hypothesis violation, not a
    quantity to clamp.
    """
    delta = eps - (2.0 * p - 1.0)
    if delta <= 0:
        raise HypothesisError(
            f"bound requires eps > 2p-1 = {2 * p - 1:.4f}, got eps = {eps}")
    ratio = c.l1**2 / c.l2**2
    return math.exp(-delta**2 * ratio / 2.0)
