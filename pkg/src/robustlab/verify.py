"""Named property suites behind the ``verify`` command.

Each check compares a measured quantity against a bound or oracle and
returns a CheckResult; the CLI prints one line per check and folds the
gated ones into the exit status. ``fast`` budgets finish the whole run in
well under a minute, ``full`` matches the sizes used by the acceptance
tests.

The brute-force enumerators here are deliberately separate code paths from
the lattice evaluators they certify: they enumerate inputs and corner
perturbations directly, sharing nothing with the convolution DP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attacks import UniformNoisePerturber, corner_search_attack
from .construction1 import (
    LinearThresholdClassifier,
    azuma_success_bound,
    exact_adv_loss_ltf,
    exact_std_loss_ltf,
    majority_classifier,
    noisy_loss_ltf,
    optimal_ltf_attack,
    rounding_predict_batch,
)
from .construction2 import (
    C2Params,
    CanonicalAdversary,
    alpha_independence_check,
    c2_sampler,
    robust_classify_batch,
    sample_c2_batch,
    simple_classifier,
)
from .core import (
    SCORE_TOL,
    ParameterError,
    RngSeed,
    ks_statistic_uniform,
    monte_carlo_loss,
)
from .tradeoff import gamma_paper, gamma_valid, sweep_support, verify_tradeoff

__all__ = ["CheckResult", "run_suite", "SUITES"]

# Monte Carlo noise: exact convolution value of the noisy loss for the
# 101-coordinate majority vote at eps=0.5, p=0.51 (lattice PMF composed with
# the CDF of a sum of 101 uniforms, evaluated in high-precision arithmetic;
# reproduced and re-verified by the test suite's independent oracle).
NOISY_MAJORITY_101_ORACLE = 0.423357858080136

_BASE_SEED = 20250810


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: str
    bound: str
    gated: bool = True  # ungated checks are reported but never fail the run

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if not self.gated:
            status = "REPORT"
        return f"[{self.name}] {status}  measured={self.measured}  expected={self.bound}"


# ---------------------------------------------------------------------------
# independent brute-force enumeration (oracle for the lattice evaluators)
# ---------------------------------------------------------------------------


def enumerate_ltf_losses(w: np.ndarray, p: float, eps: float) -> tuple[float, float]:
    """(std, adv) of a threshold classifier by enumerating all 2^n inputs.

    Worst-case loss enumerates every corner perturbation delta in
    {-eps,+eps}^n per input. Exponential; the certifier for small n.
    Comparisons use the same tie quantization as the prediction paths.
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    if n > 20:
        raise ParameterError("enumeration oracle limited to n <= 20")
    patterns = np.arange(1 << n, dtype=np.uint64)
    bits = ((patterns[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & 1)
    z = bits.astype(np.float64) * 2.0 - 1.0  # all agreement-sign vectors
    agree = bits.sum(axis=1)
    # x = y*z, so z_i is the indicator of x_i agreeing with y: the weight
    # P[x | y] = p^{#agree} q^{#disagree} is the same expression for both labels
    prob = p**agree * (1 - p) ** (n - agree)
    corner_scores = (z * eps) @ w  # scores of every corner perturbation

    std = 0.0
    adv = 0.0
    for y in (1, -1):
        scores = (z * y) @ w
        pred = np.where(scores >= -SCORE_TOL, 1, -1)
        std += 0.5 * float(prob[pred != y].sum())
        worst = scores[:, None] + corner_scores[None, :]
        pred_adv = np.where(worst >= -SCORE_TOL, 1, -1)
        vulnerable = np.any(pred_adv != y, axis=1)
        adv += 0.5 * float(prob[vulnerable].sum())
    return std, adv


def _check(name: str, passed: bool, measured: str, bound: str, gated: bool = True) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), measured=measured, bound=bound,
                       gated=gated)


# ---------------------------------------------------------------------------
# suite: thm1
# ---------------------------------------------------------------------------


def suite_thm1(budget: str) -> list[CheckResult]:
    full = budget == "full"
    rng = np.random.default_rng(_BASE_SEED)
    checks: list[CheckResult] = []

    # exact oracles at n=3 against full enumeration
    c3 = majority_classifier(3)
    std3 = exact_std_loss_ltf(c3, 0.51).value
    adv3 = exact_adv_loss_ltf(c3, 0.51, 0.5).value
    bstd, badv = enumerate_ltf_losses(c3.w, 0.51, 0.5)
    ok = abs(std3 - bstd) < 1e-9 and abs(adv3 - badv) < 1e-9
    checks.append(_check("thm1/exact-oracle-agreement", ok,
                         f"std={std3:.9f} adv={adv3:.9f}",
                         f"enumeration std={bstd:.9f} adv={badv:.9f}"))

    # closed-form attack agrees with corner search
    cases = 10_000 if full else 1_500
    mismatches = 0
    for _ in range(cases):
        n = int(rng.integers(1, 13))
        w = rng.integers(-3, 4, size=n).astype(float)
        if not np.any(w):
            w[0] = 1.0
        c = LinearThresholdClassifier(w=w)
        x = rng.choice([-1.0, 1.0], size=n)
        y = int(rng.choice([-1, 1]))
        eps = float(rng.choice([0.1, 0.5, 0.9]))
        a = optimal_ltf_attack(c, x, y, eps)
        b = corner_search_attack(c.predict_batch, x, y, eps, monotone_decision=True)
        mismatches += a.success != b.success
    checks.append(_check("thm1/attack-corner-agreement", mismatches == 0,
                         f"{mismatches} mismatches over {cases} instances", "0 mismatches"))

    # lattice evaluators vs enumeration at random small instances
    n_cases = 40 if full else 15
    worst_gap = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(1, 13 if full else 10))
        w = rng.integers(-3, 4, size=n).astype(float)
        if not np.any(w):
            w[0] = 1.0
        eps = float(rng.choice([0.1, 0.5, 0.9]))
        c = LinearThresholdClassifier(w=w)
        bstd, badv = enumerate_ltf_losses(w, 0.51, eps)
        worst_gap = max(worst_gap,
                        abs(exact_std_loss_ltf(c, 0.51).value - bstd),
                        abs(exact_adv_loss_ltf(c, 0.51, eps).value - badv))
    checks.append(_check("thm1/exact-vs-enumeration", worst_gap < 1e-10,
                         f"max |gap| = {worst_gap:.2e} over {n_cases} instances", "< 1e-10"))

    # property 1: standard loss of the majority vote decays in n
    n_max = 2001 if full else 501
    prev = 1.0
    decay_ok = True
    worst_margin = math.inf
    for n in range(1, n_max + 1, 2):
        loss = exact_std_loss_ltf(majority_classifier(n), 0.51).value
        bound = math.exp(-2.0 * (0.01**2) * n)
        worst_margin = min(worst_margin, bound - loss)
        if loss > bound or loss >= prev:
            decay_ok = False
            break
        prev = loss
    checks.append(_check("thm1/std-decay-odd-n", decay_ok,
                         f"min(bound - loss) = {worst_margin:.3e} up to n={n_max}",
                         "loss <= exp(-2(0.01)^2 n), strictly decreasing"))

    # property 1: Monte Carlo noisy loss matches the convolution oracle
    m = 1_000_000 if full else 200_000
    est = noisy_loss_ltf(majority_classifier(101), 0.51, 0.5, m, RngSeed(_BASE_SEED, 10))
    gap = abs(est.value - NOISY_MAJORITY_101_ORACLE)
    checks.append(_check("thm1/noisy-vs-convolution-oracle", gap <= 3 * est.half_width,
                         f"|{est.value:.6f} - {NOISY_MAJORITY_101_ORACLE:.6f}| = {gap:.2e}",
                         f"<= 3*hw = {3 * est.half_width:.2e}"))

    # property 2: exact adversarial success never beats the concentration bound
    violations = 0
    worst_ratio = 0.0
    for _ in range(200):
        w = rng.integers(0, 9, size=30).astype(float)
        if not np.any(w):
            w[0] = 1.0
        c = LinearThresholdClassifier(w=w)
        for eps in (0.1, 0.5, 0.9):
            success = 1.0 - exact_adv_loss_ltf(c, 0.51, eps).value
            bound = azuma_success_bound(c, 0.51, eps)
            worst_ratio = max(worst_ratio, success / bound if bound > 0 else math.inf)
            violations += success > bound + 1e-12
    checks.append(_check("thm1/azuma-dominates-success", violations == 0,
                         f"{violations} violations, worst success/bound = {worst_ratio:.4f}",
                         "success <= bound for 200 classifiers x 3 eps"))

    # property 3: corner attacks cannot move the rounding classifier off the
    # clean majority vote
    n_top = 12 if full else 9
    worst_gap = 0.0
    for eps in (0.5, 0.99):
        for n in range(1, n_top + 1):
            adv = _rounding_corner_adv_loss(n, 0.51, eps)
            ref = exact_std_loss_ltf(majority_classifier(n), 0.51).value
            worst_gap = max(worst_gap, abs(adv - ref))
    checks.append(_check("thm1/rounding-defeats-corners", worst_gap < 1e-10,
                         f"max |adv - std| = {worst_gap:.2e} up to n={n_top}", "< 1e-10"))
    return checks


def _rounding_corner_adv_loss(n: int, p: float, eps: float) -> float:
    """Exhaustive corner-attack loss of the rounding classifier.

    Enumerates all 2^n clean inputs and all 2^n corner perturbations;
    exact because the rounding classifier's regions are coordinate-monotone
    on each eps-cube face for eps < 1.
    """
    patterns = np.arange(1 << n, dtype=np.uint64)
    bits = ((patterns[:, None] >> np.arange(n, dtype=np.uint64)[None, :]) & 1)
    z = bits.astype(np.float64) * 2.0 - 1.0
    corners = z * eps  # same sign enumeration reused as perturbations
    agree = bits.sum(axis=1)
    prob = p**agree * (1 - p) ** (n - agree)  # P[x|y] for x = y*z, either label
    total = 0.0
    for y in (1, -1):
        x = z * y
        vulnerable = np.empty(x.shape[0], dtype=bool)
        for i in range(x.shape[0]):
            pred = rounding_predict_batch(x[i][None, :] + corners)
            vulnerable[i] = bool(np.any(pred != y))
        total += 0.5 * float(prob[vulnerable].sum())
    return total


# ---------------------------------------------------------------------------
# suite: thm2
# ---------------------------------------------------------------------------


def suite_thm2(budget: str) -> list[CheckResult]:
    full = budget == "full"
    ns = (10, 30, 60) if full else (10, 30)
    eps_grid = (0.05, 0.1, 0.5, 0.9)
    checks: list[CheckResult] = []

    min_slack_valid = math.inf
    min_slack_paper = math.inf
    all_valid = True
    all_paper = True
    where_valid = where_paper = ""
    for n in ns:
        for eps in eps_grid:
            rows = sweep_support(n, eps, 0.51)
            rv = verify_tradeoff(rows, gamma_valid(eps, 0.51))
            rp = verify_tradeoff(rows, gamma_paper(eps))
            if rv.min_slack < min_slack_valid:
                min_slack_valid, where_valid = rv.min_slack, f"n={n} eps={eps} k={rv.worst_row.k}"
            if rp.min_slack < min_slack_paper:
                min_slack_paper, where_paper = rp.min_slack, f"n={n} eps={eps} k={rp.worst_row.k}"
            all_valid &= rv.passed
            all_paper &= rp.passed
    checks.append(_check("thm2/bound-gamma-valid", all_valid,
                         f"min slack {min_slack_valid:.3e} at {where_valid}",
                         ">= -1e-10 on the full grid"))
    outcome = "holds" if all_paper else "violated"
    checks.append(_check("thm2/bound-gamma-paper", all_paper,
                         f"{outcome}; min slack {min_slack_paper:.3e} at {where_paper}",
                         "reported, not gated", gated=False))
    return checks


# ---------------------------------------------------------------------------
# suite: thm3
# ---------------------------------------------------------------------------


def suite_thm3(budget: str) -> list[CheckResult]:
    full = budget == "full"
    checks: list[CheckResult] = []
    seed = RngSeed(_BASE_SEED, 100)

    # property 1: the pair-gap classifier never errs on clean data
    m = 1_000_000 if full else 100_000
    params = C2Params.from_seed(16, 0.1, seed)
    est = monte_carlo_loss(c2_sampler(params), simple_classifier(params.eps), None, m,
                           seed.stream(2))
    checks.append(_check("thm3/simple-std-zero", est.value == 0.0,
                         f"{int(round(est.value * m))} errors over {m} clean samples", "0 errors"))

    # property 1: noisy misclassification rate is 2^-(n+1) and halves with n
    m = 1_000_000 if full else 200_000
    params4 = C2Params.from_seed(4, 0.1, seed)
    est4 = monte_carlo_loss(c2_sampler(params4), simple_classifier(params4.eps),
                            UniformNoisePerturber(eps=params4.eps), m, seed.stream(3))
    gap = abs(est4.value - 0.03125)
    checks.append(_check("thm3/simple-noisy-rate", gap <= 3 * est4.half_width,
                         f"|{est4.value:.6f} - 0.03125| = {gap:.2e}",
                         f"<= 3*hw = {3 * est4.half_width:.2e}"))

    ns = range(2, 11) if full else range(2, 8)
    rates = []
    for n in ns:
        pn = C2Params.from_seed(n, 0.1, seed)
        rates.append(monte_carlo_loss(c2_sampler(pn), simple_classifier(pn.eps),
                                      UniformNoisePerturber(eps=pn.eps), m,
                                      seed.stream(10 + n)).value)
    ratios = [rates[i] / rates[i + 1] for i in range(len(rates) - 1)]
    halving_ok = all(1.6 <= r <= 2.4 for r in ratios)
    checks.append(_check("thm3/simple-noisy-halving", halving_ok,
                         "ratios " + ", ".join(f"{r:.2f}" for r in ratios),
                         "each in [1.6, 2.4] (factor 2 +- 20%)"))

    # property 2 surrogate: the attacked fragile classifier is a coin flip
    m2 = 100_000
    params8 = C2Params.from_seed(8, 0.1, seed)
    est_adv = monte_carlo_loss(c2_sampler(params8), simple_classifier(params8.eps),
                               CanonicalAdversary(eps=params8.eps), m2, seed.stream(4))
    hw = est_adv.half_width
    checks.append(_check("thm3/coin-flip-under-canonical",
                         abs((1.0 - est_adv.value) - 0.5) <= 3 * hw,
                         f"accuracy {1.0 - est_adv.value:.5f}", f"0.5 +- {3 * hw:.5f}"))

    report = alpha_independence_check(params8, m2, seed.stream(5))
    checks.append(_check("thm3/alpha-independence-ks", report.passed,
                         f"max KS {float(report.pair_ks.max()):.5f}, max pair distance "
                         f"{max(report.max_pair_distance_g0, report.max_pair_distance_g1):.2e}",
                         f"KS < {report.critical_value:.5f} (alpha=0.01)"))

    # property 3: decode-and-recompute survives the canonical and random attacks
    n_samples = 10_000 if full else 2_000
    n_random = 100 if full else 20
    errors = _robust_attack_errors(C2Params.from_seed(8, 0.1, seed), n_samples, n_random,
                                   seed.stream(6))
    checks.append(_check("thm3/robust-adv-zero", errors == 0,
                         f"{errors} errors over {n_samples} samples x {n_random + 1} attacks",
                         "0 errors"))

    # marginal uniformity of every coordinate
    m3 = 100_000
    x, _ = sample_c2_batch(C2Params.from_seed(8, 0.1, seed), seed.stream(7), 0, m3)
    stats = [ks_statistic_uniform(x[:, j]) for j in range(x.shape[1])]
    crit = 1.63 / math.sqrt(m3)
    checks.append(_check("thm3/marginal-uniformity", max(stats) < crit,
                         f"max per-coordinate KS {max(stats):.5f} over {x.shape[1]} coords",
                         f"< 1.63/sqrt(m) = {crit:.5f}"))
    return checks


def _robust_attack_errors(params: C2Params, n_samples: int, n_random: int,
                          seed: RngSeed) -> int:
    """Errors of the decode-and-recompute classifier under canonical + random attacks."""
    x, y = sample_c2_batch(params, seed, 0, n_samples)
    oracle = params.oracle
    canonical = CanonicalAdversary(eps=params.eps)
    errors = int(np.count_nonzero(
        robust_classify_batch(x + canonical(seed, 0, n_samples, x, y), oracle) != y))
    noise = UniformNoisePerturber(eps=params.eps)
    for trial in range(n_random):
        delta = noise(seed.stream(100 + trial), 0, n_samples, x, y)
        errors += int(np.count_nonzero(robust_classify_batch(x + delta, oracle) != y))
    return errors


SUITES = {
    "thm1": suite_thm1,
    "thm2": suite_thm2,
    "thm3": suite_thm3,
}


def run_suite(suite: str, budget: str) -> list[CheckResult]:
    if budget not in ("fast", "full"):
        raise ParameterError(f"budget must be fast or full, got {budget!r}")
    if suite == "all":
        out: list[CheckResult] = []
        for fn in SUITES.values():
            out.extend(fn(budget))
        return out
    if suite not in SUITES:
        raise ParameterError(f"unknown suite {suite!r}; choose thm1, thm2, thm3 or all")
    return SUITES[suite](budget)
