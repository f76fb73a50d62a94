"""Independent reference computations used to freeze expected test values.

Nothing here imports the package's evaluators: losses come from direct
enumeration over inputs and corner perturbations, and the noisy-loss
reference comes from exact high-precision convolution. These are the
oracles the production code paths are checked against.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np
from mpmath import binomial as mp_binomial
from mpmath import factorial as mp_factorial
from mpmath import floor as mp_floor
from mpmath import mp, mpf

# Tie convention under test: decision scores within this tolerance of the
# threshold count as on it, and a zero score predicts +1.
TIE_TOL = 1e-9


def ltf_predict_ref(w, x) -> int:
    s = sum(wi * xi for wi, xi in zip(w, x))
    return 1 if s >= -TIE_TOL else -1


def enumerate_ltf_std_loss(w, p: float) -> float:
    """Standard loss by enumerating every input of each label class."""
    n = len(w)
    total = 0.0
    for y in (1, -1):
        for signs in product((1, -1), repeat=n):
            x = [y * s for s in signs]  # s_i = 1 iff x_i agrees with y
            prob = math.prod(p if s == 1 else 1 - p for s in signs)
            if ltf_predict_ref(w, x) != y:
                total += 0.5 * prob
    return total


def enumerate_ltf_adv_loss(w, p: float, eps: float) -> float:
    """Worst-case loss by enumerating all inputs x all corner perturbations."""
    n = len(w)
    corners = list(product((-eps, eps), repeat=n))
    total = 0.0
    for y in (1, -1):
        for signs in product((1, -1), repeat=n):
            x = [y * s for s in signs]
            prob = math.prod(p if s == 1 else 1 - p for s in signs)
            hit = any(
                ltf_predict_ref(w, [xi + di for xi, di in zip(x, d)]) != y
                for d in corners
            )
            if hit:
                total += 0.5 * prob
    return total


def rounding_predict_ref(x) -> int:
    if any(v == 0 for v in x):
        raise ValueError("boundary")
    s = sum(1 if v > 0 else -1 for v in x)
    return 1 if s >= 0 else -1


def enumerate_rounding_adv_loss(n: int, p: float, eps: float) -> float:
    """Corner-attack loss of the rounding classifier, fully enumerated.

    Vectorized: for each clean input, evaluate the rounding majority over
    every corner perturbation and check whether any corner flips the label.
    """
    patterns = np.array(list(product((1.0, -1.0), repeat=n)))
    corners = patterns * eps
    # rounded majority of x + corner, for all (input, corner) pairs
    total = 0.0
    for y in (1, -1):
        for signs in patterns:
            x = y * signs
            prob = math.prod(p if s == 1 else 1 - p for s in signs)
            perturbed = x[None, :] + corners
            if np.any(perturbed == 0.0):
                raise ValueError("boundary hit; eps must be < 1")
            votes = np.where(perturbed > 0, 1, -1).sum(axis=1)
            preds = np.where(votes >= 0, 1, -1)
            if np.any(preds != y):
                total += 0.5 * prob
    return total


# ---------------------------------------------------------------------------
# exact convolution reference for the noisy loss of the majority vote
# ---------------------------------------------------------------------------


def irwin_hall_cdf(x, n: int):
    """CDF of a sum of n independent Uniform[0,1], in arbitrary precision."""
    x = mpf(x)
    if x <= 0:
        return mpf(0)
    if x >= n:
        return mpf(1)
    s = mpf(0)
    for k in range(int(mp_floor(x)) + 1):
        s += (-1) ** k * mp_binomial(n, k) * (x - k) ** n
    return s / mp_factorial(n)


def noisy_majority_loss_oracle(n: int, p: float, eps: float, dps: int = 80) -> float:
    """Exact noisy loss of the n-coordinate majority vote.

    The decision score given the label is S + T with S the (2*Bin(n,p) - n)
    agreement sum and T an independent sum of n Uniform[-eps, eps]. The loss
    is E_S[P(T < -S)], evaluated with the Irwin-Hall CDF in high precision
    (the alternating series is hopeless in float64 for n ~ 100).
    """
    old = mp.dps
    mp.dps = dps
    try:
        pp = mpf(p)
        e = mpf(eps)
        total = mpf(0)
        for h in range(n + 1):
            s = 2 * h - n
            prob = mp_binomial(n, h) * pp**h * (1 - pp) ** (n - h)
            # T <= t  <=>  IrwinHall(n) <= (t/eps + n) / 2
            arg = ((-mpf(s)) / e + n) / 2
            total += prob * irwin_hall_cdf(arg, n)
        return float(total)
    finally:
        mp.dps = old


# Frozen outputs of the reference computations above (regression anchors;
# the tests recompute and compare against these before using them).
NOISY_MAJORITY_101_EPS05_P051 = 0.423357858080136
STD_MAJORITY_3_P051 = 0.485002
ADV_MAJORITY_3_EPS05_P051 = 0.867349
