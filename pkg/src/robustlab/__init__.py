"""robustlab: desk-scale verification of robustness/accuracy tradeoffs.

Two synthetic classification tasks, three loss functionals (standard,
random-noise, adversarial), exact lattice oracles where the math permits,
and Monte Carlo estimation with non-asymptotic confidence intervals
everywhere else.
"""

__version__ = "0.1.0"

from .core import (
    LabeledExample,
    LossEstimate,
    PerturbationBudget,
    RngSeed,
    circular_distance,
    hoeffding_half_width,
    monte_carlo_loss,
)

__all__ = [
    "LabeledExample",
    "LossEstimate",
    "PerturbationBudget",
    "RngSeed",
    "__version__",
    "circular_distance",
    "hoeffding_half_width",
    "monte_carlo_loss",
]
