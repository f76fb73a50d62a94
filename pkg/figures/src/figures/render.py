"""The three canonical plots, rendered purely from file contents.

Same input file, same plotted data and same output bytes: figure metadata
that would embed a timestamp is stripped, and the SVG id salt is pinned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "robustlab-figures"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .io import SchemaError, Table, read_table

__all__ = ["PlotSpec", "RenderResult", "render"]

_KINDS = ("tradeoff", "decay_c1", "decay_c2")


@dataclass(frozen=True)
class PlotSpec:
    """What to plot: input table, plot kind, output image, scale options."""

    input_path: str
    kind: str  # tradeoff | decay_c1 | decay_c2
    output_path: str
    log_y: bool | None = None  # default: linear for tradeoff, log for decay

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}; choose one of {_KINDS}")


@dataclass(frozen=True)
class RenderResult:
    """The data actually drawn, for purity checks and tests."""

    series: dict = field(repr=False)
    legend: tuple[str, ...]
    fitted_slope: float | None  # per-step log slope (decay plots only)
    output_path: str


def _check_construction(table: Table, expected: str, kind: str) -> None:
    construction = table.preamble.get("construction")
    if construction != expected:
        raise SchemaError(f"{kind} plot needs a construction={expected} input, "
                          f"preamble says construction={construction!r}")


def _save(fig, path: str) -> None:
    suffix = Path(path).suffix.lower()
    # strip timestamp-bearing metadata so identical inputs give identical bytes
    metadata = {}
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".pdf":
        metadata = {"CreationDate": None}
    fig.savefig(path, metadata=metadata or None)
    plt.close(fig)


def _render_tradeoff(spec: PlotSpec, table: Table) -> RenderResult:
    k = table.column("k")
    std = table.column("std_loss")
    adv = table.column("adv_loss")
    gamma = table.column("gamma_valid")
    bound = 1.0 - std**gamma

    legend = ("standard loss", "adversarial loss", "bound 1 - std^gamma")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(k, std, "o-", ms=3, label=legend[0])
    ax.plot(k, adv, "s-", ms=3, label=legend[1])
    ax.plot(k, bound, "--", label=legend[2])
    ax.set_xlabel("support size k")
    ax.set_ylabel("loss")
    eps = table.preamble.get("eps")
    ax.set_title(f"tradeoff frontier (n={table.preamble.get('n')}, eps={eps})")
    if spec.log_y:
        ax.set_yscale("log")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, spec.output_path)
    return RenderResult(series={"k": k, "std_loss": std, "adv_loss": adv, "bound": bound},
                        legend=legend, fitted_slope=None, output_path=spec.output_path)


def _render_decay(spec: PlotSpec, table: Table, construction: str) -> RenderResult:
    n = table.column("n")
    value = table.column("value")
    positive = value > 0
    if np.count_nonzero(positive) < 2:
        raise SchemaError("decay fit needs at least two positive loss values")
    slope = float(np.polyfit(n[positive], np.log(value[positive]), 1)[0])

    label = "loss"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(n, np.where(positive, value, np.nan), "o-", ms=3, label=label)
    if spec.log_y is None or spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("dimension n")
    ax.set_ylabel("loss")
    ax.set_title(f"{spec.kind}: loss decay ({table.preamble.get('loss', '')})")
    ax.annotate(f"fitted log-slope {slope:.4f} per step",
                xy=(0.98, 0.95), xycoords="axes fraction", ha="right", va="top")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, spec.output_path)
    return RenderResult(series={"n": n, "value": value}, legend=(label,),
                        fitted_slope=slope, output_path=spec.output_path)


def render(spec: PlotSpec) -> RenderResult:
    """Read the input table, draw the requested plot, write the image."""
    table = read_table(spec.input_path)
    if spec.kind == "tradeoff":
        _check_construction(table, "c1", "tradeoff")
        for name in ("k", "std_loss", "adv_loss", "gamma_valid"):
            table.column(name)
        return _render_tradeoff(spec, table)
    construction = "c1" if spec.kind == "decay_c1" else "c2"
    _check_construction(table, construction, spec.kind)
    for name in ("n", "value"):
        table.column(name)
    return _render_decay(spec, table, construction)
