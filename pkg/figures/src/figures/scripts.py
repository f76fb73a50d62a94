"""One command per plot kind, each taking --in and --out paths.

Exit codes: 0 rendered, 2 bad input (schema mismatch, unreadable file).
"""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import PlotSpec, render


def _main(kind: str, argv: list[str] | None) -> int:
    parser = argparse.ArgumentParser(prog=f"plot-{kind.replace('_', '-')}")
    parser.add_argument("--in", dest="input_path", required=True,
                        help="preamble+CSV file from the robustlab CLI")
    parser.add_argument("--out", dest="output_path", required=True,
                        help="image path (.png/.svg/.pdf)")
    parser.add_argument("--linear-y", action="store_true",
                        help="linear y axis (decay plots default to log)")
    args = parser.parse_args(argv)
    spec = PlotSpec(input_path=args.input_path, kind=kind,
                    output_path=args.output_path,
                    log_y=False if args.linear_y else None)
    try:
        result = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if result.fitted_slope is not None:
        print(f"wrote {result.output_path} (fitted log-slope {result.fitted_slope:.4f})")
    else:
        print(f"wrote {result.output_path}")
    return 0


def tradeoff_main(argv: list[str] | None = None) -> int:
    return _main("tradeoff", argv)


def decay_c1_main(argv: list[str] | None = None) -> int:
    return _main("decay_c1", argv)


def decay_c2_main(argv: list[str] | None = None) -> int:
    return _main("decay_c2", argv)


if __name__ == "__main__":
    sys.exit(tradeoff_main())
