"""Command-line entry point: sample, eval, tradeoff, verify.

Every output file starts with a one-line JSON preamble recording the full
configuration and artifact version, so any file can be regenerated
bit-identically from its own header. Worker count is deliberately absent
from the preamble: results never depend on it.

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 I/O error.

Dataset line format (format=csv):
  c1:  x_1,...,x_n,y                 (reals at 17 significant digits; y: +-1)
  c2:  z_hex,x_1,...,x_4n,y          (z packed big-endian, bit 0 = MSB; y: 0/1)
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .attacks import UniformNoisePerturber, ZeroAdversary, adversarial_loss
from .construction1 import (
    C1Params,
    LinearThresholdClassifier,
    OptimalLtfAdversary,
    c1_sampler,
    exact_adv_loss_ltf,
    exact_std_loss_ltf,
    majority_classifier,
    noisy_loss_ltf,
    rounding_predict_batch,
    sample_c1_batch,
)
from .construction2 import (
    C2Params,
    CanonicalAdversary,
    c2_sampler,
    robust_classify_batch,
    sample_c2_batch_full,
    simple_classify_batch,
)
from .core import (
    HypothesisError,
    LossEstimate,
    ParameterError,
    RngSeed,
    monte_carlo_loss,
)
from .tradeoff import gamma_valid, rows_to_csv, sweep_support, verify_tradeoff
from .verify import run_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_IO = 4

_FMT = "{:.17g}"


class UsageError(Exception):
    pass


def _preamble(command: str, **fields) -> str:
    doc = {"artifact": "robustlab", "version": __version__, "command": command}
    doc.update(fields)
    return json.dumps(doc, sort_keys=True)


def _parse_n_spec(spec: str) -> list[int]:
    """Either a single n or an inclusive range "start:stop[:step]"."""
    if ":" not in spec:
        return [int(spec)]
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"bad n range {spec!r}; use start:stop[:step]")
    start, stop = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if step < 1 or stop < start:
        raise UsageError(f"bad n range {spec!r}")
    return list(range(start, stop + 1, step))


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def cmd_sample(args: argparse.Namespace) -> int:
    seed = RngSeed(args.seed, args.stream)
    m = args.samples
    if m < 1:
        raise UsageError("--samples must be >= 1")

    lines: list[str] = []
    if args.construction == "c1":
        params = C1Params(n=args.n, p=args.p)
        x, y = sample_c1_batch(params, seed, 0, m)
        lines.append(_preamble("sample", construction="c1", n=args.n, p=args.p,
                               seed=args.seed, stream=args.stream, samples=m,
                               format=args.format,
                               fields=["x*%d" % args.n, "y"]))
        z_hex = None
    else:
        params = C2Params.from_seed(args.n, args.eps, seed)
        x, y, z = sample_c2_batch_full(params, seed.stream(1), 0, m)
        packed = np.packbits(z.astype(np.uint8), axis=1)
        z_hex = [row.tobytes().hex() for row in packed]
        lines.append(_preamble("sample", construction="c2", n=args.n, eps=args.eps,
                               seed=args.seed, stream=args.stream, samples=m,
                               format=args.format, oracle_key=params.oracle_key.hex(),
                               fields=["z_hex", "x*%d" % (4 * args.n), "y"]))

    for i in range(m):
        coords = [_FMT.format(v) for v in x[i]]
        if args.format == "csv":
            row = ([z_hex[i]] if z_hex is not None else []) + coords + [str(int(y[i]))]
            lines.append(",".join(row))
        else:
            doc = {"x": [float(v) for v in x[i]], "y": int(y[i])}
            if z_hex is not None:
                doc["z"] = z_hex[i]
            lines.append(json.dumps(doc, sort_keys=True))

    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _c1_classifier(spec: str, n: int):
    if spec == "majority":
        c = majority_classifier(n)
        return c.predict_batch, c
    if spec == "rounding":
        return rounding_predict_batch, None
    if spec.startswith("ltf:"):
        w = np.array([float(t) for t in spec[4:].split(",")])
        if w.size != n:
            raise UsageError(f"ltf weight count {w.size} != n = {n}")
        c = LinearThresholdClassifier(w=w)
        return c.predict_batch, c
    raise UsageError(f"classifier {spec!r} not valid for construction c1")


def _eval_one(args, n: int) -> dict:
    seed = RngSeed(args.seed, args.stream)
    conf = args.confidence
    m = args.samples
    loss_kind, _, adv_name = args.loss.partition(":")

    if args.construction == "c1":
        params = C1Params(n=n, p=args.p)
        predict, ltf = _c1_classifier(args.classifier, n)
        exact_ok = ltf is not None and ltf.integer_weights
        if loss_kind == "std":
            if exact_ok:
                return _estimate_doc(exact_std_loss_ltf(ltf, args.p), conf, True)
            est = monte_carlo_loss(c1_sampler(params), predict, None, m, seed, conf,
                                   workers=args.workers)
            return _estimate_doc(est, conf, False)
        if loss_kind == "noisy":
            if ltf is not None:
                est = noisy_loss_ltf(ltf, args.p, args.eps, m, seed, conf,
                                     workers=args.workers)
            else:
                est = monte_carlo_loss(c1_sampler(params), predict,
                                       UniformNoisePerturber(eps=args.eps), m, seed, conf,
                                       workers=args.workers)
            return _estimate_doc(est, conf, False)
        if loss_kind == "adv":
            if adv_name == "optimal":
                if exact_ok:
                    return _estimate_doc(exact_adv_loss_ltf(ltf, args.p, args.eps), conf, True)
                # the majority-weights attack pattern, applied to any c1 classifier;
                # against non-threshold classifiers this is an honest lower bound
                attack_w = ltf if ltf is not None else majority_classifier(n)
                adv = OptimalLtfAdversary(classifier=attack_w, eps=args.eps,
                                          optimal=ltf is not None)
            elif adv_name == "none":
                adv = ZeroAdversary()
            else:
                raise UsageError(f"adversary {adv_name!r} not valid for c1 (optimal|none)")
            res = adversarial_loss(predict, c1_sampler(params), adv, m, seed, conf,
                                   workers=args.workers)
            return _estimate_doc(res.estimate, conf, False, guarantee=res.guarantee)
        raise UsageError(f"unknown loss {args.loss!r}")

    # construction c2
    params = C2Params.from_seed(n, args.eps, seed)
    if args.classifier == "c2-simple":
        predict = lambda x: simple_classify_batch(x, params.eps)  # noqa: E731
    elif args.classifier == "c2-robust":
        predict = lambda x: robust_classify_batch(x, params.oracle)  # noqa: E731
    else:
        raise UsageError(f"classifier {args.classifier!r} not valid for construction c2")
    sampler = c2_sampler(params)
    data_seed = seed.stream(1)
    if loss_kind == "std":
        est = monte_carlo_loss(sampler, predict, None, m, data_seed, conf,
                               workers=args.workers)
        return _estimate_doc(est, conf, False)
    if loss_kind == "noisy":
        est = monte_carlo_loss(sampler, predict, UniformNoisePerturber(eps=params.eps),
                               m, data_seed, conf, workers=args.workers)
        return _estimate_doc(est, conf, False)
    if loss_kind == "adv":
        if adv_name == "canonical":
            adv = CanonicalAdversary(eps=params.eps)
        elif adv_name == "none":
            adv = ZeroAdversary()
        else:
            raise UsageError(f"adversary {adv_name!r} not valid for c2 (canonical|none)")
        res = adversarial_loss(predict, sampler, adv, m, data_seed, conf,
                               workers=args.workers)
        return _estimate_doc(res.estimate, conf, False, guarantee=res.guarantee)
    raise UsageError(f"unknown loss {args.loss!r}")


def _estimate_doc(est: LossEstimate, confidence: float, exact_available: bool,
                  guarantee: str | None = None) -> dict:
    doc = {
        "value": est.value,
        "method": est.method,
        "samples": est.samples,
        "half_width": est.half_width,
        "confidence": est.confidence if est.method == "monte-carlo" else confidence,
        "exact_available": exact_available,
    }
    if guarantee is not None:
        doc["guarantee"] = guarantee
    return doc


def cmd_eval(args: argparse.Namespace) -> int:
    ns = _parse_n_spec(args.n)
    if len(ns) == 1 and args.out is None:
        doc = _eval_one(args, ns[0])
        print(json.dumps(doc, sort_keys=True))
        return EXIT_OK

    # batch mode: one row per n, CSV with preamble (input for the decay plots)
    lines = [_preamble("eval", construction=args.construction, classifier=args.classifier,
                       loss=args.loss, n=args.n, eps=args.eps, p=args.p, seed=args.seed,
                       stream=args.stream, samples=args.samples,
                       confidence=args.confidence),
             "n,eps,p,value,method,samples,half_width,confidence"]
    for n in ns:
        doc = _eval_one(args, n)
        lines.append(",".join([
            str(n), _FMT.format(args.eps), _FMT.format(args.p),
            _FMT.format(doc["value"]), doc["method"], str(doc["samples"]),
            _FMT.format(doc["half_width"]), _FMT.format(doc["confidence"]),
        ]))
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write_text(args.out, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# tradeoff
# ---------------------------------------------------------------------------


def cmd_tradeoff(args: argparse.Namespace) -> int:
    if args.construction != "c1":
        raise UsageError("the tradeoff sweep is defined for construction c1 only")
    rows = sweep_support(args.n, args.eps, args.p)
    text = (_preamble("tradeoff", construction="c1", n=args.n, eps=args.eps, p=args.p)
            + "\n" + rows_to_csv(rows))
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write_text(args.out, text)
    report = verify_tradeoff(rows, gamma_valid(args.eps, args.p))
    print(report.describe(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(args.suite, args.budget)
    failed = [r for r in results if r.gated and not r.passed]
    for r in results:
        print(r.line())
    if failed:
        print(f"{len(failed)} gated check(s) failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustlab",
        description="samplers, loss evaluators, attacks and theorem-verification suites",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p: argparse.ArgumentParser, *, needs_out: bool) -> None:
        p.add_argument("--construction", choices=("c1", "c2"), default="c1")
        p.add_argument("--n", default="3", help="dimension, or start:stop[:step] for batch eval")
        p.add_argument("--eps", type=float, default=0.5, help="l-inf budget")
        p.add_argument("--p", type=float, default=0.51, help="c1 agreement probability")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--stream", type=int, default=0, help="random stream id")
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--confidence", type=float, default=0.99)
        p.add_argument("--workers", type=int, default=1)
        if needs_out:
            p.add_argument("--out", required=True, help="output path")
        else:
            p.add_argument("--out", default=None, help="output path (stdout if omitted)")

    p_sample = sub.add_parser("sample", help="write a dataset file")
    common(p_sample, needs_out=True)
    p_sample.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sample.set_defaults(fn=cmd_sample)

    p_eval = sub.add_parser("eval", help="evaluate a loss functional")
    common(p_eval, needs_out=False)
    p_eval.add_argument("--classifier", required=True,
                        help="majority | ltf:<w1,w2,...> | rounding | c2-simple | c2-robust")
    p_eval.add_argument("--loss", required=True,
                        help="std | noisy | adv:optimal | adv:canonical | adv:none")
    p_eval.set_defaults(fn=cmd_eval)

    p_trade = sub.add_parser("tradeoff", help="exact support-size sweep (CSV)")
    common(p_trade, needs_out=False)
    p_trade.set_defaults(fn=cmd_tradeoff)

    p_verify = sub.add_parser("verify", help="run a theorem-verification suite")
    p_verify.add_argument("--suite", choices=("thm1", "thm2", "thm3", "all"), required=True)
    p_verify.add_argument("--budget", choices=("fast", "full"), default="fast")
    p_verify.set_defaults(fn=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd in ("sample", "tradeoff"):
            ns = _parse_n_spec(args.n)
            if len(ns) != 1:
                raise UsageError(f"{args.cmd} takes a single --n, got range {args.n!r}")
            args.n = ns[0]
        return args.fn(args)
    except (UsageError, ParameterError, HypothesisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
