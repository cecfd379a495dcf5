"""Command line entry point: ``anticonc <subcommand> [flags]``.

Exit codes: 0 success, 1 input or validation error, 2 bound violation found
(search, audit, simulate), 3 convolution budget exceeded. Errors are written to
stderr as a JSON object with a machine-readable ``error`` code.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds, extremal, montecarlo, search, transform
from .convolve import ConvolutionBudget, convolve_all, sum_tail_below
from .dist import EXACT, FLOAT, fmt_rational, mean, parse_distributions, tail_below, to_rational
from .errors import AnticoncError, InvalidInput

log = logging.getLogger("anticonc")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_BUDGET = 3

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInput(f"{self.prog}: {message}")


def _rational(text):
    try:
        return to_rational(text)
    except AnticoncError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text):
    return [_rational(x) for x in text.replace(" ", "").split(",") if x]


def _load_json(source):
    """``source`` is a path, ``-`` for stdin, or inline JSON."""
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith(("{", "[")):
        text = source
    else:
        path = Path(source)
        if not path.is_file():
            raise InvalidInput(f"input {source!r} is neither inline JSON nor a readable file")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON input: {exc}") from None


def _q(x):
    return {"exact": fmt_rational(x), "decimal": float(x)}


def _floatify(obj):
    if isinstance(obj, dict):
        return {k: _floatify(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_floatify(v) for v in obj]
    if isinstance(obj, str) and _RATIONAL_RE.match(obj):
        return float(Fraction(obj))
    return obj


def _flatten(obj, prefix=""):
    row = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            row.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            row[key] = json.dumps(v, separators=(",", ":"))
        elif isinstance(v, float):
            row[key] = repr(v)
        elif v is None:
            row[key] = ""
        else:
            row[key] = str(v)
    return row


def _render(report, fmt, mode, csv_rows=None):
    if mode == FLOAT:
        report = _floatify(report)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    rows = csv_rows if csv_rows is not None else [_flatten(report)]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _budget(args):
    if args.max_atoms is not None:
        return ConvolutionBudget(args.max_atoms)
    return ConvolutionBudget.from_env()


# -- subcommands --------------------------------------------------------------

def cmd_bound(args):
    report = bounds.feige_bound(args.delta).to_json()
    if args.mu is not None:
        report["single_bound"] = _q(bounds.single_bound(args.mu, args.delta))
    report["reference_constants"] = bounds.reference_constants()
    return report, EXIT_OK


def cmd_reduce(args):
    ds = parse_distributions(_load_json(args.input))
    if len(ds) != 1:
        raise InvalidInput("reduce takes exactly one distribution")
    d = ds[0]
    tp = transform.reduce(d, args.delta, args.alpha if args.alpha is not None else 0)
    mu = mean(d)
    t = mu + args.delta
    out = tp.to_json()
    out.update(mean=_q(mu), threshold=_q(t), tail_below=_q(tail_below(d, t)),
               reduced_mean=_q(tp.mean()), reduced_tail_below=_q(tp.tail_below(t)))
    return out, EXIT_OK


def cmd_convolve(args):
    ds = parse_distributions(_load_json(args.input))
    budget = _budget(args)
    if args.t is not None:
        tail = sum_tail_below(ds, args.t, budget)
        return {"t": fmt_rational(args.t), "tail_below": _q(tail), "summands": len(ds)}, EXIT_OK
    total = convolve_all(ds, budget)
    return {"distribution": total.to_json(), "mean": _q(mean(total)), "atoms": len(total)}, EXIT_OK


def _feige_report(args):
    if args.n is None or args.delta is None:
        raise InvalidInput("feige family needs --n and --delta")
    fam = extremal.feige_extremal(args.n, args.delta)
    closed = extremal.feige_extremal_tail(args.n, args.delta)
    out = {
        "family": "feige",
        "n": fam.n,
        "delta": fmt_rational(fam.delta),
        "threshold": fmt_rational(fam.threshold),
        "component": fam.component.to_json(),
        "closed_form": _q(closed),
    }
    if args.check:
        conv = sum_tail_below(fam.distributions(), fam.threshold, _budget(args))
        out["convolution"] = _q(conv)
        out["verdict"] = "match" if conv == closed else "mismatch"
    return out


def _samuels_report(args):
    if args.means is None or args.lam is None:
        raise InvalidInput("samuels family needs --means and --lambda")
    mus, lam = args.means, args.lam
    if args.i is not None:
        i = args.i
        prob = extremal.samuels_probability(mus, lam, i)
        out = {"family": "samuels", "i": i, "probability": _q(prob)}
    else:
        best = extremal.samuels_min(mus, lam)
        i, prob = best.index, best.probability
        out = {"family": "samuels", "i": i, "probability": _q(prob),
               "minimizers": list(best.minimizers)}
    fam = extremal.samuels_family(mus, lam, i)
    out.update(means=[fmt_rational(m) for m in mus], **{"lambda": fmt_rational(lam)},
               upper_atom=fmt_rational(lam - sum(mus[i:])),
               distributions=[d.to_json() for d in fam])
    if args.check:
        conv = sum_tail_below(fam, lam, _budget(args))
        out["convolution"] = _q(conv)
        out["verdict"] = "match" if conv == prob else "mismatch"
    return out


def cmd_extremal(args):
    if args.family == "feige":
        return _feige_report(args), EXIT_OK
    return _samuels_report(args), EXIT_OK


def cmd_samuels(args):
    return _samuels_report(args), EXIT_OK


def _search_config(args):
    fields = {}
    if args.config is not None:
        fields = _load_json(args.config)
        if not isinstance(fields, dict):
            raise InvalidInput("search config must be a JSON object")
    n = args.n if args.n is not None else fields.get("n")
    delta = args.delta if args.delta is not None else fields.get("delta")
    if n is None or delta is None:
        raise InvalidInput("search needs --n and --delta (or a config file)")
    delta = to_rational(delta)
    means = args.means if args.means is not None else fields.get("means", [1] * int(n))
    step = args.grid_step if args.grid_step is not None else fields.get("grid_step")
    if step is None:
        raise InvalidInput("search needs --grid-step")
    grid_max = args.grid_max if args.grid_max is not None else fields.get("grid_max")
    if grid_max is None:
        grid_max = int(n) + delta + 1
    return search.SearchConfig(
        n=int(n),
        means=tuple(to_rational(m) for m in means),
        delta=delta,
        grid_step=to_rational(step),
        grid_max=to_rational(grid_max),
        max_rounds=args.rounds if args.rounds is not None else int(fields.get("max_rounds", 50)),
        tol=float(fields.get("tol", 1e-12)),
        seed=args.seed if args.seed is not None else int(fields.get("seed", 0)),
        starts=args.starts if args.starts is not None else int(fields.get("starts", 8)),
    )


def cmd_search(args):
    config = _search_config(args)
    res = search.min_tail_search(config, _budget(args))
    out = res.to_json()
    holds = bounds.exceeds_feige_bound(res.objective, config.delta)
    out["verdict"] = "pass" if holds else "violation"
    return out, EXIT_OK if holds else EXIT_VIOLATION


def cmd_audit(args):
    lo = args.delta_min if args.delta_min is not None else Fraction(1, 20)
    hi = args.delta_max if args.delta_max is not None else Fraction(3)
    report = search.random_instance_audit(
        args.trials, args.n if args.n is not None else 5, (lo, hi),
        seed=args.seed if args.seed is not None else 0, budget=_budget(args),
    )
    return report.to_json(), EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_simulate(args):
    if args.input is not None:
        scenario = montecarlo.Scenario.from_json(_load_json(args.input))
        overrides = {}
        if args.samples is not None:
            overrides["samples"] = args.samples
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.delta is not None:
            overrides["delta"] = float(args.delta)
        if overrides:
            scenario = montecarlo.Scenario(**{**scenario.__dict__, **overrides})
    else:
        if args.n is None or args.delta is None:
            raise InvalidInput("simulate needs --input or --n and --delta")
        scenario = montecarlo.Scenario(
            (montecarlo.ContinuousModel.exponential(1.0),) * args.n, float(args.delta),
            args.samples if args.samples is not None else 1_000_000,
            args.seed if args.seed is not None else 0,
        )
    report = montecarlo.portfolio_sim(scenario, args.threads)
    out = report.to_json()
    out["models"] = [m.to_json() for m in scenario.models]
    code = EXIT_OK if report.verdict == "pass" else EXIT_VIOLATION
    return out, code, [report.csv_row()]


def cmd_regime(args):
    n_max = args.n if args.n is not None else 1000
    regime = bounds.sequence_regime(args.delta, n_max)
    out = regime.to_json()
    out.update(delta=fmt_rational(args.delta), n_max=n_max,
               first=_q(bounds.extremal_sequence(1, args.delta)),
               last_decimal=float(bounds.extremal_sequence(n_max, args.delta)),
               limit=bounds.EXP_NEG1)
    return out, EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--mode", choices=(EXACT, FLOAT), default=EXACT,
                        help="exact: rationals plus decimals; float: decimals only")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--max-atoms", type=int)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="anticonc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", parents=[common], help="evaluate min(delta/(1+delta), 1/e)")
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--mu", type=_rational)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("reduce", parents=[common], help="two-point reduction of a distribution")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--alpha", type=_rational)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("convolve", parents=[common], help="exact law or strict tail of a sum")
    p.add_argument("--input", required=True)
    p.add_argument("--t", type=_rational)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("extremal", parents=[common], help="Feige or Samuels extremal families")
    p.add_argument("--family", choices=("feige", "samuels"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--means", type=_rational_list)
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.add_argument("--i", type=int)
    p.add_argument("--check", action="store_true", help="cross-check against exact convolution")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("samuels", parents=[common], help="Samuels configuration and its minimum")
    p.add_argument("--means", type=_rational_list, required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_samuels)

    p = sub.add_parser("search", parents=[common], help="best-response search for the minimal tail")
    p.add_argument("--config")
    p.add_argument("--n", type=int)
    p.add_argument("--means", type=_rational_list)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--grid-step", type=_rational)
    p.add_argument("--grid-max", type=_rational)
    p.add_argument("--rounds", type=int)
    p.add_argument("--starts", type=int)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("audit", parents=[common], help="random exact instances against the bound")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--n", type=int, help="largest number of summands")
    p.add_argument("--delta-min", type=_rational)
    p.add_argument("--delta-max", type=_rational)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo portfolio scenario")
    p.add_argument("--input")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=_rational)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("regime", parents=[common], help="monotonicity of the extremal sequence")
    p.add_argument("--delta", type=_rational, required=True)
    p.add_argument("--n", type=int, help="largest n (default 1000)")
    p.set_defaults(func=cmd_regime)
    return parser


def _emit_error(exc):
    sys.stderr.write(json.dumps(exc.to_dict()) + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except AnticoncError as exc:
        _emit_error(exc)
        return EXIT_INPUT
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except AnticoncError as exc:
        _emit_error(exc)
        return exc.exit_code
    report, code = result[0], result[1]
    csv_rows = result[2] if len(result) > 2 else None
    text = _render(report, args.format, args.mode, csv_rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    log.info("%s finished with exit code %d", args.command, code)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
