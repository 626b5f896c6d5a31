"""Command-line entry point: ``rfcw <subcommand> [options]``.

Exit codes: 0 on success, 2 on argument or precondition errors, 3 on
numerical failures.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .experiments import (
    CONVERGENCE_COLUMNS,
    ExperimentConfig,
    chaos_convergence_scan,
    clt_diagnostic,
    j_index_statistics,
    report_json,
    rows_to_csv,
)
from .landscape import NumericalError, find_global_maxima
from .marginals import exact_sample, marginal_quadrature, predicted_product, select_j_index
from .model import FieldSpec, ModelParams, dichotomous, sample_field, spin_words
from .phase import critical_line

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def parse_field(text: str) -> FieldSpec:
    """``dichotomous:<h>`` or ``discrete:<v:p,v:p,...>``."""
    kind, _, rest = text.partition(":")
    if kind == "dichotomous":
        return dichotomous(float(rest))
    if kind == "discrete":
        pairs = [item.rsplit(":", 1) for item in rest.split(",") if item]
        if not pairs or any(len(p) != 2 for p in pairs):
            raise ValueError(f"malformed discrete field {text!r}")
        return FieldSpec([float(v) for v, _ in pairs], [float(p) for _, p in pairs], name=text)
    raise ValueError(f"unknown field law {text!r}; use dichotomous:<h> or discrete:<v:p,...>")


def _field_arg(text):
    try:
        return parse_field(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--beta", type=float, default=1.0, help="inverse temperature")
    common.add_argument("--field", type=_field_arg, default=dichotomous(0.0),
                        help="dichotomous:<h> or discrete:<v:p,...> (default dichotomous:0)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="rfcw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    sub.add_parser("landscape", parents=[common], help="global maxima of G")

    p = sub.add_parser("phase-diagram", parents=[common], help="critical line for the dichotomous field")
    p.add_argument("--h-max", type=float, default=0.49)
    p.add_argument("--steps", type=int, default=50)

    p = sub.add_parser("marginal", parents=[common], help="mu_{N,k} next to the predicted product measure")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)

    for name, helptext in (("chaos-scan", "KL/TV convergence at a unique maximum"),
                           ("jindex-stats", "J-index selection with several maxima")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--n-grid", type=_int_list, required=True, help="comma-separated N values")
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--k-alpha", type=float, default=None, help="use k(N) = ceil(N^alpha)")
        p.add_argument("--replicas", type=int, default=1)

    p = sub.add_parser("clt", parents=[common], help="variance of sqrt(N) Delta_N(y0)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--replicas", type=int, default=1000)
    p.add_argument("--y0", type=float, default=None, help="default: largest global maximizer")

    p = sub.add_parser("sample", parents=[common], help="exact Gibbs samples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10)
    return parser


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _table(kind, args, config, columns, records, extra=None):
    if args.format == "json":
        return report_json(kind, config, records, extra)
    return rows_to_csv(records, columns, schema=f"# rfcw {kind} v1")


def _base_config(args) -> dict:
    return {"command": args.command, "beta": args.beta, "field": args.field.name, "seed": args.seed}


def cmd_landscape(args) -> str:
    report = find_global_maxima(args.field, args.beta)
    cols = ("location", "value", "degeneracy_n", "leading_derivative", "curvature_eta")
    records = [{c: getattr(m, c) for c in cols} for m in report.maxima]
    return _table("landscape", args, _base_config(args), cols, records,
                  {"tail_radius": report.tail_radius})


def cmd_phase_diagram(args) -> str:
    points = critical_line(args.h_max, args.steps)
    cols = ("h", "beta_crit", "order")
    records = [{"h": p.h_field, "beta_crit": p.beta_crit, "order": p.order} for p in points]
    config = {"command": args.command, "h_max": args.h_max, "steps": args.steps}
    return _table("phase-diagram", args, config, cols, records)


def cmd_marginal(args) -> str:
    h = sample_field(args.field, args.n, args.seed)
    mu = marginal_quadrature(ModelParams(args.beta, args.n), h, args.k)
    report = find_global_maxima(args.field, args.beta)
    j = select_j_index(h, args.field, args.beta, report)
    rho = predicted_product(args.beta, report, j, h.values[:args.k])
    words = ["".join("+" if s > 0 else "-" for s in w) for w in spin_words(args.k)]
    cols = ("word", "mu", "rho")
    records = [{"word": w, "mu": float(m), "rho": float(r)} for w, m, r in zip(words, mu.probs, rho.probs)]
    config = _base_config(args) | {"n": args.n, "k": args.k, "j_index": j}
    return _table("marginal", args, config, cols, records)


def _experiment(args) -> ExperimentConfig:
    return ExperimentConfig(args.field, args.beta, tuple(args.n_grid), k=args.k, k_alpha=args.k_alpha,
                            replicas=args.replicas, base_seed=args.seed, output_path=args.out)


def cmd_chaos_scan(args) -> str:
    config = _experiment(args)
    rows = chaos_convergence_scan(config)
    return _table("chaos-scan", args, config.to_dict(), CONVERGENCE_COLUMNS, [r.as_record() for r in rows])


def cmd_jindex_stats(args) -> str:
    config = _experiment(args)
    stats = j_index_statistics(config)
    cols = CONVERGENCE_COLUMNS + ("tv_alt",)
    records = [r.as_record() | {"tv_alt": a} for r, a in zip(stats.rows, stats.tv_alternative)]
    extra = {"maxima": [m.location for m in stats.report.maxima], "j_counts": list(stats.counts)}
    return _table("jindex-stats", args, config.to_dict(), cols, records, extra)


def cmd_clt(args) -> str:
    y0 = args.y0
    if y0 is None:
        y0 = float(find_global_maxima(args.field, args.beta).locations.max())
    res = clt_diagnostic(args.field, args.beta, y0, args.n, args.replicas, args.seed)
    cols = ("y0", "n", "replicas", "mean", "variance", "target_variance")
    records = [{"y0": y0, "n": args.n, "replicas": res.replicas, "mean": res.mean,
                "variance": res.variance, "target_variance": res.target_variance}]
    return _table("clt", args, _base_config(args), cols, records)


def cmd_sample(args) -> str:
    h = sample_field(args.field, args.n, args.seed)
    spins, ys = exact_sample(ModelParams(args.beta, args.n), h, n_samples=args.samples,
                             seed=args.seed, return_y=True)
    cols = ("sample", "y", "spins")
    records = [{"sample": i, "y": float(y), "spins": "".join(np.where(s > 0, "+", "-"))}
               for i, (s, y) in enumerate(zip(spins, ys))]
    return _table("sample", args, _base_config(args) | {"n": args.n}, cols, records)


COMMANDS = {
    "landscape": cmd_landscape,
    "phase-diagram": cmd_phase_diagram,
    "marginal": cmd_marginal,
    "chaos-scan": cmd_chaos_scan,
    "jindex-stats": cmd_jindex_stats,
    "clt": cmd_clt,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _emit(COMMANDS[args.command](args), args.out)
    except NumericalError as exc:
        print(f"rfcw: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, IndexError) as exc:
        print(f"rfcw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
