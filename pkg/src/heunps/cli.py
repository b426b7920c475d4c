"""Command-line front end: ``heunps {eval,eval-regular,bench,convergence}``.

Data goes to stdout (or ``--out``); diagnostics go to stderr.  Exit codes:
0 success, 2 invalid parameters, 3 segment crosses a singular point,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__
from .core import PUNCTURE_RADIUS, CauchyData, HeunParameters, local_series_seed, validate_params
from .errors import (
    HeunError,
    NumericalError,
    ParameterError,
    PoleEvaluation,
    SegmentCrossesSingularity,
)
from .oracle import hyp2f1_series, hypergeometric_reduction, richardson_error, rk_on_table
from .pathsum import SPACINGS, SolutionTable, evaluate_interval, evaluate_regular_from_origin

EXIT_OK, EXIT_PARAMS, EXIT_SEGMENT, EXIT_NUMERIC = 0, 2, 3, 4

COLUMNS = ["z_re", "z_im", "H_re", "H_im", "dH_re", "dH_im"]
BENCH_SIZES = (1000, 10000, 50000, 100000, 200000)

# Default parameter set of the benchmark protocol.
BENCHMARK_PARAMS = {"t": 4.5, "q": -1.0, "alpha": 1.0, "beta": -1.5, "gamma": -0.14, "delta": 4.32}


class UsageError(ParameterError):
    pass


@dataclass
class RunConfig:
    command: str
    params: HeunParameters
    za: complex
    zb: complex
    n1: int
    n2: int
    puncture: float = PUNCTURE_RADIUS
    output_format: str = "csv"
    output_path: str | None = None
    cauchy: tuple[complex, complex, complex] | None = None
    seed_regular: bool = False
    spacing: str = "uniform"
    n_points: int | None = None
    repeats: int = 3
    sizes: tuple[int, ...] = BENCH_SIZES
    oracle: str = "none"
    substeps: int = 10
    n_terms: int = 10

    def __post_init__(self):
        if self.n1 < 1:
            raise UsageError("--n1 must be >= 1")
        if self.n2 < 3:
            raise UsageError("--n2 must be >= 3")
        if self.command == "eval" and self.cauchy is None and not self.seed_regular:
            raise UsageError("eval needs --H0 and --H0p (or --seed-regular)")
        if self.command == "eval-regular" and self.cauchy is not None:
            raise UsageError("eval-regular seeds itself at the origin; drop --z0/--H0/--H0p")
        if self.command == "bench" and self.repeats < 3:
            raise UsageError("--repeats must be >= 3")


def parse_complex(text: str) -> complex:
    """Parse ``RE``, ``IMj`` or ``RE+IMj`` (Python complex literal syntax, no spaces)."""
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r} (use e.g. 1.0+0.01j)") from None


def _fmt(x: float) -> str:
    return repr(float(x))


def _table_rows(table: SolutionTable, side: str | None = None):
    for z, h, hp in zip(table.points, table.H, table.Hp):
        row = [_fmt(z.real), _fmt(z.imag), _fmt(h.real), _fmt(h.imag), _fmt(hp.real), _fmt(hp.imag)]
        if side is not None:
            row.append(side)
        yield row


def _params_json(p: HeunParameters) -> dict:
    return {k: [v.real, v.imag] for k, v in p.as_dict().items()}


def _dumps(doc: dict) -> str:
    return json.dumps(doc, separators=(", ", ": ")) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _render_tables(cfg: RunConfig, parts: list[tuple[SolutionTable, str | None]], extra: dict) -> str:
    columns = COLUMNS + (["side"] if parts[0][1] is not None else [])
    rows = [r for tab, side in parts for r in _table_rows(tab, side)]
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        return buf.getvalue()
    doc = {
        "command": cfg.command,
        "params": _params_json(cfg.params),
        "n1": cfg.n1,
        "n2": cfg.n2,
        "spacing": cfg.spacing,
        **extra,
        "columns": columns,
        "rows": [[float(x) for x in r[:6]] + r[6:] for r in rows],
    }
    return _dumps(doc)


def cmd_eval(cfg: RunConfig) -> int:
    p = cfg.params
    if cfg.seed_regular:
        cauchy = local_series_seed(p, cfg.za, cfg.n_terms)
    else:
        z0, h0, h0p = cfg.cauchy
        if abs(z0 - cfg.za) > 1e-14 * (1 + abs(cfg.za)):
            raise UsageError("--z0 must equal --from")
        cauchy = CauchyData(cfg.za, h0, h0p).check_ordinary(p)
    table = evaluate_interval(p, cauchy, cfg.za, cfg.zb, cfg.n1, cfg.n2, cfg.spacing, cfg.puncture)
    extra = {"points_total": len(table), "points_nominal": cfg.n1 * cfg.n2}
    _emit(cfg, _render_tables(cfg, [(table, None)], extra))
    return EXIT_OK


def _regular(cfg: RunConfig, n_points=None, refinement=1):
    return evaluate_regular_from_origin(
        cfg.params, cfg.za, cfg.zb, cfg.puncture, cfg.n1, cfg.n2, cfg.spacing,
        n_points=n_points, n_terms=cfg.n_terms, refinement=refinement,
    )


def cmd_eval_regular(cfg: RunConfig) -> int:
    left, right = _regular(cfg, cfg.n_points)
    # rows ascend from the left end through the origin to the right end
    extra = {
        "points_total": len(left) + len(right),
        "puncture": cfg.puncture,
        "seed_left": [left.H[0].real, left.H[0].imag],
        "seed_right": [right.H[0].real, right.H[0].imag],
    }
    _emit(cfg, _render_tables(cfg, [(left.reversed(), "left"), (right, "right")], extra))
    return EXIT_OK


def _max_refined_gap(coarse, fine) -> float:
    return max(float(np.max(np.abs(f.H[::2] - c.H))) for c, f in zip(coarse, fine))


def cmd_bench(cfg: RunConfig) -> int:
    results = []
    for n in cfg.sizes:
        times = []
        for _ in range(cfg.repeats):
            t0 = time.perf_counter()
            coarse = _regular(cfg, n)
            times.append(time.perf_counter() - t0)
        fine = _regular(cfg, n, refinement=2)
        results.append({
            "points": len(coarse[0]) + len(coarse[1]),
            "wall_seconds_median": statistics.median(times),
            "wall_seconds_min": min(times),
            "max_error_vs_refined": _max_refined_gap(coarse, fine),
        })
    doc = {
        "command": "bench",
        "params": _params_json(cfg.params),
        "interval": [[cfg.za.real, cfg.za.imag], [cfg.zb.real, cfg.zb.imag]],
        "n2": cfg.n2,
        "puncture": cfg.puncture,
        "repeats": cfg.repeats,
        "results": results,
    }
    _emit(cfg, _dumps(doc))
    return EXIT_OK


def _order(errors: list[float]) -> list[float | None]:
    out = []
    for a, b in zip(errors[:-1], errors[1:]):
        out.append(math.log2(a / b) if a > 0 and b > 0 else None)
    return out


def cmd_convergence(cfg: RunConfig) -> int:
    p = cfg.params
    if cfg.cauchy is not None:
        z0, h0, h0p = cfg.cauchy
        if abs(z0 - cfg.za) > 1e-14 * (1 + abs(cfg.za)):
            raise UsageError("--z0 must equal --from")
        cauchy = CauchyData(cfg.za, h0, h0p).check_ordinary(p)
    else:
        cauchy = local_series_seed(p, cfg.za, cfg.n_terms)
    n2s = [cfg.n2, 2 * cfg.n2 - 1, 4 * cfg.n2 - 3]
    runs = [evaluate_interval(p, cauchy, cfg.za, cfg.zb, cfg.n1, m, cfg.spacing, cfg.puncture) for m in n2s]
    rep = richardson_error(runs[0], runs[1], runs[2])
    rep_fine = richardson_error(runs[1], runs[2])
    doc = {
        "command": "convergence",
        "params": _params_json(p),
        "interval": [[cfg.za.real, cfg.za.imag], [cfg.zb.real, cfg.zb.imag]],
        "n1": cfg.n1,
        "n2": n2s,
        "spacing": cfg.spacing,
        "richardson_error_estimates": [rep.max_abs_deviation, rep_fine.max_abs_deviation],
        "observed_order": rep.observed_order,
        "oracle": cfg.oracle,
    }
    if cfg.oracle != "none":
        errs = []
        for tab in runs:
            if cfg.oracle == "rk":
                ref = rk_on_table(tab, cauchy, cfg.substeps).H
            else:
                if cfg.cauchy is not None:
                    raise UsageError("the hyp2f1 oracle applies to the regular solution only")
                a, b, c = hypergeometric_reduction(p)
                ref = np.array([hyp2f1_series(a, b, c, z) for z in tab.points])
            errs.append(float(np.max(np.abs(tab.H - ref))))
        doc["oracle_errors"] = errs
        doc["oracle_orders"] = _order(errs)
        if cfg.oracle == "rk":
            doc["substeps"] = cfg.substeps
    _emit(cfg, _dumps(doc))
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "eval-regular": cmd_eval_regular,
    "bench": cmd_bench,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heunps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("Heun parameters (defaults: benchmark set)")
    for name in ("t", "q", "alpha", "beta", "gamma", "delta"):
        g.add_argument(f"--{name}", type=parse_complex, default=complex(BENCHMARK_PARAMS[name]))
    g.add_argument("--epsilon", type=parse_complex, default=None,
                   help="defaults to 1 + alpha + beta - gamma - delta")
    r = common.add_argument_group("run")
    r.add_argument("--from", dest="za", type=parse_complex, default=None)
    r.add_argument("--to", dest="zb", type=parse_complex, default=None)
    r.add_argument("--n1", type=int, default=None, help="number of chained sub-segments")
    r.add_argument("--n2", type=int, default=100, help="points per sub-segment")
    r.add_argument("--puncture", type=float, default=PUNCTURE_RADIUS)
    r.add_argument("--spacing", choices=SPACINGS, default="uniform")
    r.add_argument("--terms", dest="n_terms", type=int, default=10, help="local series terms for seeding")
    r.add_argument("--z0", type=parse_complex, default=None)
    r.add_argument("--H0", type=parse_complex, default=None)
    r.add_argument("--H0p", type=parse_complex, default=None)
    r.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    r.add_argument("--out", dest="output_path", default=None)

    p_eval = sub.add_parser("eval", parents=[common], help="Cauchy problem on a straight segment")
    p_eval.add_argument("--seed-regular", action="store_true",
                        help="seed at --from from the regular local series at 0 instead of --H0/--H0p")
    p_reg = sub.add_parser("eval-regular", parents=[common], help="regular solution on both sides of 0")
    p_reg.add_argument("--points", dest="n_points", type=int, default=None,
                       help="total equispaced points (overrides --n1)")
    p_bench = sub.add_parser("bench", parents=[common], help="timing and accuracy of the regular protocol")
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.add_argument("--sizes", default=",".join(map(str, BENCH_SIZES)),
                         help="comma-separated point counts")
    p_conv = sub.add_parser("convergence", parents=[common], help="step-halving triple and observed order")
    p_conv.add_argument("--oracle", choices=("none", "rk", "hyp2f1"), default="none")
    p_conv.add_argument("--substeps", type=int, default=10)
    return parser


_DEFAULT_SEGMENT = {
    "eval": (0.1, 0.9, 1),
    "eval-regular": (-2.2, 0.8, 10),
    "bench": (-2.2, 0.8, 10),
    "convergence": (0.01, 0.5, 1),
}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    eps = ns.epsilon if ns.epsilon is not None else 1 + ns.alpha + ns.beta - ns.gamma - ns.delta
    params = HeunParameters(ns.t, ns.q, ns.alpha, ns.beta, ns.gamma, ns.delta, eps)
    za0, zb0, n10 = _DEFAULT_SEGMENT[ns.command]
    za = ns.za if ns.za is not None else complex(za0)
    zb = ns.zb if ns.zb is not None else complex(zb0)
    given = [x is not None for x in (ns.H0, ns.H0p)]
    if any(given) and not all(given):
        raise UsageError("--H0 and --H0p must be given together")
    if ns.z0 is not None and not all(given):
        raise UsageError("--z0 needs --H0 and --H0p")
    cauchy = None
    if all(given):
        cauchy = (ns.z0 if ns.z0 is not None else za, ns.H0, ns.H0p)
    sizes = BENCH_SIZES
    if ns.command == "bench":
        try:
            sizes = tuple(int(s) for s in ns.sizes.split(",") if s.strip())
        except ValueError:
            raise UsageError(f"bad --sizes {ns.sizes!r}") from None
    return RunConfig(
        command=ns.command,
        params=params,
        za=za,
        zb=zb,
        n1=ns.n1 if ns.n1 is not None else n10,
        n2=ns.n2,
        puncture=ns.puncture,
        output_format=ns.output_format,
        output_path=ns.output_path,
        cauchy=cauchy,
        seed_regular=getattr(ns, "seed_regular", False),
        spacing=ns.spacing,
        n_points=getattr(ns, "n_points", None),
        repeats=getattr(ns, "repeats", 3),
        sizes=sizes,
        oracle=getattr(ns, "oracle", "none"),
        substeps=getattr(ns, "substeps", 10),
        n_terms=ns.n_terms,
    )


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (SegmentCrossesSingularity, PoleEvaluation)):
        return EXIT_SEGMENT
    if isinstance(exc, NumericalError):
        return EXIT_NUMERIC
    if isinstance(exc, (ParameterError, ValueError)):
        return EXIT_PARAMS
    return EXIT_NUMERIC


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            cfg = config_from_args(ns)
            validate_params(cfg.params)
            code = COMMANDS[cfg.command](cfg)
        except (HeunError, ValueError, ArithmeticError) as exc:
            print(f"heunps: error: {exc}", file=sys.stderr)
            code = _exit_code(exc)
    for msg in dict.fromkeys(str(w.message) for w in caught):
        print(f"heunps: warning: {msg}", file=sys.stderr)
    return code


def main_exit() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
