"""Command line front end.

Exit codes: 0 success, 2 bad usage or invalid configuration, 3 the
requested operating point is infeasible, 1 internal solver failure.
SNR values cross the boundary in dB only here; the library works in
linear SNR throughout.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from . import formats
from .channel import LinkState
from .errors import AbgsemError, InfeasibleError
from .experiments import (
    build_manifest,
    run_ee_sweep,
    run_maxmin_sweep,
    run_outage_cdf,
)
from .fitting import FitOptions, fit_abg, fit_upper_bound
from .model import below_metric_floor, eval_abg, out_of_unit_range, required_snr
from .multi_user import maxmin_bisection
from .single_user import adaptive_power, dinkelbach


def _add_seed(parser, required, note=""):
    parser.add_argument("--seed", type=int, required=required,
                        help=f"RNG seed{note}")


def _cmd_fit(args, bits: bool) -> int:
    samples = formats.read_samples_csv(args.input)
    options = FitOptions(max_iterations=args.max_iterations, tolerance=args.tolerance,
                         multistart_count=args.multistarts, seed=args.seed)
    result = fit_upper_bound(samples, options) if bits else fit_abg(samples, options)
    formats.write_fit_result(args.out, result)
    tags = [f"sse={result.sse:.6g}", f"iterations={result.iterations}",
            f"converged={result.converged}"]
    if result.degenerate:
        tags.append("degenerate=True")
    print(f"fit written to {args.out} ({', '.join(tags)})")
    return 0


def _linear_snr(args) -> float:
    if args.snr_db is not None:
        return 10.0 ** (args.snr_db / 10.0)
    return args.snr


def _cmd_eval(args) -> int:
    params = formats.read_abg_params(args.params)
    rho = _linear_snr(args)
    value = eval_abg(params, rho)
    flagged = out_of_unit_range(value)
    note = "  [outside [0, 1]]" if flagged else ""
    print(f"phi(rho={rho!r}) = {value!r}{note}")
    if args.out:
        formats.write_json(args.out, {"rho": rho, "value": value,
                                      "out_of_unit_range": flagged})
    return 0


def _cmd_snr_for(args) -> int:
    params = formats.read_abg_params(args.params)
    rho = required_snr(params, args.target)
    rho_db = 10.0 * math.log10(rho) if rho > 0.0 else None
    at_floor = below_metric_floor(params, args.target)
    db_text = f"{rho_db:.6g} dB" if rho_db is not None else "-inf dB (met at zero SNR)"
    print(f"required snr for target {args.target}: {rho!r} ({db_text})")
    if args.out:
        formats.write_json(args.out, {"target": args.target, "rho": rho,
                                      "rho_db": rho_db, "met_at_zero_snr": at_floor})
    return 0


def _cmd_adapt(args) -> int:
    params = formats.read_abg_params(args.params)
    link = LinkState(gain_sq=args.gain_sq, noise_var=args.noise_var)
    power = adaptive_power(params, link, args.eta)
    print(f"adaptive power for eta {args.eta}: {power!r} W")
    if args.out:
        formats.write_json(args.out, {"eta": args.eta, "power_w": power,
                                      "gain_sq": args.gain_sq,
                                      "noise_var": args.noise_var})
    return 0


def _cmd_ee(args) -> int:
    problem = formats.read_problem(args.problem)
    trace = dinkelbach(problem, xi=args.xi)
    formats.write_trace_csv(args.out, trace)
    print(f"p_star={trace.p_star!r} W, psi={trace.psi_star!r} 1/W, "
          f"iterations={trace.iterations}, trace written to {args.out}")
    return 0


def _cmd_maxmin(args) -> int:
    users = formats.read_users(args.users)
    allocation = maxmin_bisection(users, args.budget, delta=args.delta)
    json_path = str(args.out).rsplit(".", 1)[0] + ".json"
    formats.write_allocation(args.out, json_path, allocation)
    print(f"nu={allocation.nu!r}, total={allocation.total!r} W, "
          f"iterations={allocation.iterations}, written to {args.out} and {json_path}")
    return 0


def _cmd_experiment(args) -> int:
    config = formats.read_experiment_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    out_dir = formats.ensure_dir(args.out)

    outputs = []
    summary = {}
    if config.scenario == "outage_cdf":
        fixed, adaptive = run_outage_cdf(config)
        formats.write_cdf_csv(out_dir / "outage_fixed.csv", fixed)
        formats.write_cdf_csv(out_dir / "outage_adaptive.csv", adaptive)
        outputs += ["outage_fixed.csv", "outage_adaptive.csv"]
        summary = {"outage_fixed": fixed.outage, "outage_adaptive": adaptive.outage}
        if not args.no_figures:
            from . import figures

            figures.render_outage_cdf(fixed, adaptive, out_dir / "outage_cdf.png")
            outputs.append("outage_cdf.png")
    elif config.scenario in ("ee_sweep_pu", "ee_sweep_rate"):
        rows = run_ee_sweep(config)
        xname = "pu" if config.scenario == "ee_sweep_pu" else "rate"
        csv_name = f"{config.scenario}.csv"
        formats.write_rows_csv(out_dir / csv_name, [xname, "p_star", "psi"], rows)
        outputs.append(csv_name)
        infeasible = [i for i, row in enumerate(rows) if math.isnan(row[1])]
        summary = {"rows": len(rows), "infeasible_rows": infeasible}
        if not args.no_figures:
            from . import figures

            xlabel = "power cap (W)" if xname == "pu" else "rate floor (bit/s)"
            figures.render_ee_sweep(rows, xlabel, out_dir / f"{config.scenario}.png")
            outputs.append(f"{config.scenario}.png")
    else:
        rows = run_maxmin_sweep(config)
        formats.write_rows_csv(out_dir / "maxmin_sweep.csv",
                               ["budget", "maxmin", "equal_split"], rows)
        outputs.append("maxmin_sweep.csv")
        infeasible = [i for i, row in enumerate(rows) if math.isnan(row[1])]
        summary = {"rows": len(rows), "infeasible_rows": infeasible}
        if not args.no_figures:
            from . import figures

            figures.render_maxmin_sweep(rows, out_dir / "maxmin_sweep.png")
            outputs.append("maxmin_sweep.png")

    formats.write_manifest(out_dir / "manifest.json",
                           build_manifest(config, outputs, summary))
    print(f"{config.scenario}: wrote {', '.join(outputs + ['manifest.json'])} to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abgsem",
        description="Link-quality curve fitting and power allocation tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, bits in (("fit", False), ("fit-bits", True)):
        p = sub.add_parser(name, help=("fit the ceiling-vs-bits curve" if bits
                                       else "fit the metric-vs-SNR curve"))
        p.add_argument("--input", required=True, help="samples CSV with header x,y[,weight]")
        p.add_argument("--out", required=True, help="output JSON path")
        _add_seed(p, required=True, note=" for the multistart draw")
        p.add_argument("--max-iterations", type=int, default=200)
        p.add_argument("--tolerance", type=float, default=1e-10)
        p.add_argument("--multistarts", type=int, default=16)
        p.set_defaults(func=lambda a, b=bits: _cmd_fit(a, bits=b))

    p = sub.add_parser("eval", help="evaluate the metric curve at one SNR")
    p.add_argument("--params", required=True, help="curve parameter JSON")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--snr", type=float, help="linear SNR")
    group.add_argument("--snr-db", type=float, help="SNR in dB")
    p.add_argument("--out", help="optional output JSON path")
    _add_seed(p, required=False, note=" (unused; deterministic subcommand)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("snr-for", help="minimum SNR reaching a metric target")
    p.add_argument("--params", required=True)
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--out", help="optional output JSON path")
    _add_seed(p, required=False, note=" (unused; deterministic subcommand)")
    p.set_defaults(func=_cmd_snr_for)

    p = sub.add_parser("adapt", help="power tracking a metric target on a known link")
    p.add_argument("--params", required=True)
    p.add_argument("--eta", type=float, required=True, help="metric target")
    p.add_argument("--gain-sq", type=float, default=1.0, help="channel power gain |h|^2")
    p.add_argument("--noise-var", type=float, default=1.0, help="noise variance")
    p.add_argument("--out", help="optional output JSON path")
    _add_seed(p, required=False, note=" (unused; deterministic subcommand)")
    p.set_defaults(func=_cmd_adapt)

    p = sub.add_parser("ee", help="maximize energy efficiency on one link")
    p.add_argument("--problem", required=True, help="problem JSON")
    p.add_argument("--xi", type=float, default=1e-8, help="termination threshold")
    p.add_argument("--out", required=True, help="iteration trace CSV path")
    _add_seed(p, required=False, note=" (unused; deterministic subcommand)")
    p.set_defaults(func=_cmd_ee)

    p = sub.add_parser("maxmin", help="max-min quality allocation over users")
    p.add_argument("--users", required=True, help="user set JSON")
    p.add_argument("--budget", type=float, required=True, help="total power budget (W)")
    p.add_argument("--delta", type=float, default=1e-6, help="bisection stop width")
    p.add_argument("--out", required=True,
                   help="allocation CSV path; a .json summary is written alongside")
    _add_seed(p, required=False, note=" (unused; deterministic subcommand)")
    p.set_defaults(func=_cmd_maxmin)

    p = sub.add_parser("experiment", help="run a scenario from a config file")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output directory")
    _add_seed(p, required=False, note=" (overrides the config seed)")
    p.add_argument("--workers", type=int, help="parallel workers (default from config)")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AbgsemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
