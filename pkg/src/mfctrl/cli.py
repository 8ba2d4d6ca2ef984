"""Command-line scenario runner.

Subcommands:

* ``run`` -- execute one scenario and print its summary metrics.
* ``compare`` -- run the iP loop and the PID baseline on the identical
  scenario and print the pre/post-perturbation RMSE table.  PID gains come
  from [pidN] config sections when present, otherwise from the declared
  grid-tuning protocol on the event-free scenario.
* ``bench-estimator`` -- sweep the disturbance estimator over horizon,
  sample period, and noise amplitude on a synthetic known-F signal.

Common flags: --config (builtin scenario name or file path), --out,
--seed, --override section.key=value (repeatable).
"""

from __future__ import annotations

import argparse
import sys

from .configio import BUILTIN_SCENARIOS, load_config, load_pid_gains
from .errors import MfcError
from .harness import bench_estimator, compare_controllers, export_csv, run_scenario, tune_pid_grid


def _add_common(p: argparse.ArgumentParser, config_required=True):
    p.add_argument(
        "--config",
        required=config_required,
        help=f"path to a config file or one of {', '.join(BUILTIN_SCENARIOS)}",
    )
    p.add_argument("--out", default=None, help="write the per-tick record CSV here")
    p.add_argument("--seed", type=int, default=None, help="override the run seed")
    p.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one config value (repeatable)",
    )


def _cmd_run(args) -> int:
    cfg = load_config(args.config, overrides=args.override, seed=args.seed)
    record = run_scenario(cfg)
    print(f"scenario {record.metadata['name']}: {len(record)} ticks", end="")
    print(" (diverged)" if record.metadata["diverged"] else "")
    for i in range(1, len(cfg.channels) + 1):
        print(
            f"  channel {i}: rmse={record.summary[f'rmse{i}']:.6g} "
            f"max|e|={record.summary[f'max_abs_e{i}']:.6g} "
            f"saturation={record.summary[f'saturation_fraction{i}']:.3f} "
            f"var(F_est)={record.summary[f'f_est_variance{i}']:.6g}"
        )
    if args.out:
        export_csv(record, args.out)
        print(f"wrote {args.out}")
    return 1 if record.metadata["diverged"] else 0


def _cmd_compare(args) -> int:
    cfg = load_config(args.config, overrides=args.override, seed=args.seed)
    gains = cfg.pid_gains or load_pid_gains(args.config, overrides=args.override)
    if gains is None:
        print("no [pidN] sections found; grid-tuning PID on the event-free scenario...")
        gains = tune_pid_grid(cfg)
        for i, g in enumerate(gains, 1):
            print(f"  tuned pid{i}: kp={g.kp} ki={g.ki} kd={g.kd}")
    result = compare_controllers(cfg, gains)
    print(f"split at t={result.split_time:g}s, startup skip {result.startup_skip:g}s")
    print(result.table())
    if args.out:
        for label, rec in result.records.items():
            path = f"{args.out.rstrip('/')}_{label}.csv" if not args.out.endswith("/") else f"{args.out}{label}.csv"
            export_csv(rec, path)
            print(f"wrote {path}")
    return 0


def _cmd_bench(args) -> int:
    taus = [float(x) for x in args.taus.split(",")]
    dts = [float(x) for x in args.dts.split(",")]
    amps = [float(x) for x in args.noise.split(",")]
    rows = bench_estimator(taus, dts, amps)
    header = f"{'tau':>8} {'dt':>10} {'noise_amp':>10} {'rms_error':>12} {'max_error':>12}"
    print(header)
    for r in rows:
        print(
            f"{r['tau']:>8g} {r['dt']:>10g} {r['noise_amplitude']:>10g} "
            f"{r['rms_error']:>12.5g} {r['max_error']:>12.5g}"
        )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("tau,dt,noise_amplitude,rms_error,max_error\n")
            for r in rows:
                fh.write(
                    f"{r['tau']:.17g},{r['dt']:.17g},{r['noise_amplitude']:.17g},"
                    f"{r['rms_error']:.17g},{r['max_error']:.17g}\n"
                )
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfctrl", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_cmp = sub.add_parser("compare", help="compare iP against the PID baseline")
    _add_common(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_bench = sub.add_parser("bench-estimator", help="sweep the estimator")
    _add_common(p_bench, config_required=False)
    p_bench.add_argument("--taus", default="0.02,0.05,0.1,0.2")
    p_bench.add_argument("--dts", default="0.01,0.001")
    p_bench.add_argument("--noise", default="0,0.05")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MfcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
