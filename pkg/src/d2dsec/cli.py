"""Command-line harness: beta sweeps, trade-off curves, single runs, summaries."""

import argparse
import sys

import numpy as np

from .bench import ExperimentSpec, run_experiment, summarize
from .channel import generate_realization
from .config import SystemConfig, load_config
from .optimizer import SchemeId, run, verify

ALL_SCHEMES = [s.value for s in SchemeId]

DEFAULT_SWEEP_BETAS = [0.1, 0.3, 0.5, 0.7]
DEFAULT_TRADEOFF_BETAS = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0]


def _add_common(p):
    p.add_argument("--config", help="YAML scenario config file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--betas", help="comma-separated beta grid")
    p.add_argument("--schemes", default=",".join(ALL_SCHEMES),
                   help="comma-separated scheme ids")


def _load_cfg(args) -> SystemConfig:
    return load_config(args.config) if args.config else SystemConfig()


def _cmd_experiment(args, default_betas):
    cfg = _load_cfg(args)
    betas = ([float(x) for x in args.betas.split(",")] if args.betas
             else list(default_betas))
    spec = ExperimentSpec(base=cfg, beta_grid=sorted(betas),
                          schemes=[SchemeId(s) for s in args.schemes.split(",")],
                          n_trials=args.trials, seed0=args.seed,
                          output_path=args.out)
    run_experiment(spec, parallel=args.parallel)
    print(f"wrote {args.out}")
    return 0


def _cmd_single(args):
    cfg = _load_cfg(args)
    ch = generate_realization(cfg, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    dv, trace, rep = run(ch, cfg, SchemeId(args.scheme), rng=rng)
    with open(args.out, "w") as f:
        f.write("iteration,r_min\n")
        for t, r in enumerate(trace.r_min):
            f.write(f"{t},{r:.9g}\n")
    chk = verify(dv, ch, cfg)
    print(f"scheme={args.scheme} status={trace.status} "
          f"iterations={trace.iterations_used}")
    print(f"R_min={rep.R_min:.6f}  R_sec_min={rep.R_sec_min:.6f}")
    print(f"bs_power_residual={chk['bs_power_residual']:.3e}  "
          f"max_leakage_violation={max(0.0, float(-chk['leakage_margin'].min())):.3e}")
    print(f"trace written to {args.out}")
    return 0 if trace.status != "failed" else 1


def _cmd_summarize(args):
    table = summarize(args.input)
    print(f"{'scheme':>14} {'beta':>6} {'n':>4} {'mean_r_min':>12} "
          f"{'stderr':>10} {'mean_r_sec':>12} {'fail_rate':>10}")
    for row in table:
        print(f"{row['scheme']:>14} {row['beta']:>6.3g} {row['n']:>4d} "
              f"{row['mean_r_min']:>12.6f} {row['stderr_r_min']:>10.6f} "
              f"{row['mean_r_sec_min']:>12.6f} {row['failure_rate']:>10.3f}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="d2dsec",
        description="Max-min secure beamforming with D2D cooperation: "
                    "Monte Carlo benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-beta", help="mean R_min over a beta grid")
    _add_common(p)
    p = sub.add_parser("tradeoff", help="secrecy/rate trade-off data")
    _add_common(p)

    p = sub.add_parser("single", help="one realization with full trace dump")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scheme", default=SchemeId.PROPOSED_D2D.value,
                   choices=ALL_SCHEMES)

    p = sub.add_parser("summarize", help="aggregate a results CSV")
    p.add_argument("--in", dest="input", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "sweep-beta":
            return _cmd_experiment(args, DEFAULT_SWEEP_BETAS)
        if args.command == "tradeoff":
            return _cmd_experiment(args, DEFAULT_TRADEOFF_BETAS)
        if args.command == "single":
            return _cmd_single(args)
        if args.command == "summarize":
            return _cmd_summarize(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
