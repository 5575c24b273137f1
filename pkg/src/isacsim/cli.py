"""Command-line front end.

Subcommands:
  simulate <config>        run a Monte-Carlo sweep, write the metrics CSV
  rdm <config>             single-shot range-Doppler map export as CSV
  validate-config <config> parse and check a config, print a summary
  theory-rmse <config>     closed-form strongest-path RMSE per SNR point

Exit codes: 0 success, 2 config error, 1 runtime error.
"""

import argparse
import os
import sys

from .chanest import theoretical_rmse_h1
from .channel import apply_channel, draw_scenario, expand_effective, snr_to_sigma
from .harness import run_sweep, run_trial, trial_rng
from .scenario import ConfigError, load_scenario, mode_label
from .sensing import dmd_rdm, fccr_rdm, save_rdm_csv
from .waveform import build_frame, fmcw_generate, ofdm_modulate, superpose


def build_parser():
    parser = argparse.ArgumentParser(prog="isacsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a sweep and write the metrics CSV")
    sim.add_argument("config", help="config file path or preset name")
    sim.add_argument("--out", help="output CSV path (default <out-dir>/<name>.csv)")
    sim.add_argument("--out-dir", default=".", help="output directory")
    sim.add_argument("--seed", type=int, help="override the master seed")
    sim.add_argument("--trials", type=int, help="override the trial count")
    sim.add_argument("--workers", type=int, default=1, help="parallel worker processes")

    rdm = sub.add_parser("rdm", help="export one range-Doppler map as CSV")
    rdm.add_argument("config")
    rdm.add_argument("--out", required=True, help="output CSV path")
    rdm.add_argument("--method", choices=["fccr", "dmd"], help="override the sensing method")
    rdm.add_argument("--snr", type=float, help="override the SNR (dB)")
    rdm.add_argument("--trial", type=int, default=0, help="trial index to render")
    rdm.add_argument("--seed", type=int, help="override the master seed")

    val = sub.add_parser("validate-config", help="parse and validate a config")
    val.add_argument("config")

    thr = sub.add_parser("theory-rmse", help="closed-form channel estimation RMSE table")
    thr.add_argument("config")
    return parser


def cmd_simulate(args):
    spec = load_scenario(args.config)
    if args.seed is not None:
        spec = spec.with_overrides(seed=args.seed)
    if args.trials is not None:
        spec = spec.with_overrides(trials=args.trials)
    out = args.out
    if out is None:
        os.makedirs(args.out_dir, exist_ok=True)
        out = os.path.join(args.out_dir, f"{spec.name}.csv")
    run_sweep(spec, out_path=out, workers=args.workers)
    print(out)
    return 0


def cmd_rdm(args):
    spec = load_scenario(args.config)
    if args.seed is not None:
        spec = spec.with_overrides(seed=args.seed)
    cfg = spec.system
    method = args.method or spec.methods[0]
    snr = args.snr if args.snr is not None else spec.snr_db[0]
    rng = trial_rng(spec.seed, args.trial)
    targets = draw_scenario(spec.targets, cfg, rng)
    eff = expand_effective(targets, cfg.delta, cfg.beta, cfg.t_s, n_cp=cfg.n_cp)
    bits = rng.integers(0, 2, 2 * cfg.n_sym * cfg.n_sc)
    fmcw = fmcw_generate(cfg)
    x = superpose(ofdm_modulate(build_frame(bits, cfg), cfg), fmcw, cfg.p_s)
    y = apply_channel(x, eff, snr_to_sigma(snr), rng)
    rdm_map = fccr_rdm(y, fmcw, cfg) if method == "fccr" else dmd_rdm(y, cfg)
    save_rdm_csv(rdm_map, args.out)
    print(args.out)
    return 0


def cmd_validate(args):
    spec = load_scenario(args.config)
    cells = len(spec.methods) * len(spec.ic_modes) * len(spec.sic_modes) * len(spec.snr_db)
    print(f"{spec.name}: OK")
    print(f"  system: n={spec.system.n} n_cp={spec.system.n_cp} n_sc={spec.system.n_sc} "
          f"n_sym={spec.system.n_sym} m1={spec.system.m1} decim={spec.system.decim}")
    print(f"  targets: {len(spec.targets)}  snr points: {len(spec.snr_db)}  "
          f"cells: {cells}  trials/cell: {spec.trials}")
    modes = ", ".join(mode_label(ic, s) for ic in spec.ic_modes for s in spec.sic_modes)
    print(f"  methods: {', '.join(spec.methods)}  modes: {modes}  coded: {spec.coded}")
    return 0


def cmd_theory(args):
    spec = load_scenario(args.config)
    print("snr_db,sigma_h1")
    for snr in spec.snr_db:
        sigma = theoretical_rmse_h1(spec.system, snr_to_sigma(snr))
        print(f"{snr:.9g},{sigma:.9g}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "rdm": cmd_rdm,
        "validate-config": cmd_validate,
        "theory-rmse": cmd_theory,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
