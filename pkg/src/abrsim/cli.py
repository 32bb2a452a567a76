"""Command line driver.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
degeneracy.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments, frontend, stimuli
from .alpha_filters import alpha_coefficients, passband_gain_db
from .config import ExperimentConfig
from .errors import AbrsimError, ConfigError


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def design_filter_text(fs: float, tau: float, variant: str) -> str:
    filt = alpha_coefficients(fs, tau, variant)
    pairs = [("variant", filt.variant.value), ("fs", _g17(filt.fs)), ("tau", _g17(filt.tau)),
             ("b0", _g17(filt.b[0])), ("b1", _g17(filt.b[1])), ("b2", _g17(filt.b[2])),
             ("a0", _g17(filt.a[0])), ("a1", _g17(filt.a[1])), ("a2", _g17(filt.a[2])),
             ("m", _g17(filt.pole)), ("c", _g17(filt.scale_c)), ("gain_db", _g17(passband_gain_db(filt)))]
    return "".join(f"{k}={v}\n" for k, v in pairs)


def _load_config(args) -> ExperimentConfig:
    if args.config is None:
        return ExperimentConfig.from_mapping()
    return ExperimentConfig.load(args.config)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_texts(out: Path, texts: dict[str, str]) -> None:
    for name, text in texts.items():
        with open(out / name, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        print(out / name)


def cmd_design_filter(args) -> None:
    sys.stdout.write(design_filter_text(args.fs, args.tau, args.variant))


def cmd_stim(args) -> None:
    cfg = _load_config(args)
    spec = cfg.stimulus()
    x = stimuli.render(spec)
    out = _out_dir(args)
    if args.format == "csv":
        path = out / "stimulus.csv"
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(f"# fs={spec.fs!r}\n# config_sha256={cfg.sha256}\n")
            fh.write("".join(f"{_g17(v)}\n" for v in x))
    else:
        path = out / "stimulus.vap"
        frontend.write_vap1(x[np.newaxis, :], spec.fs, path)
    print(path)


def cmd_simulate(args) -> None:
    cfg = _load_config(args)
    out = _out_dir(args)
    for name, resp in zip(("an", "cn", "ic"), experiments.run_simulation(cfg)):
        if args.format == "csv":
            frontend.store_population_csv(resp, out / f"{name}.csv")
            print(out / f"{name}.csv")
        else:
            frontend.store_population(resp, out / f"{name}.vap")
            print(out / f"{name}.vap")


def cmd_calibrate(args) -> None:
    cfg = _load_config(args)
    path = _out_dir(args) / "calibration.txt"
    factors = experiments.run_calibration(cfg, path)
    print(path)
    print(f"m1={factors.m1!r} m3={factors.m3!r} m5={factors.m5!r}")


def _experiment(runner):
    def run(args) -> None:
        _write_texts(_out_dir(args), runner(_load_config(args)))
    return run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abrsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-filter", help="print alpha-kernel IIR coefficients")
    p.add_argument("--fs", type=float, required=True, help="sampling rate (Hz)")
    p.add_argument("--tau", type=float, required=True, help="time constant (s)")
    p.add_argument("--variant", choices=["v12", "v11", "urear"], default="v12")
    p.set_defaults(func=cmd_design_filter)

    def with_io(p, formats=False):
        p.add_argument("--config", help="flat 'section.key = value' configuration file")
        p.add_argument("--out", default=".", help="output directory")
        if formats:
            p.add_argument("--format", choices=["vap1", "csv"], default="vap1")
        return p

    with_io(sub.add_parser("stim", help="render the configured stimulus"), formats=True).set_defaults(func=cmd_stim)
    with_io(sub.add_parser("simulate", help="AN, CN and IC populations for the configured stimulus"),
            formats=True).set_defaults(func=cmd_simulate)
    with_io(sub.add_parser("calibrate", help="derive M1, M3, M5 from the reference click train")).set_defaults(
        func=cmd_calibrate)
    with_io(sub.add_parser("mtf", help="CN/IC modulation transfer functions")).set_defaults(
        func=_experiment(experiments.run_mtf_experiment))
    with_io(sub.add_parser("clicks", help="wave latency and amplitude growth with click level")).set_defaults(
        func=_experiment(experiments.run_click_experiment))
    with_io(sub.add_parser("efr", help="EFR magnitudes and the time-domain trace")).set_defaults(
        func=_experiment(experiments.run_efr_experiment))

    for p in sub.choices.values():
        # the pipeline is deterministic; a seed would suggest otherwise
        p.add_argument("--seed", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.seed is not None:
            raise ConfigError("--seed is not accepted: the pipeline is deterministic")
        args.func(args)
    except AbrsimError as exc:
        print(f"abrsim: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
