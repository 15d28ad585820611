"""Command-line entry point.

Verbs
-----
- ``sqfock reproduce <fig1|fig3|fig4|fig5|fig6|fig7>`` -- run a packaged
  experiment preset and write its CSV bundle.
- ``sqfock run <config.ini>`` -- run from a config file (preset overlay).
- ``sqfock validate <config.ini>`` -- parse and check a config, no compute.
- ``sqfock presets`` -- list packaged experiments and their key parameters.

Exit codes: 0 success, 2 configuration error, 3 numeric-contract violation
(norm/trace drift, convergence failure), 4 tracking/bracket error.  The
default output directory is ``--out``, else ``$SQFOCK_OUTDIR``, else
``./sqfock-out``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import (
    BracketError,
    ConfigError,
    ContractViolationError,
    CutoffTooSmallError,
    DegenerateGapError,
    DimensionMismatchError,
    InstabilityError,
    InvalidCutoffError,
    TrackingError,
)
from .dynamics import DissipationParams
from .harness import EXPERIMENT_NAMES, load_config, load_preset, run_experiment
from .harness.config import config_as_sections
from .model import SqueezedParams, squeezed_to_lab
from .qcore import FockSpace

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_TRACKING = 4

_EXIT_CODES: list[tuple[type, int]] = [
    (ConfigError, EXIT_CONFIG),
    (InstabilityError, EXIT_CONFIG),
    (InvalidCutoffError, EXIT_CONFIG),
    (TrackingError, EXIT_TRACKING),
    (BracketError, EXIT_TRACKING),
    (ContractViolationError, EXIT_NUMERIC),
    (CutoffTooSmallError, EXIT_NUMERIC),
    (DegenerateGapError, EXIT_NUMERIC),
    (DimensionMismatchError, EXIT_NUMERIC),
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqfock",
        description="Regenerate the qubit/squeezed-Fock entanglement experiment datasets.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", default=None, help="output directory root")
    common.add_argument("--nmax", type=int, default=None, help="override the Fock cutoff")
    common.add_argument("--dt", type=float, default=None, help="override the integrator step")
    common.add_argument("--fast", action="store_true", help="skip convergence re-runs (marked in metadata)")

    rep = sub.add_parser("reproduce", parents=[common], help="run a packaged experiment")
    rep.add_argument("experiment", choices=EXPERIMENT_NAMES)

    run = sub.add_parser("run", parents=[common], help="run from a config file")
    run.add_argument("config", help="path to a key=value INI config")

    val = sub.add_parser("validate", help="check a config file without computing")
    val.add_argument("config", help="path to a key=value INI config")

    sub.add_parser("presets", help="list packaged experiments")
    return parser


def _apply_overrides(cfg, args):
    updates = {}
    if args.out is not None:
        updates["out_dir"] = args.out
    if args.nmax is not None:
        updates["n_max"] = args.nmax
    if args.dt is not None:
        updates["dt"] = args.dt
    if args.fast:
        updates["fast"] = True
    return replace(cfg, **updates)


def _out_root(cfg) -> str:
    return cfg.out_dir or os.environ.get("SQFOCK_OUTDIR") or "./sqfock-out"


def _validate(cfg) -> None:
    """Construct the owning modules' parameter objects so their preconditions run."""
    FockSpace(cfg.n_max)
    if cfg.g <= 0:
        raise ConfigError(f"coupling g must be positive, got {cfg.g}")
    p = SqueezedParams.from_coupling(cfg.g, cfg.r, cfg.omega_q / 3.0, cfg.omega_q)
    squeezed_to_lab(p)  # exercises the stability-regime precondition
    DissipationParams(cfg.kappa, cfg.gamma)
    if cfg.dt <= 0:
        raise ConfigError(f"dt must be positive, got {cfg.dt}")
    if cfg.g_count < 1 or cfg.r_count < 1:
        raise ConfigError("scan counts must be at least 1")
    if isinstance(cfg.omega_c, float) and cfg.omega_c <= 0:
        raise ConfigError(f"omega_c must be positive, got {cfg.omega_c}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "presets":
            for name in EXPERIMENT_NAMES:
                cfg = load_preset(name)
                sections = config_as_sections(cfg)
                physics = ", ".join(f"{k}={v}" for k, v in sorted(sections["physics"].items()))
                print(f"{name}: {physics}; n_max={cfg.n_max}, dt={cfg.dt}")
            return 0
        if args.verb == "validate":
            cfg = load_config(args.config)
            _validate(cfg)
            print(f"{args.config}: ok (experiment {cfg.name})")
            return 0
        cfg = load_preset(args.experiment) if args.verb == "reproduce" else load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        _validate(cfg)
        bundle = run_experiment(cfg, out_root=_out_root(cfg))
        out_dir = os.path.join(_out_root(cfg), bundle.name)
        print(f"{bundle.name}: ok -> {out_dir}")
        for key, value in bundle.metadata.get("checks", {}).items():
            print(f"  {key} = {value}")
        return 0
    except Exception as exc:  # mapped exit codes; unexpected errors re-raise
        for klass, code in _EXIT_CODES:
            if isinstance(exc, klass):
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
