"""Experiment configuration: flat key=value INI files with packaged presets.

A config file needs at least ``name`` under ``[experiment]``; every other
key defaults to the named experiment's preset and can be overridden per
file or per CLI flag.  Keys live in fixed sections (see ``KEYMAP``);
unknown keys or sections fail loudly with the offending name.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

from ..errors import ConfigError

EXPERIMENT_NAMES = ("fig1", "fig3", "fig4", "fig5", "fig6", "fig7")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved knobs for one experiment run.

    ``omega_c`` is either a number or one of the auto-resonance modes:
    ``auto-analytic`` (closed-form pair-degeneracy root) or ``auto-numeric``
    (full-model avoided-crossing search); the resolved value and method are
    recorded in every bundle's metadata.  ``seed`` is reserved: the physics
    pipeline is deterministic and never draws random numbers.
    """

    name: str
    # physics
    r: float = 0.9
    g: float = 0.01
    omega_q: float = 1.0
    omega_c: str | float = "auto-analytic"
    kappa: float = 0.0
    gamma: float = 0.0
    # sweep protocol
    v_factor: float = 0.05
    span: float = 0.01
    # numerics
    n_max: int = 40
    dt: float = 0.02
    store_every: int = 0  # 0 = auto
    duration_factor: float = 1.7
    trace_points: int = 4000
    fast: bool = False
    # scans
    g_min: float = 0.005
    g_max: float = 0.06
    g_count: int = 20
    r_min: float = 0.4
    r_max: float = 2.0
    r_count: int = 17
    # Wigner window
    wigner_x: float = 7.5
    wigner_p: float = 3.5
    wigner_points: int = 61
    # output
    out_dir: str = ""
    seed: int = 0


# section -> key -> (attribute, parser)
def _parse_omega_c(text: str):
    if text in ("auto-analytic", "auto-numeric"):
        return text
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(
            f"omega_c must be a number, 'auto-analytic' or 'auto-numeric', got {text!r}"
        ) from exc


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


KEYMAP: dict[str, dict[str, tuple[str, type | object]]] = {
    "experiment": {"name": ("name", str)},
    "physics": {
        "r": ("r", float),
        "g": ("g", float),
        "omega_q": ("omega_q", float),
        "omega_c": ("omega_c", _parse_omega_c),
        "kappa": ("kappa", float),
        "gamma": ("gamma", float),
    },
    "sweep": {"v_factor": ("v_factor", float), "span": ("span", float)},
    "numerics": {
        "n_max": ("n_max", int),
        "dt": ("dt", float),
        "store_every": ("store_every", int),
        "duration_factor": ("duration_factor", float),
        "trace_points": ("trace_points", int),
        "fast": ("fast", _parse_bool),
    },
    "scan": {
        "g_min": ("g_min", float),
        "g_max": ("g_max", float),
        "g_count": ("g_count", int),
        "r_min": ("r_min", float),
        "r_max": ("r_max", float),
        "r_count": ("r_count", int),
    },
    "wigner": {
        "x_half": ("wigner_x", float),
        "p_half": ("wigner_p", float),
        "n_points": ("wigner_points", int),
    },
    "output": {"out_dir": ("out_dir", str), "seed": ("seed", int)},
}


def load_preset(name: str) -> ExperimentConfig:
    """Packaged defaults for one experiment."""
    if name not in EXPERIMENT_NAMES:
        raise ConfigError(
            f"unknown experiment {name!r}; available: {', '.join(EXPERIMENT_NAMES)}"
        )
    ref = resources.files("sqfock.harness") / "presets" / f"{name}.ini"
    parser = configparser.ConfigParser()
    parser.read_string(ref.read_text())
    return _apply(ExperimentConfig(name=name), parser, source=f"preset {name}")


def _apply(cfg: ExperimentConfig, parser: configparser.ConfigParser, source: str) -> ExperimentConfig:
    updates = {}
    for section in parser.sections():
        if section not in KEYMAP:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in KEYMAP[section]:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            attr, conv = KEYMAP[section][key]
            try:
                updates[attr] = conv(raw)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {key!r}: {raw!r}") from exc
    return replace(cfg, **updates)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a config file, overlaying its values on the named preset."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not parser.has_option("experiment", "name"):
        raise ConfigError(f"{path}: missing required field 'name' in [experiment]")
    name = parser.get("experiment", "name")
    cfg = load_preset(name)
    return _apply(cfg, parser, source=str(path))


def config_as_sections(cfg: ExperimentConfig) -> dict[str, dict[str, str]]:
    """Flatten a config back into its section layout (for metadata echoes)."""
    inverse: dict[str, tuple[str, str]] = {}
    for section, keys in KEYMAP.items():
        for key, (attr, _) in keys.items():
            inverse[attr] = (section, key)
    out: dict[str, dict[str, str]] = {}
    for f in fields(cfg):
        section, key = inverse[f.name]
        out.setdefault(section, {})[key] = str(getattr(cfg, f.name))
    return out
