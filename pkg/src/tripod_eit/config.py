"""JSON run configuration.

Frequencies are entered as ordinary frequencies in MHz and converted to
rad/us on load.  Rabi frequencies may instead be given in units of gamma_4
(``rabi_gamma4``) and detunings in units of the coupling Rabi frequency
(``detuning_omega_c``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
from scipy.constants import atomic_mass

from .atom_model import D1_CARRIER, RB87_MASS, AtomSpec, DriveConfig, angular
from .broadening import DopplerSettings
from .errors import ConfigError

_FIELD = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "rabi_mhz": {"type": "number", "minimum": 0},
        "rabi_gamma4": {"type": "number", "minimum": 0},
        "detuning_mhz": {"type": "number"},
        "detuning_omega_c": {"type": "number"},
        "linewidth_mhz": {"type": "number", "minimum": 0},
    },
    "not": {"anyOf": [{"required": ["rabi_mhz", "rabi_gamma4"]},
                      {"required": ["detuning_mhz", "detuning_omega_c"]}]},
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["atom", "fields", "sweep"],
    "properties": {
        "description": {"type": "string"},
        "atom": {
            "type": "object",
            "additionalProperties": False,
            "required": ["gamma4_mhz", "gamma2_mhz", "gamma3_mhz"],
            "properties": {
                "gamma4_mhz": {"type": "number", "exclusiveMinimum": 0},
                "gamma2_mhz": {"type": "number", "minimum": 0},
                "gamma3_mhz": {"type": "number", "minimum": 0},
                "branching": {"type": "array", "items": {"type": "number", "minimum": 0},
                              "minItems": 3, "maxItems": 3},
                "dephasing_mhz": {
                    "type": "object", "additionalProperties": False,
                    "properties": {k: {"type": "number", "minimum": 0} for k in ("2", "3", "4")},
                },
                "density_cm3": {"type": "number", "minimum": 0},
                "carrier_rad_s": {"type": "number", "exclusiveMinimum": 0},
                "mass_amu": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "fields": {
            "type": "object",
            "additionalProperties": False,
            "required": ["probe", "coupling", "signal"],
            "properties": {"probe": _FIELD, "coupling": _FIELD, "signal": _FIELD},
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["start_mhz", "stop_mhz"],
            "properties": {
                "start_mhz": {"type": "number"},
                "stop_mhz": {"type": "number"},
                "points": {"type": "integer", "minimum": 2},
                "channel": {"enum": ["probe", "signal"]},
                "method": {"enum": ["analytic", "numeric"]},
                "background": {"enum": ["pumped", "zeroth"]},
                "coupling_sign": {"enum": [1, -1]},
            },
        },
        "doppler": {
            "type": "object",
            "additionalProperties": False,
            "required": ["temperature_k"],
            "properties": {
                "temperature_k": {"type": "number", "minimum": 0},
                "nodes": {"type": "integer", "minimum": 8, "multipleOf": 2},
                "rule": {"enum": ["trapezoid", "gauss-hermite"]},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"path": {"type": "string"}},
        },
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with all frequencies in rad/us."""

    atom: AtomSpec
    drives: DriveConfig
    grid: np.ndarray
    channel: str = "probe"
    method: str = "analytic"
    background: str = "pumped"
    coupling_sign: int = 1
    doppler: DopplerSettings | None = None
    output: str | None = None
    raw: dict = field(default_factory=dict)

    def sweep_options(self) -> dict:
        return {"method": self.method, "background": self.background,
                "coupling_sign": self.coupling_sign}


def _atom(block: dict) -> AtomSpec:
    branching = tuple(block.get("branching", (1 / 3, 1 / 3, 1 / 3)))
    if abs(sum(branching) - 1) > 1e-9:
        raise ConfigError("atom.branching must sum to 1")
    dephasing = {int(k): angular(v) for k, v in block.get("dephasing_mhz", {}).items()}
    mass = block["mass_amu"] * atomic_mass if "mass_amu" in block else RB87_MASS
    return AtomSpec.rb87(
        gamma4=angular(block["gamma4_mhz"]), gamma2=angular(block["gamma2_mhz"]),
        gamma3=angular(block["gamma3_mhz"]), branching=branching, dephasing=dephasing,
        density=block.get("density_cm3", 1e14) * 1e6,
        carrier=block.get("carrier_rad_s", D1_CARRIER), mass=mass)


def _rabi(block: dict, gamma4: float) -> float:
    if "rabi_gamma4" in block:
        return block["rabi_gamma4"] * gamma4
    return angular(block.get("rabi_mhz", 0.0))


def _detuning(block: dict, omega_c: float) -> float:
    if "detuning_omega_c" in block:
        return block["detuning_omega_c"] * omega_c
    return angular(block.get("detuning_mhz", 0.0))


def from_dict(raw: dict) -> RunConfig:
    """Validate ``raw`` against the schema and build a :class:`RunConfig`."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {where}: {exc.message}") from exc
    atom = _atom(raw["atom"])
    fields = raw["fields"]
    g4 = atom.gamma4
    omega_c = _rabi(fields["coupling"], g4)
    drives = DriveConfig(
        omega_p=_rabi(fields["probe"], g4), omega_c=omega_c, omega_s=_rabi(fields["signal"], g4),
        delta_p=_detuning(fields["probe"], omega_c), delta_c=_detuning(fields["coupling"], omega_c),
        delta_s=_detuning(fields["signal"], omega_c),
        width_p=angular(fields["probe"].get("linewidth_mhz", 0.0)),
        width_c=angular(fields["coupling"].get("linewidth_mhz", 0.0)),
        width_s=angular(fields["signal"].get("linewidth_mhz", 0.0)))
    sw = raw["sweep"]
    if not sw["stop_mhz"] > sw["start_mhz"]:
        raise ConfigError("sweep.stop_mhz must exceed sweep.start_mhz")
    grid = angular(np.linspace(sw["start_mhz"], sw["stop_mhz"], sw.get("points", 2001)))
    doppler = None
    if "doppler" in raw:
        d = raw["doppler"]
        doppler = DopplerSettings(d["temperature_k"], mass=atom.mass, carrier=atom.carrier,
                                  nodes=d.get("nodes", 768), rule=d.get("rule", "trapezoid"))
    return RunConfig(atom, drives, grid, sw.get("channel", "probe"), sw.get("method", "analytic"),
                     sw.get("background", "pumped"), sw.get("coupling_sign", 1), doppler,
                     raw.get("output", {}).get("path"), raw)


def bundled_configs() -> list[str]:
    """Names of the configurations shipped with the package."""
    root = resources.files("tripod_eit") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(source: str | Path) -> RunConfig:
    """Load a configuration from a JSON file, or a bundled one by name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif str(source) in bundled_configs():
        text = (resources.files("tripod_eit") / "configs" / f"{source}.json").read_text("utf-8")
    else:
        raise ConfigError(f"no configuration file or bundled configuration named {source!r}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    return from_dict(raw)
