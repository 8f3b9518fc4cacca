"""Run configuration: JSON with explicit units in every key name.

No unit inference is performed anywhere; a key like "torso_radius" (no
unit suffix) is rejected as unknown. Every dimension of the phantom and
every solver control can be overridden; the defaults reproduce the
documented reference setup (four bands, 0..0.6 m sweep, X = 0.5 m).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .errors import ConfigError
from .fom import FomParams
from .eqs import SolverSettings
from .phantom import PhantomModel
from .rf import RF_VALIDITY_FLOOR_HZ

log = logging.getLogger(__name__)

MODEL_EQS = "eqs"
MODEL_RF = "rf"


@dataclass(frozen=True)
class BandConfig:
    frequency_hz: float
    model: str

    def __post_init__(self):
        if self.frequency_hz <= 0:
            raise ConfigError(f"band frequency must be positive, got {self.frequency_hz!r}")
        if self.model not in (MODEL_EQS, MODEL_RF):
            raise ConfigError(f"band model must be '{MODEL_EQS}' or '{MODEL_RF}', got {self.model!r}")


@dataclass(frozen=True)
class GridConfig:
    spacing_m: float = 0.01
    padding_m: float = 0.1


@dataclass(frozen=True)
class TxCouplerConfig:
    electrode_size_m: float = 0.004
    separation_m: float = 0.03
    excitation_v: float = 1.0
    rx_electrode_size_m: float = 0.02


@dataclass(frozen=True)
class RunConfig:
    phantom: PhantomModel = field(default_factory=PhantomModel)
    bands: tuple[BandConfig, ...] = ()
    rx_distances_m: tuple[float, ...] = ()
    fom: FomParams = field(default_factory=FomParams)
    solver: SolverSettings = field(default_factory=SolverSettings)
    grid: GridConfig = field(default_factory=GridConfig)
    tx_coupler: TxCouplerConfig = field(default_factory=TxCouplerConfig)
    tissue_file: str | None = None
    output_dir: str = "out"
    allow_model_override: bool = False

    def __post_init__(self):
        if not self.bands:
            raise ConfigError("at least one band is required")
        seen = set()
        for band in self.bands:
            if band.frequency_hz in seen:
                raise ConfigError(f"duplicate band {band.frequency_hz} Hz")
            seen.add(band.frequency_hz)
            required = MODEL_EQS if band.frequency_hz < RF_VALIDITY_FLOOR_HZ else MODEL_RF
            if band.model != required:
                msg = (
                    f"band {band.frequency_hz:g} Hz maps to model {band.model!r}; bands "
                    f"{'below' if required == MODEL_EQS else 'at or above'} "
                    f"{RF_VALIDITY_FLOOR_HZ:g} Hz normally use {required!r}"
                )
                if not self.allow_model_override:
                    raise ConfigError(msg + " (set allow_model_override to force)")
                log.warning("%s; proceeding because allow_model_override is set", msg)
        dists = tuple(float(d) for d in self.rx_distances_m)
        object.__setattr__(self, "rx_distances_m", dists)
        if not dists or dists[0] != 0.0:
            raise ConfigError("rx_distances_m must start at 0")
        if any(b <= a for a, b in zip(dists, dists[1:])):
            raise ConfigError("rx_distances_m must be strictly increasing")
        if self.fom.eval_distance_x_m > dists[-1]:
            raise ConfigError(
                f"fom eval distance {self.fom.eval_distance_x_m} m exceeds the "
                f"largest rx distance {dists[-1]} m"
            )


def default_config_dict() -> dict:
    """The documented reference run: four bands, default phantom."""
    return {
        "phantom": {
            "torso_radius_m": 0.15,
            "torso_length_m": 0.6,
            "arm_radius_m": 0.05,
            "arm_length_m": 0.6,
            "arm_offset_m": 0.2,
            "skin_thickness_m": 0.002,
            "implant_depth_m": 0.03,
            "air_pocket_radius_m": 0.01,
        },
        "bands": [
            {"frequency_hz": 21.0e6, "model": MODEL_EQS},
            {"frequency_hz": 400.0e6, "model": MODEL_RF},
            {"frequency_hz": 900.0e6, "model": MODEL_RF},
            {"frequency_hz": 2.4e9, "model": MODEL_RF},
        ],
        "rx_distances_m": [round(0.05 * i, 2) for i in range(11)],
        "fom": {"eval_distance_x_m": 0.5, "w_ll": 1.0, "w_dpl": 1.0},
        # omega 1.93 is close to optimal for the default grid; the
        # SolverSettings class default stays at the conservative 1.8.
        "solver": {"tol": 1e-6, "max_iter": 50000, "scheme": "sor", "omega": 1.93},
        "grid": {"spacing_m": 0.01, "padding_m": 0.1},
        "tx_coupler": {
            "electrode_size_m": 0.004,
            "separation_m": 0.03,
            "excitation_v": 1.0,
            "rx_electrode_size_m": 0.02,
        },
        "tissue_file": None,
        "output_dir": "out",
    }


def default_run_config() -> RunConfig:
    return config_from_dict(default_config_dict())


_PHANTOM_KEYS = {
    "torso_radius_m", "torso_length_m", "torso_axis",
    "arm_radius_m", "arm_length_m", "arm_axis", "arm_offset_m",
    "skin_thickness_m", "interior_tissue", "implant_depth_m", "air_pocket_radius_m",
}
_TOP_KEYS = {
    "phantom", "bands", "rx_distances_m", "fom", "solver", "grid",
    "tx_coupler", "tissue_file", "output_dir", "allow_model_override",
}
_FOM_KEYS = {"eval_distance_x_m", "w_ll", "w_dpl"}
_SOLVER_KEYS = {"tol", "max_iter", "scheme", "omega"}
_GRID_KEYS = {"spacing_m", "padding_m"}
_COUPLER_KEYS = {"electrode_size_m", "separation_m", "excitation_v", "rx_electrode_size_m"}
_BAND_KEYS = {"frequency_hz", "model"}


def _check_keys(section: str, data: dict, allowed: set) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be an object, got {type(data).__name__}")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(unknown)}")


def config_from_dict(raw: dict) -> RunConfig:
    _check_keys("config", raw, _TOP_KEYS)
    _check_keys("phantom", raw.get("phantom", {}), _PHANTOM_KEYS)
    _check_keys("fom", raw.get("fom", {}), _FOM_KEYS)
    _check_keys("solver", raw.get("solver", {}), _SOLVER_KEYS)
    _check_keys("grid", raw.get("grid", {}), _GRID_KEYS)
    _check_keys("tx_coupler", raw.get("tx_coupler", {}), _COUPLER_KEYS)
    bands_raw = raw.get("bands", [])
    if not isinstance(bands_raw, list):
        raise ConfigError("bands must be a list")
    for b in bands_raw:
        _check_keys("band", b, _BAND_KEYS)
        if set(b) != _BAND_KEYS:
            raise ConfigError("every band needs frequency_hz and model")
    try:
        return RunConfig(
            phantom=PhantomModel(**raw.get("phantom", {})),
            bands=tuple(BandConfig(**b) for b in bands_raw),
            rx_distances_m=tuple(raw.get("rx_distances_m", ())),
            fom=FomParams(**raw.get("fom", {})),
            solver=SolverSettings(**raw.get("solver", {})),
            grid=GridConfig(**raw.get("grid", {})),
            tx_coupler=TxCouplerConfig(**raw.get("tx_coupler", {})),
            tissue_file=raw.get("tissue_file"),
            output_dir=raw.get("output_dir", "out"),
            allow_model_override=bool(raw.get("allow_model_override", False)),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(raw)
