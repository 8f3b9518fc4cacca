"""ibobsim: in-body to out-of-body wireless channel simulator.

Computes path-loss-vs-distance curves for human body communication
(electro-quasistatic solver, 21 MHz) and RF ISM bands (analytic layered
model, 400 MHz / 900 MHz / 2.4 GHz), and evaluates a figure of merit that
combines physical-layer security (leakage loss away from the body) with
communication power (body-induced excess loss).
"""

__version__ = "0.1.0"

from .curves import CurveSource, PathLossCurve, Scenario
from .tissues import (
    ColeColeParams,
    ColeColePole,
    ComplexPermittivity,
    Frequency,
    PropagationConstants,
    complex_permittivity,
    default_tissue_library,
    load_tissue_file,
    propagation_constants,
    tissue_loss_db,
)
from .phantom import CouplerMode, CouplerSpec, PhantomModel, VoxelGrid, default_phantom, place_coupler, voxelize
from .eqs import ComplexField, SolverSettings, hbc_path_loss_sweep, probe_voltage, solve_potential
from .rf import LayerPath, freespace_curve, inbody_curve, interface_transmission_db
from .fom import (
    FomParams,
    FomReport,
    delta_pl_body,
    fom,
    leakage_loss,
    make_report,
    path_loss_at,
    rank_bands,
    weighted_fom,
)
from .measio import MeasurementSet, moving_average, parse_pl_csv, write_pl_csv

__all__ = [
    "__version__",
    "ColeColeParams", "ColeColePole", "ComplexPermittivity", "Frequency",
    "PropagationConstants", "complex_permittivity", "default_tissue_library",
    "load_tissue_file", "propagation_constants", "tissue_loss_db",
    "CurveSource", "PathLossCurve", "Scenario",
    "CouplerMode", "CouplerSpec", "PhantomModel", "VoxelGrid",
    "default_phantom", "place_coupler", "voxelize",
    "ComplexField", "SolverSettings", "hbc_path_loss_sweep", "probe_voltage", "solve_potential",
    "LayerPath", "freespace_curve", "inbody_curve", "interface_transmission_db",
    "FomParams", "FomReport", "delta_pl_body", "fom", "leakage_loss",
    "make_report", "path_loss_at", "rank_bands", "weighted_fom",
    "MeasurementSet", "moving_average", "parse_pl_csv", "write_pl_csv",
]
