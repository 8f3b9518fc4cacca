"""Leakage loss, body excess loss and the figure of merit.

Curves store positive path loss, so here

    LL_X        = PL(X) - PL(0)          (body curve)
    dPL_body    = PL_body(0) - PL_air(0)
    FoM         = LL_X - dPL_body

which reproduces the published signal-level formulation exactly: a large
LL_X means the signal decays quickly away from the body (harder to
eavesdrop), a negative dPL_body means the body helps the link, and a
higher FoM is better.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .curves import PathLossCurve, Scenario
from .errors import ExtrapolationError, PairingError
from .tissues import Frequency

REPORT_COLUMNS = (
    "band_hz",
    "x_m",
    "ll_x_db",
    "delta_pl_body_db",
    "fom_db",
    "weighted_fom_db",
    "w_ll",
    "w_dpl",
)
REPORT_HEADER = ",".join(REPORT_COLUMNS)


@dataclass(frozen=True)
class FomParams:
    """Evaluation distance X and the two non-negative weights."""

    eval_distance_x_m: float = 0.5
    w_ll: float = 1.0
    w_dpl: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.eval_distance_x_m) and self.eval_distance_x_m >= 0):
            raise ValueError("eval distance must be >= 0 and finite")
        if not (math.isfinite(self.w_ll) and self.w_ll >= 0):
            raise ValueError("w_ll must be >= 0")
        if not (math.isfinite(self.w_dpl) and self.w_dpl >= 0):
            raise ValueError("w_dpl must be >= 0")
        if self.w_ll == 0 and self.w_dpl == 0:
            raise ValueError("weights must not both be zero")


@dataclass(frozen=True)
class FomReport:
    """Per-band figure-of-merit summary."""

    band: Frequency
    eval_distance_x_m: float
    ll_x_db: float
    delta_pl_body_db: float
    fom_db: float
    weighted_fom_db: float
    w_ll: float = 1.0
    w_dpl: float = 1.0

    def csv_row(self) -> str:
        values = (
            self.band.hertz,
            self.eval_distance_x_m,
            self.ll_x_db,
            self.delta_pl_body_db,
            self.fom_db,
            self.weighted_fom_db,
            self.w_ll,
            self.w_dpl,
        )
        return ",".join(format(v, ".10g") for v in values)


def path_loss_at(curve: PathLossCurve, x_m: float) -> float:
    """Loss at x, linearly interpolated; exact at sample points.

    Never extrapolates: x outside the sampled range raises
    ExtrapolationError.
    """
    if not math.isfinite(x_m):
        raise ValueError(f"x must be finite, got {x_m!r}")
    distances = curve.distances_m
    losses = curve.losses_db
    if x_m < distances[0] or x_m > distances[-1]:
        raise ExtrapolationError(
            f"x = {x_m} m is outside the sampled range "
            f"[{distances[0]}, {distances[-1]}] m; refusing to extrapolate"
        )
    i = bisect_left(distances, x_m)
    if i < len(distances) and distances[i] == x_m:
        return losses[i]
    d0, d1 = distances[i - 1], distances[i]
    l0, l1 = losses[i - 1], losses[i]
    t = (x_m - d0) / (d1 - d0)
    return l0 + t * (l1 - l0)


def leakage_loss(curve: PathLossCurve, x_m: float) -> float:
    """Extra attenuation accrued between the body surface and x: PL(x) - PL(0)."""
    return path_loss_at(curve, x_m) - curve.losses_db[0]


def delta_pl_body(body_curve: PathLossCurve, air_curve: PathLossCurve) -> float:
    """Distance-0 excess loss caused by the body: PL_body(0) - PL_air(0).

    Negative means the body improves the channel relative to free space.
    """
    if body_curve.band.hertz != air_curve.band.hertz:
        raise PairingError(
            f"band mismatch: body curve at {body_curve.band.hertz} Hz, "
            f"air curve at {air_curve.band.hertz} Hz"
        )
    if body_curve.scenario is not Scenario.IN_BODY:
        raise PairingError(f"body curve has scenario {body_curve.scenario.value!r}")
    if air_curve.scenario is not Scenario.FREE_SPACE:
        raise PairingError(f"air curve has scenario {air_curve.scenario.value!r}")
    return body_curve.losses_db[0] - air_curve.losses_db[0]


def fom(ll_x_db: float, dpl_db: float) -> float:
    """Figure of merit LL_X - dPL_body; higher is better."""
    if not (math.isfinite(ll_x_db) and math.isfinite(dpl_db)):
        raise ValueError("FoM inputs must be finite")
    return ll_x_db - dpl_db


def weighted_fom(ll_x_db: float, dpl_db: float, w_ll: float, w_dpl: float) -> float:
    """w_ll*LL_X - w_dpl*dPL_body; equals fom() for weights (1, 1)."""
    if not (math.isfinite(ll_x_db) and math.isfinite(dpl_db)):
        raise ValueError("FoM inputs must be finite")
    if w_ll < 0 or w_dpl < 0:
        raise ValueError("weights must be >= 0")
    if w_ll == 0 and w_dpl == 0:
        raise ValueError("weights must not both be zero")
    return w_ll * ll_x_db - w_dpl * dpl_db


def make_report(
    body_curve: PathLossCurve, air_curve: PathLossCurve, params: FomParams = FomParams()
) -> FomReport:
    """Full per-band pipeline: LL_X, dPL_body, FoM and weighted FoM."""
    ll = leakage_loss(body_curve, params.eval_distance_x_m)
    dpl = delta_pl_body(body_curve, air_curve)
    return FomReport(
        band=body_curve.band,
        eval_distance_x_m=params.eval_distance_x_m,
        ll_x_db=ll,
        delta_pl_body_db=dpl,
        fom_db=fom(ll, dpl),
        weighted_fom_db=weighted_fom(ll, dpl, params.w_ll, params.w_dpl),
        w_ll=params.w_ll,
        w_dpl=params.w_dpl,
    )


def rank_bands(reports) -> list[FomReport]:
    """Descending by weighted FoM (== FoM at unit weights); frequency breaks ties.

    The input must hold distinct bands; the output is a permutation of it.
    """
    reports = list(reports)
    if not reports:
        raise PairingError("need at least one report to rank")
    seen = set()
    for r in reports:
        if r.band.hertz in seen:
            raise PairingError(f"duplicate band {r.band.hertz} Hz in ranking input")
        seen.add(r.band.hertz)
    return sorted(reports, key=lambda r: (-r.weighted_fom_db, r.band.hertz))


def write_report_csv(reports) -> str:
    lines = [REPORT_HEADER]
    lines.extend(r.csv_row() for r in reports)
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str) -> list[FomReport]:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if not lines or lines[0].strip() != REPORT_HEADER:
        raise PairingError(f"report CSV must start with header {REPORT_HEADER!r}")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(REPORT_COLUMNS):
            raise PairingError(f"report row has {len(parts)} fields, expected {len(REPORT_COLUMNS)}")
        vals = [float(p) for p in parts]
        out.append(
            FomReport(
                band=Frequency(vals[0]),
                eval_distance_x_m=vals[1],
                ll_x_db=vals[2],
                delta_pl_body_db=vals[3],
                fom_db=vals[4],
                weighted_fom_db=vals[5],
                w_ll=vals[6],
                w_dpl=vals[7],
            )
        )
    return out
