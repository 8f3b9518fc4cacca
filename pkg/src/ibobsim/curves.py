"""Path-loss-vs-distance curves shared by the solvers, the FoM pipeline
and measurement ingestion.

Losses are stored in the positive-loss convention: a larger dB value means
a weaker received signal. Distances are measured from the outer skin
surface along the outward ray through the transmitter; every curve starts
at distance 0 (receiver touching the body).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .tissues import Frequency


class Scenario(Enum):
    """Transmitter context: inside the body, or the body removed."""

    IN_BODY = "inbody"
    FREE_SPACE = "freespace"


class CurveSource(Enum):
    SIMULATED = "simulated"
    MEASURED = "measured"


@dataclass(frozen=True)
class PathLossCurve:
    """Sampled path loss for one band and one scenario.

    samples holds (distance_m, loss_db) pairs with strictly increasing
    distances starting at 0. near_field marks curves with at least one
    sample inside the Friis near zone (total Tx-Rx distance < lambda/4pi),
    where the spreading term is extrapolated beyond its validity.
    """

    band: Frequency
    scenario: Scenario
    samples: tuple[tuple[float, float], ...]
    source: CurveSource = CurveSource.SIMULATED
    near_field: bool = False

    def __post_init__(self):
        samples = tuple((float(d), float(l)) for d, l in self.samples)
        object.__setattr__(self, "samples", samples)
        if not samples:
            raise ValueError("curve needs at least one sample")
        if samples[0][0] != 0.0:
            raise ValueError(f"first sample must be at distance 0, got {samples[0][0]!r}")
        prev = -math.inf
        for d, loss in samples:
            if not (math.isfinite(d) and math.isfinite(loss)):
                raise ValueError(f"non-finite sample ({d!r}, {loss!r})")
            if d <= prev:
                raise ValueError(f"distances must be strictly increasing, {d!r} after {prev!r}")
            prev = d

    @property
    def distances_m(self) -> tuple[float, ...]:
        return tuple(d for d, _ in self.samples)

    @property
    def losses_db(self) -> tuple[float, ...]:
        return tuple(l for _, l in self.samples)

    @property
    def max_distance_m(self) -> float:
        return self.samples[-1][0]

    def with_losses(self, losses_db) -> "PathLossCurve":
        """Same curve geometry with replaced loss values."""
        losses = tuple(float(v) for v in losses_db)
        if len(losses) != len(self.samples):
            raise ValueError("loss count must match sample count")
        return replace(self, samples=tuple(zip(self.distances_m, losses)))
