"""Path-loss CSV ingestion and cleanup for measured sweeps.

Measured data flows through the identical FoM pipeline as simulated data;
the only difference is the curve's source tag. The CSV format is the one
the simulator emits:

    distance_m,loss_db
    0,40
    0.1,45

Distances are meters and must be strictly increasing from 0; losses are
positive-convention dB. No unit auto-detection is performed; exports in
signal-level convention must be converted explicitly (CLI --negate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curves import CurveSource, PathLossCurve, Scenario
from .errors import (
    CsvEmptyError,
    CsvFormatError,
    CsvMonotonicityError,
    CsvValueError,
)
from .tissues import Frequency

CSV_HEADER = "distance_m,loss_db"


@dataclass(frozen=True)
class MeasurementSet:
    """A matched body/air pair of measured sweeps for one band."""

    band: Frequency
    body_curve: PathLossCurve
    air_curve: PathLossCurve
    notes: str = ""

    def __post_init__(self):
        if self.body_curve.band.hertz != self.band.hertz:
            raise ValueError("body curve band does not match the set band")
        if self.air_curve.band.hertz != self.band.hertz:
            raise ValueError("air curve band does not match the set band")
        if self.body_curve.scenario is not Scenario.IN_BODY:
            raise ValueError("body curve must be an in-body sweep")
        if self.air_curve.scenario is not Scenario.FREE_SPACE:
            raise ValueError("air curve must be a free-space sweep")


def _fmt(value: float) -> str:
    return format(value, ".6g")


def parse_pl_csv(data, declared_band: Frequency, scenario: Scenario) -> PathLossCurve:
    """Parse CSV bytes/text into a Measured-source curve.

    Rows are validated, never repaired: a missing header, non-monotonic
    distances, non-finite numbers or an empty body each raise a dedicated
    error citing the offending 1-based line.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CsvFormatError(f"not UTF-8 text: {exc}", line=1) from None
    lines = data.replace("\r\n", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CsvFormatError(f"missing header {CSV_HEADER!r}", line=1)
    samples = []
    prev = -math.inf
    for lineno, raw in enumerate(lines[1:], start=2):
        if raw.strip() == "":
            raise CsvFormatError("blank row inside data", line=lineno)
        parts = raw.split(",")
        if len(parts) != 2:
            raise CsvFormatError(f"expected 2 fields, got {len(parts)}", line=lineno)
        try:
            d = float(parts[0])
            loss = float(parts[1])
        except ValueError:
            raise CsvValueError(f"unparseable number in row {raw!r}", line=lineno) from None
        if not (math.isfinite(d) and math.isfinite(loss)):
            raise CsvValueError(f"non-finite value in row {raw!r}", line=lineno)
        if not samples and d != 0.0:
            raise CsvValueError(f"first sample must be at distance 0, got {d!r}", line=lineno)
        if d <= prev:
            raise CsvMonotonicityError(
                f"distance {d!r} not greater than previous {prev!r}", line=lineno
            )
        prev = d
        samples.append((d, loss))
    if not samples:
        raise CsvEmptyError("header present but no data rows", line=2)
    return PathLossCurve(
        band=declared_band,
        scenario=scenario,
        samples=tuple(samples),
        source=CurveSource.MEASURED,
    )


def write_pl_csv(curve: PathLossCurve) -> bytes:
    """Canonical CSV bytes: header, one row per sample, 6 significant digits,
    LF line endings, newline-terminated. parse(write(c)) is the identity for
    curves whose values are representable at that precision."""
    lines = [CSV_HEADER]
    lines.extend(f"{_fmt(d)},{_fmt(loss)}" for d, loss in curve.samples)
    return ("\n".join(lines) + "\n").encode("utf-8")


def negate_losses(curve: PathLossCurve) -> PathLossCurve:
    """Flip signal-level exports (negative-dB gains) to positive losses."""
    return curve.with_losses([-l for l in curve.losses_db])


def moving_average(curve: PathLossCurve, window: int) -> PathLossCurve:
    """Centered moving average of the losses; distances unchanged.

    The window must be odd and no longer than the curve. At the edges the
    window shrinks to the available one-sided samples rather than padding,
    so no data is invented at the security-critical distance-0 point.
    Constant stretches pass through exactly and the output never leaves
    the [min, max] range of the windowed input.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and positive, got {window}")
    n = len(curve.samples)
    if window > n:
        raise ValueError(f"window {window} exceeds the sample count {n}")
    losses = curve.losses_db
    half = window // 2
    smoothed = []
    for i in range(n):
        chunk = losses[max(0, i - half): min(n, i + half + 1)]
        lo, hi = min(chunk), max(chunk)
        if lo == hi:
            smoothed.append(lo)
            continue
        smoothed.append(min(hi, max(lo, math.fsum(chunk) / len(chunk))))
    return curve.with_losses(smoothed)
