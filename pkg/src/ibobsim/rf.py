"""Analytic RF in-body-to-out-of-body path loss (400 MHz - 2.4 GHz).

Single straight ray at normal incidence: plane-wave absorption through
each tissue layer, Fresnel power transmission at each material interface,
and free-space spreading over the total Tx-Rx distance. No multipath, no
surface waves and no antenna gain or mismatch terms, so the result
reflects only the signal's interaction with tissue.

Spreading uses 20*log10(4*pi*d_total/lambda) with d_total measured from
the transmitter, which keeps the curve continuous at the skin surface.
Inside the near zone (d_total < lambda/(4*pi), where that expression goes
negative) the value is kept as-is and the curve is flagged `near_field`
instead of being clamped; clamping at 0 dB would distort the distance-0
references that the figure of merit is built on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import C0
from .curves import CurveSource, PathLossCurve, Scenario
from .errors import ModelDomainError
from .phantom import PhantomModel
from .tissues import (
    ComplexPermittivity,
    FREE_SPACE,
    Frequency,
    complex_permittivity,
    default_tissue_library,
    intrinsic_impedance,
    tissue_loss_db,
)

RF_VALIDITY_FLOOR_HZ = 100e6
TOTAL_REFLECTION_CAP_DB = 200.0


@dataclass(frozen=True)
class LayerPath:
    """Ordered tissue layers crossed by the outward ray from Tx to air."""

    layers: tuple[tuple[str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple((str(n), float(t)) for n, t in self.layers))
        for name, t in self.layers:
            if not (math.isfinite(t) and t > 0):
                raise ValueError(f"layer {name!r} thickness must be positive, got {t!r}")


def layer_path_from_phantom(phantom: PhantomModel) -> LayerPath:
    """Layers from the pocket edge to the outer skin along +x.

    Zero-thickness layers are dropped, so a degenerate phantom (implant
    fully inside its air pocket, no skin) yields an empty path and the
    channel collapses to pure free space.
    """
    muscle_t = phantom.implant_depth_m - phantom.air_pocket_radius_m - phantom.skin_thickness_m
    if muscle_t < 0:
        raise ValueError("air pocket and skin are thicker than the implant depth")
    layers = []
    if muscle_t > 0:
        layers.append((phantom.interior_tissue, muscle_t))
    if phantom.skin_thickness_m > 0:
        layers.append(("skin", phantom.skin_thickness_m))
    return LayerPath(tuple(layers))


def interface_transmission_db(
    eps_a: ComplexPermittivity, eps_b: ComplexPermittivity, f: Frequency
) -> float:
    """Normal-incidence Fresnel power transmission loss, in dB (>= 0).

    -10*log10(1 - |G|^2) with G = (eta_b - eta_a)/(eta_b + eta_a).
    Symmetric in its two media. Total reflection is capped at 200 dB and
    reported through a warning instead of +inf.
    """
    eta_a = intrinsic_impedance(eps_a, f)
    eta_b = intrinsic_impedance(eps_b, f)
    gamma2 = abs((eta_b - eta_a) / (eta_b + eta_a)) ** 2
    if gamma2 >= 1.0:
        warnings.warn("total reflection at interface; transmission capped at 200 dB")
        return TOTAL_REFLECTION_CAP_DB
    loss = -10.0 * math.log10(1.0 - gamma2)
    if loss > TOTAL_REFLECTION_CAP_DB:
        warnings.warn("near-total reflection at interface; transmission capped at 200 dB")
        return TOTAL_REFLECTION_CAP_DB
    return loss


def spreading_db(total_distance_m: float, f: Frequency) -> float:
    """Free-space spreading 20*log10(4*pi*d/lambda); negative in the near zone."""
    if not (math.isfinite(total_distance_m) and total_distance_m > 0):
        raise ValueError(f"total distance must be positive, got {total_distance_m!r}")
    return 20.0 * math.log10(4.0 * math.pi * total_distance_m / f.wavelength_m)


def near_field_limit_m(f: Frequency) -> float:
    """Distance below which the spreading term turns negative."""
    return f.wavelength_m / (4.0 * math.pi)


def _check_distances(rx_distances_m) -> list[float]:
    distances = [float(d) for d in rx_distances_m]
    if not distances or distances[0] != 0.0:
        raise ValueError("rx distances must start at 0")
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise ValueError("rx distances must be strictly increasing")
    return distances


def inbody_curve(
    phantom: PhantomModel,
    band: Frequency,
    rx_distances_m,
    tissues=None,
) -> PathLossCurve:
    """Case I: Tx implanted, Rx moving away from the skin surface.

    loss(d) = sum(layer absorption) + sum(interface transmission)
              + spreading(implant_depth + d)
    """
    if band.hertz < RF_VALIDITY_FLOOR_HZ:
        raise ModelDomainError(
            f"{band.hertz:.3g} Hz is below the {RF_VALIDITY_FLOOR_HZ:.3g} Hz validity floor "
            "of the ray model; use the electro-quasistatic solver for HBC bands"
        )
    distances = _check_distances(rx_distances_m)
    lib = default_tissue_library() if tissues is None else tissues
    path = layer_path_from_phantom(phantom)

    # Media sequence from the launch medium to outside air; the Tx air
    # pocket is a lossless gap ahead of the first tissue layer.
    media: list[ComplexPermittivity] = []
    if phantom.air_pocket_radius_m > 0:
        media.append(FREE_SPACE)
    fixed_db = 0.0
    for name, thickness in path.layers:
        if name not in lib:
            raise ValueError(f"tissue {name!r} missing from the tissue library")
        eps = complex_permittivity(lib[name], band)
        fixed_db += tissue_loss_db(eps, band, thickness)
        media.append(eps)
    media.append(FREE_SPACE)
    for eps_a, eps_b in zip(media, media[1:]):
        fixed_db += interface_transmission_db(eps_a, eps_b, band)

    depth = phantom.implant_depth_m
    limit = near_field_limit_m(band)
    samples = tuple((d, fixed_db + spreading_db(depth + d, band)) for d in distances)
    return PathLossCurve(
        band=band,
        scenario=Scenario.IN_BODY,
        samples=samples,
        source=CurveSource.SIMULATED,
        near_field=(depth + distances[0]) < limit,
    )


def freespace_curve(band: Frequency, baseline_separation_m: float, rx_distances_m) -> PathLossCurve:
    """Case II: same Tx-Rx separations without the body.

    baseline_separation_m is the Case-I Tx-to-skin distance (the implant
    depth), so sample d corresponds to a total separation baseline + d.
    """
    if not (math.isfinite(baseline_separation_m) and baseline_separation_m > 0):
        raise ValueError("baseline separation must be positive")
    distances = _check_distances(rx_distances_m)
    samples = tuple((d, spreading_db(baseline_separation_m + d, band)) for d in distances)
    return PathLossCurve(
        band=band,
        scenario=Scenario.FREE_SPACE,
        samples=samples,
        source=CurveSource.SIMULATED,
        near_field=(baseline_separation_m + distances[0]) < near_field_limit_m(band),
    )
