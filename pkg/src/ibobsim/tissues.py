"""Frequency-dependent tissue dielectric properties.

Tissues are described by multi-pole Cole-Cole fits

    eps_hat(w) = eps_inf + sum_n  deps_n / (1 + (j*w*tau_n)^(1-alpha_n))
                 + sigma_i / (j*w*EPS0)

from which the effective conductivity, plane-wave attenuation/phase
constants and per-layer losses are derived.  Parameter values for skin,
muscle and fat ship as a data file (see `data/tissues.txt`); nothing in
this module is tied to those particular tissues.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from importlib import resources

from .constants import C0, EPS0, MU0, NP_TO_DB
from .errors import NumericDomainError, TissueFileError

MAX_POLES = 4


@dataclass(frozen=True)
class Frequency:
    """A positive, finite frequency in hertz."""

    hertz: float

    def __post_init__(self):
        if not (math.isfinite(self.hertz) and self.hertz > 0):
            raise ValueError(f"frequency must be positive and finite, got {self.hertz!r}")

    @property
    def omega(self) -> float:
        """Angular frequency, rad/s."""
        return 2.0 * math.pi * self.hertz

    @property
    def wavelength_m(self) -> float:
        """Free-space wavelength, m."""
        return C0 / self.hertz


@dataclass(frozen=True)
class ColeColePole:
    """One relaxation term: dispersion magnitude, time constant, broadening."""

    delta_eps: float
    tau_s: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.delta_eps) and self.delta_eps >= 0):
            raise ValueError(f"delta_eps must be >= 0, got {self.delta_eps!r}")
        if not (math.isfinite(self.tau_s) and self.tau_s > 0):
            raise ValueError(f"tau_s must be > 0, got {self.tau_s!r}")
        if not (math.isfinite(self.alpha) and 0 <= self.alpha < 1):
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha!r}")


@dataclass(frozen=True)
class ColeColeParams:
    """Cole-Cole parameter set for one tissue (up to four poles)."""

    eps_inf: float
    poles: tuple[ColeColePole, ...]
    sigma_ionic: float

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(self.poles))
        if not (math.isfinite(self.eps_inf) and self.eps_inf >= 1):
            raise ValueError(f"eps_inf must be >= 1, got {self.eps_inf!r}")
        if len(self.poles) > MAX_POLES:
            raise ValueError(f"at most {MAX_POLES} poles supported, got {len(self.poles)}")
        if not (math.isfinite(self.sigma_ionic) and self.sigma_ionic >= 0):
            raise ValueError(f"sigma_ionic must be >= 0, got {self.sigma_ionic!r}")


@dataclass(frozen=True)
class ComplexPermittivity:
    """Real relative permittivity and effective conductivity at one frequency."""

    eps_r_real: float
    sigma_eff: float

    def __post_init__(self):
        if not math.isfinite(self.eps_r_real):
            raise ValueError("eps_r_real must be finite")
        if not (math.isfinite(self.sigma_eff) and self.sigma_eff >= 0):
            raise ValueError(f"sigma_eff must be >= 0, got {self.sigma_eff!r}")

    def eps_hat(self, f: Frequency) -> complex:
        """Complex relative permittivity eps' - j*sigma/(w*EPS0)."""
        return complex(self.eps_r_real, -self.sigma_eff / (f.omega * EPS0))

    def loss_tangent(self, f: Frequency) -> float:
        return self.sigma_eff / (f.omega * EPS0 * self.eps_r_real)


# Free space / air, used for pockets and for the region outside the body.
FREE_SPACE = ComplexPermittivity(1.0, 0.0)


@dataclass(frozen=True)
class PropagationConstants:
    """Plane-wave constants in a lossy medium."""

    alpha_np_per_m: float   # attenuation constant, Np/m
    beta_rad_per_m: float   # phase constant, rad/m
    skin_depth_m: float     # 1/alpha; +inf for a lossless medium


def complex_relative_permittivity(params: ColeColeParams, f: Frequency) -> complex:
    """Evaluate the Cole-Cole sum; principal branch for (j*w*tau)^(1-alpha)."""
    w = f.omega
    eps = complex(params.eps_inf, 0.0)
    for pole in params.poles:
        eps += pole.delta_eps / (1.0 + (1j * w * pole.tau_s) ** (1.0 - pole.alpha))
    if params.sigma_ionic > 0:
        eps += params.sigma_ionic / (1j * w * EPS0)
    if not (math.isfinite(eps.real) and math.isfinite(eps.imag)):
        raise NumericDomainError(f"non-finite permittivity at {f.hertz} Hz: {eps!r}")
    return eps


def complex_permittivity(params: ColeColeParams, f: Frequency) -> ComplexPermittivity:
    """Tissue permittivity and effective conductivity at frequency f.

    sigma_eff = -w*EPS0*Im(eps_hat), which folds the ionic conductivity and
    all relaxation losses into a single conductivity. Passivity of the
    Cole-Cole model guarantees sigma_eff >= 0.
    """
    eps = complex_relative_permittivity(params, f)
    sigma = -f.omega * EPS0 * eps.imag
    if sigma < 0:
        raise NumericDomainError(
            f"negative effective conductivity {sigma!r} at {f.hertz} Hz (non-passive parameters)"
        )
    return ComplexPermittivity(eps.real, sigma)


def propagation_constants(eps: ComplexPermittivity, f: Frequency) -> PropagationConstants:
    """Attenuation and phase constants of a uniform plane wave.

    alpha = w*sqrt(MU0*EPS0*eps'/2 * (sqrt(1 + tan^2 d) - 1))
    beta  = w*sqrt(MU0*EPS0*eps'/2 * (sqrt(1 + tan^2 d) + 1))

    with tan d = sigma/(w*EPS0*eps'). For sigma == 0 this reduces exactly
    to alpha = 0, beta = w*sqrt(MU0*EPS0*eps'), skin depth = +inf.
    """
    w = f.omega
    if eps.eps_r_real < 0:
        raise NumericDomainError(f"negative eps_r_real {eps.eps_r_real!r}")
    if eps.sigma_eff == 0.0:
        beta = w * math.sqrt(MU0 * EPS0 * eps.eps_r_real)
        return PropagationConstants(0.0, beta, math.inf)
    tand = eps.loss_tangent(f)
    root = math.sqrt(1.0 + tand * tand)
    half = MU0 * EPS0 * eps.eps_r_real / 2.0
    alpha = w * math.sqrt(half * (root - 1.0))
    beta = w * math.sqrt(half * (root + 1.0))
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise NumericDomainError(f"non-finite propagation constants at {f.hertz} Hz")
    skin = 1.0 / alpha if alpha > 0 else math.inf
    return PropagationConstants(alpha, beta, skin)


def tissue_loss_db(eps: ComplexPermittivity, f: Frequency, thickness_m: float) -> float:
    """One-way plane-wave absorption through a layer: NP_TO_DB*alpha*t.

    Additive over stacked layers. Interface (reflection) loss is a separate
    effect, see the RF channel module.
    """
    if not (math.isfinite(thickness_m) and thickness_m >= 0):
        raise ValueError(f"thickness must be >= 0, got {thickness_m!r}")
    alpha = propagation_constants(eps, f).alpha_np_per_m
    return NP_TO_DB * alpha * thickness_m


def intrinsic_impedance(eps: ComplexPermittivity, f: Frequency) -> complex:
    """Complex intrinsic impedance sqrt(j*w*MU0 / (sigma + j*w*EPS0*eps'))."""
    w = f.omega
    return cmath.sqrt(1j * w * MU0 / complex(eps.sigma_eff, w * EPS0 * eps.eps_r_real))


# ---------------------------------------------------------------------------
# Tissue parameter file
#
# Plain text, one record per line, whitespace separated:
#
#   name  eps_inf  sigma_ionic_S_per_m  [delta_eps  tau_s  alpha] ...
#
# with one to four (delta_eps, tau_s, alpha) triples. '#' starts a comment.
# ---------------------------------------------------------------------------

DEFAULT_TISSUE_RESOURCE = "tissues.txt"


def parse_tissue_records(text: str) -> dict[str, ColeColeParams]:
    """Parse tissue records; raises TissueFileError citing the bad line."""
    table: dict[str, ColeColeParams] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) < 6 or (len(fields) - 3) % 3 != 0:
            raise TissueFileError(
                f"expected 'name eps_inf sigma_ionic' plus 1-{MAX_POLES} "
                f"'delta_eps tau_s alpha' triples, got {len(fields)} fields",
                line=lineno,
            )
        name = fields[0].lower()
        if name in table:
            raise TissueFileError(f"duplicate tissue {name!r}", line=lineno)
        try:
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise TissueFileError(f"bad number: {exc}", line=lineno) from None
        n_poles = (len(values) - 2) // 3
        if n_poles > MAX_POLES:
            raise TissueFileError(
                f"{n_poles} poles given, at most {MAX_POLES} supported", line=lineno
            )
        try:
            poles = tuple(
                ColeColePole(values[2 + 3 * i], values[3 + 3 * i], values[4 + 3 * i])
                for i in range(n_poles)
            )
            table[name] = ColeColeParams(values[0], poles, values[1])
        except ValueError as exc:
            raise TissueFileError(str(exc), line=lineno) from None
    if not table:
        raise TissueFileError("no tissue records found")
    return table


def load_tissue_file(path) -> dict[str, ColeColeParams]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tissue_records(fh.read())


def default_tissue_library() -> dict[str, ColeColeParams]:
    """Gabriel-style 4-pole parameters for skin, muscle and fat (packaged)."""
    text = resources.files("ibobsim").joinpath(f"data/{DEFAULT_TISSUE_RESOURCE}").read_text()
    return parse_tissue_records(text)


def permittivity_table(
    library: dict[str, ColeColeParams], f: Frequency
) -> dict[str, ComplexPermittivity]:
    """Evaluate a whole tissue library at one frequency; adds 'air'."""
    table = {name: complex_permittivity(p, f) for name, p in library.items()}
    table["air"] = FREE_SPACE
    return table
