"""Physical constants (SI units)."""

EPS0 = 8.8541878128e-12   # vacuum permittivity, F/m
MU0 = 1.25663706212e-6    # vacuum permeability, H/m
C0 = 299792458.0          # speed of light in vacuum, m/s
ETA0 = (MU0 / EPS0) ** 0.5  # free-space wave impedance, ohm

# 1 Np = 20/ln(10) dB
NP_TO_DB = 8.685889638065037
