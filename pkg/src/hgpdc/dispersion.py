"""Refractive indices, group indices and walk-off for uniaxial crystals.

Wavelengths are vacuum wavelengths in micrometers, angles are in radians.
All functions accept scalars or numpy arrays and broadcast.

The dispersion relation used for every polarization is the four-term
Sellmeier form

    n^2(lam) = A + B / (lam^2 - C) - D * lam^2

Positive emission angles are measured away from the optic axis, i.e. towards
the side the extraordinary Poynting vector tilts to in a negative uniaxial
crystal.  An extraordinary ray at internal angle ``t`` relative to a pump
cut at ``theta_c`` therefore sees the optic-axis angle ``theta_c + t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hgpdc.errors import DomainError

# half-width (um) kept clear of the window edges for derivatives
DERIVATIVE_MARGIN = 1e-3


@dataclass(frozen=True)
class SellmeierSet:
    A: float
    B: float
    C: float
    D: float

    def n_squared(self, lam):
        lam2 = np.asarray(lam, dtype=float) ** 2
        return self.A + self.B / (lam2 - self.C) - self.D * lam2

    def index(self, lam):
        return np.sqrt(self.n_squared(lam))

    def dindex(self, lam):
        """Analytic derivative dn/dlam in 1/um."""
        lam = np.asarray(lam, dtype=float)
        lam2 = lam**2
        dn2 = -2.0 * self.B * lam / (lam2 - self.C) ** 2 - 2.0 * self.D * lam
        return dn2 / (2.0 * self.index(lam))

    def as_list(self) -> list[float]:
        return [self.A, self.B, self.C, self.D]


@dataclass(frozen=True)
class CrystalSpec:
    """A uniaxial crystal: ordinary and principal extraordinary dispersion."""

    name: str
    sellmeier_o: SellmeierSet
    sellmeier_e: SellmeierSet
    window: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.window
        if not 0 < lo < hi:
            raise DomainError(f"{self.name}: invalid transparency window {self.window}")
        for label, s in (("o", self.sellmeier_o), ("e", self.sellmeier_e)):
            if s.C >= lo**2:
                raise DomainError(
                    f"{self.name}: Sellmeier pole of the {label} set lies inside the window"
                )
        probe = np.linspace(lo, hi, 257)
        if np.any(self.sellmeier_o.n_squared(probe) <= 1) or np.any(
            self.sellmeier_e.n_squared(probe) <= 1
        ):
            raise DomainError(f"{self.name}: refractive index drops below 1 inside the window")

    @property
    def negative(self) -> bool:
        """True for negative uniaxial crystals (n_e < n_o)."""
        lam = 0.5 * sum(self.window)
        return bool(self.sellmeier_e.index(lam) < self.sellmeier_o.index(lam))

    def check_wavelength(self, lam, margin: float = 0.0) -> None:
        lam = np.asarray(lam, dtype=float)
        lo, hi = self.window
        if np.any(~np.isfinite(lam)) or np.any(lam < lo + margin) or np.any(lam > hi - margin):
            raise DomainError(
                f"wavelength {_describe(lam)} um outside the {self.name} transparency "
                f"window [{lo + margin:g}, {hi - margin:g}] um"
            )

    def contains(self, lam, margin: float = 0.0):
        """Elementwise in-window mask, for vectorized scans that must not raise."""
        lam = np.asarray(lam, dtype=float)
        lo, hi = self.window
        return (lam >= lo + margin) & (lam <= hi - margin)


def _describe(lam: np.ndarray) -> str:
    if lam.ndim == 0:
        return f"{float(lam):g}"
    return f"range [{np.nanmin(lam):g}, {np.nanmax(lam):g}]"


# Kato, IEEE J. Quantum Electron. 22, 1013 (1986).  The fit range is
# 0.22-1.06 um; the window below is the crystal's transparency range.
BBO = CrystalSpec(
    name="BBO",
    sellmeier_o=SellmeierSet(2.7359, 0.01878, 0.01822, 0.01354),
    sellmeier_e=SellmeierSet(2.3753, 0.01224, 0.01667, 0.01516),
    window=(0.205, 3.5),
)

# Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
BBO_EIMERL = CrystalSpec(
    name="BBO-Eimerl",
    sellmeier_o=SellmeierSet(2.7405, 0.0184, 0.0179, 0.0155),
    sellmeier_e=SellmeierSet(2.3730, 0.0128, 0.0156, 0.0044),
    window=(0.205, 3.5),
)

BUILTIN_CRYSTALS = {"BBO": BBO, "BBO-Kato": BBO, "BBO-Eimerl": BBO_EIMERL}


def _check_axis_angle(theta) -> None:
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > np.pi / 2):
        raise DomainError("optic-axis angle must lie in [0, pi/2]")


def index_o(crystal: CrystalSpec, lam):
    crystal.check_wavelength(lam)
    return crystal.sellmeier_o.index(lam)


def index_e_principal(crystal: CrystalSpec, lam):
    crystal.check_wavelength(lam)
    return crystal.sellmeier_e.index(lam)


def _index_e(crystal, lam, theta):
    no = crystal.sellmeier_o.index(lam)
    ne = crystal.sellmeier_e.index(lam)
    return (np.cos(theta) ** 2 / no**2 + np.sin(theta) ** 2 / ne**2) ** -0.5


def index_e(crystal: CrystalSpec, lam, theta):
    """Extraordinary index for a wave at angle ``theta`` to the optic axis."""
    crystal.check_wavelength(lam)
    _check_axis_angle(theta)
    return _index_e(crystal, lam, theta)


def index(crystal: CrystalSpec, polarization: str, lam, theta=0.0):
    if polarization == "o":
        return index_o(crystal, lam)
    if polarization == "e":
        return index_e(crystal, lam, theta)
    raise DomainError(f"unknown polarization {polarization!r}")


def _dindex_e(crystal, lam, theta):
    so, se = crystal.sellmeier_o, crystal.sellmeier_e
    no, ne = so.index(lam), se.index(lam)
    n = _index_e(crystal, lam, theta)
    return n**3 * (
        np.cos(theta) ** 2 * so.dindex(lam) / no**3 + np.sin(theta) ** 2 * se.dindex(lam) / ne**3
    )


def group_index(crystal: CrystalSpec, polarization: str, lam, theta=0.0):
    """Group index n - lam * dn/dlam at fixed propagation direction."""
    crystal.check_wavelength(lam, margin=DERIVATIVE_MARGIN)
    if polarization == "o":
        so = crystal.sellmeier_o
        return so.index(lam) - lam * so.dindex(lam)
    if polarization == "e":
        _check_axis_angle(theta)
        return _index_e(crystal, lam, theta) - lam * _dindex_e(crystal, lam, theta)
    raise DomainError(f"unknown polarization {polarization!r}")


def walkoff_angle(crystal: CrystalSpec, lam, theta):
    """Magnitude of the Poynting-vector walk-off of an extraordinary wave.

    For a negative uniaxial crystal the Poynting vector tilts away from the
    optic axis, i.e. towards positive emission angles in this package's
    convention; for a positive crystal it tilts towards the axis.
    """
    crystal.check_wavelength(lam)
    _check_axis_angle(theta)
    no = crystal.sellmeier_o.index(lam)
    ne = crystal.sellmeier_e.index(lam)
    n = _index_e(crystal, lam, theta)
    tan_rho = 0.5 * n**2 * np.sin(2 * theta) * (1 / ne**2 - 1 / no**2)
    return np.abs(np.arctan(tan_rho))


def walkoff_direction(crystal: CrystalSpec) -> int:
    """+1 if the Poynting vector tilts towards positive angles, else -1."""
    return 1 if crystal.negative else -1


def snell_external(theta_internal, n):
    """Refract an internal angle out of the crystal into vacuum."""
    s = np.asarray(n, dtype=float) * np.sin(theta_internal)
    if np.any(np.abs(s) > 1):
        raise DomainError("total internal reflection: |n sin(theta)| > 1")
    return np.arcsin(s)


def snell_internal(theta_external, n):
    """Inverse of :func:`snell_external`."""
    s = np.sin(theta_external) / np.asarray(n, dtype=float)
    if np.any(np.abs(s) > 1):
        raise DomainError("no internal angle: |sin(theta)/n| > 1")
    return np.arcsin(s)


def detector_angle(x, f):
    """External angle seen at position ``x`` in the focal plane of a lens."""
    if f <= 0:
        raise DomainError(f"focal length must be positive, got {f}")
    return np.arctan(np.asarray(x, dtype=float) / f)


def wavenumber(lam):
    """Vacuum wavenumber in 1/m for a wavelength in micrometers."""
    return 2e6 * np.pi / np.asarray(lam, dtype=float)


def kz_ordinary(crystal: CrystalSpec, lam, q):
    """Longitudinal wavevector (1/m) of an ordinary wave with transverse part ``q``.

    Returns NaN where the wave would be evanescent.
    """
    k = wavenumber(lam) * crystal.sellmeier_o.index(lam)
    arg = k**2 - np.asarray(q, dtype=float) ** 2
    return np.sqrt(np.where(arg >= 0, arg, np.nan))


def kz_extraordinary(crystal: CrystalSpec, lam, q, theta_c):
    """Longitudinal wavevector (1/m) of an extraordinary wave.

    The z axis makes the angle ``theta_c`` with the optic axis, and positive
    ``q`` points away from it.  The index ellipsoid gives a quadratic in k_z,
    solved exactly; NaN marks non-propagating combinations.
    """
    k0 = wavenumber(lam)
    a = 1.0 / crystal.sellmeier_o.index(lam) ** 2
    b = 1.0 / crystal.sellmeier_e.index(lam) ** 2
    s, c = np.sin(theta_c), np.cos(theta_c)
    q = np.asarray(q, dtype=float)
    # k_along_axis = kz c - q s ; k_across_axis = kz s + q c
    qa = c * c * a + s * s * b
    qb = 2.0 * q * s * c * (b - a)
    qc = q * q * (s * s * a + c * c * b) - k0 * k0
    disc = qb * qb - 4.0 * qa * qc
    return (-qb + np.sqrt(np.where(disc >= 0, disc, np.nan))) / (2.0 * qa)
