"""Longitudinal phase mismatch, tuning curves and group-velocity matching.

Geometry: the pump wavevector defines z, the optic axis lies in the x-z
(principal) plane at the cut angle from z, and all emission happens in that
plane.  The pump is always extraordinary.  Type I emits two ordinary
photons, type II an ordinary signal and an extraordinary idler.  The
signal is the ordinary photon in both cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from hgpdc import dispersion as disp
from hgpdc.dispersion import CrystalSpec
from hgpdc.errors import DomainError, GeometryError, NoSolutionError, NumericalError
from hgpdc.roots import find_roots

SCAN_POINTS = 400
# |dk * L_total| accepted for a tuning-curve root
ROOT_TOL = 1e-3
# |group index difference| accepted at the GVM point
GVM_TOL = 1e-4


@dataclass(frozen=True)
class Segment:
    """One crystal of a stack followed by a vacuum gap (both in meters)."""

    length: float
    gap: float = 0.0


@dataclass(frozen=True)
class ProcessGeometry:
    crystal: CrystalSpec
    process_type: str
    pump_wavelength: float
    cut_angle: float
    segments: tuple[Segment, ...] = field(default=(Segment(5e-3),))

    def __post_init__(self):
        if self.process_type not in ("I", "II"):
            raise DomainError(f"process type must be 'I' or 'II', got {self.process_type!r}")
        self.crystal.check_wavelength(self.pump_wavelength)
        if not 0 <= self.cut_angle <= np.pi / 2:
            raise DomainError("cut angle must lie in [0, pi/2]")
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise DomainError("segment stack is empty")
        if any(s.length < 0 or s.gap < 0 for s in segs):
            raise DomainError("segment and gap lengths must be non-negative")
        if not any(s.length > 0 for s in segs):
            raise DomainError("stack needs at least one segment of positive length")
        lo, hi = self.crystal.window
        lam_min = 1.0 / (1.0 / self.pump_wavelength - 1.0 / hi)
        if lam_min > hi:
            raise DomainError(
                f"no signal/idler pair for pump {self.pump_wavelength} um fits the window"
            )

    @property
    def total_length(self) -> float:
        return sum(s.length for s in self.segments)

    @property
    def idler_polarization(self) -> str:
        return "o" if self.process_type == "I" else "e"

    def idler_wavelength(self, lam_s):
        return 1.0 / (1.0 / self.pump_wavelength - 1.0 / np.asarray(lam_s, dtype=float))

    def signal_range(self, margin: float = 0.0) -> tuple[float, float]:
        """Signal wavelengths (um) for which signal and idler both lie in the window."""
        lo, hi = self.crystal.window
        lam_p = self.pump_wavelength
        lo_s = max(lo, 1.0 / (1.0 / lam_p - 1.0 / (hi - margin))) + margin
        return lo_s, hi - margin


@dataclass(frozen=True)
class TuningCurve:
    """Phase-matched (external signal angle, signal wavelength) samples."""

    angle: np.ndarray
    wavelength: np.ndarray
    branch: tuple[str, ...]

    def __len__(self):
        return len(self.angle)


def pump_kz(geometry: ProcessGeometry, lam_p=None, q=0.0):
    lam_p = geometry.pump_wavelength if lam_p is None else lam_p
    return disp.kz_extraordinary(geometry.crystal, lam_p, q, geometry.cut_angle)


def signal_kz(geometry: ProcessGeometry, lam_s, q):
    return disp.kz_ordinary(geometry.crystal, lam_s, q)


def idler_kz(geometry: ProcessGeometry, lam_i, q):
    if geometry.idler_polarization == "o":
        return disp.kz_ordinary(geometry.crystal, lam_i, q)
    return disp.kz_extraordinary(geometry.crystal, lam_i, q, geometry.cut_angle)


def _delta_k(geometry: ProcessGeometry, lam_s, theta_s):
    """Vectorized mismatch; NaN wherever it is undefined."""
    crystal = geometry.crystal
    lam_s = np.asarray(lam_s, dtype=float)
    lam_i = geometry.idler_wavelength(lam_s)
    ok = crystal.contains(lam_s) & crystal.contains(lam_i)
    lam_s = np.where(ok, lam_s, np.nan)
    lam_i = np.where(ok, lam_i, np.nan)
    q = disp.wavenumber(lam_s) * crystal.sellmeier_o.index(lam_s) * np.sin(theta_s)
    with np.errstate(invalid="ignore"):
        return pump_kz(geometry) - signal_kz(geometry, lam_s, q) - idler_kz(geometry, lam_i, -q)


def delta_k(geometry: ProcessGeometry, lam_s, theta_s):
    """Longitudinal mismatch k_p - k_s,z - k_i,z in 1/m.

    ``theta_s`` is the internal signal angle; the idler direction follows
    from transverse momentum conservation with a pump travelling along z.
    """
    crystal = geometry.crystal
    crystal.check_wavelength(lam_s)
    crystal.check_wavelength(geometry.idler_wavelength(lam_s))
    dk = _delta_k(geometry, lam_s, theta_s)
    if np.any(np.isnan(dk)):
        raise GeometryError("transverse momentum conservation has no propagating idler")
    return dk


def _delta_k_external(geometry, lam_s, angle_ext):
    n_s = geometry.crystal.sellmeier_o.index(np.asarray(lam_s, dtype=float))
    return _delta_k(geometry, lam_s, np.arcsin(np.sin(angle_ext) / n_s))


def delta_k_external(geometry: ProcessGeometry, lam_s, angle_ext):
    """As :func:`delta_k` but for an external (vacuum) signal angle."""
    n_s = disp.index_o(geometry.crystal, lam_s)
    return delta_k(geometry, lam_s, disp.snell_internal(angle_ext, n_s))


def _wavelength_roots(geometry, angle_ext, grid, root_tol):
    L = geometry.total_length

    def f(lam):
        return float(_delta_k_external(geometry, lam, angle_ext)) * L

    values = _delta_k_external(geometry, grid, angle_ext) * L
    roots = find_roots(f, grid, values, tangent_tol=root_tol)
    for lam in roots:
        if not abs(f(lam)) < root_tol:
            raise NumericalError(
                f"tuning-curve root at angle {angle_ext:.6g} rad, {lam * 1e3:.6g} nm "
                f"misses tolerance: |dk L| = {abs(f(lam)):.3g}"
            )
    return roots


def _branch(geometry, angle_ext, lam) -> str:
    # sign of d(dk)/d(lam) separates the two arms of every tuning loop
    h = 1e-6
    slope = _delta_k_external(geometry, lam + h, angle_ext) - _delta_k_external(
        geometry, lam - h, angle_ext
    )
    return "upper" if slope > 0 else "lower"


def tuning_curve(
    geometry: ProcessGeometry,
    angle_range: tuple[float, float],
    wavelength_range: tuple[float, float] | None = None,
    samples: int = 101,
    *,
    scan_points: int = SCAN_POINTS,
    root_tol: float = ROOT_TOL,
) -> TuningCurve:
    """Phase-matched signal wavelengths (um) versus external signal angle (rad).

    Branch ``upper`` collects roots where the mismatch grows with wavelength,
    ``lower`` those where it falls; each closed tuning loop has one of each.
    """
    if samples < 2:
        raise DomainError("tuning curve needs at least 2 angle samples")
    if wavelength_range is None:
        wavelength_range = geometry.signal_range(margin=1e-6)
    lo, hi = wavelength_range
    if not lo < hi:
        raise DomainError(f"empty wavelength range {wavelength_range}")
    geometry.crystal.check_wavelength([lo, hi])
    grid = np.linspace(lo, hi, scan_points)
    angles, lams, branches = [], [], []
    for ang in np.linspace(angle_range[0], angle_range[1], samples):
        for lam in _wavelength_roots(geometry, ang, grid, root_tol):
            angles.append(ang)
            lams.append(lam)
            branches.append(_branch(geometry, ang, lam))
    return TuningCurve(np.array(angles), np.array(lams), tuple(branches))


def angles_for_wavelength(
    geometry: ProcessGeometry,
    lam_s: float,
    angle_range: tuple[float, float] = (-1.2, 1.2),
    *,
    scan_points: int = SCAN_POINTS,
    root_tol: float = ROOT_TOL,
) -> list[float]:
    """External signal angles (rad) at which ``lam_s`` is phase matched."""
    L = geometry.total_length
    geometry.crystal.check_wavelength([lam_s, geometry.idler_wavelength(lam_s)])

    def f(ang):
        return float(_delta_k_external(geometry, lam_s, ang)) * L

    grid = np.linspace(angle_range[0], angle_range[1], scan_points)
    values = _delta_k_external(geometry, lam_s, grid) * L
    return [a for a in find_roots(f, grid, values, tangent_tol=root_tol) if abs(f(a)) < root_tol]


def collinear_degenerate_cut(crystal: CrystalSpec, lam_p: float, process_type: str = "I") -> float:
    """Cut angle (rad) giving collinear phase matching at signal = idler = 2 lam_p."""

    ProcessGeometry(crystal, process_type, lam_p, 0.0)  # validates type and wavelengths
    lam_s = 2 * lam_p
    k_p, k_s = disp.wavenumber(lam_p), disp.wavenumber(lam_s)
    n_s = disp.index_o(crystal, lam_s)

    # on axis every wave travels along z, so dk is a difference of indices
    def f(theta):
        n_i = n_s if process_type == "I" else disp.index_e(crystal, lam_s, theta)
        return k_p * disp.index_e(crystal, lam_p, theta) - k_s * (n_s + n_i)

    thetas = np.linspace(0.0, np.pi / 2, 181)
    roots = find_roots(lambda t: float(f(t)), thetas, f(thetas))
    if not roots:
        raise GeometryError(
            f"{process_type} process at {lam_p * 1e3:g} nm is not phase-matchable in {crystal.name}"
        )
    return roots[0]


def gvm_wavelength(geometry: ProcessGeometry, *, scan_points: int = SCAN_POINTS) -> float:
    """Signal wavelength (um) whose ordinary group index equals the pump's.

    Uses collinear group indices.  The shortest matching wavelength is
    returned when the scan finds several.
    """
    crystal = geometry.crystal
    n_gp = disp.group_index(crystal, "e", geometry.pump_wavelength, geometry.cut_angle)
    lo, hi = geometry.signal_range(margin=2 * disp.DERIVATIVE_MARGIN)
    grid = np.linspace(lo, hi, scan_points)

    def f(lam):
        return float(disp.group_index(crystal, "o", lam)) - float(n_gp)

    values = disp.group_index(crystal, "o", grid) - n_gp
    roots = find_roots(f, grid, values)
    if not roots:
        raise NoSolutionError(
            f"no GVM point: pump group index {float(n_gp):.6f} never matched by the ordinary "
            f"signal in [{lo * 1e3:.1f}, {hi * 1e3:.1f}] nm"
        )
    lam = roots[0]
    if abs(f(lam)) > GVM_TOL:
        raise NumericalError(f"GVM root misses tolerance: {abs(f(lam)):.3g}")
    return lam


def gvm_point(
    geometry: ProcessGeometry, angle_range: tuple[float, float] = (-1.2, 1.2)
) -> tuple[float, float]:
    """(external angle rad, wavelength um) where the tuning curve meets the GVM wavelength.

    The smallest non-negative angle is preferred, then the smallest
    magnitude negative one.
    """
    lam = gvm_wavelength(geometry)
    angles = angles_for_wavelength(geometry, lam, angle_range)
    if not angles:
        raise NoSolutionError(
            f"GVM not phase-matched: {lam * 1e3:.2f} nm has no emission angle at this cut"
        )
    tol = 1e-9
    pos = [a for a in angles if a >= -tol]
    angle = min(pos) if pos else max(angles)
    return (0.0 if abs(angle) < tol else angle), lam


def internal_signal_angle(geometry: ProcessGeometry, lam_s, angle_ext):
    return disp.snell_internal(angle_ext, disp.index_o(geometry.crystal, lam_s))


def degenerate_geometry(
    crystal: CrystalSpec, lam_p: float, process_type: str = "I", segments: Sequence = (Segment(5e-3),)
) -> ProcessGeometry:
    """Geometry cut for collinear frequency-degenerate phase matching."""
    theta = collinear_degenerate_cut(crystal, lam_p, process_type)
    return ProcessGeometry(crystal, process_type, lam_p, theta, tuple(segments))


__all__ = [
    "Segment",
    "ProcessGeometry",
    "TuningCurve",
    "delta_k",
    "delta_k_external",
    "tuning_curve",
    "angles_for_wavelength",
    "collinear_degenerate_cut",
    "gvm_wavelength",
    "gvm_point",
    "degenerate_geometry",
]
