"""Discretized two-photon amplitudes.

Two regimes are covered:

* angular: monochromatic pump focused to a Gaussian waist, signal and idler
  at fixed wavelengths, amplitude over internal emission angles;
* spectral: Gaussian transform-limited pump pulse, plane wave transversely,
  signal at a fixed transverse wavevector (set by an external angle at the
  centre wavelength), amplitude over signal and idler angular frequencies.

Stacks of crystals separated by vacuum gaps enter through the
phase-matching function.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.constants import c as C_LIGHT

from hgpdc import dispersion as disp
from hgpdc import phasematch as pm
from hgpdc.errors import ContractError, DomainError

LN2 = math.log(2.0)
SINC_SERIES_BELOW = 1e-4
DEFAULT_COUNT = 512


@dataclass(frozen=True)
class Grid1D:
    """Uniform axis; ``kind`` is ``"angle"`` (rad) or ``"frequency"`` (rad/s)."""

    kind: str
    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.kind not in ("angle", "frequency"):
            raise DomainError(f"unknown grid kind {self.kind!r}")
        if not self.step > 0:
            raise DomainError("grid step must be positive")
        if self.count < 16:
            raise DomainError("grid needs at least 16 points")

    @classmethod
    def centered(cls, kind: str, center: float, half_span: float, count: int) -> "Grid1D":
        step = 2.0 * half_span / (count - 1)
        return cls(kind, center - half_span, step, count)

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    def refined(self, factor: int = 2) -> "Grid1D":
        """Same span sampled ``factor`` times more densely."""
        return Grid1D(self.kind, self.start, self.step / factor, (self.count - 1) * factor + 1)


@dataclass(frozen=True)
class JointAmplitude:
    """Complex amplitude F[j, k] on (signal grid) x (idler grid).

    ``norm`` is the L2 norm the amplitude had before normalization; it
    carries the relative coupling strength between different builds.
    """

    data: np.ndarray
    grid_s: Grid1D
    grid_i: Grid1D
    normalized: bool = False
    norm: float = field(default=float("nan"))

    def __post_init__(self):
        if self.data.shape != (self.grid_s.count, self.grid_i.count):
            raise ContractError(
                f"amplitude shape {self.data.shape} does not match grids "
                f"({self.grid_s.count}, {self.grid_i.count})"
            )
        if not np.all(np.isfinite(self.data)):
            raise ContractError("amplitude has non-finite entries")

    @property
    def measure(self) -> float:
        return self.grid_s.step * self.grid_i.step

    def l2_norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.data) ** 2)) * self.measure)

    def normalize(self) -> "JointAmplitude":
        nrm = self.l2_norm()
        if nrm == 0:
            raise DomainError("cannot normalize an identically zero amplitude")
        return JointAmplitude(self.data / nrm, self.grid_s, self.grid_i, True, nrm)

    def marginal_signal(self) -> np.ndarray:
        return np.sum(np.abs(self.data) ** 2, axis=1) * self.grid_i.step

    def to_csv(self, path: str | Path) -> None:
        """Dump |F| as a matrix with the two axes in the first two lines."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"# signal_{self.grid_s.kind}"] + [f"{v:.9g}" for v in self.grid_s.values])
            w.writerow([f"# idler_{self.grid_i.kind}"] + [f"{v:.9g}" for v in self.grid_i.values])
            for row in np.abs(self.data):
                w.writerow([f"{v:.9g}" for v in row])


@dataclass(frozen=True)
class PumpSpec:
    """Gaussian pump: center wavelength (um), waist FWHM (m), pulse FWHM (s)."""

    wavelength: float
    waist_fwhm: float | None = None
    duration_fwhm: float | None = None

    def __post_init__(self):
        for name in ("wavelength", "waist_fwhm", "duration_fwhm"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"pump {name} must be positive, got {v}")

    @property
    def omega(self) -> float:
        return 2e6 * math.pi * C_LIGHT / self.wavelength

    @property
    def bandwidth(self) -> float:
        """Intensity FWHM of the pump spectrum in rad/s."""
        if self.duration_fwhm is None:
            raise DomainError("pump pulse duration not set")
        return 4.0 * LN2 / self.duration_fwhm


def pump_angular_profile(pump: PumpSpec, q):
    """Far-field amplitude versus transverse wavenumber q (1/m), peak 1."""
    if pump.waist_fwhm is None:
        raise DomainError("pump waist not set")
    w = pump.waist_fwhm / math.sqrt(2.0 * LN2)
    return np.exp(-np.asarray(q, dtype=float) ** 2 * w**2 / 4.0)


def pump_spectral_profile(pump: PumpSpec, detuning):
    """Spectral amplitude versus detuning (rad/s) for a transform-limited pulse."""
    if pump.duration_fwhm is None:
        raise DomainError("pump pulse duration not set")
    tau = pump.duration_fwhm
    return np.exp(-np.asarray(detuning, dtype=float) ** 2 * tau**2 / (8.0 * LN2))


def sinc(x):
    """sin(x)/x with a series branch around zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_SERIES_BELOW
    safe = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)


def phase_matching_function(segments: Sequence, dk, dk_gap=0.0):
    """Stack phase-matching function normalized to the total crystal length.

    Each segment contributes L sinc(dk L/2) exp(i dk L/2) times the phase
    accumulated over every preceding segment (dk L) and gap (dk_gap g).
    """
    if len(segments) == 0:
        raise DomainError("segment stack is empty")
    segs = [s if isinstance(s, pm.Segment) else pm.Segment(*s) for s in segments]
    total = sum(s.length for s in segs)
    if not total > 0:
        raise DomainError("stack has zero crystal length")
    dk = np.asarray(dk, dtype=float)
    dk_gap = np.asarray(dk_gap, dtype=float)
    out = np.zeros(np.broadcast(dk, dk_gap).shape, dtype=complex)
    phase = np.zeros_like(out, dtype=float)
    for s in segs:
        half = 0.5 * dk * s.length
        out += s.length * sinc(half) * np.exp(1j * (phase + half))
        phase = phase + dk * s.length + dk_gap * s.gap
    return out / total


def _finite(a):
    return np.where(np.isfinite(a), a, 0.0)


def build_angular_tpa(
    geometry: pm.ProcessGeometry,
    pump: PumpSpec,
    grid_s: Grid1D,
    grid_i: Grid1D,
    *,
    signal_wavelength: float | None = None,
    walkoff_scale: float = 1.0,
    ignore_gap_phase: bool = False,
) -> JointAmplitude:
    """Normalized angular amplitude F(theta_s, theta_i) over internal angles.

    The signal wavelength defaults to twice the pump wavelength (degenerate
    operation).  The pump wavevector for transverse component Q is
    sqrt(K^2 - Q^2) - tan(rho) Q, the linear term tilting its Poynting vector
    by rho towards positive angles.  ``walkoff_scale`` multiplies that term
    (0 removes walk-off, -1 mirrors it).
    """
    if grid_s.kind != "angle" or grid_i.kind != "angle":
        raise DomainError("angular amplitude needs angle grids")
    crystal = geometry.crystal
    lam_p = geometry.pump_wavelength
    lam_s = 2.0 * lam_p if signal_wavelength is None else signal_wavelength
    lam_i = float(geometry.idler_wavelength(lam_s))
    crystal.check_wavelength([lam_s, lam_i])

    ts = grid_s.values[:, None]
    ti = grid_i.values[None, :]
    k_s = disp.wavenumber(lam_s) * disp.index_o(crystal, lam_s)
    q_s = k_s * np.sin(ts)
    kz_s = k_s * np.cos(ts)
    if geometry.idler_polarization == "o":
        k_i = disp.wavenumber(lam_i) * disp.index_o(crystal, lam_i)
    else:
        axis = np.clip(geometry.cut_angle + ti, 0.0, np.pi / 2)
        k_i = disp.wavenumber(lam_i) * disp.index_e(crystal, lam_i, axis)
    q_i = k_i * np.sin(ti)
    kz_i = k_i * np.cos(ti)

    Q = q_s + q_i
    K = disp.wavenumber(lam_p) * disp.index_e(crystal, lam_p, geometry.cut_angle)
    tan_rho = math.tan(float(disp.walkoff_angle(crystal, lam_p, geometry.cut_angle)))
    slope = walkoff_scale * disp.walkoff_direction(crystal) * tan_rho
    with np.errstate(invalid="ignore"):
        kz_p = np.sqrt(K**2 - Q**2) - slope * Q
        dk = kz_p - kz_s - kz_i
        if ignore_gap_phase:
            dk_gap = 0.0
        else:
            k0p, k0s, k0i = (disp.wavenumber(x) for x in (lam_p, lam_s, lam_i))
            dk_gap = np.sqrt(k0p**2 - Q**2) - np.sqrt(k0s**2 - q_s**2) - np.sqrt(k0i**2 - q_i**2)
    F = pump_angular_profile(pump, Q) * phase_matching_function(
        geometry.segments, _finite(dk), _finite(dk_gap)
    )
    F = np.where(np.isfinite(dk), F, 0.0)
    return JointAmplitude(F, grid_s, grid_i).normalize()


def transverse_wavevector(angle_ext: float, signal_wavelength: float) -> float:
    """Transverse signal wavevector (1/m) for an external angle at a given wavelength."""
    return float(disp.wavenumber(signal_wavelength)) * math.sin(angle_ext)


def spectral_mismatch(
    geometry: pm.ProcessGeometry, omega_s, omega_i, q: float, ignore_gap_phase: bool = False
):
    """(dk, dk_gap) in 1/m at transverse signal wavevector ``q``; NaN if undefined.

    The pump is a plane wave transversely, so the idler carries -q.
    """
    crystal = geometry.crystal
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    lam_s = 2e6 * np.pi * C_LIGHT / omega_s
    lam_i = 2e6 * np.pi * C_LIGHT / omega_i
    lam_p = 2e6 * np.pi * C_LIGHT / (omega_s + omega_i)
    ok = crystal.contains(lam_s) & crystal.contains(lam_i) & crystal.contains(lam_p)
    lam_s, lam_i, lam_p = (np.where(ok, x, np.nan) for x in (lam_s, lam_i, lam_p))
    with np.errstate(invalid="ignore"):
        dk = pm.pump_kz(geometry, lam_p) - pm.signal_kz(geometry, lam_s, q) - pm.idler_kz(
            geometry, lam_i, -q
        )
        if ignore_gap_phase:
            dk_gap = np.zeros_like(dk)
        else:
            k0s, k0i = omega_s / C_LIGHT, omega_i / C_LIGHT
            dk_gap = (k0s + k0i) - np.sqrt(k0s**2 - q**2) - np.sqrt(k0i**2 - q**2)
    return dk, dk_gap


def build_spectral_jsa(
    geometry: pm.ProcessGeometry,
    pump: PumpSpec,
    angle_ext: float,
    grid_s: Grid1D,
    grid_i: Grid1D,
    *,
    signal_wavelength: float | None = None,
    ignore_gap_phase: bool = False,
) -> JointAmplitude:
    """Normalized spectral amplitude F(omega_s, omega_i) for one emission direction.

    The direction enters as the transverse wavevector the signal has at
    ``angle_ext`` and ``signal_wavelength`` (default: centre of ``grid_s``).
    A transversely plane-wave pump couples each transverse wavevector
    independently, so that slice is what gets decomposed.
    """
    if grid_s.kind != "frequency" or grid_i.kind != "frequency":
        raise DomainError("spectral amplitude needs frequency grids")
    if signal_wavelength is None:
        ws_mid = grid_s.start + 0.5 * grid_s.step * (grid_s.count - 1)
        signal_wavelength = 2e6 * math.pi * C_LIGHT / ws_mid
    q = transverse_wavevector(angle_ext, signal_wavelength)
    ws = grid_s.values[:, None]
    wi = grid_i.values[None, :]
    dk, dk_gap = spectral_mismatch(geometry, ws, wi, q, ignore_gap_phase)
    alpha = pump_spectral_profile(pump, ws + wi - pump.omega)
    F = alpha * phase_matching_function(geometry.segments, _finite(dk), _finite(dk_gap))
    F = np.where(np.isfinite(dk), F, 0.0)
    return JointAmplitude(F, grid_s, grid_i).normalize()


def default_angular_grids(
    geometry: pm.ProcessGeometry, count: int = DEFAULT_COUNT, span_factor: float = 1.5
) -> tuple[Grid1D, Grid1D]:
    """Symmetric internal-angle grids spanning +-span_factor times the pump walk-off."""
    rho = float(disp.walkoff_angle(geometry.crystal, geometry.pump_wavelength, geometry.cut_angle))
    half = span_factor * max(rho, 1e-3)
    g = Grid1D.centered("angle", 0.0, half, count)
    return g, g


def default_spectral_grids(
    geometry: pm.ProcessGeometry,
    pump: PumpSpec,
    angle_ext: float,
    signal_wavelength: float,
    count: int = DEFAULT_COUNT,
    span_factor: float = 6.0,
) -> tuple[Grid1D, Grid1D]:
    """Frequency grids centred on a phase-matched (signal, idler) pair.

    With dk ~ a Os + b Oi near the centre, the amplitude lives where
    |Os + Oi| is within the pump bandwidth and |a Os + b Oi| within 2 pi/L;
    the half-spans are ``span_factor`` times the extent of that region.
    """
    ws0 = 2e6 * math.pi * C_LIGHT / signal_wavelength
    wi0 = pump.omega - ws0
    h = 1e-5 * ws0
    q = transverse_wavevector(angle_ext, signal_wavelength)
    dk = lambda s, i: float(spectral_mismatch(geometry, s, i, q)[0])  # noqa: E731
    a = (dk(ws0 + h, wi0) - dk(ws0 - h, wi0)) / (2 * h)
    b = (dk(ws0, wi0 + h) - dk(ws0, wi0 - h)) / (2 * h)
    if not (np.isfinite(a) and np.isfinite(b)) or a == b:
        raise DomainError("cannot size spectral grids: mismatch not defined at the centre")
    sigma = pump.bandwidth
    l_min = min(s.length for s in geometry.segments if s.length > 0)
    width_pm = 2.0 * math.pi / l_min
    half_s = span_factor * (abs(b) * sigma + width_pm) / abs(a - b)
    half_i = span_factor * (abs(a) * sigma + width_pm) / abs(a - b)
    return (
        Grid1D.centered("frequency", ws0, half_s, count),
        Grid1D.centered("frequency", wi0, half_i, count),
    )
