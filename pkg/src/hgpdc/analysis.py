"""End-to-end pipelines: amplitude -> Schmidt modes -> high-gain observables.

The command line and the acceptance tests both go through these functions,
so a figure recipe and its test compute exactly the same numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from hgpdc import amplitude as am
from hgpdc import dispersion as disp
from hgpdc import highgain as hg
from hgpdc import phasematch as pm
from hgpdc import schmidt as sc
from hgpdc.errors import DomainError, NoSolutionError

SPECTRAL_SPAN_FACTOR = 6.0


@dataclass(frozen=True)
class AngularResult:
    geometry: pm.ProcessGeometry
    signal_wavelength: float
    G: float
    amplitude: am.JointAmplitude
    decomposition: sc.SchmidtDecomposition
    signal: hg.GainSpectrum
    idler: hg.GainSpectrum
    stats: hg.ModeStats

    @property
    def idler_wavelength(self) -> float:
        return float(self.geometry.idler_wavelength(self.signal_wavelength))

    def signal_external(self) -> np.ndarray:
        n = disp.index_o(self.geometry.crystal, self.signal_wavelength)
        return disp.snell_external(self.signal.grid.values, n)

    def idler_external(self) -> np.ndarray:
        g = self.geometry
        t = self.idler.grid.values
        if g.idler_polarization == "o":
            n = disp.index_o(g.crystal, self.idler_wavelength)
        else:
            n = disp.index_e(g.crystal, self.idler_wavelength, np.clip(g.cut_angle + t, 0, np.pi / 2))
        return disp.snell_external(t, n)

    def collinear_value(self) -> float:
        x = self.signal.grid.values
        return float(np.interp(0.0, x, self.signal.values))

    def peak(self, side: int = 1) -> tuple[float, float]:
        """(internal angle, value) of the signal maximum on one side of zero.

        The sample maximum is refined with a parabola through its neighbours.
        """
        x = self.signal.grid.values
        y = self.signal.values
        mask = x * side > 0
        if not mask.any():
            raise DomainError("grid has no samples on the requested side")
        idx = np.flatnonzero(mask)
        j = idx[np.argmax(y[idx])]
        if 0 < j < len(x) - 1:
            ym, y0, yp = y[j - 1], y[j], y[j + 1]
            den = ym - 2 * y0 + yp
            if den < 0:
                d = 0.5 * (ym - yp) / den
                h = self.signal.grid.step
                return float(x[j] + d * h), float(y0 - 0.25 * (ym - yp) * d)
        return float(x[j]), float(y[j])


def walkoff_matched_direction(
    geometry: pm.ProcessGeometry, signal_wavelength: float | None = None
) -> tuple[float, float]:
    """(internal, external) signal angle along the pump Poynting vector."""
    lam_s = 2.0 * geometry.pump_wavelength if signal_wavelength is None else signal_wavelength
    rho = float(disp.walkoff_angle(geometry.crystal, geometry.pump_wavelength, geometry.cut_angle))
    internal = disp.walkoff_direction(geometry.crystal) * rho
    n = disp.index_o(geometry.crystal, lam_s)
    return internal, float(disp.snell_external(internal, n))


def angular_spectrum(
    geometry: pm.ProcessGeometry,
    pump: am.PumpSpec,
    G: float,
    *,
    count: int = am.DEFAULT_COUNT,
    span_factor: float = 1.5,
    cutoff: float = sc.DEFAULT_CUTOFF,
    signal_wavelength: float | None = None,
    walkoff_scale: float = 1.0,
    ignore_gap_phase: bool = False,
) -> AngularResult:
    lam_s = 2.0 * geometry.pump_wavelength if signal_wavelength is None else signal_wavelength
    gs, gi = am.default_angular_grids(geometry, count, span_factor)
    F = am.build_angular_tpa(
        geometry,
        pump,
        gs,
        gi,
        signal_wavelength=lam_s,
        walkoff_scale=walkoff_scale,
        ignore_gap_phase=ignore_gap_phase,
    )
    D = sc.decompose(F, cutoff)
    return AngularResult(
        geometry,
        lam_s,
        G,
        F,
        D,
        hg.signal_intensity(D, G),
        hg.idler_intensity(D, G),
        hg.mode_stats(D.eigenvalues, G),
    )


def emission_angle(geometry: pm.ProcessGeometry, lam_s: float) -> float:
    """External angle where ``lam_s`` is phase matched; smallest non-negative preferred."""
    angles = pm.angles_for_wavelength(geometry, lam_s)
    if not angles:
        raise NoSolutionError(f"{lam_s * 1e3:.2f} nm is not phase matched at any angle")
    pos = [a for a in angles if a >= 0]
    return min(pos) if pos else max(angles)


@dataclass(frozen=True)
class SpectralResult:
    """Signal spectrum at one emission direction, as photons per nm."""

    angle: float
    center_wavelength: float
    gain: float
    amplitude: am.JointAmplitude
    decomposition: sc.SchmidtDecomposition
    wavelength_nm: np.ndarray
    density: np.ndarray

    def value_at(self, lam_nm: float) -> float:
        return float(np.interp(lam_nm, self.wavelength_nm, self.density))

    @property
    def stats(self) -> hg.ModeStats:
        return hg.mode_stats(self.decomposition.eigenvalues, self.gain)


def _spectral_build(geometry, pump, angle, lam_c, count, span_factor, cutoff, ignore_gap_phase):
    gs, gi = am.default_spectral_grids(geometry, pump, angle, lam_c, count, span_factor)
    F = am.build_spectral_jsa(
        geometry, pump, angle, gs, gi, signal_wavelength=lam_c, ignore_gap_phase=ignore_gap_phase
    )
    return F, sc.decompose(F, cutoff)


def frequency_spectra(
    geometry: pm.ProcessGeometry,
    pump: am.PumpSpec,
    G: float,
    targets: list[tuple[float, float]],
    *,
    reference_wavelength: float | None = None,
    count: int = am.DEFAULT_COUNT,
    span_factor: float = SPECTRAL_SPAN_FACTOR,
    cutoff: float = sc.DEFAULT_CUTOFF,
    ignore_gap_phase: bool = False,
) -> list[SpectralResult]:
    """Spectra for (external angle, centre wavelength um) pairs.

    Without a reference the gain G applies to every direction.  With one,
    G is the gain at the direction phase matching ``reference_wavelength``;
    elsewhere it scales with the amplitude norm, i.e. with the strength of
    the coupling before normalization.
    """
    if not targets:
        return []
    ref_norm = None
    if reference_wavelength is not None:
        ang = emission_angle(geometry, reference_wavelength)
        F, _ = _spectral_build(
            geometry, pump, ang, reference_wavelength, count, span_factor, cutoff, ignore_gap_phase
        )
        ref_norm = F.norm
    out = []
    for angle, lam_c in targets:
        F, D = _spectral_build(geometry, pump, angle, lam_c, count, span_factor, cutoff, ignore_gap_phase)
        g_eff = G if ref_norm is None else G * F.norm / ref_norm
        N = hg.signal_intensity(D, g_eff).values
        omega = D.grid_s.values
        lam_m = 2 * math.pi * C_LIGHT / omega
        dens = N * omega**2 / (2 * math.pi * C_LIGHT) * 1e-9
        out.append(SpectralResult(angle, lam_c, g_eff, F, D, lam_m[::-1] * 1e9, dens[::-1]))
    return out


def targets_for_wavelengths(geometry: pm.ProcessGeometry, wavelengths) -> list[tuple[float, float]]:
    return [(emission_angle(geometry, lam), lam) for lam in wavelengths]


def targets_for_angles(geometry: pm.ProcessGeometry, angles) -> list[tuple[float, float]]:
    """Every phase-matched signal wavelength at each external angle."""
    out = []
    for ang in angles:
        curve = pm.tuning_curve(geometry, (ang, ang), samples=2)
        lams = sorted(set(float(x) for x in curve.wavelength))
        if not lams:
            raise NoSolutionError(f"nothing is phase matched at {ang:.6g} rad")
        out.extend((ang, lam) for lam in lams)
    return out
