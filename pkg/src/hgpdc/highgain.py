"""High-gain observables built on a Schmidt decomposition.

Every Schmidt mode pair is an independent two-mode squeezer whose mean
photon number is sinh^2(G sqrt(lambda_n)); intensities are incoherent sums
over modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from hgpdc.amplitude import Grid1D
from hgpdc.errors import DomainError
from hgpdc.schmidt import SchmidtDecomposition


@dataclass(frozen=True)
class GainSpectrum:
    """Mean photon number density sampled on ``grid``."""

    grid: Grid1D
    values: np.ndarray

    def integrate(self) -> float:
        return float(np.sum(self.values) * self.grid.step)


@dataclass(frozen=True)
class ModeStats:
    weights: np.ndarray
    m: float
    g2: float


def _check_gain(G: float) -> None:
    if not G >= 0:
        raise DomainError(f"parametric gain must be non-negative, got {G}")


def _log_sinh2(x: np.ndarray) -> np.ndarray:
    # log(sinh(x)^2) for x > 0 without overflow
    return 2.0 * (x + np.log(-np.expm1(-2.0 * x)) - math.log(2.0))


def mode_gains(eigenvalues, G: float) -> np.ndarray:
    """Per-mode photon numbers sinh^2(G sqrt(lambda_n))."""
    _check_gain(G)
    return np.sinh(G * np.sqrt(np.asarray(eigenvalues, dtype=float))) ** 2


def renormalized_weights(eigenvalues, G: float) -> np.ndarray:
    """Gain-renormalized mode weights Lambda_n; equals lambda_n at G = 0."""
    _check_gain(G)
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0 or not np.any(lam > 0):
        raise DomainError("eigenvalues are all zero")
    if G == 0:
        return lam / lam.sum()
    x = G * np.sqrt(np.clip(lam, 0.0, None))
    out = np.zeros_like(x)
    pos = x > 0
    ls = _log_sinh2(x[pos])
    out[pos] = np.exp(ls - logsumexp(ls))
    return out


def signal_intensity(decomp: SchmidtDecomposition, G: float) -> GainSpectrum:
    w = mode_gains(decomp.eigenvalues, G)
    return GainSpectrum(decomp.grid_s, np.abs(decomp.u) ** 2 @ w)


def idler_intensity(decomp: SchmidtDecomposition, G: float) -> GainSpectrum:
    w = mode_gains(decomp.eigenvalues, G)
    return GainSpectrum(decomp.grid_i, np.abs(decomp.v) ** 2 @ w)


def total_photons(eigenvalues, G: float) -> float:
    return float(np.sum(mode_gains(eigenvalues, G)))


def effective_modes(weights) -> float:
    """Inverse participation ratio 1 / sum(Lambda_n^2)."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise DomainError("empty weight list")
    return float(1.0 / np.sum(w**2))


def g2_from_modes(m: float) -> float:
    return 1.0 + 1.0 / m


def mode_stats(eigenvalues, G: float) -> ModeStats:
    weights = renormalized_weights(eigenvalues, G)
    m = effective_modes(weights)
    return ModeStats(weights, m, g2_from_modes(m))


def divergence_estimates(waist: float, length: float, pump_wavelength: float) -> tuple[float, float]:
    """(waist / length, pump wavelength / waist) in rad.

    ``waist`` and ``length`` in meters, ``pump_wavelength`` in micrometers.
    """
    if not (waist > 0 and length > 0 and pump_wavelength > 0):
        raise DomainError("divergence estimates need positive inputs")
    return waist / length, pump_wavelength * 1e-6 / waist
