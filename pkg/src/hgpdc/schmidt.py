"""Schmidt decomposition of a sampled two-photon amplitude."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from hgpdc.amplitude import Grid1D, JointAmplitude
from hgpdc.errors import ContractError, DomainError, NumericalError

DEFAULT_CUTOFF = 1e-12
NORM_TOL = 1e-8


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Eigenvalues (descending, summing to one) and grid-orthonormal modes.

    ``u[:, n]`` and ``v[:, n]`` are the n-th signal and idler modes, scaled so
    that sum |u_n|^2 * grid_s.step == 1.
    """

    eigenvalues: np.ndarray
    u: np.ndarray
    v: np.ndarray
    grid_s: Grid1D
    grid_i: Grid1D

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return (self.u * np.sqrt(self.eigenvalues)) @ self.v.T

    def modes_to_csv(self, path: str | Path, indices: Sequence[int] = (0,), which: str = "u") -> None:
        modes = self.u if which == "u" else self.v
        grid = self.grid_s if which == "u" else self.grid_i
        header = [grid.kind]
        for n in indices:
            header += [f"re_{which}{n}", f"im_{which}{n}"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for j, x in enumerate(grid.values):
                row = [f"{x:.9g}"]
                for n in indices:
                    row += [f"{modes[j, n].real:.9g}", f"{modes[j, n].imag:.9g}"]
                w.writerow(row)


def decompose(F: JointAmplitude, cutoff: float = DEFAULT_CUTOFF) -> SchmidtDecomposition:
    """SVD of the measure-weighted amplitude F * sqrt(ds * di).

    Eigenvalues below ``cutoff * lambda_1`` are dropped and the rest
    renormalized.  Each signal mode is phased so its largest sample is real
    and positive; the conjugate phase goes to the idler mode.
    """
    if not F.normalized or abs(F.l2_norm() - 1.0) > NORM_TOL:
        raise ContractError("decompose expects a normalized JointAmplitude")
    ds, di = F.grid_s.step, F.grid_i.step
    try:
        U, s, Vh = np.linalg.svd(F.data * np.sqrt(ds * di), full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    lam = s**2 / np.sum(s**2)
    keep = lam >= cutoff * lam[0] if cutoff > 0 else np.ones_like(lam, dtype=bool)
    lam = lam[keep]
    lam = lam / lam.sum()
    u = U[:, keep] / np.sqrt(ds)
    v = Vh[keep, :].T / np.sqrt(di)

    idx = np.argmax(np.abs(u), axis=0)
    peak = u[idx, np.arange(u.shape[1])]
    phase = peak / np.abs(peak)
    u = u / phase
    v = v * phase
    return SchmidtDecomposition(lam, u, v, F.grid_s, F.grid_i)


def schmidt_number(eigenvalues) -> float:
    """K = 1 / sum(lambda_n^2) for normalized eigenvalues."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0:
        raise DomainError("empty eigenvalue list")
    return float(1.0 / np.sum(lam**2))
