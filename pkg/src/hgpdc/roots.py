"""Bracket-and-refine root finding on sampled scans.

Roots are bracketed by sign changes on a coarse grid and polished with
Brent's method.  Local extrema of the scanned function are inspected as
well so that tangent (double) roots and root pairs hiding inside a single
grid cell are not lost.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from hgpdc.errors import NumericalError

MAX_ITER = 200


def _brent(f, a, b, xtol):
    try:
        return brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)
    except RuntimeError as exc:
        raise NumericalError(f"root refinement in [{a:.9g}, {b:.9g}] did not converge: {exc}")


def find_roots(
    f: Callable[[float], float],
    grid: np.ndarray,
    values: np.ndarray | None = None,
    *,
    tangent_tol: float = 0.0,
    xtol: float = 1e-14,
) -> list[float]:
    """All roots of ``f`` visible on ``grid``, sorted ascending.

    ``values`` may carry ``f`` already evaluated on ``grid`` (NaN where ``f``
    is undefined; NaN cells never bracket a root).  An extremum whose
    polished value satisfies ``|f| <= tangent_tol`` is reported as a tangent
    root.
    """
    grid = np.asarray(grid, dtype=float)
    if values is None:
        values = np.array([f(x) for x in grid])
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    roots: list[float] = []

    for j in range(len(grid) - 1):
        if not (finite[j] and finite[j + 1]):
            continue
        fa, fb = values[j], values[j + 1]
        if fa == 0.0:
            roots.append(grid[j])
        elif fa * fb < 0:
            roots.append(_brent(f, grid[j], grid[j + 1], xtol))
    if len(grid) and finite[-1] and values[-1] == 0.0:
        roots.append(grid[-1])

    # interior extrema that do not change sign on the grid
    for j in range(1, len(grid) - 1):
        if not (finite[j - 1] and finite[j] and finite[j + 1]):
            continue
        fm, f0, fp = values[j - 1], values[j], values[j + 1]
        if fm * f0 <= 0 or f0 * fp <= 0:
            continue
        if not (abs(f0) <= abs(fm) and abs(f0) <= abs(fp)):
            continue
        sgn = np.sign(f0)
        res = minimize_scalar(
            lambda x: sgn * f(x),
            bounds=(grid[j - 1], grid[j + 1]),
            method="bounded",
            options={"xatol": xtol * 10},
        )
        x_ext = float(res.x)
        f_ext = f(x_ext)
        if not np.isfinite(f_ext):
            continue
        if f_ext * f0 < 0:
            roots.append(_brent(f, grid[j - 1], x_ext, xtol))
            roots.append(_brent(f, x_ext, grid[j + 1], xtol))
        elif abs(f_ext) <= tangent_tol:
            roots.append(x_ext)

    return sorted(roots)
