"""Command-line front end.

    hgpdc <command> CONFIG [--out DIR] [--svg] [--grid N] [--cutoff REL]

Exit codes: 0 success, 2 configuration or domain error, 3 numerical
failure, 4 no solution (no GVM point, nothing phase matched).
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from hgpdc import analysis as an
from hgpdc import dispersion as disp
from hgpdc import highgain as hg
from hgpdc import phasematch as pm
from hgpdc import report
from hgpdc.config import RunConfig, load
from hgpdc.errors import (
    ConfigError,
    ContractError,
    DomainError,
    GeometryError,
    NoSolutionError,
    NumericalError,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_NO_SOLUTION = 0, 2, 3, 4


class Run:
    """A loaded configuration plus command-line overrides."""

    def __init__(self, command: str, cfg: RunConfig, args: argparse.Namespace):
        grid = cfg.grid
        if args.grid is not None:
            grid = dataclasses.replace(grid, count=args.grid)
        if args.cutoff is not None:
            grid = dataclasses.replace(grid, cutoff=args.cutoff)
        self.command = command
        self.cfg = dataclasses.replace(cfg, grid=grid)
        self.out = Path(args.out) if args.out is not None else cfg.output_dir
        self.svg = args.svg
        self.written: list[Path] = []

    @property
    def comment(self) -> str:
        g = self.cfg.grid
        return f"hgpdc {self.command} config_sha256={self.cfg.digest} grid={g.count} cutoff={g.cutoff:g}"

    def csv(self, name, header, rows):
        self.written.append(report.write_csv(self.out / name, self.comment, header, rows))

    def figure(self, name, fn, *a, **kw):
        if self.svg:
            self.written.append(fn(self.out / name, *a, **kw))


def _range(sec, key, default, name):
    v = sec.get(key, default)
    if v is None:
        return None
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise ConfigError(f"[{name}] {key} must be a two-number array")
    if v[0] > v[1]:
        raise ConfigError(f"[{name}] {key} must be ascending")
    return float(v[0]), float(v[1])


def _int(sec, key, default, name, minimum=1):
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"[{name}] {key} must be an integer >= {minimum}")
    return v


def _float_list(sec, key, name):
    v = sec.get(key, [])
    if not isinstance(v, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        raise ConfigError(f"[{name}] {key} must be an array of numbers")
    return [float(x) for x in v]


def _gvm_marker(geo):
    if geo.process_type != "II":
        return []
    try:
        ang, lam = pm.gvm_point(geo)
    except (NoSolutionError, NumericalError):
        return []
    return [(ang, lam * 1e3, "GVM point")]


def cmd_tuning_curve(run: Run) -> int:
    geo = run.cfg.require_geometry()
    sec = run.cfg.section("tuning_curve")
    angles = _range(sec, "angle_range_rad", [-0.2, 0.2], "tuning_curve")
    lams = _range(sec, "wavelength_range_nm", None, "tuning_curve")
    samples = _int(sec, "samples", 81, "tuning_curve", minimum=2)
    lam_range = None if lams is None else (lams[0] * 1e-3, lams[1] * 1e-3)
    curve = pm.tuning_curve(geo, angles, lam_range, samples)
    rows = [(a, w * 1e3, b) for a, w, b in zip(curve.angle, curve.wavelength, curve.branch)]
    run.csv("tuning_curve.csv", ["external_angle_rad", "signal_wavelength_nm", "branch"], rows)
    run.figure(
        "tuning_curve.svg",
        report.scatter_branches,
        list(curve.angle),
        list(curve.wavelength * 1e3),
        list(curve.branch),
        "external signal angle (rad)",
        "signal wavelength (nm)",
        markers=_gvm_marker(geo),
    )
    print(f"{len(curve)} phase-matched points over {samples} angles")
    return EXIT_OK


def cmd_walkoff(run: Run) -> int:
    geo = run.cfg.require_geometry()
    sec = run.cfg.section("walkoff")
    crystal, lam_p = geo.crystal, geo.pump_wavelength
    lam_s = sec.get("signal_wavelength_nm")
    lam_s = 2 * lam_p if lam_s is None else float(lam_s) * 1e-3
    n_s = disp.index_o(crystal, lam_s)

    rho = float(disp.walkoff_angle(crystal, lam_p, geo.cut_angle))
    ext = float(disp.snell_external(rho, n_s))
    side = "away from" if disp.walkoff_direction(crystal) > 0 else "towards"
    print(f"cut angle            {math.degrees(geo.cut_angle):.4f} deg")
    print(f"internal walk-off    {math.degrees(rho):.4f} deg ({rho:.6g} rad), {side} the optic axis")
    print(f"external image       {math.degrees(ext):.4f} deg ({ext:.6g} rad) at {lam_s * 1e3:.1f} nm")
    pump = run.cfg.pump
    if pump is not None and pump.waist_fwhm is not None:
        cone, div = hg.divergence_estimates(pump.waist_fwhm, geo.total_length, lam_p)
        print(f"gain cone a/L        {cone:.6g} rad")
        print(f"pump divergence l/a  {div:.6g} rad")
    else:
        print("divergence estimates need [pump] waist_fwhm_um")

    sweep = sec.get("sweep_deg")
    if sweep is None:
        cuts = np.array([geo.cut_angle])
    else:
        if not (isinstance(sweep, list) and len(sweep) == 3):
            raise ConfigError("[walkoff] sweep_deg must be [start, stop, count]")
        lo, hi, n = sweep
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise ConfigError("[walkoff] sweep_deg count must be an integer >= 2")
        cuts = np.radians(np.linspace(float(lo), float(hi), n))
    rhos = disp.walkoff_angle(crystal, lam_p, cuts)
    exts = disp.snell_external(rhos, n_s)
    rows = [(math.degrees(c), r, e) for c, r, e in zip(cuts, rhos, exts)]
    run.csv("walkoff.csv", ["cut_angle_deg", "walkoff_internal_rad", "walkoff_external_rad"], rows)
    if len(cuts) > 1:
        run.figure(
            "walkoff.svg",
            report.plot_lines,
            [(np.degrees(cuts), np.degrees(rhos), "internal"), (np.degrees(cuts), np.degrees(exts), "external")],
            "cut angle (deg)",
            "walk-off (deg)",
        )
    return EXIT_OK


def cmd_gvm(run: Run) -> int:
    geo = run.cfg.require_geometry()
    n_gp = float(disp.group_index(geo.crystal, "e", geo.pump_wavelength, geo.cut_angle))
    print(f"pump group index     {n_gp:.6f}")
    lam = pm.gvm_wavelength(geo)
    print(f"GVM wavelength       {lam * 1e3:.3f} nm")
    ang, lam = pm.gvm_point(geo)
    print(f"GVM point            {ang:.6g} rad external, {lam * 1e3:.3f} nm")
    return EXIT_OK


def _angular(run: Run, geo, sec):
    cfg = run.cfg
    pump = cfg.require_pump("waist_fwhm")
    lam_s = sec.get("signal_wavelength_nm")
    return an.angular_spectrum(
        geo,
        pump,
        cfg.require_gain(),
        count=cfg.grid.count,
        span_factor=cfg.grid.angular_span,
        cutoff=cfg.grid.cutoff,
        signal_wavelength=None if lam_s is None else float(lam_s) * 1e-3,
        walkoff_scale=float(sec.get("walkoff_scale", 1.0)),
        ignore_gap_phase=cfg.ignore_gap_phase,
    )


def _angular_rows(res: an.AngularResult, prefix=()):
    xs = res.signal_external()
    xi = res.idler_external()
    ni = res.idler.values
    if not np.array_equal(xs, xi):
        ni = np.interp(xs, xi, ni, left=0.0, right=0.0)
    return [prefix + (a, s, i) for a, s, i in zip(xs, res.signal.values, ni)]


def cmd_angular_spectrum(run: Run) -> int:
    geo = run.cfg.require_geometry()
    sec = run.cfg.section("angular_spectrum")
    res = _angular(run, geo, sec)
    run.csv("angular_spectrum.csv", ["external_angle_rad", "N_signal", "N_idler"], _angular_rows(res))

    side = disp.walkoff_direction(geo.crystal)
    t_peak, n_peak = res.peak(side)
    n_s = disp.index_o(geo.crystal, res.signal_wavelength)
    _, wo_ext = an.walkoff_matched_direction(geo, res.signal_wavelength)
    n0 = res.collinear_value()
    print(f"total photons        {hg.total_photons(res.decomposition.eigenvalues, res.G):.6g}")
    print(f"peak                 {float(disp.snell_external(t_peak, n_s)):.6g} rad external")
    print(f"walk-off direction   {wo_ext:.6g} rad external")
    print(f"peak / collinear     {n_peak / n0:.6g}" if n0 > 0 else "peak / collinear     inf")

    series = [(res.signal_external(), res.signal.values, f"{math.degrees(geo.cut_angle):.2f} deg")]
    cuts = _float_list(sec, "cut_angles_deg", "angular_spectrum")
    if cuts:
        rows = []
        series = []
        for c in cuts:
            g = dataclasses.replace(geo, cut_angle=math.radians(c))
            r = _angular(run, g, sec)
            rows += _angular_rows(r, (c,))
            series.append((r.signal_external(), r.signal.values, f"{c:.2f} deg"))
            print(f"cut {c:7.3f} deg      peak {r.peak(side)[1]:.6g}")
        run.csv(
            "angular_spectrum_sweep.csv",
            ["cut_angle_deg", "external_angle_rad", "N_signal", "N_idler"],
            rows,
        )
    positive = [(x, np.maximum(y, 1e-300), lbl) for x, y, lbl in series]
    run.figure(
        "angular_spectrum.svg",
        report.plot_lines,
        positive,
        "external signal angle (rad)",
        "photons per rad",
        logy=res.G > 0,
    )
    return EXIT_OK


def cmd_frequency_spectrum(run: Run) -> int:
    cfg = run.cfg
    geo = cfg.require_geometry()
    pump = cfg.require_pump("duration_fwhm")
    G = cfg.require_gain()
    sec = cfg.section("frequency_spectrum")
    lams = [x * 1e-3 for x in _float_list(sec, "wavelengths_nm", "frequency_spectrum")]
    angles = _float_list(sec, "angles_rad", "frequency_spectrum")
    if not lams and not angles:
        raise ConfigError("[frequency_spectrum] needs wavelengths_nm or angles_rad")
    targets = an.targets_for_wavelengths(geo, lams) + an.targets_for_angles(geo, angles)
    results = an.frequency_spectra(
        geo,
        pump,
        G,
        targets,
        reference_wavelength=cfg.reference_wavelength,
        count=cfg.grid.count,
        span_factor=cfg.grid.spectral_span,
        cutoff=cfg.grid.cutoff,
        ignore_gap_phase=cfg.ignore_gap_phase,
    )
    rows = []
    print("angle_rad   centre_nm   G_eff      N_at_centre_per_nm")
    for r in results:
        rows += [(w, n, r.angle) for w, n in zip(r.wavelength_nm, r.density)]
        print(f"{r.angle:<11.6g} {r.center_wavelength * 1e3:<11.4f} {r.gain:<10.5g} "
              f"{r.value_at(r.center_wavelength * 1e3):.6g}")
    if len(results) > 1:
        base = results[-1]
        b = base.value_at(base.center_wavelength * 1e3)
        for r in results[:-1]:
            v = r.value_at(r.center_wavelength * 1e3)
            print(f"N({r.center_wavelength * 1e3:.1f} nm) / N({base.center_wavelength * 1e3:.1f} nm) "
                  f"= {v / b:.6g}" if b > 0 else "ratio undefined: zero reference")
    run.csv("frequency_spectrum.csv", ["wavelength_nm", "N_signal", "external_angle_rad"], rows)
    run.figure(
        "frequency_spectrum.svg",
        report.plot_lines,
        [(r.wavelength_nm, r.density, f"{r.angle:.4f} rad") for r in results],
        "signal wavelength (nm)",
        "photons per nm",
    )
    return EXIT_OK


def cmd_modes(run: Run) -> int:
    geo = run.cfg.require_geometry()
    sec = run.cfg.section("modes")
    top = _int(sec, "top", 20, "modes")
    res = _angular(run, geo, run.cfg.section("angular_spectrum"))
    lam = res.decomposition.eigenvalues
    st = res.stats
    print(f"modes kept           {len(lam)}")
    print(f"Schmidt number K     {1.0 / np.sum(lam**2):.6g}")
    print(f"effective modes m    {st.m:.6g}")
    print(f"g2                   {st.g2:.6g}")
    print(" n   lambda_n        Lambda_n")
    for n in range(min(top, len(lam))):
        print(f"{n:>2d}   {lam[n]:<14.6e}  {st.weights[n]:.6e}")
    run.csv("modes.csv", ["n", "lambda_n", "Lambda_n"], [(n, a, b) for n, (a, b) in enumerate(zip(lam, st.weights))])
    k = min(top, len(lam))
    idx = np.arange(k)
    run.figure(
        "modes.svg",
        report.plot_lines,
        [(idx, np.maximum(lam[:k], 1e-300), "lambda_n"), (idx, np.maximum(st.weights[:k], 1e-300), "Lambda_n")],
        "mode index n",
        "weight",
        logy=True,
    )
    return EXIT_OK


COMMANDS = {
    "tuning-curve": cmd_tuning_curve,
    "walkoff": cmd_walkoff,
    "gvm": cmd_gvm,
    "angular-spectrum": cmd_angular_spectrum,
    "frequency-spectrum": cmd_frequency_spectrum,
    "modes": cmd_modes,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hgpdc", description="High-gain PDC spectra in birefringent crystals.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("config", help="TOML run configuration")
        s.add_argument("--out", help="output directory (overrides [output] dir)")
        s.add_argument("--svg", action="store_true", help="also render SVG figures")
        s.add_argument("--grid", type=int, help="grid points per axis")
        s.add_argument("--cutoff", type=float, help="relative Schmidt eigenvalue cutoff")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        if args.grid is not None and args.grid < 16:
            raise ConfigError("--grid must be at least 16")
        if args.cutoff is not None and not (args.cutoff >= 0 and math.isfinite(args.cutoff)):
            raise ConfigError("--cutoff must be a non-negative number")
        run = Run(args.command, load(args.config), args)
        code = COMMANDS[args.command](run)
        for path in run.written:
            print(f"wrote {path}")
        return code
    except (ConfigError, DomainError, ContractError) as exc:
        print(f"hgpdc: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoSolutionError, GeometryError) as exc:
        print(f"hgpdc: no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except OSError as exc:
        print(f"hgpdc: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # numerical failures, including unexpected ones
        print(f"hgpdc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
