"""TOML run configuration.

One file describes one run: ``[crystal]``, ``[geometry]``, ``[pump]``,
``[grid]``, ``[gain]``, ``[output]`` and an optional table per command.
Lengths are given in mm or um, wavelengths in nm and cut angles in degrees
(units are part of every key name); everything is converted to the
library's units (um, m, rad, s) here.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from hgpdc import dispersion as disp
from hgpdc.amplitude import DEFAULT_COUNT, PumpSpec
from hgpdc.errors import ConfigError, HgpdcError
from hgpdc.phasematch import ProcessGeometry, Segment

SECTIONS = {
    "crystal": {"name", "sellmeier_o", "sellmeier_e", "window_um"},
    "geometry": {"type", "pump_wavelength_nm", "cut_angle_deg", "segments_mm", "ignore_gap_phase"},
    "pump": {"waist_fwhm_um", "duration_fwhm_ps"},
    "grid": {"count", "angular_span", "spectral_span", "cutoff"},
    "gain": {"G", "reference_wavelength_nm"},
    "output": {"dir"},
    "tuning_curve": {"angle_range_rad", "wavelength_range_nm", "samples"},
    "walkoff": {"sweep_deg", "signal_wavelength_nm"},
    "gvm": set(),
    "angular_spectrum": {"cut_angles_deg", "signal_wavelength_nm", "walkoff_scale"},
    "frequency_spectrum": {"wavelengths_nm", "angles_rad"},
    "modes": {"top"},
}


@dataclass(frozen=True)
class GridConfig:
    count: int = DEFAULT_COUNT
    angular_span: float = 1.5
    spectral_span: float = 6.0
    cutoff: float = 1e-12


@dataclass(frozen=True)
class RunConfig:
    digest: str
    crystal: disp.CrystalSpec
    geometry: ProcessGeometry | None
    pump: PumpSpec | None
    grid: GridConfig
    ignore_gap_phase: bool = False
    G: float | None = None
    reference_wavelength: float | None = None
    output_dir: Path = Path("hgpdc_out")
    commands: dict[str, dict[str, Any]] = field(default_factory=dict)

    def section(self, name: str) -> dict[str, Any]:
        return self.commands.get(name, {})

    def require_geometry(self) -> ProcessGeometry:
        if self.geometry is None:
            raise ConfigError("missing [geometry] section")
        return self.geometry

    def require_pump(self, *keys: str) -> PumpSpec:
        if self.pump is None:
            raise ConfigError("missing [pump] section")
        for k in keys:
            if getattr(self.pump, k) is None:
                raise ConfigError(f"[pump] needs {k}")
        return self.pump

    def require_gain(self) -> float:
        if self.G is None:
            raise ConfigError("missing [gain] G")
        return self.G


def _number(sec: str, key: str, v, positive=False, minimum=None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"[{sec}] {key} must be a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"[{sec}] {key} must be positive, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"[{sec}] {key} must be >= {minimum}, got {v!r}")
    return float(v)


def _numbers(sec: str, key: str, v, length: int | None = None) -> list[float]:
    if not isinstance(v, list):
        raise ConfigError(f"[{sec}] {key} must be an array")
    if length is not None and len(v) != length:
        raise ConfigError(f"[{sec}] {key} needs {length} entries, got {len(v)}")
    return [_number(sec, key, x) for x in v]


def _crystal(sec: dict) -> disp.CrystalSpec:
    name = sec.get("name", "BBO")
    if not isinstance(name, str):
        raise ConfigError("[crystal] name must be a string")
    base = disp.BUILTIN_CRYSTALS.get(name)
    custom = any(k in sec for k in ("sellmeier_o", "sellmeier_e", "window_um"))
    if not custom:
        if base is None:
            known = ", ".join(sorted(disp.BUILTIN_CRYSTALS))
            raise ConfigError(f"unknown crystal {name!r} (built in: {known})")
        return base
    try:
        so = sec.get("sellmeier_o", base.sellmeier_o.as_list() if base else None)
        se = sec.get("sellmeier_e", base.sellmeier_e.as_list() if base else None)
        win = sec.get("window_um", list(base.window) if base else None)
        if so is None or se is None or win is None:
            raise ConfigError(
                "[crystal] a custom crystal needs sellmeier_o, sellmeier_e and window_um"
            )
        so = disp.SellmeierSet(*_numbers("crystal", "sellmeier_o", so, 4))
        se = disp.SellmeierSet(*_numbers("crystal", "sellmeier_e", se, 4))
        win = tuple(_numbers("crystal", "window_um", win, 2))
        return disp.CrystalSpec(name, so, se, win)
    except HgpdcError as exc:
        raise ConfigError(str(exc)) from exc


def _geometry(sec: dict, crystal) -> tuple[ProcessGeometry, bool]:
    for k in ("type", "pump_wavelength_nm", "cut_angle_deg"):
        if k not in sec:
            raise ConfigError(f"[geometry] missing {k}")
    segs = sec.get("segments_mm", [[5.0, 0.0]])
    if not isinstance(segs, list) or not segs:
        raise ConfigError("[geometry] segments_mm must be a non-empty array of [length, gap]")
    segments = []
    for s in segs:
        vals = _numbers("geometry", "segments_mm", s if isinstance(s, list) else [s])
        if len(vals) == 1:
            vals.append(0.0)
        if len(vals) != 2:
            raise ConfigError("[geometry] each segment is [length_mm] or [length_mm, gap_mm]")
        segments.append(Segment(vals[0] * 1e-3, vals[1] * 1e-3))
    gap = sec.get("ignore_gap_phase", False)
    if not isinstance(gap, bool):
        raise ConfigError("[geometry] ignore_gap_phase must be true or false")
    try:
        geo = ProcessGeometry(
            crystal,
            str(sec["type"]),
            _number("geometry", "pump_wavelength_nm", sec["pump_wavelength_nm"], positive=True)
            * 1e-3,
            math.radians(_number("geometry", "cut_angle_deg", sec["cut_angle_deg"])),
            tuple(segments),
        )
    except HgpdcError as exc:
        raise ConfigError(f"[geometry] {exc}") from exc
    return geo, gap


def parse(text: str, digest: str | None = None) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if digest is None:
        digest = hashlib.sha256(text.encode()).hexdigest()
    for name, sec in doc.items():
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        if not isinstance(sec, dict):
            raise ConfigError(f"[{name}] must be a table")
        extra = set(sec) - SECTIONS[name]
        if extra:
            raise ConfigError(f"[{name}] unknown keys: {', '.join(sorted(extra))}")

    crystal = _crystal(doc.get("crystal", {}))
    geometry, ignore_gap = None, False
    if "geometry" in doc:
        geometry, ignore_gap = _geometry(doc["geometry"], crystal)

    pump = None
    if "pump" in doc:
        if geometry is None:
            raise ConfigError("[pump] needs a [geometry] section for the pump wavelength")
        p = doc["pump"]
        waist = p.get("waist_fwhm_um")
        dur = p.get("duration_fwhm_ps")
        pump = PumpSpec(
            geometry.pump_wavelength,
            None if waist is None else _number("pump", "waist_fwhm_um", waist, positive=True) * 1e-6,
            None if dur is None else _number("pump", "duration_fwhm_ps", dur, positive=True) * 1e-12,
        )

    g = doc.get("grid", {})
    count = g.get("count", DEFAULT_COUNT)
    if isinstance(count, bool) or not isinstance(count, int) or count < 16:
        raise ConfigError(f"[grid] count must be an integer >= 16, got {count!r}")
    grid = GridConfig(
        count,
        _number("grid", "angular_span", g.get("angular_span", 1.5), positive=True),
        _number("grid", "spectral_span", g.get("spectral_span", 6.0), positive=True),
        _number("grid", "cutoff", g.get("cutoff", 1e-12), minimum=0.0),
    )

    gain = doc.get("gain", {})
    G = gain.get("G")
    G = None if G is None else _number("gain", "G", G, minimum=0.0)
    ref = gain.get("reference_wavelength_nm")
    ref = None if ref is None else _number("gain", "reference_wavelength_nm", ref, positive=True) * 1e-3

    out = doc.get("output", {}).get("dir", "hgpdc_out")
    if not isinstance(out, str) or not out:
        raise ConfigError("[output] dir must be a non-empty string")

    commands = {k: v for k, v in doc.items() if k in SECTIONS and k not in (
        "crystal", "geometry", "pump", "grid", "gain", "output")}
    return RunConfig(digest, crystal, geometry, pump, grid, ignore_gap, G, ref, Path(out), commands)


def load(path: str | Path) -> RunConfig:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"configuration {path} is not UTF-8") from exc
    return parse(text, hashlib.sha256(raw).hexdigest())
