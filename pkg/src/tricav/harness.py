"""Configuration files, parameter sweeps and CSV/JSON output.

Config files are flat ``key = value`` text, one key per line, ``#`` starts a
comment. Units are part of the key name. Two modes exist:

``physical``
    laboratory parameters; the semiclassical working point is solved once and
    the sweep axis then varies the linearized model around it.
``effective``
    the linearized rates (G_m, detunings, ...) are given directly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional, Sequence, Union

import numpy as np

from .constants import CONSTANTS_VERSION, TABLE
from .dynamics import is_stable, solve_lyapunov
from .entanglement import PHYSICAL_TOL, EntanglementReport, report, symplectic_eigenvalues
from .errors import ConfigError, TricavError, UnstableSystemError
from .model import (
    KAPPA_CONVENTIONS,
    EffectiveParams,
    PhysicalParams,
    WorkingPoint,
    _check_quality_factor,
    build_diffusion,
    build_drift,
    effective_params,
    kappa_from_finesse,
    solve_working_point,
    thermal_occupation,
    with_effective_detuning,
)

TWO_PI = 2 * math.pi
AXES = ("Delta/omega_m", "Delta_a/omega_m", "temperature_K")
OUTPUTS = ("E_mf", "E_ma", "E_af", "n_eff", "tripartite", "max_real_part")
DEFAULT_COUNT = 201
PRESETS = ("fig2a", "fig2b", "fig2d")
CSV_HEADER = ("axis", "E_mf", "E_ma", "E_af", "n_eff", "class", "max_real_part", "stable")

COMMON_KEYS = (
    "mode",
    "omega_m_over_2pi_Hz",
    "quality_factor",
    "temperature_K",
    "atom_coupling_over_2pi_Hz",
    "atom_linewidth_over_2pi_Hz",
    "atom_detuning_over_omega_m",
)
PHYSICAL_KEYS = ("mass_kg", "cavity_length_m", "laser_wavelength_m", "laser_power_W")
EFFECTIVE_KEYS = ("G_m_over_2pi_Hz", "effective_detuning_over_omega_m")
OPTIONAL_KEYS = (
    "kappa_over_2pi_Hz",
    "finesse",
    "kappa_convention",
    "cavity_length_m",
    "cavity_detuning_over_omega_m",
    "effective_detuning_over_omega_m",
    "single_atom_g_over_2pi_Hz",
    "working_point",
    "axis",
    "start",
    "stop",
    "count",
    "outputs",
)
KNOWN_KEYS = frozenset(COMMON_KEYS + PHYSICAL_KEYS + EFFECTIVE_KEYS + OPTIONAL_KEYS)
STRING_KEYS = frozenset({"mode", "kappa_convention", "working_point", "axis", "outputs"})


@dataclass(frozen=True)
class SweepSpec:
    mode: str
    base: Union[PhysicalParams, EffectiveParams]
    axis: Optional[str] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    count: int = DEFAULT_COUNT
    outputs: tuple = OUTPUTS
    working_point: str = "with_atoms"
    effective_detuning: Optional[float] = None
    settings: dict = field(default_factory=dict, compare=False)

    def grid(self) -> np.ndarray:
        if self.axis is None:
            raise ConfigError("no sweep axis configured")
        return np.linspace(self.start, self.stop, self.count)


def _read_pairs(text):
    pairs, lines, problems = {}, {}, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            problems.append(f"line {lineno}: empty key or value")
            continue
        if key in pairs:
            problems.append(f"line {lineno}: duplicate key {key!r} (first set on line {lines[key]})")
            continue
        pairs[key], lines[key] = value, lineno
    return pairs, lines, problems


def _convert(pairs, lines, problems):
    values = {}
    for key, raw in pairs.items():
        if key not in KNOWN_KEYS:
            problems.append(f"line {lines[key]}: unknown key {key!r}")
        elif key in STRING_KEYS:
            values[key] = raw
        else:
            try:
                values[key] = float(raw)
            except ValueError:
                problems.append(f"line {lines[key]}: {key} expects a number, got {raw!r}")
    return values


def _required_for(values):
    required = list(COMMON_KEYS)
    mode = values.get("mode")
    if mode == "physical":
        required += PHYSICAL_KEYS
    elif mode == "effective":
        required += EFFECTIVE_KEYS
    return required


def parse_config(text: str) -> SweepSpec:
    """Parse config text into a fully resolved :class:`SweepSpec`.

    Every problem found (syntax, unknown keys, missing keys, bad values) is
    collected and raised together as one :class:`ConfigError`.
    """
    pairs, lines, problems = _read_pairs(text)
    values = _convert(pairs, lines, problems)

    missing = [k for k in _required_for(values) if k not in values and k not in pairs]
    if missing:
        problems.append("missing required keys: " + ", ".join(missing))
    mode = values.get("mode")
    if mode is not None and mode not in ("physical", "effective"):
        problems.append(f"mode must be 'physical' or 'effective', got {mode!r}")

    has_kappa, has_finesse = "kappa_over_2pi_Hz" in values, "finesse" in values
    if has_kappa == has_finesse:
        problems.append("exactly one of kappa_over_2pi_Hz or finesse is required")
    if has_finesse and "cavity_length_m" not in values:
        problems.append("finesse requires cavity_length_m")
    convention = values.get("kappa_convention", "linewidth")
    if convention not in KAPPA_CONVENTIONS:
        problems.append(f"kappa_convention must be one of {KAPPA_CONVENTIONS}")

    if mode == "physical":
        n_det = ("cavity_detuning_over_omega_m" in values) + ("effective_detuning_over_omega_m" in values)
        if n_det != 1:
            problems.append(
                "exactly one of cavity_detuning_over_omega_m or effective_detuning_over_omega_m is required"
            )
    elif mode == "effective":
        for key in ("cavity_detuning_over_omega_m", "mass_kg", "laser_power_W", "laser_wavelength_m",
                    "single_atom_g_over_2pi_Hz", "working_point"):
            if key in values:
                problems.append(f"line {lines[key]}: {key} is not used in effective mode")
    working_point = values.get("working_point", "with_atoms")
    if working_point not in ("with_atoms", "bare_cavity"):
        problems.append("working_point must be 'with_atoms' or 'bare_cavity'")

    sweep_keys = [k for k in ("axis", "start", "stop") if k in values]
    axis = values.get("axis")
    if sweep_keys and len(sweep_keys) < 3:
        problems.append("axis, start and stop must be given together")
    if axis is not None and axis not in AXES:
        problems.append(f"axis must be one of {AXES}, got {axis!r}")
    count = values.get("count", DEFAULT_COUNT)
    if count != int(count) or count < 2:
        problems.append("count must be an integer >= 2")
    if "start" in values and "stop" in values and not values["start"] < values["stop"]:
        problems.append("start must be smaller than stop")
    if axis == "temperature_K" and values.get("start", 0.0) < 0:
        problems.append("temperature sweep must start at T >= 0")
    outputs = tuple(s.strip() for s in values.get("outputs", ",".join(OUTPUTS)).split(","))
    bad = [o for o in outputs if o not in OUTPUTS]
    if bad:
        problems.append(f"unknown outputs {bad}; choose from {OUTPUTS}")

    if problems:
        raise ConfigError(problems)

    try:
        base, eff_detuning = _build_base(mode, values, convention)
    except (TricavError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return SweepSpec(
        mode=mode,
        base=base,
        axis=axis,
        start=values.get("start"),
        stop=values.get("stop"),
        count=int(count),
        outputs=outputs,
        working_point=working_point,
        effective_detuning=eff_detuning,
        settings=dict(sorted(values.items())),
    )


def _build_base(mode, v, convention):
    omega_m = TWO_PI * v["omega_m_over_2pi_Hz"]
    atoms = dict(
        atom_coupling=TWO_PI * v["atom_coupling_over_2pi_Hz"],
        atom_linewidth=TWO_PI * v["atom_linewidth_over_2pi_Hz"],
        detuning_a=v["atom_detuning_over_omega_m"] * omega_m,
    )
    if mode == "effective":
        if "kappa_over_2pi_Hz" in v:
            kappa = TWO_PI * v["kappa_over_2pi_Hz"]
        else:
            kappa = kappa_from_finesse(v["cavity_length_m"], v["finesse"], convention)
        Q = v["quality_factor"]
        _check_quality_factor(Q)
        base = EffectiveParams(
            omega_m=omega_m,
            gamma_m=omega_m / Q,
            kappa=kappa,
            Delta=v["effective_detuning_over_omega_m"] * omega_m,
            G_m=TWO_PI * v["G_m_over_2pi_Hz"],
            G_a=atoms["atom_coupling"],
            gamma_a=atoms["atom_linewidth"],
            Delta_a=atoms["detuning_a"],
            nbar=thermal_occupation(v["temperature_K"], omega_m),
        )
        return base, None

    g = v.get("single_atom_g_over_2pi_Hz")
    base = PhysicalParams(
        omega_m=omega_m,
        quality_factor=v["quality_factor"],
        mass=v["mass_kg"],
        cavity_length=v["cavity_length_m"],
        laser_wavelength=v["laser_wavelength_m"],
        laser_power=v["laser_power_W"],
        detuning_f=v.get("cavity_detuning_over_omega_m", 0.0) * omega_m,
        temperature=v["temperature_K"],
        finesse=v.get("finesse"),
        kappa=TWO_PI * v["kappa_over_2pi_Hz"] if "kappa_over_2pi_Hz" in v else None,
        single_atom_g=None if g is None else TWO_PI * g,
        kappa_convention=convention,
        **atoms,
    )
    eff = v.get("effective_detuning_over_omega_m")
    return base, None if eff is None else eff * omega_m


def resolve(spec: SweepSpec) -> tuple[EffectiveParams, Optional[WorkingPoint]]:
    """Effective parameters at the configured base point.

    In physical mode with ``working_point = bare_cavity`` the intracavity
    amplitude is solved without the atoms, which are then added to the
    linearized model at that fixed working point.
    """
    if spec.mode == "effective":
        return spec.base, None
    p = spec.base
    solve_for = replace(p, atom_coupling=0.0) if spec.working_point == "bare_cavity" else p
    if spec.effective_detuning is not None:
        solve_for = with_effective_detuning(solve_for, spec.effective_detuning)
    w = solve_working_point(solve_for)
    return replace(effective_params(solve_for, w), G_a=p.atom_coupling), w


def apply_axis(e: EffectiveParams, axis: str, value: float) -> EffectiveParams:
    if axis == "Delta/omega_m":
        return replace(e, Delta=value * e.omega_m)
    if axis == "Delta_a/omega_m":
        return replace(e, Delta_a=value * e.omega_m)
    if axis == "temperature_K":
        return replace(e, nbar=thermal_occupation(value, e.omega_m))
    raise ConfigError(f"unknown axis {axis!r}")


@dataclass(frozen=True)
class Row:
    axis: float
    report: Optional[EntanglementReport]
    stable: bool
    max_real_part: Optional[float]
    error: Optional[str] = None
    covariance: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def evaluate_point(e: EffectiveParams, axis_value: float = math.nan) -> Row:
    """Stability, steady-state covariance and entanglement report for one point.

    Unstable or numerically failing points produce a row without measures
    rather than raising.
    """
    try:
        A, D = build_drift(e), build_diffusion(e)
        info = is_stable(A)
        if not info.stable:
            return Row(axis_value, None, False, info.max_real_part)
        V = solve_lyapunov(A, D).entries
        nu_min = symplectic_eigenvalues(V)[0]
        if nu_min < 0.5 - PHYSICAL_TOL:
            return Row(axis_value, None, True, info.max_real_part, f"unphysical CM (nu_min={nu_min:.6g})", V)
        return Row(axis_value, report(V, info), True, info.max_real_part, None, V)
    except (TricavError, ValueError, ArithmeticError) as exc:
        return Row(axis_value, None, False, None, f"{type(exc).__name__}: {exc}")


def _evaluate_task(args):
    base, axis, value = args
    return evaluate_point(apply_axis(base, axis, value), value)


@dataclass
class SweepResult:
    rows: list
    metadata: dict


def run_sweep(spec: SweepSpec, workers: int = 1, order: Optional[Sequence[int]] = None) -> SweepResult:
    """Evaluate every grid point of ``spec``.

    ``order`` permutes the evaluation schedule (for testing); rows are always
    returned in ascending axis order and do not depend on it or on ``workers``.
    """
    base, wp = resolve(spec)
    grid = spec.grid()
    idx = list(range(len(grid))) if order is None else list(order)
    if sorted(idx) != list(range(len(grid))):
        raise ValueError("order must be a permutation of the grid indices")
    tasks = [(base, spec.axis, float(grid[i])) for i in idx]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        results = [_evaluate_task(t) for t in tasks]
    rows = [None] * len(grid)
    for i, row in zip(idx, results):
        rows[i] = row
    metadata = {
        "mode": spec.mode,
        "axis": spec.axis,
        "grid": {"start": spec.start, "stop": spec.stop, "count": spec.count},
        "outputs": list(spec.outputs),
        "settings": spec.settings,
        "effective_params": _effective_dict(base),
        "working_point": _working_point_dict(wp),
        "constants_version": CONSTANTS_VERSION,
        "constants": dict(TABLE),
        "unstable_points": sum(1 for r in rows if not r.stable and r.error is None),
        "failed_points": sum(1 for r in rows if r.error is not None),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    return SweepResult(rows, metadata)


def _effective_dict(e):
    return {k: getattr(e, k) for k in EffectiveParams.__dataclass_fields__}


def _working_point_dict(w):
    if w is None:
        return None
    return {
        "alpha_s": w.alpha_s,
        "photon_number": w.photon_number,
        "q_s": w.q_s,
        "c_s": [w.c_s.real, w.c_s.imag],
        "G_m": w.G_m,
        "Delta": w.Delta,
        "bistable": w.bistable,
        "all_roots": list(w.all_roots),
        "excitation_probability": w.excitation_probability,
        "warnings": list(w.warnings),
    }


def _fmt(x):
    return "" if x is None else format(float(x), ".12g")


def _csv_fields(row, outputs):
    rep = row.report
    measure = lambda name: _fmt(getattr(rep, name)) if rep is not None and name in outputs else ""
    return [
        _fmt(row.axis),
        measure("E_mf"),
        measure("E_ma"),
        measure("E_af"),
        measure("n_eff"),
        str(rep.tripartite) if rep is not None and "tripartite" in outputs else "",
        _fmt(row.max_real_part) if "max_real_part" in outputs else "",
        "true" if row.stable else "false",
    ]


def emit(result: SweepResult, fmt: str = "csv", include_timestamp: bool = False) -> bytes:
    """Serialize a sweep. Output is byte-identical for identical inputs.

    The timestamp is left out of JSON unless ``include_timestamp`` is set,
    since it would break reproducibility.
    """
    outputs = result.metadata.get("outputs", OUTPUTS)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in result.rows:
            writer.writerow(_csv_fields(row, outputs))
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        meta = dict(result.metadata)
        if not include_timestamp:
            meta.pop("timestamp", None)
        rows = []
        for row in result.rows:
            entry = {"axis": row.axis, "stable": row.stable, "max_real_part": row.max_real_part, "error": row.error}
            if row.report is not None:
                entry.update({k: v for k, v in row.report.as_dict().items() if k not in entry})
            rows.append(entry)
        text = json.dumps({"metadata": meta, "rows": rows}, indent=2, sort_keys=True, allow_nan=False, default=str)
        return (text + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json'")


def write(result: SweepResult, path, fmt: str = "csv") -> None:
    data = emit(result, fmt)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write sweep output to {path}: {exc.strerror}") from exc


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    return resources.files("tricav.presets").joinpath(f"{name}.cfg").read_text(encoding="utf-8")


def load_preset(name: str) -> SweepSpec:
    return parse_config(preset_text(name))
