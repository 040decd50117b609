"""Configuration-driven parameter sweeps with deterministic CSV/JSON output.

A sweep is described by a JSON-shaped config: a system, its fixed
parameters, one swept variable on a linear grid, a list of criteria, and an
output destination.  Grid points are evaluated independently by a worker
pool and assembled in grid order, so the emitted bytes are identical
regardless of the parallel schedule.

Figure presets bundle the configs behind the narrative datasets: each
preset id expands to one or more named tables covering the corresponding
parameter family.
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import isnan, nan
from typing import Callable, Mapping

import numpy as np

from . import criteria as _criteria
from .eigensolve import DEGENERACY_RTOL, eig_full, ground_state
from .ensembles import (
    ThermalSpec,
    bs_double_fock,
    bs_four_mode,
    bs_single_fock,
    thermal_state,
)
from .errors import (
    ConfigError,
    ConvergenceFailure,
    NumericalFailure,
    UnknownPreset,
)
from .fockspace import PureState, State
from .hamiltonians import (
    FourModeParams,
    SymMatrix,
    TwoModeParams,
    build_four_mode,
    build_two_mode,
)
from .observables import HZMoments, ellipsoid, hz_moments

__all__ = [
    "CriterionSpec",
    "GridSpec",
    "OutputSpec",
    "SweepConfig",
    "SweepRow",
    "SweepTable",
    "ComponentTable",
    "validate_config",
    "config_from_dict",
    "run_sweep",
    "figure_preset",
    "preset_ids",
    "ellipsoid_table",
    "format_float",
]

#: Conversion anchor for the nanokelvin temperature unit.
KAPPA_OVER_KB_NK = 50.0

WORKERS_ENV = "TWINWELL_WORKERS"

_SYSTEMS = (
    "two_mode",
    "four_mode",
    "bs_single",
    "bs_double",
    "bs_four",
    "coherent_lo",
)
_SWEEP_VARS = ("Ng_over_kappa", "N", "N1", "T", "alpha", "m")
_INTEGER_VARS = ("N", "N1", "m")

#: Sweep variables each system accepts.
_ALLOWED_VARS = {
    "two_mode": ("Ng_over_kappa", "N", "T"),
    "four_mode": ("Ng_over_kappa", "N1", "T"),
    "bs_single": ("N", "m"),
    "bs_double": ("N", "m"),
    "bs_four": ("N1",),
    "coherent_lo": ("alpha",),
}

#: Criteria each system can evaluate.
_ALLOWED_CRITERIA = {
    "two_mode": ("e_hz", "e_hz_planar", "e_hz_rotated"),
    "four_mode": (
        "e_hz",
        "e_hz_planar",
        "e_hz_rotated",
        "e_hz_spin",
        "duan_sum_spin",
        "heisenberg_product",
    ),
    "bs_single": ("e_hz", "e_hz_planar", "e_hz_rotated"),
    "bs_double": ("e_hz", "e_hz_planar", "e_hz_rotated"),
    "bs_four": (
        "e_hz",
        "e_hz_planar",
        "e_hz_rotated",
        "e_hz_spin",
        "duan_sum_spin",
        "heisenberg_product",
    ),
    "coherent_lo": ("coherent_lo_ratio", "e_hz", "e_hz_planar"),
}

_WITNESS_NAMES = ("duan_sum_spin", "heisenberg_product")


def format_float(value: float) -> str:
    """12-significant-digit scientific form, round-half-even, no -0.0."""
    if isnan(value):
        return "nan"
    if value == 0.0:
        value = 0.0
    return f"{value:.11e}"


@dataclass(frozen=True)
class GridSpec:
    """Linear sweep grid; values are evenly spaced from start to stop."""

    start: float
    stop: float
    points: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class OutputSpec:
    format: str
    path: str


@dataclass(frozen=True)
class CriterionSpec:
    """One requested criterion column.

    ``m`` is None when the sweep variable itself supplies the order.
    """

    name: str
    m: int | None = None
    pair: int = 0
    rotated: bool = False

    def column(self) -> str:
        parts = [self.name]
        if self.name == "e_hz" and self.m is not None:
            parts.append(f"m{self.m}")
        if self.pair:
            parts.append(f"p{self.pair}")
        if self.rotated and self.name == "e_hz":
            parts.append("rot")
        if self.rotated and self.name == "e_hz_spin":
            parts.append("rot")
        return "_".join(parts)

    def canonical(self) -> dict:
        out: dict = {"name": self.name}
        if self.name == "e_hz":
            if self.m is not None:
                out["m"] = self.m
            out["pair"] = self.pair
            out["rotated"] = self.rotated
        elif self.name in ("e_hz_planar", "e_hz_rotated"):
            out["pair"] = self.pair
        elif self.name == "e_hz_spin":
            out["rotated"] = self.rotated
        return out


@dataclass(frozen=True)
class SweepConfig:
    """Validated sweep description in canonical form."""

    system: str
    params: Mapping[str, float]
    sweep_variable: str
    grid: GridSpec
    criteria: tuple[CriterionSpec, ...]
    temperature_unit: str
    output: OutputSpec

    def canonical(self) -> dict:
        return {
            "system": self.system,
            "params": dict(sorted(self.params.items())),
            "sweep": {
                "variable": self.sweep_variable,
                "start": self.grid.start,
                "stop": self.grid.stop,
                "points": self.grid.points,
            },
            "criteria": [c.canonical() for c in self.criteria],
            "temperature_unit": self.temperature_unit,
            "output": {"format": self.output.format, "path": self.output.path},
        }

    def columns(self) -> tuple[str, ...]:
        return tuple(c.column() for c in self.criteria)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated grid point; wall time is informational, never emitted."""

    sweep_value: float
    values: tuple[float, ...]
    codes: tuple[int, ...]
    degenerate: bool
    wall_time: float


class _Diagnostics:
    def __init__(self) -> None:
        self.messages: list[str] = []

    def add(self, key: str, message: str) -> None:
        self.messages.append(f"{key}: {message}")

    def raise_if_any(self) -> None:
        if self.messages:
            err = ConfigError("; ".join(self.messages))
            err.diagnostics = list(self.messages)
            raise err


def _as_number(diag: _Diagnostics, key: str, value: object) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        diag.add(key, f"expected a number, got {value!r}")
        return None
    return float(value)


def _as_int(diag: _Diagnostics, key: str, value: object) -> int | None:
    num = _as_number(diag, key, value)
    if num is None:
        return None
    if abs(num - round(num)) > 1e-9:
        diag.add(key, f"expected an integer, got {value!r}")
        return None
    return int(round(num))


#: Per-system parameter schema: required names, then optional with defaults.
_PARAM_SCHEMA = {
    "two_mode": (
        ("N",),
        {"kappa": 1.0, "Ng_over_kappa": None, "T": 0.0},
    ),
    "four_mode": (
        ("N1", "N2"),
        {
            "kappa1": 1.0,
            "kappa2": 1.0,
            "g12_over_g11": 0.0,
            "g22_over_g11": None,
            "N2g22_over_kappa": None,
            "matched_g22": False,
            "Ng_over_kappa": None,
            "T": 0.0,
        },
    ),
    "bs_single": (("N",), {}),
    "bs_double": (("N",), {}),
    "bs_four": (("N1", "N2"), {}),
    "coherent_lo": (
        ("N",),
        {"kappa": 1.0, "Ng_over_kappa": None},
    ),
}

_INT_PARAMS = ("N", "N1", "N2")


def _validate_params(
    diag: _Diagnostics, system: str, raw: object, sweep_var: str
) -> dict:
    required, optional = _PARAM_SCHEMA[system]
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        diag.add("params", "expected an object")
        return {}
    out: dict = {}
    for key, value in raw.items():
        if key not in required and key not in optional:
            diag.add(f"params.{key}", f"unknown parameter for system {system}")
            continue
        if key == "matched_g22":
            if not isinstance(value, bool):
                diag.add(f"params.{key}", "expected true or false")
                continue
            out[key] = value
        elif key in _INT_PARAMS:
            num = _as_int(diag, f"params.{key}", value)
            if num is not None:
                if num < 1:
                    diag.add(f"params.{key}", "must be at least 1")
                else:
                    out[key] = num
        else:
            num = _as_number(diag, f"params.{key}", value)
            if num is not None:
                out[key] = num
    for key in required:
        if key == sweep_var:
            if key in out:
                diag.add(f"params.{key}", "is the sweep variable; remove it")
                out.pop(key)
            continue
        if key not in out:
            diag.add(f"params.{key}", f"required for system {system}")
    for key, default in optional.items():
        if key == sweep_var:
            if key in out:
                diag.add(f"params.{key}", "is the sweep variable; remove it")
                out.pop(key)
            continue
        if key not in out and default is not None:
            out[key] = default
    if sweep_var == "T" and "T" in out:
        out.pop("T")
    for key in ("kappa", "kappa1", "kappa2"):
        if key in out and out[key] <= 0:
            diag.add(f"params.{key}", "must be positive")
    if "T" in out and out["T"] < 0:
        diag.add("params.T", "must be nonnegative")
    return out


def _validate_system_rules(
    diag: _Diagnostics, system: str, params: dict, sweep_var: str
) -> None:
    if sweep_var not in _ALLOWED_VARS[system]:
        diag.add(
            "sweep.variable",
            f"system {system} cannot sweep {sweep_var}; "
            f"allowed: {', '.join(_ALLOWED_VARS[system])}",
        )
        return
    if system in ("two_mode", "four_mode") and sweep_var != "Ng_over_kappa":
        if params.get("Ng_over_kappa") is None:
            diag.add(
                "params.Ng_over_kappa",
                f"required when sweeping {sweep_var}",
            )
    if system == "coherent_lo" and params.get("Ng_over_kappa") is None:
        diag.add("params.Ng_over_kappa", "required for system coherent_lo")
    if system == "four_mode":
        modes = [
            params.get("g22_over_g11") is not None,
            params.get("N2g22_over_kappa") is not None,
            bool(params.get("matched_g22")),
        ]
        if sum(modes) != 1:
            diag.add(
                "params.g22_over_g11",
                "exactly one of g22_over_g11, N2g22_over_kappa, "
                "matched_g22 must be given",
            )
        if not params.get("matched_g22"):
            params.pop("matched_g22", None)


def _validate_criteria(
    diag: _Diagnostics, system: str, raw: object, sweep_var: str
) -> tuple[CriterionSpec, ...]:
    if not isinstance(raw, list) or not raw:
        diag.add("criteria", "expected a nonempty list")
        return ()
    allowed = _ALLOWED_CRITERIA.get(system, ())
    out: list[CriterionSpec] = []
    for i, entry in enumerate(raw):
        key = f"criteria[{i}]"
        if isinstance(entry, str):
            entry = {"name": entry}
        if not isinstance(entry, dict):
            diag.add(key, "expected an object or a name string")
            continue
        name = entry.get("name")
        if name not in _criteria.__all__ or name in (
            "Classification",
            "CriterionResult",
            "WitnessResult",
            "CoherenceResult",
            "CJTable",
        ):
            diag.add(f"{key}.name", f"unknown criterion {name!r}")
            continue
        if name not in allowed:
            diag.add(
                f"{key}.name",
                f"criterion {name} not available for system {system}",
            )
            continue
        unknown = set(entry) - {"name", "m", "pair", "rotated"}
        if unknown:
            diag.add(key, f"unknown keys: {', '.join(sorted(unknown))}")
            continue
        m: int | None = None
        if "m" in entry:
            if name != "e_hz":
                diag.add(f"{key}.m", f"{name} does not take a moment order")
                continue
            if sweep_var == "m":
                diag.add(
                    f"{key}.m", "fixed order conflicts with sweeping m"
                )
                continue
            m = _as_int(diag, f"{key}.m", entry["m"])
            if m is None:
                continue
            if m < 1:
                diag.add(f"{key}.m", "must be at least 1")
                continue
        elif name == "e_hz" and sweep_var != "m":
            m = 1
        pair = 0
        if "pair" in entry:
            if name not in ("e_hz", "e_hz_planar", "e_hz_rotated"):
                diag.add(f"{key}.pair", f"{name} does not take a pair")
                continue
            pair = _as_int(diag, f"{key}.pair", entry["pair"])
            if pair is None:
                continue
            if pair not in (0, 1):
                diag.add(f"{key}.pair", "must be 0 or 1")
                continue
            if pair == 1 and system not in ("four_mode", "bs_four"):
                diag.add(f"{key}.pair", "pair 1 needs a four-mode system")
                continue
        rotated = False
        if "rotated" in entry:
            if name not in ("e_hz", "e_hz_spin"):
                diag.add(f"{key}.rotated", f"{name} does not take rotated")
                continue
            if not isinstance(entry["rotated"], bool):
                diag.add(f"{key}.rotated", "expected true or false")
                continue
            rotated = entry["rotated"]
        out.append(CriterionSpec(name, m, pair, rotated))
    columns = [c.column() for c in out]
    if len(set(columns)) != len(columns):
        diag.add("criteria", "duplicate criterion columns requested")
    return tuple(out)


def config_from_dict(raw: object) -> SweepConfig:
    """Validate a parsed config object, collecting structured diagnostics.

    Raises ConfigError carrying every problem found (``diagnostics``
    attribute), naming the offending key for each.
    """
    diag = _Diagnostics()
    if not isinstance(raw, dict):
        diag.add("config", "expected a JSON object")
        diag.raise_if_any()
    unknown = set(raw) - {
        "system",
        "params",
        "sweep",
        "criteria",
        "temperature_unit",
        "output",
    }
    if unknown:
        diag.add("config", f"unknown keys: {', '.join(sorted(unknown))}")
    system = raw.get("system")
    if system not in _SYSTEMS:
        diag.add("system", f"unknown system {system!r}")
        diag.raise_if_any()

    sweep_raw = raw.get("sweep")
    if not isinstance(sweep_raw, dict):
        diag.add("sweep", "expected an object")
        diag.raise_if_any()
    var = sweep_raw.get("variable")
    if var not in _SWEEP_VARS:
        diag.add("sweep.variable", f"unknown sweep variable {var!r}")
        diag.raise_if_any()

    start = _as_number(diag, "sweep.start", sweep_raw.get("start"))
    stop = _as_number(diag, "sweep.stop", sweep_raw.get("stop"))
    points = _as_int(diag, "sweep.points", sweep_raw.get("points"))
    grid = None
    if start is not None and stop is not None and points is not None:
        if points < 2:
            diag.add("grid", "points must be at least 2")
        elif not start < stop:
            diag.add("grid", "start must be less than stop")
        else:
            grid = GridSpec(start, stop, points)
            if var in _INTEGER_VARS:
                values = grid.values()
                if np.any(np.abs(values - np.round(values)) > 1e-9):
                    diag.add(
                        "grid",
                        f"sweeping {var} needs integer grid values",
                    )
                elif np.round(values).min() < 1:
                    diag.add("grid", f"{var} values must be at least 1")

    params = _validate_params(diag, system, raw.get("params"), var)
    _validate_system_rules(diag, system, params, var)
    crits = _validate_criteria(diag, system, raw.get("criteria"), var)

    unit = raw.get("temperature_unit", "kappa_units")
    if unit not in ("kappa_units", "nanokelvin"):
        diag.add("temperature_unit", f"unknown unit {unit!r}")
    elif unit == "nanokelvin":
        thermal = var == "T" or params.get("T", 0.0) > 0
        if not thermal:
            diag.add(
                "temperature_unit",
                "nanokelvin needs a swept or fixed temperature",
            )

    out_raw = raw.get("output", {})
    if not isinstance(out_raw, dict):
        diag.add("output", "expected an object")
        out_raw = {}
    fmt = out_raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        diag.add("output.format", f"unknown format {fmt!r}")
    path = out_raw.get("path", "sweep.csv" if fmt == "csv" else "sweep.json")
    if not isinstance(path, str) or not path:
        diag.add("output.path", "expected a nonempty string")

    diag.raise_if_any()
    assert grid is not None
    return SweepConfig(
        system=system,
        params=params,
        sweep_variable=var,
        grid=grid,
        criteria=crits,
        temperature_unit=unit,
        output=OutputSpec(fmt, path),
    )


def validate_config(text: str) -> SweepConfig:
    """Parse and validate raw config text (JSON)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        err = ConfigError(f"config: not valid JSON ({exc})")
        err.diagnostics = [str(err)]
        raise err from exc
    return config_from_dict(raw)


def _temperature_kappa(cfg: dict, x: float) -> float:
    if cfg["sweep"]["variable"] == "T":
        t = x
    else:
        t = cfg["params"].get("T", 0.0)
    if cfg["temperature_unit"] == "nanokelvin":
        t = t / KAPPA_OVER_KB_NK
    return t


def _ground_with_flag(h: SymMatrix) -> tuple[State, bool]:
    g = ground_state(h)
    return PureState(h.basis, g.vector.astype(np.complex128)), g.degenerate


def _thermal_with_flag(
    h: SymMatrix, params: TwoModeParams | FourModeParams, t: float
) -> tuple[State, bool]:
    spectrum = eig_full(h)
    state = thermal_state(ThermalSpec(params, t), spectrum)
    scale = max(h.max_row_norm(), 1.0)
    gap = float(spectrum.values[1] - spectrum.values[0]) if h.dim > 1 else nan
    return state, bool(h.dim > 1 and gap < DEGENERACY_RTOL * scale)


def _build_point(cfg: dict, x: float) -> tuple[State, bool, HZMoments | None, float]:
    """State, degeneracy flag, homodyne moments, and alpha at one grid point."""
    system = cfg["system"]
    params = cfg["params"]
    var = cfg["sweep"]["variable"]

    def val(name: str) -> float:
        return x if var == name else params[name]

    if system == "two_mode":
        n = int(round(val("N")))
        kappa = params["kappa"]
        coupling = val("Ng_over_kappa")
        two = TwoModeParams(kappa, coupling * kappa / n, n)
        t = _temperature_kappa(cfg, x)
        h = build_two_mode(two)
        if t > 0:
            state, flag = _thermal_with_flag(h, two, t)
        else:
            state, flag = _ground_with_flag(h)
        return state, flag, None, nan
    if system == "four_mode":
        n1 = int(round(val("N1")))
        n2 = int(round(params["N2"]))
        kappa1, kappa2 = params["kappa1"], params["kappa2"]
        coupling = val("Ng_over_kappa")
        g11 = coupling * kappa1 / n1
        g12 = params["g12_over_g11"] * g11
        if params.get("matched_g22"):
            g22 = coupling * kappa2 / n2
        elif params.get("N2g22_over_kappa") is not None:
            g22 = params["N2g22_over_kappa"] * kappa2 / n2
        else:
            g22 = params["g22_over_g11"] * g11
        four = FourModeParams(kappa1, kappa2, g11, g12, g22, n1, n2)
        t = _temperature_kappa(cfg, x)
        h = build_four_mode(four)
        if t > 0:
            state, flag = _thermal_with_flag(h, four, t)
        else:
            state, flag = _ground_with_flag(h)
        return state, flag, None, nan
    if system == "bs_single":
        return bs_single_fock(int(round(val("N")))), False, None, nan
    if system == "bs_double":
        return bs_double_fock(int(round(val("N")))), False, None, nan
    if system == "bs_four":
        n1 = int(round(val("N1")))
        return bs_four_mode(n1, int(round(params["N2"]))), False, None, nan
    if system == "coherent_lo":
        n = int(round(params["N"]))
        kappa = params["kappa"]
        coupling = params["Ng_over_kappa"]
        two = TwoModeParams(kappa, coupling * kappa / n, n)
        h = build_two_mode(two)
        state, flag = _ground_with_flag(h)
        return state, flag, hz_moments(state, 1), x
    raise NumericalFailure(f"unhandled system {system}")


def _eval_criterion(
    spec: dict,
    state: State,
    m_sweep: int | None,
    lo_moments: HZMoments | None,
    alpha: float,
) -> tuple[float, int]:
    name = spec["name"]
    if name == "e_hz":
        m = m_sweep if m_sweep is not None else spec["m"]
        r = _criteria.e_hz(state, m, spec["pair"], spec["rotated"])
    elif name == "e_hz_planar":
        r = _criteria.e_hz_planar(state, spec["pair"])
    elif name == "e_hz_rotated":
        r = _criteria.e_hz_rotated(state, spec["pair"])
    elif name == "e_hz_spin":
        r = _criteria.e_hz_spin(state, spec["rotated"])
    elif name == "coherent_lo_ratio":
        assert lo_moments is not None
        r = _criteria.coherent_lo_ratio(lo_moments, alpha)
    elif name in _WITNESS_NAMES:
        fn = (
            _criteria.duan_sum_spin
            if name == "duan_sum_spin"
            else _criteria.heisenberg_product
        )
        w = fn(state)
        # witness columns store the signed margin; negative certifies
        if w.classification is _criteria.Classification.INCONCLUSIVE:
            return nan, int(w.classification)
        return w.value - w.bound, int(w.classification)
    else:
        raise NumericalFailure(f"unhandled criterion {name}")
    return r.value, int(r.classification)


def _point_worker(payload: tuple[str, float]) -> SweepRow:
    cfg_json, x = payload
    cfg = json.loads(cfg_json)
    began = time.perf_counter()
    try:
        state, degenerate, lo_moments, alpha = _build_point(cfg, x)
        m_sweep = (
            int(round(x)) if cfg["sweep"]["variable"] == "m" else None
        )
        values = []
        codes = []
        for spec in cfg["criteria"]:
            value, code = _eval_criterion(
                spec, state, m_sweep, lo_moments, alpha
            )
            values.append(float(value))
            codes.append(code)
    except (ConvergenceFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise NumericalFailure(
            f"sweep point {cfg['sweep']['variable']}={x!r}: {exc}"
        ) from exc
    return SweepRow(
        sweep_value=float(x),
        values=tuple(values),
        codes=tuple(codes),
        degenerate=bool(degenerate),
        wall_time=time.perf_counter() - began,
    )


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(
            f"{WORKERS_ENV}: expected a positive integer, got {raw!r}"
        ) from None
    if count < 1:
        raise ConfigError(f"{WORKERS_ENV}: expected a positive integer")
    return count


@dataclass(frozen=True)
class SweepTable:
    """Ordered sweep results with deterministic serializations."""

    config: SweepConfig
    rows: tuple[SweepRow, ...]

    def header(self) -> tuple[str, ...]:
        cols = self.config.columns()
        return (
            ("sweep_var",)
            + cols
            + tuple(f"{c}_class" for c in cols)
            + ("degenerate",)
        )

    def to_csv_text(self) -> str:
        lines = [",".join(self.header())]
        for row in self.rows:
            cells = [format_float(row.sweep_value)]
            cells += [format_float(v) for v in row.values]
            cells += [str(c) for c in row.codes]
            cells.append(str(int(row.degenerate)))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        def cell(v: float) -> float | None:
            return None if isnan(v) else float(format_float(v))

        body = {
            "config": self.config.canonical(),
            "header": list(self.header()),
            "rows": [
                [cell(row.sweep_value)]
                + [cell(v) for v in row.values]
                + list(row.codes)
                + [int(row.degenerate)]
                for row in self.rows
            ],
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n"

    def to_text(self, fmt: str) -> str:
        return self.to_csv_text() if fmt == "csv" else self.to_json_text()


def run_sweep(
    cfg: SweepConfig,
    progress: Callable[[int, int], None] | None = None,
) -> SweepTable:
    """Evaluate every grid point and assemble rows in grid order.

    Points are independent; with more than one worker they are evaluated in
    a process pool.  Output is identical either way.
    """
    points = [float(x) for x in cfg.grid.values()]
    payload = json.dumps(cfg.canonical(), sort_keys=True)
    jobs = [(payload, x) for x in points]
    workers = min(_worker_count(), len(jobs))
    rows: list[SweepRow] = []
    if workers <= 1:
        for i, job in enumerate(jobs):
            rows.append(_point_worker(job))
            if progress is not None:
                progress(i + 1, len(jobs))
    else:
        chunk = max(1, len(jobs) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, row in enumerate(
                pool.map(_point_worker, jobs, chunksize=chunk)
            ):
                rows.append(row)
                if progress is not None:
                    progress(i + 1, len(jobs))
    return SweepTable(config=cfg, rows=tuple(rows))


@dataclass(frozen=True)
class ComponentTable:
    """Spin-component dataset (variances and means) for ellipsoid figures."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    flags: tuple[bool, ...]

    def header(self) -> tuple[str, ...]:
        return ("sweep_var",) + self.columns + ("degenerate",)

    def to_csv_text(self) -> str:
        lines = [",".join(self.header())]
        for row, flag in zip(self.rows, self.flags):
            cells = [format_float(v) for v in row]
            cells.append(str(int(flag)))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        def cell(v: float) -> float | None:
            return None if isnan(v) else float(format_float(v))

        body = {
            "header": list(self.header()),
            "rows": [
                [cell(v) for v in row] + [int(flag)]
                for row, flag in zip(self.rows, self.flags)
            ],
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n"

    def to_text(self, fmt: str) -> str:
        return self.to_csv_text() if fmt == "csv" else self.to_json_text()


def ellipsoid_table(
    total: int, couplings: list[float], kappa: float = 1.0
) -> ComponentTable:
    """Spin variances and means of two-mode ground states at each coupling."""
    columns = ("var_x", "var_y", "var_z", "mean_x", "mean_y", "mean_z")
    rows = []
    flags = []
    for x in couplings:
        h = build_two_mode(TwoModeParams(kappa, x * kappa / total, total))
        g = ground_state(h)
        state = PureState(h.basis, g.vector.astype(np.complex128))
        var_x, var_y, var_z, means = ellipsoid(state)
        rows.append(
            (float(x), var_x, var_y, var_z, means[0], means[1], means[2])
        )
        flags.append(g.degenerate)
    return ComponentTable(columns, tuple(rows), tuple(flags))


_RB_G22 = 95.5 / 100.4
_RB_G12 = 80.8 / 100.4


def _cfg(
    system: str,
    params: dict,
    variable: str,
    start: float,
    stop: float,
    points: int,
    criteria: list,
    unit: str = "kappa_units",
    path: str = "sweep.csv",
) -> SweepConfig:
    return config_from_dict(
        {
            "system": system,
            "params": params,
            "sweep": {
                "variable": variable,
                "start": start,
                "stop": stop,
                "points": points,
            },
            "criteria": criteria,
            "temperature_unit": unit,
            "output": {"format": "csv", "path": path},
        }
    )


def _planar_criteria() -> list:
    return [
        {"name": "e_hz", "m": 1},
        {"name": "e_hz_rotated"},
        {"name": "e_hz", "m": 2},
        {"name": "e_hz", "m": 2, "rotated": True},
    ]


def _fourmode_family(
    name: str, ratios: dict, n1: int = 5, n2: int = 100, **kw
) -> tuple[str, SweepConfig]:
    params = {"N1": n1, "N2": n2, "kappa1": 1.0, "kappa2": 1.0}
    params.update(ratios)
    crit = [{"name": "e_hz_spin", "rotated": kw.get("rotated", False)}]
    lo, hi, pts = kw.get("range", (-4.0, 0.0, 41))
    return name, _cfg(
        "four_mode", params, "Ng_over_kappa", lo, hi, pts, crit,
        path=f"{name}.csv",
    )


def _preset_planar() -> dict:
    tables = {}
    tables["attractive"] = _cfg(
        "two_mode", {"N": 100}, "Ng_over_kappa", -4.0, 0.0, 401,
        _planar_criteria(), path="attractive.csv",
    )
    tables["repulsive"] = _cfg(
        "two_mode", {"N": 100}, "Ng_over_kappa", 0.0, 100.0, 401,
        _planar_criteria(), path="repulsive.csv",
    )
    tables["low-n"] = _cfg(
        "two_mode", {"N": 6}, "Ng_over_kappa", -4.0, 4.0, 161,
        _planar_criteria(), path="low-n.csv",
    )
    return tables


def _preset_ellipsoid() -> dict:
    xs = [float(x) for x in np.linspace(0.0, 100.0, 401)]
    return {
        "variances": ("ellipsoid", 100, xs),
        "optimum": ("ellipsoid", 100, [40.0]),
    }


def _preset_fourmode() -> dict:
    tables = dict(
        [
            _fourmode_family(
                "equal", {"g22_over_g11": 1.0, "g12_over_g11": 1.0}
            ),
            _fourmode_family(
                "rubidium",
                {"g22_over_g11": _RB_G22, "g12_over_g11": _RB_G12},
            ),
            _fourmode_family(
                "uncoupled", {"g22_over_g11": 1.0, "g12_over_g11": 0.0}
            ),
            _fourmode_family(
                "negative-cross",
                {"g22_over_g11": _RB_G22, "g12_over_g11": -_RB_G12},
            ),
            _fourmode_family(
                "pinned",
                {"N2g22_over_kappa": -2.03, "g12_over_g11": 0.0},
                range=(-4.0, 0.0, 81),
            ),
            _fourmode_family(
                "matched-5-100", {"matched_g22": True, "g12_over_g11": 0.0}
            ),
            _fourmode_family(
                "matched-20-100",
                {"matched_g22": True, "g12_over_g11": 0.0},
                n1=20,
            ),
        ]
    )
    for n1 in (20, 50, 100):
        name, cfg = _fourmode_family(
            f"rubidium-n1-{n1}",
            {"g22_over_g11": _RB_G22, "g12_over_g11": _RB_G12},
            n1=n1,
            range=(-4.0, 0.0, 21),
        )
        tables[name] = cfg
    for fam, ratios in (
        ("equal", {"g22_over_g11": 1.0, "g12_over_g11": 1.0}),
        ("rubidium", {"g22_over_g11": _RB_G22, "g12_over_g11": _RB_G12}),
        ("uncoupled", {"g22_over_g11": 1.0, "g12_over_g11": 0.0}),
        (
            "negative-cross",
            {"g22_over_g11": _RB_G22, "g12_over_g11": -_RB_G12},
        ),
    ):
        name, cfg = _fourmode_family(
            f"rotated-{fam}", ratios, rotated=True, range=(-4.0, 4.0, 81)
        )
        tables[name] = cfg
    return tables


def _preset_thermal() -> dict:
    return {
        "two-mode": _cfg(
            "two_mode",
            {"N": 100, "Ng_over_kappa": -2.23},
            "T", 0.0, 100.0, 21,
            [{"name": "e_hz", "m": 1}],
            unit="nanokelvin",
            path="two-mode.csv",
        ),
        "four-mode-rubidium": _cfg(
            "four_mode",
            {
                "N1": 5,
                "N2": 100,
                "Ng_over_kappa": -2.23,
                "g22_over_g11": _RB_G22,
                "g12_over_g11": _RB_G12,
            },
            "T", 0.0, 100.0, 21,
            [{"name": "e_hz_spin"}],
            unit="nanokelvin",
            path="four-mode-rubidium.csv",
        ),
    }


def _preset_lo() -> dict:
    return {
        "alpha-sweep": _cfg(
            "coherent_lo",
            {"N": 100, "Ng_over_kappa": -2.03},
            "alpha", 0.0, 100.0, 201,
            [{"name": "coherent_lo_ratio"}, {"name": "e_hz", "m": 1}],
            path="alpha-sweep.csv",
        ),
    }


def _preset_singlefock() -> dict:
    return {
        "orders": _cfg(
            "bs_single", {}, "N", 1.0, 20.0, 20,
            [{"name": "e_hz", "m": m} for m in range(1, 21)],
            path="orders.csv",
        ),
    }


def _preset_doublefock() -> dict:
    return {
        "orders": _cfg(
            "bs_double", {}, "N", 1.0, 20.0, 20,
            [
                {"name": "e_hz", "m": 1},
                {"name": "e_hz", "m": 2},
                {"name": "e_hz", "m": 4},
            ],
            path="orders.csv",
        ),
    }


_PRESETS = {
    "fig-planar": _preset_planar,
    "fig-ellipsoid": _preset_ellipsoid,
    "fig-fourmode": _preset_fourmode,
    "fig-thermal": _preset_thermal,
    "fig-lo": _preset_lo,
    "fig-singlefock": _preset_singlefock,
    "fig-doublefock": _preset_doublefock,
}


def preset_ids() -> tuple[str, ...]:
    return tuple(sorted(_PRESETS))


def figure_preset(
    preset_id: str,
    progress: Callable[[str, int, int], None] | None = None,
) -> dict[str, SweepTable | ComponentTable]:
    """Run every table behind a named figure preset.

    Raises UnknownPreset for an id outside ``preset_ids()``.
    """
    if preset_id not in _PRESETS:
        raise UnknownPreset(
            f"unknown preset {preset_id!r}; known: {', '.join(preset_ids())}"
        )
    spec = _PRESETS[preset_id]()
    out: dict[str, SweepTable | ComponentTable] = {}
    for name, entry in spec.items():
        if isinstance(entry, SweepConfig):
            hook = None
            if progress is not None:
                hook = lambda i, n, _name=name: progress(_name, i, n)
            out[name] = run_sweep(entry, hook)
        else:
            kind, total, xs = entry
            assert kind == "ellipsoid"
            out[name] = ellipsoid_table(total, xs)
            if progress is not None:
                progress(name, len(xs), len(xs))
    return out
