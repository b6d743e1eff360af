"""Scenario configuration, the preset catalogue, orchestration and the command-line entry point.

A scenario is a flat JSON object whose length/time keys are in units of the
mirror spacing ``b`` (with ``c = 1``)::

    {"task": "experiment", "model": "double_delta", "omega_b": 100,
     "k0_b_over_pi": 1.4, "dx_over_b": 2.85, "truncation": "none",
     "pipelines": ["direct", "convolution", "modes"]}

Exit codes: 0 success, 2 configuration error, 3 numerical invariant failed.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    INDISTINGUISHABLE,
    causal_boundary_check,
    classify_regime,
    estimate_delay,
    find_lobes,
    information_arrival,
)
from .barriers import (
    BarrierModel,
    ComplexBox,
    DoubleDelta,
    SingleDelta,
    find_poles,
    load_tabulated,
    path_modes,
    transmission_series,
)
from .delay_spectrum import (
    causality_check,
    delay_amplitude_analytic,
    delay_amplitude_modes,
    write_json,
    write_table,
)
from .numerics import Grid1D
from .propagation import (
    DispersionRelation,
    PulseAssumptionError,
    PulseSpec,
    build_pulse,
    default_x_grid,
    envelope_of,
    free_propagate,
    pulse_spectrum,
    transmit_convolution,
    transmit_direct,
    transmit_discrete_modes,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

PIPELINES = ("direct", "convolution", "modes")
TASKS = ("experiment", "eta", "transmission", "poles", "causality", "regime_scan")
MODELS = ("double_delta", "single_delta", "tabulated")

DEFAULTS = {
    "task": "experiment",
    "model": "double_delta",
    "omega_b": 100.0,
    "table": None,
    "k0_b": None,
    "k0_b_over_pi": 1.4,
    "dx_over_b": 2.85,
    "ct_over_b": 25.0,
    "xi_over_b": None,
    "truncation": "none",
    "dispersion": "linear",
    "mass": None,
    "n_x": 16384,
    "tau_min": -10.0,
    "tau_max": 30.0,
    "n_tau": 16384,
    "eta_route": "kaiser",
    "pipelines": ["direct", "convolution", "modes"],
    "m_max": 12,
    "tol": 1e-6,
    "arrival_threshold": 1e-3,
    "k_min": 1e-3,
    "k_max": 30.0,
    "n_k": 3000,
    "im_min": -5.0,
    "scan_dx_over_b": None,
    "description": "",
}


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class NumericalInvariantError(RuntimeError):
    """A scenario finished but one of its numerical checks failed."""

    def __init__(self, failures: list[dict], manifest: "RunManifest"):
        names = ", ".join(f["check"] for f in failures)
        super().__init__(f"numerical invariant(s) failed: {names}")
        self.failures = failures
        self.manifest = manifest


# --------------------------------------------------------------------------
# presets

_PRESETS: list[tuple[str, str, dict]] = [
    ("fig1a", "delay amplitude eta(tau), real and imaginary parts, Omega b = 100",
     {"task": "eta", "k0_b_over_pi": 1.4, "dx_over_b": 2.85}),
    ("fig1b", "weak-measurement Gaussian pulse: transmitted field, path-mode components, advance of about b/c",
     {"k0_b_over_pi": 1.4, "dx_over_b": 2.85, "truncation": "none"}),
    ("fig1c", "front-truncated causality test: nothing beyond the causal boundary",
     {"k0_b_over_pi": 1.4, "dx_over_b": 2.85, "truncation": "front",
      "pipelines": ["convolution", "modes"]}),
    ("fig1d", "rear-truncated information-arrival test against the full Gaussian",
     {"k0_b_over_pi": 1.4, "dx_over_b": 2.85, "truncation": "rear",
      "pipelines": ["convolution", "modes"]}),
    ("fig1e", "strong-measurement narrow pulse: resolved subluminal lobes at tau_m = 2mb/c",
     {"k0_b_over_pi": 7.0, "dx_over_b": 0.57, "truncation": "none"}),
    ("causality", "eta support checks: repulsive double delta versus attractive single delta",
     {"task": "causality", "k0_b_over_pi": 1.4, "dx_over_b": 2.85}),
    ("poles", "scattering poles of the double delta in Re k in (0, 30/b] with residues",
     {"task": "poles", "k_min": 1e-3, "k_max": 30.0, "im_min": -5.0}),
    ("regime_scan", "delay readings and weak/strong classification across pulse widths",
     {"task": "regime_scan", "k0_b_over_pi": 7.0, "pipelines": ["convolution"],
      "scan_dx_over_b": [0.25, 0.5, 0.57, 0.75, 1.0, 1.5, 2.0, 2.85, 4.0]}),
]


def list_presets() -> list[tuple[str, str]]:
    """``(name, description)`` pairs in a fixed order."""
    return [(name, desc) for name, desc, _ in _PRESETS]


def preset_config(name: str) -> dict:
    for preset, desc, overrides in _PRESETS:
        if preset == name:
            cfg = copy.deepcopy(DEFAULTS)
            cfg.update(copy.deepcopy(overrides))
            cfg["preset"] = name
            cfg["description"] = desc
            return cfg
    raise ConfigError("preset", f"unknown preset {name!r}; choose from {[p for p, _, _ in _PRESETS]}")


# --------------------------------------------------------------------------
# configuration


@dataclass
class ScenarioConfig:
    """Validated scenario: physical objects plus the raw dimensionless echo."""

    task: str
    model: BarrierModel
    pulse: PulseSpec | None
    dispersion: DispersionRelation
    t_obs: float
    x_grid: Grid1D | None
    tau_grid: Grid1D
    pipelines: tuple[str, ...]
    out: Path
    raw: dict = field(default_factory=dict)

    @property
    def k0(self) -> float:
        return self.raw["k0"]


def _number(cfg: dict, key: str, positive: bool = False, allow_none: bool = False) -> float | None:
    value = cfg.get(key)
    if value is None and allow_none:
        return None
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    if positive and not value > 0:
        raise ConfigError(key, f"must be positive, got {value}")
    return value


def _integer(cfg: dict, key: str, minimum: int) -> int:
    value = cfg.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return int(value)


def _build_model(cfg: dict) -> BarrierModel:
    kind = cfg.get("model")
    if kind not in MODELS:
        raise ConfigError("model", f"must be one of {MODELS}, got {kind!r}")
    if kind == "tabulated":
        if not cfg.get("table"):
            raise ConfigError("table", "a tabulated model needs a table path")
        try:
            return load_tabulated(cfg["table"])
        except (OSError, ValueError) as exc:
            raise ConfigError("table", str(exc)) from None
    omega = _number(cfg, "omega_b")
    return DoubleDelta(omega, 1.0) if kind == "double_delta" else SingleDelta(omega)


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def resolve_config(raw: dict, out: str | Path | None = None) -> ScenarioConfig:
    """Merge ``raw`` over the defaults and validate it."""
    unknown = sorted(set(raw) - set(DEFAULTS) - {"preset", "out"})
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")
    cfg = copy.deepcopy(DEFAULTS)
    cfg.update(copy.deepcopy(raw))

    task = cfg["task"]
    if task not in TASKS:
        raise ConfigError("task", f"must be one of {TASKS}, got {task!r}")
    model = _build_model(cfg)

    if cfg.get("k0_b") is not None:
        k0 = _number(cfg, "k0_b", positive=True)
        cfg["k0_b_over_pi"] = None
    else:
        k0 = _number(cfg, "k0_b_over_pi", positive=True) * math.pi
    cfg["k0"] = k0
    dx = _number(cfg, "dx_over_b", positive=True)
    ct = _number(cfg, "ct_over_b", positive=True)
    x_I = _number(cfg, "xi_over_b", allow_none=True)
    if x_I is None:
        x_I = -6.0 * dx
    cfg["x_I"] = x_I
    if not x_I < 0:
        raise ConfigError("xi_over_b", f"the pulse must start left of the barrier, got {x_I}")

    if cfg["dispersion"] == "linear":
        disp = DispersionRelation.linear()
    elif cfg["dispersion"] == "quadratic":
        disp = DispersionRelation.quadratic(_number(cfg, "mass", positive=True))
    else:
        raise ConfigError("dispersion", f"must be 'linear' or 'quadratic', got {cfg['dispersion']!r}")

    pipelines = cfg["pipelines"]
    if isinstance(pipelines, str):
        pipelines = [p.strip() for p in pipelines.split(",") if p.strip()]
    if not isinstance(pipelines, list) or not pipelines:
        raise ConfigError("pipelines", "select at least one of direct, convolution, modes")
    bad = [p for p in pipelines if p not in PIPELINES]
    if bad:
        raise ConfigError("pipelines", f"unknown pipeline {bad[0]!r}")
    pipelines = tuple(p for p in PIPELINES if p in pipelines)
    cfg["pipelines"] = list(pipelines)
    if disp.kind != "linear" and set(pipelines) & {"convolution", "modes"}:
        raise ConfigError("pipelines", "convolution and modes pipelines need linear dispersion")

    if cfg["truncation"] not in ("none", "front", "rear"):
        raise ConfigError("truncation", f"must be none, front or rear, got {cfg['truncation']!r}")
    n_x = _integer(cfg, "n_x", 64)
    if n_x & (n_x - 1):
        raise ConfigError("n_x", f"must be a power of two, got {n_x}")
    n_tau = _integer(cfg, "n_tau", 64)
    if n_tau & (n_tau - 1):
        raise ConfigError("n_tau", f"must be a power of two, got {n_tau}")
    tau_min, tau_max = _number(cfg, "tau_min"), _number(cfg, "tau_max")
    if not tau_max > tau_min:
        raise ConfigError("tau_max", "must exceed tau_min")
    _integer(cfg, "m_max", 0)
    _number(cfg, "tol", positive=True)
    _number(cfg, "arrival_threshold", positive=True)
    if cfg["eta_route"] not in ("kaiser", "none", "analytic"):
        raise ConfigError("eta_route", f"must be kaiser, none or analytic, got {cfg['eta_route']!r}")
    if task == "regime_scan":
        scan = cfg.get("scan_dx_over_b")
        if not isinstance(scan, list) or not scan:
            raise ConfigError("scan_dx_over_b", "regime_scan needs a non-empty list of pulse widths")
        for value in scan:
            _number({"v": value}, "v", positive=True)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pulse = PulseSpec(k0, dx, x_I, cfg["truncation"])
    except ValueError as exc:
        raise ConfigError("pulse", str(exc)) from None
    x_grid = None
    if task == "experiment":
        x_grid = default_x_grid(pulse, disp.group_speed(k0), ct, n_x)
    tau_grid = Grid1D(tau_min, tau_max, n_tau)
    out_dir = Path(out if out is not None else cfg.get("out") or "out")
    cfg["out"] = str(out_dir)
    return ScenarioConfig(task, model, pulse, disp, ct, x_grid, tau_grid, pipelines, out_dir, cfg)


# --------------------------------------------------------------------------
# orchestration


@dataclass
class RunManifest:
    config: dict
    version: str
    files: dict
    diagnostics: dict
    reports: dict

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "files": self.files,
            "diagnostics": self.diagnostics,
            "reports": self.reports,
        }


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _echo(cfg: dict) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k != "out"}


class _Run:
    """Collects emitted files, diagnostics and failed checks for one scenario."""

    def __init__(self, sc: ScenarioConfig):
        self.sc = sc
        self.files: dict[str, str] = {}
        self.diagnostics: dict = {}
        self.reports: dict = {}
        self.failures: list[dict] = []
        sc.out.mkdir(parents=True, exist_ok=True)

    def emit(self, path: Path) -> None:
        self.files[path.name] = _sha256(path)

    def table(self, name: str, header, columns) -> None:
        self.emit(write_table(self.sc.out / name, header, columns))

    def check(self, name: str, ok: bool, **detail) -> None:
        self.reports.setdefault("checks", {})[name] = {"passed": bool(ok), **detail}
        if not ok:
            self.failures.append({"check": name, **detail})

    def finish(self) -> RunManifest:
        manifest = RunManifest(_echo(self.sc.raw), __version__, dict(sorted(self.files.items())),
                               self.diagnostics, self.reports)
        write_json(self.sc.out / "manifest.json", manifest.as_dict())
        if self.failures:
            raise NumericalInvariantError(self.failures, manifest)
        return manifest


def _series_tail(model: BarrierModel, k0: float, m_max: int) -> float:
    if isinstance(model, DoubleDelta):
        return abs(complex(model.reflection(k0))) ** (2 * (m_max + 1))
    return 0.0


def _eta_for(sc: ScenarioConfig, model: BarrierModel, tau_grid: Grid1D, route: str | None = None):
    route = route or sc.raw["eta_route"]
    k0, v0 = sc.k0, sc.dispersion.group_speed(sc.k0)
    if route == "analytic":
        return delay_amplitude_analytic(model, k0, v0, tau_grid, m_max=sc.raw["m_max"])
    m_max = sc.raw["m_max"] if isinstance(model, DoubleDelta) else 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return delay_amplitude_modes(model, k0, v0, m_max, tau_grid, dx=sc.pulse.dx, window=route)


def _write_eta(run: _Run, spec, name: str) -> None:
    run.emit(spec.write_csv(run.sc.out / name))


def _task_eta(run: _Run) -> None:
    sc = run.sc
    spec = _eta_for(sc, sc.model, sc.tau_grid)
    _write_eta(run, spec, "eta.csv")
    meta = spec.metadata()
    meta.pop("breakpoints", None)
    run.reports["eta"] = meta
    report = causality_check(spec)
    run.diagnostics["causality"] = report.as_dict()
    run.diagnostics["series_tail_bound"] = _series_tail(sc.model, sc.k0, sc.raw["m_max"])
    if isinstance(sc.model, DoubleDelta) and sc.model.omega >= 0:
        run.check("eta_causal", report.verdict == "causal", negative_mass=report.negative_mass)


def _task_causality(run: _Run) -> None:
    sc = run.sc
    cases = [("double_delta", DoubleDelta(abs(getattr(sc.model, "omega", 0.0)) or 100.0)), ("single_delta_attractive", SingleDelta(-4.0))]
    results = {}
    for label, model in cases:
        spec = delay_amplitude_analytic(model, sc.k0, sc.dispersion.group_speed(sc.k0), sc.tau_grid)
        report = causality_check(spec)
        _write_eta(run, spec, f"eta_{label}.csv")
        results[label] = {"model": model.describe(), **report.as_dict()}
    run.diagnostics["causality"] = results
    run.check("repulsive_causal", results["double_delta"]["negative_mass"] <= 1e-3,
              negative_mass=results["double_delta"]["negative_mass"])
    run.check("attractive_feeds_negative_delays", results["single_delta_attractive"]["negative_mass"] > 0.1,
              negative_mass=results["single_delta_attractive"]["negative_mass"])


def _task_transmission(run: _Run) -> None:
    sc = run.sc
    k = np.linspace(_number(sc.raw, "k_min"), _number(sc.raw, "k_max"), _integer(sc.raw, "n_k", 2))
    t = np.asarray(sc.model.transmission(k), dtype=complex)
    header = ["k", "re_t", "im_t", "abs_t"]
    columns = [k, t.real, t.imag, np.abs(t)]
    if isinstance(sc.model, DoubleDelta):
        total, _ = transmission_series(sc.model, k.astype(complex), sc.raw["m_max"])
        header += ["re_series", "im_series"]
        columns += [total.real, total.imag]
        run.diagnostics["series_tail_bound"] = _series_tail(sc.model, sc.k0, sc.raw["m_max"])
    run.table("transmission.csv", header, columns)


def _task_poles(run: _Run) -> None:
    sc = run.sc
    box = ComplexBox(_number(sc.raw, "k_min"), _number(sc.raw, "k_max"), _number(sc.raw, "im_min"), 0.0)
    poles = find_poles(sc.model, box)
    ks = np.array([p.k_n for p in poles], dtype=complex)
    res = np.array([p.residue for p in poles], dtype=complex)
    kinds = np.array([0.0 if p.kind == "bound" else 1.0 for p in poles])
    run.table("poles.csv", ["re_k", "im_k", "re_residue", "im_residue", "resonance"],
              [ks.real, ks.imag, res.real, res.imag, kinds])
    run.diagnostics["poles"] = {
        "box": [box.re_min, box.re_max, box.im_min, box.im_max],
        "found": len(poles),
        "argument_count": poles.argument_count,
        "failures": len(poles.failures),
        "kinds": sorted({p.kind for p in poles}),
    }
    run.check("pole_count_matches_argument_principle", len(poles) == poles.argument_count,
              found=len(poles), counted=poles.argument_count)
    if getattr(sc.model, "omega", 0) > 0:
        run.check("resonances_below_axis", all(p.k_n.imag < 0 for p in poles))


def _fields_for(sc: ScenarioConfig, pulse: PulseSpec, model: BarrierModel, pipelines, x_grid: Grid1D | None = None):
    """Free field and the transmitted field of each pipeline for one pulse."""
    disp, t_obs, k0 = sc.dispersion, sc.t_obs, pulse.k0
    v0 = disp.group_speed(k0)
    grid = x_grid or default_x_grid(pulse, v0, t_obs, sc.raw["n_x"])
    psi0 = build_pulse(pulse, grid)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            C = pulse_spectrum(psi0, k0)
        except PulseAssumptionError as exc:
            raise ConfigError("k0_b", str(exc)) from None
    notes = [str(w.message) for w in caught]
    free = free_propagate(C, disp, t_obs)
    out = {}
    G = envelope_of(free, k0, disp, t_obs) if disp.kind == "linear" else None
    if "direct" in pipelines:
        out["direct"] = transmit_direct(C, model, disp, t_obs)
    if "convolution" in pipelines:
        eta = delay_amplitude_analytic(model, k0, v0, G.tau_grid)
        out["convolution"] = transmit_convolution(G, eta, k0, disp, t_obs)
    if "modes" in pipelines:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out["modes"] = transmit_discrete_modes(G, path_modes(model, sc.raw["m_max"], v0), k0, t_obs, model)
    return C, free, out, notes


def _task_experiment(run: _Run) -> None:
    sc = run.sc
    pulse, model = sc.pulse, sc.model
    v0 = sc.dispersion.group_speed(sc.k0)
    C, free, fields, notes = _fields_for(sc, pulse, model, sc.pipelines, sc.x_grid)
    run.diagnostics["negative_k_fraction"] = C.meta["negative_k_fraction"]
    run.diagnostics["series_tail_bound"] = _series_tail(model, sc.k0, sc.raw["m_max"])
    run.diagnostics["regime"] = classify_regime(pulse.dx, 1.0)
    if notes:
        run.diagnostics["warnings"] = notes
    run.emit(free.write_csv(sc.out / "field_free.csv"))
    for name, psi in fields.items():
        run.emit(psi.write_csv(sc.out / f"field_{name}.csv"))
    if "modes" in fields:
        comps = fields["modes"].meta["components"]
        header, columns = ["x", "tau"], [free.x, free.tau()]
        for m in sorted(comps):
            header += [f"re_psi_m{m}", f"im_psi_m{m}"]
            columns += [comps[m].real, comps[m].imag]
        run.table("field_mode_components.csv", header, columns)

    if sc.raw["eta_route"] != "analytic" and isinstance(model, (DoubleDelta, SingleDelta)):
        _write_eta(run, _eta_for(sc, model, sc.tau_grid), "eta.csv")

    estimates = {}
    for name, psi in fields.items():
        estimates[name] = {
            method: estimate_delay(psi, free, v0, method).as_dict() for method in ("peak", "centroid")
        }
        estimates[name]["lobes_tau"] = [lobe.tau for lobe in find_lobes(psi)]
    run.reports["delay"] = estimates

    if "direct" in fields and "convolution" in fields:
        d, c = fields["direct"].values, fields["convolution"].values
        gap = float(np.max(np.abs(d - c)) / np.max(np.abs(d)))
        bound = 1e-8 if pulse.truncation == "none" else 1e-6
        run.diagnostics["direct_vs_convolution"] = gap
        run.check("pipeline_equivalence", gap <= bound, gap=gap, bound=bound)

    exact = [n for n in ("direct", "convolution") if n in fields]
    if pulse.truncation != "none" and exact and sc.dispersion.kind == "linear":
        main = fields[exact[-1]]
        boundary = causal_boundary_check(main, pulse.x_I, sc.dispersion.c, sc.t_obs, sc.raw["tol"])
        run.reports["boundary"] = boundary.as_dict()
        if pulse.truncation == "front":
            run.check("causal_boundary", boundary.verdict == "respected", max_beyond=boundary.max_beyond)
        else:
            full_pulse = PulseSpec(pulse.k0, pulse.dx, pulse.x_I, "none")
            _, _, full_fields, _ = _fields_for(sc, full_pulse, model, (exact[-1],), main.grid)
            full = full_fields[exact[-1]]
            run.emit(full.write_csv(sc.out / "field_full_reference.csv"))
            arrival = information_arrival(full, main, sc.raw["arrival_threshold"])
            beyond = main.x > boundary.x_B + 1e-12
            gap = float(np.max(np.abs(full.values - main.values)[beyond]) / np.max(np.abs(full.values)))
            limit = boundary.x_B + 2 * main.grid.spacing
            run.reports["information"] = {
                "arrival": None if arrival is INDISTINGUISHABLE else arrival,
                "indistinguishable": arrival is INDISTINGUISHABLE,
                "x_B": boundary.x_B,
                "max_gap_beyond_x_B": gap,
            }
            run.check("rear_cut_indistinguishable", gap <= sc.raw["tol"], gap=gap)
            if arrival is not INDISTINGUISHABLE:
                run.check("information_arrival_bound", arrival <= limit, arrival=arrival, limit=limit)


def _task_regime_scan(run: _Run) -> None:
    sc = run.sc
    widths = [float(v) for v in sc.raw["scan_dx_over_b"]]
    pipeline = sc.pipelines[0]
    v0 = sc.dispersion.group_speed(sc.k0)
    rows = []
    for dx in widths:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pulse = PulseSpec(sc.k0, dx, -6.0 * dx, "none")
        _, free, fields, _ = _fields_for(sc, pulse, sc.model, (pipeline,))
        psi = fields[pipeline]
        peak = estimate_delay(psi, free, v0, "peak")
        cen = estimate_delay(psi, free, v0, "centroid")
        rows.append((dx, 1.0 if peak.regime == "weak" else 0.0, peak.tau_est, cen.tau_est,
                     float(peak.multimodal), peak.resolution))
    data = np.array(rows)
    run.table("regime_scan.csv", ["dx_over_b", "weak", "tau_peak", "tau_centroid", "multimodal", "resolution"],
              list(data.T))
    run.reports["regime_scan"] = [
        {"dx_over_b": r[0], "regime": "weak" if r[1] else "strong", "tau_peak": r[2], "tau_centroid": r[3]}
        for r in rows
    ]


_TASKS = {
    "experiment": _task_experiment,
    "eta": _task_eta,
    "transmission": _task_transmission,
    "poles": _task_poles,
    "causality": _task_causality,
    "regime_scan": _task_regime_scan,
}


def run_scenario(config: ScenarioConfig | dict, out: str | Path | None = None) -> RunManifest:
    """Run one scenario and write its CSVs and ``manifest.json`` into the output directory.

    Raises :class:`ConfigError` for bad input and
    :class:`NumericalInvariantError` (after writing the manifest) when a
    check fails.
    """
    sc = config if isinstance(config, ScenarioConfig) else resolve_config(config, out)
    run = _Run(sc)
    _TASKS[sc.task](run)
    return run.finish()


# --------------------------------------------------------------------------
# command line

_SUBCOMMANDS = {
    "eta": "eta",
    "transmission": "transmission",
    "poles": "poles",
    "propagate": "experiment",
    "experiment": "experiment",
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file")
    common.add_argument("--preset", help="start from a named preset")
    common.add_argument("--out", help="output directory (default: ./out)")
    common.add_argument("--pipelines", help="comma-separated subset of direct,convolution,modes")
    common.add_argument("--tol", type=float, help="causal-boundary tolerance relative to the field peak")
    common.add_argument("--omega-b", dest="omega_b", type=float)
    common.add_argument("--k0-b", dest="k0_b", type=float)
    common.add_argument("--k0-b-over-pi", dest="k0_b_over_pi", type=float)
    common.add_argument("--dx-over-b", dest="dx_over_b", type=float)
    common.add_argument("--ct-over-b", dest="ct_over_b", type=float)
    common.add_argument("--xi-over-b", dest="xi_over_b", type=float)
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--table", help="CSV table k,re_t,im_t for the tabulated model")
    common.add_argument("--truncation", choices=("none", "front", "rear"))
    common.add_argument("--m-max", dest="m_max", type=int)
    common.add_argument("--eta-route", dest="eta_route", choices=("kaiser", "none", "analytic"))

    parser = argparse.ArgumentParser(prog="tunneldelay", description="Delay-amplitude and pulse-transmission experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eta", parents=[common], help="delay amplitude eta(tau) and its path modes")
    sub.add_parser("transmission", parents=[common], help="t(k) and its partial path-mode sum on a k grid")
    sub.add_parser("poles", parents=[common], help="scattering poles and residues in a box")
    sub.add_parser("propagate", parents=[common], help="transmitted fields for the selected pipelines")
    sub.add_parser("experiment", parents=[common], help="fields plus delay, boundary and arrival analysis")
    preset = sub.add_parser("preset", parents=[common], help="run a named preset")
    preset.add_argument("name")
    sub.add_parser("list-presets", help="print the preset catalogue")
    return parser


_OVERRIDES = ("omega_b", "k0_b", "k0_b_over_pi", "dx_over_b", "ct_over_b", "xi_over_b", "model", "table",
              "truncation", "m_max", "eta_route", "pipelines", "tol")


def _config_from_args(args) -> dict:
    name = getattr(args, "name", None) or args.preset
    raw = {k: v for k, v in preset_config(name).items() if k not in ("description",)} if name else {}
    if args.config:
        raw.update(load_config(args.config))
    if args.command in _SUBCOMMANDS:
        raw["task"] = _SUBCOMMANDS[args.command]
    for key in _OVERRIDES:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    if args.k0_b is not None:
        raw["k0_b_over_pi"] = None
    if args.k0_b_over_pi is not None:
        raw["k0_b"] = None
    return raw


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.command == "list-presets":
        for name, desc in list_presets():
            print(f"{name}\t{desc}")
        return EXIT_OK
    try:
        raw = _config_from_args(args)
        manifest = run_scenario(raw, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalInvariantError as exc:
        print(f"numerical invariant failed: {exc}", file=sys.stderr)
        for failure in exc.failures:
            print(f"  {json.dumps(failure, sort_keys=True, default=str)}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote {len(manifest.files)} files and manifest.json to {args.out or raw.get('out') or 'out'}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
