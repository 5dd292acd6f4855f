"""Experiment configuration, named presets and run orchestration.

Every experiment is described by an :class:`ExperimentConfig`, a flat
JSON-compatible record. Presets reproduce the standard stability studies:
Burgers spectra and fluctuation growth around a smooth positive baseflow,
and the 2D Euler density wave with several volume/surface flux pairs.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dg_burgers as dgb
from . import dg_euler2d as dge
from . import flux_burgers as fb
from .flux_euler import InadmissibleStateError
from .sbp import Mesh1D, build_lgl_operators, project_to_degree
from .spectral import SpectrumReport, eigenspectrum, extract_worst_mode, fd_jacobian
from .timeint import INTEGRATORS, TimeStepController, burgers_wave_speed, integrate

logger = logging.getLogger(__name__)

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_CRASH",
    "ConfigError",
    "ExperimentConfig",
    "PRESETS",
    "load_config",
    "GrowthTrace",
    "BurgersRun",
    "EulerRun",
    "burgers_problem",
    "burgers_baseflow",
    "run_spectrum",
    "run_burgers_growth",
    "run_euler_wave",
    "run_sweep",
    "expand_sweep",
    "check_mrfvk",
    "fit_growth_rate",
    "saturation_time",
    "write_spectrum",
    "write_run",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CRASH = 3

EQUATIONS = ("burgers", "euler2d")
# "growth" is the Burgers fluctuation run; it is an alias of "simulate"
MODES = ("simulate", "growth", "spectrum")
PERTURBATIONS = ("worst-mode", "cosine", "none")
JACOBIANS = ("central", "complex-step")
PROJECTIONS = ("gauss", "lgl", "endpoints")


class ConfigError(ValueError):
    """Invalid or unresolvable experiment configuration."""


@dataclass
class ExperimentConfig:
    """Flat description of one run.

    Burgers runs use ``alpha``, ``surface_flux`` (plus ``surface_alpha`` for
    the alpha-split surface flux) and ``volume_mod``; Euler runs use
    ``volume_flux`` and ``surface_flux``. The Burgers baseflow is
    ``sin(baseflow_frequency * pi * x - baseflow_shift) + baseflow_offset``,
    projected element-wise to degree ``project_degree`` (``None`` keeps the
    nodal samples). The Euler initial state is the density wave
    ``1 + amplitude sin(2 pi (x + y))`` moving with ``velocity``.
    """

    name: str = "custom"
    equation: str = "burgers"
    mode: str = "simulate"
    elements: list = field(default_factory=lambda: [10])
    degree: int = 3
    alpha: float = 1.0
    surface_flux: str = "central"
    surface_alpha: float | None = None
    volume_flux: str | None = None
    volume_mod: str | None = None
    baseflow_frequency: float = 1.0
    baseflow_shift: float = 0.7
    baseflow_offset: float = 2.0
    project_degree: int | None = 1
    projection: str = "gauss"
    amplitude: float = 0.98
    velocity: list = field(default_factory=lambda: [0.1, 0.2])
    pressure: float = 20.0
    perturbation: str = "worst-mode"
    perturbation_peak: float = 1e-3
    integrator: str = "ssprk3"
    cfl: float = 0.05
    t_end: float = 5.0
    trace_interval: float = 0.0
    jacobian: str = "central"
    fd_eps: float = 1e-8
    fd_fallback_eps: float | None = 1e-9
    l2_oversample: int | None = None
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def fail(msg):
            raise ConfigError(f"{self.name}: {msg}")

        if self.equation not in EQUATIONS:
            fail(f"equation must be one of {EQUATIONS}")
        if self.mode not in MODES:
            fail(f"mode must be one of {MODES}")
        self.elements = [int(k) for k in np.atleast_1d(self.elements)]
        want = 1 if self.equation == "burgers" else 2
        if len(self.elements) != want or min(self.elements) < 1:
            fail(f"elements must hold {want} positive count(s)")
        if int(self.degree) < 1:
            fail("degree must be at least 1")
        if not self.t_end > 0:
            fail("t_end must be positive")
        if not self.cfl > 0:
            fail("cfl must be positive")
        if self.integrator not in INTEGRATORS:
            fail(f"integrator must be one of {sorted(INTEGRATORS)}")
        if self.jacobian not in JACOBIANS:
            fail(f"jacobian must be one of {JACOBIANS}")
        if not self.fd_eps > 0:
            fail("fd_eps must be positive")
        if self.trace_interval < 0:
            fail("trace_interval must be nonnegative")
        if self.equation == "burgers":
            try:
                dgb.BurgersSchemeConfig(
                    alpha=self.alpha,
                    surface_flux=self.surface_flux,
                    surface_alpha=self.surface_alpha,
                    volume_mod=self.volume_mod,
                )
            except ValueError as exc:
                fail(str(exc))
            if self.surface_flux == fb.BurgersFlux.ALPHA_SPLIT.value and self.surface_alpha is not None:
                if not 0.0 <= self.surface_alpha <= 1.0:
                    fail("surface_alpha outside [0, 1]")
            if self.perturbation not in PERTURBATIONS:
                fail(f"perturbation must be one of {PERTURBATIONS}")
            if self.projection not in PROJECTIONS:
                fail(f"projection must be one of {PROJECTIONS}")
            if self.project_degree is not None and not 0 <= self.project_degree <= self.degree:
                fail("project_degree must lie in [0, degree]")
        else:
            try:
                dge.EulerSchemeConfig(self.volume_flux or "", self.surface_flux)
            except ValueError as exc:
                fail(str(exc))
            if not 0.0 <= self.amplitude < 1.0:
                fail("amplitude must lie in [0, 1)")
            if len(self.velocity) != 2:
                fail("velocity needs two components")
            if not self.pressure > 0:
                fail("pressure must be positive")
            if self.l2_oversample is not None and self.l2_oversample < 1:
                fail("l2_oversample must be positive")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(changes)
        return ExperimentConfig.from_dict(data)


def _burgers_preset(name, alpha, surface, **extra) -> ExperimentConfig:
    return ExperimentConfig(name=name, equation="burgers", alpha=alpha, surface_flux=surface, **extra)


def _euler_preset(name, volume, surface, **extra) -> ExperimentConfig:
    return ExperimentConfig(
        name=name,
        equation="euler2d",
        elements=[4, 4],
        degree=5,
        volume_flux=volume,
        surface_flux=surface,
        perturbation="none",
        project_degree=None,
        integrator="lsrk54",
        trace_interval=0.01,
        l2_oversample=8,
        **extra,
    )


_TWO_THIRDS = 2.0 / 3.0

PRESETS: dict[str, ExperimentConfig] = {
    p.name: p
    for p in [
        _burgers_preset("burgers-fig2-left", 1.0, "central"),
        _burgers_preset("burgers-fig2-right", _TWO_THIRDS, "ec"),
        _burgers_preset("burgers-fig4-left", 1.0, "ec"),
        _burgers_preset("burgers-fig4-right", _TWO_THIRDS, "central"),
        _burgers_preset("burgers-fig5-left", 1.0, "tadmor"),
        _burgers_preset("burgers-fig5-right", _TWO_THIRDS, "tadmor"),
        _burgers_preset("burgers-fig6", _TWO_THIRDS, "tadmor", volume_mod="carpenter"),
        _burgers_preset("burgers-fig7-20", _TWO_THIRDS, "ec", elements=[20]),
        _burgers_preset("burgers-fig7-40", _TWO_THIRDS, "ec", elements=[40]),
        _burgers_preset("burgers-fig8-rusanov", _TWO_THIRDS, "ed-rusanov"),
        # N=15 on 3 elements with a doubled baseflow frequency: large jumps
        # at the few element interfaces
        _burgers_preset(
            "burgers-fig8-underresolved", _TWO_THIRDS, "ed-rusanov", elements=[3], degree=15, baseflow_frequency=2.0
        ),
        # the central spectrum is so non-normal that FD round-off alone lifts
        # its real parts to ~1e-3, so this one uses an exact Jacobian
        _euler_preset("euler-fig12", "euler-central", "euler-central", jacobian="complex-step"),
        _euler_preset("euler-fig13", "euler-ec-chandrashekar", "euler-ec-chandrashekar"),
        _euler_preset("euler-fig14", "euler-ec-chandrashekar", "euler-rusanov"),
        _euler_preset("euler-fig15", "euler-kg", "euler-rusanov"),
    ]
}


def load_config(source) -> ExperimentConfig:
    """Resolve a preset name, a JSON file path, or a dict into a config.

    A JSON object may name a ``"preset"`` to start from; its other keys
    override the preset fields.
    """
    if isinstance(source, ExperimentConfig):
        return source
    if isinstance(source, dict):
        data = dict(source)
    elif isinstance(source, str) and source in PRESETS:
        return PRESETS[source].replace()
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"{source!r} is neither a preset nor a config file")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
    base = data.pop("preset", None)
    if base is not None:
        if base not in PRESETS:
            raise ConfigError(f"unknown preset {base!r}")
        merged = PRESETS[base].to_dict()
        merged.update(data)
        data = merged
    return ExperimentConfig.from_dict(data)


# traces ----------------------------------------------------------------------


class GrowthTrace:
    """Column-oriented time series, one record per accepted output time."""

    def __init__(self, columns):
        self.columns = list(columns)
        self._rows: list[tuple] = []

    def append(self, **values) -> None:
        if set(values) != set(self.columns):
            raise KeyError(f"trace record needs exactly {self.columns}")
        if self._rows and values["t"] < self._rows[-1][0]:
            raise ValueError("trace times must be nondecreasing")
        self._rows.append(tuple(float(values[c]) for c in self.columns))

    def __len__(self) -> int:
        return len(self._rows)

    def __getitem__(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self._rows])

    def set_column(self, name: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if name not in self.columns:
            self.columns.append(name)
            self._rows = [row + (float(v),) for row, v in zip(self._rows, values)]
        else:
            k = self.columns.index(name)
            self._rows = [row[:k] + (float(v),) + row[k + 1 :] for row, v in zip(self._rows, values)]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self._rows:
                writer.writerow([repr(v) for v in row])


def check_mrfvk(trace_or_norms, baseflow, rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """Per-record check of ``min(b) |u'(t)|^2 <= max(b) |u'(0)|^2``.

    ``trace_or_norms`` is a :class:`GrowthTrace` with a ``fluct_l2`` column
    or an array of discrete L2 norms of the fluctuation. Fluctuation norms
    below ``atol`` count as round-off and always pass.
    """
    b = np.asarray(baseflow, dtype=float)
    if not np.all(b > 0.0):
        raise ValueError("the estimate needs a strictly positive baseflow")
    if isinstance(trace_or_norms, GrowthTrace):
        norms = trace_or_norms["fluct_l2"]
    else:
        norms = np.asarray(trace_or_norms, dtype=float)
    if norms.size == 0:
        return np.zeros(0, dtype=bool)
    lhs = b.min() * norms**2
    rhs = b.max() * norms[0] ** 2
    return (lhs <= rhs * (1.0 + rtol)) | (norms <= atol)


def fit_growth_rate(t, amplitude, t0: float, t1: float) -> float:
    """Least-squares slope of ``log(amplitude)`` over ``t0 <= t <= t1``."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(amplitude, dtype=float)
    sel = (t >= t0) & (t <= t1) & (a > 0)
    if np.count_nonzero(sel) < 2:
        raise ValueError("not enough samples in the fit window")
    return float(np.polyfit(t[sel], np.log(a[sel]), 1)[0])


def saturation_time(t, amplitude, alpha_max: float, window: float = 1.0, fraction: float = 0.5) -> float | None:
    """First time the envelope growth rate drops below ``fraction * alpha_max``.

    The envelope is the running maximum of ``log(amplitude)``; its rate is
    the secant slope over the trailing ``window``. Returns ``None`` if the
    rate never drops.
    """
    t = np.asarray(t, dtype=float)
    env = np.maximum.accumulate(np.log(np.asarray(amplitude, dtype=float)))
    start = np.searchsorted(t, t[0] + window)
    for k in range(start, t.size):
        j = np.searchsorted(t, t[k] - window)
        rate = (env[k] - env[j]) / (t[k] - t[j])
        if rate < fraction * alpha_max:
            return float(t[k])
    return None


def _output_callback(record, interval: float):
    """Record every step when ``interval == 0``, else on a fixed time grid."""
    if interval <= 0:
        return record
    state = {"next": interval}

    def callback(t, u):
        if t >= state["next"] - 1e-12:
            record(t, u)
            state["next"] = (math.floor(t / interval + 1e-9) + 1) * interval

    return callback


# problem assembly ------------------------------------------------------------


def burgers_baseflow(cfg: ExperimentConfig, ops, mesh: Mesh1D) -> np.ndarray:
    freq = cfg.baseflow_frequency * np.pi

    def profile(x):
        return np.sin(freq * x - cfg.baseflow_shift) + cfg.baseflow_offset

    if cfg.project_degree is None:
        return profile(mesh.node_coordinates(ops.nodes))
    return project_to_degree(profile, ops, cfg.project_degree, mesh, method=cfg.projection)


def burgers_problem(cfg: ExperimentConfig):
    """Return ``(ops, mesh, scheme, baseflow, rhs)`` for a Burgers config."""
    ops = build_lgl_operators(cfg.degree)
    mesh = Mesh1D(cfg.elements[0])
    scheme = dgb.BurgersSchemeConfig(
        alpha=cfg.alpha, surface_flux=cfg.surface_flux, surface_alpha=cfg.surface_alpha, volume_mod=cfg.volume_mod
    )
    baseflow = burgers_baseflow(cfg, ops, mesh)
    return ops, mesh, scheme, baseflow, dgb.make_dgsem_rhs(scheme, ops, mesh)


def _euler_problem(cfg: ExperimentConfig):
    ops = build_lgl_operators(cfg.degree)
    mesh = dge.Mesh2D(*cfg.elements)
    scheme = dge.EulerSchemeConfig(cfg.volume_flux, cfg.surface_flux)
    field0 = dge.initialize_density_wave(mesh, ops, cfg.amplitude, tuple(cfg.velocity), cfg.pressure)
    return ops, mesh, scheme, field0, dge.make_euler_rhs(scheme, ops, mesh)


def run_spectrum(cfg: ExperimentConfig, keep_matrix: bool = False) -> SpectrumReport:
    """Jacobian spectrum of the configured scheme around its baseflow."""
    if cfg.equation == "burgers":
        _, _, _, base, rhs = burgers_problem(cfg)
    else:
        _, _, _, field0, rhs = _euler_problem(cfg)
        base = field0.values
    jac = fd_jacobian(rhs, base, cfg.fd_eps, cfg.fd_fallback_eps, method=cfg.jacobian)
    meta = {
        "name": cfg.name,
        "equation": cfg.equation,
        "elements": list(cfg.elements),
        "degree": cfg.degree,
        "jacobian": cfg.jacobian,
        "fd_eps": cfg.fd_eps if cfg.jacobian == "central" else None,
    }
    report = eigenspectrum(jac, meta)
    if not keep_matrix:
        report.matrix = None
    return report


@dataclass
class BurgersRun:
    config: ExperimentConfig
    trace: GrowthTrace
    u: np.ndarray
    baseflow: np.ndarray
    x: np.ndarray
    alpha_max: float
    source: np.ndarray
    t_final: float
    n_steps: int
    failure: str | None = None

    @property
    def completed(self) -> bool:
        return self.failure is None


@dataclass
class EulerRun:
    config: ExperimentConfig
    trace: GrowthTrace
    u: np.ndarray
    x: np.ndarray
    y: np.ndarray
    t_final: float
    n_steps: int
    crash: dge.CrashReport | None = None
    initial_error: float = 0.0

    @property
    def completed(self) -> bool:
        return self.crash is None


def run_burgers_growth(cfg: ExperimentConfig, spectrum: SpectrumReport | None = None) -> BurgersRun:
    """Evolve a fluctuation around the baseflow under the inhomogeneous scheme.

    The source ``-rhs(baseflow)`` makes the baseflow an exact steady state.
    The worst-mode perturbation and the reference growth rate come from the
    Jacobian spectrum (computed here unless ``spectrum`` carries its matrix).
    """
    if cfg.equation != "burgers":
        raise ConfigError("run_burgers_growth needs a Burgers config")
    ops, mesh, _, base, rhs = burgers_problem(cfg)
    if spectrum is None or spectrum.matrix is None:
        jac = fd_jacobian(rhs, base, cfg.fd_eps, cfg.fd_fallback_eps, method=cfg.jacobian)
        spectrum = eigenspectrum(jac)
    alpha_max = spectrum.max_real_part
    x = mesh.node_coordinates(ops.nodes)

    if cfg.perturbation == "worst-mode":
        pert = extract_worst_mode(spectrum, cfg.perturbation_peak, shape=base.shape).values
    elif cfg.perturbation == "cosine":
        pert = cfg.perturbation_peak * np.cos(np.pi * x)
    else:
        pert = np.zeros_like(base)

    inhom = dgb.make_inhomogeneous_rhs(rhs, base)
    trace = GrowthTrace(["t", "amplitude", "l2_norm", "entropy", "fluct_l2", "reference"])
    peak0 = float(np.max(np.abs(pert)))

    def record(t, u):
        fluct = u - base
        trace.append(
            t=t,
            amplitude=np.max(np.abs(fluct)),
            l2_norm=dgb.discrete_l2_norm(u, ops, mesh),
            entropy=dgb.discrete_entropy(u, ops, mesh),
            fluct_l2=dgb.discrete_l2_norm(fluct, ops, mesh),
            reference=peak0 * math.exp(min(alpha_max * t, 700.0)),
        )

    u0 = base + pert
    record(0.0, u0)
    callback = _output_callback(record, cfg.trace_interval)

    controller = TimeStepController(h=mesh.h, degree=cfg.degree, wave_speed=burgers_wave_speed, cfl=cfg.cfl)
    result = integrate(inhom, u0, cfg.t_end, controller, cfg.integrator, callback=callback)
    if len(trace) and trace["t"][-1] < result.t:
        record(result.t, result.u)
    if base.min() > 0:
        trace.set_column("mrfvk_ok", check_mrfvk(trace, base))
    failure = None
    if result.failure is not None:
        failure = f"{result.failure.kind} at t={result.failure.time:.6g}"
    return BurgersRun(cfg, trace, result.u, base, x, alpha_max, inhom.source, result.t, result.n_steps, failure)


def run_euler_wave(cfg: ExperimentConfig) -> EulerRun:
    """Advect the density wave, recording the density error until ``t_end`` or a crash."""
    if cfg.equation != "euler2d":
        raise ConfigError("run_euler_wave needs an euler2d config")
    ops, mesh, _, field0, rhs = _euler_problem(cfg)
    vel = tuple(cfg.velocity)
    x, y = mesh.node_coordinates(ops.nodes)
    trace = GrowthTrace(["t", "l2_error", "entropy", "min_density"])

    def record(t, u):
        trace.append(
            t=t,
            l2_error=dge.l2_error_density(u, ops, mesh, t, cfg.amplitude, vel, cfg.l2_oversample),
            entropy=dge.total_entropy(u, ops, mesh),
            min_density=u[..., 0].min(),
        )

    record(0.0, field0.values)
    initial_error = trace["l2_error"][0]
    callback = _output_callback(record, cfg.trace_interval)

    controller = TimeStepController(
        h=min(mesh.hx, mesh.hy), degree=cfg.degree, wave_speed=dge.max_wave_speed_2d, cfl=cfg.cfl
    )
    result = integrate(rhs, field0.values, cfg.t_end, controller, cfg.integrator, callback=callback)
    if trace["t"][-1] < result.t:
        record(result.t, result.u)
    crash = None
    if result.failure is not None:
        err = result.failure.error
        if isinstance(err, InadmissibleStateError):
            crash = dge.crash_report_from_error(err, result.failure.time, result.t)
        else:
            crash = dge.CrashReport(result.failure.time, (-1, -1), (-1, -1), "non-finite", result.t)
    return EulerRun(cfg, trace, result.u, x, y, result.t, result.n_steps, crash, initial_error)


# outputs -----------------------------------------------------------------------


def _dump_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_spectrum(outdir, report: SpectrumReport, cfg: ExperimentConfig) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "spectrum.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["re", "im"])
        for lam in report.eigenvalues:
            writer.writerow([repr(float(lam.real)), repr(float(lam.imag))])
    _dump_json(out / "meta.json", {"config": cfg.to_dict(), "spectrum": report.summary()})


def write_run(outdir, run) -> None:
    """Write ``trace.csv``, ``meta.json`` and ``field_final.csv`` for a run."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    run.trace.write_csv(out / "trace.csv")
    meta = {"config": run.config.to_dict(), "t_final": run.t_final, "n_steps": run.n_steps}
    with open(out / "field_final.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        if isinstance(run, BurgersRun):
            writer.writerow(["x", "u", "baseflow"])
            for row in zip(run.x.ravel(), run.u.ravel(), run.baseflow.ravel()):
                writer.writerow([repr(float(v)) for v in row])
            meta.update(
                status="completed" if run.completed else "crashed",
                failure=run.failure,
                alpha_max=run.alpha_max,
                final_amplitude=float(run.trace["amplitude"][-1]),
            )
        else:
            writer.writerow(["x", "y", "rho", "rho_v1", "rho_v2", "rho_E"])
            flat = run.u.reshape(-1, 4)
            for xv, yv, state in zip(run.x.ravel(), run.y.ravel(), flat):
                writer.writerow([repr(float(xv)), repr(float(yv))] + [repr(float(v)) for v in state])
            meta.update(
                status="completed" if run.completed else "crashed",
                crash=run.crash.to_dict() if run.crash else None,
                last_output_time=float(run.trace["t"][-1]),
                initial_l2_error=run.initial_error,
                final_l2_error=float(run.trace["l2_error"][-1]),
            )
    _dump_json(out / "meta.json", meta)


# sweeps ------------------------------------------------------------------------


def expand_sweep(spec: dict) -> list[tuple[str, ExperimentConfig]]:
    """Cartesian product of a sweep description.

    ``spec = {"base": <preset name or config dict>, "grid": {key: [values]}}``.
    A grid value that is a dict sets several fields at once (useful for
    flux pairs). Keys are varied in sorted order, so run ids are stable.
    """
    if not isinstance(spec, dict) or "base" not in spec:
        raise ConfigError("sweep config needs a 'base' entry")
    unknown = sorted(set(spec) - {"base", "grid", "mode"})
    if unknown:
        raise ConfigError(f"unknown sweep keys: {', '.join(unknown)}")
    base = load_config(spec["base"])
    if "mode" in spec:
        base = base.replace(mode=spec["mode"])
    grid = spec.get("grid") or {}
    keys = sorted(grid)
    for k in keys:
        if not isinstance(grid[k], list):
            raise ConfigError(f"grid entry {k!r} must be a list")
    runs = []
    if keys and any(len(grid[k]) == 0 for k in keys):
        return runs
    for n, combo in enumerate(itertools.product(*(grid[k] for k in keys))):
        changes = {}
        for k, v in zip(keys, combo):
            changes.update(v if isinstance(v, dict) else {k: v})
        cfg = base.replace(name=f"{base.name}-{n:03d}", **changes)
        runs.append((cfg.name, cfg))
    return runs


def _execute(cfg: ExperimentConfig, outdir: str | None) -> dict:
    row = {"run": cfg.name, "status": "completed", "crash_time": "", "final_value": "", "max_real_part": ""}
    try:
        if cfg.mode == "spectrum":
            report = run_spectrum(cfg)
            row["max_real_part"] = report.max_real_part
            if outdir:
                write_spectrum(Path(outdir) / cfg.name, report, cfg)
        elif cfg.equation == "burgers":
            run = run_burgers_growth(cfg)
            row["final_value"] = float(run.trace["amplitude"][-1])
            row["max_real_part"] = run.alpha_max
            if not run.completed:
                row["status"] = "crashed"
                row["crash_time"] = run.t_final
            if outdir:
                write_run(Path(outdir) / cfg.name, run)
        else:
            run = run_euler_wave(cfg)
            row["final_value"] = float(run.trace["l2_error"][-1])
            if run.crash is not None:
                row["status"] = "crashed"
                row["crash_time"] = run.crash.time
            if outdir:
                write_run(Path(outdir) / cfg.name, run)
    except Exception as exc:  # one bad run must not stop the sweep
        logger.exception("run %s failed", cfg.name)
        row["status"] = f"error: {exc}"
    return row


def run_sweep(spec: dict, outdir=None, jobs: int = 1) -> list[dict]:
    """Execute every run of a sweep; failures are recorded, not raised."""
    runs = expand_sweep(spec)
    if not runs:
        rows = []
    elif jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as pool:
            rows = list(pool.map(_execute, [c for _, c in runs], [outdir] * len(runs)))
    else:
        rows = [_execute(cfg, outdir) for _, cfg in runs]
    for (_, cfg), row in zip(runs, rows):
        row.update(
            equation=cfg.equation,
            elements="x".join(str(k) for k in cfg.elements),
            amplitude=cfg.amplitude if cfg.equation == "euler2d" else "",
            volume=cfg.volume_flux if cfg.equation == "euler2d" else cfg.alpha,
            surface=cfg.surface_flux,
        )
    if outdir is not None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        cols = ["run", "equation", "elements", "amplitude", "volume", "surface", "status", "crash_time", "final_value", "max_real_part"]
        with open(out / "summary.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            for row in rows:
                writer.writerow({c: row.get(c, "") for c in cols})
    return rows
