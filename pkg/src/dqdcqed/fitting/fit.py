"""
Parameter estimation: Hamiltonian fits to resonance positions, full
master-equation fits to line traces, staged fits, and the 1/Delta_r law.
"""
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..eigen import one_excitation_frequencies
from ..errors import CqedError
from ..model import get_param, set_param, with_overrides
from ..solver import qubit_spectroscopy_trace, spectrum_trace
from .optimize import simplex_minimize
from .traces import PHASE, REFLECTION

CONTROL_SCALE = "control_scale"


@dataclass
class FreeParameter:
    path: str
    init: float
    bounds: tuple = (-math.inf, math.inf)
    step: float = None

    def __post_init__(self):
        self.init = float(self.init)
        lo, hi = self.bounds
        self.bounds = (float(lo), float(hi))
        if not lo <= self.init <= hi:
            raise ValueError(f"{self.path}: initial value {self.init} outside bounds {self.bounds}")
        if self.step is None:
            step = 0.05 * abs(self.init) if self.init != 0 else 1.0
            if math.isfinite(hi - lo):
                step = min(step, 0.25 * (hi - lo))
            self.step = step


@dataclass
class ParameterEstimate:
    name: str
    value: float
    uncertainty: float
    fixed: bool
    stage: str

    def to_dict(self):
        return {
            "parameter": self.name,
            "value": self.value,
            "uncertainty": self.uncertainty,
            "fixed": self.fixed,
            "stage": self.stage,
        }


@dataclass
class FitResult:
    parameters: list
    residual_norm: float
    residual_norm_initial: float
    chi2: float
    dof: int
    iterations: int
    nfev: int
    converged: bool
    stage: str = ""
    message: str = ""
    extra: dict = field(default_factory=dict)

    def _find(self, name):
        for p in self.parameters:
            if p.name == name:
                return p
        raise KeyError(name)

    def value(self, name):
        return self._find(name).value

    def uncertainty(self, name):
        return self._find(name).uncertainty

    def estimates(self):
        return {p.name: p.value for p in self.parameters}

    def to_dict(self):
        out = {
            "stage": self.stage,
            "parameters": [p.to_dict() for p in self.parameters],
            "residual_norm": self.residual_norm,
            "residual_norm_initial": self.residual_norm_initial,
            "chi2": self.chi2,
            "dof": self.dof,
            "iterations": self.iterations,
            "nfev": self.nfev,
            "converged": self.converged,
            "message": self.message,
        }
        out.update(self.extra)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def _as_free(free):
    if free is None:
        return []
    if isinstance(free, dict):
        out = []
        for path, spec in free.items():
            if isinstance(spec, FreeParameter):
                out.append(spec)
            elif isinstance(spec, dict):
                out.append(FreeParameter(path, spec["init"], tuple(spec.get("bounds", (-math.inf, math.inf))),
                                         spec.get("step")))
            else:
                init, bounds = spec
                out.append(FreeParameter(path, init, tuple(bounds)))
        return out
    return list(free)


def jacobian(resid, p, steps, rel=1e-3):
    """Central finite-difference Jacobian of a residual vector."""
    p = np.asarray(p, dtype=float)
    r0 = np.asarray(resid(p))
    J = np.empty((r0.size, p.size))
    for i in range(p.size):
        h = rel * steps[i]
        dp = np.zeros_like(p)
        dp[i] = h
        J[:, i] = (np.asarray(resid(p + dp)) - np.asarray(resid(p - dp))) / (2 * h)
    return J


def covariance(J, chi2, m):
    """(J^T J)^-1 scaled by the reduced chi-square."""
    p = J.shape[1]
    if p == 0:
        return np.zeros((0, 0))
    cov = np.linalg.pinv(J.T @ J)
    if m > p:
        cov = cov * (chi2 / (m - p))
    return cov


def _build_result(names, values, cov, fixed, stage, chi2, chi2_init, m, opt, extra=None):
    errs = np.sqrt(np.clip(np.diag(cov), 0.0, None)) if len(names) else []
    params = [ParameterEstimate(n, float(v), float(e), False, stage) for n, v, e in zip(names, values, errs)]
    for name, (value, origin) in fixed.items():
        params.append(ParameterEstimate(name, float(value), 0.0, True, origin))
    return FitResult(
        parameters=params,
        residual_norm=math.sqrt(chi2),
        residual_norm_initial=math.sqrt(chi2_init),
        chi2=float(chi2),
        dof=int(m - len(names)),
        iterations=opt.nit if opt else 0,
        nfev=opt.nfev if opt else 1,
        converged=opt.converged if opt else True,
        stage=stage,
        message=opt.message if opt else "residual-only evaluation (no free parameters)",
        extra=dict(extra or {}),
    )


def _apply(config, free, values):
    for fp, v in zip(free, values):
        if fp.path != CONTROL_SCALE:
            config = set_param(config, fp.path, v)
    return config


# -- Hamiltonian fit ----------------------------------------------------------

def hamiltonian_fit(positions, config, control_path, free=None, control_scale=1.0,
                    sigma=1.0, restarts=3, seed=0, stage="hamiltonian"):
    """
    Fit single-excitation transition frequencies to observed resonance
    positions.

    ``positions`` is a list of (control, frequency) pairs; the control value
    times ``control_scale`` is written to ``control_path`` (for example a
    detuning).  Each observed frequency is matched to the nearest model
    transition.  Include ``control_scale`` in ``free`` to calibrate the
    control axis.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    free = _as_free(free)
    if len(positions) < len(free) + 1:
        raise ValueError(f"{len(positions)} positions cannot constrain {len(free)} free parameters")
    get_param(config, control_path)
    controls = positions[:, 0]
    freqs = positions[:, 1]
    sig = np.broadcast_to(np.asarray(sigma, dtype=float), freqs.shape)

    def resid(values):
        cfg = _apply(config, free, values)
        scale = control_scale
        for fp, v in zip(free, values):
            if fp.path == CONTROL_SCALE:
                scale = v
        out = np.empty(freqs.size)
        cache = {}
        for i, (c, f) in enumerate(zip(controls, freqs)):
            if c not in cache:
                cache[c] = one_excitation_frequencies(set_param(cfg, control_path, scale * c))
            out[i] = np.min(np.abs(cache[c] - f)) / sig[i]
        return out

    def objective(values):
        r = resid(values)
        return float(r @ r)

    x0 = np.array([fp.init for fp in free])
    chi2_init = objective(x0)
    if not free:
        return _build_result([], [], np.zeros((0, 0)), {}, stage, chi2_init, chi2_init, freqs.size, None)
    opt = simplex_minimize(objective, x0, [fp.step for fp in free], [fp.bounds for fp in free],
                           restarts=restarts, seed=seed, xatol=1e-6)
    J = jacobian(resid, opt.x, [fp.step for fp in free])
    cov = covariance(J, opt.fun, freqs.size)
    fixed = {}
    if all(fp.path != CONTROL_SCALE for fp in free):
        fixed[CONTROL_SCALE] = (control_scale, "fixed")
    return _build_result([fp.path for fp in free], opt.x, cov, fixed, stage, opt.fun, chi2_init,
                         freqs.size, opt)


# -- master-equation fit --------------------------------------------------------

@dataclass
class FitProblem:
    template: object
    free: list
    traces: list
    fixed: dict = field(default_factory=dict)
    stage: str = "master-equation"
    provenance: dict = field(default_factory=dict)
    restarts: int = 3
    seed: int = 0
    maxfev: int = 4000

    def __post_init__(self):
        self.free = _as_free(self.free)
        if not self.free:
            raise ValueError("a fit problem needs at least one free parameter")
        for fp in self.free:
            get_param(self.template, fp.path)
        for path in self.fixed:
            get_param(self.template, path)
        if not self.traces:
            raise ValueError("a fit problem needs at least one trace")


def _sorted_grid(trace):
    order = np.argsort(trace.x)
    return order, trace.x[order]


def simulate_trace(config, trace):
    """Unscaled model values for a measured trace, in the trace's own order."""
    cfg = with_overrides(config, trace.overrides)
    order, x = _sorted_grid(trace)
    if trace.kind == REFLECTION:
        model = spectrum_trace(cfg, x).abs_s11
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            model = qubit_spectroscopy_trace(cfg, x).dphi
    out = np.empty_like(model)
    out[order] = model
    return out


def _scale_offset(model, y, sigma):
    w = 1.0 / sigma
    A = np.column_stack([model * w, w])
    coef, *_ = np.linalg.lstsq(A, y * w, rcond=None)
    return float(coef[0]), float(coef[1])


def master_equation_fit(problem):
    """
    Least-squares fit of steady-state spectra to measured traces.

    Phase-shift traces carry a scale and offset each; at every trial point
    they are set to their linear least-squares optimum, and they enter the
    covariance as ordinary parameters.
    """
    base = with_overrides(problem.template, problem.fixed)
    free = problem.free
    traces = problem.traces
    phase_idx = [i for i, t in enumerate(traces) if t.kind == PHASE]
    m = sum(t.x.size for t in traces)

    def models(values):
        cfg = _apply(base, free, values)
        return [simulate_trace(cfg, t) for t in traces]

    def resid_projected(values):
        parts = []
        for t, mod in zip(traces, models(values)):
            if t.kind == PHASE:
                s, o = _scale_offset(mod, t.y, t.sigma)
                mod = s * mod + o
            parts.append((t.y - mod) / t.sigma)
        return np.concatenate(parts)

    def objective(values):
        r = resid_projected(values)
        return float(r @ r)

    x0 = np.array([fp.init for fp in free])
    chi2_init = objective(x0)
    opt = simplex_minimize(objective, x0, [fp.step for fp in free], [fp.bounds for fp in free],
                           restarts=problem.restarts, seed=problem.seed, maxfev=problem.maxfev)

    # full parameter vector: physical values then (scale, offset) per phase trace
    nuis = []
    for i, mod in zip(range(len(traces)), models(opt.x)):
        if i in phase_idx:
            nuis.extend(_scale_offset(mod, traces[i].y, traces[i].sigma))
    n_phys = len(free)

    def resid_full(theta):
        mods = models(theta[:n_phys])
        parts = []
        k = n_phys
        for t, mod in zip(traces, mods):
            if t.kind == PHASE:
                mod = theta[k] * mod + theta[k + 1]
                k += 2
            parts.append((t.y - mod) / t.sigma)
        return np.concatenate(parts)

    theta = np.concatenate([opt.x, nuis])
    steps = [fp.step for fp in free] + [max(abs(v), 1e-3) for v in nuis]
    J = jacobian(resid_full, theta, steps)
    cov = covariance(J, opt.fun, m)
    names = [fp.path for fp in free]
    for i in phase_idx:
        names += [f"traces[{i}].scale", f"traces[{i}].offset"]
    fixed = {p: (v, problem.provenance.get(p, "fixed")) for p, v in problem.fixed.items()}
    return _build_result(names, theta, cov, fixed, problem.stage, opt.fun, chi2_init, m, opt)


@dataclass
class Stage:
    name: str
    free: list
    traces: list = field(default_factory=list)
    fixed: dict = field(default_factory=dict)
    kind: str = "master-equation"
    positions: object = None
    control_path: str = None
    control_scale: float = 1.0


def staged_fit(template, stages, restarts=3, seed=0):
    """
    Run fit stages in order.  Each stage's estimates are written into the
    model and held fixed in every later stage, where they are echoed with
    the name of the stage that produced them.

    Returns (final config, per-stage results, combined parameter table).
    """
    config = template
    carried = {}  # path -> (value, stage)
    results = []
    for st in stages:
        free = _as_free(st.free)
        config = with_overrides(config, st.fixed)
        held = {p: v for p, (v, _) in carried.items() if all(fp.path != p for fp in free)}
        provenance = {p: origin for p, (_, origin) in carried.items()}
        if st.kind == "hamiltonian":
            res = hamiltonian_fit(st.positions, config, st.control_path, free, st.control_scale,
                                  restarts=restarts, seed=seed, stage=st.name)
            res.parameters.extend(
                ParameterEstimate(p, v, 0.0, True, provenance[p]) for p, v in held.items()
            )
        else:
            problem = FitProblem(config, free, st.traces, {**held, **st.fixed}, st.name,
                                 {**provenance, **{p: "fixed" for p in st.fixed}},
                                 restarts=restarts, seed=seed)
            res = master_equation_fit(problem)
        results.append(res)
        for p in res.parameters:
            if not p.fixed and p.name != CONTROL_SCALE and not p.name.startswith("traces["):
                config = set_param(config, p.name, p.value)
                carried[p.name] = (p.value, st.name)
    table = {}
    for res in results:
        for p in res.parameters:
            if not p.fixed:
                table[p.name] = p
    return config, results, list(table.values())


# -- exchange scaling -----------------------------------------------------------

class ScalingFit(NamedTuple):
    A: float
    relative_residual: float
    A_err: float


def exchange_scaling_fit(points):
    """Least-squares fit of 2J = A / Delta_r; A in MHz^2."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("need at least two (delta_r, 2J) points")
    d, y = pts[:, 0], pts[:, 1]
    if np.any(d == 0):
        raise ZeroDivisionError("delta_r must be nonzero")
    u = 1.0 / d
    A = float(u @ y / (u @ u))
    r = y - A * u
    rel = float(np.linalg.norm(r) / np.linalg.norm(y)) if np.any(y) else 0.0
    dof = len(pts) - 1
    err = float(math.sqrt((r @ r) / dof / (u @ u))) if dof > 0 else 0.0
    return ScalingFit(A, rel, err)


def residual_at(problem, values):
    """Chi-square of a problem at explicit parameter values (phase nuisances projected)."""
    sub = FitProblem(problem.template, problem.free, problem.traces, problem.fixed, problem.stage)
    base = with_overrides(sub.template, sub.fixed)
    cfg = _apply(base, sub.free, values)
    total = 0.0
    for t in sub.traces:
        mod = simulate_trace(cfg, t)
        if t.kind == PHASE:
            s, o = _scale_offset(mod, t.y, t.sigma)
            mod = s * mod + o
        r = (t.y - mod) / t.sigma
        total += float(r @ r)
    return total


__all__ = [
    "CONTROL_SCALE",
    "CqedError",
    "FitProblem",
    "FitResult",
    "FreeParameter",
    "ParameterEstimate",
    "ScalingFit",
    "Stage",
    "covariance",
    "exchange_scaling_fit",
    "hamiltonian_fit",
    "jacobian",
    "master_equation_fit",
    "residual_at",
    "simulate_trace",
    "staged_fit",
]
