"""
Liouvillian construction, steady states, and reflection spectra.

Vectorization is column stacking, vec(A X B) = (B^T kron A) vec(X).  The
steady state is found by replacing the first row of the Liouvillian (the
equation for rho_00, which is linearly dependent on the other diagonal
rows) with the trace functional and doing a dense LU solve.
"""
import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import zgecon

from .errors import DimensionError, NonUniqueSteadyStateError, SolverError
from .model import (
    Channel,
    build_collapse_ops,
    build_hamiltonian,
    config_to_dict,
    excitation_operator,
    get_param,
    qubit_frequency,
    scattering_operator,
    set_param,
)

CSV_HEADER = ["nu_p_MHz", "re_s11", "im_s11", "abs_s11", "phase_rad", "n_flux"]

# elements of a batch of stacked Liouvillians solved in one LAPACK call
_BATCH_ELEMENTS = 4_000_000
# reciprocal condition number below which the constrained system counts as singular
_RCOND_MIN = 1e-12
# below this many probe points a per-point LU is cheaper than one Schur form
_SCHUR_MIN_POINTS = 24


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v):
    d = math.isqrt(v.shape[-1])
    return np.asarray(v).reshape(v.shape[:-1] + (d, d), order="F")


def _ops(collapse):
    return [c.op if isinstance(c, Channel) else np.asarray(c) for c in collapse]


def build_liouvillian(H, collapse=()):
    """Superoperator of -i[H, .] + sum_c D[c] acting on column-stacked rho."""
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    if H.shape != (d, d):
        raise DimensionError(f"Hamiltonian must be square, got {H.shape}")
    eye = np.eye(d)
    liou = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for k, c in enumerate(_ops(collapse)):
        if c.shape != (d, d):
            raise DimensionError(f"collapse operator {k} has shape {c.shape}, expected {(d, d)}")
        cdc = c.conj().T @ c
        liou += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return liou


def trace_row(d):
    return vec(np.eye(d, dtype=complex))


def kernel_dimension(liou, rtol=1e-10):
    s = np.linalg.svd(liou, compute_uv=False)
    return int(np.sum(s <= rtol * s[0])) if s[0] > 0 else liou.shape[0]


def _constrained_system(liou):
    d = math.isqrt(liou.shape[-1])
    m = np.array(liou, dtype=complex, copy=True)
    m[..., 0, :] = trace_row(d)
    return m


def _factor(liou):
    """
    LU factors of the trace-constrained system.  A kernel of dimension > 1
    leaves that system singular; LAPACK does not always notice (round-off
    fills the zero pivots), so the condition number is estimated as well.
    """
    m = _constrained_system(liou)
    if not np.all(np.isfinite(m)):
        raise np.linalg.LinAlgError("non-finite Liouvillian")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu = scipy.linalg.lu_factor(m, check_finite=False)
    rcond, info = zgecon(lu[0], np.abs(m).sum(axis=0).max(), norm="1")
    if info != 0 or not rcond > _RCOND_MIN:
        kdim = kernel_dimension(liou)
        if kdim > 1:
            raise NonUniqueSteadyStateError(kdim)
        raise np.linalg.LinAlgError(f"steady-state system is singular (rcond {rcond:.2e})")
    return lu


def liouvillian_residual(liou, rho):
    return float(np.linalg.norm(liou @ vec(rho)))


def steady_state(liou, check=True):
    """
    Solve L vec(rho) = 0 with Tr rho = 1.

    Raises NonUniqueSteadyStateError when the kernel is more than one
    dimensional (the constrained system is then singular).
    """
    n = liou.shape[0]
    d = math.isqrt(n)
    if d * d != n or liou.shape != (n, n):
        raise DimensionError(f"Liouvillian shape {liou.shape} is not (d^2, d^2)")
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    lu = _factor(liou)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        x = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
    ok = bool(np.all(np.isfinite(x)))
    if ok and check:
        scale = max(1.0, float(np.abs(liou).max()))
        ok = np.linalg.norm(liou @ x) <= 1e-8 * scale
    if not ok:
        raise np.linalg.LinAlgError("steady-state linear system is ill-conditioned")
    return unvec(x)


def scattering(rho, L):
    """Scattered amplitude beta = Tr(L rho) and photon flux n = Tr(L^dag L rho)."""
    rho = np.asarray(rho)
    L = np.asarray(L)
    if rho.shape != L.shape:
        raise DimensionError(f"rho {rho.shape} and L {L.shape} differ in shape")
    beta = np.trace(L @ rho)
    n = np.trace(L.conj().T @ L @ rho).real
    return complex(beta), float(n)


def steady_state_at(config, omega_p=None):
    """Steady state and Liouvillian at one probe frequency, built directly."""
    if omega_p is not None:
        config = set_param(config, "probe.omega_p", omega_p)
    liou = build_liouvillian(build_hamiltonian(config), build_collapse_ops(config))
    return steady_state(liou), liou


def reflection_coefficient(config, omega_p):
    """S11 = beta / alpha at probe frequency omega_p (MHz)."""
    alpha = complex(config.probe.alpha)
    if alpha == 0:
        raise ValueError("reflection coefficient needs a nonzero probe amplitude")
    try:
        rho, _ = steady_state_at(config, omega_p)
    except (np.linalg.LinAlgError, NonUniqueSteadyStateError) as exc:
        raise SolverError(omega_p, exc) from exc
    beta, _ = scattering(rho, scattering_operator(config))
    return beta / alpha


class SpectrumEngine:
    """
    Batched steady-state solver for one configuration over many probe
    frequencies.  The probe frequency enters only through -nu_p X with X
    diagonal, so L(nu_p) = L0 + i nu_p diag(D).
    """

    def __init__(self, config):
        self.config = config
        base = set_param(config, "probe.omega_p", 0.0)
        self.L0 = build_liouvillian(build_hamiltonian(base), build_collapse_ops(base))
        x = np.diag(excitation_operator(config.layout)).real
        d = x.size
        # superoperator of -i[-X, .] is i (I kron X - X kron I); diagonal for diagonal X
        self.D = 1j * (np.tile(x, d) - np.repeat(x, d))
        self.L = scattering_operator(config)
        self.LdL = self.L.conj().T @ self.L
        self.d = d

    def liouvillian(self, omega_p):
        return self.L0 + np.diag(omega_p * self.D)

    def solve(self, omega_ps, method="auto"):
        """Column-stacked steady states, shape (len(omega_ps), d^2)."""
        omega_ps = np.asarray(omega_ps, dtype=float)
        if omega_ps.size == 0:
            return np.empty((0, self.d * self.d), dtype=complex)
        if method == "auto":
            method = "schur" if omega_ps.size >= _SCHUR_MIN_POINTS else "direct"
        try:
            # a degenerate kernel is structural, so one check per call suffices
            _factor(self.liouvillian(omega_ps[0]))
        except (np.linalg.LinAlgError, NonUniqueSteadyStateError) as exc:
            raise SolverError(float(omega_ps[0]), exc) from exc
        if method == "schur":
            try:
                return self._solve_schur(omega_ps)
            except (np.linalg.LinAlgError, NonUniqueSteadyStateError, ValueError):
                pass
        return self._solve_direct(omega_ps)

    def _solve_direct(self, omega_ps):
        n = self.d * self.d
        base = _constrained_system(self.L0)
        rhs = np.zeros(n, dtype=complex)
        rhs[0] = 1.0
        D = self.D.copy()
        D[0] = 0.0
        idx = np.arange(n)
        chunk = max(1, _BATCH_ELEMENTS // (n * n))
        out = np.empty((omega_ps.size, n), dtype=complex)
        for start in range(0, omega_ps.size, chunk):
            nus = omega_ps[start:start + chunk]
            m = np.broadcast_to(base, (nus.size, n, n)).copy()
            m[:, idx, idx] += nus[:, None] * D[None, :]
            try:
                x = np.linalg.solve(m, np.broadcast_to(rhs, (nus.size, n))[..., None])[..., 0]
            except np.linalg.LinAlgError:
                x = np.full((nus.size, n), np.nan, dtype=complex)
            bad = ~np.all(np.isfinite(x), axis=1)
            for j in np.flatnonzero(bad):
                try:
                    x[j] = vec(steady_state(self.liouvillian(nus[j]), check=False))
                except (np.linalg.LinAlgError, NonUniqueSteadyStateError) as exc:
                    raise SolverError(float(nus[j]), exc) from exc
            out[start:start + nus.size] = x
        return out

    def _solve_schur(self, omega_ps):
        # (A + s B) x = e with A the constrained system at the grid centre and
        # B = diag(D) (row 0 zeroed).  With A^-1 B = Z T Z^H this becomes the
        # triangular system (T + I/s) y = Z^H A^-1 e / s, x = Z y.
        n = self.d * self.d
        nu0 = 0.5 * (omega_ps.min() + omega_ps.max())
        B = self.D.copy()
        B[0] = 0.0
        lu = _factor(self.liouvillian(nu0))
        rhs = np.zeros(n, dtype=complex)
        rhs[0] = 1.0
        x0 = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
        T, Z = scipy.linalg.schur(scipy.linalg.lu_solve(lu, np.diag(B)), output="complex")
        c = Z.conj().T @ x0
        diag = np.diag(T).copy()
        idx = np.arange(n)
        work = T.copy()
        ys = np.empty((omega_ps.size, n), dtype=complex)
        for k, nu in enumerate(omega_ps):
            s = nu - nu0
            if s == 0.0:
                ys[k] = c
                continue
            work[idx, idx] = diag + 1.0 / s
            ys[k] = scipy.linalg.solve_triangular(work, c / s, check_finite=False)
        out = ys @ Z.T
        if not np.all(np.isfinite(out)):
            raise ValueError("non-finite Schur solution")
        # guard against an ill-conditioned reference point: verify a few residuals
        for k in np.unique(np.linspace(0, omega_ps.size - 1, 5).astype(int)):
            r = np.linalg.norm(self.liouvillian(omega_ps[k]) @ out[k])
            if not r <= 1e-8 * max(1.0, float(np.abs(self.L0).max())):
                raise ValueError("Schur solution failed residual check")
        return out

    def observables(self, omega_ps):
        """beta and photon flux n for every probe frequency."""
        rhos = unvec(self.solve(omega_ps))
        beta = np.einsum("ji,bij->b", self.L, rhos)
        n = np.einsum("ji,bij->b", self.LdL, rhos).real
        return beta, n


@dataclass
class SpectrumTrace:
    probe_freqs: np.ndarray
    s11: np.ndarray
    n_flux: np.ndarray
    config: object = None
    metadata: dict = field(default_factory=dict)

    @property
    def abs_s11(self):
        return np.abs(self.s11)

    @property
    def phase(self):
        return np.angle(self.s11)

    def to_csv(self, path):
        write_trace_csv(self, path)


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("probe grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("probe grid must be strictly increasing")
    return grid


def spectrum_trace(config, grid, metadata=None):
    grid = _check_grid(grid)
    alpha = complex(config.probe.alpha)
    if alpha == 0:
        raise ValueError("spectrum needs a nonzero probe amplitude")
    beta, n = SpectrumEngine(config).observables(grid)
    return SpectrumTrace(grid, beta / alpha, n, config, dict(metadata or {}))


def _sweep_point(args):
    config, path, value, grid = args
    cfg = set_param(config, path, value)
    return spectrum_trace(cfg, grid, {"sweep_param": path, "sweep_value": float(value)})


def sweep_2d(config, path, values, grid, workers=1):
    """One spectrum per value of the scalar at ``path``; order follows ``values``."""
    get_param(config, path)
    values = [float(v) for v in np.atleast_1d(values)]
    grid = _check_grid(grid)
    jobs = [(config, path, v, grid) for v in values]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(job) for job in jobs]


@dataclass
class PhaseShiftTrace:
    probe_freqs: np.ndarray
    dphi: np.ndarray
    metadata: dict = field(default_factory=dict)


def dispersive_margin(config):
    """min_k |nu_r - nu_k| / max_k g_k; inf without coupled qubits."""
    gmax = max(config.couplings, default=0.0)
    if gmax == 0:
        return math.inf
    detunings = [abs(config.resonator.omega_r - qubit_frequency(d)) for d in config.dqds]
    return min(detunings) / gmax


def qubit_spectroscopy_trace(config, grid, scale=1.0, offset=0.0):
    """
    Single-tone stand-in for two-tone qubit spectroscopy.

    The probe is swept over the qubit-like resonances and the phase of S11
    is referenced pointwise to the same system with all couplings set to
    zero, which removes the bare resonator's phase slope.  Returns
    ``scale * dphi + offset``.
    """
    grid = _check_grid(grid)
    margin = dispersive_margin(config)
    ok = margin > 3.0
    if not ok:
        warnings.warn(
            f"not dispersive: min |nu_r - nu_k| is only {margin:.2f} x max g", RuntimeWarning
        )
    ref_cfg = config
    for k in range(config.num_qubits):
        ref_cfg = set_param(ref_cfg, f"couplings[{k}]", 0.0)
    s11 = spectrum_trace(config, grid).s11
    ref = spectrum_trace(ref_cfg, grid).s11
    dphi = np.angle(s11 / ref)
    meta = {
        "scale": float(scale),
        "offset": float(offset),
        "baseline": "pointwise arg S11 of the decoupled (g=0) configuration",
        "dispersive_ok": bool(ok),
        "dispersive_margin": float(margin),
    }
    return PhaseShiftTrace(grid, scale * dphi + offset, meta)


# -- CSV ----------------------------------------------------------------------

def _fmt(x):
    return f"{float(x):.12g}"


def trace_csv_text(trace):
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for nu, s, n in zip(trace.probe_freqs, trace.s11, trace.n_flux):
        row = (nu, s.real, s.imag, abs(s), np.angle(s), n)
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_trace_csv(trace, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(trace_csv_text(trace))


def read_trace_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: header {header} does not match {CSV_HEADER}")
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))
    return SpectrumTrace(arr[:, 0], arr[:, 1] + 1j * arr[:, 2], arr[:, 5], None, {"source": str(path)})


def trace_metadata(trace):
    meta = dict(trace.metadata)
    if trace.config is not None:
        meta["config"] = config_to_dict(trace.config)
    return meta
