"""Bounded Nelder-Mead with seeded restarts and failure-tolerant objectives."""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..errors import CqedError

log = logging.getLogger(__name__)


@dataclass
class OptResult:
    x: np.ndarray
    fun: float
    fun_initial: float
    nfev: int
    nit: int
    converged: bool
    failures: int = 0
    message: str = ""
    history: list = field(default_factory=list)


class _Guarded:
    """Wraps an objective; simulator failures return a penalty instead of raising."""

    def __init__(self, fun, penalty):
        self.fun = fun
        self.penalty = penalty
        self.nfev = 0
        self.failures = 0

    def __call__(self, x):
        self.nfev += 1
        try:
            val = float(self.fun(x))
        except (CqedError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            self.failures += 1
            log.warning("objective failed at %s: %s", np.array2string(np.asarray(x), precision=6), exc)
            return self.penalty
        if not np.isfinite(val):
            self.failures += 1
            return self.penalty
        return val


def simplex_minimize(fun, x0, steps, bounds=None, restarts=3, seed=0,
                     xatol=1e-4, fatol=1e-9, maxfev=4000):
    """
    Minimize ``fun`` from ``x0`` with Nelder-Mead in coordinates scaled by
    ``steps``, then restart ``restarts`` times from the incumbent with a
    randomly oriented simplex (seeded).  Bounds are (lo, hi) pairs in the
    original coordinates.
    """
    x0 = np.asarray(x0, dtype=float)
    steps = np.asarray(steps, dtype=float)
    n = x0.size
    if bounds is None:
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
    else:
        lo = np.array([b[0] for b in bounds], dtype=float)
        hi = np.array([b[1] for b in bounds], dtype=float)
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise ValueError("initial point lies outside the bounds")

    def unscale(u):
        return x0 + u * steps

    ulo = (lo - x0) / steps
    uhi = (hi - x0) / steps
    f_init = _Guarded(fun, np.inf)(x0)
    if not np.isfinite(f_init):
        raise ValueError("objective cannot be evaluated at the initial point")
    guarded = _Guarded(lambda u: fun(unscale(u)), penalty=max(1e6, 1e3 * abs(f_init)))
    rng = np.random.default_rng(seed)

    def run(start, simplex):
        res = minimize(
            guarded, start, method="Nelder-Mead",
            bounds=list(zip(ulo, uhi)) if bounds is not None else None,
            options={"initial_simplex": simplex, "xatol": xatol, "fatol": fatol * max(1.0, abs(f_init)),
                     "maxfev": maxfev, "adaptive": n > 4},
        )
        return res

    u_best = np.zeros(n)
    simplex = np.vstack([u_best, u_best + np.eye(n)])
    simplex = np.clip(simplex, ulo, uhi)
    res = run(u_best, simplex)
    best, f_best, nit = res.x, float(res.fun), int(res.nit)
    history = [f_best]
    last_ok = bool(res.success)
    improved_last = np.inf
    for _ in range(restarts):
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        radius = rng.uniform(0.5, 1.0)
        simplex = np.clip(np.vstack([best, best + radius * q.T]), ulo, uhi)
        res = run(best, simplex)
        nit += int(res.nit)
        improved_last = f_best - float(res.fun)
        if res.fun < f_best:
            best, f_best = res.x, float(res.fun)
        history.append(f_best)
        last_ok = bool(res.success)
    settled = improved_last <= max(1e-6 * abs(f_best), 10 * fatol) if restarts else True
    converged = last_ok and settled and guarded.failures < max(1, guarded.nfev // 2)
    msg = "converged" if converged else (
        f"not converged: last run success={last_ok}, last restart improvement={improved_last:.3g}, "
        f"failures={guarded.failures}/{guarded.nfev}"
    )
    return OptResult(unscale(best), f_best, f_init, guarded.nfev + 1, nit, converged,
                     guarded.failures, msg, history)
