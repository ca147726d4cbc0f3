"""Multi-Lorentzian peak/dip extraction from line traces."""
from typing import NamedTuple

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks, peak_widths

from ..errors import UnderdeterminedInitializationError


class Peak(NamedTuple):
    center: float
    width: float
    amplitude: float
    center_err: float
    width_err: float
    amplitude_err: float


def multi_lorentzian(x, baseline, *params):
    """baseline + sum_j A_j (w_j/2)^2 / ((x - c_j)^2 + (w_j/2)^2); params = (c, w, A) * n."""
    y = np.full_like(np.asarray(x, dtype=float), baseline)
    for c, w, a in zip(params[0::3], params[1::3], params[2::3]):
        hw2 = (0.5 * w) ** 2
        y = y + a * hw2 / ((x - c) ** 2 + hw2)
    return y


def _orientation(y):
    med = np.median(y)
    return -1.0 if med - y.min() >= y.max() - med else 1.0


def initial_peaks(x, y, n_peaks, sign):
    """The n most prominent extrema (dips for sign < 0), ties toward lower x."""
    s = sign * (y - np.median(y))
    span = float(np.ptp(y))
    if span == 0:
        return []
    idx, props = find_peaks(s, prominence=1e-3 * span)
    if idx.size == 0:
        return []
    order = sorted(range(idx.size), key=lambda j: (-props["prominences"][j], x[idx[j]]))
    chosen = sorted(idx[j] for j in order[:n_peaks])
    widths = peak_widths(s, chosen, rel_height=0.5)[0]
    dx = np.abs(np.diff(x)).mean() if x.size > 1 else 1.0
    return [(x[i], max(w * dx, 2 * dx), y[i] - np.median(y)) for i, w in zip(chosen, widths)]


def lorentzian_peaks(x, y, n_peaks, sigma=None, initial_centers=None, sign=None):
    """
    Fit a constant baseline plus ``n_peaks`` Lorentzians.

    Returns Peaks sorted by centre.  ``sign`` is -1 for dips, +1 for peaks;
    by default it is inferred from which side of the median the trace
    extends further.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if n_peaks < 1:
        raise ValueError("n_peaks must be >= 1")
    if x.size > 1 and x[0] > x[-1]:
        x, y = x[::-1], y[::-1]
        if sigma is not None and np.ndim(sigma):
            sigma = np.asarray(sigma)[::-1]
    if sign is None:
        sign = _orientation(y)
    if initial_centers is not None:
        if len(initial_centers) != n_peaks:
            raise ValueError("need one initial centre per peak")
        dx = np.abs(np.diff(x)).mean()
        base = np.median(y)
        init = []
        for c in initial_centers:
            i = int(np.argmin(np.abs(x - c)))
            init.append((float(c), 10 * dx, y[i] - base))
    else:
        init = initial_peaks(x, y, n_peaks, sign)
        if len(init) < n_peaks:
            raise UnderdeterminedInitializationError(
                f"found {len(init)} local extrema but {n_peaks} peaks were requested"
            )
    p0 = [float(np.median(y))]
    lo = [-np.inf]
    hi = [np.inf]
    span = x[-1] - x[0]
    for c, w, a in init:
        p0 += [c, w, a]
        lo += [x[0] - 0.1 * span, 0.0, -np.inf if sign < 0 else 0.0]
        hi += [x[-1] + 0.1 * span, 2 * span, 0.0 if sign < 0 else np.inf]
    p0 = np.clip(p0, lo, hi)
    popt, pcov = curve_fit(
        multi_lorentzian, x, y, p0=p0, sigma=sigma, bounds=(lo, hi), maxfev=20000
    )
    err = np.sqrt(np.clip(np.diag(pcov), 0, None)) if np.all(np.isfinite(pcov)) else np.full(popt.size, np.inf)
    peaks = [
        Peak(popt[i], popt[i + 1], popt[i + 2], err[i], err[i + 1], err[i + 2])
        for i in range(1, popt.size, 3)
    ]
    return sorted(peaks, key=lambda p: p.center)


def count_minima(y, prominence):
    """Number of local minima of ``y`` with at least the given prominence."""
    idx, _ = find_peaks(-np.asarray(y, dtype=float), prominence=prominence)
    return int(idx.size)


def minima_positions(x, y, prominence=0.0):
    idx, _ = find_peaks(-np.asarray(y, dtype=float), prominence=prominence)
    return np.asarray(x)[idx]
