"""Measured (or synthetic) line traces and their CSV forms."""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..model import config_to_dict, set_param
from ..solver import CSV_HEADER, qubit_spectroscopy_trace, spectrum_trace

REFLECTION = "reflection-magnitude"
PHASE = "phase-shift"
KINDS = (REFLECTION, PHASE)

XY_HEADER = ["x", "y", "sigma"]


def estimate_sigma(x, y, tail_fraction=0.15):
    """
    Noise level from the outer tails of a trace, where the response is flat
    apart from a slow background: residual std after a linear detrend.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = max(4, int(round(tail_fraction * x.size)))
    parts = []
    for sl in (slice(0, n), slice(x.size - n, x.size)):
        xs, ys = x[sl], y[sl]
        if xs.size < 3:
            continue
        coef = np.polyfit(xs, ys, 1)
        parts.append(ys - np.polyval(coef, xs))
    if not parts:
        return float(np.std(y)) or 1.0
    resid = np.concatenate(parts)
    sigma = float(np.std(resid, ddof=2))
    return sigma if sigma > 0 else 1e-12


@dataclass
class MeasuredTrace:
    x: np.ndarray
    y: np.ndarray
    sigma: object = None
    kind: str = REFLECTION
    overrides: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).ravel()
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.x.shape != self.y.shape:
            raise ValueError("x and y lengths differ")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("trace contains non-finite values")
        dx = np.diff(self.x)
        if self.x.size > 1 and not (np.all(dx > 0) or np.all(dx < 0)):
            raise ValueError("trace grid must be strictly monotone")
        if self.sigma is None:
            self.sigma = estimate_sigma(self.x, self.y)
        sig = np.broadcast_to(np.asarray(self.sigma, dtype=float), self.x.shape).copy()
        if np.any(sig <= 0) or not np.all(np.isfinite(sig)):
            raise ValueError("sigma must be positive and finite")
        self.sigma = sig

    def to_csv_text(self):
        buf = io.StringIO()
        buf.write(",".join(XY_HEADER) + "\n")
        for row in zip(self.x, self.y, self.sigma):
            buf.write(",".join(f"{float(v):.12g}" for v in row) + "\n")
        return buf.getvalue()

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv_text())


def read_measured_csv(path, kind=REFLECTION, overrides=None, sigma=None):
    """
    Load a trace from either the spectrum CSV (x = probe frequency,
    y = |S11| or phase) or the plain ``x,y,sigma`` variant.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.array(rows, dtype=float)
    if header == CSV_HEADER:
        col = header.index("abs_s11" if kind == REFLECTION else "phase_rad")
        x, y, sig = arr[:, 0], arr[:, col], sigma
    elif header[:2] == ["x", "y"]:
        x, y = arr[:, 0], arr[:, 1]
        sig = arr[:, 2] if len(header) > 2 and header[2] == "sigma" and sigma is None else sigma
    else:
        raise ValueError(f"{path}: unrecognised trace header {header}")
    return MeasuredTrace(x, y, sig, kind, dict(overrides or {}), {"source": str(path)})


def synthesize_dataset(config, grid, sigma, seed, sweep=None, kind=REFLECTION,
                       scale=1.0, offset=0.0):
    """
    Simulated traces with seeded Gaussian noise.

    Reflection traces get independent noise on Re and Im of S11 before the
    magnitude is taken; phase-shift traces get noise on the phase directly.
    ``sweep`` is ``(path, values)``; each trace records its override.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    grid = np.asarray(grid, dtype=float)
    if sweep is None:
        points = [{}]
    else:
        path, values = sweep
        points = [{path: float(v)} for v in np.atleast_1d(values)]
    truth = config_to_dict(config)
    out = []
    for ov in points:
        cfg = config
        for p, v in ov.items():
            cfg = set_param(cfg, p, v)
        if kind == REFLECTION:
            s11 = spectrum_trace(cfg, grid).s11
            if sigma > 0:
                s11 = s11 + sigma * (rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size))
            y = np.abs(s11)
        elif kind == PHASE:
            y = qubit_spectroscopy_trace(cfg, grid, scale, offset).dphi
            if sigma > 0:
                y = y + sigma * rng.standard_normal(grid.size)
        else:
            raise ValueError(f"unknown kind {kind!r}")
        meta = {"truth": truth, "seed": seed, "sigma": sigma}
        out.append(MeasuredTrace(grid.copy(), y, sigma if sigma > 0 else 1.0, kind, ov, meta))
    return out
