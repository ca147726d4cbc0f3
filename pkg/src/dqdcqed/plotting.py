"""Deterministic SVG figures (matplotlib, Agg backend)."""
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "svg.hashsalt": "dqdcqed",
    "svg.fonttype": "none",
    "path.simplify": False,
    "font.family": "DejaVu Sans",
    "axes.grid": True,
    "grid.alpha": 0.3,
}

YLABELS = {
    "abs_s11": "|S11|",
    "phase_rad": "arg S11 (rad)",
    "re_s11": "Re S11",
    "im_s11": "Im S11",
    "n_flux": "<a+a>",
    "dphi": "phase shift (rad)",
}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def plot_traces(traces, path, column="abs_s11", labels=None, annotate_minima=0, title=None):
    """
    Line plot of one or more traces.  ``traces`` holds (x, y) pairs.  With
    ``annotate_minima`` = n, the n dips of the first trace found by a
    Lorentzian fit are marked and labelled with their centres.
    """
    from .fitting.peaks import lorentzian_peaks

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for i, (x, y) in enumerate(traces):
            label = labels[i] if labels else None
            ax.plot(x, y, lw=1.2, label=label)
        if annotate_minima:
            x, y = traces[0]
            peaks = lorentzian_peaks(x, y, annotate_minima, sign=-1)
            for j, pk in enumerate(peaks):
                yc = float(np.interp(pk.center, x if x[0] < x[-1] else x[::-1], y if x[0] < x[-1] else y[::-1]))
                ax.plot([pk.center], [yc], "v", color="C3")
                ax.annotate(f"{pk.center:.1f} MHz", (pk.center, yc), textcoords="offset points",
                            xytext=(0, -14), ha="center", fontsize=8, color="C3")
        all_x = np.concatenate([np.asarray(x, dtype=float) for x, _ in traces])
        all_y = np.concatenate([np.asarray(y, dtype=float) for _, y in traces])
        ax.set_xlim(all_x.min(), all_x.max())
        pad = 0.05 * (all_y.max() - all_y.min() or 1.0)
        ax.set_ylim(all_y.min() - 2 * pad, all_y.max() + pad)
        ax.set_xlabel("probe frequency (MHz)")
        ax.set_ylabel(YLABELS.get(column, column))
        if title:
            ax.set_title(title)
        if labels:
            ax.legend(fontsize=8)
        fig.tight_layout()
        return _save(fig, path)


def plot_sweep_map(values, grid, data, path, sweep_label="swept parameter", column="abs_s11"):
    """Colour map of a sweep: rows are sweep values, columns probe frequencies."""
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        mesh = ax.pcolormesh(values, grid, np.asarray(data).T, shading="nearest", cmap="viridis",
                             rasterized=False)
        fig.colorbar(mesh, ax=ax, label=YLABELS.get(column, column))
        ax.set_xlabel(f"{sweep_label} (MHz)")
        ax.set_ylabel("probe frequency (MHz)")
        ax.grid(False)
        fig.tight_layout()
        return _save(fig, path)


def plot_exchange_scaling(points, A, path, title=None):
    """2J against Delta_r with the fitted A / Delta_r curve."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    d = pts[:, 0]
    lo, hi = d.min(), d.max()
    span = hi - lo or abs(hi) or 1.0
    xs = np.linspace(lo - 0.05 * span, hi + 0.05 * span, 200)
    xs = xs[xs != 0]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.6, 4.0))
        ax.plot(d, pts[:, 1], "o", label="2J")
        ax.plot(xs, A / xs, "-", label=f"A/Delta_r, A = {A:.4g} MHz^2")
        ax.set_xlabel("Delta_r (MHz)")
        ax.set_ylabel("2J (MHz)")
        if title:
            ax.set_title(title)
        ax.legend(fontsize=8)
        fig.tight_layout()
        return _save(fig, path)
