"""Matplotlib figures over parsed run artifacts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .artifacts import ConvergenceStudy, FunctionalTable, RunConfig, SnapshotMeta


@dataclass(frozen=True)
class ExponentialFit:
    """Least-squares fit of log y against t over a time window."""

    rate: float
    amplitude: float
    r_squared: float
    window: tuple[float, float]

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        return self.amplitude * np.exp(-self.rate * np.asarray(t))


def fit_exponential(t: np.ndarray, y: np.ndarray,
                    window: tuple[float, float]) -> ExponentialFit:
    """Fit y ~ A exp(-rate t) on the window; requires positive samples."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ValueError(f"empty fit window ({lo}, {hi})")
    mask = (t >= lo) & (t <= hi) & (y > 0.0)
    if int(mask.sum()) < 3:
        raise ValueError(f"fewer than 3 positive samples in window "
                         f"({lo:g}, {hi:g})")
    tm, log_y = t[mask], np.log(y[mask])
    slope, intercept = np.polyfit(tm, log_y, 1)
    residual = log_y - (slope * tm + intercept)
    ss_res = float((residual * residual).sum())
    centered = log_y - log_y.mean()
    ss_tot = float((centered * centered).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentialFit(rate=-float(slope), amplitude=float(np.exp(intercept)),
                          r_squared=r_squared, window=(lo, hi))


DECAY_SERIES = ("wz_mass", "linf_w", "linf_z", "linf_v")


def plot_decay(table: FunctionalTable, config: RunConfig,
               out_path: str | None = None,
               fit_window: tuple[float, float] | None = None):
    """Semilog decay figure: infection mass and sup norms against time,
    the proven envelope (dashed) when beta < 1, and a least-squares
    exponential fit of the w+z mass over the window (default: final half).

    Returns (figure, fit); fit is None when the mass has no positive
    samples in the window (a run that starts and stays at zero).
    """
    import matplotlib.pyplot as plt

    t = table.t
    if fit_window is None:
        fit_window = (float(t[0] + 0.5 * (t[-1] - t[0])), float(t[-1]))

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    labels = {"wz_mass": "w+z mass", "linf_w": "sup |w|",
              "linf_z": "sup |z|", "linf_v": "sup |v|"}
    for name in DECAY_SERIES:
        if name in table:
            ax.semilogy(t, table[name], label=labels[name], linewidth=1.2)

    wz = table["wz_mass"]
    if config.beta < 1.0 and wz[0] > 0.0:
        envelope = wz[0] * np.exp(-(1.0 - config.beta) * (t - t[0]))
        ax.semilogy(t, envelope, "k--", linewidth=1.0,
                    label=f"envelope rate {1.0 - config.beta:g}")
    elif config.beta >= 1.0:
        ax.text(0.02, 0.05, f"beta = {config.beta:g} >= 1: no decay guarantee",
                transform=ax.transAxes, fontsize=9, style="italic")

    fit = None
    try:
        fit = fit_exponential(t, wz, fit_window)
    except ValueError:
        pass
    if fit is not None:
        tw = np.linspace(fit.window[0], fit.window[1], 50)
        ax.semilogy(tw, fit.evaluate(tw), "r:", linewidth=1.6,
                    label=f"fit rate {fit.rate:.4f} (R^2 {fit.r_squared:.4f})")

    ax.set_xlabel("t")
    ax.set_ylabel("mass / sup norm")
    ax.set_title(f"infection decay (mu={config.mu:g}, beta={config.beta:g})")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    if out_path is not None:
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    return fig, fit


def plot_heatmap(meta: SnapshotMeta, values: np.ndarray,
                 out_path: str | None = None):
    """Filled heatmap of one snapshot with its physical extent and range."""
    import matplotlib.pyplot as plt

    lx, ly = meta.nx * meta.hx, meta.ny * meta.hy
    vmin, vmax = float(values.min()), float(values.max())
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    image = ax.imshow(values, origin="lower", extent=(0.0, lx, 0.0, ly),
                      aspect="equal", cmap="viridis")
    fig.colorbar(image, ax=ax, shrink=0.85)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"{meta.field} at t={meta.t:g}   "
                 f"range [{vmin:.6g}, {vmax:.6g}]")
    if out_path is not None:
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    return fig


def plot_convergence(study: ConvergenceStudy, out_path: str | None = None):
    """Log-log spatial error against mesh width with the fitted order line."""
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    if study.err_l2_u.max() > 0.0:
        ax.loglog(study.hx, study.err_l2_u, "o-", label="|u - u_ref|_L2")
    else:
        # errors at the floor: nothing positive to log-scale
        ax.plot(study.hx, study.err_l2_u, "o-", label="|u - u_ref|_L2")
        ax.set_xscale("log")
    if study.observed_order is not None and study.err_l2_u[0] > 0.0:
        guide = study.err_l2_u[0] * (study.hx / study.hx[0]) ** study.observed_order
        ax.loglog(study.hx, guide, "k--", linewidth=1.0,
                  label=f"slope {study.observed_order:.2f}")
        title = f"self-convergence, observed order {study.observed_order:.3f}"
    else:
        title = f"self-convergence ({study.note or 'order not available'})"
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    if out_path is not None:
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    return fig
