"""Figure rendering for CLI reports. Figures go to PNG next to the CSV."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
}


def _figsize(scale=1.0):
    width = 5.0 * scale
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    return width, width * golden


def _save(fig, path):
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def rate_surface(path, x, y, rate, optimum, xlabel, ylabel, title):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_figsize())
        sc = ax.scatter(x, y, c=rate, s=6, cmap="viridis", marker="s", linewidths=0)
        fig.colorbar(sc, ax=ax, label="rate [bits/block]")
        ax.plot(*optimum, marker="*", color="red", markersize=12, linestyle="none", label="optimum")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.legend(loc="upper right")
        _save(fig, path)


def sweep_time(path, T, series: dict):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_figsize())
        for label, values in series.items():
            ax.plot(T, values, marker="o", markersize=3, label=label)
        ax.set_xlabel("operation time T [s]")
        ax.set_ylabel("optimal rate [bits]")
        ax.legend()
        _save(fig, path)


def outage_curves(path, x, curves: dict, xlabel, logx=False):
    """``curves`` maps m to ``(quadrature, monte_carlo)`` arrays."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_figsize())
        for m, (quad, mc) in curves.items():
            line, = ax.plot(x, quad, label=f"m={m:g}")
            if mc is not None:
                ax.plot(x, mc, linestyle="none", marker="o", markersize=3,
                        markerfacecolor="none", color=line.get_color())
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("outage probability")
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
        _save(fig, path)


def required_power(path, d, curves: dict):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_figsize())
        for m, pt_dbm in curves.items():
            ax.plot(d, pt_dbm, label=f"m={m:g}")
        ax.set_xscale("log")
        ax.set_xlabel("distance d [m]")
        ax.set_ylabel("minimum transmit power [dBm]")
        ax.legend()
        _save(fig, path)


def channel_bank(path, freqs_hz, powers_dbm, lambda_h_dbm, lambda_b_dbm):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_figsize())
        f_mhz = np.asarray(freqs_hz) / 1e6
        p = np.asarray(powers_dbm, dtype=float)
        finite = np.isfinite(p)
        ax.vlines(f_mhz[finite], np.nanmin(p[finite]) - 10 if finite.any() else -100,
                  p[finite], color="0.4")
        ax.plot(f_mhz[finite], p[finite], "o", markersize=3, color="0.2")
        for level, label, style in ((lambda_h_dbm, "harvest threshold", "--"),
                                    (lambda_b_dbm, "backscatter threshold", ":")):
            if np.isfinite(level):
                ax.axhline(level, linestyle=style, color="tab:red", label=label)
        ax.set_xlabel("frequency [MHz]")
        ax.set_ylabel("detected power [dBm]")
        ax.legend()
        _save(fig, path)
