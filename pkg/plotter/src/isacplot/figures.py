"""Figure construction from simulator CSVs.

Both entry points return the exact series/grid data they draw, so tests
assert on values instead of pixels. Images are written with the Agg
backend; inputs are never modified.
"""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import load_metrics_csv, load_rdm_csv, require_columns

SPEED_OF_LIGHT = 3.0e8

# desk-scale defaults: 512 subcarriers at 15 kHz, 23.6 GHz carrier,
# round-trip speed conversion
DESK_SAMPLE_PERIOD = 1.0 / (512 * 15e3)
DESK_SPEED_PER_HZ = SPEED_OF_LIGHT / (2 * 23.6e9)

LOG_PREFIXES = ("ber", "nmse", "sigma")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw and where to write it.

    ``inputs`` is one or more CSV paths; for curves each file contributes
    the ``y_columns`` it actually has, split into one series per
    (method, mode) pair when those columns exist. ``log_y`` None infers
    the scale from the metric name (BER/NMSE/sigma are semilog).
    """

    inputs: tuple
    output_image: str
    kind: str = "curve"  # curve | heatmap
    x_column: str = "snr_db"
    y_columns: tuple = ("range_rmse_m",)
    log_y: bool | None = None
    sample_period: float = DESK_SAMPLE_PERIOD
    speed_per_hz: float = DESK_SPEED_PER_HZ
    title: str = ""

    def __post_init__(self):
        if self.kind not in ("curve", "heatmap"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("need at least one input CSV")


def _stem(path):
    name = str(path).rsplit("/", 1)[-1]
    return name[:-4] if name.endswith(".csv") else name


def plot_curves(spec: FigureSpec):
    """Metric-versus-x curves; returns {label: (x, y)} of the drawn series."""
    series = {}
    any_log = False
    for path in spec.inputs:
        cols = load_metrics_csv(path)
        require_columns(cols, [spec.x_column], path)
        present = [y for y in spec.y_columns if y in cols]
        if not present:
            require_columns(cols, spec.y_columns[:1], path)
        x = np.asarray(cols[spec.x_column], dtype=float)
        group_cols = [c for c in ("method", "mode") if c in cols]
        if group_cols:
            keys = list(zip(*(cols[c] for c in group_cols)))
        else:
            keys = [("",)] * len(x)
        for y_name in present:
            y = np.asarray(cols[y_name], dtype=float)
            for key in sorted(set(keys)):
                sel = np.array([k == key for k in keys])
                label = ":".join(filter(None, [_stem(path), y_name, "/".join(filter(None, key))]))
                order = np.argsort(x[sel], kind="stable")
                series[label] = (x[sel][order], y[sel][order])
            if y_name.startswith(LOG_PREFIXES):
                any_log = True

    log_y = spec.log_y if spec.log_y is not None else any_log
    fig, ax = plt.subplots(figsize=(7, 5))
    for label, (x, y) in series.items():
        ax.plot(x, y, marker="o", label=label)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_column)
    ax.set_ylabel(", ".join(spec.y_columns))
    ax.grid(True, which="both", alpha=0.4)
    if series:
        ax.legend(fontsize=7)
    if spec.title:
        ax.set_title(spec.title)
    fig.savefig(spec.output_image, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return series


def plot_rdm(spec: FigureSpec):
    """dB heatmap over (range m, speed m/s); returns the drawn arrays.

    Doppler columns are rotated so speed ascends; the returned dict holds
    the axes and both the raw magnitudes and the dB image actually drawn.
    """
    (path,) = spec.inputs
    delay, doppler, mags = load_rdm_csv(path)
    order = np.argsort(doppler, kind="stable")
    doppler = doppler[order]
    mags = mags[:, order]
    range_axis = delay * spec.sample_period * SPEED_OF_LIGHT / 2.0
    speed_axis = doppler * spec.speed_per_hz
    peak = mags.max()
    floor = peak if peak > 0 else 1.0
    img_db = 20.0 * np.log10(np.maximum(mags, floor * 1e-8) / floor)

    fig, ax = plt.subplots(figsize=(7, 5))
    mesh = ax.pcolormesh(speed_axis, range_axis, img_db, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="relative magnitude (dB)")
    ax.set_xlabel("speed (m/s)")
    ax.set_ylabel("range (m)")
    if spec.title:
        ax.set_title(spec.title)
    fig.savefig(spec.output_image, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return {
        "range_m": range_axis,
        "speed_mps": speed_axis,
        "magnitudes": mags,
        "image_db": img_db,
    }
