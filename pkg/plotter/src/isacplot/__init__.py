"""Figure rendering for simulator CSV outputs: metric curves over SNR-style
axes and range-Doppler heatmaps. Consumes only the documented CSV schemas;
no in-memory coupling to the simulator."""

from .figures import FigureSpec, plot_curves, plot_rdm
from .io import SchemaError, load_metrics_csv, load_rdm_csv

__all__ = [
    "FigureSpec",
    "plot_curves",
    "plot_rdm",
    "SchemaError",
    "load_metrics_csv",
    "load_rdm_csv",
]

__version__ = "0.1.0"
