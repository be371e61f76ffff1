"""Figure generation for causaldesign benchmark summaries."""

from .figures import (PlotJob, SchemaError, STRATEGY_COLORS,
                      plot_ratio_curves, plot_timings)

__all__ = ["PlotJob", "SchemaError", "STRATEGY_COLORS",
           "plot_ratio_curves", "plot_timings"]
__version__ = "0.1.0"
