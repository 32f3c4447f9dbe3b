from .render import METRICS, FigureRequest, render_metric_figure, save_figure

__all__ = ["METRICS", "FigureRequest", "render_metric_figure", "save_figure"]
__version__ = "0.1.0"
