"""Figure rendering for typed-exchange experiment CSVs."""

from .figures import (
    DEFAULT_BUCKET,
    KINDS,
    PlotSpec,
    mink_series,
    phase_series,
    render,
    threshold_series,
)
from .schema import SchemaError, Table, load_csv

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BUCKET",
    "KINDS",
    "PlotSpec",
    "SchemaError",
    "Table",
    "load_csv",
    "mink_series",
    "phase_series",
    "render",
    "threshold_series",
    "__version__",
]
