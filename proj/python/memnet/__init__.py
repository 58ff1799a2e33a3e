"""Long-memory network time series models (FIGNAR / GNARFI)."""

from ._core import (
    Error,
    FitResult,
    Graph,
    Model,
    ModelSpec,
    NumericalError,
    Params,
    ValidationError,
    builtin_graph,
    fiwn_acv,
    frac_coeffs,
    fully_connected,
    ingest_series,
    mspe,
    mst_from_coords,
    preset,
    read_graph,
    reproduce,
    select,
    table_ids,
)

__all__ = [
    "Error",
    "FitResult",
    "Graph",
    "Model",
    "ModelSpec",
    "NumericalError",
    "Params",
    "ValidationError",
    "builtin_graph",
    "fiwn_acv",
    "frac_coeffs",
    "fully_connected",
    "ingest_series",
    "mspe",
    "mst_from_coords",
    "preset",
    "read_graph",
    "reproduce",
    "select",
    "table_ids",
]
