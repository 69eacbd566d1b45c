"""Python bindings for the sramlab SRAM stability laboratory."""

from ._core import (
    AnalysisError,
    ConvergenceError,
    HarnessError,
    InvalidGeometry,
    NetlistParseError,
    SramlabError,
    butterfly,
    cell_netlist,
    drain_current,
    leakage,
    monte_carlo,
    ncurve,
    ncurve_metrics,
    normalize_netlist,
    operating_point,
    run_cli,
    snm,
    sweep,
)

__all__ = [
    "AnalysisError",
    "ConvergenceError",
    "HarnessError",
    "InvalidGeometry",
    "NetlistParseError",
    "SramlabError",
    "butterfly",
    "cell_netlist",
    "drain_current",
    "leakage",
    "monte_carlo",
    "ncurve",
    "ncurve_metrics",
    "normalize_netlist",
    "operating_point",
    "run_cli",
    "snm",
    "sweep",
]
