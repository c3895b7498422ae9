"""IETI-DP solver for multi-patch isogeometric Taylor-Hood Stokes problems."""
from ._core import IetiError, basis, info, report, run, solve, thread_count

__all__ = ["IetiError", "basis", "info", "report", "run", "solve", "thread_count"]
