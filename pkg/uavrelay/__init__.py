"""Coverage of UAV relay networks under stochastic geometry"""
from __future__ import annotations

from . import channel, coverage, mcsim, model, quad
from ._version import __version__, version_info
from .coverage import CoverageEngine
from .links import LinkKind, LosState, Propagation, Role
from .mcsim import McEstimate, MonteCarloSimulator
from .model import CoverageQuery, MobilityState, NetworkParams, Quantity, Scheme

__all__ = [
    "channel",
    "coverage",
    "mcsim",
    "model",
    "quad",
    "__version__",
    "version_info",
    "CoverageEngine",
    "CoverageQuery",
    "LinkKind",
    "LosState",
    "McEstimate",
    "MobilityState",
    "MonteCarloSimulator",
    "NetworkParams",
    "Propagation",
    "Quantity",
    "Role",
    "Scheme",
]
