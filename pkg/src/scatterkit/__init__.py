"""Scattering theory for a magnetic half-cylinder lattice with a site-0 potential.

Fiber scattering matrices, discrete eigenvalues, threshold behaviour and the
winding identity relating them, plus closed forms for two channels.
"""
from .bound_states import (
    EigenvalueList,
    embedded_eigenvalue_scan,
    find_discrete_eigenvalues,
    truncation_oracle,
)
from .errors import *  # noqa: F401,F403
from .levinson import LevinsonReport, WindingReport, classify_thresholds, interval_variation, levinson_check
from .model import ModelParams, eigendata, open_channels, thresholds
from .scattering import det_s, m_matrix, s_fiber, threshold_limit

__all__ = [
    "EigenvalueList",
    "LevinsonReport",
    "ModelParams",
    "WindingReport",
    "classify_thresholds",
    "det_s",
    "eigendata",
    "embedded_eigenvalue_scan",
    "find_discrete_eigenvalues",
    "interval_variation",
    "levinson_check",
    "m_matrix",
    "open_channels",
    "s_fiber",
    "threshold_limit",
    "thresholds",
    "truncation_oracle",
]
