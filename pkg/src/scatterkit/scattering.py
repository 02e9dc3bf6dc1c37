"""Boundary values of the resolvent and the fiber scattering matrix.

With ``G`` the map taking a state to its (weighted) site-0 value, the boundary
value ``G (H0 - lam - i0)^{-1} G*`` splits over channels because the flux matrix
commutes with the half-line Laplacian.  Channel ``j`` contributes
``c_j * vhalf P_j vhalf / beta_j^2`` where ``c_j`` is ``+1`` below the channel's
interval, ``i`` inside it and ``-1`` above it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import NonConvergent, SingularAtEnergy, ThresholdEnergy
from .model import (
    ChannelSet,
    DecomposedPotential,
    ModelParams,
    THRESHOLD_RTOL,
    SpectralData,
    eigendata,
    open_channels,
)

#: condition number above which the boundary-value matrix is declared singular
SINGULAR_COND = 1e12

#: geometric ladder used for one-sided threshold limits
LADDER_EPS0 = 1e-2
LADDER_RATIO = 4.0
LADDER_RUNGS = 12
#: |Im s_jj| below this is roundoff and exempt from the monotonicity test
LADDER_IM_FLOOR = 1e-10
#: rungs must stay this many threshold tolerances away from the threshold
LADDER_GUARD = 10.0

Side = Literal["below", "above"]


@dataclass(frozen=True)
class BoundaryValueMatrix:
    lam: float
    m: np.ndarray
    coeffs: np.ndarray


@dataclass(frozen=True)
class FiberMatrix:
    """S(lam) in the channel basis ``xi_j / sqrt(n)``, rows ordered as ``channels.open``."""

    lam: float
    channels: ChannelSet
    s: np.ndarray

    def entry(self, j: int, k: int | None = None) -> complex:
        """Entry for channel labels ``j``, ``k`` (zero-based, not positions)."""
        k = j if k is None else k
        pos = self.channels.open
        return complex(self.s[pos.index(j), pos.index(k)])

    def unitarity_defect(self) -> float:
        m = self.s.shape[0]
        if m == 0:
            return 0.0
        return float(np.max(np.abs(self.s @ self.s.conj().T - np.eye(m))))


def beta_sq(params: ModelParams, j: int, lam: float, spec: SpectralData | None = None) -> float:
    """|(lam - lambda_j)^2 - 4|^{1/2}, computed in factored form to limit cancellation."""
    spec = spec or eigendata(params)
    d = lam - spec.lambdas[j]
    return float(np.sqrt(abs((d - 2.0) * (d + 2.0))))


def _beta_sq_all(spec: SpectralData, lam: float) -> np.ndarray:
    d = lam - spec.lambdas
    return np.sqrt(np.abs((d - 2.0) * (d + 2.0)))


def channel_coefficients(spec: SpectralData, lam: float) -> np.ndarray:
    d = lam - spec.lambdas
    return np.where(d <= -2, 1.0 + 0j, np.where(d >= 2, -1.0 + 0j, 1j))


def boundary_operator(params: ModelParams, lam: float, spec: SpectralData | None = None) -> np.ndarray:
    """``u + G (H0 - lam - i0)^{-1} G*`` as an n x n matrix (the inverse of M)."""
    spec = spec or eigendata(params)
    if np.any(_beta_sq_all(spec, lam) == 0.0):
        raise ThresholdEnergy(f"energy {lam!r} sits on a threshold")
    dec = DecomposedPotential.from_params(params)
    weights = channel_coefficients(spec, lam) / _beta_sq_all(spec, lam)
    vpv = dec.vhalf @ np.tensordot(weights, spec.projs, axes=1) @ dec.vhalf
    return dec.u + vpv


def m_matrix(params: ModelParams, lam: float, spec: SpectralData | None = None) -> BoundaryValueMatrix:
    spec = spec or eigendata(params)
    open_channels(params, lam, spec)  # raises on thresholds
    d = boundary_operator(params, lam, spec)
    sv = np.linalg.svd(d, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > SINGULAR_COND:
        raise SingularAtEnergy(f"boundary-value matrix singular at lam={lam!r}")
    return BoundaryValueMatrix(lam=float(lam), m=np.linalg.inv(d), coeffs=channel_coefficients(spec, lam))


def s_fiber(params: ModelParams, lam: float, spec: SpectralData | None = None) -> FiberMatrix:
    spec = spec or eigendata(params)
    channels = open_channels(params, lam, spec)
    idx = list(channels.open)
    if not idx:
        return FiberMatrix(float(lam), channels, np.zeros((0, 0), dtype=complex))
    dec = DecomposedPotential.from_params(params)
    x = dec.vhalf @ m_matrix(params, lam, spec).m @ dec.vhalf
    e = spec.xis[idx] / np.sqrt(spec.n)
    beta = np.sqrt(_beta_sq_all(spec, lam)[idx])
    core = e.conj() @ x @ e.T
    s = np.eye(len(idx)) - 2j * core / np.outer(beta, beta)
    return FiberMatrix(float(lam), channels, s)


def det_s(params: ModelParams, lam: float, spec: SpectralData | None = None) -> complex:
    s = s_fiber(params, lam, spec).s
    return complex(np.linalg.det(s)) if s.size else 1.0 + 0j


def ladder(eps0: float = LADDER_EPS0, ratio: float = LADDER_RATIO, rungs: int = LADDER_RUNGS) -> np.ndarray:
    return eps0 * ratio ** -np.arange(rungs + 1, dtype=float)


def _ladder_eps0(spec: SpectralData, tau: float, side: Side) -> float:
    # keep the whole ladder inside the interval adjacent to tau
    thr = spec.thresholds
    if side == "above":
        nxt = thr[thr > tau + 1e-14]
        gap = nxt[0] - tau if nxt.size else np.inf
    else:
        prv = thr[thr < tau - 1e-14]
        gap = tau - prv[-1] if prv.size else np.inf
    return min(LADDER_EPS0, 0.25 * gap)


def threshold_ladder(
    params: ModelParams, tau: float, side: Side, j: int, spec: SpectralData | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Values of s_jj at ``tau +- eps_k`` along the geometric ladder; returns ``(eps, values)``.

    When two thresholds nearly coincide the ladder is scaled into the gap and its
    deepest rungs can fall within the threshold tolerance; those rungs are dropped.
    """
    spec = spec or eigendata(params)
    sign = 1.0 if side == "above" else -1.0
    eps = ladder(_ladder_eps0(spec, tau, side))
    eps = eps[eps > LADDER_GUARD * THRESHOLD_RTOL * max(1.0, abs(tau))]
    if len(eps) < 3:
        raise NonConvergent(f"threshold {tau!r} too close to its neighbour for a three-rung ladder")
    vals = np.array([s_fiber(params, tau + sign * e, spec).entry(j) for e in eps])
    return eps, vals


def threshold_limit(
    params: ModelParams, tau: float, side: Side, j: int, spec: SpectralData | None = None
) -> int:
    """One-sided limit of s_jj at threshold ``tau``, classified as +1 or -1.

    Raises NonConvergent when the sign of Re s_jj is not stable over the last
    three rungs or when |Im s_jj| increases over them (beyond roundoff).
    """
    _, vals = threshold_ladder(params, tau, side, j, spec)
    tail = vals[-3:]
    signs = np.sign(tail.real)
    if np.any(signs == 0) or np.any(signs != signs[-1]):
        raise NonConvergent(f"sign of Re s_jj unstable near threshold {tau!r}: {tail}")
    im = np.abs(tail.imag)
    if not (im[2] <= im[1] + LADDER_IM_FLOOR and im[1] <= im[0] + LADDER_IM_FLOOR):
        raise NonConvergent(f"|Im s_jj| not decreasing near threshold {tau!r}: {tail}")
    return int(signs[-1])
