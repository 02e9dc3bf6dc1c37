"""Discrete eigenvalues: analytic kernel criterion and a truncated-lattice oracle.

An energy ``lam`` off the thresholds is an eigenvalue iff the Hermitian matrix

    K(lam) = u + sum_{lam < lambda_j - 2} vPv_j / beta_j^2 - sum_{lam > lambda_j + 2} vPv_j / beta_j^2

has a kernel vector ``x`` with ``P_j vhalf x = 0`` for every channel open at ``lam``.
Outside the band no channel is open and the condition reduces to ``det K = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BracketAtBoundary, InsideBand, Unstable
from .model import (
    DecomposedPotential,
    ModelParams,
    SpectralData,
    at_threshold,
    build_a_theta,
    eigendata,
)

KAPPA_MAX = 6.0
KAPPA_GRID = 2000
ROOT_XTOL = 1e-12
KERNEL_RTOL = 1e-8


@dataclass(frozen=True)
class EigenvalueList:
    values: tuple[float, ...]
    multiplicities: tuple[int, ...]

    @property
    def total(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def below(self) -> int:
        return len([x for x in self.values if x < 0])


def kernel_matrix(params: ModelParams, lam: float, spec: SpectralData | None = None) -> np.ndarray:
    """K(lam): closed channels only, open ones are dropped."""
    spec = spec or eigendata(params)
    dec = DecomposedPotential.from_params(params)
    d = lam - spec.lambdas
    b2 = np.sqrt(np.abs((d - 2.0) * (d + 2.0)))
    w = np.zeros(spec.n)
    below, above = d < -2, d > 2
    w[below] = 1.0 / b2[below]
    w[above] = -1.0 / b2[above]
    return dec.u + dec.vhalf @ np.tensordot(w, spec.projs, axes=1) @ dec.vhalf


def eigen_condition_value(params: ModelParams, lam: float, spec: SpectralData | None = None) -> float:
    spec = spec or eigendata(params)
    lo, hi = spec.band
    if lo <= lam <= hi:
        raise InsideBand(f"energy {lam!r} lies in the band [{lo}, {hi}]")
    return float(np.linalg.det(kernel_matrix(params, lam, spec)).real)


def _kernel_dim(k: np.ndarray) -> int:
    sv = np.linalg.svd(k, compute_uv=False)
    return int(np.sum(sv < KERNEL_RTOL * sv[0]))


def _roots_one_side(params, spec, side, kappa_max, n_grid):
    edge = spec.band[0] if side < 0 else spec.band[1]
    # eigenvalues obey |lam| <= ||H0|| + ||V|| <= 4 + max|v|
    if abs(edge) + kappa_max**2 < 4.0 + np.max(np.abs(params.varr)):
        raise BracketAtBoundary(f"kappa_max={kappa_max} does not cover the norm bound")

    def lam_of(kappa):
        return edge + side * kappa**2

    def f(kappa):
        return eigen_condition_value(params, lam_of(kappa), spec)

    kap = np.linspace(kappa_max / n_grid, kappa_max, n_grid)
    vals = np.array([f(k) for k in kap])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        if i == n_grid - 2:
            raise BracketAtBoundary("sign change touches kappa_max; increase kappa_max")
        if vals[i + 1] == 0.0:
            continue  # picked up by the next cell
        kr = kap[i] if vals[i] == 0.0 else brentq(f, kap[i], kap[i + 1], xtol=ROOT_XTOL)
        lam = lam_of(kr)
        roots.append((lam, max(1, _kernel_dim(kernel_matrix(params, lam, spec)))))
    return roots


def find_discrete_eigenvalues(
    params: ModelParams, kappa_max: float = KAPPA_MAX, n_grid: int = KAPPA_GRID
) -> EigenvalueList:
    """Eigenvalues outside the band, located by bracketing det K in ``kappa`` with
    ``lam = edge -+ kappa^2`` and refining each sign change."""
    spec = eigendata(params)
    roots = _roots_one_side(params, spec, -1, kappa_max, n_grid)
    roots += _roots_one_side(params, spec, +1, kappa_max, n_grid)
    roots.sort()
    return EigenvalueList(tuple(r[0] for r in roots), tuple(r[1] for r in roots))


def _embedded_system(params, spec, dec, lam):
    d = lam - spec.lambdas
    rows = [kernel_matrix(params, lam, spec)]
    rows += [spec.projs[j] @ dec.vhalf for j in np.nonzero(np.abs(d) < 2)[0]]
    return np.vstack(rows)


def _embedded_sigma(params, spec, dec, lam):
    sys = _embedded_system(params, spec, dec, lam)
    sv = np.linalg.svd(sys, compute_uv=False)
    return sv[-1] / sv[0]


def embedded_eigenvalue_scan(
    params: ModelParams, grid_step: float | None = None, tol: float = KERNEL_RTOL
) -> list[float]:
    """Search the band for energies where the full kernel criterion holds.

    The smallest relative singular value of the stacked system
    ``[K(lam); P_j vhalf (j open)]`` is sampled on a grid; each local minimum is
    refined inside its continuity interval and reported when it drops below ``tol``.
    This is a detector, not a proof of absence.
    """
    spec = eigendata(params)
    dec = DecomposedPotential.from_params(params)
    thr = spec.thresholds
    width = spec.band[1] - spec.band[0]
    step = grid_step or 1e-3 * width
    found = []
    for lo, hi in zip(thr[:-1], thr[1:]):
        pad = 1e-9 * (hi - lo)
        num = max(int(np.ceil((hi - lo) / step)) + 1, 5)
        grid = np.linspace(lo + pad, hi - pad, num)
        sig = np.array([_embedded_sigma(params, spec, dec, x) for x in grid])
        for i in range(len(grid)):
            left = sig[i - 1] if i > 0 else np.inf
            right = sig[i + 1] if i + 1 < len(grid) else np.inf
            if not (sig[i] <= left and sig[i] <= right):
                continue
            a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
            fun = partial(_embedded_sigma, params, spec, dec)
            if 0 < i < len(grid) - 1 and sig[i] < min(left, right):
                # sigma is V-shaped at a kernel point; golden search resolves x to
                # 1e-14 relative, bounded Brent stops near sqrt(eps)
                res = minimize_scalar(fun, bracket=(a, grid[i], b), method="golden", options={"xtol": 1e-14})
            else:
                res = minimize_scalar(fun, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
            best = min(res.fun, sig[i])
            lam = res.x if res.fun <= sig[i] else grid[i]
            if best < tol and not at_threshold(lam, thr):
                found.append(float(lam))
    return [float(x) for x in sorted(set(np.round(found, 10)))]


def _lattice_inertia(params: ModelParams, L: int, xs: np.ndarray) -> np.ndarray:
    """Number of eigenvalues of the cut-off lattice Hamiltonian below each ``x`` in ``xs``.

    In the eigenbasis of the flux matrix (obtained numerically) the lattice is
    ``n`` chains glued at site 0, so block LDL elimination from the far ends
    inward counts negative pivots (Sylvester inertia) in O(n L) work.
    """
    ev, vecs = np.linalg.eigh(build_a_theta(params))
    w = vecs.conj().T @ np.diag(params.varr) @ vecs
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    shift = ev[None, :] - xs[:, None]
    d = shift.copy()
    neg = np.zeros(shift.shape, dtype=int)
    # a zero pivot becomes -inf and the next pivot is then exactly ``shift``
    with np.errstate(divide="ignore"):
        for _ in range(L - 1):  # sites L .. 2
            neg += d < 0
            d = shift - 1.0 / d
        neg += d < 0  # site 1
        edge = 2.0 / d
    neg = neg.sum(axis=1)
    root = w[None, :, :] + np.einsum("xj,jk->xjk", shift - edge, np.eye(params.n))
    neg += np.sum(np.linalg.eigvalsh(root) < 0, axis=1)
    return neg


def _bisect_eigs(params, L, lo, hi, n_below_lo, count, tol=1e-9):
    """Eigenvalues in (lo, hi) given their number ``count``, by bisection on inertia."""
    if count == 0:
        return np.array([])
    # k-th eigenvalue in the window: smallest x with inertia(x) >= n_below_lo + k + 1
    target = n_below_lo + np.arange(1, count + 1)
    a = np.full(count, lo)
    b = np.full(count, hi)
    while np.max(b - a) > tol:
        mid = 0.5 * (a + b)
        c = _lattice_inertia(params, L, mid)
        up = c >= target
        b = np.where(up, mid, b)
        a = np.where(up, a, mid)
    return 0.5 * (a + b)


def _outside_band_eigs(params: ModelParams, L: int, delta: float) -> np.ndarray:
    spec = eigendata(params)
    reach = 4.0 + float(np.max(np.abs(params.varr))) + 1.0
    lo, hi = spec.band
    dim = (L + 1) * params.n
    c_reach_lo, c_lo, c_hi, c_reach_hi = _lattice_inertia(
        params, L, np.array([-reach, lo - delta, hi + delta, reach])
    )
    if c_reach_lo != 0 or c_reach_hi != dim:
        raise Unstable("spectrum exceeds the norm bound; inertia count is unreliable")
    below = _bisect_eigs(params, L, -reach, lo - delta, 0, int(c_lo))
    above = _bisect_eigs(params, L, hi + delta, reach, int(c_hi), int(dim - c_hi))
    return np.concatenate([below, above])


def truncation_oracle(params: ModelParams, L: int = 4000, delta: float = 1e-3) -> int:
    """Brute-force count of eigenvalues at distance > ``delta`` outside the band.

    The lattice is cut at site L and again at 2L; the count is returned only if
    both agree and every eigenvalue drifts by less than ``delta / 10``.
    """
    if L < 100:
        raise ValueError("cutoff L must be >= 100")
    if delta <= 0:
        raise ValueError("delta must be positive")
    e1 = _outside_band_eigs(params, L, delta)
    e2 = _outside_band_eigs(params, 2 * L, delta)
    if len(e1) != len(e2):
        raise Unstable(f"count changes from {len(e1)} (L={L}) to {len(e2)} (L={2 * L})")
    if len(e1) and np.max(np.abs(e1 - e2)) >= delta / 10:
        raise Unstable(f"eigenvalues drift by {np.max(np.abs(e1 - e2)):.3g} under L -> 2L")
    return len(e1)


def oracle_window(params: ModelParams, values, delta: float = 1e-3, floor: float = 1e-7) -> float:
    """Exclusion width for :func:`truncation_oracle` that keeps every known eigenvalue visible.

    The oracle ignores energies within ``delta`` of the band; if an analytic
    eigenvalue sits inside that window the width is shrunk to half its distance.
    """
    lo, hi = eigendata(params).band
    gaps = [max(lo - x, x - hi) for x in values]
    return max(min([delta] + [0.5 * g for g in gaps]), floor)


def truncated_eigenvalues(params: ModelParams, L: int, delta: float = 1e-3) -> np.ndarray:
    """Eigenvalues of the truncated lattice lying more than ``delta`` outside the band."""
    return _outside_band_eigs(params, L, delta)
