"""Magnetic half-cylinder model: parameters, flux matrix, thresholds, channels.

The unperturbed operator acts on l^2(N; C^n) as the Neumann adjacency operator
in the half-line variable plus the flux matrix ``A_theta`` in the transverse
variable.  The perturbation is diagonal and supported on site 0.

Channel indices are zero-based: index ``j`` here is channel ``j + 1`` in the
usual one-based labelling, so that ``lambda_j = 2 cos((theta + 2 pi (j+1)) / n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidParams, ThresholdEnergy

#: relative distance below which an energy counts as sitting on a threshold
THRESHOLD_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Channel count ``n``, flux ``theta`` (radians) and site-0 potential ``v``."""

    n: int
    theta: float
    v: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(x) for x in np.ravel(self.v)))
        object.__setattr__(self, "theta", float(self.theta))
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParams(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not 0.0 < self.theta < np.pi:
            raise InvalidParams(
                f"flux theta={self.theta!r} is excluded: it must lie in the open interval (0, pi)"
            )
        if len(self.v) != self.n:
            raise InvalidParams(f"potential has {len(self.v)} entries, expected n={self.n}")
        if not all(np.isfinite(self.v)):
            raise InvalidParams("potential entries must be finite")
        if not any(self.v):
            raise InvalidParams("potential v must not vanish identically")
        if self.n == 2 and self.v[0] == self.v[1]:
            raise InvalidParams("for n=2 the potential must not be 1-periodic (v(1) == v(2))")

    @property
    def varr(self) -> np.ndarray:
        return np.asarray(self.v, dtype=float)

    def with_theta(self, theta: float) -> "ModelParams":
        return ModelParams(self.n, theta, self.v)


@dataclass(frozen=True)
class DecomposedPotential:
    """Polar split ``diag(v) = u @ vhalf @ vhalf`` with ``u`` a diagonal sign matrix."""

    u: np.ndarray
    vhalf: np.ndarray

    @classmethod
    def from_params(cls, params: ModelParams) -> "DecomposedPotential":
        v = params.varr
        return cls(u=np.diag(np.where(v >= 0, 1.0, -1.0)), vhalf=np.diag(np.sqrt(np.abs(v))))


@dataclass(frozen=True)
class SpectralData:
    """Closed-form eigendata of the flux matrix.

    ``xis[j]`` is the (unnormalised, norm sqrt(n)) eigenvector of channel ``j``,
    ``projs[j] = |xi_j><xi_j| / n``.  ``order`` sorts the channels by eigenvalue.
    """

    lambdas: np.ndarray
    xis: np.ndarray
    projs: np.ndarray
    order: np.ndarray
    thresholds: np.ndarray
    band: tuple[float, float]
    rank: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def sorted_lambdas(self) -> np.ndarray:
        return self.lambdas[self.order]


@dataclass(frozen=True)
class ChannelSet:
    """Channels open at energy ``lam``, listed in increasing-eigenvalue order."""

    lam: float
    open: tuple[int, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.open)


def build_a_theta(params: ModelParams) -> np.ndarray:
    """Hermitian flux matrix: unit hopping on the ring, phase e^{-i theta} on the (1, n) link."""
    n = params.n
    a = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        a[k, k + 1] += 1.0
        a[k + 1, k] += 1.0
    a[0, n - 1] += np.exp(-1j * params.theta)
    a[n - 1, 0] += np.exp(1j * params.theta)
    return a


def eigendata(params: ModelParams) -> SpectralData:
    n, theta = params.n, params.theta
    js = np.arange(1, n + 1)
    ks = np.arange(1, n + 1)
    phases = (theta + 2 * np.pi * js) / n
    lambdas = 2 * np.cos(phases)
    xis = np.exp(1j * np.outer(phases, ks))
    projs = np.einsum("ja,jb->jab", xis, xis.conj()) / n
    order = np.argsort(lambdas, kind="stable")
    rank = np.empty(n, dtype=int)
    rank[order] = np.arange(n)
    thr = np.sort(np.concatenate([lambdas - 2, lambdas + 2]))
    return SpectralData(
        lambdas=lambdas,
        xis=xis,
        projs=projs,
        order=order,
        thresholds=thr,
        band=(float(thr[0]), float(thr[-1])),
        rank=rank,
    )


def thresholds(params: ModelParams) -> np.ndarray:
    """Sorted array of the 2n energies lambda_j +- 2."""
    return eigendata(params).thresholds


def at_threshold(lam: float, thr: np.ndarray) -> bool:
    return bool(np.any(np.abs(lam - thr) < THRESHOLD_RTOL * np.maximum(1.0, np.abs(thr))))


def open_channels(params: ModelParams, lam: float, spec: SpectralData | None = None) -> ChannelSet:
    spec = spec or eigendata(params)
    if at_threshold(lam, spec.thresholds):
        raise ThresholdEnergy(f"energy {lam!r} sits on a threshold")
    opened = tuple(int(j) for j in spec.order if abs(lam - spec.lambdas[j]) < 2)
    return ChannelSet(lam=float(lam), open=opened)


def build_truncated_hamiltonian(params: ModelParams, L: int) -> sp.csr_matrix:
    """Lattice Hamiltonian on sites 0..L (plain cutoff), as a sparse Hermitian matrix.

    Basis index of (site m, component k) is ``m * n + k``.
    """
    if L < 2:
        raise ValueError("cutoff L must be >= 2")
    hop = np.ones(L)
    hop[0] = np.sqrt(2.0)
    lap = sp.diags([hop, hop], [1, -1], shape=(L + 1, L + 1), dtype=complex)
    site0 = sp.csr_matrix(([1.0], ([0], [0])), shape=(L + 1, L + 1))
    h = (
        sp.kron(lap, sp.identity(params.n))
        + sp.kron(sp.identity(L + 1), sp.csr_matrix(build_a_theta(params)))
        + sp.kron(site0, sp.diags(params.varr))
    )
    h = h.tocsr()
    h.eliminate_zeros()
    return h


def upper_band_storage(h: sp.spmatrix, bandwidth: int) -> np.ndarray:
    """Pack a Hermitian matrix in the upper banded layout used by ``scipy.linalg.eig_banded``."""
    coo = sp.triu(h).tocoo()
    off = coo.col - coo.row
    if off.size and off.max() > bandwidth:
        raise ValueError("matrix is wider than the requested bandwidth")
    ab = np.zeros((bandwidth + 1, h.shape[0]), dtype=complex)
    ab[bandwidth - off, coo.col] = coo.data
    return ab
