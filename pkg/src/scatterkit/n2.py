"""Closed-form expressions for two channels.

For ``n = 2`` write ``v = (u1 a^2, u2 b^2)`` with signs ``u1, u2`` and set
``rho = u2 a^2 + u1 b^2``.  The channel eigenvalues are ``-+2 cos(theta/2)`` and
everything below is an explicit rational function of ``beta_1^2, beta_2^2``.
These formulas are independent of the generic matrix route in
:mod:`scatterkit.scattering` and serve as its oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import InvalidParams, OutOfBranch
from .model import ModelParams

XI_BISECT_TOL = 1e-14
#: fluxes this close to theta0 count as resonant in the worked example
RESONANT_THETA_TOL = 1e-10


@dataclass(frozen=True)
class N2Params:
    u1: int
    u2: int
    a: float
    b: float
    theta: float

    def __post_init__(self):
        if self.u1 not in (1, -1) or self.u2 not in (1, -1):
            raise InvalidParams("u1, u2 must be +-1")
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise InvalidParams("a, b must be nonnegative and not both zero")
        if self.u1 == self.u2 and self.a == self.b:
            raise InvalidParams("1-periodic potential (u1 == u2 and a == b) is excluded")
        if not 0 < self.theta < np.pi:
            raise InvalidParams("theta must lie in (0, pi)")

    @classmethod
    def from_v(cls, v1: float, v2: float, theta: float) -> "N2Params":
        return cls(
            u1=1 if v1 >= 0 else -1,
            u2=1 if v2 >= 0 else -1,
            a=float(np.sqrt(abs(v1))),
            b=float(np.sqrt(abs(v2))),
            theta=float(theta),
        )

    @classmethod
    def from_model(cls, params: ModelParams) -> "N2Params":
        if params.n != 2:
            raise InvalidParams("closed forms need n = 2")
        return cls.from_v(params.v[0], params.v[1], params.theta)

    @property
    def rho(self) -> float:
        return self.u2 * self.a**2 + self.u1 * self.b**2

    @property
    def a2b2(self) -> float:
        return self.a**2 * self.b**2

    def to_model(self) -> ModelParams:
        return ModelParams(2, self.theta, (self.u1 * self.a**2, self.u2 * self.b**2))

    @property
    def lambdas(self) -> tuple[float, float]:
        c = 2 * np.cos(self.theta / 2)
        return -c, c

    def beta_sq(self, lam: float) -> tuple[float, float]:
        l1, l2 = self.lambdas
        return (
            float(np.sqrt(abs((lam - l1) ** 2 - 4))),
            float(np.sqrt(abs((lam - l2) ** 2 - 4))),
        )

    def branch(self, lam: float) -> int:
        """0 below the band, 1..3 for the three band intervals, 4 above."""
        l1, l2 = self.lambdas
        edges = (l1 - 2, l2 - 2, l1 + 2, l2 + 2)
        return int(np.searchsorted(edges, lam))


@dataclass(frozen=True)
class ABCoefficients:
    a1: float
    b1: float
    a2: float
    b2: float
    a3: float
    b3: float


def xi_plus(theta):
    c = np.cos(np.asarray(theta) / 2)
    return np.sqrt(c + c**2)


def xi_minus(theta):
    c = np.cos(np.asarray(theta) / 2)
    return np.sqrt(c - c**2)


def ab_coefficients(p: N2Params, lam: float) -> ABCoefficients:
    b1sq, b2sq = p.beta_sq(lam)
    uu, rho, ab = p.u1 * p.u2, p.rho, p.a2b2
    return ABCoefficients(
        a1=b1sq * (2 * uu * b2sq + rho),
        b1=2 * ab + rho * b2sq,
        a2=2 * uu * b1sq * b2sq - 2 * ab,
        b2=rho * (b1sq + b2sq),
        a3=b2sq * (2 * uu * b1sq - rho),
        b3=-2 * ab + rho * b1sq,
    )


def _coeffs(p: N2Params, lam: float) -> tuple[complex, complex]:
    br = p.branch(lam)
    c1 = {0: 1, 1: 1j, 2: 1j, 3: -1, 4: -1}[br]
    c2 = {0: 1, 1: 1, 2: 1j, 3: 1j, 4: -1}[br]
    return c1, c2


def q_value(p: N2Params, lam: float) -> complex:
    """Determinant of ``u + G (H0 - lam - i0)^{-1} G*`` in closed form."""
    b1sq, b2sq = p.beta_sq(lam)
    c1, c2 = _coeffs(p, lam)
    num = 2 * p.u1 * p.u2 * b1sq * b2sq + (c1 * b2sq + c2 * b1sq) * p.rho + 2 * p.a2b2 * c1 * c2
    return complex(num / (2 * b1sq * b2sq))


def vmv_closed(p: N2Params, lam: float) -> np.ndarray:
    """``vhalf M(lam + i0) vhalf`` from the explicit 2x2 inversion."""
    b1sq, b2sq = p.beta_sq(lam)
    c1, c2 = _coeffs(p, lam)
    tp = c1 / b1sq + c2 / b2sq
    tm = c1 / b1sq - c2 / b2sq
    ab = p.a2b2
    ph = np.exp(1j * p.theta / 2)
    mat = np.array(
        [
            [p.u2 * p.a**2 + ab * tp / 2, ab * tm / (2 * ph)],
            [ab * ph * tm / 2, p.u1 * p.b**2 + ab * tp / 2],
        ]
    )
    return mat / q_value(p, lam)


def s11_closed(p: N2Params, lam: float) -> complex:
    br = p.branch(lam)
    c = ab_coefficients(p, lam)
    if br == 1:
        return (c.a1 - 1j * c.b1) / (c.a1 + 1j * c.b1)
    if br == 2:
        _, b2sq = p.beta_sq(lam)
        return 1 + (4 * p.a2b2 - 2j * p.rho * b2sq) / (c.a2 + 1j * c.b2)
    raise OutOfBranch(f"s11 is defined on the first two band intervals, lam={lam!r}")


def s22_closed(p: N2Params, lam: float) -> complex:
    br = p.branch(lam)
    c = ab_coefficients(p, lam)
    if br == 2:
        b1sq, _ = p.beta_sq(lam)
        return 1 + (4 * p.a2b2 - 2j * p.rho * b1sq) / (c.a2 + 1j * c.b2)
    if br == 3:
        return (c.a3 - 1j * c.b3) / (c.a3 + 1j * c.b3)
    raise OutOfBranch(f"s22 is defined on the last two band intervals, lam={lam!r}")


def det_s_closed(p: N2Params, lam: float) -> complex:
    br = p.branch(lam)
    c = ab_coefficients(p, lam)
    if br == 1:
        return s11_closed(p, lam)
    if br == 2:
        return (c.a2 - 1j * c.b2) / (c.a2 + 1j * c.b2)
    if br == 3:
        return s22_closed(p, lam)
    raise OutOfBranch(f"lam={lam!r} is outside the band")


def eigen_polynomial(p: N2Params, lam: float) -> float:
    """Left side of the eigenvalue condition outside the band (zero iff eigenvalue)."""
    b1sq, b2sq = p.beta_sq(lam)
    sgn = {0: 1.0, 4: -1.0}.get(p.branch(lam))
    if sgn is None:
        raise OutOfBranch(f"lam={lam!r} is inside the band")
    return 2 * p.u1 * p.u2 * b1sq * b2sq + sgn * (b1sq + b2sq) * p.rho + 2 * p.a2b2


def inverse_xi_plus(target: float, tol: float = XI_BISECT_TOL) -> Optional[float]:
    """The unique theta in (0, pi) with xi_plus(theta) == target, if any.

    ``xi_plus`` decreases strictly from sqrt(2) to 0 on (0, pi), so plain
    bisection is safe.
    """
    if not 0 < target < np.sqrt(2):
        return None
    lo, hi = 0.0, np.pi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if xi_plus(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _split(v1: float, v2: float) -> tuple[float, float]:
    u1 = 1 if v1 >= 0 else -1
    u2 = 1 if v2 >= 0 else -1
    return u2 * abs(v1) + u1 * abs(v2), abs(v1 * v2)


def resonance_theta_bottom(v1: float, v2: float) -> Optional[float]:
    """Flux at which the band bottom is resonant: ``2 rho xi_plus(theta) + a^2 b^2 = 0``."""
    rho, ab = _split(v1, v2)
    if rho >= 0 or ab == 0:
        return None
    return inverse_xi_plus(-ab / (2 * rho))


def resonance_theta_top(v1: float, v2: float) -> Optional[float]:
    """Flux at which the band top is resonant: ``2 rho xi_plus(theta) - a^2 b^2 = 0``."""
    rho, ab = _split(v1, v2)
    if rho <= 0 or ab == 0:
        return None
    return inverse_xi_plus(ab / (2 * rho))


def resonance_z(theta: float) -> complex:
    """Value of s22 at the middle closing threshold for v = (-1, -1/2)."""
    x = 6 * xi_minus(theta)
    return complex((x + 1j) / (x - 1j))


Case = Literal["b0", "a_eq_b", "resonant"]

RESONANT_V = (-1.0, -0.5)


@dataclass(frozen=True)
class WorkedExample:
    params: ModelParams
    interval_vars: tuple[float, float, float]
    plus_count: int
    count: int


def resonant_theta0() -> float:
    return resonance_theta_bottom(*RESONANT_V)


def worked_example(case: Case, theta: float, u1: int = -1) -> WorkedExample:
    """Expected interval variations and counts for the three explicit families.

    ``u1`` selects the sign for the ``b0`` family; the other two fix their signs.
    """
    if case == "b0":
        params = ModelParams(2, theta, (float(u1), 0.0))
        return WorkedExample(params, (-0.5, 0.0, -0.5), 0, 1)
    if case == "a_eq_b":
        params = ModelParams(2, theta, (1.0, -1.0))
        return WorkedExample(params, (0.0, 0.0, 0.0), 0, 2)
    if case == "resonant":
        params = ModelParams(2, theta, RESONANT_V)
        arg = np.angle(resonance_z(theta)) / (2 * np.pi)
        th0 = resonant_theta0()
        if abs(theta - th0) < RESONANT_THETA_TOL:
            return WorkedExample(params, (-arg, 0.0, -0.5 + arg), 1, 1)
        if theta < th0:
            return WorkedExample(params, (-0.5 - arg, 0.0, -0.5 + arg), 0, 1)
        return WorkedExample(params, (0.5 - arg, 0.0, -0.5 + arg), 0, 2)
    raise ValueError(f"unknown case {case!r}")


def resonance_surface(v1_values, v2_values, top: bool = False) -> list[tuple[float, float, float]]:
    """(v1, v2, theta0) triples on a grid, keeping only points where theta0 exists."""
    fn = resonance_theta_top if top else resonance_theta_bottom
    rows = []
    for v1 in v1_values:
        for v2 in v2_values:
            th = fn(float(v1), float(v2))
            if th is not None:
                rows.append((float(v1), float(v2), th))
    return rows


def eigenvalue_phase_diagram(v: tuple[float, float], thetas, depths) -> np.ndarray:
    """Sign of det K(lam) below the band on a (theta, depth) grid.

    ``lam = bottom(theta) - depth``; interfaces between signs are eigenvalue curves.
    Returns an array of shape ``(len(thetas), len(depths))`` with entries +-1.
    """
    out = np.empty((len(thetas), len(depths)))
    for i, th in enumerate(thetas):
        p = N2Params.from_v(v[0], v[1], th)
        bottom = p.lambdas[0] - 2
        for k, dep in enumerate(depths):
            out[i, k] = np.sign(eigen_polynomial(p, bottom - dep))
    return out
