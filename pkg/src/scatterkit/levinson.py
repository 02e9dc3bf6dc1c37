"""Winding of det S across the band and the integer eigenvalue-count identity.

Orientation: variations are counted clockwise, i.e. ``Var = -(counterclockwise
argument increase) / (2 pi)``.  The total splits into one horizontal piece per
continuity interval between thresholds and one vertical half-contribution per
threshold.  A threshold where ``s_jj`` tends to ``-1`` contributes ``1/2`` and a
resonant one (``s_jj -> +1``) contributes ``0``, so

    #eigenvalues = N - plus_count / 2 + sum(interval_vars).
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .bound_states import embedded_eigenvalue_scan, find_discrete_eigenvalues, oracle_window, truncation_oracle
from .errors import IdentityViolation, PhaseJump, SingularAtEnergy
from .model import THRESHOLD_RTOL, ModelParams, SpectralData, eigendata
from .scattering import boundary_operator, det_s, threshold_limit

log = logging.getLogger(__name__)

CLIP_REL = 1e-6
INITIAL_POINTS = 129
MAX_PHASE_STEP = np.pi / 4
MIN_STEP = 1e-11
CHORD_SAFETY = 0.25
RICHARDSON_LEVELS = 4
RICHARDSON_TOL = 1e-7
CLIP_SHRINK = 100.0
MIN_CLIP_REL = 1e-14
IDENTITY_TOL = 1e-3


def eta_pm(sign: int, s):
    """Reference curves ``tanh(pi s) +- i / cosh(pi s)`` on the unit circle."""
    s = np.asarray(s, dtype=float)
    return np.tanh(np.pi * s) + sign * 1j / np.cosh(np.pi * s)


def vertical_path(limit: int, kind: str, s) -> np.ndarray:
    """Values along the vertical segment glued at a threshold with ``s_jj -> limit``.

    Openings use ``1 + (1 - eta_-)(limit - 1) / 2``, closings the ``eta_+`` analogue.
    """
    eta = eta_pm(-1 if kind == "opening" else 1, s)
    return 1 + 0.5 * (1 - eta) * (limit - 1)


def vertical_variation(limit: int, kind: str, span: float = 20.0, points: int = 4001) -> float:
    """Clockwise winding of :func:`vertical_path`, traversed +inf -> -inf for an
    opening and -inf -> +inf for a closing."""
    s = np.linspace(span, -span, points) if kind == "opening" else np.linspace(-span, span, points)
    ph = np.unwrap(np.angle(vertical_path(limit, kind, s)))
    return float(-(ph[-1] - ph[0]) / (2 * np.pi))


def _safe_det(params, lam, spec, length):
    # det S is smooth in the band; a singular M can only sit at an embedded eigenvalue
    for k in range(4):
        try:
            return det_s(params, lam + k * 1e-9 * length, spec)
        except SingularAtEnergy:
            log.debug("singular boundary matrix at %r, nudging", lam)
    raise SingularAtEnergy(f"cannot evaluate det S near {lam!r}")


def _sample(params, lam, spec, length):
    """(det S, det D) at ``lam``; det D is the boundary-operator determinant."""
    ds = _safe_det(params, lam, spec, length)
    return ds, complex(np.linalg.det(boundary_operator(params, lam, spec)))


def _chord_distance(p, q):
    """Distance from the origin to the segment [p, q] in the complex plane."""
    d = q - p
    t = 0.0 if d == 0 else float(np.clip(-(p * d.conjugate()).real / abs(d) ** 2, 0.0, 1.0))
    return abs(p + t * d)


def _richardson_offset(params, spec, edge, inward, clip, length):
    """Phase of det S at ``edge`` relative to ``edge + inward * clip``, plus an error estimate.

    The phase is a power series in ``h = sqrt(eps)``; sampling at h, 2h, 4h, ...
    and running a Richardson table removes the first RICHARDSON_LEVELS powers.
    """
    ref = _safe_det(params, edge + inward * clip, spec, length)
    eps = clip * 4.0 ** np.arange(RICHARDSON_LEVELS + 1)
    table = [np.angle(_safe_det(params, edge + inward * e, spec, length) / ref) for e in eps]
    heads = [table[0]]
    for k in range(1, RICHARDSON_LEVELS + 1):
        f = 2.0**k
        table = [(f * table[i] - table[i + 1]) / (f - 1) for i in range(len(table) - 1)]
        heads.append(table[0])
    return heads[-1], abs(heads[-1] - heads[-2])


def _endpoint_offset(params, spec, edge, inward, clip, length):
    """Endpoint phase offset and the clip actually used.

    The series only converges on the scale of the nearest structure (for instance a
    bound state just outside the band), so the clip shrinks by CLIP_SHRINK until the
    last two Richardson levels agree.
    """
    # never step inside the threshold tolerance of the edge
    floor = max(MIN_CLIP_REL * length, 10 * THRESHOLD_RTOL * max(1.0, abs(edge)))
    while True:
        offset, err = _richardson_offset(params, spec, edge, inward, clip, length)
        if err < RICHARDSON_TOL or clip / CLIP_SHRINK < floor:
            if err >= RICHARDSON_TOL:
                log.warning("endpoint phase at %r only resolved to %.2g rad", edge, err)
            return offset, clip
        clip /= CLIP_SHRINK


def _tracked_phase(params, spec, a, b, length):
    """Counterclockwise phase increase of det S on [a, b].

    det S = conj(det D) / det D with det D smooth, so each step of arg det S is
    lifted as ``-2`` times the step of arg det D.  That lift is exact once the
    chord between two samples of det D stays well away from the origin compared
    with its midpoint curvature error, which resolves resonances narrower than
    the sample spacing.  Segments shorter than MIN_STEP fall back to the plain
    det S step (det S is continuous across a real zero of det D).
    """
    t = 0.5 * (1 - np.cos(np.linspace(0, np.pi, INITIAL_POINTS)))
    xs = list(a + (b - a) * t)
    vals = [_sample(params, x, spec, length) for x in xs]
    i = 0
    total = 0.0
    while i < len(xs) - 1:
        (s0, d0), (s1, d1) = vals[i], vals[i + 1]
        mid = 0.5 * (xs[i] + xs[i + 1])
        if xs[i + 1] - xs[i] < MIN_STEP:
            step = np.angle(s1 / s0)
            if abs(step) >= MAX_PHASE_STEP:
                raise PhaseJump(f"phase jump {step:.3f} rad near lam={xs[i]!r} persists at step {MIN_STEP}")
            total += step
            i += 1
            continue
        sm, dm = _sample(params, mid, spec, length)
        step = -2.0 * np.angle(d1 / d0)
        consistent = abs(np.angle(s1 / s0 * np.exp(-1j * step))) < 1e-6
        if (
            abs(step) < MAX_PHASE_STEP
            and consistent
            and abs(dm - 0.5 * (d0 + d1)) <= CHORD_SAFETY * _chord_distance(d0, d1)
        ):
            total += step
            i += 1
            continue
        xs.insert(i + 1, mid)
        vals.insert(i + 1, (sm, dm))
    return total


def interval_variation(
    params: ModelParams, lo: float, hi: float, spec: SpectralData | None = None, clip_rel: float = CLIP_REL
) -> float:
    """Clockwise variation of arg det S over the open interval (lo, hi), in turns."""
    spec = spec or eigendata(params)
    length = hi - lo
    left, clip_lo = _endpoint_offset(params, spec, lo, +1, clip_rel * length, length)
    right, clip_hi = _endpoint_offset(params, spec, hi, -1, clip_rel * length, length)
    inner = _tracked_phase(params, spec, lo + clip_lo, hi - clip_hi, length)
    ccw = inner + right - left
    return float(-ccw / (2 * np.pi))


def threshold_table(spec: SpectralData) -> list[tuple[float, int, str]]:
    """(energy, channel, 'opening' | 'closing') for every threshold, sorted by energy."""
    rows = [(float(lam - 2), int(j), "opening") for j, lam in enumerate(spec.lambdas)]
    rows += [(float(lam + 2), int(j), "closing") for j, lam in enumerate(spec.lambdas)]
    rows.sort()
    return rows


def classify_thresholds(params: ModelParams, spec: SpectralData | None = None) -> tuple[int, ...]:
    """Limit (+1 or -1) of the diagonal entry of the channel at each sorted threshold.

    Openings are approached from above, closings from below, i.e. from inside the
    channel's interval.
    """
    spec = spec or eigendata(params)
    out = []
    for tau, j, kind in threshold_table(spec):
        side = "above" if kind == "opening" else "below"
        out.append(threshold_limit(params, tau, side, j, spec))
    return tuple(out)


@dataclass(frozen=True)
class WindingReport:
    interval_vars: tuple[float, ...]
    threshold_signs: tuple[int, ...]
    var_total: float
    plus_count: int
    predicted: float

    @property
    def n(self) -> int:
        return len(self.threshold_signs) // 2


def winding_report(params: ModelParams) -> WindingReport:
    spec = eigendata(params)
    thr = spec.thresholds
    ivars = tuple(interval_variation(params, lo, hi, spec) for lo, hi in zip(thr[:-1], thr[1:]))
    signs = classify_thresholds(params, spec)
    plus = sum(1 for s in signs if s == 1)
    var_total = float(sum(ivars))
    return WindingReport(
        interval_vars=ivars,
        threshold_signs=signs,
        var_total=var_total,
        plus_count=plus,
        predicted=params.n - plus / 2 + var_total,
    )


@dataclass(frozen=True)
class LevinsonReport:
    winding: WindingReport
    analytic_count: int
    oracle_count: int | None
    residual: float
    eigenvalues: tuple[float, ...]
    embedded: tuple[float, ...]

    @property
    def experimental(self) -> bool:
        """True when embedded eigenvalues entered the analytic count."""
        return bool(self.embedded)

    @property
    def holds(self) -> bool:
        # the lattice oracle sees only states outside the band, never embedded ones
        ok = self.residual < IDENTITY_TOL
        if self.oracle_count is not None:
            ok = ok and self.oracle_count == self.analytic_count - len(self.embedded)
        return ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["experimental"] = self.experimental
        d["holds"] = self.holds
        d["winding"]["predicted_rounded"] = int(round(self.winding.predicted))
        return d


def levinson_check(
    params: ModelParams, oracle: bool = True, L: int = 4000, delta: float = 1e-3, raise_on_failure: bool = True
) -> LevinsonReport:
    """Compare the winding prediction against the analytic and brute-force counts.

    Raises IdentityViolation (carrying the report) unless the prediction is within
    1e-3 of the analytic count and, when run, the oracle agrees.  The oracle
    ignores a window of width ``delta`` around the band, so ``delta`` is shrunk
    to half the edge distance of any analytic eigenvalue lying inside it.
    """
    winding = winding_report(params)
    eigs = find_discrete_eigenvalues(params)
    embedded = tuple(embedded_eigenvalue_scan(params)) if params.n > 2 else ()
    analytic = eigs.total + len(embedded)
    orc = None
    if oracle:
        window = oracle_window(params, eigs.values, delta)
        if window < delta:
            log.info("eigenvalue within %.3g of the band; oracle window shrunk to %.3g", delta, window)
        orc = truncation_oracle(params, L=L, delta=window)
    report = LevinsonReport(
        winding=winding,
        analytic_count=analytic,
        oracle_count=orc,
        residual=abs(winding.predicted - analytic),
        eigenvalues=eigs.values,
        embedded=embedded,
    )
    if raise_on_failure and not report.holds:
        raise IdentityViolation(
            f"predicted {winding.predicted:.6f}, analytic {analytic}, oracle {orc}", report=report
        )
    return report
