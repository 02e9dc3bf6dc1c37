import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatterkit import n2
from scatterkit.bound_states import (
    _lattice_inertia,
    eigen_condition_value,
    embedded_eigenvalue_scan,
    find_discrete_eigenvalues,
    kernel_matrix,
    oracle_window,
    truncated_eigenvalues,
    truncation_oracle,
)
from scatterkit.errors import BracketAtBoundary, InsideBand
from scatterkit.model import ModelParams, build_truncated_hamiltonian, eigendata

from conftest import A_EQ_B_EIGENVALUE, B0_EIGENVALUE, THETA0, model_params, random_params


@pytest.mark.parametrize("u1", [-1, 1])
def test_b0_single_eigenvalue(u1):
    eig = find_discrete_eigenvalues(ModelParams(2, np.pi / 2, (float(u1), 0.0)))
    assert eig.total == 1
    assert eig.values[0] == pytest.approx(u1 * B0_EIGENVALUE, abs=1e-11)


@pytest.mark.parametrize("theta", [1.2, 2.0])
def test_a_eq_b_one_per_side(theta):
    eig = find_discrete_eigenvalues(ModelParams(2, theta, (1.0, -1.0)))
    lo, hi = eigendata(ModelParams(2, theta, (1.0, -1.0))).band
    assert eig.total == 2
    assert eig.values[0] < lo and eig.values[1] > hi
    if theta == 1.2:
        np.testing.assert_allclose(eig.values, [-A_EQ_B_EIGENVALUE, A_EQ_B_EIGENVALUE], atol=1e-11)


@given(model_params(sizes=(2,)), st.floats(0.01, 5.0), st.sampled_from([-1, 1]))
def test_det_k_matches_two_channel_polynomial(p, depth, side):
    spec = eigendata(p)
    lam = spec.band[0] - depth if side < 0 else spec.band[1] + depth
    q = n2.N2Params.from_model(p)
    b1, b2 = q.beta_sq(lam)
    poly = n2.eigen_polynomial(q, lam)
    assert eigen_condition_value(p, lam, spec) * 2 * b1 * b2 == pytest.approx(poly, rel=1e-10, abs=1e-10)


def test_condition_rejects_band_energies():
    with pytest.raises(InsideBand):
        eigen_condition_value(ModelParams(2, 1.0, (1.0, 0.0)), 0.0)


@given(model_params())
def test_root_residuals(p):
    spec = eigendata(p)
    eig = find_discrete_eigenvalues(p)
    for lam in eig.values:
        k = kernel_matrix(p, lam, spec)
        assert abs(np.linalg.det(k)) < 1e-9 * max(1.0, np.linalg.norm(k, 2) ** p.n)
        assert min(abs(lam - spec.band[0]), abs(lam - spec.band[1])) > 1e-10


@given(model_params(), st.floats(1e-6, 1e-3))
def test_weak_potential_has_no_eigenvalues(p, scale):
    weak = ModelParams(p.n, p.theta, tuple(scale * np.asarray(p.v)))
    assert find_discrete_eigenvalues(weak).total == 0


def test_kappa_max_must_cover_norm_bound():
    with pytest.raises(BracketAtBoundary):
        find_discrete_eigenvalues(ModelParams(2, 1.0, (40.0, 0.0)))
    assert find_discrete_eigenvalues(ModelParams(2, 1.0, (40.0, 0.0)), kappa_max=8.0).total == 1


@given(model_params(sizes=(2,)))
def test_no_embedded_for_two_channels(p):
    assert embedded_eigenvalue_scan(p, grid_step=0.01) == []


def test_embedded_scan_with_zero_entries():
    # ker(P_j vhalf) is nontrivial here, but its intersection with ker K is not
    assert embedded_eigenvalue_scan(ModelParams(4, 1.0, (1.0, 0.0, 0.0, 0.0))) == []
    assert embedded_eigenvalue_scan(ModelParams(3, 0.7, (0.0, -2.0, 0.0))) == []


def test_resonance_is_not_an_eigenvalue():
    p = ModelParams(2, THETA0, n2.RESONANT_V)
    eig = find_discrete_eigenvalues(p)
    bottom = eigendata(p).band[0]
    assert all(abs(x - bottom) > 1e-2 for x in eig.values)
    assert eig.total == 1


def test_lattice_inertia_matches_dense():
    p = ModelParams(3, 0.8, (1.5, -2.0, 0.4))
    ev = np.linalg.eigvalsh(build_truncated_hamiltonian(p, 120).toarray())
    xs = np.array([-6.0, -4.2, -3.1, 0.0, 1.7, 3.95, 6.0])
    np.testing.assert_array_equal(_lattice_inertia(p, 120, xs), [np.sum(ev < x) for x in xs])


def test_truncated_eigenvalues_match_analytic():
    p = ModelParams(3, 0.8, (1.5, -2.0, 0.4))
    analytic = np.array(find_discrete_eigenvalues(p).values)
    lattice = truncated_eigenvalues(p, 2000, 1e-3)
    assert len(lattice) == len(analytic) > 0
    np.testing.assert_allclose(lattice, analytic, atol=1e-4)


@pytest.mark.parametrize(
    "params, count",
    [
        (ModelParams(2, np.pi / 2, (-1.0, 0.0)), 1),
        (ModelParams(2, 2.0, (1.0, -1.0)), 2),
        (ModelParams(3, 1.0, (1e-6, -2e-6, 0.0)), 0),
    ],
)
def test_oracle_counts(params, count):
    assert truncation_oracle(params, L=4000) == count


def test_oracle_rejects_small_cutoff():
    with pytest.raises(ValueError):
        truncation_oracle(ModelParams(2, 1.0, (1.0, 0.0)), L=50)


def test_oracle_window_shrinks_for_edge_states():
    p = ModelParams(2, 1.0, (1.0, 0.0))
    lo, hi = eigendata(p).band
    assert oracle_window(p, [lo - 1.0]) == 1e-3
    assert oracle_window(p, [hi + 2e-4]) == pytest.approx(1e-4)


@pytest.mark.slow
def test_oracle_equivalence_random():
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = random_params(rng)
        eig = find_discrete_eigenvalues(p)
        assert truncation_oracle(p, L=4000, delta=oracle_window(p, eig.values)) == eig.total, p
