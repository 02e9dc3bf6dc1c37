import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from scatterkit.model import ModelParams

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# frozen from an independent 30-digit mpmath evaluation
THETA0 = 3.08749350323497851199652349221
XI_PLUS_HALF_PI = 1.09868411346780996603980119524
B0_EIGENVALUE = 3.4918951222748953964770447504  # |lambda| for b=0, a=1, theta=pi/2
A_EQ_B_EIGENVALUE = 3.6609695231857250071365482137  # |lambda| for a=b=1, theta=1.2

fluxes = st.floats(min_value=0.05, max_value=np.pi - 0.05)
potential_entry = st.floats(min_value=-3.0, max_value=3.0).filter(lambda x: abs(x) > 0.05)


@st.composite
def model_params(draw, sizes=(2, 3, 4)):
    n = draw(st.sampled_from(sizes))
    v = draw(st.lists(potential_entry, min_size=n, max_size=n))
    if n == 2 and abs(v[0] - v[1]) < 1e-3:
        v[1] = -v[1]
    return ModelParams(n, draw(fluxes), tuple(v))


def random_params(rng, sizes=(2, 3, 4), vmax=3.0):
    """Admissible random configuration (plain numpy sampling for deterministic sweeps)."""
    while True:
        n = int(rng.choice(sizes))
        v = rng.uniform(-vmax, vmax, n)
        theta = rng.uniform(0.1, 3.0)
        if n == 2 and abs(v[0] - v[1]) < 1e-3:
            continue
        return ModelParams(n, theta, tuple(v))


def in_band_energies(params, count, margin, rng):
    """Random energies inside the band at distance > margin from every threshold."""
    from scatterkit.model import eigendata

    thr = eigendata(params).thresholds
    out = []
    while len(out) < count:
        lam = rng.uniform(thr[0], thr[-1])
        if np.min(np.abs(thr - lam)) > margin:
            out.append(lam)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
