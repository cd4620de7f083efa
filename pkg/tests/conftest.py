import numpy as np
import pytest

from sgldiff import make_quadratic_family, make_trig_family, PotentialFamily


@pytest.fixture(scope="session")
def fig_family():
    """Two-component linear family with mean drift -10x."""
    return make_quadratic_family((5.0, 15.0), (5.0, -5.0 / 3.0), radius=0.1)


@pytest.fixture(scope="session")
def ou_family():
    """Single-component linear family with drift -10x."""
    return make_quadratic_family((10.0,), (0.0,), radius=0.1)


@pytest.fixture(scope="session")
def trig_family():
    return make_trig_family((0.0, np.pi))


@pytest.fixture(scope="session")
def zero_grad_family():
    """Pure Brownian motion: identically zero gradient."""

    def grad(i, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    return PotentialFamily(
        n_components=1,
        dim=1,
        grad=grad,
        declared_L=0.0,
        declared_K=1.0,
        declared_R=1.0,
        grad_norms_at_zero=(0.0,),
        name="zero",
        scalar_grads=(lambda x: 0.0,),
        scalar_mean_grad=lambda x: 0.0,
    )
