import numpy as np
import pytest

from holoww.grid import Field, GridSpec, project_neg


@pytest.fixture(scope="session")
def grid():
    return GridSpec(length=64.0, n=256)


def smooth_field(grid, seed=0, center=2.0, sigma=None, amplitude=1.0, holo=False):
    """Random field with a Gaussian spectral envelope centered at |k| = center.

    Spectrally concentrated, so pointwise products are alias-free to roundoff;
    this is the profile every identity-level test relies on.
    """
    rng = np.random.default_rng(seed)
    sigma = sigma if sigma is not None else center / 4.0
    k = grid.k
    envelope = np.exp(-((np.abs(k) - center) ** 2) / (2.0 * sigma**2))
    envelope[k == 0] = 0.0
    phases = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    coef = envelope * phases
    if holo:
        coef[k >= 0] = 0.0
    u = Field(grid, coef).dealiased()
    scale = amplitude / max(u.linf(), 1e-300)
    u = scale * u
    return project_neg(u) if holo else u


def holo_field(grid, seed=0, center=2.0, amplitude=1.0, sigma=None):
    return smooth_field(grid, seed=seed, center=center, sigma=sigma,
                        amplitude=amplitude, holo=True)
