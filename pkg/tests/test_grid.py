import math

import numpy as np
import pytest

from holoww.errors import GridMismatch, NegativePowerOnMean
from holoww.grid import (
    Field,
    GridSpec,
    frac_deriv,
    load_field,
    pair_sobolev,
    project_neg,
    save_field,
)

from conftest import smooth_field


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(n=15)
    with pytest.raises(ValueError):
        GridSpec(n=8)
    with pytest.raises(ValueError):
        GridSpec(dealias=0.0)


def test_roundtrip_and_parseval(grid):
    u = smooth_field(grid, seed=1)
    v = Field.from_values(grid, u.values)
    assert np.max(np.abs(v.coef - u.coef)) < 1e-12 * u.linf()
    quad = math.sqrt(float(np.mean(np.abs(u.values) ** 2)) * grid.length)
    assert abs(u.l2() - quad) < 1e-12 * quad


def test_single_mode_l2_is_sqrt_length(grid):
    coef = np.zeros(grid.n, dtype=complex)
    coef[grid.modes == -3] = 1.0
    u = Field(grid, coef)
    assert abs(u.l2() - math.sqrt(grid.length)) < 1e-12
    assert abs(u.linf() - 1.0) < 1e-12


def test_grid_mismatch_raises(grid):
    other = GridSpec(length=32.0, n=64)
    with pytest.raises(GridMismatch):
        _ = smooth_field(grid) + smooth_field(other)


def test_project_neg_modewise(grid):
    coef = np.zeros(grid.n, dtype=complex)
    coef[grid.modes == -1] = 1.0
    coef[grid.modes == 0] = 2.0
    coef[grid.modes == 1] = 3.0j
    p = project_neg(Field(grid, coef))
    assert p.coef[grid.modes == -1] == 1.0
    assert np.all(p.coef[grid.k >= 0] == 0.0)


def test_project_neg_idempotent(grid):
    u = smooth_field(grid, seed=2)
    once = project_neg(u)
    twice = project_neg(once)
    assert np.max(np.abs(once.coef - twice.coef)) == 0.0


def test_project_neg_orthogonal(grid):
    u = smooth_field(grid, seed=3)
    v = smooth_field(grid, seed=4)
    pu = project_neg(u)
    rest = v - project_neg(v)
    assert abs(pu.inner(rest)) < 1e-12 * max(u.l2() * v.l2(), 1e-30)


def test_real_field_splits_into_conjugate_halves(grid):
    # against a brute-force O(n^2) DFT oracle, mode by signed mode
    u = smooth_field(grid, seed=5)
    real = Field.from_values(grid, np.real(u.values)).demean()
    alpha = grid.alpha
    oracle = np.zeros(grid.n, dtype=complex)
    for m, k in zip(grid.modes, grid.k):
        if k < 0:
            c = np.sum(real.values * np.exp(-1j * k * alpha)) / grid.n
            oracle[grid.modes == m] = c
    p = project_neg(real)
    assert np.max(np.abs(p.coef - oracle)) < 1e-12 * real.linf()
    rebuilt = p + project_neg(real.conj()).conj()
    assert np.max(np.abs(rebuilt.values - real.values)) < 1e-12 * real.linf()


def test_frac_deriv_single_mode(grid):
    coef = np.zeros(grid.n, dtype=complex)
    coef[grid.modes == -8] = 1.0
    u = Field(grid, coef)
    k = abs(grid.k[grid.modes == -8][0])
    d = frac_deriv(u, 0.5)
    assert abs(d.coef[grid.modes == -8][0] - k**0.5) < 1e-12


def test_frac_deriv_identity_and_composition(grid):
    u = smooth_field(grid, seed=6).demean()
    same = frac_deriv(u, 0.0)
    assert np.max(np.abs(same.coef - u.coef)) < 1e-14
    twice = frac_deriv(frac_deriv(u, 0.5), 0.5)
    direct = frac_deriv(u, 1.0)
    assert np.max(np.abs(twice.coef - direct.coef)) < 1e-12 * u.linf()


def test_frac_deriv_negative_power_guard(grid):
    u = smooth_field(grid, seed=7)
    coef = u.coef.copy()
    coef[grid.modes == 0] = 1.0
    with pytest.raises(NegativePowerOnMean):
        frac_deriv(Field(grid, coef), -0.5)


def test_pair_sobolev(grid):
    zero = Field.zero(grid)
    assert pair_sobolev((zero, zero), 0.25) == 0.0
    coef = np.zeros(grid.n, dtype=complex)
    coef[grid.modes == -5] = 1.0
    u = Field(grid, coef)
    assert abs(pair_sobolev((u, zero), 0.0) - math.sqrt(grid.length)) < 1e-12
    w = smooth_field(grid, seed=8).demean()
    r = smooth_field(grid, seed=9).demean()
    hom = pair_sobolev((w, r), 0.75)
    inhom = pair_sobolev((w, r), 0.75, homogeneous=False)
    assert inhom >= hom  # <k> >= |k|


def test_field_serialization_roundtrip(tmp_path, grid):
    u = smooth_field(grid, seed=10)
    path = tmp_path / "field.txt"
    save_field(path, u)
    v = load_field(path)
    assert v.grid == grid
    assert np.max(np.abs(v.coef - u.coef)) == 0.0


def test_conj_matches_physical(grid):
    u = smooth_field(grid, seed=11)
    assert np.max(np.abs(u.conj().values - np.conj(u.values))) < 1e-12 * u.linf()


def test_evaluate_at_matches_grid(grid):
    u = smooth_field(grid, seed=12)
    j = 37
    val = u.evaluate_at(grid.alpha[j])
    assert abs(val - u.values[j]) < 1e-10 * u.linf()
