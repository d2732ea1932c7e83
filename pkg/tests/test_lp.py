import math

import numpy as np
import pytest

from holoww.errors import OutOfBand
from holoww.grid import Field
from holoww.lp import (
    band_symbol,
    besov_inf2,
    block_range,
    highpass_symbol,
    lowpass_symbol,
    lp_blocks,
    lp_project,
    partition_defect,
)

from conftest import smooth_field


def test_partition_of_unity(grid):
    assert partition_defect(grid) < 1e-12


def test_pure_mode_weight(grid):
    lo, hi = block_range(grid)
    m = (lo + hi) // 2
    target = 2.0**m
    idx = np.argmin(np.abs(np.abs(grid.k) - target))
    coef = np.zeros(grid.n, dtype=complex)
    coef[idx] = 1.0
    u = Field(grid, coef)
    w = abs(lp_project(u, m).coef[idx])
    assert 0.9 <= w <= 1.0
    neighbors = abs(lp_project(u, m - 1).coef[idx]) + abs(lp_project(u, m + 1).coef[idx])
    assert abs(w + neighbors - 1.0) < 1e-12


def test_zero_field_projects_to_zero(grid):
    z = Field.zero(grid)
    lo, _ = block_range(grid)
    assert lp_project(z, lo).l2() == 0.0


def test_out_of_band(grid):
    lo, hi = block_range(grid)
    with pytest.raises(OutOfBand):
        lp_project(Field.zero(grid), lo - 1)
    with pytest.raises(OutOfBand):
        lp_project(Field.zero(grid), hi + 1)


def test_reconstruction(grid):
    u = smooth_field(grid, seed=20).demean()
    lo, hi = block_range(grid)
    total = Field.zero(grid)
    for m in range(lo, hi + 1):
        total = total + lp_project(u, m)
    assert np.max(np.abs(total.coef - u.coef)) < 1e-12 * u.linf()


def test_almost_orthogonality(grid):
    u = smooth_field(grid, seed=21).demean()
    lo, hi = block_range(grid)
    total = sum(lp_project(u, m).l2() ** 2 for m in range(lo, hi + 1))
    assert u.l2() ** 2 / 2.0 <= total <= u.l2() ** 2 * (1.0 + 1e-12)


def test_besov_single_mode(grid):
    lo, hi = block_range(grid)
    m = (lo + hi) // 2
    idx = np.argmin(np.abs(np.abs(grid.k) - 2.0**m))
    coef = np.zeros(grid.n, dtype=complex)
    coef[idx] = 3.0
    u = Field(grid, coef)
    # block weights at the exact center give the clean single-block answer
    expect = 2.0 ** (m * 0.25) * 3.0
    assert abs(besov_inf2(u, 0.25) - expect) < 0.05 * expect


def test_besov_zero(grid):
    assert besov_inf2(Field.zero(grid), 0.25) == 0.0


def test_besov_two_separated_modes(grid):
    lo, hi = block_range(grid)
    m1, m2 = lo + 2, hi - 2
    i1 = np.argmin(np.abs(np.abs(grid.k) - 2.0**m1))
    i2 = np.argmin(np.abs(np.abs(grid.k) - 2.0**m2))
    c1 = np.zeros(grid.n, dtype=complex)
    c1[i1] = 1.0
    c2 = np.zeros(grid.n, dtype=complex)
    c2[i2] = 2.0
    u1, u2 = Field(grid, c1), Field(grid, c2)
    combined = besov_inf2(u1 + u2, 0.25) ** 2
    separate = besov_inf2(u1, 0.25) ** 2 + besov_inf2(u2, 0.25) ** 2
    assert abs(combined - separate) < 0.05 * separate


def test_window_trichotomy(grid):
    from holoww.lp import band_high_symbol, band_low_symbol

    center = 2.0 ** ((sum(block_range(grid))) // 2)
    total = (
        band_low_symbol(grid, center)
        + band_symbol(grid, center)
        + band_high_symbol(grid, center)
    )
    nz = grid.k != 0
    assert np.max(np.abs(total[nz] - 1.0)) < 1e-12
    # the one-sided windows also pair into a smooth two-way split
    pair = lowpass_symbol(grid, center) + highpass_symbol(grid, center)
    assert np.max(np.abs(pair[nz] - 1.0)) < 1e-12
