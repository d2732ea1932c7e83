import numpy as np
import pytest

from holoww.grid import Field, project_neg
from holoww.lp import block_range
from holoww.paradiff import (
    ParaConfig,
    balanced,
    commutator_norm,
    para,
    para_adjoint,
    trichotomy_residual,
)

from conftest import smooth_field

RAW = ParaConfig(implicit_p=False)


def mode_field(grid, target, amp=1.0):
    idx = np.argmin(np.abs(np.abs(grid.k) - target))
    coef = np.zeros(grid.n, dtype=complex)
    coef[idx] = amp
    return Field(grid, coef), grid.k[idx]


def conv_product_oracle(a, b):
    """Brute-force O(n^2) spectral convolution, truncated to the grid band."""
    grid = a.grid
    out = np.zeros(grid.n, dtype=complex)
    order = {m: i for i, m in enumerate(grid.modes)}
    for m1, c1 in zip(grid.modes, a.coef):
        if c1 == 0:
            continue
        for m2, c2 in zip(grid.modes, b.coef):
            if c2 == 0:
                continue
            m = m1 + m2
            if m in order:
                out[order[m]] += c1 * c2
    return Field(grid, np.where(grid.dealias_mask, out, 0.0))


def test_constant_symbol(grid):
    u = smooth_field(grid, seed=30).demean()
    const = Field.from_values(grid, np.full(grid.n, 2.5 + 0.0j))
    t = para(const, u, RAW)
    assert np.max(np.abs(t.coef - 2.5 * u.coef)) < 1e-12 * u.linf()


def test_separated_modes_pass_to_paraproduct(grid):
    # symbol at the lowest grid mode, argument in the top block: the symbol
    # passes every contributing low-pass cutoff, so T_a b is the full product
    lo, hi = block_range(grid)
    a, ka = mode_field(grid, grid.dk)
    b, _ = mode_field(grid, 2.0**hi)
    assert abs(ka) <= 2.0 ** (hi - 1 - RAW.separation)
    t = para(a, b, RAW)
    oracle = conv_product_oracle(a, b)
    assert np.max(np.abs(t.coef - oracle.coef)) < 1e-12
    assert balanced(a, b, RAW).l2() < 1e-12


def test_reversed_separation_gives_zero(grid):
    lo, hi = block_range(grid)
    a, _ = mode_field(grid, 2.0**hi)
    b, _ = mode_field(grid, grid.dk)
    assert para(a, b, RAW).l2() < 1e-12


def test_balanced_comparable_modes(grid):
    lo, hi = block_range(grid)
    m = (lo + hi) // 2
    a, _ = mode_field(grid, 2.0**m)
    b, _ = mode_field(grid, 2.0 ** (m + 1))
    pi = balanced(a, b, RAW)
    oracle = conv_product_oracle(a, b)
    assert np.max(np.abs(pi.coef - oracle.coef)) < 1e-12


def test_balanced_symmetric(grid):
    a = smooth_field(grid, seed=31)
    b = smooth_field(grid, seed=32)
    d = balanced(a, b, RAW) - balanced(b, a, RAW)
    assert d.l2() < 1e-12 * max(a.l2() * b.l2(), 1e-30)


def test_bilinearity(grid):
    a = smooth_field(grid, seed=33)
    b = smooth_field(grid, seed=34)
    c = smooth_field(grid, seed=35)
    lhs = para(a, b + 2.0 * c, RAW)
    rhs = para(a, b, RAW) + 2.0 * para(a, c, RAW)
    assert (lhs - rhs).l2() < 1e-12 * max(lhs.l2(), 1e-30)
    lhs2 = para(a + 2.0 * c, b, RAW)
    rhs2 = para(a, b, RAW) + 2.0 * para(c, b, RAW)
    assert (lhs2 - rhs2).l2() < 1e-12 * max(lhs2.l2(), 1e-30)


@pytest.mark.parametrize("seed", [40, 41, 42])
def test_trichotomy(grid, seed):
    a = smooth_field(grid, seed=seed)
    b = smooth_field(grid, seed=seed + 100)
    scale = (a * b).l2()
    assert trichotomy_residual(a, b) < 1e-12 * max(scale, 1e-30)


def test_trichotomy_zero_field(grid):
    assert trichotomy_residual(Field.zero(grid), Field.zero(grid)) == 0.0


def test_trichotomy_aliased_inputs_reported(grid):
    # broadband (undealiased) data: the inconsistency is reported, not asserted
    rng = np.random.default_rng(7)
    a = Field(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    b = Field(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    resid = trichotomy_residual(a, b, consistent=False)
    assert np.isfinite(resid)


def test_adjoint_pairing(grid):
    a = smooth_field(grid, seed=36)
    u = smooth_field(grid, seed=37)
    v = smooth_field(grid, seed=38)
    lhs = para(a, u, RAW).inner(v)
    rhs = u.inner(para_adjoint(a, v, RAW))
    assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1e-30)


def test_symmetric_average_self_adjoint(grid):
    cfg = ParaConfig(symmetric=True, implicit_p=False)
    a = Field.from_values(grid, np.real(smooth_field(grid, seed=39).values))
    u = smooth_field(grid, seed=40)
    v = smooth_field(grid, seed=41)
    lhs = para(a, u, cfg).inner(v)
    rhs = u.inner(para(a, v, cfg))
    assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1e-30)


def test_implicit_p_output_is_holomorphic(grid):
    cfg = ParaConfig(implicit_p=True)
    a = smooth_field(grid, seed=42)
    b = smooth_field(grid, seed=43)
    t = para(a, b, cfg)
    assert np.all(t.coef[grid.k >= 0] == 0.0)
    pi = balanced(a, b, cfg)
    assert np.all(pi.coef[grid.k >= 0] == 0.0)


def test_commutator_constant_symbol(grid):
    lo, hi = block_range(grid)
    const = Field.from_values(grid, np.full(grid.n, 1.7 + 0.0j))
    chi = Field.from_values(grid, np.exp(-((grid.alpha / 8.0) ** 2)))
    assert commutator_norm(const, chi, (lo + hi) // 2) < 1e-12


def test_commutator_unit_localizer(grid):
    lo, hi = block_range(grid)
    a = smooth_field(grid, seed=44, center=2.0 ** (lo + 2))
    one = Field.from_values(grid, np.ones(grid.n, dtype=complex))
    assert commutator_norm(a, one, (lo + hi) // 2) < 1e-12


def test_commutator_decays_with_band(grid):
    # single low-frequency symbol: the low-pass thresholds are fixed, and the
    # commutator is pure block-boundary leakage, decaying as the band rises
    lo, hi = block_range(grid)
    a, _ = mode_field(grid, grid.dk)
    chi = Field.from_values(grid, np.exp(-((grid.alpha / 8.0) ** 2)))
    norms = [commutator_norm(a, chi, m, seed=20 + i) for i, m in enumerate(range(hi - 3, hi))]
    assert norms[0] > norms[1] > norms[2]
