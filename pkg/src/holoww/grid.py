"""Periodic grid, Fourier-side field container, and basic spectral operators.

Fields are stored by their Fourier coefficients c_m (numpy fft ordering) with
the convention

    u(alpha) = sum_m c_m exp(i k_m alpha),   k_m = (2 pi / length) * m,

on the centered grid alpha_j = (j - n/2) * length / n.  With this
normalization Parseval reads  int |u|^2 d(alpha) = length * sum |c_m|^2,
so a single mode exp(i k alpha) has L2 norm sqrt(length).

The holomorphic class of the water-wave problem is the set of fields whose
coefficients vanish for k >= 0; `project_neg` maps onto it.  The zero mode is
always dropped by the projector (velocity potentials are defined modulo
constants, and pinning the mean keeps homogeneous negative-order multipliers
finite).
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridMismatch, NegativePowerOnMean


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid: period `length`, `n` modes, dealias fraction."""

    length: float = 400.0 * math.pi
    n: int = 2048
    dealias: float = 2.0 / 3.0

    def __post_init__(self):
        if self.n < 16 or self.n % 2:
            raise ValueError("mode count must be even and at least 16")
        if not 0.0 < self.dealias <= 1.0:
            raise ValueError("dealias fraction must lie in (0, 1]")
        if self.length <= 0:
            raise ValueError("period must be positive")

    @cached_property
    def modes(self):
        """Integer mode numbers m in fft order."""
        return np.rint(np.fft.fftfreq(self.n) * self.n).astype(int)

    @cached_property
    def k(self):
        """Wavenumbers k_m in fft order."""
        return 2.0 * np.pi / self.length * self.modes

    @cached_property
    def abs_k(self):
        return np.abs(self.k)

    @cached_property
    def alpha(self):
        return (np.arange(self.n) - self.n // 2) * (self.length / self.n)

    @cached_property
    def center_phase(self):
        # fft of samples on the centered grid picks up (-1)^m per mode
        return np.where(self.modes % 2 == 0, 1.0, -1.0)

    @cached_property
    def dealias_mask(self):
        cut = math.floor(self.dealias * self.n / 2)
        mask = np.abs(self.modes) <= cut
        mask[self.modes == -(self.n // 2)] = False  # unpaired Nyquist mode
        return mask

    @property
    def dk(self):
        return 2.0 * np.pi / self.length

    @property
    def k_max(self):
        return np.pi * self.n / self.length

    def coef_from_values(self, values):
        return np.fft.fft(values) / self.n * self.center_phase

    def values_from_coef(self, coef):
        return np.fft.ifft(coef * self.center_phase * self.n)


class Field:
    """Complex scalar field on a `GridSpec`, stored spectrally.

    Values are immutable by convention: every operation returns a new Field.
    Pointwise products go through `__mul__`, which applies the 2/3-rule mask
    afterwards so that products of band-limited fields stay alias-free.
    """

    __slots__ = ("grid", "coef", "_values")

    def __init__(self, grid, coef, values=None):
        self.grid = grid
        self.coef = coef
        self._values = values

    @classmethod
    def from_values(cls, grid, values, dealias=False):
        coef = grid.coef_from_values(np.asarray(values, dtype=complex))
        if dealias:
            coef = np.where(grid.dealias_mask, coef, 0.0)
            return cls(grid, coef)
        return cls(grid, coef, np.asarray(values, dtype=complex))

    @classmethod
    def zero(cls, grid):
        return cls(grid, np.zeros(grid.n, dtype=complex))

    @property
    def values(self):
        if self._values is None:
            self._values = self.grid.values_from_coef(self.coef)
        return self._values

    def _check(self, other):
        if self.grid is not other.grid and self.grid != other.grid:
            raise GridMismatch("fields live on different grids")

    def __add__(self, other):
        self._check(other)
        return Field(self.grid, self.coef + other.coef)

    def __sub__(self, other):
        self._check(other)
        return Field(self.grid, self.coef - other.coef)

    def __neg__(self):
        return Field(self.grid, -self.coef)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check(other)
            prod = self.values * other.values
            return Field.from_values(self.grid, prod, dealias=True)
        return Field(self.grid, self.coef * other)

    def __rmul__(self, scalar):
        return Field(self.grid, self.coef * scalar)

    def __truediv__(self, other):
        if isinstance(other, Field):
            self._check(other)
            quot = self.values / other.values
            return Field.from_values(self.grid, quot, dealias=True)
        return Field(self.grid, self.coef / other)

    def conj(self):
        return Field.from_values(self.grid, np.conj(self.values))

    def two_re(self):
        """u + conj(u), i.e. twice the pointwise real part."""
        return Field.from_values(self.grid, 2.0 * np.real(self.values))

    def deriv(self, order=1):
        return Field(self.grid, self.coef * (1j * self.grid.k) ** order)

    def antideriv(self):
        """Inverse of d/d(alpha) on zero-mean fields (mean of output is 0)."""
        k = self.grid.k
        out = np.zeros_like(self.coef)
        nz = k != 0
        out[nz] = self.coef[nz] / (1j * k[nz])
        return Field(self.grid, out)

    def demean(self):
        coef = self.coef.copy()
        coef[self.grid.modes == 0] = 0.0
        return Field(self.grid, coef)

    def mean(self):
        return complex(self.coef[self.grid.modes == 0][0])

    def dealiased(self):
        return Field(self.grid, np.where(self.grid.dealias_mask, self.coef, 0.0))

    def alpha_times(self):
        """Pointwise multiplication by the centered coordinate array."""
        return Field.from_values(self.grid, self.grid.alpha * self.values)

    # norms and pairings ---------------------------------------------------

    def l2(self):
        return math.sqrt(self.grid.length * float(np.sum(np.abs(self.coef) ** 2)))

    def linf(self):
        return float(np.max(np.abs(self.values)))

    def lp(self, p):
        v = np.abs(self.values) ** p
        return float((np.mean(v) * self.grid.length) ** (1.0 / p))

    def integral(self):
        return self.grid.length * self.mean()

    def inner(self, other):
        """Complex L2 pairing  int u conj(v) d(alpha)."""
        self._check(other)
        return self.grid.length * complex(np.vdot(other.coef, self.coef))

    def evaluate_at(self, points):
        """Evaluate the trigonometric interpolant at arbitrary alpha values."""
        pts = np.atleast_1d(np.asarray(points, dtype=float))
        phases = np.exp(1j * np.outer(pts, self.grid.k))
        out = phases @ self.coef
        return out if np.ndim(points) else complex(out[0])


class HoloField(Field):
    """Field whose spectrum is supported on strictly negative wavenumbers."""

    __slots__ = ()


def project_neg(u):
    """Projector P onto negative frequencies; the k = 0 mode is dropped."""
    coef = np.where(u.grid.k < 0, u.coef, 0.0)
    return HoloField(u.grid, coef)


def project_pos(u):
    """Conjugate projector keeping strictly positive frequencies."""
    coef = np.where(u.grid.k > 0, u.coef, 0.0)
    return Field(u.grid, coef)


def pos_leakage(u):
    """Relative magnitude of content at k >= 0; zero for the holomorphic class."""
    amp = np.abs(u.coef)
    top = float(np.max(amp[u.grid.k >= 0], initial=0.0))
    scale = float(np.max(amp, initial=0.0))
    return top / scale if scale > 0 else 0.0


def frac_deriv(u, s):
    """Homogeneous multiplier |k|^s.  |D|^0 is the identity minus the mean."""
    grid = u.grid
    if s < 0:
        scale = float(np.max(np.abs(u.coef), initial=0.0))
        if abs(u.mean()) > 1e-13 * max(scale, 1e-300):
            raise NegativePowerOnMean("|D|^s with s < 0 needs a zero-mean field")
    mult = np.zeros(grid.n)
    nz = grid.abs_k > 0
    mult[nz] = grid.abs_k[nz] ** s
    return Field(grid, u.coef * mult)


def bracket_deriv(u, s):
    """Inhomogeneous multiplier <k>^s = (1 + k^2)^(s/2)."""
    mult = (1.0 + u.grid.k**2) ** (s / 2.0)
    return Field(u.grid, u.coef * mult)


def pair_sobolev(pair, s, homogeneous=True):
    """Norm of (w, r) with first slot measured in L2 and second in H^(1/2),
    both weighted by |k|^s (homogeneous) or <k>^s."""
    w, r = pair
    ws = frac_deriv(w, s) if homogeneous else bracket_deriv(w, s)
    rs = frac_deriv(r, s + 0.5) if homogeneous else frac_deriv(bracket_deriv(r, s), 0.5)
    return math.sqrt(ws.l2() ** 2 + rs.l2() ** 2)


def pair_sobolev_from_deriv(w, q_alpha, s):
    """Same pair norm, with the second slot handed over as q_alpha.

    Uses ||D|^(s+1/2) q| = ||D|^(s-1/2) q_alpha| mode by mode, so no
    antiderivative is needed (means of q_alpha blocks are ignored).
    """
    ws = frac_deriv(w, s)
    rs = frac_deriv(q_alpha.demean(), s - 0.5)
    return math.sqrt(ws.l2() ** 2 + rs.l2() ** 2)


# serialization ------------------------------------------------------------

def save_field(path, u):
    """Columnar text dump: header with grid data, one `m re im` row per mode."""
    with open(path, "w") as fh:
        write_field(fh, u)


def write_field(fh, u):
    g = u.grid
    fh.write(f"# length={g.length!r} n={g.n} dealias={g.dealias!r}\n")
    for m, c in zip(g.modes, u.coef):
        fh.write(f"{m} {float(c.real)!r} {float(c.imag)!r}\n")


def load_field(path):
    with open(path) as fh:
        return read_field(fh)


def read_field(fh, grid=None):
    header = fh.readline().split()
    meta = dict(item.split("=") for item in header[1:])
    g = grid or GridSpec(float(meta["length"]), int(meta["n"]), float(meta["dealias"]))
    coef = np.zeros(g.n, dtype=complex)
    order = {m: i for i, m in enumerate(g.modes)}
    for _ in range(g.n):
        m_s, re_s, im_s = fh.readline().split()
        coef[order[int(m_s)]] = complex(float(re_s), float(im_s))
    return Field(g, coef)
