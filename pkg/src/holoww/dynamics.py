"""The gravity water-wave system in holomorphic coordinates.

State is the holomorphic pair (W, Q): W parametrizes the free surface as
alpha -> alpha + W(alpha) and Q is the complex velocity potential trace.
The evolution is

    W_t + F (1 + W_a) = 0,
    Q_t + F Q_a - i W + P[conj(R) R] = 0,

with the diagonal variables bW = W_a, R = Q_a / (1 + W_a), the Jacobian
J = |1 + W_a|^2, Y = bW / (1 + bW), the transport speed

    b = P[R (1 - conj Y)] + conj P[R (1 - conj Y)],

the Taylor coefficient perturbation a = i (conj z - z) with z = P[R conj(R)_a]
(so 1 + a is the normal pressure derivative, real by construction), and

    F = P[(Q_a - conj Q_a) / J] = R + P[conj(R) Y - R conj(Y)],
    M = P[R conj(Y)_a - conj(R)_a Y] + conj(...same...),

where both F and M are computed through both of their expressions.  The two
M forms differ on a torus by a spatial constant of size O(|data|^2 / length)
(a wrap-around artifact of splitting the k = 0 mode between the projectors),
so the rational form is reported with its mean removed.

The differentiated system evolves (bW, R):

    D_t bW + (1 + bW) R_a / (1 + conj bW) = (1 + bW) M,
    D_t R = i (bW - a) / (1 + bW),        D_t = d_t + b d_a,

and is self-contained, which `DiffState`/`rhs_diff` exploit.

All right-hand sides are projected onto the holomorphic class; for
holomorphic input the projection only pins the k >= 0 modes that the torus
discretization would otherwise populate at O(1/length).
"""

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJacobian, StabilityViolation
from .grid import (
    Field,
    GridSpec,
    frac_deriv,
    project_neg,
    read_field,
    write_field,
)

JACOBIAN_FLOOR = 0.25


class _Aux:
    """Auxiliary fields shared by the full and the differentiated system."""

    __slots__ = ("wa", "r", "y", "jac", "f", "f_rational", "b", "a", "m",
                 "m_rational", "one_minus_y", "one_minus_ybar")

    def __init__(self, wa, r, jac=None):
        grid = wa.grid
        one = Field.from_values(grid, np.ones(grid.n, dtype=complex))
        onewa = Field.from_values(grid, 1.0 + wa.values)
        if jac is None:
            jac = Field.from_values(grid, np.abs(onewa.values) ** 2)
        if float(np.min(np.real(jac.values))) < JACOBIAN_FLOOR:
            raise DegenerateJacobian("min J dropped below 1/4")
        self.wa = wa
        self.jac = jac
        self.y = Field.from_values(grid, wa.values / onewa.values, dealias=True)
        self.one_minus_y = one - self.y
        self.one_minus_ybar = one - self.y.conj()
        self.r = r
        rbar = r.conj()
        ybar = self.y.conj()
        # F, both ways
        qa = r * onewa
        self.f_rational = project_neg((qa - qa.conj()) / jac)
        self.f = r + project_neg(rbar * self.y - r * ybar)
        # transport speed, manifestly real
        zb = project_neg(r * self.one_minus_ybar)
        self.b = Field.from_values(grid, 2.0 * np.real(zb.values))
        # Taylor coefficient perturbation, manifestly real
        za = project_neg(r * rbar.deriv())
        self.a = Field.from_values(grid, 2.0 * np.imag(za.values))
        # M, both ways; the rational form is defined modulo constants
        zm = project_neg(r * ybar.deriv() - rbar.deriv() * self.y)
        self.m = Field.from_values(grid, 2.0 * np.real(zm.values))
        m_rat = r.deriv() * self.one_minus_ybar + rbar.deriv() * self.one_minus_y - self.b.deriv()
        self.m_rational = m_rat.demean()


class WaveState:
    """Snapshot of the full system at time t, auxiliaries precomputed."""

    __slots__ = ("t", "w", "q", "aux")

    def __init__(self, t, w, q):
        self.t = t
        self.w = project_neg(w)
        self.q = project_neg(q)
        wa = self.w.deriv()
        onewa = Field.from_values(w.grid, 1.0 + wa.values)
        jac = Field.from_values(w.grid, np.abs(onewa.values) ** 2)
        if float(np.min(np.real(jac.values))) < JACOBIAN_FLOOR:
            raise DegenerateJacobian("min J dropped below 1/4")
        r = Field.from_values(w.grid, self.q.deriv().values / onewa.values, dealias=True)
        self.aux = _Aux(wa, r, jac)

    @property
    def grid(self):
        return self.w.grid

    @property
    def wa(self):
        return self.aux.wa

    @property
    def r(self):
        return self.aux.r


class DiffState:
    """Snapshot of the self-contained differentiated system (bW, R)."""

    __slots__ = ("t", "wa", "r", "aux")

    def __init__(self, t, wa, r):
        self.t = t
        self.wa = project_neg(wa)
        self.r = project_neg(r)
        self.aux = _Aux(self.wa, self.r)

    @property
    def grid(self):
        return self.wa.grid


def rhs_full(state):
    """Projected time derivatives (dW/dt, dQ/dt)."""
    aux = state.aux
    dw = project_neg(-1.0 * (aux.f + aux.f * state.wa))
    qa = state.q.deriv()
    dq = project_neg(-1.0 * (aux.f * qa) - aux.r.conj() * aux.r) + 1j * state.w
    return dw, project_neg(dq)


def rhs_diff(state):
    """Projected time derivatives (d(bW)/dt, dR/dt) of the diagonal pair."""
    aux = state.aux
    grid = state.grid
    onewa = Field.from_values(grid, 1.0 + aux.wa.values)
    dwa = (
        -1.0 * (aux.b * aux.wa.deriv())
        - onewa * aux.r.deriv() * aux.one_minus_ybar
        + onewa * aux.m
    )
    dr = -1.0 * (aux.b * aux.r.deriv()) + 1j * ((aux.wa - aux.a) * aux.one_minus_y)
    return project_neg(dwa), project_neg(dr)


def rhs_diff_unprojected_defect(state):
    """Norm of the k >= 0 content the projection removes (diagnostic)."""
    aux = state.aux
    grid = state.grid
    onewa = Field.from_values(grid, 1.0 + aux.wa.values)
    dwa = (
        -1.0 * (aux.b * aux.wa.deriv())
        - onewa * aux.r.deriv() * aux.one_minus_ybar
        + onewa * aux.m
    )
    dr = -1.0 * (aux.b * aux.r.deriv()) + 1j * ((aux.wa - aux.a) * aux.one_minus_y)
    dwa_pos = dwa - project_neg(dwa)
    dr_pos = dr - project_neg(dr)
    return math.sqrt(dwa_pos.l2() ** 2 + dr_pos.l2() ** 2)


def hamiltonian(state):
    """Conserved energy; the imaginary part is a roundoff diagnostic."""
    return complex(hamiltonian_density(state).integral())


def hamiltonian_density(state):
    """Energy density  |W|^2 + Im(Q conj(Q_a)) - Re(conj(W)^2 W_a).

    Equal weights on the |W|^2 and Q terms are forced by invariance of the
    linear flow (a mixed-branch term |k| Im(w conj q) survives otherwise),
    and the cubic coefficient then follows from the conformal potential
    energy (1/2) int (Im W)^2 (1 + Re W_a); the whole expression is four
    times the physical energy and is exactly conserved.
    """
    w, q = state.w, state.q
    wv = w.values
    qv = q.values
    qav = q.deriv().values
    wav = state.wa.values
    dens = (
        np.abs(wv) ** 2
        + (qv * np.conj(qav) - np.conj(qv) * qav) / 2j
        - 0.5 * (np.conj(wv) ** 2 * wav + wv**2 * np.conj(wav))
    )
    return Field.from_values(state.grid, dens)


def linearize(state, dir_w, dir_q, rel_step=1e-5, order=2):
    """Directional derivative of `rhs_full` at `state` along (dir_w, dir_q).

    Central differences in the real parameter of the ray; exact on the linear
    part of the flow.  Returns the linearized rates (dw/dt, dq/dt) and the
    rate of the good variable r = q - R w, using the base-state dR/dt.
    """
    scale = max(dir_w.linf(), dir_q.linf(), 1e-300)
    h = rel_step / scale

    def shifted(s):
        return WaveState(state.t, state.w + s * dir_w, state.q + s * dir_q)

    def rates(s):
        return rhs_full(shifted(s))

    if order == 2:
        wp, qp = rates(h)
        wm, qm = rates(-h)
        dw = (0.5 / h) * (wp - wm)
        dq = (0.5 / h) * (qp - qm)
    elif order == 4:
        w1, q1 = rates(h)
        w2, q2 = rates(2 * h)
        w3, q3 = rates(-h)
        w4, q4 = rates(-2 * h)
        dw = (1.0 / (12 * h)) * (8.0 * (w1 - w3) - (w2 - w4))
        dq = (1.0 / (12 * h)) * (8.0 * (q1 - q3) - (q2 - q4))
    else:
        raise ValueError("order must be 2 or 4")

    base_dw, base_dq = rhs_full(state)
    dr_base = (base_dq.deriv() - state.r * base_dw.deriv()) * state.aux.one_minus_y
    dir_r = project_neg(dir_q - state.r * dir_w)
    rate_r = dq - dr_base * dir_w - state.r * dw
    return dw, project_neg(dq), project_neg(rate_r), dir_r


# time stepping --------------------------------------------------------------

RK4_PHASE_MARGIN = 2.8  # |dt * omega| bound for the classical scheme


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    scheme: str = "rk4_integrating_factor"
    dealias: bool = True

    def __post_init__(self):
        if self.scheme not in ("rk4", "rk4_integrating_factor"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    def validate(self, grid):
        omega_max = math.sqrt(grid.k_max)
        if self.dt * omega_max >= RK4_PHASE_MARGIN:
            raise StabilityViolation(
                f"dt*max(omega) = {self.dt * omega_max:.3f} >= {RK4_PHASE_MARGIN}"
            )


def _nonlinear_rates(state):
    """rhs_full minus the linear part (-Q_a, iW)."""
    dw, dq = rhs_full(state)
    return dw + state.q.deriv(), dq - 1j * state.w


def _linear_phases(grid, dt):
    k = grid.k
    omega = np.sqrt(np.abs(k))
    zp = np.exp(1j * omega * dt)
    return zp, np.conj(zp)


def _to_diag(grid, wc, qc):
    root = np.sqrt(np.abs(grid.k))
    return wc + root * qc, wc - root * qc


def _from_diag(grid, zp, zm):
    neg = grid.k < 0
    root = np.where(neg, np.sqrt(np.abs(grid.k)), 1.0)
    wc = 0.5 * (zp + zm)
    qc = np.where(neg, 0.5 * (zp - zm) / root, 0.0)
    return np.where(neg, wc, 0.0), qc


def step(state, cfg):
    """One Runge-Kutta step; the integrating-factor variant advances the
    dispersive linear part (omega = sqrt|k| after diagonalization) exactly."""
    cfg.validate(state.grid)
    if cfg.scheme == "rk4":
        return _step_rk4(state, cfg)
    return _step_rk4_if(state, cfg)


def _step_rk4(state, cfg):
    dt = cfg.dt
    t, w, q = state.t, state.w, state.q

    k1w, k1q = rhs_full(state)
    k2w, k2q = rhs_full(WaveState(t + dt / 2, w + (dt / 2) * k1w, q + (dt / 2) * k1q))
    k3w, k3q = rhs_full(WaveState(t + dt / 2, w + (dt / 2) * k2w, q + (dt / 2) * k2q))
    k4w, k4q = rhs_full(WaveState(t + dt, w + dt * k3w, q + dt * k3q))
    w1 = w + (dt / 6) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    q1 = q + (dt / 6) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    if cfg.dealias:
        w1, q1 = w1.dealiased(), q1.dealiased()
    return WaveState(t + dt, w1, q1)


def _step_rk4_if(state, cfg):
    grid = state.grid
    dt = cfg.dt
    t = state.t
    ep_f, em_f = _linear_phases(grid, dt)
    ep_h, em_h = _linear_phases(grid, dt / 2)

    def nl_diag(s):
        nw, nq = _nonlinear_rates(s)
        return _to_diag(grid, nw.coef, nq.coef)

    def make_state(tt, zp, zm):
        wc, qc = _from_diag(grid, zp, zm)
        w = Field(grid, np.where(grid.dealias_mask, wc, 0.0) if cfg.dealias else wc)
        q = Field(grid, np.where(grid.dealias_mask, qc, 0.0) if cfg.dealias else qc)
        return WaveState(tt, w, q)

    zp0, zm0 = _to_diag(grid, state.w.coef, state.q.coef)
    ap, am = nl_diag(state)

    s2 = make_state(t + dt / 2, ep_h * (zp0 + dt / 2 * ap), em_h * (zm0 + dt / 2 * am))
    bp, bm = nl_diag(s2)

    s3 = make_state(t + dt / 2, ep_h * zp0 + dt / 2 * bp, em_h * zm0 + dt / 2 * bm)
    cp, cm = nl_diag(s3)

    s4 = make_state(t + dt, ep_f * zp0 + dt * ep_h * cp, em_f * zm0 + dt * em_h * cm)
    dp, dm = nl_diag(s4)

    zp1 = ep_f * zp0 + dt / 6 * (ep_f * ap + 2.0 * ep_h * (bp + cp) + dp)
    zm1 = em_f * zm0 + dt / 6 * (em_f * am + 2.0 * em_h * (bm + cm) + dm)
    return make_state(t + dt, zp1, zm1)


def step_diff(state, cfg):
    """RK4 step of the self-contained differentiated system (plain scheme)."""
    cfg.validate(state.grid)
    dt = cfg.dt
    t, wa, r = state.t, state.wa, state.r

    k1w, k1r = rhs_diff(state)
    k2w, k2r = rhs_diff(DiffState(t + dt / 2, wa + (dt / 2) * k1w, r + (dt / 2) * k1r))
    k3w, k3r = rhs_diff(DiffState(t + dt / 2, wa + (dt / 2) * k2w, r + (dt / 2) * k2r))
    k4w, k4r = rhs_diff(DiffState(t + dt, wa + dt * k3w, r + dt * k3r))
    wa1 = (wa + (dt / 6) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)).dealiased()
    r1 = (r + (dt / 6) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)).dealiased()
    return DiffState(t + dt, wa1, r1)


def step_with_linearized(state, lin_w, lin_q, cfg, rel_step=1e-6):
    """Joint RK4 step of the base flow and a linearized perturbation."""
    cfg.validate(state.grid)
    dt = cfg.dt
    t = state.t

    def rates(s, lw, lq):
        bw, bq = rhs_full(s)
        dw, dq, _, _ = linearize(s, lw, lq, rel_step=rel_step)
        return bw, bq, dw, dq

    k1 = rates(state, lin_w, lin_q)
    s2 = WaveState(t + dt / 2, state.w + (dt / 2) * k1[0], state.q + (dt / 2) * k1[1])
    k2 = rates(s2, lin_w + (dt / 2) * k1[2], lin_q + (dt / 2) * k1[3])
    s3 = WaveState(t + dt / 2, state.w + (dt / 2) * k2[0], state.q + (dt / 2) * k2[1])
    k3 = rates(s3, lin_w + (dt / 2) * k2[2], lin_q + (dt / 2) * k2[3])
    s4 = WaveState(t + dt, state.w + dt * k3[0], state.q + dt * k3[1])
    k4 = rates(s4, lin_w + dt * k3[2], lin_q + dt * k3[3])

    w1 = (state.w + (dt / 6) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])).dealiased()
    q1 = (state.q + (dt / 6) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])).dealiased()
    lw1 = (lin_w + (dt / 6) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])).dealiased()
    lq1 = (lin_q + (dt / 6) * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])).dealiased()
    return WaveState(t + dt, w1, q1), project_neg(lw1), project_neg(lq1)


def evolve(state, cfg, t_end, observer=None):
    """March to t_end (inclusive up to roundoff), calling observer per step."""
    n = max(1, int(round((t_end - state.t) / cfg.dt)))
    for _ in range(n):
        state = step(state, cfg)
        if observer is not None:
            observer(state)
    return state


def linear_propagate(state, t_target):
    """Exact solution of the linearized system W_t = -Q_a, Q_t = iW."""
    grid = state.grid
    dt = t_target - state.t
    ep, em = _linear_phases(grid, dt)
    zp, zm = _to_diag(grid, state.w.coef, state.q.coef)
    wc, qc = _from_diag(grid, ep * zp, em * zm)
    return WaveState(t_target, Field(grid, wc), Field(grid, qc))


# initial data ---------------------------------------------------------------

def packet_data(grid, eps, velocity=1.0, width=None, center=0.0):
    """Right-moving localized data: a Gaussian spectral bump for W_a at the
    group-velocity frequency -1/(4 v^2), with Q = |D|^(-1/2) W so the pair
    rides the right-moving branch of the dispersion relation."""
    k0 = -1.0 / (4.0 * velocity**2)
    width = width if width is not None else 6.0 / abs(k0)
    sigma = 1.0 / width
    k = grid.k
    envelope = np.exp(-((k - k0) ** 2) / (2.0 * sigma**2))
    envelope[k >= 0] = 0.0
    wa = Field(grid, envelope * np.exp(-1j * k * center)).dealiased()
    scale = eps / max(wa.linf(), 1e-300)
    wa = project_neg(scale * wa)
    w = project_neg(wa.antideriv())
    q = project_neg(frac_deriv(w, -0.5))
    return WaveState(0.0, w, q)


def plateau_data(grid, eps, center=-0.25, plateau=0.15, ramp=0.05, t0=0.0):
    """Right-moving data with a flat spectral shelf around `center`.

    The flat-top profile makes ray functionals sample a locally constant
    spectral density, which is what long-time packet diagnostics assume.
    """
    k = grid.k
    d = np.abs(k - center)
    x = np.clip((d - plateau) / ramp, 0.0, 1.0)
    prof = np.where(d <= plateau, 1.0, 0.5 * (1.0 + np.cos(np.pi * x)))
    prof[(k >= 0) | (x >= 1.0)] = 0.0
    w = project_neg(Field(grid, prof.astype(complex)).dealiased())
    w = project_neg((eps / max(w.linf(), 1e-300)) * w)
    q = project_neg(frac_deriv(w, -0.5))
    return WaveState(t0, w, q)


# checkpoints ----------------------------------------------------------------

def save_state(path, state, extra=None):
    with open(path, "w") as fh:
        meta = {"t": state.t}
        meta.update(extra or {})
        fh.write(json.dumps(meta) + "\n")
        write_field(fh, state.w)
        write_field(fh, state.q)


def load_state(path):
    with open(path) as fh:
        meta = json.loads(fh.readline())
        w = read_field(fh)
        q = read_field(fh, grid=w.grid)
    return WaveState(meta["t"], w, q), meta


def state_to_text(state):
    buf = io.StringIO()
    buf.write(json.dumps({"t": state.t}) + "\n")
    write_field(buf, state.w)
    write_field(buf, state.q)
    return buf.getvalue()
