"""Normal-form transforms of the water-wave pair and their cubic sources.

The classical quadratic correction

    Wt = W - P[2Re(W) W_a],      Qt = Q - P[2Re(W) R]

removes quadratic interactions entirely, while the paradifferential variant

    Wt = W - T_{W_a} W - Pi(W_a, 2Re W),
    Qt = Q - T_R W  - Pi(R,  2Re W)

removes only the balanced ones, leaving paradifferential quadratic terms on
the left of the evolved system

    d_t Wt + d_a Qt - T_{2Re Wt_a} Qt_a + T_{2Re Qt_a} Wt_a = G,
    d_t Qt - i Wt + T_{2Re Qt_a} Qt_a = K,

where (G, K) are cubic and higher.  The explicit cubic parts are transcribed
below in `TERMS`, one constructor per term, at the granularity where every
term carries a definite interaction class: `resonant` (one conjugation and a
nonvanishing principal symbol), `nonresonant` (zero or two conjugations), or
`null` (one conjugation, vanishing symbol).  Both the derivation grouping
(g1..g3, k1..k3) and the class grouping are unions of the same atoms, and
independent whole-group transcriptions are kept in `_direct_groups` so the
two spellings can be cross-checked to machine precision.
"""

from dataclasses import dataclass

from .errors import InconsistentTimes, UnknownTerm
from .grid import project_neg
from .paradiff import DEFAULT, ParaConfig, balanced, para
from .dynamics import rhs_full


# transforms -----------------------------------------------------------------

def classical_nf(state):
    """Quadratic correction removing all quadratic interactions."""
    w2re = state.w.two_re()
    wt = state.w - project_neg(w2re * state.wa)
    qt = state.q - project_neg(w2re * state.r)
    return project_neg(wt), project_neg(qt)


@dataclass
class NormalFormState:
    """Paradifferential normal-form pair with its quadratic flux."""

    t: float
    wt: object
    qt: object
    f2: object  # P[conj(Qt_a) Wt_a - Qt_a conj(Wt_a)]

    @property
    def wt_a(self):
        return self.wt.deriv()

    @property
    def qt_a(self):
        return self.qt.deriv()


def para_nf(state, cfg=DEFAULT):
    """Partial (paradifferential) normal form of a state."""
    w2re = state.w.two_re()
    wt = project_neg(state.w - para(state.wa, state.w, cfg) - balanced(state.wa, w2re, cfg))
    qt = project_neg(state.q - para(state.r, state.w, cfg) - balanced(state.r, w2re, cfg))
    return NormalFormState(state.t, wt, qt, quadratic_flux(wt, qt))


def quadratic_flux(wt, qt):
    wa = wt.deriv()
    qa = qt.deriv()
    return project_neg(qa.conj() * wa - qa * wa.conj())


# the cubic source table -----------------------------------------------------

@dataclass(frozen=True)
class Term:
    tid: str
    group: str          # g1, g2, g3, k1, k2, k3
    klass: str          # resonant | nonresonant | null
    formula: str
    build: object


class TermInputs:
    """Fields a cubic term constructor consumes.

    `from_state_pair` takes true normal-form variables (derivatives are
    spectral); `from_ansatz` accepts independently supplied derivative
    fields, which is how monochromatic test profiles are injected.
    """

    __slots__ = ("wt", "qt", "wt_a", "qt_a", "qt_aa", "f2", "cfg")

    def __init__(self, wt, qt, wt_a, qt_a, f2, cfg):
        self.wt = wt
        self.qt = qt
        self.wt_a = wt_a
        self.qt_a = qt_a
        self.qt_aa = qt_a.deriv()
        self.f2 = f2
        self.cfg = cfg

    @classmethod
    def from_nf(cls, nf, cfg=DEFAULT):
        return cls(nf.wt, nf.qt, nf.wt_a, nf.qt_a, nf.f2, cfg)

    @classmethod
    def from_ansatz(cls, wt, wt_a, qt, qt_a, cfg=DEFAULT):
        f2 = project_neg(qt_a.conj() * wt_a - qt_a * wt_a.conj())
        return cls(wt, qt, wt_a, qt_a, f2, cfg)

    # shorthands used by the constructors
    def T(self, a, b):
        return para(a, b, self.cfg)

    def Pi(self, a, b):
        return balanced(a, b, self.cfg)


def _d(u):
    return u.deriv()


def _tr(u):
    return u.two_re()


TERMS = (
    # --- sources of the first equation, from the time derivative of Wt
    Term("g1.1", "g1", "nonresonant", "T[Wt'](Qt' Wt')",
         lambda v: v.T(v.wt_a, v.qt_a * v.wt_a)),
    Term("g1.2", "g1", "nonresonant", "T[(Qt' Wt')'] Wt",
         lambda v: v.T(_d(v.qt_a * v.wt_a), v.wt)),
    Term("g1.3", "g1", "nonresonant", "Pi(Wt', 2Re[Qt' Wt'])",
         lambda v: v.Pi(v.wt_a, _tr(v.qt_a * v.wt_a))),
    Term("g1.4", "g1", "nonresonant", "Pi((Qt' Wt')', Wt)",
         lambda v: v.Pi(_d(v.qt_a * v.wt_a), v.wt)),
    Term("g1.5", "g1", "resonant", "Pi((Qt' Wt')', conj Wt)",
         lambda v: v.Pi(_d(v.qt_a * v.wt_a), v.wt.conj())),
    # --- cancellations against d_a Qt
    Term("g2.1", "g2", "null", "-Wt' F2",
         lambda v: -1.0 * (v.wt_a * v.f2)),
    Term("g2.2", "g2", "null", "T[F2'] Wt",
         lambda v: v.T(_d(v.f2), v.wt)),
    Term("g2.3", "g2", "null", "Pi(F2', 2Re Wt)",
         lambda v: v.Pi(_d(v.f2), _tr(v.wt))),
    Term("g2.4", "g2", "null", "Pi(F2, Wt')",
         lambda v: v.Pi(v.f2, v.wt_a)),
    Term("g2.5", "g2", "null", "Pi(Wt', conj F2)",
         lambda v: v.Pi(v.wt_a, v.f2.conj())),
    Term("g2.6", "g2", "nonresonant", "-Pi(conj(Wt')^2, Qt')",
         lambda v: -1.0 * v.Pi(v.wt_a.conj() * v.wt_a.conj(), v.qt_a)),
    Term("g2.7", "g2", "resonant", "Pi(conj Qt', Wt'^2)",
         lambda v: v.Pi(v.qt_a.conj(), v.wt_a * v.wt_a)),
    Term("g2.8", "g2", "nonresonant", "-T[conj(Wt')^2] Qt'",
         lambda v: -1.0 * v.T(v.wt_a.conj() * v.wt_a.conj(), v.qt_a)),
    Term("g2.9", "g2", "nonresonant", "-T[conj Wt'] F2",
         lambda v: -1.0 * v.T(v.wt_a.conj(), v.f2)),
    Term("g2.10", "g2", "nonresonant", "T[conj Qt'] Wt'^2",
         lambda v: v.T(v.qt_a.conj(), v.wt_a * v.wt_a)),
    # --- rewriting the quadratic potentials in normal-form variables
    Term("g3.1", "g3", "nonresonant", "T[2Re(T[Wt']Wt + Pi(Wt', Wt))'] Qt'",
         lambda v: v.T(_tr(_d(v.T(v.wt_a, v.wt) + v.Pi(v.wt_a, v.wt))), v.qt_a)),
    Term("g3.2", "g3", "null", "T[2Re(Pi(Wt', conj Wt))'] Qt'",
         lambda v: v.T(_tr(_d(v.Pi(v.wt_a, v.wt.conj()))), v.qt_a)),
    Term("g3.3", "g3", "nonresonant", "-T[2Re Wt'](Qt' Wt')",
         lambda v: -1.0 * v.T(_tr(v.wt_a), v.qt_a * v.wt_a)),
    Term("g3.4", "g3", "null", "T[2Re Wt'] F2",
         lambda v: v.T(_tr(v.wt_a), v.f2)),
    Term("g3.5", "g3", "nonresonant", "T[2Re Wt'](T[Qt']Wt + Pi(Qt', 2Re Wt))'",
         lambda v: v.T(_tr(v.wt_a), _d(v.T(v.qt_a, v.wt) + v.Pi(v.qt_a, _tr(v.wt))))),
    Term("g3.6", "g3", "nonresonant",
         "T[2Re(Qt' Wt' - (T[Qt']Wt + Pi(Qt', Wt))')] Wt'",
         lambda v: v.T(_tr(v.qt_a * v.wt_a - _d(v.T(v.qt_a, v.wt) + v.Pi(v.qt_a, v.wt))), v.wt_a)),
    Term("g3.7", "g3", "null", "-T[2Re(Pi(Qt', conj Wt)')] Wt'",
         lambda v: -1.0 * v.T(_tr(_d(v.Pi(v.qt_a, v.wt.conj()))), v.wt_a)),
    Term("g3.8", "g3", "nonresonant", "-T[2Re Qt'](T[Wt']Wt + Pi(Wt', 2Re Wt))'",
         lambda v: -1.0 * v.T(_tr(v.qt_a), _d(v.T(v.wt_a, v.wt) + v.Pi(v.wt_a, _tr(v.wt))))),
    # --- sources of the second equation
    Term("k1.1", "k1", "nonresonant", "T[Qt' Qt''] Wt",
         lambda v: v.T(v.qt_a * v.qt_aa, v.wt)),
    Term("k1.2", "k1", "null", "T[P[|Qt'|^2]'] Wt",
         lambda v: v.T(_d(project_neg(v.qt_a * v.qt_a.conj())), v.wt)),
    Term("k1.3", "k1", "nonresonant", "T[Qt'](T[Wt']Qt' + Pi(Wt', Qt'))",
         lambda v: v.T(v.qt_a, v.T(v.wt_a, v.qt_a) + v.Pi(v.wt_a, v.qt_a))),
    Term("k1.4", "k1", "null", "Pi(Qt' Qt'', 2Re Wt)",
         lambda v: v.Pi(v.qt_a * v.qt_aa, _tr(v.wt))),
    Term("k1.5", "k1", "null", "Pi(P[|Qt'|^2]', 2Re Wt)",
         lambda v: v.Pi(_d(project_neg(v.qt_a * v.qt_a.conj())), _tr(v.wt))),
    Term("k1.6", "k1", "nonresonant", "Pi(Qt', 2Re[Qt' Wt'])",
         lambda v: v.Pi(v.qt_a, _tr(v.qt_a * v.wt_a))),
    Term("k1.7", "k1", "nonresonant", "-Pi(Wt' Qt', Qt')",
         lambda v: -1.0 * v.Pi(v.wt_a * v.qt_a, v.qt_a)),
    Term("k1.8", "k1", "null", "Pi(Qt', conj F2)",
         lambda v: v.Pi(v.qt_a, v.f2.conj())),
    Term("k1.9", "k1", "nonresonant", "-T[Qt' Wt'] Qt'",
         lambda v: -1.0 * v.T(v.qt_a * v.wt_a, v.qt_a)),
    Term("k2.1", "k2", "nonresonant", "i T[Wt'^2] Wt",
         lambda v: 1j * v.T(v.wt_a * v.wt_a, v.wt)),
    Term("k2.2", "k2", "null", "i Pi(Wt'^2, 2Re Wt)",
         lambda v: 1j * v.Pi(v.wt_a * v.wt_a, _tr(v.wt))),
    Term("k2.3", "k2", "null", "-T[F2] Qt'",
         lambda v: -1.0 * v.T(v.f2, v.qt_a)),
    Term("k3.1", "k3", "nonresonant", "-T[2Re(T[Qt']Wt + Pi(Qt', Wt))'] Qt'",
         lambda v: -1.0 * v.T(_tr(_d(v.T(v.qt_a, v.wt) + v.Pi(v.qt_a, v.wt))), v.qt_a)),
    Term("k3.2", "k3", "null", "-T[2Re(Pi(Qt', conj Wt))'] Qt'",
         lambda v: -1.0 * v.T(_tr(_d(v.Pi(v.qt_a, v.wt.conj()))), v.qt_a)),
    Term("k3.3", "k3", "nonresonant", "-T[2Re Qt'](T[Qt']Wt + Pi(Qt', 2Re Wt))'",
         lambda v: -1.0 * v.T(_tr(v.qt_a), _d(v.T(v.qt_a, v.wt) + v.Pi(v.qt_a, _tr(v.wt))))),
    Term("k3.4", "k3", "nonresonant", "T[2Re(Qt' Wt')] Qt'",
         lambda v: v.T(_tr(v.qt_a * v.wt_a), v.qt_a)),
    Term("k3.5", "k3", "nonresonant", "T[conj Qt'](Qt' Wt')",
         lambda v: v.T(v.qt_a.conj(), v.qt_a * v.wt_a)),
    Term("k3.6", "k3", "nonresonant", "T[Qt'] T[Qt'] Wt'",
         lambda v: v.T(v.qt_a, v.T(v.qt_a, v.wt_a))),
)

_BY_ID = {t.tid: t for t in TERMS}


def classify_cubic(term_id):
    """Interaction class of a cubic term: resonant, nonresonant, or null."""
    if term_id not in _BY_ID:
        raise UnknownTerm(f"no cubic term {term_id!r}")
    return _BY_ID[term_id].klass


def term_table_dump():
    lines = ["id\tgroup\tclass\tformula"]
    for t in TERMS:
        lines.append(f"{t.tid}\t{t.group}\t{t.klass}\t{t.formula}")
    return "\n".join(lines) + "\n"


def evaluate_terms(inputs):
    """Every term of the table on the given fields, keyed by id."""
    return {t.tid: t.build(inputs) for t in TERMS}


def _sum_terms(values, grid, select):
    total = None
    for t in TERMS:
        if select(t):
            total = values[t.tid] if total is None else total + values[t.tid]
    from .grid import Field

    return total if total is not None else Field.zero(grid)


def cubic_sources(nf, cfg=DEFAULT):
    """Explicit cubic sources (G3, K3) with all groupings retained."""
    values = evaluate_terms(TermInputs.from_nf(nf, cfg))
    grid = nf.wt.grid
    groups = {
        g: _sum_terms(values, grid, lambda t, g=g: t.group == g)
        for g in ("g1", "g2", "g3", "k1", "k2", "k3")
    }
    classes = {
        (side, c): _sum_terms(
            values, grid, lambda t, side=side, c=c: t.group.startswith(side) and t.klass == c
        )
        for side in ("g", "k")
        for c in ("resonant", "nonresonant", "null")
    }
    g3 = groups["g1"] + groups["g2"] + groups["g3"]
    k3 = groups["k1"] + groups["k2"] + groups["k3"]
    return g3, k3, groups, classes, values


def _direct_groups(inputs):
    """Whole-group transcriptions kept independent of the atom table."""
    v = inputs
    T, Pi = v.T, v.Pi
    wt, qt, wa, qa, f2 = v.wt, v.qt, v.wt_a, v.qt_a, v.f2
    g1 = T(wa, qa * wa) + T(_d(qa * wa), wt) + Pi(wa, _tr(qa * wa)) + Pi(_d(qa * wa), _tr(wt))
    g2 = (
        -1.0 * (wa * f2)
        + T(_d(f2), wt)
        + Pi(_d(f2), _tr(wt))
        + Pi(f2, wa)
        + Pi(wa, f2.conj())
        - Pi(wa.conj() * wa.conj(), qa)
        + Pi(qa.conj(), wa * wa)
        - T(wa.conj() * wa.conj(), qa)
        - T(wa.conj(), f2)
        + T(qa.conj(), wa * wa)
    )
    g3 = (
        T(_tr(_d(T(wa, wt) + Pi(wa, _tr(wt)))), qa)
        + T(_tr(wa), -1.0 * (qa * wa) + f2)
        + T(_tr(wa), _d(T(qa, wt) + Pi(qa, _tr(wt))))
        + T(_tr(qa * wa - _d(T(qa, wt) + Pi(qa, _tr(wt)))), wa)
        - T(_tr(qa), _d(T(wa, wt) + Pi(wa, _tr(wt))))
    )
    half_sq = 0.5 * (qa * qa) + project_neg(qa * qa.conj())
    k1 = (
        T(_d(half_sq), wt)
        + T(qa, T(wa, qa) + Pi(wa, qa))
        + Pi(_d(half_sq), _tr(wt))
        + Pi(qa, _tr(qa * wa))
        - Pi(wa * qa, qa)
        + Pi(qa, f2.conj())
        - T(qa * wa, qa)
    )
    k2 = 1j * T(wa * wa, wt) + 1j * Pi(wa * wa, _tr(wt)) - T(f2, qa)
    k3 = (
        -1.0 * T(_tr(_d(T(qa, wt) + Pi(qa, _tr(wt)))), qa)
        - T(_tr(qa), _d(T(qa, wt) + Pi(qa, _tr(wt))))
        + T(_tr(qa * wa), qa)
        + T(qa.conj(), qa * wa)
        + T(qa, T(qa, wa))
    )
    return g1, g2, g3, k1, k2, k3


def cubic_sources_direct(nf, cfg=DEFAULT):
    g1, g2, g3, k1, k2, k3 = _direct_groups(TermInputs.from_nf(nf, cfg))
    return g1 + g2 + g3, k1 + k2 + k3


# measured flow residuals ----------------------------------------------------

def nf_rate(state, cfg=DEFAULT):
    """Analytic time derivative of the normal-form pair via the chain rule."""
    dw, dq = rhs_full(state)
    dwa = dw.deriv()
    dr = (dq.deriv() - state.r * dwa) * state.aux.one_minus_y
    w2 = state.w.two_re()
    dw2 = dw.two_re()
    dwt = (
        dw
        - para(dwa, state.w, cfg)
        - para(state.wa, dw, cfg)
        - balanced(dwa, w2, cfg)
        - balanced(state.wa, dw2, cfg)
    )
    dqt = (
        dq
        - para(dr, state.w, cfg)
        - para(state.r, dw, cfg)
        - balanced(dr, w2, cfg)
        - balanced(state.r, dw2, cfg)
    )
    return project_neg(dwt), project_neg(dqt)


def residual_from_rate(nf, dwt, dqt, cfg=DEFAULT):
    """Measured sources: move every non-source term to the left side."""
    wa, qa = nf.wt_a, nf.qt_a
    g = dwt + qa - para(_tr(wa), qa, cfg) + para(_tr(qa), wa, cfg)
    k = dqt - 1j * nf.wt + para(_tr(qa), qa, cfg)
    return project_neg(g), project_neg(k)


def flow_residual_analytic(state, cfg=DEFAULT):
    nf = para_nf(state, cfg)
    dwt, dqt = nf_rate(state, cfg)
    g, k = residual_from_rate(nf, dwt, dqt, cfg)
    return nf, g, k


def flow_residual_centered(prev, mid, nxt, cfg=DEFAULT):
    dt1 = mid.t - prev.t
    dt2 = nxt.t - mid.t
    if abs(dt1 - dt2) > 1e-12 * max(abs(dt1), 1e-30) or dt1 <= 0:
        raise InconsistentTimes("snapshots must be equally spaced in time")
    nf_prev = para_nf(prev, cfg)
    nf_mid = para_nf(mid, cfg)
    nf_next = para_nf(nxt, cfg)
    dwt = (0.5 / dt1) * (nf_next.wt - nf_prev.wt)
    dqt = (0.5 / dt1) * (nf_next.qt - nf_prev.qt)
    g, k = residual_from_rate(nf_mid, dwt, dqt, cfg)
    return nf_mid, g, k


# scaling vector fields -------------------------------------------------------

@dataclass
class ScalingDerivatives:
    sw: object          # (t d_t + 2 a d_a) W
    sq: object
    frak_w: object      # diagonalized generator pair applied to (W, Q)
    frak_r: object
    tilde_w: object     # paradifferential scaling of the normal form
    tilde_q: object
    ts_defect_w: object  # tilde - (S - t*source) consistency residuals
    ts_defect_q: object


def scaling_fields(state, nf=None, cfg=DEFAULT):
    """Scaling vector field S = t d_t + 2 alpha d_alpha and its variants.

    t d_t is evaluated analytically through the flow, never by differencing
    stored snapshots.
    """
    t = state.t
    dw, dq = rhs_full(state)
    sw = t * dw + 2.0 * state.w.deriv().alpha_times()
    sq = t * dq + 2.0 * state.q.deriv().alpha_times()
    frak_w = sw - 2.0 * state.w
    frak_q = sq - 3.0 * state.q
    frak_r = frak_q - state.r * frak_w

    if nf is None:
        nf = para_nf(state, cfg)
    wa, qa = nf.wt_a, nf.qt_a
    tilde_w = (
        2.0 * wa.alpha_times()
        - t * qa
        + t * (para(_tr(wa), qa, cfg) - para(_tr(qa), wa, cfg))
    )
    tilde_q = 2.0 * qa.alpha_times() + 1j * t * nf.wt - t * para(_tr(qa), qa, cfg)

    dwt, dqt = nf_rate(state, cfg)
    g, k = residual_from_rate(nf, dwt, dqt, cfg)
    swt = t * dwt + 2.0 * wa.alpha_times()
    sqt = t * dqt + 2.0 * qa.alpha_times()
    ts_w = swt - t * g - tilde_w
    ts_q = sqt - t * k - tilde_q
    return ScalingDerivatives(sw, sq, frak_w, frak_r, tilde_w, tilde_q, ts_w, ts_q)
