"""Numerical cross-validation of the reduction chain.

The reduced Hamiltonians are integrated in time with mpmath's adaptive
Taylor method at extended precision, together with the time-domain normal
variational equations taken verbatim:

  sphere:     dp1/dt = -p cot(th) p1 + (2p + p_th - p/(mu sin^2 th)) p2,
              dp2/dt = -p_th p1 + p cot(th) p2;
  hyperbolic: dp1/dt = -p coth(th) p1 - (2p + p_th + p/(mu sinh^2 th)) p2,
              dp2/dt = -p_th p1 + p coth(th) p2.

Nothing from the z-domain construction enters the integration; the z-domain
data (C, f, r and the scaling p2 = y sqrt(C) f^(1/4)) is only applied
afterwards, so a small residual y'' - r y certifies the whole derivation
chain against the dynamics.

z(t) = (p_theta(t) + mu p)/alpha is monotone between turning points of
p_theta; each monotone arc is compared independently.  Grid points keep a
configurable margin (default 0.06) from every real singular point; the
second derivative is taken with a five-point stencil on a uniform grid, so
the dominant error is the O(h^4) truncation, far below the 1e-6 acceptance
threshold at the working precision (30 significant digits by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .fields import FieldElement
from .ratfunc import RationalFunction
from .reduction import (
    Potential,
    ProblemInstance,
    Space,
    build_first_order,
    to_normal_form,
)

__all__ = [
    "PoissonStructure",
    "poisson_structure",
    "OrbitState",
    "hamiltonian_rhs",
    "full_system_rhs",
    "Trajectory",
    "integrate_orbit",
    "integrate_full",
    "NVESolution",
    "integrate_nve_time",
    "ChainReport",
    "compare_chain",
    "crosscheck",
    "OrbitDomainError",
]


class OrbitDomainError(ValueError):
    """No admissible real orbit arc at the requested starting point."""


def _mpf(x) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _fe_to_mpc(x: FieldElement) -> mp.mpc:
    a = mp.mpc(_mpf(x.a.re), _mpf(x.a.im))
    if x.b.is_zero():
        return a
    b = mp.mpc(_mpf(x.b.re), _mpf(x.b.im))
    d = mp.mpc(_mpf(x.d.re), _mpf(x.d.im))
    return a + b * mp.sqrt(d)


def eval_ratfunc(rf: RationalFunction, z) -> mp.mpc:
    """Evaluate an exact rational function at an mpmath point."""
    z = mp.mpc(z)
    num = mp.mpc(0)
    for c in reversed(rf.num.coeffs):
        num = num * z + _fe_to_mpc(c)
    den = mp.mpc(0)
    for c in reversed(rf.den.coeffs):
        den = den * z + _fe_to_mpc(c)
    return num / den


# ---------------------------------------------------------------------------
# Poisson structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoissonStructure:
    """Structure constants {p_i, p_j} = sum_k c[i][j][k] p_k and the Casimir
    signature (s0, s1, s2) of s0 p0^2 + s1 p1^2 + s2 p2^2."""

    space: Space
    constants: tuple  # c[i][j][k] as Fractions
    casimir_signs: tuple[int, int, int]

    def bracket(self, i: int, j: int) -> tuple[Fraction, Fraction, Fraction]:
        return self.constants[i][j]

    def check_antisymmetry(self) -> bool:
        c = self.constants
        return all(c[i][j][k] == -c[j][i][k]
                   for i in range(3) for j in range(3) for k in range(3))

    def check_jacobi(self) -> bool:
        """{p_i,{p_j,p_k}} + cyclic = 0, exactly, coefficient by coefficient."""
        c = self.constants
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    for l in range(3):
                        total = Fraction(0)
                        for m in range(3):
                            total += c[j][k][m] * c[i][m][l]
                            total += c[k][i][m] * c[j][m][l]
                            total += c[i][j][m] * c[k][m][l]
                        if total != 0:
                            return False
        return True

    def check_casimir(self) -> bool:
        """{sum_j s_j p_j^2, p_i} = 0 as a polynomial identity."""
        c = self.constants
        s = self.casimir_signs
        for i in range(3):
            # coefficient of p_j p_k in sum_j 2 s_j p_j {p_j, p_i}
            coeff = [[Fraction(0)] * 3 for _ in range(3)]
            for j in range(3):
                for k in range(3):
                    coeff[min(j, k)][max(j, k)] += 2 * s[j] * c[j][i][k]
            if any(coeff[a][b] != 0 for a in range(3) for b in range(3)):
                return False
        return True


def poisson_structure(space: Space) -> PoissonStructure:
    z3 = [Fraction(0)] * 3
    c = [[list(z3) for _ in range(3)] for _ in range(3)]

    def setb(i, j, k, v):
        c[i][j][k] = Fraction(v)
        c[j][i][k] = Fraction(-v)

    if space is Space.SPHERE:
        # {p0,p1} = -p2, {p1,p2} = -p0, {p2,p0} = -p1
        setb(0, 1, 2, -1)
        setb(1, 2, 0, -1)
        setb(2, 0, 1, -1)
        signs = (1, 1, 1)
    else:
        # {p0,p1} = p2, {p1,p2} = -p0, {p0,p2} = p1
        setb(0, 1, 2, 1)
        setb(1, 2, 0, -1)
        setb(0, 2, 1, 1)
        signs = (1, 1, -1)
    return PoissonStructure(space, tuple(tuple(tuple(x) for x in row)
                                         for row in c), signs)


# ---------------------------------------------------------------------------
# Hamiltonian vector fields
# ---------------------------------------------------------------------------

@dataclass
class OrbitState:
    t: mp.mpf
    theta: mp.mpf
    p_theta: mp.mpf
    p0: mp.mpf
    p1: mp.mpf
    p2: mp.mpf


def _trig(inst: ProblemInstance):
    if inst.space is Space.SPHERE:
        return mp.sin, mp.cos, mp.cot
    return mp.sinh, mp.cosh, mp.coth


def potential_value(inst: ProblemInstance, theta) -> mp.mpf:
    a = _mpf(inst.alpha)
    if inst.space is Space.SPHERE:
        if inst.potential is Potential.TAN_FAMILY:
            return a * mp.tan(theta)
        return -a / mp.sin(theta)
    if inst.potential is Potential.TAN_FAMILY:
        return a * mp.tanh(theta)
    return a / mp.sinh(theta)


def potential_derivative(inst: ProblemInstance, theta) -> mp.mpf:
    a = _mpf(inst.alpha)
    if inst.space is Space.SPHERE:
        if inst.potential is Potential.TAN_FAMILY:
            return a / mp.cos(theta) ** 2
        return a * mp.cos(theta) / mp.sin(theta) ** 2
    if inst.potential is Potential.TAN_FAMILY:
        return a / mp.cosh(theta) ** 2
    return -a * mp.cosh(theta) / mp.sinh(theta) ** 2


def hamiltonian_value(inst: ProblemInstance, state: OrbitState) -> mp.mpf:
    mu = _mpf(inst.mu)
    sn, _, ct = _trig(inst)
    th, pt = state.theta, state.p_theta
    p0, p1, p2 = state.p0, state.p1, state.p2
    sign = -1 if inst.space is Space.SPHERE else 1
    return ((pt ** 2 + p2 ** 2 / sn(th) ** 2) / (2 * mu)
            + pt * p0 + sign * p2 ** 2 + p1 * p2 * ct(th)
            + potential_value(inst, th))


def full_system_rhs(structure: PoissonStructure, inst: ProblemInstance,
                    state: OrbitState) -> tuple:
    """xdot = {x, h} for the full reduced system (theta, p_theta, p0, p1, p2)."""
    mu = _mpf(inst.mu)
    sn, cs, ct = _trig(inst)
    th, pt = state.theta, state.p_theta
    p0, p1, p2 = state.p0, state.p1, state.p2
    sign = -1 if inst.space is Space.SPHERE else 1
    s, c = sn(th), cs(th)
    # partial derivatives of h
    dh_dpt = pt / mu + p0
    dh_dp = (pt,
             p2 * c / s,
             p2 / (mu * s ** 2) + 2 * sign * p2 + p1 * c / s)
    # d/dth cot = -1/sin^2 and d/dth coth = -1/sinh^2; same shape for
    # d/dth (1/sin^2) and (1/sinh^2)
    dcot = -1 / s ** 2
    dsin2 = -2 * c / s ** 3
    dh_dth = (p2 ** 2 / (2 * mu)) * dsin2 + p1 * p2 * dcot \
        + potential_derivative(inst, th)
    dtheta = dh_dpt
    dp_theta = -dh_dth
    dp = []
    for i in range(3):
        acc = mp.mpf(0)
        for j in range(3):
            cij = structure.bracket(i, j)
            if any(x != 0 for x in cij):
                bracket_val = sum(_mpf(cij[k]) * (p0, p1, p2)[k]
                                  for k in range(3) if cij[k] != 0)
                acc += bracket_val * dh_dp[j]
        dp.append(acc)
    return (dtheta, dp_theta, dp[0], dp[1], dp[2])


def hamiltonian_rhs(structure: PoissonStructure, inst: ProblemInstance,
                    state: OrbitState) -> tuple:
    """Alias keeping the five-component phase-space convention."""
    return full_system_rhs(structure, inst, state)


def casimir_value(structure: PoissonStructure, state: OrbitState) -> mp.mpf:
    s = structure.casimir_signs
    return (s[0] * state.p0 ** 2 + s[1] * state.p1 ** 2
            + s[2] * state.p2 ** 2)


# ---------------------------------------------------------------------------
# orbit integration (geodesic slice)
# ---------------------------------------------------------------------------

def _theta_interval(inst: ProblemInstance) -> tuple[float, float]:
    return (0.0, math.pi) if inst.space is Space.SPHERE else (0.0, math.inf)


def orbit_relation_theta(inst: ProblemInstance, z) -> mp.mpf:
    """theta on the energy level at a given z, from the orbit relation."""
    mu, a, e = _mpf(inst.mu), _mpf(inst.alpha), _mpf(inst.epsilon)
    fz = e - a * mp.mpf(z) ** 2 / (2 * mu)
    if inst.space is Space.SPHERE:
        if inst.potential is Potential.TAN_FAMILY:
            th = mp.atan(fz)
            return th if th > 0 else th + mp.pi
        phi = -fz  # phi(z) = alpha z^2/(2 mu) - eps
        if phi < 1:
            raise OrbitDomainError(f"1/sin(theta) = {phi} < 1 at z = {z}")
        return mp.asin(1 / phi)
    if inst.potential is Potential.TAN_FAMILY:
        if not (0 < fz < 1):
            raise OrbitDomainError(f"tanh(theta) = {fz} outside (0,1) at z = {z}")
        return mp.atanh(fz)
    if fz <= 0:
        raise OrbitDomainError(f"1/sinh(theta) = {fz} <= 0 at z = {z}")
    return mp.asinh(1 / fz)


def real_singular_abscissas(inst: ProblemInstance) -> list[mp.mpf]:
    """Real locations among {q, +-lambda, +-eta, +-kappa}."""
    out = [_mpf(inst.q)]
    for w in (inst.kappa_sq, inst.lambda_sq, inst.eta_sq):
        if isinstance(w, Fraction):
            wr, wi = w, Fraction(0)
        else:
            if w.level == 2:
                continue
            wr, wi = w.a.re, w.a.im
        if wi == 0 and wr > 0:
            root = mp.sqrt(_mpf(wr))
            out.extend([root, -root])
    return sorted(out)


def default_start(inst: ProblemInstance) -> mp.mpf:
    """A starting z with an admissible theta, away from singular points."""
    sing = real_singular_abscissas(inst)
    if inst.space is Space.HYPERBOLIC and inst.potential is Potential.TAN_FAMILY:
        # f must lie in (0,1): z between eta and kappa (alpha, mu > 0 branch)
        lo = max(x for x in sing if x >= 0)  # kappa is the largest
        others = [x for x in sing if 0 <= x < lo - mp.mpf("1e-12")]
        lo2 = max(others) if others else mp.mpf(0)
        return (lo + lo2) / 2
    if inst.space is Space.HYPERBOLIC and inst.potential is Potential.CSC_FAMILY:
        # psi > 0: |z| < kappa
        kap = max(sing)
        inside = [x for x in sing if x < kap - mp.mpf("1e-12")]
        lo = max(inside) if inside else -kap
        return (kap + lo) / 2
    return max(sing) + mp.mpf("0.75")


@dataclass
class Trajectory:
    instance: ProblemInstance
    t_samples: list
    theta: list
    p_theta: list
    z: list
    energy_drift: float
    truncated: bool
    orbit_fun: object  # odefun callable: t -> [theta, p_theta]

    def z_of_t(self, t) -> mp.mpf:
        th, pt = self.orbit_fun(t)
        return (pt + _mpf(self.instance.mu) * _mpf(self.instance.p)) \
            / _mpf(self.instance.alpha)


def integrate_orbit(inst: ProblemInstance, z0=None, horizon=8.0,
                    n_samples: int = 400, dps: int = 30) -> Trajectory:
    """Geodesic-slice orbit (p1 = p2 = 0, p0 = p) from the z0 energy point.

    Samples until the angle leaves its interval or the horizon is reached;
    relative energy drift is recorded.
    """
    with mp.workdps(dps):
        if z0 is None:
            z0 = default_start(inst)
        z0 = _mpf(z0)
        theta0 = orbit_relation_theta(inst, z0)
        mu, p, a = _mpf(inst.mu), _mpf(inst.p), _mpf(inst.alpha)
        pt0 = a * z0 - mu * p

        def rhs(t, y):
            th, pt = y[0], y[1]
            return [pt / mu + p, -potential_derivative(inst, th)]

        fun = mp.odefun(rhs, 0, [theta0, pt0])
        lo, hi = _theta_interval(inst)
        ts, ths, pts, zs = [], [], [], []
        h0 = (pt0 ** 2 / (2 * mu) + p * pt0 + potential_value(inst, theta0))
        drift = mp.mpf(0)
        truncated = False
        dt = mp.mpf(horizon) / n_samples
        t = mp.mpf(0)
        margin = mp.mpf("1e-3")
        for _ in range(n_samples + 1):
            try:
                th, pt = fun(t)
            except (mp.libmp.NoConvergence, ZeroDivisionError, ValueError,
                    OverflowError):
                truncated = True
                break
            if not (lo + margin < th < hi - margin) or abs(pt) > mp.mpf("1e8"):
                truncated = True
                break
            zt = (pt + mu * p) / a
            if abs(zt - z0) > 6:
                break  # far outside the region of interest
            ts.append(t)
            ths.append(th)
            pts.append(pt)
            zs.append(zt)
            h = pt ** 2 / (2 * mu) + p * pt + potential_value(inst, th)
            drift = max(drift, abs(h - h0) / abs(h0))
            t += dt
        if len(ts) < 8:
            raise OrbitDomainError("orbit leaves the angular interval immediately")
        return Trajectory(inst, ts, ths, pts, zs, float(drift), truncated, fun)


def integrate_full(inst: ProblemInstance, initial: OrbitState, horizon=3.0,
                   n_samples: int = 120, dps: int = 30):
    """Full five-dimensional flow, for conservation checks off the slice.

    Returns (samples, max relative energy drift, max absolute Casimir drift).
    """
    structure = poisson_structure(inst.space)
    with mp.workdps(dps):
        y0 = [initial.theta, initial.p_theta, initial.p0, initial.p1, initial.p2]

        def rhs(t, y):
            st = OrbitState(t, *y)
            return list(full_system_rhs(structure, inst, st))

        fun = mp.odefun(rhs, 0, [mp.mpf(x) for x in y0])
        h0 = hamiltonian_value(inst, initial)
        c0 = casimir_value(structure, initial)
        states = []
        e_drift = mp.mpf(0)
        c_drift = mp.mpf(0)
        lo, hi = _theta_interval(inst)
        dt = mp.mpf(horizon) / n_samples
        t = mp.mpf(0)
        for _ in range(n_samples + 1):
            try:
                y = fun(t)
            except (mp.libmp.NoConvergence, ZeroDivisionError, ValueError,
                    OverflowError):
                break
            if not (lo + mp.mpf("1e-3") < y[0] < hi - mp.mpf("1e-3")):
                break
            st = OrbitState(t, *y)
            states.append(st)
            e_drift = max(e_drift, abs(hamiltonian_value(inst, st) - h0) / abs(h0))
            c_drift = max(c_drift, abs(casimir_value(structure, st) - c0))
            t += dt
        return states, float(e_drift), float(c_drift)


# ---------------------------------------------------------------------------
# time-domain NVE
# ---------------------------------------------------------------------------

@dataclass
class NVESolution:
    instance: ProblemInstance
    fun: object          # odefun: t -> [theta, p_theta, f11, f21, f12, f22]
    t_max: mp.mpf
    max_det_defect: float

    def state(self, t):
        return self.fun(t)


def _nve_rhs(inst: ProblemInstance):
    mu, p = _mpf(inst.mu), _mpf(inst.p)
    sphere = inst.space is Space.SPHERE

    def rhs(t, y):
        th, pt, f11, f21, f12, f22 = y
        if sphere:
            ct = mp.cot(th)
            inv2 = 1 / mp.sin(th) ** 2
            a11 = -p * ct
            a12 = 2 * p + pt - p * inv2 / mu
        else:
            ct = mp.coth(th)
            inv2 = 1 / mp.sinh(th) ** 2
            a11 = -p * ct
            a12 = -(2 * p + pt + p * inv2 / mu)
        a21 = -pt
        a22 = p * ct
        return [pt / mu + p, -potential_derivative(inst, th),
                a11 * f11 + a12 * f21, a21 * f11 + a22 * f21,
                a11 * f12 + a12 * f22, a21 * f12 + a22 * f22]

    return rhs


def integrate_nve_time(inst: ProblemInstance, traj: Trajectory,
                       dps: int = 30) -> NVESolution:
    """Fundamental 2x2 solution along the orbit, identity at t=0.

    The coefficient matrix is trace-free, so det = 1 propagates; the maximal
    defect across the trajectory samples is recorded.
    """
    with mp.workdps(dps):
        th0, pt0 = traj.theta[0], traj.p_theta[0]
        y0 = [th0, pt0, mp.mpf(1), mp.mpf(0), mp.mpf(0), mp.mpf(1)]
        fun = mp.odefun(_nve_rhs(inst), 0, y0)
        defect = mp.mpf(0)
        for t in traj.t_samples:
            y = fun(t)
            det = y[2] * y[5] - y[3] * y[4]
            defect = max(defect, abs(det - 1))
        return NVESolution(inst, fun, traj.t_samples[-1], float(defect))


# ---------------------------------------------------------------------------
# chain comparison
# ---------------------------------------------------------------------------

@dataclass
class ArcReport:
    z_lo: float
    z_hi: float
    n_points: int
    max_rel_deviation: float


@dataclass
class ChainReport:
    instance: ProblemInstance
    arcs: list[ArcReport] = field(default_factory=list)
    orbit_relation_defect: float = 0.0
    energy_drift: float = 0.0
    det_defect: float = 0.0
    split_count: int = 0
    truncated: bool = False

    @property
    def max_rel_deviation(self) -> float:
        return max((a.max_rel_deviation for a in self.arcs), default=float("nan"))


def _monotone_windows(traj: Trajectory):
    """Maximal index windows with strictly monotone z (no p_theta sign flip)."""
    zs = traj.z
    if len(zs) < 2:
        return []
    windows = []
    start = 0
    sign = 0
    for k in range(1, len(zs)):
        step = zs[k] - zs[k - 1]
        s = 1 if step > 0 else (-1 if step < 0 else 0)
        if sign == 0:
            sign = s
        elif s != 0 and s != sign:
            if k - 1 - start >= 3:
                windows.append((start, k - 1))
            start = k - 1
            sign = s
    if len(zs) - 1 - start >= 3:
        windows.append((start, len(zs) - 1))
    return windows


def _orbit_relation_defect(inst: ProblemInstance, traj: Trajectory) -> float:
    mu, a, e = _mpf(inst.mu), _mpf(inst.alpha), _mpf(inst.epsilon)
    worst = mp.mpf(0)
    for th, z in zip(traj.theta, traj.z):
        fz = e - a * z ** 2 / (2 * mu)
        if inst.potential is Potential.TAN_FAMILY:
            lhs = mp.tan(th) if inst.space is Space.SPHERE else mp.tanh(th)
            worst = max(worst, abs(lhs - fz))
        else:
            lhs = 1 / mp.sin(th) if inst.space is Space.SPHERE else 1 / mp.sinh(th)
            rhs = -fz if inst.space is Space.SPHERE else fz
            worst = max(worst, abs(lhs - rhs))
    return float(worst)


def _t_of_z(nve: NVESolution, z_target, bracket, dps: int):
    """Invert z(t) on a monotone arc by Newton with bisection fallback."""
    inst = nve.instance
    mu, p, a = _mpf(inst.mu), _mpf(inst.p), _mpf(inst.alpha)
    ta, tb = bracket

    def zval(t):
        y = nve.fun(t)
        return (y[1] + mu * p) / a

    za, zb = zval(ta), zval(tb)
    t = ta + (tb - ta) * (z_target - za) / (zb - za)
    for _ in range(12):
        y = nve.fun(t)
        zc = (y[1] + mu * p) / a
        err = zc - z_target
        if abs(err) < mp.mpf(10) ** (-(dps - 4)):
            return t
        dz = -potential_derivative(inst, y[0]) / a
        if dz == 0:
            break
        t_new = t - err / dz
        if not (min(ta, tb) <= t_new <= max(ta, tb)):
            break
        t = t_new
    # bisection fallback
    lo_t, hi_t = (ta, tb) if za < zb else (tb, ta)
    lo, hi = min(za, zb), max(za, zb)
    if not (lo <= z_target <= hi):
        raise ValueError("target outside bracket")
    for _ in range(200):
        mid = (lo_t + hi_t) / 2
        zm = zval(mid)
        if abs(zm - z_target) < mp.mpf(10) ** (-(dps - 4)):
            return mid
        if zm < z_target:
            lo_t = mid
        else:
            hi_t = mid
    return (lo_t + hi_t) / 2


def compare_chain(inst: ProblemInstance, traj: Trajectory, nve: NVESolution,
                  grid_points: int = 200, margin: float = 0.06,
                  dps: int = 30) -> ChainReport:
    """Max |y'' - r y| relative to the scale of y'' on each monotone arc.

    y = p2/(sqrt(C) f^(1/4*flag)) with p2 taken from both fundamental-matrix
    columns; y'' from a five-point stencil on a uniform z-grid.
    """
    sys_ = build_first_order(inst)
    ode = to_normal_form(sys_)
    report = ChainReport(inst, energy_drift=traj.energy_drift,
                         det_defect=nve.max_det_defect,
                         truncated=traj.truncated)
    report.orbit_relation_defect = _orbit_relation_defect(inst, traj)
    sing = real_singular_abscissas(inst)
    with mp.workdps(dps):
        windows = _monotone_windows(traj)
        report.split_count = len(windows)
        for (i0, i1) in windows:
            z_a, z_b = traj.z[i0], traj.z[i1]
            z_lo, z_hi = (z_a, z_b) if z_a < z_b else (z_b, z_a)
            z_lo += mp.mpf(margin)
            z_hi -= mp.mpf(margin)
            for s in sing:
                if z_lo - mp.mpf(margin) <= s <= z_hi + mp.mpf(margin):
                    if s - z_lo > z_hi - s:
                        z_hi = min(z_hi, s - mp.mpf(margin))
                    else:
                        z_lo = max(z_lo, s + mp.mpf(margin))
            if z_hi - z_lo < mp.mpf("0.05"):
                continue
            n_eval = grid_points + 6
            h = (z_hi - z_lo) / (n_eval - 1)
            t_bracket = (traj.t_samples[i0], traj.t_samples[i1])
            ys1, ys2 = [], []
            ok = True
            for k in range(n_eval):
                zk = z_lo + k * h
                try:
                    tk = _t_of_z(nve, zk, t_bracket, dps)
                except ValueError:
                    ok = False
                    break
                yk = nve.fun(tk)
                w = mp.sqrt(eval_ratfunc(sys_.C, zk))
                if sys_.radical_coupling:
                    w *= eval_ratfunc(sys_.f, zk) ** mp.mpf("0.25")
                ys1.append(yk[3] / w)
                ys2.append(yk[5] / w)
            if not ok:
                continue
            worst = mp.mpf(0)
            scale = mp.mpf(0)
            devs = []
            hh = 180 * h * h
            for k in range(3, n_eval - 3):
                zk = z_lo + k * h
                rv = eval_ratfunc(ode.r, zk)
                for ys in (ys1, ys2):
                    # sixth-order central stencil for y''
                    ypp = (2 * ys[k - 3] - 27 * ys[k - 2] + 270 * ys[k - 1]
                           - 490 * ys[k] + 270 * ys[k + 1] - 27 * ys[k + 2]
                           + 2 * ys[k + 3]) / hh
                    devs.append(abs(ypp - rv * ys[k]))
                    scale = max(scale, abs(ypp))
            if scale > 0:
                worst = max(devs) / scale
            report.arcs.append(ArcReport(float(z_lo), float(z_hi),
                                         n_eval - 6, float(worst)))
    return report


def crosscheck(inst: ProblemInstance, z0=None, horizon=8.0,
               grid_points: int = 200, dps: int = 30,
               margin: float = 0.06) -> ChainReport:
    """Integrate, transport the NVE, and compare the full chain."""
    traj = integrate_orbit(inst, z0=z0, horizon=horizon, dps=dps)
    nve = integrate_nve_time(inst, traj, dps=dps)
    return compare_chain(inst, traj, nve, grid_points=grid_points,
                         margin=margin, dps=dps)
