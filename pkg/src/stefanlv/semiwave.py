"""Semi-wave speeds by forward shooting and bisection.

A semi-wave is a pair ``(c, q)`` with

    d q'' - c q' + q (a - b q) = 0  on (0, inf),
    q(0) = 0,  q'(0) = c / mu,  q(inf) = a / b,  q' > 0,

and ``0 < c < 2 sqrt(a d)``. For a trial speed the initial value problem is
integrated from ``y = 0``; the trajectory either overshoots ``a/b`` or turns
back (``q'`` hits zero below ``a/b``). The speed is the bisection point
between the two outcomes.

The returned profile is not taken from the forward trajectory, which departs
from the saddle ``(a/b, 0)`` as soon as the speed error is amplified. It is
integrated backward from the saddle along the stable eigendirection, which
is well conditioned, and shifted so that ``q(0) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate import ode

from .errors import NoBracket, Nonconvergence
from .params import Params

OVERSHOOT = 1
COLLAPSE = -1

MAX_BISECTIONS = 200


@dataclass(frozen=True)
class SemiWaveParams:
    mu: float
    a: float
    b: float
    d: float

    def __post_init__(self):
        for name in ("mu", "a", "b", "d"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def c_max(self):
        return 2.0 * math.sqrt(self.a * self.d)

    @property
    def plateau(self):
        return self.a / self.b

    def default_y_max(self):
        return 50.0 * max(1.0, math.sqrt(self.d / self.a))


@dataclass(frozen=True, eq=False)
class SemiWave:
    c: float
    y_grid: np.ndarray
    q: np.ndarray
    residual: float
    params: SemiWaveParams
    bracket: tuple[float, float]
    iterations: int

    @property
    def slope_at_origin(self):
        """Second-order one-sided estimate of q'(0) on the returned grid."""
        h = self.y_grid[1] - self.y_grid[0]
        return (-3.0 * self.q[0] + 4.0 * self.q[1] - self.q[2]) / (2.0 * h)


def _rhs(p, c):
    a, b, d = p.a, p.b, p.d

    def f(y, z):
        q, dq = z
        return [dq, (c * dq - q * (a - b * q)) / d]

    return f


def _eigen(p, c):
    disc = math.sqrt(c * c + 4.0 * p.a * p.d)
    return (c + disc) / (2.0 * p.d), (c - disc) / (2.0 * p.d)


def shoot(p, c, y_max, tol):
    """Integrate forward at speed ``c`` and report OVERSHOOT or COLLAPSE."""
    plateau = p.plateau
    outcome = []

    def solout(y, z):
        if z[0] > plateau:
            outcome.append(OVERSHOOT)
            return -1
        if z[1] <= 0.0:
            outcome.append(COLLAPSE)
            return -1
        return 0

    solver = ode(_rhs(p, c)).set_integrator(
        "dopri5", atol=tol / 100.0, rtol=max(tol / 100.0, 1e-13), nsteps=10**6
    )
    solver.set_solout(solout)
    solver.set_initial_value([0.0, c / p.mu], 0.0)
    span = y_max
    for _ in range(4):
        z = solver.integrate(span)
        if outcome:
            return outcome[0]
        if not solver.successful():
            raise NoBracket(f"integrator failed at c={c!r}")
        span += y_max
    # still near the saddle: decide by the sign of the unstable component
    lam_u, lam_s = _eigen(p, c)
    e, dq = z[0] - plateau, z[1]
    return OVERSHOOT if (dq - lam_s * e) > 0 else COLLAPSE


def solve_semiwave(p: SemiWaveParams, tol=1e-8, y_max=None) -> SemiWave:
    """Semi-wave speed to absolute accuracy ``tol`` plus its profile."""
    if not 0.0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    if y_max is None:
        y_max = p.default_y_max()
    cmax = p.c_max
    lo, hi = cmax * 1e-9, cmax * (1.0 - 1e-12)
    out_lo, out_hi = shoot(p, lo, y_max, tol), shoot(p, hi, y_max, tol)
    if out_lo == out_hi:
        raise NoBracket(
            f"both ends of (0, {cmax:.6g}) give the same shooting outcome for {p}"
        )
    it = 0
    while hi - lo > tol:
        it += 1
        if it > MAX_BISECTIONS:
            raise Nonconvergence(f"bisection did not reach tol={tol} for {p}")
        mid = 0.5 * (lo + hi)
        if shoot(p, mid, y_max, tol) == out_lo:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    y, q = semiwave_profile(p, c, y_max, tol)
    return SemiWave(
        c=c,
        y_grid=y,
        q=q,
        residual=profile_defect(p, c, y, q),
        params=p,
        bracket=(lo, hi),
        iterations=it,
    )


@njit(cache=True)
def _rk4_step(q, dq, h, a, b, d, c):
    """One classical RK4 step of size ``h`` (negative = backward)."""
    k1q = dq
    k1p = (c * dq - q * (a - b * q)) / d
    q2 = q + 0.5 * h * k1q
    p2 = dq + 0.5 * h * k1p
    k2p = (c * p2 - q2 * (a - b * q2)) / d
    q3 = q + 0.5 * h * p2
    p3 = dq + 0.5 * h * k2p
    k3p = (c * p3 - q3 * (a - b * q3)) / d
    q4 = q + h * p3
    p4 = dq + h * k3p
    k4p = (c * p4 - q4 * (a - b * q4)) / d
    return (
        q + h * (k1q + 2.0 * p2 + 2.0 * p3 + p4) / 6.0,
        dq + h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0,
    )


@njit(cache=True)
def _rk4_backward(q, dq, h, n, a, b, d, c, out):
    out[n] = q
    for j in range(n, 0, -1):
        q, dq = _rk4_step(q, dq, -h, a, b, d, c)
        out[j - 1] = q


@njit(cache=True)
def _ramp_length(q, dq, h, a, b, d, c, limit):
    """Distance travelled backward from the saddle until q first crosses 0."""
    y = 0.0
    while y < limit:
        qn, pn = _rk4_step(q, dq, -h, a, b, d, c)
        if qn <= 0.0:
            return y + h * q / (q - qn)
        q, dq, y = qn, pn, y + h
    return -1.0


def semiwave_profile(p, c, y_max, tol=1e-8):
    """Monotone profile at speed ``c`` sampled on a uniform grid starting at 0.

    The grid spacing is adjusted so that an integer number of RK4 steps from
    the saddle end lands on ``q = 0``; the remaining far field is the
    linearised stable tail, cut at ``y_max`` or where it comes within
    ``1e-10 * a/b`` of the plateau (further samples would round to a/b and
    stop increasing).
    """
    plateau = p.plateau
    lam_u, lam_s = _eigen(p, c)
    eps = 1e-8 * plateau
    q_start, dq_start = plateau - eps, -lam_s * eps
    length = math.sqrt(p.d / p.a)
    # truncation ~ a*(a/b)*(h/length)**2; below h/length ~ 3e-4 round-off in
    # the second difference takes over
    h0 = length * min(0.02, max(3e-4, 2.0 * math.sqrt(tol / max(1.0, p.a * plateau))))
    limit = 10.0 * (y_max + 50.0 * length * max(1.0, plateau))
    ramp = _ramp_length(q_start, dq_start, h0, p.a, p.b, p.d, c, limit)
    if ramp < 0:
        raise NoBracket(f"backward profile at c={c!r} does not reach q=0")
    n = max(2, int(round(ramp / h0)))
    buf = np.empty(n + 1)

    def end_value(r):
        _rk4_backward(q_start, dq_start, r / n, n, p.a, p.b, p.d, c, buf)
        return buf[0]

    # secant on the ramp length so that node 0 sits on q = 0 (to round-off)
    r0, r1 = ramp, ramp * (1.0 + 1e-7)
    f0, f1 = end_value(r0), end_value(r1)
    for _ in range(8):
        if f1 == f0 or abs(f1) < 1e-13 * plateau:
            break
        r0, r1, f0 = r1, r1 - f1 * (r1 - r0) / (f1 - f0), f1
        f1 = end_value(r1)
    ramp = r1
    h = ramp / n
    settle = math.log(1e-10 * plateau / eps) / lam_s
    n_tail = max(0, int(math.ceil((min(y_max, ramp + settle) - ramp) / h)))
    y = np.arange(n + n_tail + 1) * h
    q = np.empty_like(y)
    # q[0] is zero to ~1e-12; overwriting it would spoil the defect at node 1
    q[: n + 1] = buf
    q[n + 1 :] = plateau - eps * np.exp(lam_s * (y[n + 1 :] - ramp))
    return y, q


def profile_defect(p, c, y, q):
    """Max of |d q'' - c q' + q(a - b q)| with centred differences."""
    h = y[1] - y[0]
    d2 = (q[2:] - 2.0 * q[1:-1] + q[:-2]) / h**2
    d1 = (q[2:] - q[:-2]) / (2.0 * h)
    qi = q[1:-1]
    return float(np.max(np.abs(p.d * d2 - c * d1 + qi * (p.a - p.b * qi))))


def semiwave_speed(mu, a, b, d, tol=1e-8):
    return solve_semiwave(SemiWaveParams(mu, a, b, d), tol=tol).c


@dataclass(frozen=True)
class SpeedSummary:
    """Spreading speeds of the competition system; ``None`` marks an undefined speed."""

    c1_reduced: float | None
    c2_reduced: float | None
    c1_free: float
    c2_free: float

    def as_dict(self):
        return {
            "c1_reduced": self.c1_reduced,
            "c2_reduced": self.c2_reduced,
            "c1_free": self.c1_free,
            "c2_free": self.c2_free,
        }


def competition_speeds(params: Params, tol=1e-8) -> SpeedSummary:
    c1_free = semiwave_speed(params.mu1, params.r1, params.r1, params.d1, tol)
    c2_free = semiwave_speed(params.mu2, params.r2, params.r2, params.d2, tol)
    c1 = c2 = None
    if params.k < 1:
        c1 = (
            c1_free
            if params.k == 0
            else semiwave_speed(params.mu1, params.r1 * (1 - params.k), params.r1, params.d1, tol)
        )
    if params.h < 1:
        c2 = (
            c2_free
            if params.h == 0
            else semiwave_speed(params.mu2, params.r2 * (1 - params.h), params.r2, params.d2, tol)
        )
    return SpeedSummary(c1, c2, c1_free, c2_free)


@dataclass(frozen=True)
class RegionResult:
    """Membership in the region where the strong species' reduced speed wins.

    Truthiness is the membership verdict; ``indeterminate`` is set when the
    speed gap is below the resolution of the computed speeds.
    """

    inside: bool
    c1_reduced: float
    c2_free: float
    gap: float
    tol: float
    indeterminate: bool = False
    diagnostic: str = ""

    def __bool__(self):
        return self.inside


def in_region_A(params: Params, tol=1e-8) -> RegionResult:
    from .errors import UndefinedRegion

    if not 0 < params.k < 1:
        raise UndefinedRegion(f"region is defined only for 0 < k < 1 (k={params.k})")
    c1 = semiwave_speed(params.mu1, params.r1 * (1 - params.k), params.r1, params.d1, tol)
    c2 = semiwave_speed(params.mu2, params.r2, params.r2, params.d2, tol)
    gap = c1 - c2
    if abs(gap) < 10.0 * tol:
        return RegionResult(
            False, c1, c2, gap, tol, True,
            f"gap below resolution: |c1-c2|={abs(gap):.3g} < 10*tol={10 * tol:.3g}",
        )
    return RegionResult(gap > 0, c1, c2, gap, tol)
