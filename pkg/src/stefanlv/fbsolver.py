"""Front-fixing finite differences for the two-front competition system.

Each species lives on its own moving interval ``[0, s_i(t)]``, mapped to the
unit interval by ``xi = x / s_i(t)``. In mapped variables

    u_t = (d1 / s1**2) u_xixi + xi (s1' / s1) u_xi + r1 u (1 - u - k v)

with ``u_xi(t, 0) = 0``, ``u(t, 1) = 0`` and ``s1' = -mu1 u_x(t, s1)``
(and symmetrically for ``v``). One step of size ``dt``:

1. fronts advance explicitly with the one-sided gradient at the old state;
2. diffusion and mesh advection are solved implicitly on the new front
   (centred differences, upwind only where the cell Peclet number exceeds 1,
   so the tridiagonal matrix is always an M-matrix);
3. reaction terms are explicit, with the competitor read off its own grid
   by linear interpolation and extended by zero past its front.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg.lapack import dgtsv

from .errors import (
    BadInitialData,
    FrontCollapse,
    NegativityBreach,
    NumericalBlowup,
    SolverError,
)
from .params import GridSpec, InitialData, Params, Profile, SingleSpeciesSpec

log = logging.getLogger(__name__)

NEG_BREACH = 1e-8
FRONT_SLACK = 1e-14


@dataclass(frozen=True, eq=False)
class State:
    """Snapshot of the system; ``v`` is ``None`` for single-species runs."""

    t: float
    s1: float
    u: np.ndarray
    s2: float = math.nan
    v: np.ndarray | None = None
    s1_dot: float = 0.0
    s2_dot: float = 0.0
    clip: float = 0.0

    @property
    def xi(self):
        return mapped_grid(self.u.size - 1)


@dataclass(frozen=True)
class Forcing:
    """Source terms for manufactured-solution tests.

    ``pde(t, x, species)`` is added to the reaction of species 1 or 2 at
    physical points ``x``; ``front(t, species)`` is added to the front speed.
    """

    pde: Callable[[float, np.ndarray, int], np.ndarray]
    front: Callable[[float, int], float]


@lru_cache(maxsize=16)
def mapped_grid(n_xi):
    xi = np.linspace(0.0, 1.0, n_xi + 1)
    xi.flags.writeable = False
    return xi


def resample(profile: Profile, xi):
    """Monotone (PCHIP) resampling of a physical profile onto mapped nodes."""
    w = PchipInterpolator(profile.x / profile.front, profile.values)(xi)
    w[-1] = 0.0
    return np.maximum(w, 0.0)


def init_state(params: Params, init: InitialData, grid: GridSpec) -> State:
    init.check()
    xi = mapped_grid(grid.n_xi)
    return State(
        t=0.0,
        s1=init.s1_0,
        u=resample(init.u0, xi),
        s2=init.s2_0,
        v=resample(init.v0, xi),
    )


def boundary_flux(profile, s, dxi):
    """Physical x-derivative at the front from the one-sided 3-point stencil."""
    p = profile
    return (3.0 * p[-1] - 4.0 * p[-2] + p[-3]) / (2.0 * dxi) / s


def cross_interpolate(values, front, x_query):
    """Value of a species at physical points, zero beyond its front."""
    n = values.size - 1
    return np.interp(np.asarray(x_query, dtype=float), mapped_grid(n) * front, values, right=0.0)


def c1_norm(values, front):
    dxi = 1.0 / (values.size - 1)
    return float(np.max(np.abs(values)) + np.max(np.abs(np.diff(values))) / (dxi * front))


def _advance_front(w, s, mu, dt, dxi, extra, t):
    s_dot = -mu * boundary_flux(w, s, dxi) + extra
    s_new = s + dt * s_dot
    if s_new < s:
        if s_new < s - FRONT_SLACK:
            raise FrontCollapse(f"front moved backward by {s - s_new:.3g}", t)
        s_new, s_dot = s, 0.0
    return s_new, s_dot


def _implicit_transport(w, rhs, s_new, s_dot, d, dt, xi, t):
    """Solve (I - dt L) w_new = rhs with L the mapped diffusion-advection operator.

    ``w_new[-1] = 0`` is imposed; node 0 uses the mirror ghost value.
    """
    n = w.size - 1
    dxi = 1.0 / n
    alpha = dt * d / (s_new * s_new * dxi * dxi)
    beta = dt * xi[:n] * (s_dot / s_new) / (2.0 * dxi)
    lower = beta - alpha
    upper = -(alpha + beta)
    diag = np.full(n, 1.0 + 2.0 * alpha)
    upwind = beta > alpha
    if np.any(upwind):
        lower = np.where(upwind, -alpha, lower)
        upper = np.where(upwind, -(alpha + 2.0 * beta), upper)
        diag = np.where(upwind, diag + 2.0 * beta, diag)
    upper[0] = -2.0 * alpha
    _, _, _, sol, info = dgtsv(lower[1:], diag, upper[:-1], rhs[:n])
    if info != 0:
        raise NumericalBlowup(f"tridiagonal solve failed (info={info})", t)
    out = np.empty_like(w)
    out[:n] = sol
    out[n] = 0.0
    return out


def _finish(w, t, name):
    if not np.all(np.isfinite(w)):
        raise NumericalBlowup(f"non-finite values in {name}", t)
    lo = float(w.min())
    if lo < -NEG_BREACH:
        raise NegativityBreach(f"{name} dropped to {lo:.3g}", t)
    clip = max(0.0, -lo)
    if clip:
        w = np.maximum(w, 0.0)
    return w, clip


def step(state: State, params: Params, grid: GridSpec, forcing: Forcing | None = None,
         dt: float | None = None) -> State:
    """Advance the coupled system by one time step."""
    if dt is None:
        dt = grid.resolve_dt(max(params.r1, params.r2))
    u, v, s1, s2, t = state.u, state.v, state.s1, state.s2, state.t
    xi = mapped_grid(u.size - 1)
    dxi = xi[1]

    g1 = forcing.front(t, 1) if forcing else 0.0
    g2 = forcing.front(t, 2) if forcing else 0.0
    s1_new, s1_dot = _advance_front(u, s1, params.mu1, dt, dxi, g1, t)
    s2_new, s2_dot = _advance_front(v, s2, params.mu2, dt, dxi, g2, t)

    x1, x2 = xi * s1, xi * s2
    react_u = params.r1 * u * (1.0 - u - params.k * cross_interpolate(v, s2, x1))
    react_v = params.r2 * v * (1.0 - v - params.h * cross_interpolate(u, s1, x2))
    if forcing:
        react_u = react_u + forcing.pde(t, x1, 1)
        react_v = react_v + forcing.pde(t, x2, 2)

    t_new = t + dt
    u_new = _implicit_transport(u, u + dt * react_u, s1_new, s1_dot, params.d1, dt, xi, t_new)
    v_new = _implicit_transport(v, v + dt * react_v, s2_new, s2_dot, params.d2, dt, xi, t_new)
    u_new, cu = _finish(u_new, t_new, "u")
    v_new, cv = _finish(v_new, t_new, "v")
    return State(t_new, s1_new, u_new, s2_new, v_new, s1_dot, s2_dot, max(cu, cv))


def _step_single(state, spec, dt, forcing=None):
    w, g, t = state.u, state.s1, state.t
    xi = mapped_grid(w.size - 1)
    extra = forcing.front(t, 1) if forcing else 0.0
    g_new, g_dot = _advance_front(w, g, spec.mu, dt, xi[1], extra, t)
    react = spec.r * w * (spec.a - w)
    if forcing:
        react = react + forcing.pde(t, xi * g, 1)
    t_new = t + dt
    w_new = _implicit_transport(w, w + dt * react, g_new, g_dot, spec.d, dt, xi, t_new)
    w_new, clip = _finish(w_new, t_new, "w")
    return State(t_new, g_new, w_new, s1_dot=g_dot, clip=clip)


@dataclass
class Trajectory:
    """Sampled history of a run.

    Scalar series are numpy arrays with one entry per snapshot. ``profiles``
    holds ``(t, s1, u, s2, v)`` tuples for a subset of the snapshots. For a
    single-species run the species-2 series are NaN and ``v`` is ``None``.
    """

    t: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s1dot: np.ndarray
    s2dot: np.ndarray
    u0: np.ndarray
    v0: np.ndarray
    umax: np.ndarray
    vmax: np.ndarray
    c1_u: np.ndarray
    c1_v: np.ndarray
    profiles: list
    dt: float
    n_species: int = 2
    params: Params | None = None
    initial_fronts: tuple[float, float] = (math.nan, math.nan)
    min_front_increment: tuple[float, float] = (math.inf, math.inf)
    max_clip: float = 0.0
    watchdog_time: float | None = None
    final_state: State | None = field(default=None, repr=False)

    @property
    def xi(self):
        return mapped_grid(self.profiles[-1][2].size - 1)

    def front(self, species):
        return self.s1 if species == 1 else self.s2

    def peak(self, species):
        return self.umax if species == 1 else self.vmax

    def origin(self, species):
        return self.u0 if species == 1 else self.v0


class _Recorder:
    def __init__(self, profile_every, watchdog):
        self.rows = []
        self.profiles = []
        self.profile_every = profile_every
        self.watchdog = watchdog
        self.watchdog_time = None

    def add(self, st: State, force_profile=False):
        single = st.v is None
        row = (
            st.t, st.s1, st.s2, st.s1_dot, st.s2_dot,
            st.u[0], math.nan if single else st.v[0],
            float(st.u.max()), math.nan if single else float(st.v.max()),
            c1_norm(st.u, st.s1), math.nan if single else c1_norm(st.v, st.s2),
        )
        if self.watchdog_time is None and max(abs(x) for x in (row[3], row[4], row[9], 0 if single else row[10])) > self.watchdog:
            self.watchdog_time = st.t
            log.warning("watchdog: C1 norm or front speed above %g at t=%g", self.watchdog, st.t)
        if force_profile or len(self.rows) % self.profile_every == 0:
            self.profiles.append((st.t, st.s1, st.u.copy(), st.s2, None if single else st.v.copy()))
        self.rows.append(row)

    def build(self, dt, n_species, params, fronts, incr, clip, final):
        if self.profiles[-1][0] != final.t:
            self.profiles.append(
                (final.t, final.s1, final.u.copy(), final.s2, None if final.v is None else final.v.copy())
            )
        cols = np.array(self.rows, dtype=float).T
        return Trajectory(
            *cols, profiles=self.profiles, dt=dt, n_species=n_species, params=params,
            initial_fronts=fronts, min_front_increment=incr, max_clip=clip,
            watchdog_time=self.watchdog_time, final_state=final,
        )


def _integrate(state, advance, n_steps, stride, profile_every, watchdog, finish_args):
    rec = _Recorder(profile_every, watchdog)
    rec.add(state, force_profile=True)
    inc1 = inc2 = math.inf
    clip = 0.0
    for n in range(1, n_steps + 1):
        try:
            new = advance(state)
        except SolverError as exc:
            exc.trajectory = rec.build(*finish_args, (inc1, inc2), clip, state)
            raise
        inc1 = min(inc1, new.s1 - state.s1)
        if new.v is not None:
            inc2 = min(inc2, new.s2 - state.s2)
        clip = max(clip, new.clip)
        state = new
        if n % stride == 0 or n == n_steps:
            rec.add(state)
    return rec.build(*finish_args, (inc1, inc2), clip, state)


def run(params: Params, init: InitialData, grid: GridSpec, forcing: Forcing | None = None,
        watchdog: float = 1e4) -> Trajectory:
    """Time-step the coupled system from ``t = 0`` to ``grid.t_end``."""
    dt = grid.resolve_dt(max(params.r1, params.r2))
    state = init_state(params, init, grid)
    n_steps = grid.n_steps(dt)

    def advance(st):
        # exact multiples of dt avoid drift in the time stamps
        nxt = step(st, params, grid, forcing, dt)
        return replace(nxt, t=round(st.t / dt + 1) * dt)

    return _integrate(
        state, advance, n_steps, grid.stride(n_steps), grid.profile_every, watchdog,
        (dt, 2, params, (init.s1_0, init.s2_0)),
    )


def solve_single_species(spec: SingleSpeciesSpec, grid: GridSpec, forcing: Forcing | None = None,
                         watchdog: float = 1e4) -> Trajectory:
    """One-species free boundary problem with logistic reaction r w (a - w).

    Times in the returned trajectory start at ``spec.tau``.
    """
    spec.w0.check("w0")
    dt = grid.resolve_dt(spec.r)
    xi = mapped_grid(grid.n_xi)
    state = State(t=spec.tau, s1=spec.g0, u=resample(spec.w0, xi))
    n_steps = grid.n_steps(dt)

    def advance(st):
        nxt = _step_single(st, spec, dt, forcing)
        return replace(nxt, t=spec.tau + round((st.t - spec.tau) / dt + 1) * dt)

    return _integrate(
        state, advance, n_steps, grid.stride(n_steps), grid.profile_every, watchdog,
        (dt, 1, None, (spec.g0, math.nan)),
    )


def persist_fixed_domain(d, r, a, length, amplitude, n_xi, t_end, dt=1e-2):
    """Logistic growth on the fixed interval [0, length], zero at the far end.

    Starts from ``amplitude * cos(pi x / (2 length))`` and returns the final
    mapped profile.
    """
    xi = mapped_grid(n_xi)
    w = amplitude * np.cos(0.5 * np.pi * xi)
    w[-1] = 0.0
    dt = min(dt, 0.25 / r)
    t = 0.0
    for n in range(int(round(t_end / dt))):
        t = (n + 1) * dt
        w = _implicit_transport(w, w + dt * r * w * (a - w), length, 0.0, d, dt, xi, t)
        w, _ = _finish(w, t, "w")
    return w


__all__ = [
    "BadInitialData",
    "Forcing",
    "State",
    "Trajectory",
    "boundary_flux",
    "c1_norm",
    "cross_interpolate",
    "init_state",
    "mapped_grid",
    "persist_fixed_domain",
    "resample",
    "run",
    "solve_single_species",
    "step",
]
