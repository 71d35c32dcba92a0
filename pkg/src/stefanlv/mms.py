"""Manufactured solution with prescribed smooth fronts for order checks.

Exact fields are ``u = A(t) cos(pi x / (2 s1(t)))`` and
``v = B(t) cos(pi x / (2 s2(t)))``, each extended by zero past its front.
Forcing terms make them exact solutions of the coupled system.
"""

from __future__ import annotations

import math

import numpy as np

from .fbsolver import Forcing, mapped_grid, run
from .params import GridSpec, InitialData, Params, Profile

MMS_PARAMS = Params(d1=1.0, d2=0.7, r1=1.0, r2=0.8, k=0.4, h=0.6, mu1=1.0, mu2=0.5)


def s1(t):
    return 1.0 + 0.5 * t + 0.1 * math.sin(2.0 * t)


def s1_dot(t):
    return 0.5 + 0.2 * math.cos(2.0 * t)


def s2(t):
    return 1.5 + 0.3 * t


def s2_dot(t):
    return 0.3


def amp_u(t):
    return 1.0 + 0.3 * math.sin(t)


def amp_u_dot(t):
    return 0.3 * math.cos(t)


def amp_v(t):
    return 0.8 + 0.2 * math.cos(t)


def amp_v_dot(t):
    return -0.2 * math.sin(t)


_SPECIES = {
    1: (s1, s1_dot, amp_u, amp_u_dot),
    2: (s2, s2_dot, amp_v, amp_v_dot),
}


def exact(t, x, species):
    front, _, amp, _ = _SPECIES[species]
    s = front(t)
    x = np.asarray(x, dtype=float)
    return np.where(x < s, amp(t) * np.cos(0.5 * np.pi * np.minimum(x, s) / s), 0.0)


def _pde_source(params):
    def pde(t, x, species):
        front, front_dot, amp, amp_dot = _SPECIES[species]
        s, sd, A, Ad = front(t), front_dot(t), amp(t), amp_dot(t)
        theta = 0.5 * np.pi * x / s
        w = A * np.cos(theta)
        w_t = Ad * np.cos(theta) + A * np.sin(theta) * theta * sd / s
        w_xx = -A * (0.5 * np.pi / s) ** 2 * np.cos(theta)
        if species == 1:
            d, r, comp, other = params.d1, params.r1, params.k, 2
        else:
            d, r, comp, other = params.d2, params.r2, params.h, 1
        return w_t - d * w_xx - r * w * (1.0 - w - comp * exact(t, x, other))

    return pde


def _front_source(params):
    def front(t, species):
        f, fd, amp, _ = _SPECIES[species]
        mu = params.mu1 if species == 1 else params.mu2
        return fd(t) - mu * amp(t) * 0.5 * np.pi / f(t)

    return front


def forcing(params=MMS_PARAMS):
    return Forcing(pde=_pde_source(params), front=_front_source(params))


def initial_data(n=2049):
    profiles = []
    for species in (1, 2):
        s = _SPECIES[species][0](0.0)
        x = np.linspace(0.0, s, n)
        w = exact(0.0, x, species)
        w[-1] = 0.0
        profiles.append(Profile(x, w))
    return InitialData(*profiles)


def solve(n_xi, dt, t_end, params=MMS_PARAMS):
    """Run the forced problem and return the trajectory."""
    grid = GridSpec(n_xi=n_xi, dt=dt, t_end=t_end, profile_every=10**9)
    return run(params, initial_data(), grid, forcing=forcing(params))


def errors(traj):
    """Max-norm errors of fronts and profiles against the exact solution at the final time."""
    t, fs1, u, fs2, v = traj.profiles[-1]
    xi = mapped_grid(u.size - 1)
    return {
        "s1": abs(fs1 - s1(t)),
        "s2": abs(fs2 - s2(t)),
        "u": float(np.max(np.abs(u - exact(t, xi * fs1, 1)))),
        "v": float(np.max(np.abs(v - exact(t, xi * fs2, 2)))),
    }


def observables(traj):
    """Scalars compared across resolutions: fronts and origin values at the final time."""
    t, fs1, u, fs2, v = traj.profiles[-1]
    return np.array([fs1, fs2, u[0], v[0]])


def richardson_order(q_coarse, q_mid, q_fine):
    """Observed order from three solutions with refinement ratio 2."""
    num = np.abs(np.asarray(q_coarse) - np.asarray(q_mid))
    den = np.abs(np.asarray(q_mid) - np.asarray(q_fine))
    return np.log2(num / den)


def spatial_order(n_xi=(32, 64, 128), dt=1e-4, t_end=0.5):
    runs = [solve(n, dt, t_end) for n in n_xi]
    qs = [observables(r) for r in runs]
    return richardson_order(*qs), [errors(r) for r in runs]


def temporal_order(dts=(4e-3, 2e-3, 1e-3), n_xi=256, t_end=0.5):
    runs = [solve(n_xi, dt, t_end) for dt in dts]
    qs = [observables(r) for r in runs]
    return richardson_order(*qs), [errors(r) for r in runs]

