"""Acceptance criteria AC-1 .. AC-8 as runnable checks.

Each runner returns a :class:`CriterionResult`. Suites group runners by
topic; ``all`` runs every criterion once. Heavy trajectories shared by
several criteria are cached for the lifetime of the process.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis, mms
from .analysis import SPREADING, VANISHING
from .config import preset_spec
from .fbsolver import run, solve_single_species
from .params import GridSpec, InitialData, Params, SingleSpeciesSpec, cosine_profile
from .semiwave import SemiWaveParams, in_region_A, semiwave_speed, solve_semiwave


@dataclass
class CriterionResult:
    name: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{self.name:<5} {mark}  {self.title}  ({self.elapsed:.1f}s)"


def _timed(name, title):
    def wrap(fn):
        @functools.wraps(fn)
        def runner():
            t0 = time.perf_counter()
            passed, details = fn()
            return CriterionResult(name, title, bool(passed), details, time.perf_counter() - t0)

        runner.criterion = name
        return runner

    return wrap


def _monotone(values, increasing=True):
    d = np.diff(values)
    return bool(np.all(d > 0) if increasing else np.all(d < 0))


@_timed("AC-1", "semi-wave speed limits and monotonicity")
def ac1():
    c_big = semiwave_speed(1e4, 1.0, 1.0, 1.0)
    c_small = semiwave_speed(1e-3, 1.0, 1.0, 1.0)
    ratio_big = c_big / 2.0
    ratio_small = c_small / 1e-3
    grid = [0.5, 0.75, 1.0, 1.5, 2.0]
    by_mu = [semiwave_speed(m, 1.0, 1.0, 1.0) for m in grid]
    by_a = [semiwave_speed(1.0, a, 1.0, 1.0) for a in grid]
    by_b = [semiwave_speed(1.0, 1.0, b, 1.0) for b in grid]
    checks = {
        "large_mu": 0.90 <= ratio_big < 1.00,
        "small_mu": 0.52 <= ratio_small <= 0.64,
        "increasing_in_mu": _monotone(by_mu),
        "increasing_in_a": _monotone(by_a),
        "decreasing_in_b": _monotone(by_b, increasing=False),
    }
    details = dict(checks, large_mu_ratio=ratio_big, small_mu_ratio=ratio_small,
                   by_mu=by_mu, by_a=by_a, by_b=by_b)
    return all(checks.values()), details


def _single(name):
    s = preset_spec(name)
    p = s.params
    spec = SingleSpeciesSpec(p.d1, p.r1, 1.0, p.mu1, cosine_profile(s.init.s1_0, s.init.u_amp))
    return solve_single_species(spec, s.grid)


@functools.lru_cache(maxsize=None)
def spreading_run():
    return _single("single-spread")


@functools.lru_cache(maxsize=None)
def vanishing_run():
    return _single("single-vanish")


def _invariants_ok(traj):
    return traj.min_front_increment[0] >= 0 and traj.max_clip <= 1e-8 and traj.watchdog_time is None


@_timed("AC-2", "single-species front speed matches the semi-wave speed")
def ac2():
    traj = spreading_run()
    c = solve_semiwave(SemiWaveParams(mu=1.0, a=1.0, b=1.0, d=1.0)).c
    full = analysis.fit_front_speed(traj, 1, 0.3)
    half = analysis.fit_front_speed(traj, 1, 0.15)
    slope_err = abs(full.slope - c) / c
    drift_change = abs(full.drift - half.drift) / abs(full.drift)
    details = {"c": c, "slope": full.slope, "slope_rel_err": slope_err,
               "drift": full.drift, "drift_half_window": half.drift,
               "drift_rel_change": drift_change}
    return slope_err < 0.03 and drift_change < 0.05, details


@_timed("AC-3", "spreading-vanishing dichotomy for one species")
def ac3():
    thr = analysis.single_species_thresholds(1.0, 1.0, 1.0)
    van, spr = vanishing_run(), spreading_run()

    def label(traj):
        peak, front = float(traj.umax[-1]), float(traj.s1[-1])
        fit = analysis.fit_front_speed(traj, 1, 0.3)
        crit = analysis.Criteria()
        if peak < crit.vanish_tol:
            return VANISHING
        if front > thr.star(1) and fit.slope > crit.slope_floor:
            return SPREADING
        return analysis.INDETERMINATE

    details = {
        "vanishing_label": label(van), "vanishing_max": float(van.umax[-1]),
        "vanishing_front": float(van.s1[-1]), "star": thr.star(1),
        "spreading_label": label(spr),
        "invariants_vanishing": _invariants_ok(van), "invariants_spreading": _invariants_ok(spr),
    }
    ok = (details["vanishing_label"] == VANISHING and details["vanishing_max"] < 1e-3
          and details["vanishing_front"] < math.pi / 2 and details["spreading_label"] == SPREADING
          and details["invariants_vanishing"] and details["invariants_spreading"])
    return ok, details


def _coupled(name):
    s = preset_spec(name)
    init = s.init.build()
    return s.params, init, run(s.params, init, s.grid)


@functools.lru_cache(maxsize=None)
def coupled_run(name):
    return _coupled(name)


@_timed("AC-4", "weak competition: coexistence limits and spreading speeds")
def ac4():
    params, _, traj = coupled_run("thm3-coexist")
    thr = analysis.thresholds(params)
    outcome = analysis.classify(traj, thr)
    target = 2.0 / 3.0
    u_err = abs(traj.u0[-1] - target) / target
    v_err = abs(traj.v0[-1] - target) / target
    speeds = analysis.speed_lower_bound_check(traj, params, outcome)
    speed_ok = all(e["status"] == analysis.PASS for e in speeds.values())
    details = {"labels": outcome.labels, "u0": float(traj.u0[-1]), "v0": float(traj.v0[-1]),
               "u_rel_err": u_err, "v_rel_err": v_err, "speed_check": speeds}
    return u_err < 0.02 and v_err < 0.02 and speed_ok, details


@_timed("AC-5", "fast strong competitor excludes the weak one")
def ac5():
    params, _, traj = coupled_run("thm5-fast-strong")
    region = in_region_A(params)
    outcome = analysis.classify(traj, analysis.thresholds(params))
    fit2 = analysis.fit_front_speed(traj, 2, 0.3)
    u_err = abs(traj.u0[-1] - 1.0)
    details = {"in_region_A": bool(region), "gap": region.gap, "labels": outcome.labels,
               "vmax": float(traj.vmax[-1]), "s2_final": float(traj.s2[-1]),
               "s2_late_slope": fit2.slope, "u0": float(traj.u0[-1])}
    ok = (bool(region) and outcome[2].label == VANISHING and traj.vmax[-1] < 1e-3
          and fit2.slope < analysis.Criteria().slope_floor
          and outcome[1].label == SPREADING and u_err < 0.02)
    return ok, details


@_timed("AC-6", "slow strong competitor: species 2 stays ahead of the barrier")
def ac6():
    params, init, traj = coupled_run("thm6-slow-strong")
    cert = analysis.thm6_certificate(params, init)
    env = cert.lower_envelope(traj.t, init.s1_0) if cert.holds else np.full_like(traj.t, np.inf)
    margin = float(np.min(traj.s2 - env))
    details = {"certificate": cert.as_dict(), "min_margin": margin, "s2_final": float(traj.s2[-1])}
    return cert.holds and margin >= 0.0, details


def scaling_defect(lam=2.0, n_xi=128, t_end=2.0, dt=1e-3):
    """Run a problem and its ``lam``-stretched copy; return front/profile defects.

    The reference scheme error is the front change between ``n_xi`` and
    ``2 n_xi`` on the unscaled problem.
    """
    base = Params(d1=1.0, d2=0.7, r1=1.0, r2=0.8, k=0.4, h=0.6, mu1=1.0, mu2=0.5)
    scaled = Params(d1=lam**2 * base.d1, d2=lam**2 * base.d2, r1=base.r1, r2=base.r2,
                    k=base.k, h=base.h, mu1=lam**2 * base.mu1, mu2=lam**2 * base.mu2)
    init = InitialData.cosine(1.0, 1.5)
    init_s = InitialData.cosine(lam * 1.0, lam * 1.5)
    grid = GridSpec(n_xi=n_xi, dt=dt, t_end=t_end)
    a = run(base, init, grid)
    b = run(scaled, init_s, grid)
    fine = run(base, init, GridSpec(n_xi=2 * n_xi, dt=dt, t_end=t_end))
    front_defect = max(float(np.max(np.abs(b.s1 / lam - a.s1))), float(np.max(np.abs(b.s2 / lam - a.s2))))
    _, _, ua, _, va = a.profiles[-1]
    _, _, ub, _, vb = b.profiles[-1]
    profile_defect = max(float(np.max(np.abs(ua - ub))), float(np.max(np.abs(va - vb))))
    scheme_error = max(abs(fine.s1[-1] - a.s1[-1]), abs(fine.s2[-1] - a.s2[-1]))
    return front_defect, profile_defect, scheme_error


@_timed("AC-7", "manufactured-solution convergence and scaling symmetry")
def ac7():
    orders, errs = mms.spatial_order()
    t_orders, _ = mms.temporal_order()
    front_defect, profile_defect, scheme_error = scaling_defect()
    details = {"spatial_orders": orders.tolist(), "temporal_orders": t_orders.tolist(),
               "finest_errors": errs[-1], "scaling_front_defect": front_defect,
               "scaling_profile_defect": profile_defect, "scheme_error": scheme_error}
    ok = (bool(np.all(orders >= 1.9)) and bool(np.all(t_orders >= 0.9))
          and front_defect <= 10 * scheme_error and profile_defect <= 10 * scheme_error)
    return ok, details


@_timed("AC-8", "closed-form thresholds, limits, bounds and persistence")
def ac8():
    t0 = time.perf_counter()
    thr = analysis.thresholds(Params(k=0.5, h=0.5))
    thr_ok = math.isclose(thr.star(1), math.pi / 2, rel_tol=1e-14) and math.isclose(
        thr.tilde(1), math.pi / 2 * math.sqrt(2.0), rel_tol=1e-14)
    lim = analysis.coexistence_limits(0.5, 0.5)
    lim_ok = all(math.isclose(x, 2.0 / 3.0, rel_tol=1e-14) for x in lim)
    it = analysis.iteration_bounds(0.5, 0.5, 60)
    it_ok = abs(it.u_lower[-1] - 2.0 / 3.0) < 1e-10
    d2, r2, sig, lam = 1.3, 0.9, 0.4, 0.25
    ell = analysis.eigen_length(d2, r2, sig, lam)
    # invert the length formula back to the eigenvalue
    lam_back = ((2 * math.pi * d2 / ell) ** 2 + sig**2) / (4 * d2) - r2
    eig_ok = abs(lam_back - lam) < 1e-12 and math.isclose(
        analysis.eigen_length(1.0, 1.0, 0.0, 0.0), math.pi, rel_tol=1e-14)
    c_sig, d2, r2, k, h = 0.3, 1.0, 1.0, 0.5, 0.5
    delta = analysis.thm7_delta_max(c_sig, d2, r2, k, h)
    root_res = d2 * delta**2 + c_sig * delta - 0.5 * r2 * (1 - h * (1 - k))
    root_ok = delta > 0 and abs(root_res) < 1e-14
    formula_time = time.perf_counter() - t0
    pers = analysis.persistence_scenario()
    details = {"thresholds": thr_ok, "coexistence_limits": lim_ok, "iteration_bounds": it_ok,
               "u_bar_60": it.u_lower[-1], "eigen_length": eig_ok, "thm7_delta": delta,
               "thm7_root_residual": root_res, "formula_seconds": formula_time,
               "persistence_min": pers.min_on_window, "persistence_target": pers.a - pers.eps}
    ok = thr_ok and lim_ok and it_ok and eig_ok and root_ok and formula_time < 1.0 and pers.passed
    return ok, details


CRITERIA = {"AC-1": ac1, "AC-2": ac2, "AC-3": ac3, "AC-4": ac4, "AC-5": ac5, "AC-6": ac6,
            "AC-7": ac7, "AC-8": ac8}

SUITES = {
    "semiwave": ("AC-1",),
    "dichotomy": ("AC-2", "AC-3"),
    "coexistence": ("AC-4",),
    "thm5": ("AC-5",),
    "thm6": ("AC-6",),
    "convergence": ("AC-7",),
    "formulas": ("AC-8",),
    "all": tuple(CRITERIA),
}


def run_suite(name: str) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(name)
    return [CRITERIA[c]() for c in SUITES[name]]
