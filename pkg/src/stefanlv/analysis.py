"""Closed-form thresholds, certificates and finite-time classification of runs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateCompetition,
    GapTooSmall,
    ImaginaryRoot,
    InfeasibleBarrier,
    InsufficientData,
    NotApplicable,
)
from .params import InitialData, Params

SPREADING = "Spreading"
VANISHING = "Vanishing"
INDETERMINATE = "Indeterminate"

PASS, FAIL, NA = "pass", "fail", "n/a"


def _critical_length(d, rate):
    return 0.5 * math.pi * math.sqrt(d / rate)


@dataclass(frozen=True)
class Thresholds:
    """Critical front positions; ``None`` marks an undefined reduced threshold."""

    s1_star: float
    s2_star: float
    s1_tilde: float | None
    s2_tilde: float | None

    def star(self, species):
        return self.s1_star if species == 1 else self.s2_star

    def tilde(self, species):
        return self.s1_tilde if species == 1 else self.s2_tilde

    def as_dict(self):
        return asdict(self)


def thresholds(params: Params) -> Thresholds:
    p = params
    return Thresholds(
        s1_star=_critical_length(p.d1, p.r1),
        s2_star=_critical_length(p.d2, p.r2),
        s1_tilde=_critical_length(p.d1, p.r1 * (1 - p.k)) if p.k < 1 else None,
        s2_tilde=_critical_length(p.d2, p.r2 * (1 - p.h)) if p.h < 1 else None,
    )


def single_species_thresholds(d, r, a) -> Thresholds:
    """Thresholds for a one-species run (species 2 fields are NaN)."""
    return Thresholds(_critical_length(d, r * a), math.nan, None, None)


def coexistence_limits(k, h):
    if k * h == 1:
        raise DegenerateCompetition("h*k = 1 has no isolated coexistence state")
    den = 1.0 - h * k
    return (1.0 - k) / den, (1.0 - h) / den


@dataclass(frozen=True, eq=False)
class IterationBounds:
    """Lower bounds for u (``u_lower``) and upper bounds for v (``v_upper``), n = 1..N."""

    u_lower: np.ndarray
    v_upper: np.ndarray
    k: float
    h: float
    converged: bool


def iteration_bounds(k, h, N) -> IterationBounds:
    if not (0 <= k < 1 and 0 <= h < 1):
        raise ValueError("iteration bounds need 0 <= k, h < 1")
    if N < 1:
        raise ValueError("N must be positive")
    u = np.empty(N)
    v = np.empty(N)
    v[0], u[0] = 1.0, 1.0 - k
    for n in range(1, N):
        v[n] = 1.0 - h * u[n - 1]
        u[n] = 1.0 - k * v[n]
    u_lim, _ = coexistence_limits(k, h)
    return IterationBounds(u, v, k, h, bool(abs(u[-1] - u_lim) < 1e-10))


class FrontFit(NamedTuple):
    slope: float
    drift: float
    rms_residual: float
    t_start: float


def fit_front_speed(traj, species=1, window_fraction=0.3) -> FrontFit:
    """Least-squares line through the trailing ``window_fraction`` of front samples."""
    if not 0 < window_fraction <= 0.5:
        raise InsufficientData("window_fraction must lie in (0, 0.5]")
    t = np.asarray(traj.t)
    s = np.asarray(traj.front(species))
    n = t.size
    m = int(math.ceil(window_fraction * n))
    if m < 3 or n < 2 * m:
        raise InsufficientData(f"{n} samples are too few for a {window_fraction:.0%} window")
    tw, sw = t[-m:], s[-m:]
    slope, drift = np.polyfit(tw, sw, 1)
    resid = sw - (slope * tw + drift)
    return FrontFit(float(slope), float(drift), float(np.sqrt(np.mean(resid**2))), float(tw[0]))


@dataclass(frozen=True)
class Criteria:
    vanish_tol: float = 1e-4
    slope_floor: float = 1e-3
    window: float = 0.3


@dataclass(frozen=True)
class SpeciesOutcome:
    label: str
    final_front: float
    final_max: float
    slope: float
    drift: float
    window: float

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Outcome:
    species: tuple[SpeciesOutcome, ...]

    def __getitem__(self, i):
        return self.species[i - 1]

    @property
    def labels(self):
        return tuple(s.label for s in self.species)

    def as_dict(self):
        return {f"species{i + 1}": s.as_dict() for i, s in enumerate(self.species)}


def classify(traj, thr: Thresholds, criteria: Criteria = Criteria()) -> Outcome:
    """Finite-time label per species: Vanishing, Spreading or Indeterminate."""
    out = []
    for sp in range(1, traj.n_species + 1):
        front = float(traj.front(sp)[-1])
        peak = float(traj.peak(sp)[-1])
        try:
            fit = fit_front_speed(traj, sp, criteria.window)
            slope, drift = fit.slope, fit.drift
        except InsufficientData:
            slope = drift = math.nan
        if peak < criteria.vanish_tol:
            label = VANISHING
        elif front > thr.star(sp) and slope > criteria.slope_floor:
            label = SPREADING
        else:
            label = INDETERMINATE
        out.append(SpeciesOutcome(label, front, peak, slope, drift, criteria.window))
    return Outcome(tuple(out))


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _implication(name, hypothesis, conclusion, detail):
    if not hypothesis:
        return Check(name, NA, detail)
    return Check(name, PASS if conclusion else FAIL, detail)


def dichotomy_consistency(outcome: Outcome, thr: Thresholds, traj, limit_tol=0.05,
                          region=None) -> list[Check]:
    """Evaluate each implication of the dichotomy results whose hypothesis is observed.

    ``region`` may carry a precomputed region-A verdict; otherwise it is
    computed only when the other hypotheses of the fast-strong result hold.
    """
    if traj.n_species != 2:
        return []
    l1, l2 = outcome.labels
    f1, f2 = outcome[1].final_front, outcome[2].final_front
    s10, s20 = traj.initial_fronts
    p = traj.params
    checks = []
    for sp, other, lab, lab_o, front in ((1, 2, l1, l2, f1), (2, 1, l2, l1, f2)):
        checks.append(_implication(
            f"bounded-front-above-star-forces-other-spreading[species{sp}]",
            lab == VANISHING and front > thr.star(sp),
            lab_o == SPREADING,
            f"species{sp} {lab} with front {front:.4g} vs s*={thr.star(sp):.4g}; species{other} {lab_o}",
        ))
    for sp, lab, front in ((1, l1, f1), (2, l2, f2)):
        tilde = thr.tilde(sp)
        checks.append(_implication(
            f"front-above-tilde-spreads[species{sp}]",
            tilde is not None and front > tilde,
            lab == SPREADING,
            f"front {front:.4g} vs s~={tilde if tilde is None else round(tilde, 6)}; label {lab}",
        ))
    checks.append(_implication(
        "initial-front-above-star-not-both-vanish",
        s10 >= thr.s1_star or s20 >= thr.s2_star,
        not (l1 == VANISHING and l2 == VANISHING),
        f"labels {l1}/{l2}",
    ))
    checks.append(_implication(
        "weak-competition-large-initial-fronts-both-spread",
        thr.s1_tilde is not None and thr.s2_tilde is not None
        and s10 >= thr.s1_tilde and s20 >= thr.s2_tilde,
        l1 == SPREADING and l2 == SPREADING,
        f"labels {l1}/{l2}",
    ))
    if p is not None:
        hyp = 0 < p.k < 1 < p.h and thr.s1_tilde is not None and f1 > thr.s1_tilde
        if hyp and region is None:
            from .semiwave import in_region_A

            region = in_region_A(p)
        checks.append(_implication(
            "fast-strong-excludes-weak",
            hyp and bool(region),
            l1 == SPREADING and l2 == VANISHING,
            f"labels {l1}/{l2}",
        ))
        u_end, v_end = float(traj.u0[-1]), float(traj.v0[-1])
        checks.append(_implication(
            "exclusion-limit[species1->1]",
            l1 == SPREADING and l2 == VANISHING,
            abs(u_end - 1.0) <= limit_tol,
            f"u(T,0)={u_end:.6g}",
        ))
        checks.append(_implication(
            "exclusion-limit[species2->1]",
            l2 == SPREADING and l1 == VANISHING,
            abs(v_end - 1.0) <= limit_tol,
            f"v(T,0)={v_end:.6g}",
        ))
        if p.h * p.k != 1:
            u_lim, v_lim = coexistence_limits(p.k, p.h)
            checks.append(_implication(
                "coexistence-limit",
                l1 == SPREADING and l2 == SPREADING and p.k < 1 and p.h < 1,
                abs(u_end - u_lim) <= limit_tol * u_lim and abs(v_end - v_lim) <= limit_tol * v_lim,
                f"u(T,0)={u_end:.6g} vs {u_lim:.6g}, v(T,0)={v_end:.6g} vs {v_lim:.6g}",
            ))
    return checks


def eigen_length(d2, r2, sigma, lam):
    """Interval length whose principal Dirichlet eigenvalue of
    -d2 phi'' - sigma phi' - r2 phi is ``lam``."""
    disc = 4.0 * d2 * (r2 + lam) - sigma * sigma
    if disc <= 0:
        raise ImaginaryRoot(f"4 d2 (r2 + lam) - sigma^2 = {disc:.3g} <= 0")
    return 2.0 * math.pi * d2 / math.sqrt(disc)


def thm7_delta_max(c_sigma, d2, r2, k, h):
    """Largest barrier decay rate delta with delta (c + d2 delta) <= r2/2 (1 - h (1 - k))."""
    if h * (1 - k) >= 1:
        raise InfeasibleBarrier(f"h(1-k) = {h * (1 - k):.6g} >= 1")
    rhs = 0.5 * r2 * (1.0 - h * (1.0 - k))
    return (-c_sigma + math.sqrt(c_sigma * c_sigma + 4.0 * d2 * rhs)) / (2.0 * d2)


@dataclass(frozen=True)
class Thm6Certificate:
    """Data certifying that the slow strong species cannot catch the other front.

    ``sigma`` is ``K * mu1``; ``ell_sigma`` and ``delta_sigma`` are evaluated
    there (``None`` when ``sigma`` is out of range). ``L_of_mu1`` equals
    ``ell_sigma`` by construction.
    """

    k_bound: float
    sigma_bar: float
    mu1_bar: float
    sigma: float
    L_of_mu1: float | None
    ell_sigma: float | None
    delta_sigma: float | None
    holds: bool
    note: str = ""

    def as_dict(self):
        return asdict(self)

    def lower_envelope(self, t, s1_0):
        """Front bound K mu1 t + s1_0 + L(mu1) (NaN when L is undefined)."""
        if self.L_of_mu1 is None:
            return np.full_like(np.asarray(t, dtype=float), np.nan)
        return self.sigma * np.asarray(t, dtype=float) + s1_0 + self.L_of_mu1


def k_bound(params: Params, init: InitialData):
    """Growth constant in the linear bound s1(t) <= K mu1 t + s1_0."""
    x, u = init.u0.x, init.u0.values
    slope_min = float(np.min(np.diff(u) / np.diff(x)))
    return 2.0 * max(max(1.0, float(np.max(u))) * math.sqrt(params.r1 / (2.0 * params.d1)), -slope_min)


def _delta_sigma(params, init, sigma, n=2000):
    d2 = params.d2
    ell = eigen_length(d2, params.r2, sigma, -0.5 * params.r2)
    y = np.linspace(0.0, ell, n + 1)[1:-1]
    phi = np.exp(-sigma * y / (2.0 * d2)) * np.sin(np.pi * y / ell)
    w = np.interp(y + init.s1_0, init.v0.x, init.v0.values, right=0.0)
    return ell, float(min(np.min(w / phi), 0.5 * np.min(1.0 / phi)))


def _condition_margin(params, init, sigma):
    ell, delta = _delta_sigma(params, init, sigma)
    rhs = params.mu2 * delta * (math.pi / ell) * math.exp(-sigma * ell / (2.0 * params.d2))
    return rhs - sigma


def thm6_certificate(params: Params, init: InitialData, n_scan=400) -> Thm6Certificate:
    if init.s2_0 <= init.s1_0:
        raise GapTooSmall(f"s2_0={init.s2_0} must exceed s1_0={init.s1_0}")
    K = k_bound(params, init)
    smax = math.sqrt(2.0 * params.d2 * params.r2)
    sigma = K * params.mu1

    # sigma_bar: first failure of the speed condition, scanning upward then bisecting
    grid = np.linspace(0.0, smax, n_scan + 1)[1:-1]
    lo, hi = 0.0, None
    for s in grid:
        if _condition_margin(params, init, s) > 0:
            lo = s
        else:
            hi = s
            break
    note = ""
    if hi is None:
        hi = smax
    if lo == 0.0:
        # check the limit sigma -> 0+
        if _condition_margin(params, init, grid[0] * 1e-6) <= 0:
            return Thm6Certificate(K, 0.0, 0.0, sigma, None, None, None, False,
                                   "no sigma satisfies the speed condition")
        lo = grid[0] * 1e-6
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _condition_margin(params, init, mid) > 0:
            lo = mid
        else:
            hi = mid
    sigma_bar = float(lo)

    if sigma < smax:
        ell, delta = _delta_sigma(params, init, sigma)
        L = ell
    else:
        ell = delta = L = None
        note = "K*mu1 >= sqrt(2 d2 r2): L(mu1) undefined"
    gap = init.s2_0 - init.s1_0
    holds = bool(L is not None and sigma < sigma_bar and gap > L)
    return Thm6Certificate(K, sigma_bar, sigma_bar / K, sigma, L, ell, delta, holds, note)


def speed_lower_bound_check(traj, params: Params, outcome: Outcome | None = None,
                            tol_rel=0.05, window=0.3, speeds=None) -> dict:
    """Compare fitted front slopes with the reduced semi-wave speeds.

    A species is checked when its competition coefficient is below 1 and (if
    ``outcome`` is given) it is labelled Spreading. Raises NotApplicable when
    no species qualifies.
    """
    if speeds is None:
        from .semiwave import competition_speeds

        speeds = competition_speeds(params)
    report = {}
    for sp, coeff, c_red in ((1, params.k, speeds.c1_reduced), (2, params.h, speeds.c2_reduced)):
        entry = {"status": NA, "c_reduced": c_red, "slope": None, "ratio": None}
        spreading = outcome is None or outcome[sp].label == SPREADING
        if coeff < 1 and c_red is not None and spreading and sp <= traj.n_species:
            slope = fit_front_speed(traj, sp, window).slope
            entry.update(slope=slope, ratio=slope / c_red,
                         status=PASS if slope >= (1.0 - tol_rel) * c_red else FAIL)
        report[f"species{sp}"] = entry
    if all(e["status"] == NA for e in report.values()):
        raise NotApplicable("no species has a defined reduced speed and a spreading front")
    return report


@dataclass
class PersistenceResult:
    length: float
    L: float
    eps: float
    a: float
    min_on_window: float
    passed: bool
    profile: np.ndarray = field(repr=False)


def persistence_scenario(d=1.0, r=1.0, a=1.0, eps=0.05, L=None, n_xi=256, t_end=60.0,
                         amplitude=0.01):
    """Logistic growth on a fixed interval with a zero far end.

    The interval length is four times the critical length. Starting from a
    small positive bump, the late-time minimum on ``[0, L]`` is compared
    with ``a - eps``.
    """
    from .fbsolver import persist_fixed_domain

    length = 4.0 * _critical_length(d, r * a)
    if L is None:
        L = _critical_length(d, r * a)
    w = persist_fixed_domain(d, r, a, length, amplitude, n_xi, t_end)
    xi = np.linspace(0.0, 1.0, n_xi + 1)
    window = w[xi * length <= L]
    m = float(window.min())
    return PersistenceResult(length, L, eps, a, m, m >= a - eps, w)
