import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefanlv.analysis import k_bound
from stefanlv.errors import BadInitialData, FrontCollapse, NegativityBreach, NumericalBlowup
from stefanlv.fbsolver import (
    State,
    boundary_flux,
    cross_interpolate,
    init_state,
    mapped_grid,
    run,
    solve_single_species,
    step,
)
from stefanlv.params import (
    GridSpec,
    InitialData,
    Params,
    Profile,
    SingleSpeciesSpec,
    bump_profile,
    cosine_profile,
)


def test_boundary_flux_linear_profile():
    xi = mapped_grid(64)
    assert boundary_flux(1.0 - xi, 2.0, xi[1]) == pytest.approx(-0.5, abs=1e-12)


def test_boundary_flux_quadratic_profile():
    xi = mapped_grid(64)
    assert boundary_flux(1.0 - xi**2, 1.0, xi[1]) == pytest.approx(-2.0, abs=1e-10)


def test_boundary_flux_zero_profile():
    assert boundary_flux(np.zeros(65), 3.0, 1 / 64) == 0.0


def test_cross_interpolate_at_and_beyond_front():
    v = np.cos(0.5 * np.pi * mapped_grid(64))
    v[-1] = 0.0
    assert cross_interpolate(v, 1.7, 1.7) == 0.0
    assert cross_interpolate(v, 1.7, 3.4) == 0.0


def test_cross_interpolate_constant_inside():
    v = np.ones(65)
    assert cross_interpolate(v, 2.0, np.array([0.0, 0.3, 1.99]))[1] == 1.0


def test_init_rejects_zero_profile():
    x = np.linspace(0, 1, 33)
    init = InitialData(Profile(x, np.zeros(33)), cosine_profile(1.0))
    with pytest.raises(BadInitialData):
        init_state(Params(), init, GridSpec(n_xi=32))


@pytest.mark.parametrize(
    "values",
    [
        lambda x: 1.0 - x,  # nonzero slope at the origin
        lambda x: np.where(x < 0.5, 1.0, 0.0) * np.cos(x),  # not positive before the front
        lambda x: np.cos(x),  # does not vanish at the front
    ],
)
def test_init_rejects_bad_profiles(values):
    x = np.linspace(0, 1, 65)
    with pytest.raises(BadInitialData):
        InitialData(Profile(x, values(x)), cosine_profile(1.0)).check()


def test_init_cosine_maps_to_unit_cosine():
    st_ = init_state(Params(), InitialData.cosine(1.3, 2.1), GridSpec(n_xi=128))
    xi = mapped_grid(128)
    assert np.max(np.abs(st_.u - np.cos(0.5 * np.pi * xi))) < 1e-6
    assert st_.u[-1] == 0.0 and st_.v[-1] == 0.0
    assert (st_.s1, st_.s2) == (1.3, 2.1)


def test_grid_aligned_resampling_is_exact():
    n = 64
    x = np.linspace(0.0, 2.0, n + 1)
    w = 1.0 - (x / 2.0) ** 2 + 0.1 * np.sin(3 * x) ** 2
    w[-1] = 0.0
    prof = Profile(x, w)
    st_ = init_state(Params(), InitialData(prof, prof), GridSpec(n_xi=n))
    assert np.max(np.abs(st_.u - w)) < 1e-14


def test_zero_state_is_static():
    z = np.zeros(65)
    st_ = State(0.0, 1.0, z, 2.0, z.copy())
    new = step(st_, Params(), GridSpec(n_xi=64), dt=1e-2)
    assert new.t == pytest.approx(1e-2)
    assert (new.s1, new.s2) == (1.0, 2.0)
    assert not new.u.any() and not new.v.any()


def test_decoupled_system_matches_single_species():
    p = Params(d1=0.8, r1=1.2, k=0.0, h=0.0, mu1=1.5, mu2=0.7)
    init = InitialData.cosine(1.2, 0.9)
    grid = GridSpec(n_xi=128, dt=2e-3, t_end=5.0, snapshot_stride=1, profile_every=50)
    coupled = run(p, init, grid)
    single = solve_single_species(SingleSpeciesSpec(p.d1, p.r1, 1.0, p.mu1, init.u0), grid)
    assert np.max(np.abs(coupled.s1 - single.s1)) < 1e-6
    for a, b in zip(coupled.profiles, single.profiles):
        assert a[0] == b[0]
        assert np.max(np.abs(a[2] - b[2])) < 1e-6


@pytest.fixture(scope="module")
def standard_run():
    p = Params()
    init = InitialData.cosine(2.0, 1.5)
    return p, init, run(p, init, GridSpec(n_xi=256, dt=1e-3, t_end=10.0, snapshot_stride=1))


def test_fronts_strictly_increase(standard_run):
    _, _, tr = standard_run
    assert tr.min_front_increment[0] > 0 and tr.min_front_increment[1] > 0
    assert np.all(np.diff(tr.t) > 0)


def test_positivity_and_clip_bound(standard_run):
    _, _, tr = standard_run
    assert tr.max_clip <= 1e-8
    for _, _, u, _, v in tr.profiles:
        assert u.min() >= 0 and v.min() >= 0 and u[-1] == 0 and v[-1] == 0


def test_upper_barrier(standard_run):
    _, init, tr = standard_run
    bound = max(1.0, init.u0.values.max()) + 1e-3
    assert tr.umax.max() <= bound and tr.vmax.max() <= bound


def test_linear_front_bound(standard_run):
    p, init, tr = standard_run
    K = k_bound(p, init)
    assert np.all(tr.s1 <= K * p.mu1 * tr.t + init.s1_0 + 1e-3)


def test_diagnostics_finite_and_watchdog_quiet(standard_run):
    _, _, tr = standard_run
    for name in ("s1", "s2", "s1dot", "s2dot", "u0", "v0", "umax", "vmax", "c1_u", "c1_v"):
        assert np.all(np.isfinite(getattr(tr, name)))
    assert tr.watchdog_time is None


def test_scaling_symmetry_in_mapped_coordinates():
    lam = 2.0
    p = Params(d1=1.0, d2=0.6, r1=1.0, r2=0.9, k=0.3, h=0.7, mu1=1.0, mu2=2.0)
    q = Params(d1=lam**2, d2=lam**2 * 0.6, r1=1.0, r2=0.9, k=0.3, h=0.7, mu1=lam**2, mu2=lam**2 * 2.0)
    grid = GridSpec(n_xi=64, dt=2e-3, t_end=1.0)
    a = run(p, InitialData.cosine(1.0, 1.4), grid)
    b = run(q, InitialData.cosine(lam, lam * 1.4), grid)
    assert np.max(np.abs(b.s1 / lam - a.s1)) < 1e-12
    assert np.max(np.abs(b.s2 / lam - a.s2)) < 1e-12
    assert np.max(np.abs(b.profiles[-1][2] - a.profiles[-1][2])) < 1e-12


def test_zero_end_time_gives_initial_snapshot_only():
    tr = run(Params(), InitialData.cosine(1.0, 1.0), GridSpec(n_xi=32, t_end=0.0))
    assert tr.t.tolist() == [0.0]
    assert len(tr.profiles) == 1


def test_snapshot_limit_and_time_stamps():
    grid = GridSpec(n_xi=32, dt=1e-3, t_end=5.0)
    tr = run(Params(), InitialData.cosine(1.0, 1.0), grid)
    assert tr.t.size <= 2001
    assert tr.t[-1] == pytest.approx(5.0, abs=1e-12)


def test_negativity_breach_reports_time_and_partial_trajectory():
    with pytest.raises(NegativityBreach) as exc:
        run(Params(k=1e6), InitialData.cosine(1.0, 1.0), GridSpec(n_xi=32, dt=1e-3, t_end=1.0))
    assert exc.value.t == pytest.approx(1e-3)
    assert exc.value.trajectory is not None and exc.value.trajectory.t[0] == 0.0


def test_blowup_on_non_finite_input():
    u = np.cos(0.5 * np.pi * mapped_grid(32))
    u[-1] = 0.0
    u[3] = np.nan
    st_ = State(0.0, 1.0, u, 1.0, np.abs(u.copy()))
    with pytest.raises(NumericalBlowup):
        step(st_, Params(), GridSpec(n_xi=32), dt=1e-3)


def test_front_collapse_on_negative_flux():
    # a profile rising into the front gives a backward front speed
    xi = mapped_grid(32)
    u = np.sin(np.pi * xi) + 0.0
    u[-1] = 0.0
    u[-2] = -0.5
    st_ = State(0.0, 1.0, u, 1.0, np.cos(0.5 * np.pi * xi) * (xi < 1))
    with pytest.raises(FrontCollapse):
        step(st_, Params(), GridSpec(n_xi=32), dt=1e-3)


def test_reaction_guard_rejects_large_dt():
    with pytest.raises(ValueError):
        run(Params(r1=10.0), InitialData.cosine(1, 1), GridSpec(n_xi=32, dt=0.1, t_end=1))


@settings(max_examples=12, deadline=None)
@given(
    s1=st.floats(0.3, 3.0),
    s2=st.floats(0.3, 3.0),
    k=st.floats(0.0, 2.0),
    h=st.floats(0.0, 2.0),
    mu1=st.floats(0.1, 5.0),
    mu2=st.floats(0.1, 5.0),
    amp=st.floats(0.2, 1.5),
    bump=st.booleans(),
)
def test_invariants_hold_for_random_data(s1, s2, k, h, mu1, mu2, amp, bump):
    p = Params(k=k, h=h, mu1=mu1, mu2=mu2)
    make = bump_profile if bump else cosine_profile
    init = InitialData(make(s1, amp), make(s2, 1.0))
    tr = run(p, init, GridSpec(n_xi=64, dt=2e-3, t_end=2.0))
    assert tr.min_front_increment[0] >= 0 and tr.min_front_increment[1] >= 0
    assert tr.max_clip <= 1e-8
    assert tr.umax.max() <= max(1.0, amp) + 1e-3
    assert tr.vmax.max() <= 1.0 + 1e-3
    K = k_bound(p, init)
    assert np.all(tr.s1 <= K * p.mu1 * tr.t + s1 + 1e-3)
    assert math.isfinite(tr.s1[-1]) and math.isfinite(tr.s2[-1])
