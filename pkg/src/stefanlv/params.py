"""Model constants, initial data and discretisation settings."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BadInitialData


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")


def _nonnegative(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
        raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")


@dataclass(frozen=True)
class Params:
    """Constants of the two-species system.

    ``k`` is the effect of species 2 on species 1 and ``h`` the effect of
    species 1 on species 2.
    """

    d1: float = 1.0
    d2: float = 1.0
    r1: float = 1.0
    r2: float = 1.0
    k: float = 0.5
    h: float = 0.5
    mu1: float = 1.0
    mu2: float = 1.0

    def __post_init__(self):
        for name in ("d1", "d2", "r1", "r2", "mu1", "mu2"):
            _positive(name, getattr(self, name))
        for name in ("k", "h"):
            _nonnegative(name, getattr(self, name))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Profile:
    """Sampled nonnegative profile on ``[0, front]`` with ``values[-1] == 0``."""

    x: np.ndarray
    values: np.ndarray

    @property
    def front(self):
        return float(self.x[-1])

    def check(self, name="profile"):
        x, w = self.x, self.values
        if x.ndim != 1 or x.shape != w.shape or x.size < 3:
            raise BadInitialData(f"{name}: need matching 1-D samples (at least 3)")
        if x[0] != 0.0 or np.any(np.diff(x) <= 0):
            raise BadInitialData(f"{name}: samples must start at 0 and increase")
        if not np.all(np.isfinite(w)):
            raise BadInitialData(f"{name}: non-finite values")
        if np.any(w[:-1] <= 0):
            raise BadInitialData(f"{name}: must be positive on [0, front)")
        peak = float(np.max(w))
        if abs(w[-1]) > 1e-12 * max(1.0, peak):
            raise BadInitialData(f"{name}: must vanish at the front")
        dx = x[1] - x[0]
        slope = (w[1] - w[0]) / dx
        if abs(slope) > 5.0 * dx * peak / self.front**2 + 1e-12:
            raise BadInitialData(f"{name}: slope at x=0 is {slope:.3g}, expected 0")

    def __eq__(self, other):
        return (
            isinstance(other, Profile)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.values, other.values)
        )


def cosine_profile(front, amplitude=1.0, n=1025):
    x = np.linspace(0.0, front, n)
    w = amplitude * np.cos(0.5 * np.pi * x / front)
    w[-1] = 0.0
    return Profile(x, w)


def bump_profile(front, amplitude=1.0, n=1025):
    x = np.linspace(0.0, front, n)
    w = amplitude * (1.0 - (x / front) ** 2)
    w[-1] = 0.0
    return Profile(x, w)


def table_profile(points):
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise BadInitialData("custom table must be a list of [x, value] pairs")
    return Profile(arr[:, 0].copy(), arr[:, 1].copy())


@dataclass(frozen=True, eq=False)
class InitialData:
    u0: Profile
    v0: Profile

    @property
    def s1_0(self):
        return self.u0.front

    @property
    def s2_0(self):
        return self.v0.front

    def check(self):
        self.u0.check("u0")
        self.v0.check("v0")

    def __eq__(self, other):
        return isinstance(other, InitialData) and self.u0 == other.u0 and self.v0 == other.v0

    @classmethod
    def cosine(cls, s1_0, s2_0, u_amp=1.0, v_amp=1.0):
        return cls(cosine_profile(s1_0, u_amp), cosine_profile(s2_0, v_amp))


@dataclass(frozen=True)
class GridSpec:
    """Discretisation of the mapped unit interval and of time.

    ``n_xi`` is the number of mapped cells per species (``n_xi + 1`` nodes).
    ``dt=None`` picks the default step; ``snapshot_stride=None`` keeps at
    most 2000 snapshots. Full profiles are stored every ``profile_every``
    snapshots (and always for the first and last one).
    """

    n_xi: int = 256
    dt: float | None = None
    t_end: float = 10.0
    snapshot_stride: int | None = None
    profile_every: int = 100

    def __post_init__(self):
        if not isinstance(self.n_xi, int) or self.n_xi < 32:
            raise ValueError(f"n_xi must be an integer >= 32, got {self.n_xi!r}")
        if self.dt is not None:
            _positive("dt", self.dt)
        _nonnegative("t_end", self.t_end)
        if self.snapshot_stride is not None and (
            not isinstance(self.snapshot_stride, int) or self.snapshot_stride < 1
        ):
            raise ValueError("snapshot_stride must be a positive integer")
        if not isinstance(self.profile_every, int) or self.profile_every < 1:
            raise ValueError("profile_every must be a positive integer")

    def resolve_dt(self, max_rate):
        dt = self.dt if self.dt is not None else min(1e-3, 0.25 / max_rate)
        if dt * max_rate >= 0.5:
            raise ValueError(f"dt*max(r)={dt * max_rate:.3g} violates the reaction guard (< 0.5)")
        return dt

    def n_steps(self, dt):
        return int(round(self.t_end / dt))

    def stride(self, n_steps):
        if self.snapshot_stride is not None:
            return self.snapshot_stride
        return max(1, -(-n_steps // 2000))


@dataclass(frozen=True, eq=False)
class SingleSpeciesSpec:
    """Data of the one-species free boundary problem started at time ``tau``."""

    d: float
    r: float
    a: float
    mu: float
    w0: Profile
    tau: float = 0.0
    g0: float | None = field(default=None)

    def __post_init__(self):
        for name in ("d", "r", "a", "mu"):
            _positive(name, getattr(self, name))
        _nonnegative("tau", self.tau)
        if self.g0 is None:
            object.__setattr__(self, "g0", self.w0.front)
        elif not math.isclose(self.g0, self.w0.front, rel_tol=1e-12):
            raise BadInitialData("g0 must equal the support end of w0")
