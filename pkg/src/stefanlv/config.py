"""JSON run configuration, defaults and named presets.

A document has the shape::

    {"params": {"d1": .., "d2": .., "r1": .., "r2": .., "k": .., "h": .., "mu1": .., "mu2": ..},
     "init": {"family": "cosine", "s1_0": .., "s2_0": ..},
     "grid": {"n_xi": 256, "dt": null, "t_end": 10.0},
     "outputs": {"dir": "out", "svg": true}}

``params`` and ``init`` are required; everything else has a default. A
``preset`` key pulls in a named preset and the rest of the document
overrides it key by key. ``model`` selects the coupled system (default),
the single-species problem driven by the species-1 constants, or the
fixed-interval persistence check.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, fields

from .errors import SchemaError
from .params import GridSpec, InitialData, Params, bump_profile, cosine_profile, table_profile

FAMILIES = ("cosine", "bump", "custom-table")
MODELS = ("coupled", "single", "persistence")
PARAM_KEYS = tuple(f.name for f in fields(Params))


@dataclass(frozen=True)
class InitSpec:
    """Named profile family plus fronts and amplitudes (or explicit tables)."""

    family: str = "cosine"
    s1_0: float = 1.0
    s2_0: float = 1.0
    u_amp: float = 1.0
    v_amp: float = 1.0
    u_table: tuple | None = None
    v_table: tuple | None = None

    def build(self) -> InitialData:
        if self.family == "cosine":
            data = InitialData(cosine_profile(self.s1_0, self.u_amp), cosine_profile(self.s2_0, self.v_amp))
        elif self.family == "bump":
            data = InitialData(bump_profile(self.s1_0, self.u_amp), bump_profile(self.s2_0, self.v_amp))
        else:
            data = InitialData(table_profile(self.u_table), table_profile(self.v_table))
        data.check()
        return data


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "out"
    svg: bool = True


@dataclass(frozen=True)
class PersistenceSpec:
    eps: float = 0.05
    amplitude: float = 0.01


@dataclass(frozen=True)
class RunSpec:
    params: Params
    init: InitSpec
    grid: GridSpec = GridSpec()
    outputs: OutputSpec = OutputSpec()
    preset: str | None = None
    model: str = "coupled"
    persistence: PersistenceSpec = field(default_factory=PersistenceSpec)


def _number(doc, key, path, default=None, required=False, integer=False, nullable=False):
    if key not in doc:
        if required:
            raise SchemaError(f"{path}.{key}")
        return default
    val = doc[key]
    if val is None and nullable:
        return None
    ok = isinstance(val, int) if integer else isinstance(val, (int, float))
    if isinstance(val, bool) or not ok:
        raise SchemaError(f"{path}.{key}")
    return val if integer else float(val)


def _section(doc, key, required=False):
    if key not in doc:
        if required:
            raise SchemaError(key)
        return {}
    sec = doc[key]
    if not isinstance(sec, dict):
        raise SchemaError(key)
    return sec


def _no_extra(sec, allowed, path):
    for key in sec:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key)


def _table(sec, key):
    val = sec.get(key)
    if not isinstance(val, list) or not val:
        raise SchemaError(f"init.{key}")
    for row in val:
        if (not isinstance(row, list) or len(row) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in row)):
            raise SchemaError(f"init.{key}")
    return tuple((float(x), float(y)) for x, y in val)


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def from_dict(doc) -> RunSpec:
    if not isinstance(doc, dict):
        raise SchemaError("<root>")
    _no_extra(doc, ("params", "init", "grid", "outputs", "preset", "model", "persistence"), "")
    preset = doc.get("preset")
    if preset is not None:
        if not isinstance(preset, str):
            raise SchemaError("preset")
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; known: {', '.join(PRESETS)}")
        doc = _merge(PRESETS[preset]["config"], {k: v for k, v in doc.items() if k != "preset"})

    model = doc.get("model", "coupled")
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")

    p = _section(doc, "params", required=True)
    _no_extra(p, PARAM_KEYS, "params")
    params = Params(**{k: _number(p, k, "params", required=True) for k in PARAM_KEYS})

    i = _section(doc, "init", required=model != "persistence")
    _no_extra(i, tuple(f.name for f in fields(InitSpec)), "init")
    family = i.get("family", "cosine")
    if family not in FAMILIES:
        raise ValueError(f"init.family must be one of {FAMILIES}, got {family!r}")
    if family == "custom-table":
        u_table, v_table = _table(i, "u_table"), _table(i, "v_table")
        s1_0, s2_0 = u_table[-1][0], v_table[-1][0]
        for key, val in (("s1_0", s1_0), ("s2_0", s2_0)):
            given = _number(i, key, "init")
            if given is not None and not math.isclose(given, val, rel_tol=1e-12):
                raise ValueError(f"init.{key}={given} disagrees with the table support end {val}")
        init = InitSpec(family, s1_0, s2_0, u_table=u_table, v_table=v_table)
    else:
        req = model != "persistence"
        init = InitSpec(
            family,
            _number(i, "s1_0", "init", 1.0, required=req),
            _number(i, "s2_0", "init", 1.0, required=req and model == "coupled"),
            _number(i, "u_amp", "init", 1.0),
            _number(i, "v_amp", "init", 1.0),
        )
        for key in ("s1_0", "s2_0", "u_amp", "v_amp"):
            if not getattr(init, key) > 0:
                raise ValueError(f"init.{key} must be positive")

    g = _section(doc, "grid")
    _no_extra(g, ("n_xi", "dt", "t_end", "snapshot_stride", "profile_every"), "grid")
    grid = GridSpec(
        n_xi=_number(g, "n_xi", "grid", 256, integer=True),
        dt=_number(g, "dt", "grid", None, nullable=True),
        t_end=_number(g, "t_end", "grid", 10.0),
        snapshot_stride=_number(g, "snapshot_stride", "grid", None, integer=True, nullable=True),
        profile_every=_number(g, "profile_every", "grid", 100, integer=True),
    )

    o = _section(doc, "outputs")
    _no_extra(o, ("dir", "svg"), "outputs")
    out_dir = o.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise SchemaError("outputs.dir")
    svg = o.get("svg", True)
    if not isinstance(svg, bool):
        raise SchemaError("outputs.svg")

    ps = _section(doc, "persistence")
    _no_extra(ps, ("eps", "amplitude"), "persistence")
    pers = PersistenceSpec(_number(ps, "eps", "persistence", 0.05),
                           _number(ps, "amplitude", "persistence", 0.01))

    return RunSpec(params, init, grid, OutputSpec(out_dir, svg), preset, model, pers)


def parse_config(text: str) -> RunSpec:
    """Parse and validate a JSON document; defaults are filled in."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"configuration is not valid JSON: {exc}") from None
    return from_dict(doc)


def echo(spec: RunSpec) -> dict:
    """Fully explicit document that parses back to ``spec``."""
    init = {"family": spec.init.family, "s1_0": spec.init.s1_0, "s2_0": spec.init.s2_0,
            "u_amp": spec.init.u_amp, "v_amp": spec.init.v_amp}
    if spec.init.family == "custom-table":
        init["u_table"] = [list(r) for r in spec.init.u_table]
        init["v_table"] = [list(r) for r in spec.init.v_table]
    doc = {
        "params": spec.params.as_dict(),
        "init": init,
        "grid": {"n_xi": spec.grid.n_xi, "dt": spec.grid.dt, "t_end": spec.grid.t_end,
                 "snapshot_stride": spec.grid.snapshot_stride,
                 "profile_every": spec.grid.profile_every},
        "outputs": {"dir": spec.outputs.dir, "svg": spec.outputs.svg},
        "model": spec.model,
        "persistence": {"eps": spec.persistence.eps, "amplitude": spec.persistence.amplitude},
    }
    if spec.preset is not None:
        # the explicit values already reproduce the preset, keep the name as a tag only
        doc["preset"] = spec.preset
    return doc


def with_params(spec: RunSpec, **changes) -> RunSpec:
    from dataclasses import replace

    return replace(spec, params=replace(spec.params, **changes))


def _preset(description, params, init, grid, model="coupled"):
    base = Params().as_dict()
    base.update(params)
    return {
        "description": description,
        "config": {"params": base, "init": init, "grid": grid, "model": model},
    }


PRESETS = {
    "thm1-vanish": _preset(
        "both fronts start below the critical length with slow fronts; both species vanish",
        dict(k=0.5, h=0.5, mu1=0.05, mu2=0.05),
        {"family": "cosine", "s1_0": 0.5, "s2_0": 0.5},
        {"n_xi": 256, "dt": 5e-3, "t_end": 100.0},
    ),
    "thm2-exclusion": _preset(
        "species 1 starts large, species 2 small and slow; species 2 vanishes and u -> 1",
        dict(k=0.5, h=0.5, mu1=1.0, mu2=0.05),
        {"family": "cosine", "s1_0": 3.0, "s2_0": 0.5},
        {"n_xi": 512, "dt": 5e-3, "t_end": 100.0},
    ),
    "thm3-coexist": _preset(
        "weak competition k=h=0.5 with large symmetric initial fronts; both spread and coexist",
        dict(k=0.5, h=0.5, mu1=1.0, mu2=1.0),
        {"family": "cosine", "s1_0": 2.0, "s2_0": 2.0},
        {"n_xi": 512, "dt": 5e-3, "t_end": 200.0},
    ),
    "thm5-fast-strong": _preset(
        "species 1 fast and strong (k=0.3, h=1.5, mu1=10, mu2=0.1); species 2 is excluded",
        dict(k=0.3, h=1.5, mu1=10.0, mu2=0.1),
        {"family": "cosine", "s1_0": 2.0, "s2_0": 2.0},
        {"n_xi": 512, "dt": 5e-3, "t_end": 100.0},
    ),
    "thm6-slow-strong": _preset(
        "species 1 strong but slow, species 2 starts far ahead; species 2 outruns the barrier",
        dict(k=0.5, h=2.0, mu1=0.05, mu2=2.0),
        {"family": "cosine", "s1_0": 1.0, "s2_0": 7.0},
        {"n_xi": 512, "dt": 5e-3, "t_end": 100.0},
    ),
    "prop21-persistence": _preset(
        "logistic growth on a fixed interval four critical lengths long; solution stays near a",
        {},
        {"family": "cosine", "s1_0": 1.0, "s2_0": 1.0},
        {"n_xi": 256, "dt": 1e-2, "t_end": 60.0},
        model="persistence",
    ),
    "single-spread": _preset(
        "single species, d=r=a=mu=1, g0=2; spreads at the semi-wave speed",
        {},
        {"family": "cosine", "s1_0": 2.0, "s2_0": 2.0},
        {"n_xi": 1024, "dt": 5e-3, "t_end": 150.0},
        model="single",
    ),
    "single-vanish": _preset(
        "single species, g0=0.5, mu=0.05; vanishes with the front below the critical length",
        dict(mu1=0.05),
        {"family": "cosine", "s1_0": 0.5, "s2_0": 0.5},
        {"n_xi": 256, "dt": 5e-3, "t_end": 200.0},
        model="single",
    ),
    "debug-blowup": _preset(
        "test fixture: absurd competition k=1e6 drives u negative in one step (solver error)",
        dict(k=1e6),
        {"family": "cosine", "s1_0": 1.0, "s2_0": 1.0},
        {"n_xi": 64, "dt": 1e-3, "t_end": 0.1},
    ),
    "debug-indeterminate": _preset(
        "test fixture: run far too short for any verdict (Indeterminate labels)",
        {},
        {"family": "cosine", "s1_0": 1.0, "s2_0": 1.0},
        {"n_xi": 64, "dt": 1e-2, "t_end": 1.0},
    ),
}


def preset_spec(name: str) -> RunSpec:
    return from_dict({"preset": name})
