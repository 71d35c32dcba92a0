import copy
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefanlv.config import PRESETS, RunSpec, echo, from_dict, parse_config, preset_spec
from stefanlv.errors import SchemaError

MINIMAL = {
    "params": {"d1": 1, "d2": 1, "r1": 1, "r2": 1, "k": 0.5, "h": 0.5, "mu1": 1, "mu2": 1},
    "init": {"family": "cosine", "s1_0": 2, "s2_0": 2},
}


def doc(**changes):
    d = copy.deepcopy(MINIMAL)
    for path, value in changes.items():
        keys = path.split("__")
        target = d
        for k in keys[:-1]:
            target = target.setdefault(k, {})
        if value is KeyError:
            del target[keys[-1]]
        else:
            target[keys[-1]] = value
    return json.dumps(d)


def test_minimal_document_gets_defaults():
    spec = parse_config(doc())
    assert spec.grid.n_xi == 256
    assert spec.grid.dt is None
    assert spec.grid.t_end == 10.0
    assert spec.outputs.dir == "out" and spec.outputs.svg is True
    assert spec.model == "coupled" and spec.preset is None
    assert spec.init.u_amp == 1.0


def test_missing_parameter_names_the_key_path():
    with pytest.raises(SchemaError) as exc:
        parse_config(doc(params__d1=KeyError))
    assert exc.value.path == "params.d1"
    assert str(exc.value) == "params.d1"


@pytest.mark.parametrize(
    "change, path",
    [
        (dict(params__mu2="fast"), "params.mu2"),
        (dict(grid__n_xi=128.5), "grid.n_xi"),
        (dict(init__s1_0=KeyError), "init.s1_0"),
        (dict(outputs__svg="yes"), "outputs.svg"),
        (dict(params__extra=1.0), "params.extra"),
        (dict(params=KeyError), "params"),
    ],
)
def test_schema_errors(change, path):
    with pytest.raises(SchemaError) as exc:
        parse_config(doc(**change))
    assert exc.value.path == path


def test_negative_competition_is_a_value_error():
    with pytest.raises(ValueError, match="k"):
        parse_config(doc(params__k=-0.1))


@pytest.mark.parametrize(
    "change",
    [dict(init__family="gaussian"), dict(model="pde"), dict(grid__n_xi=8), dict(init__s2_0=-1.0)],
)
def test_invariant_violations(change):
    with pytest.raises(ValueError):
        parse_config(doc(**change))


def test_invalid_json():
    with pytest.raises(ValueError):
        parse_config("{not json")


def test_unknown_preset():
    with pytest.raises(ValueError, match="preset"):
        from_dict({"preset": "thm9"})


def test_preset_with_override():
    spec = from_dict({"preset": "thm3-coexist", "grid": {"t_end": 5.0}})
    assert spec.grid.t_end == 5.0 and spec.grid.n_xi == 512
    assert spec.params.k == 0.5 and spec.preset == "thm3-coexist"


def test_custom_table_family():
    d = json.loads(doc())
    d["init"] = {"family": "custom-table",
                 "u_table": [[0, 1], [0.5, 0.8], [1.0, 0]],
                 "v_table": [[0, 0.5], [1.0, 0.4], [2.0, 0]]}
    spec = from_dict(d)
    assert (spec.init.s1_0, spec.init.s2_0) == (1.0, 2.0)
    init = spec.init.build()
    assert init.v0.front == 2.0


def test_custom_table_front_mismatch():
    d = json.loads(doc())
    d["init"] = {"family": "custom-table", "s1_0": 3.0,
                 "u_table": [[0, 1], [1.0, 0]], "v_table": [[0, 1], [1.0, 0]]}
    with pytest.raises(ValueError):
        from_dict(d)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_parse_and_round_trip(name):
    spec = preset_spec(name)
    assert isinstance(spec, RunSpec)
    assert parse_config(json.dumps(echo(spec))) == spec


@settings(max_examples=40)
@given(
    d1=st.floats(0.01, 10), k=st.floats(0, 3), mu2=st.floats(0.01, 10),
    s1=st.floats(0.1, 10), n_xi=st.integers(32, 4096),
    dt=st.one_of(st.none(), st.floats(1e-5, 1e-2)), t_end=st.floats(0, 500),
    family=st.sampled_from(["cosine", "bump"]), svg=st.booleans(),
)
def test_round_trip_property(d1, k, mu2, s1, n_xi, dt, t_end, family, svg):
    d = json.loads(doc(params__d1=d1, params__k=k, params__mu2=mu2, init__s1_0=s1,
                       init__family=family, grid__n_xi=n_xi, grid__dt=dt, grid__t_end=t_end,
                       outputs__svg=svg))
    spec = from_dict(d)
    assert parse_config(json.dumps(echo(spec))) == spec
