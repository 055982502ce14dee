import orjson
import pytest

from perfweld.core.exception import MachineSpecError
from perfweld.schema.machine import MachineSpec, load_machine_spec


def _raw(**overrides) -> dict:
    raw = {
        "element_bytes": 8,
        "W": 8,
        "t_c": 1e-9,
        "beta_mem": 1e-9,
        "cache_levels": [
            {"size_bytes": 8192 * 8, "beta": 1e-10},
            {"size_bytes": 262144 * 8, "beta": 2e-10},
        ],
    }
    raw.update(overrides)
    return raw


def _write(tmp_path, raw) -> str:
    path = tmp_path / "machine.json"
    path.write_bytes(orjson.dumps(raw))
    return str(path)


def test_valid_spec_converts_bytes_to_elements(tmp_path):
    spec = load_machine_spec(_write(tmp_path, _raw()))
    assert [lvl.size_elements for lvl in spec.cache_levels] == [8192, 262144]
    assert spec.last_level.size_elements == 262144
    assert spec.W == 8


def test_decreasing_cache_sizes_rejected(tmp_path):
    raw = _raw(cache_levels=[
        {"size_bytes": 262144 * 8, "beta": 1e-10},
        {"size_bytes": 8192 * 8, "beta": 2e-10},
    ])
    with pytest.raises(MachineSpecError, match="cache sizes must increase") as info:
        load_machine_spec(_write(tmp_path, raw))
    assert info.value.field == "cache_levels[1].size_bytes"


def test_zero_flop_time_rejected(tmp_path):
    with pytest.raises(MachineSpecError, match="t_c must be positive") as info:
        load_machine_spec(_write(tmp_path, _raw(t_c=0)))
    assert info.value.field == "t_c"


@pytest.mark.parametrize("field", ["element_bytes", "W", "t_c", "beta_mem", "cache_levels"])
def test_missing_field_named(tmp_path, field):
    raw = _raw()
    del raw[field]
    with pytest.raises(MachineSpecError, match=f"missing field: {field}"):
        load_machine_spec(_write(tmp_path, raw))


def test_missing_level_beta_named(tmp_path):
    raw = _raw(cache_levels=[{"size_bytes": 65536}])
    with pytest.raises(MachineSpecError) as info:
        load_machine_spec(_write(tmp_path, raw))
    assert info.value.field == "cache_levels[0].beta"


def test_level_smaller_than_a_line_rejected(tmp_path):
    raw = _raw(cache_levels=[{"size_bytes": 32, "beta": 1e-10}])
    with pytest.raises(MachineSpecError, match="smaller than one cacheline"):
        load_machine_spec(_write(tmp_path, raw))


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(MachineSpecError, match="not found"):
        load_machine_spec(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(MachineSpecError, match="not valid JSON"):
        load_machine_spec(bad)


def test_file_dict_round_trip():
    raw = _raw()
    assert MachineSpec.from_file_dict(raw).to_file_dict() == raw


def test_scaled_multiplies_every_time_constant(desk):
    doubled = desk.scaled(2.0)
    assert doubled.t_c == 2 * desk.t_c
    assert doubled.beta_mem == 2 * desk.beta_mem
    assert [lvl.beta for lvl in doubled.cache_levels] == [2 * lvl.beta for lvl in desk.cache_levels]
    assert [lvl.size_elements for lvl in doubled.cache_levels] == [
        lvl.size_elements for lvl in desk.cache_levels
    ]
