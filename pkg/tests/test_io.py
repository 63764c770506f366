import json

import numpy as np
import pytest

from haarconv import SO3, SPHERE, DenseMeasure, EmpiricalMeasure, builtin_group, subgroups
from haarconv.io import dump_json, family_from_json, load_measure, parse_carrier, parse_space, parse_subgroup


def test_parse_space_forms():
    X = parse_space("S3/{e,(12)}")
    assert X.size == 3 and X.K.labels() == ["e", "(12)"]
    Y = parse_space("D4/K3")
    assert Y.K.members == subgroups(builtin_group("D4"))[3].members
    assert parse_space("SO3/SO2") is SPHERE
    assert parse_carrier("SO3") is SO3
    with pytest.raises(ValueError):
        parse_space("S3")


def test_parse_subgroup_errors():
    S3 = builtin_group("S3")
    with pytest.raises(ValueError):
        parse_subgroup(S3, "K99")
    with pytest.raises(ValueError):
        parse_subgroup(S3, "(12)")


def test_family_spec_haar_initial():
    sg = family_from_json({"group": "D4", "rate": 2.0, "jump": {"weights": [1, 0, 0, 0, 0, 0, 0, 0]},
                           "initial": "haar:{(13)(24)}"})
    assert sg.initial.support().tolist() == [0, builtin_group("D4").index_of("(13)(24)")]
    with pytest.raises(ValueError):
        family_from_json({"group": "SO3", "rate": 1.0, "jump": [1.0]})


def test_measure_roundtrip(tmp_path):
    X = parse_space("S3/{e,(12)}")
    mu = DenseMeasure(X, [0.2, 0.3, 0.5])
    path = tmp_path / "m.json"
    dump_json(mu.to_json(), path)
    assert np.array_equal(load_measure(path).weights, mu.weights)
    emp = EmpiricalMeasure(SPHERE, [[0, 0, 1], [0, 1, 0]], [0.25, 0.75], seed=4)
    path.write_text(json.dumps(emp.to_json()))
    back = load_measure(path)
    assert np.allclose(back.weights, [0.25, 0.75]) and back.seed == 4


def test_dump_json_is_sorted_and_stable():
    text = dump_json({"b": 1, "a": [1.0, 2.0]}, seed=3)
    assert text == dump_json({"a": [1.0, 2.0], "b": 1}, seed=3)
    assert text.index('"a"') < text.index('"b"') < text.index('"seed"')
