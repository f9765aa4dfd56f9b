from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgpnlets.circuits import CNOT, H, Circuit, Gate, cat_circuit, random_brickwork, statevector
from hgpnlets.errors import CssViolationError
from hgpnlets.expansion import Distribution
from hgpnlets.gf2 import BitMatrix
from hgpnlets.graphs import complete_graph, cycle_graph
from hgpnlets.io import (
    circuit_from_json,
    circuit_to_json,
    format_css,
    format_edges,
    format_matrix,
    parse_css,
    parse_distribution,
    parse_edges,
    parse_matrix,
    read_circuit,
    read_css,
    read_distribution,
    read_edges,
    read_state_spec,
    to_jsonable,
    write_css,
    write_distribution,
    write_edges,
    write_json,
)
from hgpnlets.schemas import SCHEMAS, SchemaError, validate


@given(st.integers(0, 6), st.integers(1, 12), st.integers(0, 2**31))
def test_matrix_round_trip(rows, cols, seed):
    dense = np.random.default_rng(seed).integers(0, 2, (rows, cols)).astype(np.uint8)
    m = BitMatrix.from_dense(dense) if rows else BitMatrix(0, cols)
    assert parse_matrix(format_matrix(m)) == m


def test_matrix_format():
    m = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert format_matrix(m) == "2 3\n101\n011\n"


@pytest.mark.parametrize(
    "text",
    ["", "2 3\n101\n", "1 3\n1011\n", "1 3\n1a1\n"],
)
def test_matrix_errors(text):
    with pytest.raises(ValueError):
        parse_matrix(text)


def test_css_round_trip(tmp_path, k4):
    path = tmp_path / "k4.css"
    write_css(path, k4.code)
    c = read_css(path)
    assert c.hx == k4.code.hx and c.hz == k4.code.hz
    assert "---" in format_css(c)


def test_css_rejects_noncommuting():
    text = "1 2\n11\n---\n1 2\n10\n"
    with pytest.raises(CssViolationError):
        parse_css(text)
    with pytest.raises(ValueError):
        parse_css("1 2\n11\n")


def test_edges_round_trip(tmp_path):
    g = complete_graph(5)
    path = tmp_path / "k5.edges"
    write_edges(path, g)
    assert read_edges(path) == g
    assert format_edges(cycle_graph(3)).splitlines()[0] == "3 3"


def test_edges_count_mismatch():
    with pytest.raises(ValueError):
        parse_edges("3 3\n0 1\n1 2\n")


def test_circuit_round_trip(tmp_path, rng):
    c = random_brickwork(4, 2, rng)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(circuit_to_json(c)))
    back = read_circuit(path)
    assert back.n == 4 and back.depth == 2
    assert np.allclose(statevector(back), statevector(c))


def test_circuit_real_entries():
    obj = {"n": 2, "layers": [[{"qubits": [0], "unitary": H.real.tolist()}], [{"qubits": [0, 1], "unitary": CNOT.real.tolist()}]]}
    c = circuit_from_json(obj)
    assert np.allclose(statevector(c), statevector(cat_circuit(2)))


def test_circuit_schema_error():
    with pytest.raises(SchemaError):
        circuit_from_json({"n": 2, "layers": [[{"qubits": [0, 1, 2], "unitary": []}]]})


def test_distribution_round_trip(tmp_path):
    p = Distribution.from_dict(3, {"000": 0.25, "101": 0.75})
    path = tmp_path / "p.txt"
    write_distribution(path, p)
    assert path.read_text().splitlines()[1].startswith("101 ")
    q = read_distribution(path)
    assert q.to_dict() == p.to_dict()


def test_distribution_errors():
    with pytest.raises(ValueError):
        parse_distribution("00 0.5\n111 0.5\n")


def test_state_spec(tmp_path, c3):
    write_css(tmp_path / "c3.css", c3.code)
    s2 = 1 / math.sqrt(2)
    (tmp_path / "state.json").write_text(
        json.dumps(
            {
                "code_file": "c3.css",
                "logical_index": 1,
                "alpha": [s2, 0],
                "beta": [0, s2],
                "error": {"x_support": [1, 2], "z_support": []},
                "seed": 4,
            }
        )
    )
    spec = read_state_spec(tmp_path / "state.json")
    assert spec["alpha"] == complex(s2, 0) and spec["beta"] == complex(0, s2)
    assert spec["code_file"] == tmp_path / "c3.css"
    assert spec["error"] == {"x_support": [1, 2], "z_support": []}
    assert read_css(spec["code_file"]).N == 18


def test_state_spec_schema(tmp_path):
    (tmp_path / "bad.json").write_text(json.dumps({"code_file": "x.css", "alpha": [1], "beta": [0, 0]}))
    with pytest.raises(SchemaError):
        read_state_spec(tmp_path / "bad.json")


def test_to_jsonable():
    obj = {
        1: np.int64(3),
        "a": np.array([1.5, 2.5]),
        "b": (np.bool_(True), float("inf"), -math.inf),
        "c": complex(1, -2),
    }
    out = to_jsonable(obj)
    assert out == {"1": 3, "a": [1.5, 2.5], "b": [True, "inf", "-inf"], "c": [1.0, -2.0]}
    json.dumps(out)


def test_write_json_atomic(tmp_path):
    path = tmp_path / "nested" / "r.json"
    write_json(path, {"x": np.float64(0.5)})
    assert json.loads(path.read_text()) == {"x": 0.5}
    assert [p.name for p in path.parent.iterdir()] == ["r.json"]


class TestSchemas:
    def test_all_are_valid_schemas(self):
        import jsonschema

        for schema in SCHEMAS.values():
            jsonschema.Draft202012Validator.check_schema(schema)

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "cycle", "n": 3},
            {"kind": "random_regular", "n": 10, "d": 3, "seed": 1},
            {"kind": "edges", "n": 2, "edges": [[0, 1]]},
            {"kind": "file", "path": "g.edges"},
        ],
    )
    def test_graph_specs(self, spec):
        validate("graph_spec", spec)

    @pytest.mark.parametrize(
        "spec",
        [{"kind": "cycle"}, {"kind": "torus", "n": 3}, {"kind": "random_regular", "n": 10}, {"n": 3}],
    )
    def test_bad_graph_specs(self, spec):
        with pytest.raises(SchemaError):
            validate("graph_spec", spec)

    def test_config(self):
        validate("experiment_config", {"epsilon": 0.05, "alpha": [1, 0], "beta": 0, "nu": None})
        for bad in ({"epsilon": 1.0}, {"runs": 0}, {"bogus": 1}, {"gammas": [0.7]}):
            with pytest.raises(SchemaError):
                validate("experiment_config", bad)

    def test_message_has_path(self):
        with pytest.raises(SchemaError, match="graph/n"):
            validate("experiment_config", {"graph": {"kind": "cycle", "n": "three"}})
