"""Plain-text and JSON file formats."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from hgpnlets.circuits import Circuit, Gate
from hgpnlets.css import CssCode
from hgpnlets.expansion import Distribution, code_to_str, str_to_code
from hgpnlets.gf2 import BitMatrix
from hgpnlets.graphs import Graph
from hgpnlets.schemas import validate

CSS_SEPARATOR = "---"


def format_matrix(m: BitMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"]
    lines += ["".join("1" if b else "0" for b in row) for row in m.to_dense()]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> BitMatrix:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix block")
    rows, cols = (int(x) for x in lines[0].split())
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"expected {rows} rows, found {len(body)}")
    dense = np.zeros((rows, cols), dtype=np.uint8)
    for i, ln in enumerate(body):
        if len(ln) != cols or set(ln) - {"0", "1"}:
            raise ValueError(f"row {i} is not a length-{cols} 0/1 string")
        dense[i] = np.frombuffer(ln.encode(), dtype=np.uint8) - ord("0")
    return BitMatrix.from_dense(dense) if rows else BitMatrix(0, cols)


def read_matrix(path) -> BitMatrix:
    return parse_matrix(Path(path).read_text())


def write_matrix(path, m: BitMatrix) -> None:
    atomic_write(path, format_matrix(m))


def format_css(c: CssCode) -> str:
    return format_matrix(c.hx) + CSS_SEPARATOR + "\n" + format_matrix(c.hz)


def parse_css(text: str) -> CssCode:
    parts = [p for p in text.split(f"\n{CSS_SEPARATOR}\n")]
    if len(parts) != 2:
        raise ValueError("CSS file needs exactly two blocks separated by '---'")
    return CssCode(parse_matrix(parts[0]), parse_matrix(parts[1]))


def read_css(path) -> CssCode:
    return parse_css(Path(path).read_text())


def write_css(path, c: CssCode) -> None:
    atomic_write(path, format_css(c))


def format_edges(g: Graph) -> str:
    return "\n".join([f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]) + "\n"


def parse_edges(text: str) -> Graph:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    n, m = int(lines[0][0]), int(lines[0][1])
    edges = [(int(a), int(b)) for a, b in lines[1:]]
    if len(edges) != m:
        raise ValueError(f"header says {m} edges, found {len(edges)}")
    return Graph(n, edges)


def read_edges(path) -> Graph:
    return parse_edges(Path(path).read_text())


def write_edges(path, g: Graph) -> None:
    atomic_write(path, format_edges(g))


def _complex_matrix(rows) -> np.ndarray:
    """Entries may be numbers or [re, im] pairs."""
    out = []
    for row in rows:
        out.append([complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in row])
    return np.array(out, dtype=complex)


def circuit_from_json(obj: dict) -> Circuit:
    validate("circuit", obj)
    layers = []
    for layer in obj["layers"]:
        layers.append([Gate(tuple(g["qubits"]), _complex_matrix(g["unitary"])) for g in layer])
    return Circuit(int(obj["n"]), layers)


def circuit_to_json(c: Circuit) -> dict:
    return {
        "n": c.n,
        "layers": [
            [
                {
                    "qubits": list(g.qubits),
                    "unitary": [[[float(z.real), float(z.imag)] for z in row] for row in g.unitary],
                }
                for g in layer
            ]
            for layer in c.layers
        ],
    }


def read_circuit(path) -> Circuit:
    return circuit_from_json(json.loads(Path(path).read_text()))


def format_distribution(p: Distribution) -> str:
    return "".join(f"{code_to_str(int(x), p.n)} {m:.17g}\n" for x, m in zip(p.points, p.masses))


def parse_distribution(text: str) -> Distribution:
    pts, masses, n = [], [], None
    for ln in text.strip().splitlines():
        if not ln.strip():
            continue
        s, m = ln.split()
        if n is None:
            n = len(s)
        elif len(s) != n:
            raise ValueError("bit strings of different lengths")
        pts.append(str_to_code(s))
        masses.append(float(m))
    return Distribution(n or 0, np.array(pts), np.array(masses))


def read_distribution(path) -> Distribution:
    return parse_distribution(Path(path).read_text())


def write_distribution(path, p: Distribution) -> None:
    atomic_write(path, format_distribution(p))


def read_state_spec(path) -> dict:
    """State spec JSON, with amplitudes converted to complex numbers."""
    path = Path(path)
    obj = json.loads(path.read_text())
    validate("state_spec", obj)
    spec = dict(obj)
    spec["alpha"] = complex(*obj["alpha"])
    spec["beta"] = complex(*obj["beta"])
    err = obj.get("error", {}) or {}
    spec["error"] = {"x_support": list(err.get("x_support", [])), "z_support": list(err.get("z_support", []))}
    code_file = Path(obj["code_file"])
    spec["code_file"] = code_file if code_file.is_absolute() else path.parent / code_file
    spec.setdefault("logical_index", 0)
    return spec


def to_jsonable(obj):
    """Recursively convert numpy values, complex numbers and infinities."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path, obj) -> None:
    atomic_write(path, json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")
