"""JSON Schemas for input files and emitted reports."""

from __future__ import annotations

import jsonschema

from hgpnlets.errors import HgpError


class SchemaError(HgpError, ValueError):
    """A JSON document does not match its schema."""


_NUM = {"type": "number"}
_NONNEG_INT = {"type": "integer", "minimum": 0}
_POS_INT = {"type": "integer", "minimum": 1}
_UNIT = {"type": "number", "minimum": 0, "maximum": 1}
_COMPLEX_PAIR = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_AMPLITUDE = {"oneOf": [_NUM, _COMPLEX_PAIR]}
_EDGE = {"type": "array", "items": _NONNEG_INT, "minItems": 2, "maxItems": 2}

GRAPH_SPEC = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["cycle", "complete", "random_regular", "file", "edges"]}},
    "allOf": [
        {
            "if": {"properties": {"kind": {"enum": ["cycle", "complete"]}}},
            "then": {"required": ["n"], "properties": {"n": _POS_INT}},
        },
        {
            "if": {"properties": {"kind": {"const": "random_regular"}}},
            "then": {"required": ["n", "d"], "properties": {"n": _POS_INT, "d": _POS_INT, "seed": {"type": "integer"}}},
        },
        {
            "if": {"properties": {"kind": {"const": "file"}}},
            "then": {"required": ["path"], "properties": {"path": {"type": "string"}}},
        },
        {
            "if": {"properties": {"kind": {"const": "edges"}}},
            "then": {"required": ["n", "edges"], "properties": {"n": _POS_INT, "edges": {"type": "array", "items": _EDGE}}},
        },
    ],
}

EXPERIMENT_CONFIG = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "graph": GRAPH_SPEC,
        "epsilon": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "nu": {"oneOf": [{"type": "null"}, {"type": "number", "minimum": 0, "exclusiveMaximum": 1}]},
        "alpha": _AMPLITUDE,
        "beta": _AMPLITUDE,
        "seed": {"type": "integer"},
        "runs": _POS_INT,
        "coset_dim_cap": _POS_INT,
        "family_cap": _POS_INT,
        "v1": _NONNEG_INT,
        "gammas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 0.5}},
    },
}

STATE_SPEC = {
    "type": "object",
    "required": ["code_file", "alpha", "beta"],
    "properties": {
        "code_file": {"type": "string"},
        "logical_index": _NONNEG_INT,
        "alpha": _COMPLEX_PAIR,
        "beta": _COMPLEX_PAIR,
        "error": {
            "type": "object",
            "properties": {
                "x_support": {"type": "array", "items": _NONNEG_INT},
                "z_support": {"type": "array", "items": _NONNEG_INT},
            },
        },
        "seed": {"type": "integer"},
    },
}

_GATE = {
    "type": "object",
    "required": ["qubits", "unitary"],
    "properties": {
        "qubits": {"type": "array", "items": _NONNEG_INT, "minItems": 1, "maxItems": 2},
        "unitary": {
            "type": "array",
            "minItems": 2,
            "maxItems": 4,
            "items": {"type": "array", "minItems": 2, "maxItems": 4, "items": _AMPLITUDE},
        },
    },
}

CIRCUIT = {
    "type": "object",
    "required": ["n", "layers"],
    "properties": {
        "n": _NONNEG_INT,
        "layers": {"type": "array", "items": {"type": "array", "items": _GATE}},
    },
}

SOUNDNESS_REPORT = {
    "type": "object",
    "required": ["n", "m", "rho_exhaustive", "rho_bound", "argmin_word"],
    "properties": {
        "n": _POS_INT,
        "m": _NONNEG_INT,
        "rho_exhaustive": _NUM,
        "rho_bound": _NUM,
        "argmin_word": {"type": "string", "pattern": "^[01]*$"},
    },
}

BUILD_REPORT = {
    "type": "object",
    "required": ["N", "n", "m", "d", "k_rank", "k_formula", "max_check_weight"],
    "properties": {
        "N": _POS_INT,
        "n": _POS_INT,
        "m": _NONNEG_INT,
        "d": _NONNEG_INT,
        "k_rank": _NONNEG_INT,
        "k_formula": _NONNEG_INT,
        "max_check_weight": _NONNEG_INT,
        "distance": {"oneOf": [_NONNEG_INT, {"const": "inf"}]},
    },
}

_LOCALIZED = {
    "type": "object",
    "required": ["kind", "mode", "size", "cells", "qualitative_holds"],
    "properties": {
        "kind": {"enum": ["X", "Z"]},
        "mode": {"enum": ["full", "stabilizer"]},
        "size": _POS_INT,
        "cells": {"type": "object", "additionalProperties": _POS_INT},
        "qualitative_holds": {"type": "boolean"},
    },
}

STRUCTURAL_AUDIT = {
    "type": "object",
    "required": ["N", "N_formula", "checks", "max_weight", "locality_bound", "k_rank", "k_formula", "assertions"],
    "properties": {
        "N": _POS_INT,
        "checks": _NONNEG_INT,
        "max_weight": _NONNEG_INT,
        "k_rank": _NONNEG_INT,
        "k_formula": _NONNEG_INT,
        "localized_Z": {"type": "object"},
        "localized_X": {"type": "object"},
        "assertions": {"type": "object", "additionalProperties": {"type": "boolean"}},
    },
}

_CELL_MASSES = {"type": "object", "additionalProperties": _UNIT}

WARMUP_REPORT = {
    "type": "object",
    "required": ["N", "k", "mu", "masses", "certified", "basis", "mass0", "mass1", "D", "assertions"],
    "properties": {
        "basis": {"enum": ["X", "Z"]},
        "masses": {"type": "object", "required": ["Z", "X"], "additionalProperties": _CELL_MASSES},
        "certified": {"type": "boolean"},
        "mass0": _NUM,
        "mass1": _NUM,
        "assertions": {"type": "object", "additionalProperties": {"type": "boolean"}},
    },
}

_NLETS_RUN = {
    "type": "object",
    "required": ["seed", "error_weight", "N", "N_child", "residual", "uniform_error", "sweep", "c0", "falsifications"],
    "properties": {
        "seed": {"type": "integer"},
        "error_weight": _NONNEG_INT,
        "residual": {
            "type": "object",
            "required": ["vertex_fraction", "edge_fraction", "vertex_bound"],
            "properties": {"vertex_fraction": _UNIT, "edge_fraction": _UNIT},
        },
        "uniform_error": {"type": "object", "required": ["tv", "te", "nu", "in_family"]},
        "sweep": {"type": "object", "required": ["disjoint"]},
        "falsifications": {"type": "array", "items": {"type": "string"}},
        "basis": {"enum": ["X", "Z"]},
        "mu": {"type": "number", "minimum": 0, "maximum": 0.5},
        "D": {"type": ["integer", "null"]},
        "depth_bound": _NUM,
        "gamma_depth_bounds": {
            "type": "array",
            "items": {"type": "object", "required": ["gamma", "B_min", "depth_lb"]},
        },
    },
}

NLETS_REPORT = {
    "type": "object",
    "required": ["config", "graph", "runs", "falsifications", "all_distance_positive"],
    "properties": {
        "config": EXPERIMENT_CONFIG,
        "graph": {
            "type": "object",
            "required": ["n", "m", "edges"],
            "properties": {"edges": {"type": "array", "items": _EDGE}},
        },
        "runs": {"type": "array", "items": _NLETS_RUN},
        "falsifications": _NONNEG_INT,
        "all_distance_positive": {"type": "boolean"},
    },
}

EXPANSION_REPORT = {
    "type": "object",
    "required": ["trials", "n", "depth", "gammas", "violations", "tested", "degenerate", "reports"],
    "properties": {
        "violations": _NONNEG_INT,
        "tested": _NONNEG_INT,
        "degenerate": _NONNEG_INT,
        "reports": {"type": "array", "items": {"type": "object", "required": ["seed", "blow_up", "checks"]}},
    },
}

SCHEMAS = {
    "graph_spec": GRAPH_SPEC,
    "experiment_config": EXPERIMENT_CONFIG,
    "state_spec": STATE_SPEC,
    "circuit": CIRCUIT,
    "soundness_report": SOUNDNESS_REPORT,
    "build_report": BUILD_REPORT,
    "localized_report": _LOCALIZED,
    "structural_audit": STRUCTURAL_AUDIT,
    "warmup_report": WARMUP_REPORT,
    "nlets_report": NLETS_REPORT,
    "expansion_report": EXPANSION_REPORT,
}


def validate(name: str, obj) -> None:
    """Raise :class:`SchemaError` when ``obj`` does not match schema ``name``."""
    schema = SCHEMAS[name]
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{name}: {where}: {exc.message}") from None
