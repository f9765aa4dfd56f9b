from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgpnlets.css import PartitionSets, logical_basis, steane_code
from hgpnlets.gf2 import BitVector
from hgpnlets.graphs import complete_graph, cycle_graph, path_graph
from hgpnlets.hgp import column_pair, fractal_subcode, hypergraph_product, localized_distance_check
from hgpnlets.io import to_jsonable
from hgpnlets.pipeline import (
    ExperimentConfig,
    NletsRunner,
    build_graph,
    cell_distance,
    low_error_lines,
    restriction_consistent,
    run_expansion_trials,
    run_nlets,
    run_structural_audit,
    run_warmup,
    sample_error,
)
from hgpnlets.schemas import SchemaError, validate
from hgpnlets.states import C0, MU, LogicalStateSpec, PauliError, xbasis_masses, zbasis_masses

S2 = 1 / math.sqrt(2)


class TestConfig:
    def test_defaults_normalize(self):
        cfg = ExperimentConfig(alpha=3, beta=4)
        assert cfg.alpha == pytest.approx(0.6) and cfg.beta == pytest.approx(0.8)

    @pytest.mark.parametrize("kw", [{"epsilon": 1.0}, {"epsilon": -0.1}, {"nu": 1.5}, {"runs": 0}, {"family_cap": 0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)

    def test_round_trip(self, tmp_path):
        cfg = ExperimentConfig(graph={"kind": "complete", "n": 4}, alpha=complex(0.6, 0.0), beta=complex(0, 0.8), runs=3)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.from_json(path) == cfg

    def test_schema_rejects_unknown_keys(self):
        with pytest.raises(SchemaError):
            ExperimentConfig.from_dict({"epsilonn": 0.1})


class TestBuildGraph:
    def test_kinds(self, tmp_path):
        assert build_graph({"kind": "cycle", "n": 5}) == cycle_graph(5)
        assert build_graph({"kind": "complete", "n": 4}) == complete_graph(4)
        g = build_graph({"kind": "random_regular", "n": 10, "d": 3, "seed": 2})
        assert g.regular_degree() == 3
        assert build_graph({"kind": "edges", "n": 3, "edges": [[0, 1], [1, 2]]}) == path_graph(3)
        (tmp_path / "g.edges").write_text("3 2\n0 1\n1 2\n")
        assert build_graph({"kind": "file", "path": str(tmp_path / "g.edges")}) == path_graph(3)

    def test_unknown(self):
        with pytest.raises(ValueError):
            build_graph({"kind": "torus", "n": 3})


class TestStructuralAudit:
    def test_c3(self):
        r = run_structural_audit(cycle_graph(3))
        assert (r["N"], r["checks"], r["max_weight"], r["k"], r["distance"]) == (18, 18, 4, 2, 3)
        assert all(r["assertions"].values())
        assert r["localized_Z"]["qualitative_holds"] and r["localized_X"]["qualitative_holds"]
        assert r["reference"] == {"degree": 14, "max_weight": 16}
        validate("structural_audit", to_jsonable(r))

    def test_k4(self):
        r = run_structural_audit(complete_graph(4))
        assert (r["N"], r["max_weight"], r["k"]) == (52, 5, 10)
        assert r["distance"] is None and "distance_skipped" in r
        assert r["soundness"]["rho_exhaustive"] == pytest.approx(4 / 3)
        assert r["localized_Z"]["mode"] == "stabilizer"
        assert all(r["assertions"].values())

    def test_tree(self):
        r = run_structural_audit(path_graph(4))
        assert r["k"] == 1 and r["spanning_set"]["dim_ct"] == 0
        assert r["distance"] == 4 == r["distance_formula"]

    def test_distance_skipped_when_large(self):
        r = run_structural_audit(cycle_graph(6), distance_dim_cap=26)
        assert r["distance"] in (None, 6)


class TestWarmup:
    def test_steane_plus(self):
        r = run_warmup(steane_code(), S2, S2)
        assert r["certified"] and r["basis"] == "Z"
        assert min(r["mass0"], r["mass1"]) >= MU
        assert r["D"] == 3
        assert r["depth_bound"] == pytest.approx((2 / 3) * math.log2(MU * 3 / (4 * math.sqrt(7))))
        assert r["depth_bound_budget"] == pytest.approx((2 / 3) * math.log2((MU - 0.14) * 3 / (4 * math.sqrt(7))))
        assert all(r["assertions"].values())

    def test_steane_zero(self):
        r = run_warmup(steane_code(), 1, 0)
        assert r["basis"] == "X" and (r["mass0"], r["mass1"]) == pytest.approx((0.5, 0.5))

    def test_toric(self, c3):
        r = run_warmup(c3.code, 1, 0)
        assert r["D"] == 3 and r["certified"]
        validate("warmup_report", to_jsonable(r))

    def test_mu_constant(self):
        assert MU == pytest.approx(0.1464466094, abs=1e-10)

    def test_cell_distance_matches_brute_force(self, steane):
        lb = logical_basis(steane)
        sets = PartitionSets(steane, lb, 0)
        from oracles import all_words

        for basis in ("Z", "X"):
            best = min(int(w.sum()) for w in all_words(7) if sets.classify(BitVector.from_bits(w), basis) == 1)
            assert cell_distance(steane, sets, basis) == best == 3


class TestErrorSampling:
    @given(eps=st.floats(0, 0.5), seed=st.integers(0, 10**6))
    def test_exact_size(self, eps, seed):
        err = sample_error(52, eps, np.random.default_rng(seed))
        assert len(err.support()) == math.floor(eps * 52 + 1e-12)

    def test_pauli_types_uniform(self):
        err = sample_error(10_000, 0.5, np.random.default_rng(1))
        ex, ez = err.ex.to_bits().astype(bool), err.ez.to_bits().astype(bool)
        counts = np.array([(ex & ~ez).sum(), (ez & ~ex).sum(), (ex & ez).sum()])
        assert counts.sum() == 5000
        assert np.all(np.abs(counts - 5000 / 3) < 150)

    def test_low_error_lines(self, k4):
        # two errors in column V x 0 : 2 of 4 qubits lost, keep threshold 1 - 3 sqrt(eps)
        support = np.array([k4.index.vv(0, 0), k4.index.vv(1, 0)])
        v_l, e_l = low_error_lines(k4, support, 0.01)
        assert v_l == [1, 2, 3] and e_l == list(range(6))
        v_l, _ = low_error_lines(k4, support, 0.0)
        assert v_l == [2, 3]

    def test_restriction_consistency_full(self, k4):
        assert restriction_consistent(k4, fractal_subcode(k4, range(4), range(6)))


class TestNlets:
    def test_no_error(self, c3):
        rep = run_nlets(ExperimentConfig(epsilon=0.0, alpha=0.6, beta=0.8))
        run = rep["runs"][0]
        assert run["error_weight"] == 0
        assert run["residual"]["vertex_fraction"] == 1.0 == run["residual"]["edge_fraction"]
        lb = column_pair(c3, 0)
        s = LogicalStateSpec(c3.code, lb, 0, 0.6, 0.8)
        zero = PauliError.zero(18)
        assert run["masses"]["Z"]["S0"] == pytest.approx(zbasis_masses(s, zero).cell0)
        assert run["masses"]["X"]["S0"] == pytest.approx(xbasis_masses(s, zero).cell0)
        assert run["D"] == localized_distance_check(c3, "X").distance_lower_bound(0, 0)
        assert rep["falsifications"] == 0

    def test_c3_single_flip(self):
        rep = run_nlets(ExperimentConfig(epsilon=0.06, runs=5, seed=3))
        for run in rep["runs"]:
            assert run["error_weight"] == 1
            for key in ("residual", "uniform_error", "basis", "mass0", "mass1", "D"):
                assert key in run
            assert min(run["mass0"], run["mass1"]) >= C0
        assert rep["falsifications"] == 0
        validate("nlets_report", to_jsonable(rep))

    def test_k4_seeds(self):
        rep = run_nlets(ExperimentConfig(graph={"kind": "complete", "n": 4}, epsilon=0.02, runs=10))
        assert rep["falsifications"] == 0
        assert rep["all_distance_positive"]

    def test_depth_bound_recomputable(self):
        rep = run_nlets(ExperimentConfig(graph={"kind": "complete", "n": 4}, epsilon=0.02, runs=3))
        for run in rep["runs"]:
            expect = (2 / 3) * math.log2(run["mu"] * run["D"] / (4 * math.sqrt(run["n_bits"])))
            assert run["depth_bound"] == pytest.approx(expect, rel=1e-12)

    def test_reproducible(self):
        cfg = ExperimentConfig(graph={"kind": "complete", "n": 4}, epsilon=0.02, runs=3, seed=7)
        a = json.dumps(to_jsonable(run_nlets(cfg)), sort_keys=True)
        b = json.dumps(to_jsonable(run_nlets(cfg)), sort_keys=True)
        assert a == b

    def test_out_of_regime_is_not_falsification(self):
        rep = run_nlets(ExperimentConfig(epsilon=0.12, runs=20))
        out = [r for r in rep["runs"] if not r["distance_positive"]]
        assert out
        for r in out:
            assert r["sweep"]["disjoint"] is None
            assert "depth_bound" not in r
        assert rep["falsifications"] == 0

    def test_nu_cap_flags_outside_family(self):
        runner = NletsRunner(ExperimentConfig(graph={"kind": "complete", "n": 4}, epsilon=0.1, nu=0.0))
        run = runner.run(0)
        if run["error_weight"] and not run["uniform_error"]["in_family"]:
            assert "planted error outside declared family" in run["falsifications"]
        assert run["uniform_error"]["tv"] == 0 and run["uniform_error"]["te"] == 0

    def test_asymptotic_constants_recorded(self):
        run = run_nlets(ExperimentConfig())["runs"][0]
        assert run["asymptotic_constants"] == {"epsilon": 1e-9, "degree": 14}
        assert run["c0"] == pytest.approx(0.0732233, abs=1e-7)


def test_expansion_trials():
    rep = run_expansion_trials(3, 6, 2, seed=5)
    assert rep["violations"] == 0
    json.dumps(to_jsonable(rep))
    validate("expansion_report", to_jsonable(rep))
