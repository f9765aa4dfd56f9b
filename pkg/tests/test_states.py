from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hgpnlets.css import PartitionSets, logical_basis
from hgpnlets.errors import AmbiguousCellError, CapacityExceededError, UnresolvedError
from hgpnlets.gf2 import BitVector
from hgpnlets.hgp import column_pair, localized_distance_check
from hgpnlets.states import (
    C0,
    INTERVAL_HI,
    INTERVAL_LO,
    MU,
    ErrorFamily,
    LogicalStateSpec,
    PauliError,
    VoronoiSpec,
    _capped_grids,
    choose_witness_basis,
    line_maxima,
    logical_expectations,
    pairing_zero_basis,
    partition_witness,
    random_amplitudes,
    uncertainty_check,
    voronoi_classify,
    xbasis_masses,
    zbasis_masses,
    zbasis_marginal,
)

from oracles import cell_masses_dense, code_state_vector, hadamard_all

S2 = 1 / math.sqrt(2)


@pytest.fixture(scope="module")
def steane_state(steane):
    lb = logical_basis(steane)

    def make(alpha, beta):
        return LogicalStateSpec(steane, lb, 0, complex(alpha), complex(beta))

    return make


@pytest.fixture(scope="module")
def c3_state(c3):
    lb = column_pair(c3, 0)

    def make(alpha, beta):
        return LogicalStateSpec(c3.code, lb, 0, complex(alpha), complex(beta))

    return make


def oracle_masses(s: LogicalStateSpec, err: PauliError):
    c = s.code
    psi = code_state_vector(
        c.hx.to_dense(), c.N, s.bx.to_bits(), s.alpha, s.beta, s.r0.to_bits(), err.ex.to_bits(), err.ez.to_bits()
    )
    pz = np.abs(psi) ** 2
    px = np.abs(hadamard_all(psi, c.N)) ** 2
    z = cell_masses_dense(pz, c.N, c.hz.to_dense(), s.bz.to_bits())
    x = cell_masses_dense(px, c.N, c.hx.to_dense(), s.bx.to_bits())
    return z, x


def as_tuple(m):
    return (m.cell0, m.cell1, m.elsewhere)


class TestSpec:
    def test_norm(self, steane):
        with pytest.raises(ValueError):
            LogicalStateSpec(steane, logical_basis(steane), 0, 1.0, 0.5)

    def test_bad_r0(self, steane):
        lb = logical_basis(steane)
        with pytest.raises(ValueError):
            LogicalStateSpec(steane, lb, 0, 1.0, 0.0, r0=lb.bx[0])

    def test_r1(self, steane_state):
        s = steane_state(1, 0)
        assert s.r1 == s.r0 + s.bx

    def test_pauli_error(self):
        e = PauliError.from_supports(10, [1, 2], [2, 5])
        assert list(e.support()) == [1, 2, 5]
        assert e.epsilon == pytest.approx(0.3)
        assert e.part("Z") == e.ex and e.part("X") == e.ez
        assert e.restrict([2, 5]).ez.weight() == 2


class TestMasses:
    def test_pure_zero(self, steane_state):
        m = zbasis_masses(steane_state(1, 0), PauliError.zero(7))
        assert as_tuple(m) == (1.0, 0.0, 0.0)

    def test_weights(self, steane_state):
        m = zbasis_masses(steane_state(math.sqrt(0.3), math.sqrt(0.7)), PauliError.zero(7))
        assert m.cell0 == pytest.approx(0.3) and m.cell1 == pytest.approx(0.7)

    @pytest.mark.parametrize(
        "alpha,beta,expect",
        [(1, 0, (0.5, 0.5)), (S2, S2, (1.0, 0.0)), (S2, -S2, (0.0, 1.0))],
    )
    def test_xbasis_examples(self, steane_state, alpha, beta, expect):
        m = xbasis_masses(steane_state(alpha, beta), PauliError.zero(7))
        assert (m.cell0, m.cell1) == pytest.approx(expect, abs=1e-12)

    def test_single_flip_moves_mass_out(self, c3_state):
        s = c3_state(1, 0)
        err = PauliError.from_supports(18, [0], [])
        m = zbasis_masses(s, err)
        assert m.elsewhere == pytest.approx(1.0)
        planted = zbasis_masses(s, err, planted=True)
        assert planted.cell0 == pytest.approx(1.0)
        assert planted.as_dict().keys() == {"S0", "S1", "elsewhere"}

    def test_flip_by_logical_swaps_cells(self, c3_state):
        s = c3_state(math.sqrt(0.2), math.sqrt(0.8))
        err = PauliError(s.bx, BitVector.zeros(18))
        m = zbasis_masses(s, err)
        assert (m.cell0, m.cell1) == pytest.approx((0.8, 0.2))

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_statevector_steane(self, steane_state, seed):
        rng = np.random.default_rng(seed)
        s = steane_state(*random_amplitudes(rng))
        err = PauliError(BitVector.from_bits(rng.random(7) < 0.2), BitVector.from_bits(rng.random(7) < 0.2))
        z, x = oracle_masses(s, err)
        assert as_tuple(zbasis_masses(s, err)) == pytest.approx(z, abs=1e-12)
        assert as_tuple(xbasis_masses(s, err)) == pytest.approx(x, abs=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_statevector_c3(self, c3_state, seed):
        rng = np.random.default_rng(100 + seed)
        s = c3_state(*random_amplitudes(rng))
        # errors built from logicals and stabilizers keep mass classifiable
        ex = s.bx if seed % 2 else BitVector.zeros(18)
        ez = s.bz if seed // 2 else BitVector.zeros(18)
        ex = ex + s.code.sx_basis.row(seed)
        err = PauliError(ex, ez)
        z, x = oracle_masses(s, err)
        assert as_tuple(zbasis_masses(s, err)) == pytest.approx(z, abs=1e-12)
        assert as_tuple(xbasis_masses(s, err)) == pytest.approx(x, abs=1e-12)

    def test_planted_matches_statevector(self, c3_state, rng):
        s = c3_state(*random_amplitudes(rng))
        err = PauliError.from_supports(18, [0, 10], [4])
        clean_z, clean_x = oracle_masses(s, PauliError.zero(18))
        assert as_tuple(zbasis_masses(s, err, planted=True)) == pytest.approx(clean_z, abs=1e-12)
        assert as_tuple(xbasis_masses(s, err, planted=True)) == pytest.approx(clean_x, abs=1e-12)

    @given(
        theta=st.floats(0, 2 * math.pi),
        phi=st.floats(0, 2 * math.pi),
        xs=st.lists(st.integers(0, 17), max_size=4),
        zs=st.lists(st.integers(0, 17), max_size=4),
    )
    def test_masses_sum_to_one_and_commute(self, c3_state, theta, phi, xs, zs):
        s = c3_state(math.cos(theta), math.sin(theta) * complex(math.cos(phi), math.sin(phi)))
        err = PauliError.from_supports(18, xs, zs)
        for basis_fn in (zbasis_masses, xbasis_masses):
            m = basis_fn(s, err)
            assert m.total() == pytest.approx(1.0, abs=1e-12)
            assert min(m.cell0, m.cell1, m.elsewhere) >= 0
        only_x = PauliError(err.ex, BitVector.zeros(18))
        only_z = PauliError(BitVector.zeros(18), err.ez)
        assert as_tuple(zbasis_masses(s, err)) == as_tuple(zbasis_masses(s, only_x))
        assert as_tuple(xbasis_masses(s, err)) == as_tuple(xbasis_masses(s, only_z))


class TestExpectations:
    def test_examples(self, steane_state):
        assert logical_expectations(steane_state(1, 0)) == pytest.approx((1, 0))
        assert logical_expectations(steane_state(S2, S2)) == pytest.approx((0, 1))

    def test_real_amplitudes_saturate(self, steane_state):
        for theta in np.linspace(0, 2 * math.pi, 64):
            z, x = logical_expectations(steane_state(math.cos(theta), math.sin(theta)))
            assert z**2 + x**2 == pytest.approx(1.0, abs=1e-12)

    def test_match_masses(self, steane_state, rng):
        for _ in range(20):
            s = steane_state(*random_amplitudes(rng))
            err = PauliError(BitVector.from_bits(rng.random(7) < 0.3), BitVector.from_bits(rng.random(7) < 0.3))
            z, x = logical_expectations(s, err)
            zm, xm = oracle_masses(s, PauliError.zero(7))
            sz = -1 if err.ex.dot(s.bz) else 1
            sx = -1 if err.ez.dot(s.bx) else 1
            assert z == pytest.approx(sz * (zm[0] - zm[1]), abs=1e-12)
            assert x == pytest.approx(sx * (xm[0] - xm[1]), abs=1e-12)
            assert z**2 + x**2 <= 1 + 1e-12


class TestUncertainty:
    def test_interval(self):
        assert INTERVAL_LO == pytest.approx(0.1464466, abs=1e-7)
        assert INTERVAL_HI == pytest.approx(0.8535534, abs=1e-7)
        assert MU == INTERVAL_LO

    def test_examples(self, steane_state):
        r = uncertainty_check(steane_state(1, 0))
        assert r.holds and r.x_masses == pytest.approx((0.5, 0.5))
        r = uncertainty_check(steane_state(S2, S2))
        assert r.holds and r.z_masses == pytest.approx((0.5, 0.5))

    def test_sweep(self, steane_state):
        rng = np.random.default_rng(7)
        worst = np.inf
        for _ in range(1000):
            r = uncertainty_check(steane_state(*random_amplitudes(rng)))
            assert r.holds
            worst = min(worst, max(r.z_margin, r.x_margin))
        assert worst >= -1e-12

    def test_tight_state(self, steane_state):
        # cos^2(pi/8) = INTERVAL_HI puts both bases exactly on the interval boundary
        r = uncertainty_check(steane_state(math.cos(math.pi / 8), math.sin(math.pi / 8)))
        assert r.z_margin == pytest.approx(0, abs=1e-12)
        assert r.x_margin == pytest.approx(0, abs=1e-12)

    def test_rejects_errors(self, steane_state):
        with pytest.raises(ValueError):
            uncertainty_check(steane_state(1, 0), PauliError.from_supports(7, [0], []))


class TestFamilies:
    def test_capped_grid_counts(self):
        assert len(_capped_grids(3, 3, 1, 10**6)) == 34
        assert len(_capped_grids(4, 4, 1, 10**6)) == 209
        assert len(_capped_grids(3, 3, 3, 10**6)) == 512

    def test_capped_grid_brute_force(self):
        from oracles import all_words

        words = all_words(9).reshape(-1, 3, 3)
        ok = words[(words.sum(1).max(1) <= 2) & (words.sum(2).max(1) <= 2)]
        got = _capped_grids(3, 3, 2, 10**6)
        assert {w.tobytes() for w in got} == {w.tobytes() for w in ok}

    def test_cap(self):
        with pytest.raises(CapacityExceededError):
            _capped_grids(4, 4, 2, 100)

    def test_lines_family(self):
        f = ErrorFamily("lines", 18, n=3, m=3, tv=1, te=1)
        words = f.enumerate()
        assert len(words) == 34 * 34
        for row in words[::97]:
            assert f.contains(BitVector.from_bits(row))

    def test_ball_family(self):
        f = ErrorFamily("ball", 10, radius=2)
        assert len(f.enumerate()) == 1 + 10 + 45
        with pytest.raises(CapacityExceededError):
            f.enumerate(cap=20)

    def test_line_maxima(self):
        e = BitVector.from_indices(18, [0, 1, 3, 9 + 4])
        assert line_maxima(e, 3, 3) == (2, 1)


@pytest.fixture(scope="module")
def c3_sets(c3):
    return PartitionSets(c3.code, column_pair(c3, 0), 0)


class TestVoronoi:
    def test_exact_member(self, c3_sets):
        spec = VoronoiSpec(c3_sets, "Z", ErrorFamily("lines", 18, n=3, m=3, tv=1, te=0))
        assert voronoi_classify(BitVector.zeros(18), spec) == 0
        assert voronoi_classify(c3_sets.bx, spec) == 1

    def test_planted(self, c3_sets):
        spec = VoronoiSpec(c3_sets, "Z", ErrorFamily("lines", 18, n=3, m=3, tv=1, te=0))
        err = PauliError.from_supports(18, [0, 4], [])
        assert voronoi_classify(c3_sets.bx + err.ex, spec, planted=err) == 1
        assert voronoi_classify(c3_sets.bx + err.ex, spec) == 1
        with pytest.raises(ValueError):
            voronoi_classify(BitVector.zeros(18), spec, planted=PauliError.from_supports(18, [0, 1], []))

    def test_ambiguous_raises(self, c3_sets):
        spec = VoronoiSpec(c3_sets, "Z", ErrorFamily("ball", 18, radius=2))
        assert not spec.ambiguity_sweep()["disjoint"]
        synd, parity = spec.table()
        _, inv = np.unique(synd, axis=0, return_inverse=True)
        inv = inv.ravel()
        words = spec.family.enumerate()
        for g in np.unique(inv):
            if len(set(parity[inv == g])) == 2:
                x = BitVector.from_bits(words[np.nonzero(inv == g)[0][0]])
                with pytest.raises(AmbiguousCellError):
                    voronoi_classify(x, spec)
                break

    def test_unresolved(self, c3_sets):
        spec = VoronoiSpec(c3_sets, "Z", ErrorFamily("ball", 18, radius=0))
        with pytest.raises(UnresolvedError):
            voronoi_classify(BitVector.from_indices(18, [0]), spec)

    def test_bad_mode(self, c3_sets):
        with pytest.raises(ValueError):
            VoronoiSpec(c3_sets, "Z", ErrorFamily("ball", 18), mode="bogus")

    @pytest.mark.parametrize("basis", ["Z", "X"])
    @pytest.mark.parametrize("mode", ["full", "stabilizer"])
    def test_sweep_agrees_with_distance_bound(self, c3, c3_sets, basis, mode):
        """Positive localized distance bound implies disjoint fattened cells."""
        audit = localized_distance_check(c3, "X" if basis == "Z" else "Z", mode=mode)
        for tv in range(3):
            for te in range(3):
                sweep = VoronoiSpec(
                    c3_sets, basis, ErrorFamily("lines", 18, n=3, m=3, tv=tv, te=te), mode=mode
                ).ambiguity_sweep()
                if audit.distance_lower_bound(tv, te) > 0:
                    assert sweep["disjoint"], (tv, te)

    def test_c3_small_family_disjoint(self, c3_sets):
        for basis in ("Z", "X"):
            for fam in (
                ErrorFamily("lines", 18, n=3, m=3, tv=1, te=0),
                ErrorFamily("lines", 18, n=3, m=3, tv=0, te=1),
                ErrorFamily("ball", 18, radius=1),
            ):
                assert VoronoiSpec(c3_sets, basis, fam).ambiguity_sweep()["disjoint"]

    def test_brute_force_sweep(self, c3, c3_sets):
        """Every x in S_z^perp + E checked directly against the syndrome table."""
        from hgpnlets.gf2 import unpack
        from hgpnlets.hgp import enumerate_coset

        fam = ErrorFamily("lines", 18, n=3, m=3, tv=1, te=1)
        spec = VoronoiSpec(c3_sets, "Z", fam)
        errs = fam.enumerate()
        perp = [c3.code.sz_perp[i] for i in range(len(c3.code.sz_perp))]
        rng = np.random.default_rng(3)
        both = 0
        for _ in range(200):
            coeff = rng.integers(0, 2, len(perp))
            c = BitVector.zeros(18)
            for v, b in zip(perp, coeff):
                if b:
                    c = c + v
            x = c + BitVector.from_bits(errs[rng.integers(len(errs))])
            labels = set()
            for e in errs:
                y = x + BitVector.from_bits(e)
                got = c3_sets.classify(y, "Z")
                if got is not None:
                    labels.add(got)
            assert labels == spec.cells_of(x)
            both += len(labels) == 2
        assert both > 0


def test_pairing_zero_basis(k4):
    lb = column_pair(k4, 0)
    vecs = k4.code.sx_perp
    out = pairing_zero_basis(vecs, lb.bx[0])
    assert len(out) == len(vecs) - 1
    assert all(v.dot(lb.bx[0]) == 0 for v in out)


class TestWitness:
    def test_c0(self):
        assert C0 == pytest.approx(0.0732233, abs=1e-7)
        assert C0 > 0.07

    def test_plus_state_uses_z(self, steane_state):
        w = partition_witness(steane_state(S2, S2), PauliError.zero(7))
        assert w.basis == "Z"
        assert (w.mass0, w.mass1) == pytest.approx((0.5, 0.5))

    def test_zero_state_uses_x(self, steane_state):
        w = partition_witness(steane_state(1, 0), PauliError.zero(7))
        assert w.basis == "X"
        assert (w.mass0, w.mass1) == pytest.approx((0.5, 0.5))
        assert w.both_above()

    def test_tie_goes_to_z(self, steane_state):
        s = steane_state(math.cos(math.pi / 8), math.sin(math.pi / 8))
        z = zbasis_masses(s, PauliError.zero(7))
        x = xbasis_masses(s, PauliError.zero(7))
        assert choose_witness_basis(z, x).basis == "Z"

    def test_sweep_always_certifies(self, c3_state, c3):
        audits = {"Z": localized_distance_check(c3, "X"), "X": localized_distance_check(c3, "Z")}
        rng = np.random.default_rng(11)
        for _ in range(200):
            s = c3_state(*random_amplitudes(rng))
            err = PauliError.from_supports(18, rng.choice(18, 2, replace=False), rng.choice(18, 1))
            w = partition_witness(s, err, audits, caps=(0, 0))
            assert min(w.mass0, w.mass1) >= MU - 1e-12
            assert w.min_distance_lb == 1


class TestMarginal:
    def test_impostor_marginal(self, c3_state, rng):
        s = c3_state(*random_amplitudes(rng))
        subset = list(range(9))
        err = PauliError.from_supports(18, [9, 12, 17], [10])
        assert zbasis_marginal(s, err, subset) == pytest.approx(zbasis_marginal(s, PauliError.zero(18), subset))

    def test_marginal_moves_inside(self, c3_state):
        s = c3_state(1, 0)
        a = zbasis_marginal(s, PauliError.zero(18), [0])
        b = zbasis_marginal(s, PauliError.from_supports(18, [0], []), [0])
        swapped = {("1" if k == "0" else "0"): v for k, v in b.items()}
        assert a == pytest.approx(swapped)

    def test_marginal_sums(self, c3_state, rng):
        s = c3_state(*random_amplitudes(rng))
        m = zbasis_marginal(s, PauliError.zero(18), [0, 5, 13])
        assert sum(m.values()) == pytest.approx(1.0)


def test_random_amplitudes(rng):
    for real in (False, True):
        a, b = random_amplitudes(rng, real=real)
        assert abs(a) ** 2 + abs(b) ** 2 == pytest.approx(1.0)
        if real:
            assert a.imag == b.imag == 0
