"""Exact measurement statistics of one-logical-qubit CSS code states.

A state is ``alpha |0_L> + beta |1_L>`` where ``|0_L>`` is uniform over
``r0 + S_x`` and ``|1_L> = X^{bx} |0_L>``.  Everything is computed from coset
structure, so no state vector is ever built.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from hgpnlets.css import CssCode, LogicalBasis, PartitionSets
from hgpnlets.errors import (
    AmbiguousCellError,
    CapacityExceededError,
    UnclassifiableSetError,
    UnresolvedError,
)
from hgpnlets.gf2 import BitMatrix, BitVector, coset_words, pack, popcount

Basis = Literal["X", "Z"]
INTERVAL_LO = 0.5 - 1 / (2 * math.sqrt(2))
INTERVAL_HI = 0.5 + 1 / (2 * math.sqrt(2))
MU = INTERVAL_LO
C0 = 0.5 * MU
FAMILY_CAP = 2**22
MASS_TOL = 1e-12


@dataclass(frozen=True)
class PauliError:
    ex: BitVector
    ez: BitVector

    @classmethod
    def zero(cls, n: int) -> PauliError:
        return cls(BitVector.zeros(n), BitVector.zeros(n))

    @classmethod
    def from_supports(cls, n: int, x_support, z_support) -> PauliError:
        return cls(BitVector.from_indices(n, x_support), BitVector.from_indices(n, z_support))

    @property
    def n(self) -> int:
        return self.ex.length

    def support(self) -> np.ndarray:
        return (self.ex | self.ez).support()

    @property
    def epsilon(self) -> float:
        return len(self.support()) / self.n

    def is_zero(self) -> bool:
        return self.ex.is_zero() and self.ez.is_zero()

    def part(self, basis: Basis) -> BitVector:
        """The component that moves measurement outcomes in ``basis``."""
        return self.ex if basis == "Z" else self.ez

    def restrict(self, indices) -> PauliError:
        return PauliError(self.ex.restrict(indices), self.ez.restrict(indices))


@dataclass(frozen=True)
class LogicalStateSpec:
    code: CssCode
    basis: LogicalBasis
    i: int
    alpha: complex
    beta: complex
    r0: BitVector | None = None

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > MASS_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm} != 1")
        r0 = self.r0 if self.r0 is not None else BitVector.zeros(self.code.N)
        if not self.code.in_sz_perp(r0) or r0.dot(self.bz):
            raise ValueError("r0 must lie in S_z^perp with zero pairing against bz")
        object.__setattr__(self, "r0", r0)

    @property
    def bx(self) -> BitVector:
        return self.basis.bx[self.i]

    @property
    def bz(self) -> BitVector:
        return self.basis.bz[self.i]

    @property
    def r1(self) -> BitVector:
        return self.r0 + self.bx

    def z_weights(self) -> tuple[float, float]:
        return abs(self.alpha) ** 2, abs(self.beta) ** 2

    def x_weights(self) -> tuple[float, float]:
        return abs(self.alpha + self.beta) ** 2 / 2, abs(self.alpha - self.beta) ** 2 / 2


@dataclass(frozen=True)
class BasisMasses:
    basis: str
    cell0: float
    cell1: float
    elsewhere: float
    labels: tuple[str, str] = ("C0", "C1")

    def as_dict(self) -> dict:
        return {self.labels[0]: self.cell0, self.labels[1]: self.cell1, "elsewhere": self.elsewhere}

    def total(self) -> float:
        return self.cell0 + self.cell1 + self.elsewhere


def _components(s: LogicalStateSpec, err: PauliError, basis: Basis) -> list[tuple[BitVector, float, int]]:
    """(offset, mass, cell) pieces of the measured distribution.

    Z basis: offset + S_x; X basis: offset + (half of S_x^perp with the
    given pairing against bx).
    """
    if basis == "Z":
        wa, wb = s.z_weights()
        return [(s.r0 + err.ex, wa, 0), (s.r1 + err.ex, wb, 1)]
    wa, wb = s.x_weights()
    return [(err.ez, wa, 0), (err.ez, wb, 1)]


@dataclass
class ErrorFamily:
    """Error family used to fatten the partition cells.

    ``kind='ball'``: all words of weight <= ``radius``.
    ``kind='lines'``: words whose weight on every V-line is <= ``tv`` and on
    every E-line is <= ``te``, where lines are both the rows and the columns
    of the product layout (the intersection of the column and row families).
    """

    kind: str
    n_qubits: int
    radius: int = 0
    n: int = 0
    m: int = 0
    tv: int = 0
    te: int = 0

    def contains(self, e: BitVector) -> bool:
        if self.kind == "ball":
            return e.weight() <= self.radius
        tv, te = line_maxima(e, self.n, self.m)
        return tv <= self.tv and te <= self.te

    def enumerate(self, cap: int = FAMILY_CAP) -> np.ndarray:
        """All members as 0/1 rows (F, N)."""
        if self.kind == "ball":
            total = sum(math.comb(self.n_qubits, w) for w in range(self.radius + 1))
            if total > cap:
                raise CapacityExceededError(f"ball family of size {total} exceeds {cap}")
            out = np.zeros((total, self.n_qubits), dtype=np.uint8)
            row = 1
            for w in range(1, self.radius + 1):
                for sup in itertools.combinations(range(self.n_qubits), w):
                    out[row, list(sup)] = 1
                    row += 1
            return out
        vblock = _capped_grids(self.n, self.n, self.tv, cap)
        eblock = _capped_grids(self.m, self.m, self.te, cap)
        total = len(vblock) * len(eblock)
        if total > cap:
            raise CapacityExceededError(f"line family of size {total} exceeds {cap}")
        vv = np.repeat(vblock.reshape(len(vblock), -1), len(eblock), axis=0)
        ee = np.tile(eblock.reshape(len(eblock), -1), (len(vblock), 1))
        return np.hstack([vv, ee]).astype(np.uint8)


def _capped_grids(rows: int, cols: int, cap_line: int, cap: int) -> np.ndarray:
    """All 0/1 matrices with at most ``cap_line`` ones in every row and column.

    Built row by row: the frontier holds every valid prefix with its column
    sums, and each candidate row is admitted wherever its columns have room.
    """
    options = np.array(
        [
            [1 if j in c else 0 for j in range(cols)]
            for w in range(min(cap_line, cols) + 1)
            for c in itertools.combinations(range(cols), w)
        ],
        dtype=np.uint8,
    ).reshape(-1, cols)
    grids = np.zeros((1, 0, cols), dtype=np.uint8)
    colsum = np.zeros((1, cols), dtype=np.int64)
    for _ in range(rows):
        new_grids, new_sums = [], []
        for opt in options:
            ok = np.all(colsum + opt[None, :] <= cap_line, axis=1)
            if not ok.any():
                continue
            row = np.broadcast_to(opt, (int(ok.sum()), 1, cols))
            new_grids.append(np.concatenate([grids[ok], row], axis=1))
            new_sums.append(colsum[ok] + opt[None, :])
        grids = np.concatenate(new_grids)
        colsum = np.concatenate(new_sums)
        if len(grids) > cap:
            raise CapacityExceededError(f"line family exceeds {cap}")
    return grids


def line_maxima(e: BitVector, n: int, m: int) -> tuple[int, int]:
    """Largest error count on any V-line and on any E-line (rows and columns)."""
    bits = e.to_bits()
    vblock = bits[: n * n].reshape(n, n).astype(np.int64)
    eblock = bits[n * n :].reshape(m, m).astype(np.int64)
    tv = max(int(vblock.sum(0).max(initial=0)), int(vblock.sum(1).max(initial=0)))
    te = max(int(eblock.sum(0).max(initial=0)), int(eblock.sum(1).max(initial=0)))
    return tv, te


def _classify_offset(sets: PartitionSets, basis: Basis, offset: BitVector) -> int | None:
    return sets.classify(offset, basis)


def basis_masses(
    s: LogicalStateSpec,
    err: PauliError,
    basis: Basis,
    sets: PartitionSets | None = None,
    planted: bool = False,
) -> BasisMasses:
    """Exact cell masses of the errored state measured in ``basis``.

    Without ``planted`` the cells are the exact sets ``C_0, C_1``; each
    distribution piece is a union of cosets of a subspace on which the
    classification is constant, so one representative decides it.  With
    ``planted`` the known error is subtracted first, which realises the
    fattened cells ``C_a + E`` for any family ``E`` containing the error.
    """
    sets = sets or PartitionSets(s.code, s.basis, s.i)
    acc = [0.0, 0.0, 0.0]
    shift = err.part(basis)
    for offset, mass, cell in _components(s, err, basis):
        if basis == "Z":
            rep = offset + shift if planted else offset
            got = _classify_offset(sets, basis, rep)
            acc[2 if got is None else got] += mass
        else:
            # piece lives on ez + {u in S_x^perp : <u, bx> = cell}
            rep_shift = BitVector.zeros(s.code.N) if planted else shift
            if rep_shift.is_zero():
                acc[cell] += mass
            else:
                got = _classify_offset(sets, basis, rep_shift)
                acc[2 if got is None else cell ^ got] += mass
    labels = ("S0", "S1") if planted else ("C0", "C1")
    return BasisMasses(basis, acc[0], acc[1], acc[2], labels)


def zbasis_masses(s: LogicalStateSpec, err: PauliError, sets=None, planted: bool = False) -> BasisMasses:
    return basis_masses(s, err, "Z", sets, planted)


def xbasis_masses(s: LogicalStateSpec, err: PauliError, sets=None, planted: bool = False) -> BasisMasses:
    return basis_masses(s, err, "X", sets, planted)


def logical_expectations(s: LogicalStateSpec, err: PauliError | None = None) -> tuple[float, float]:
    """``<Z^{bz}>`` and ``<X^{bx}>`` of the errored state."""
    err = err or PauliError.zero(s.code.N)
    wa, wb = s.z_weights()
    sz = -1.0 if err.ex.dot(s.bz) else 1.0
    sx = -1.0 if err.ez.dot(s.bx) else 1.0
    expz = sz * (wa - wb)
    expx = sx * 2 * (np.conj(s.alpha) * s.beta).real
    return float(expz), float(expx)


@dataclass(frozen=True)
class UncertaintyResult:
    holds: bool
    z_margin: float
    x_margin: float
    z_masses: tuple[float, float]
    x_masses: tuple[float, float]


def _margin(mass: float) -> float:
    return min(mass - INTERVAL_LO, INTERVAL_HI - mass)


def uncertainty_check(s: LogicalStateSpec, err: PauliError | None = None) -> UncertaintyResult:
    """Some basis puts cell-0 mass inside [1/2 - 1/(2 sqrt 2), 1/2 + 1/(2 sqrt 2)].

    Margins are positive inside the interval and negative outside.
    """
    if err is not None and not err.is_zero():
        raise ValueError("uncertainty check applies to code states only")
    zero = PauliError.zero(s.code.N)
    zm = zbasis_masses(s, zero)
    xm = xbasis_masses(s, zero)
    zmar, xmar = _margin(zm.cell0), _margin(xm.cell0)
    return UncertaintyResult(
        holds=zmar >= -MASS_TOL or xmar >= -MASS_TOL,
        z_margin=zmar,
        x_margin=xmar,
        z_masses=(zm.cell0, zm.cell1),
        x_masses=(xm.cell0, xm.cell1),
    )


def pairing_zero_basis(vectors: list[BitVector], partner: BitVector) -> list[BitVector]:
    """Basis of the subspace of ``span(vectors)`` orthogonal to ``partner``."""
    keep = [v for v in vectors if not v.dot(partner)]
    flips = [v for v in vectors if v.dot(partner)]
    return keep + [f + flips[0] for f in flips[1:]]


class VoronoiSpec:
    """Fattened cells ``S_a = C_a + E`` in one basis.

    Family members are grouped by syndrome, so classifying a string is one
    syndrome lookup.  A string is certified in cell ``a`` when some family
    member moves it into ``C_a``.

    ``mode='full'`` uses the cells of :class:`PartitionSets` (all of
    ``S^perp`` split by the pairing).  ``mode='stabilizer'`` uses only the
    cosets the code state actually occupies: ``a b^x + S_x`` in the Z basis
    and ``a b^z + S_z`` in the X basis.  The checks are then every logical
    of the opposite type that commutes with the chosen pair.
    """

    def __init__(
        self,
        sets: PartitionSets,
        basis: Basis,
        family: ErrorFamily,
        cap: int = FAMILY_CAP,
        mode: str = "full",
    ):
        if mode not in ("full", "stabilizer"):
            raise ValueError(f"mode must be 'full' or 'stabilizer', got {mode!r}")
        self.sets = sets
        self.basis = basis
        self.family = family
        self.cap = cap
        self.mode = mode
        self._checks = None
        self._table = None

    @property
    def check_matrix(self) -> BitMatrix:
        if self._checks is None:
            code = self.sets.code
            if self.mode == "full":
                self._checks = code.hz if self.basis == "Z" else code.hx
            else:
                perp = code.sx_perp if self.basis == "Z" else code.sz_perp
                mover = self.sets.bx if self.basis == "Z" else self.sets.bz
                rows = pairing_zero_basis(perp, mover)
                self._checks = BitMatrix.from_rows(rows) if rows else BitMatrix(0, code.N)
        return self._checks

    @property
    def logical(self) -> BitVector:
        return self.sets.bz if self.basis == "Z" else self.sets.bx

    def _syndromes(self, words: np.ndarray) -> np.ndarray:
        return pack(self.check_matrix.syndromes(words))

    def table(self) -> tuple[np.ndarray, np.ndarray]:
        """(packed syndromes, pairing parities) of every family member; cached."""
        if self._table is None:
            words = pack(self.family.enumerate(self.cap))
            parity = (popcount(words & self.logical.words[None, :]) & 1).astype(np.uint8)
            self._table = (self._syndromes(words), parity)
        return self._table

    def cells_of(self, x: BitVector) -> set[int]:
        synd, parity = self.table()
        key = self._syndromes(x.words[None, :])[0]
        hit = parity[np.all(synd == key[None, :], axis=1)]
        base = x.dot(self.logical)
        return {int(base ^ p) for p in np.unique(hit)}

    def ambiguity_sweep(self) -> dict:
        """Exact search for a string certified in both cells.

        ``x = c + e`` is doubly certified iff some ``e'`` with the syndrome of
        ``e`` has the opposite pairing, so grouping the family by syndrome
        covers every string of ``C_0 + C_1 + E``.
        """
        synd, parity = self.table()
        _, group = np.unique(synd, axis=0, return_inverse=True)
        group = group.ravel()
        ones = np.bincount(group, weights=parity)
        total = np.bincount(group)
        clash = int(np.count_nonzero((ones > 0) & (ones < total)))
        return {
            "mode": self.mode,
            "family_size": int(len(parity)),
            "ambiguous_syndromes": clash,
            "disjoint": clash == 0,
        }


def voronoi_classify(x: BitVector, spec: VoronoiSpec, planted: PauliError | None = None) -> int:
    """Cell label of ``x``; planted errors are subtracted, otherwise brute force."""
    if planted is not None:
        e = planted.part(spec.basis)
        if not spec.family.contains(e):
            raise ValueError("planted error lies outside the declared family")
        got = spec.sets.classify(x + e, spec.basis)
        if got is None:
            raise UnresolvedError("string minus planted error is not in S^perp")
        return got
    try:
        cells = spec.cells_of(x)
    except CapacityExceededError as exc:
        raise UnresolvedError(f"decoder budget exhausted: {exc}") from exc
    if len(cells) == 2:
        raise AmbiguousCellError(f"string {x!r} certified in both cells")
    if not cells:
        raise UnresolvedError("no family member reaches S^perp")
    return cells.pop()


def zbasis_marginal(s: LogicalStateSpec, err: PauliError, subset, cap: int = 2**20) -> dict[str, float]:
    """Exact Z-basis marginal on ``subset`` by enumerating the stabilizer cosets."""
    sx = s.code.sx_basis
    if 2**sx.rows > cap:
        raise UnclassifiableSetError(f"|S_x| = 2^{sx.rows} exceeds cap {cap}")
    basis = [sx.row(i) for i in range(sx.rows)]
    subset = np.asarray(subset, dtype=np.int64)
    out: dict[str, float] = {}
    for offset, mass, _ in _components(s, err, "Z"):
        if mass == 0:
            continue
        words = coset_words(basis, offset)
        bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")[:, : s.code.N][:, subset]
        per = mass / len(words)
        for row in bits:
            key = "".join(map(str, row.tolist()))
            out[key] = out.get(key, 0.0) + per
    return out


@dataclass
class Witness:
    basis: str
    mass0: float
    mass1: float
    min_distance_lb: int | None
    masses: dict = field(default_factory=dict)

    def both_above(self, c0: float = C0) -> bool:
        return self.mass0 >= c0 - MASS_TOL and self.mass1 >= c0 - MASS_TOL


def choose_witness_basis(zm: BasisMasses, xm: BasisMasses) -> BasisMasses:
    """Basis whose smaller cell mass is larger; ties go to Z."""
    return zm if min(zm.cell0, zm.cell1) >= min(xm.cell0, xm.cell1) - MASS_TOL else xm


def partition_witness(
    s: LogicalStateSpec,
    err: PauliError,
    audits: dict | None = None,
    caps: tuple[int, int] | None = None,
) -> Witness:
    """Basis with both fattened-cell masses >= c0, plus a distance bound.

    ``audits`` maps the measurement basis to a localized-distance report
    whose coset is the difference set of the two cells in that basis; with
    ``caps = (tv, te)`` the bound subtracts twice the per-line error caps.
    The planted error is subtracted before classification.
    """
    zm = zbasis_masses(s, err, planted=True)
    xm = xbasis_masses(s, err, planted=True)
    best = choose_witness_basis(zm, xm)
    lb = None
    if audits is not None and caps is not None and best.basis in audits:
        lb = audits[best.basis].distance_lower_bound(*caps)
    w = Witness(
        basis=best.basis,
        mass0=best.cell0,
        mass1=best.cell1,
        min_distance_lb=lb,
        masses={"Z": zm.as_dict(), "X": xm.as_dict()},
    )
    if not w.both_above():
        raise AssertionError(
            f"no basis has both cell masses >= c0: Z={zm.as_dict()} X={xm.as_dict()}"
        )
    return w


def random_amplitudes(rng: np.random.Generator, real: bool = False) -> tuple[complex, complex]:
    if real:
        theta = rng.uniform(0, 2 * math.pi)
        return complex(math.cos(theta)), complex(math.sin(theta))
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return complex(v[0], v[1]), complex(v[2], v[3])
