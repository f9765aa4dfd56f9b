"""CSS codes: validity, parameters, logical bases, energies and partition sets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from hgpnlets.errors import (
    CssViolationError,
    NotLogicalError,
    OutOfRangeError,
    TooLargeError,
    TrivialCodeError,
)
from hgpnlets.gf2 import (
    BitMatrix,
    BitVector,
    extend_to_quotient_basis,
    gram,
    min_weight_in_span,
    nullspace_basis,
    pair_normalize,
    rank,
    rowspan_basis,
    stack_words,
)

Basis = Literal["X", "Z"]
MAX_ENUM_DIM = 26


def _check_basis(basis: str) -> str:
    b = basis.upper()
    if b not in ("X", "Z"):
        raise ValueError(f"basis must be 'X' or 'Z', got {basis!r}")
    return b


def first_violation(hx: BitMatrix, hz: BitMatrix) -> tuple[int, int] | None:
    """First (x_row, z_row) pair in row-major order with odd overlap."""
    prod = (hx.to_sparse() @ hz.to_sparse().T).tocoo()
    odd = (prod.data & 1).astype(bool)
    if not odd.any():
        return None
    pairs = sorted(zip(prod.row[odd].tolist(), prod.col[odd].tolist()))
    return pairs[0]


class CssCode:
    """CSS code with X-checks ``hx`` and Z-checks ``hz`` on ``N`` qubits.

    ``S_x``/``S_z`` are the row spaces; X-type logicals live in
    ``S_z^perp - S_x`` and Z-type logicals in ``S_x^perp - S_z``.
    """

    def __init__(self, hx: BitMatrix, hz: BitMatrix):
        if hx.cols != hz.cols:
            raise ValueError(f"column mismatch: {hx.cols} vs {hz.cols}")
        bad = first_violation(hx, hz)
        if bad is not None:
            raise CssViolationError(*bad)
        self.hx = hx
        self.hz = hz

    @cached_property
    def rank_x(self) -> int:
        return rank(self.hx)

    @cached_property
    def rank_z(self) -> int:
        return rank(self.hz)

    @property
    def N(self) -> int:
        return self.hx.cols

    @property
    def k(self) -> int:
        return self.N - self.rank_x - self.rank_z

    @cached_property
    def sx_basis(self) -> BitMatrix:
        return rowspan_basis(self.hx)

    @cached_property
    def sz_basis(self) -> BitMatrix:
        return rowspan_basis(self.hz)

    @cached_property
    def sx_perp(self) -> list[BitVector]:
        """Basis of ``S_x^perp = ker hx``."""
        return nullspace_basis(self.hx)

    @cached_property
    def sz_perp(self) -> list[BitVector]:
        return nullspace_basis(self.hz)

    def in_sx_perp(self, w: BitVector) -> bool:
        return self.hx.matvec(w).is_zero()

    def in_sz_perp(self, w: BitVector) -> bool:
        return self.hz.matvec(w).is_zero()

    def max_check_weight(self) -> int:
        w = [int(h.row_weights().max()) for h in (self.hx, self.hz) if h.rows]
        return max(w) if w else 0

    def __repr__(self) -> str:
        return f"CssCode(N={self.N}, k={self.k}, mx={self.hx.rows}, mz={self.hz.rows})"


def make_css(hx, hz) -> CssCode:
    if not isinstance(hx, BitMatrix):
        hx = BitMatrix.from_dense(hx)
    if not isinstance(hz, BitMatrix):
        hz = BitMatrix.from_dense(hz)
    return CssCode(hx, hz)


@dataclass(frozen=True)
class LogicalBasis:
    bx: tuple[BitVector, ...]
    bz: tuple[BitVector, ...]

    @property
    def k(self) -> int:
        return len(self.bx)


def logical_basis(c: CssCode) -> LogicalBasis:
    """Dual pair of logical bases with ``<bx_i, bz_j> = delta_ij``.

    Representatives come from elimination and are not canonical.
    """
    if c.k == 0:
        raise TrivialCodeError("code encodes no logical qubits")
    bz = extend_to_quotient_basis(c.hz, c.sx_perp)
    bx = extend_to_quotient_basis(c.hx, c.sz_perp)
    bx, bz = pair_normalize(bx, bz)
    lb = LogicalBasis(tuple(bx), tuple(bz))
    verify_logical_basis(c, lb)
    return lb


def verify_logical_basis(c: CssCode, lb: LogicalBasis) -> None:
    if len(lb.bx) != c.k or len(lb.bz) != c.k:
        raise NotLogicalError("basis size differs from k")
    if not np.array_equal(gram(lb.bx, lb.bz), np.eye(c.k, dtype=np.uint8)):
        raise NotLogicalError("pairing matrix is not the identity")
    for x in lb.bx:
        if not c.in_sz_perp(x):
            raise NotLogicalError("bx vector violates a Z-check")
    for z in lb.bz:
        if not c.in_sx_perp(z):
            raise NotLogicalError("bz vector violates an X-check")


def side_distance(c: CssCode, basis: Basis, lb: LogicalBasis | None = None) -> int:
    """Minimum weight of a nontrivial logical of the given Pauli type.

    ``basis='Z'`` searches ``S_x^perp - S_z``; ``'X'`` searches ``S_z^perp - S_x``.
    """
    basis = _check_basis(basis)
    lb = lb or logical_basis(c)
    if basis == "Z":
        reps, stab, dim = lb.bz, c.sz_basis, c.N - c.rank_x
    else:
        reps, stab, dim = lb.bx, c.sx_basis, c.N - c.rank_z
    if dim > MAX_ENUM_DIM:
        raise TooLargeError(f"dim(S^perp) = {dim} exceeds {MAX_ENUM_DIM}")
    gens = np.vstack([stack_words(list(reps), c.N), stab.data])
    zero = np.zeros(gens.shape[1], dtype=np.uint64)
    return min_weight_in_span(gens, zero, require_mask=(1 << len(reps)) - 1, stop_at=1)


def css_distance_exhaustive(c: CssCode) -> int:
    """Exact code distance, enumerating the smaller side first."""
    dim_z = c.N - c.rank_x
    dim_x = c.N - c.rank_z
    for dim in (dim_z, dim_x):
        if dim > MAX_ENUM_DIM:
            raise TooLargeError(f"dim(S^perp) = {dim} exceeds {MAX_ENUM_DIM}")
    lb = logical_basis(c)
    order = ("Z", "X") if dim_z <= dim_x else ("X", "Z")
    first = side_distance(c, order[0], lb)
    if first == 1:
        return 1
    return min(first, side_distance(c, order[1], lb))


@dataclass(frozen=True)
class EnergyReport:
    violated: int
    checks: int
    total_checks: int
    half_weighted: float
    overall: float


def energy_report(c: CssCode, w: BitVector, basis: Basis) -> EnergyReport:
    """Energy of a computational-basis string.

    A Z-basis string fixes the eigenvalue of every Z-check (parity of ``w`` on
    the check support); X-checks have no definite value and are not counted.
    ``half_weighted`` divides by twice the number of checks in the active
    family; ``overall`` divides by the total number of checks.
    """
    basis = _check_basis(basis)
    if w.length != c.N:
        raise ValueError(f"string length {w.length} != N={c.N}")
    h = c.hz if basis == "Z" else c.hx
    viol = h.matvec(w).weight()
    total = c.hx.rows + c.hz.rows
    return EnergyReport(
        violated=viol,
        checks=h.rows,
        total_checks=total,
        half_weighted=viol / (2 * h.rows) if h.rows else 0.0,
        overall=viol / total if total else 0.0,
    )


def energy(c: CssCode, w: BitVector, basis: Basis) -> float:
    return energy_report(c, w, basis).half_weighted


class PartitionSets:
    """The four sets splitting ``S_z^perp`` and ``S_x^perp`` by logical ``i``.

    ``C_0^Z = (S_z + b^z_i)^perp`` and ``C_1^Z = b^x_i + C_0^Z``; dually
    ``C_0^X = (S_x + b^x_i)^perp`` and ``C_1^X = b^z_i + C_0^X``.
    """

    def __init__(self, code: CssCode, lb: LogicalBasis, i: int):
        if not 0 <= i < lb.k:
            raise OutOfRangeError(f"logical index {i} not in [0, {lb.k})")
        self.code = code
        self.lb = lb
        self.i = i

    @property
    def bx(self) -> BitVector:
        return self.lb.bx[self.i]

    @property
    def bz(self) -> BitVector:
        return self.lb.bz[self.i]

    def classify(self, w: BitVector, basis: Basis) -> int | None:
        """Cell 0 or 1 of a basis string, or None outside ``S^perp``."""
        basis = _check_basis(basis)
        if basis == "Z":
            if not self.code.in_sz_perp(w):
                return None
            return w.dot(self.bz)
        if not self.code.in_sx_perp(w):
            return None
        return w.dot(self.bx)

    def member(self, w: BitVector, basis: Basis, cell: int) -> bool:
        return self.classify(w, basis) == cell


def partition_sets(c: CssCode, lb: LogicalBasis, i: int) -> PartitionSets:
    return PartitionSets(c, lb, i)


def log2_quotient_size(c: CssCode) -> float:
    """log2 |S_x^perp| - log2 |S_z|, equal to k."""
    return float(len(c.sx_perp) - c.rank_z)


def steane_code() -> CssCode:
    h = np.array(
        [[0, 0, 0, 1, 1, 1, 1], [0, 1, 1, 0, 0, 1, 1], [1, 0, 1, 0, 1, 0, 1]],
        dtype=np.uint8,
    )
    return make_css(h, h)

