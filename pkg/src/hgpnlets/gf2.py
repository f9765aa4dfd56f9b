"""Bit-packed GF(2) vectors, matrices and elimination kernels.

Bits are stored little-endian inside 64-bit words: bit ``i`` of a vector
lives in word ``i // 64`` at position ``i % 64``.  Padding bits past the
logical length are always zero.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp
from numba import njit

from hgpnlets.errors import (
    CapacityExceededError,
    DegeneratePairingError,
    NoSolutionError,
)

DEFAULT_COSET_CAP = 2**26


def n_words(n: int) -> int:
    return (n + 63) >> 6


def pack(bits) -> np.ndarray:
    """Pack a 0/1 array of shape (..., n) into uint64 words of shape (..., nw)."""
    bits = np.asarray(bits, dtype=np.uint8) & 1
    n = bits.shape[-1]
    nw = n_words(n)
    lead = bits.shape[:-1]
    padded = np.zeros(lead + (nw * 64,), dtype=np.uint8)
    padded[..., :n] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(lead + (nw,))


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack`; returns uint8 bits of shape (..., n)."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    as_bytes = words.astype("<u8", copy=False).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return bits[..., :n]


def _tail_mask(n: int) -> np.uint64:
    rem = n & 63
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


def popcount(words: np.ndarray, axis: int = -1) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=axis, dtype=np.int64)


class BitVector:
    """Immutable packed vector over GF(2)."""

    __slots__ = ("_length", "_words")

    def __init__(self, length: int, words=None):
        nw = n_words(length)
        if words is None:
            arr = np.zeros(nw, dtype=np.uint64)
        else:
            arr = np.array(words, dtype=np.uint64).reshape(nw)
            if nw:
                arr[-1] &= _tail_mask(length)
        arr.flags.writeable = False
        self._length = int(length)
        self._words = arr

    @classmethod
    def from_bits(cls, bits) -> BitVector:
        bits = np.asarray(bits).ravel()
        return cls(bits.size, pack(bits))

    @classmethod
    def from_str(cls, s: str) -> BitVector:
        s = s.strip()
        if any(ch not in "01" for ch in s):
            raise ValueError(f"not a bit string: {s!r}")
        return cls.from_bits(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> BitVector:
        bits = np.zeros(length, dtype=np.uint8)
        idx = np.fromiter(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= length):
            raise IndexError("bit index out of range")
        bits[idx] ^= 1
        return cls.from_bits(bits)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length)

    @classmethod
    def ones(cls, length: int) -> BitVector:
        return cls.from_bits(np.ones(length, dtype=np.uint8))

    @property
    def length(self) -> int:
        return self._length

    @property
    def words(self) -> np.ndarray:
        return self._words

    def __len__(self) -> int:
        return self._length

    def weight(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def is_zero(self) -> bool:
        return not self._words.any()

    def to_bits(self) -> np.ndarray:
        return unpack(self._words, self._length)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.to_bits())

    def restrict(self, indices: Sequence[int]) -> BitVector:
        """Sub-vector on the given positions, in the given order."""
        return BitVector.from_bits(self.to_bits()[np.asarray(indices, dtype=np.int64)])

    def dot(self, other: BitVector) -> int:
        self._check(other)
        return int(np.bitwise_count(self._words & other._words).sum()) & 1

    def _check(self, other: BitVector) -> None:
        if self._length != other._length:
            raise ValueError(f"length mismatch: {self._length} vs {other._length}")

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._length
        if not 0 <= i < self._length:
            raise IndexError(i)
        return int(self._words[i >> 6] >> np.uint64(i & 63)) & 1

    def __xor__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._length, self._words ^ other._words)

    __add__ = __xor__

    def __and__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._length, self._words & other._words)

    def __or__(self, other: BitVector) -> BitVector:
        self._check(other)
        return BitVector(self._length, self._words | other._words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._length == other._length and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._length, self._words.tobytes()))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.to_bits())

    def __repr__(self) -> str:
        if self._length <= 80:
            return f"BitVector('{self}')"
        return f"BitVector(length={self._length}, weight={self.weight()})"


class BitMatrix:
    """Immutable row-major packed matrix over GF(2)."""

    __slots__ = ("_rows", "_cols", "_data")

    def __init__(self, rows: int, cols: int, data=None):
        nw = n_words(cols)
        if data is None:
            arr = np.zeros((rows, nw), dtype=np.uint64)
        else:
            arr = np.array(data, dtype=np.uint64).reshape(rows, nw)
            if nw:
                arr[:, -1] &= _tail_mask(cols)
        arr.flags.writeable = False
        self._rows = int(rows)
        self._cols = int(cols)
        self._data = arr

    @classmethod
    def from_dense(cls, a) -> BitMatrix:
        a = np.atleast_2d(np.asarray(a, dtype=np.uint8))
        if a.size == 0 and a.ndim == 2:
            return cls(a.shape[0], a.shape[1])
        return cls(a.shape[0], a.shape[1], pack(a))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: int | None = None) -> BitMatrix:
        if cols is None:
            if not rows:
                raise ValueError("cols required for an empty row list")
            cols = rows[0].length
        if any(r.length != cols for r in rows):
            raise ValueError("row length mismatch")
        if not rows:
            return cls(0, cols)
        return cls(len(rows), cols, np.stack([r.words for r in rows]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return self._rows, self._cols

    @property
    def data(self) -> np.ndarray:
        return self._data

    def __len__(self) -> int:
        return self._rows

    def row(self, i: int) -> BitVector:
        return BitVector(self._cols, self._data[i])

    def __iter__(self) -> Iterator[BitVector]:
        for i in range(self._rows):
            yield self.row(i)

    def to_dense(self) -> np.ndarray:
        return unpack(self._data, self._cols)

    def to_sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.to_dense(), dtype=np.int64)

    @property
    def T(self) -> BitMatrix:
        return BitMatrix.from_dense(self.to_dense().T)

    def row_weights(self) -> np.ndarray:
        return popcount(self._data)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def matvec(self, v: BitVector) -> BitVector:
        """Return ``M v`` (one parity per row)."""
        if v.length != self._cols:
            raise ValueError(f"vector length {v.length} != cols {self._cols}")
        parity = popcount(self._data & v.words[None, :]) & 1
        return BitVector.from_bits(parity)

    def syndromes(self, words: np.ndarray) -> np.ndarray:
        """Parities ``M w`` for a batch of packed words (k, nw) -> (k, rows) uint8."""
        out = np.empty((words.shape[0], self._rows), dtype=np.uint8)
        for i in range(self._rows):
            out[:, i] = popcount(words & self._data[i][None, :]) & 1
        return out

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self._cols != other._rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        prod = (self.to_sparse() @ other.to_sparse()).tocoo()
        out = np.zeros((self._rows, other._cols), dtype=np.uint8)
        out[prod.row, prod.col] = (prod.data & 1).astype(np.uint8)
        return BitMatrix.from_dense(out)

    def is_zero(self) -> bool:
        return not self._data.any()

    @staticmethod
    def hstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
        return BitMatrix.from_dense(np.hstack([b.to_dense() for b in blocks]))

    @staticmethod
    def vstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
        cols = {b.cols for b in blocks}
        if len(cols) != 1:
            raise ValueError("column mismatch in vstack")
        (c,) = cols
        return BitMatrix(sum(b.rows for b in blocks), c, np.vstack([b.data for b in blocks]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    def __hash__(self) -> int:
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self._rows}x{self._cols})"


# --------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _echelon(a, ncols, reduced):
    # In place.  reduced=False is rank-only: rows below a pivot are cleared
    # from the pivot word onward, so earlier words become meaningless.
    rows, nw = a.shape
    pivots = np.empty(min(rows, ncols), dtype=np.int64)
    r = 0
    for col in range(ncols):
        if r == rows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        p = -1
        for i in range(r, rows):
            if a[i, w] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(nw):
                t = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = t
        if reduced:
            for i in range(rows):
                if i != r and (a[i, w] & bit):
                    for j in range(nw):
                        a[i, j] ^= a[r, j]
        else:
            for i in range(r + 1, rows):
                if a[i, w] & bit:
                    for j in range(w, nw):
                        a[i, j] ^= a[r, j]
        pivots[r] = col
        r += 1
    return pivots[:r]


@njit(cache=True)
def _gray_min_weight(basis, offset, require_mask, include_start, stop_at):
    # Minimum weight over offset + span(basis) restricted to combinations whose
    # coefficient vector meets require_mask (require_mask == 0: no restriction).
    k, nw = basis.shape
    word = offset.copy()
    coef = np.uint64(0)
    best = -1
    if include_start and require_mask == 0:
        w0 = 0
        for j in range(nw):
            w0 += _popcount64(word[j])
        best = w0
        if best <= stop_at:
            return best
    total = np.uint64(1) << np.uint64(k)
    i = np.uint64(1)
    while i < total:
        g = 0
        t = i
        while (t & np.uint64(1)) == 0:
            t >>= np.uint64(1)
            g += 1
        for j in range(nw):
            word[j] ^= basis[g, j]
        coef ^= np.uint64(1) << np.uint64(g)
        if require_mask == 0 or (coef & require_mask) != 0:
            wt = 0
            for j in range(nw):
                wt += _popcount64(word[j])
            if best < 0 or wt < best:
                best = wt
                if best <= stop_at:
                    return best
        i += np.uint64(1)
    return best


@njit(cache=True)
def _gray_block_profile(basis, offset, masks_a, masks_b, hist):
    # For every word of offset + span(basis): record (max over masks_a of the
    # masked weight, max over masks_b of the masked weight) into hist.
    k, nw = basis.shape
    word = offset.copy()
    total = np.uint64(1) << np.uint64(k)
    i = np.uint64(0)
    while i < total:
        if i > 0:
            g = 0
            t = i
            while (t & np.uint64(1)) == 0:
                t >>= np.uint64(1)
                g += 1
            for j in range(nw):
                word[j] ^= basis[g, j]
        ma = 0
        for c in range(masks_a.shape[0]):
            s = 0
            for j in range(nw):
                s += _popcount64(word[j] & masks_a[c, j])
            if s > ma:
                ma = s
        mb = 0
        for c in range(masks_b.shape[0]):
            s = 0
            for j in range(nw):
                s += _popcount64(word[j] & masks_b[c, j])
            if s > mb:
                mb = s
        hist[ma, mb] += 1
        i += np.uint64(1)


# --------------------------------------------------------------------------
# linear algebra


def _rref(m: BitMatrix, ncols: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    a = m.data.copy()
    pivots = _echelon(a, m.cols if ncols is None else ncols, True)
    return a, pivots


def rank(m: BitMatrix) -> int:
    """GF(2) rank; the input is not modified."""
    if m.rows == 0 or m.cols == 0:
        return 0
    a = m.data.copy()
    return int(_echelon(a, m.cols, False).size)


def rowspan_basis(m: BitMatrix) -> BitMatrix:
    """Independent rows (reduced echelon form) spanning the row space of ``m``."""
    if m.rows == 0:
        return BitMatrix(0, m.cols)
    a, pivots = _rref(m)
    return BitMatrix(pivots.size, m.cols, a[: pivots.size])


def nullspace_basis(m: BitMatrix) -> list[BitVector]:
    """Basis of ``{v : M v = 0}``; has ``cols - rank`` vectors."""
    cols = m.cols
    if m.rows == 0:
        return [BitVector.from_indices(cols, [j]) for j in range(cols)]
    a, pivots = _rref(m)
    r = pivots.size
    free = np.setdiff1d(np.arange(cols), pivots)
    if free.size == 0:
        return []
    dense = unpack(a[:r], cols)
    out = np.zeros((free.size, cols), dtype=np.uint8)
    out[np.arange(free.size), free] = 1
    if r:
        out[:, pivots] = dense[:, free].T
    packed = pack(out)
    return [BitVector(cols, packed[i]) for i in range(free.size)]


def solve(m: BitMatrix, b: BitVector) -> BitVector:
    """Some ``x`` with ``M x = b``; raises NoSolutionError when none exists."""
    if b.length != m.rows:
        raise ValueError(f"rhs length {b.length} != rows {m.rows}")
    aug = np.hstack([m.to_dense(), b.to_bits()[:, None]])
    a, pivots = _rref(BitMatrix.from_dense(aug), m.cols)
    dense = unpack(a, m.cols + 1)
    r = pivots.size
    if dense[r:, m.cols].any():
        raise NoSolutionError("right-hand side is not in the column span")
    x = np.zeros(m.cols, dtype=np.uint8)
    x[pivots] = dense[:r, m.cols]
    return BitVector.from_bits(x)


def in_rowspan(v: BitVector, m: BitMatrix) -> bool:
    if m.rows == 0:
        return v.is_zero()
    return rank(BitMatrix.vstack([m, BitMatrix.from_rows([v])])) == rank(m)


def extend_to_quotient_basis(sub: BitMatrix, candidates: Sequence[BitVector]) -> list[BitVector]:
    """Pick candidates that are independent modulo the row space of ``sub``.

    Candidates are scanned in order and kept whenever they raise the rank;
    this is read off as the pivot columns of one elimination of
    ``[sub^T | candidates^T]``.
    """
    if not candidates:
        return []
    cand = np.stack([c.to_bits() for c in candidates])
    cols = np.vstack([sub.to_dense(), cand]).T
    a = BitMatrix.from_dense(cols).data.copy()
    pivots = _echelon(a, cols.shape[1], False)
    return [candidates[p - sub.rows] for p in pivots if p >= sub.rows]


def coset_enumerate(
    basis: Sequence[BitVector], offset: BitVector, cap: int = DEFAULT_COSET_CAP
) -> list[BitVector]:
    """All vectors ``offset + sum(subset of basis)``.

    Assumes the basis is independent; otherwise duplicates appear.
    """
    if 2 ** len(basis) > cap:
        raise CapacityExceededError(f"2^{len(basis)} elements exceed cap {cap}")
    words = coset_words(basis, offset)
    return [BitVector(offset.length, w) for w in words]


def coset_words(basis: Sequence[BitVector], offset: BitVector) -> np.ndarray:
    """Packed array (2^k, nw) of the affine span, subset order by doubling."""
    arr = offset.words[None, :].copy()
    for b in basis:
        arr = np.concatenate([arr, arr ^ b.words[None, :]])
    return arr


def stack_words(vectors: Sequence[BitVector], length: int) -> np.ndarray:
    if not vectors:
        return np.zeros((0, n_words(length)), dtype=np.uint64)
    return np.ascontiguousarray(np.stack([v.words for v in vectors]))


def gram(xs: Sequence[BitVector], zs: Sequence[BitVector]) -> np.ndarray:
    """Matrix of pairings ``G[i, j] = <xs[i], zs[j]>``."""
    g = np.zeros((len(xs), len(zs)), dtype=np.uint8)
    for i, x in enumerate(xs):
        for j, z in enumerate(zs):
            g[i, j] = x.dot(z)
    return g


def pair_normalize(
    xs: Sequence[BitVector], zs: Sequence[BitVector]
) -> tuple[list[BitVector], list[BitVector]]:
    """Symplectic Gram-Schmidt: make ``<x_i, z_j> = delta_ij``.

    At step ``i`` the first pair ``(a, b)`` with ``a, b >= i`` (scanning ``a``
    first, lowest index wins) and ``<x_a, z_b> = 1`` becomes the pivot pair;
    remaining vectors are cleared against it.  Bases that are already dual come
    back unchanged.
    """
    if len(xs) != len(zs):
        raise DegeneratePairingError(f"basis sizes differ: {len(xs)} vs {len(zs)}")
    xs = list(xs)
    zs = list(zs)
    k = len(xs)
    for i in range(k):
        pivot = None
        for a in range(i, k):
            for b in range(i, k):
                if xs[a].dot(zs[b]):
                    pivot = (a, b)
                    break
            if pivot:
                break
        if pivot is None:
            raise DegeneratePairingError("Gram matrix is singular")
        a, b = pivot
        xs[i], xs[a] = xs[a], xs[i]
        zs[i], zs[b] = zs[b], zs[i]
        for j in range(k):
            if j == i:
                continue
            if xs[j].dot(zs[i]):
                xs[j] = xs[j] + xs[i]
            if xs[i].dot(zs[j]):
                zs[j] = zs[j] + zs[i]
    return xs, zs


def min_weight_in_span(
    basis: np.ndarray,
    offset: np.ndarray,
    require_mask: int = 0,
    include_start: bool = True,
    stop_at: int = 0,
) -> int:
    """Exhaustive minimum weight over ``offset + span(basis)`` (Gray code).

    ``require_mask`` selects coefficient bits of which at least one must be
    set.  Returns -1 when no word qualifies.
    """
    basis = np.ascontiguousarray(basis, dtype=np.uint64)
    offset = np.ascontiguousarray(offset, dtype=np.uint64)
    if basis.shape[0] > 62:
        raise CapacityExceededError("span too large for exhaustive search")
    return int(_gray_min_weight(basis, offset, np.uint64(require_mask), include_start, stop_at))


def block_profile(
    basis: np.ndarray, offset: np.ndarray, masks_a: np.ndarray, masks_b: np.ndarray
) -> np.ndarray:
    """Histogram of (max masked weight over masks_a, over masks_b) for the affine span."""
    basis = np.ascontiguousarray(basis, dtype=np.uint64)
    offset = np.ascontiguousarray(offset, dtype=np.uint64)
    masks_a = np.ascontiguousarray(masks_a, dtype=np.uint64).reshape(-1, offset.size)
    masks_b = np.ascontiguousarray(masks_b, dtype=np.uint64).reshape(-1, offset.size)
    ha = int(popcount(masks_a).max()) if masks_a.shape[0] else 0
    hb = int(popcount(masks_b).max()) if masks_b.shape[0] else 0
    hist = np.zeros((ha + 1, hb + 1), dtype=np.int64)
    _gray_block_profile(basis, offset, masks_a, masks_b, hist)
    return hist
