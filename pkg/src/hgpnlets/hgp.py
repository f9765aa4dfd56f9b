"""Hypergraph product of a graph repetition code with itself.

Qubits are laid out as the V x V block, row-major ``(u, v) -> u*n + v``,
followed by the E x E block, ``(e, f) -> n^2 + e*m + f``.  X-check ``(e, v)``
is row ``e*n + v`` of ``hx``; Z-check ``(v, e)`` is row ``v*m + e`` of ``hz``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sp

from hgpnlets.classical import TannerCode
from hgpnlets.css import CssCode, LogicalBasis
from hgpnlets.errors import (
    DisconnectedError,
    NotLogicalError,
    OutOfRangeError,
    TooLargeError,
)
from hgpnlets.gf2 import BitMatrix, BitVector, block_profile, coset_words, nullspace_basis, pack, rank
from hgpnlets.graphs import Graph, ResidualGraph, incidence, maximal_connected_residual

Kind = Literal["X", "Z"]
MAX_LOCALIZED_DIM = 24


@dataclass(frozen=True)
class HgpIndex:
    n: int
    m: int

    @property
    def N(self) -> int:
        return self.n * self.n + self.m * self.m

    def vv(self, u: int, v: int) -> int:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise OutOfRangeError(f"vertex pair ({u}, {v}) out of range")
        return u * self.n + v

    def ee(self, e: int, f: int) -> int:
        if not (0 <= e < self.m and 0 <= f < self.m):
            raise OutOfRangeError(f"edge pair ({e}, {f}) out of range")
        return self.n * self.n + e * self.m + f

    def locate(self, q: int) -> tuple[str, int, int]:
        """Inverse map: ``('V', u, v)`` or ``('E', e, f)``."""
        if not 0 <= q < self.N:
            raise OutOfRangeError(f"qubit {q} out of range")
        if q < self.n * self.n:
            return ("V", q // self.n, q % self.n)
        q -= self.n * self.n
        return ("E", q // self.m, q % self.m)

    def v_columns(self) -> np.ndarray:
        """0/1 masks (n, N): mask v selects the column V x v."""
        out = np.zeros((self.n, self.N), dtype=np.uint8)
        for v in range(self.n):
            out[v, np.arange(self.n) * self.n + v] = 1
        return out

    def e_columns(self) -> np.ndarray:
        """0/1 masks (m, N): mask e selects the column E x e."""
        out = np.zeros((self.m, self.N), dtype=np.uint8)
        base = self.n * self.n
        for e in range(self.m):
            out[e, base + np.arange(self.m) * self.m + e] = 1
        return out

    def v_rows(self) -> np.ndarray:
        """0/1 masks (n, N): mask u selects the row u x V."""
        out = np.zeros((self.n, self.N), dtype=np.uint8)
        for u in range(self.n):
            out[u, u * self.n : (u + 1) * self.n] = 1
        return out

    def e_rows(self) -> np.ndarray:
        out = np.zeros((self.m, self.N), dtype=np.uint8)
        base = self.n * self.n
        for e in range(self.m):
            out[e, base + e * self.m : base + (e + 1) * self.m] = 1
        return out

    def line_masks(self, kind: Kind) -> tuple[np.ndarray, np.ndarray]:
        """(V-lines, E-lines): columns for Z-type words, rows for X-type words."""
        if kind == "Z":
            return self.v_columns(), self.e_columns()
        return self.v_rows(), self.e_rows()


@dataclass
class HgpCode:
    code: CssCode
    index: HgpIndex
    graph: Graph

    @property
    def N(self) -> int:
        return self.index.N

    @property
    def n(self) -> int:
        return self.index.n

    @property
    def m(self) -> int:
        return self.index.m

    def k_formula(self) -> int:
        return 1 + self.graph.cycle_rank() ** 2


def product_matrices(h1: BitMatrix, h2: BitMatrix) -> tuple[BitMatrix, BitMatrix]:
    """Two-factor product ``hx = (h1 x I | I x h2^T)``, ``hz = (I x h2 | h1^T x I)``."""
    a = h1.to_sparse().astype(np.int8)
    b = h2.to_sparse().astype(np.int8)
    m1, n1 = a.shape
    m2, n2 = b.shape
    hx = sp.hstack([sp.kron(a, sp.identity(n2, dtype=np.int8)), sp.kron(sp.identity(m1, dtype=np.int8), b.T)])
    hz = sp.hstack([sp.kron(sp.identity(n1, dtype=np.int8), b), sp.kron(a.T, sp.identity(m2, dtype=np.int8))])
    return (
        BitMatrix.from_dense(hx.toarray() & 1),
        BitMatrix.from_dense(hz.toarray() & 1),
    )


def hypergraph_product(g: Graph) -> HgpCode:
    if not g.is_connected():
        raise DisconnectedError("hypergraph product needs a connected graph")
    d = incidence(g)
    hx, hz = product_matrices(d, d)
    return HgpCode(CssCode(hx, hz), HgpIndex(g.n, g.m), g)


def stabilizer_generator(h: HgpCode, kind: Kind, v: int, e: int) -> BitVector:
    """``s_z(v, e) = v x d^T e + d v x e`` or ``s_x(e, v) = d^T e x v + e x d v``."""
    idx, g = h.index, h.graph
    if not (0 <= v < h.n and 0 <= e < h.m):
        raise OutOfRangeError(f"generator ({v}, {e}) out of range")
    a, b = g.edges[e]
    incident = [f for f, (x, y) in enumerate(g.edges) if v in (x, y)]
    if kind == "Z":
        support = [idx.vv(v, a), idx.vv(v, b)] + [idx.ee(f, e) for f in incident]
    elif kind == "X":
        support = [idx.vv(a, v), idx.vv(b, v)] + [idx.ee(e, f) for f in incident]
    else:
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    return BitVector.from_indices(h.N, support)


def generator_row(h: HgpCode, kind: Kind, v: int, e: int) -> BitVector:
    if kind == "Z":
        return h.code.hz.row(v * h.m + e)
    return h.code.hx.row(e * h.n + v)


def column_logical(h: HgpCode, kind: Kind, v1: int, verify: bool = True) -> BitVector:
    """``1_{V x v1}`` for Z-kind, ``1_{v1 x V}`` for X-kind."""
    if not 0 <= v1 < h.n:
        raise OutOfRangeError(f"vertex {v1} out of range")
    idx = h.index
    if kind == "Z":
        w = BitVector.from_indices(h.N, [idx.vv(u, v1) for u in range(h.n)])
    elif kind == "X":
        w = BitVector.from_indices(h.N, [idx.vv(v1, u) for u in range(h.n)])
    else:
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    if verify:
        partner = column_logical(h, "X" if kind == "Z" else "Z", v1, verify=False)
        ok_w = h.code.in_sx_perp(w) if kind == "Z" else h.code.in_sz_perp(w)
        ok_p = h.code.in_sz_perp(partner) if kind == "Z" else h.code.in_sx_perp(partner)
        # pairing 1 with a commuting partner proves w is outside the stabilizer
        if not (ok_w and ok_p and w.dot(partner) == 1):
            raise NotLogicalError(f"column vector at v1={v1} is not a logical")
    return w


def column_pair(h: HgpCode, v1: int = 0) -> LogicalBasis:
    """The single anti-commuting pair ``(1_{v1 x V}, 1_{V x v1})`` as a basis."""
    return LogicalBasis((column_logical(h, "X", v1),), (column_logical(h, "Z", v1),))


def spanning_set_check(h: HgpCode, max_dim: int | None = None) -> dict:
    """Rank check that ``{b^z} + {e x c : c in C^T} + S_z`` spans ``S_x^perp``."""
    c = h.code
    dim = c.N - c.rank_x
    if max_dim is not None and dim > max_dim:
        raise TooLargeError(f"dim(S_x^perp) = {dim} exceeds {max_dim}")
    idx = h.index
    cycles = nullspace_basis(incidence(h.graph).T)
    vecs = [column_logical(h, "Z", 0)]
    for e in range(h.m):
        for cyc in cycles:
            vecs.append(BitVector.from_indices(h.N, [idx.ee(e, f) for f in cyc.support()]))
    all_in = all(c.in_sx_perp(v) for v in vecs)
    stacked = BitMatrix.vstack([BitMatrix.from_rows(vecs), c.hz])
    r = rank(stacked)
    dim_ct = len(cycles)
    return {
        "dim_sx_perp": dim,
        "span_rank": r,
        "spans": bool(all_in and r == dim),
        "dim_ct": dim_ct,
        "k_rank": c.k,
        "k_formula": 1 + dim_ct * dim_ct,
    }


@dataclass
class FractalSubcode:
    child: HgpCode
    embedding: np.ndarray
    residual: ResidualGraph

    def restrict(self, w: BitVector) -> BitVector:
        """Parent vector restricted to the embedded qubits, in child order."""
        return w.restrict(self.embedding)

    def lift(self, w: BitVector, parent_N: int) -> BitVector:
        return BitVector.from_indices(parent_N, self.embedding[w.support()])


def fractal_subcode(h: HgpCode, v_keep, e_keep) -> FractalSubcode:
    res = maximal_connected_residual(h.graph, v_keep, e_keep)
    child = hypergraph_product(res.graph)
    vs = np.array(res.vertices, dtype=np.int64)
    es = np.array(res.edges, dtype=np.int64)
    pidx = h.index
    emb = np.concatenate(
        [
            (vs[:, None] * pidx.n + vs[None, :]).ravel(),
            (pidx.n * pidx.n + es[:, None] * pidx.m + es[None, :]).ravel(),
        ]
    )
    return FractalSubcode(child, emb, res)


def check_inheritance(h: HgpCode, sub: FractalSubcode) -> bool:
    """Every child check equals the parent check of the same label, restricted."""
    vs, es = sub.residual.vertices, sub.residual.edges
    ch = sub.child
    px = h.code.hx.to_dense()[:, sub.embedding]
    pz = h.code.hz.to_dense()[:, sub.embedding]
    cx = ch.code.hx.to_dense()
    cz = ch.code.hz.to_dense()
    for ei, e in enumerate(es):
        for vi, v in enumerate(vs):
            if not np.array_equal(cx[ei * ch.n + vi], px[e * h.n + v]):
                return False
            if not np.array_equal(cz[vi * ch.m + ei], pz[v * h.m + e]):
                return False
    return True


@dataclass
class LocalizedDistanceReport:
    kind: str
    mode: str
    n: int
    m: int
    d: int
    size: int
    hist: np.ndarray = field(repr=False)

    def cells(self) -> np.ndarray:
        """Occupied (maxV, maxE) pairs."""
        return np.argwhere(self.hist > 0)

    @property
    def min_max_v(self) -> int:
        return int(self.cells()[:, 0].min())

    @property
    def min_max_e(self) -> int:
        return int(self.cells()[:, 1].min())

    @property
    def threshold_v(self) -> int:
        return math.ceil(self.n / 2)

    def qualitative_holds(self) -> bool:
        """Every word has a V-line of weight >= ceil(n/2) or an E-line of weight >= 1."""
        c = self.cells()
        return bool(np.all((c[:, 0] >= self.threshold_v) | (c[:, 1] >= 1)))

    def stated_constants_hold(self) -> bool:
        """Same disjunction at thresholds n/2 and 3n/(8d)."""
        c = self.cells()
        return bool(np.all((c[:, 0] >= self.n / 2) | (c[:, 1] >= 3 * self.n / (8 * self.d))))

    def achieved_constant(self) -> float:
        """Largest c with maxV >= c n/2 or maxE >= c 3n/(8d) for every word."""
        c = self.cells()
        return float(np.min(np.maximum(c[:, 0] / (self.n / 2), c[:, 1] / (3 * self.n / (8 * self.d)))))

    def distance_lower_bound(self, tv: int, te: int) -> int:
        """min over words of max(maxV - 2 tv, maxE - 2 te).

        ``tv``/``te`` bound the error weight on any single V-line / E-line.
        """
        c = self.cells()
        return int(np.min(np.maximum(c[:, 0] - 2 * tv, c[:, 1] - 2 * te)))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "mode": self.mode,
            "n": self.n,
            "m": self.m,
            "size": self.size,
            "min_max_v": self.min_max_v,
            "min_max_e": self.min_max_e,
            "threshold_v": self.threshold_v,
            "qualitative_holds": self.qualitative_holds(),
            "stated_constants_hold": self.stated_constants_hold(),
            "achieved_constant": self.achieved_constant(),
            "cells": {f"{a},{b}": int(self.hist[a, b]) for a, b in self.cells()},
        }


def localized_coset(h: HgpCode, kind: Kind, mode: str, v1: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Generators and offset of the audited coset.

    kind Z, mode 'full': ``{w in S_x^perp : <w, 1_{v1 x V}> = 1}``.
    kind Z, mode 'stabilizer': ``1_{V x v1} + S_z``.  Kind X swaps roles.
    """
    c = h.code
    b = column_logical(h, kind, v1)
    partner = column_logical(h, "X" if kind == "Z" else "Z", v1, verify=False)
    if mode == "stabilizer":
        stab = c.sz_basis if kind == "Z" else c.sx_basis
        return stab.data, b.words.copy()
    if mode != "full":
        raise ValueError(f"unknown mode {mode!r}")
    perp = c.sx_perp if kind == "Z" else c.sz_perp
    # basis of the pairing-0 subspace: fix one vector with pairing 1
    pivot = next(p for p in perp if p.dot(partner))
    gens = [p + pivot if p.dot(partner) else p for p in perp if p is not pivot]
    return pack(np.array([g.to_bits() for g in gens])), b.words.copy()


def localized_distance_check(
    h: HgpCode, kind: Kind = "Z", mode: str = "auto", v1: int = 0, max_dim: int = MAX_LOCALIZED_DIM
) -> LocalizedDistanceReport:
    """Histogram of the heaviest V-line and E-line over an enumerated coset.

    Lines are columns for Z-kind words and rows for X-kind words.  Mode
    'auto' takes the full logical coset when it fits under ``max_dim`` and
    falls back to the stabilizer coset otherwise.
    """
    c = h.code
    full_dim = (c.N - (c.rank_x if kind == "Z" else c.rank_z)) - 1
    stab_dim = c.rank_z if kind == "Z" else c.rank_x
    if mode == "auto":
        mode = "full" if full_dim <= max_dim else "stabilizer"
    dim = full_dim if mode == "full" else stab_dim
    if dim > max_dim:
        raise TooLargeError(f"coset dimension {dim} exceeds {max_dim}")
    gens, offset = localized_coset(h, kind, mode, v1)
    va, ea = h.index.line_masks(kind)
    hist = block_profile(gens, offset, pack(va), pack(ea))
    d = h.graph.max_degree()
    return LocalizedDistanceReport(kind, mode, h.n, h.m, d, 1 << dim, hist)


def enumerate_coset(h: HgpCode, kind: Kind, mode: str, v1: int = 0) -> np.ndarray:
    """Packed words of the audited coset (small instances only)."""
    gens, offset = localized_coset(h, kind, mode, v1)
    basis = [BitVector(h.N, g) for g in gens]
    return coset_words(basis, BitVector(h.N, offset))


def repetition_pair(g: Graph) -> tuple[TannerCode, TannerCode]:
    d = incidence(g)
    return TannerCode(d), TannerCode(d.T)
