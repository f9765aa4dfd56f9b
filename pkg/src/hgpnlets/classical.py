"""Classical Tanner codes: graph repetition codes, distances and LTC soundness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from hgpnlets.errors import DisconnectedError, TooLargeError, ZeroSoundnessError
from hgpnlets.gf2 import (
    BitMatrix,
    BitVector,
    coset_words,
    min_weight_in_span,
    nullspace_basis,
    rank,
    stack_words,
)
from hgpnlets.graphs import Graph, cheeger_exhaustive, incidence

MAX_DISTANCE_DIM = 26
MAX_SOUNDNESS_N = 22


class TannerCode:
    """Linear code ``ker H`` for a check matrix ``H`` (m checks x n bits)."""

    def __init__(self, check_matrix: BitMatrix):
        self.check_matrix = check_matrix

    @property
    def n(self) -> int:
        return self.check_matrix.cols

    @property
    def m(self) -> int:
        return self.check_matrix.rows

    @cached_property
    def rank(self) -> int:
        return rank(self.check_matrix)

    @cached_property
    def kernel_basis(self) -> list[BitVector]:
        return nullspace_basis(self.check_matrix)

    @property
    def dim(self) -> int:
        return self.n - self.rank

    def transpose(self) -> TannerCode:
        return TannerCode(self.check_matrix.T)

    def syndrome(self, w: BitVector) -> BitVector:
        return self.check_matrix.matvec(w)

    def is_codeword(self, w: BitVector) -> bool:
        return self.syndrome(w).is_zero()

    def __repr__(self) -> str:
        return f"TannerCode(n={self.n}, m={self.m}, dim={self.dim})"


def repetition_from_graph(g: Graph) -> TannerCode:
    """Repetition code whose checks are the edges of a connected graph."""
    if not g.is_connected():
        raise DisconnectedError("graph is disconnected; kernel would exceed {0, 1}")
    return TannerCode(incidence(g))


def violated_fraction(c: TannerCode, w: BitVector) -> float:
    if w.length != c.n:
        raise ValueError(f"word length {w.length} != n={c.n}")
    if c.m == 0:
        return 0.0
    return c.syndrome(w).weight() / c.m


def distance_exhaustive(c: TannerCode) -> float:
    """Minimum nonzero codeword weight; ``math.inf`` for the zero code."""
    k = c.dim
    if k > MAX_DISTANCE_DIM:
        raise TooLargeError(f"kernel dimension {k} exceeds {MAX_DISTANCE_DIM}")
    if k == 0:
        return math.inf
    basis = stack_words(c.kernel_basis, c.n)
    zero = np.zeros(basis.shape[1], dtype=np.uint64)
    return min_weight_in_span(basis, zero, include_start=False, stop_at=1)


def _row_masks(h: BitMatrix) -> np.ndarray:
    dense = h.to_dense().astype(np.int64)
    return (dense << np.arange(h.cols, dtype=np.int64)).sum(axis=1)


def distance_table(c: TannerCode) -> np.ndarray:
    """dist(w, C) for every integer-encoded word w (bit i of w is position i).

    Multi-source BFS over the hypercube from all codewords.
    """
    n = c.n
    if n > MAX_SOUNDNESS_N:
        raise TooLargeError(f"n={n} exceeds distance-table cap {MAX_SOUNDNESS_N}")
    words = coset_words(c.kernel_basis, BitVector.zeros(n))
    code = words[:, 0].astype(np.int64) if n else np.zeros(1, dtype=np.int64)
    dist = np.full(1 << n, -1, dtype=np.int16)
    dist[code] = 0
    frontier = np.unique(code)
    level = 0
    while frontier.size:
        level += 1
        nxt = np.concatenate([frontier ^ (1 << i) for i in range(n)])
        nxt = np.unique(nxt)
        nxt = nxt[dist[nxt] < 0]
        dist[nxt] = level
        frontier = nxt
    return dist


def violated_counts(c: TannerCode) -> np.ndarray:
    """Number of violated checks for every integer-encoded word."""
    n = c.n
    if n > MAX_SOUNDNESS_N:
        raise TooLargeError(f"n={n} exceeds table cap {MAX_SOUNDNESS_N}")
    words = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int32)
    for mask in _row_masks(c.check_matrix):
        counts += (np.bitwise_count(words & mask) & 1).astype(np.int32)
    return counts


@dataclass(frozen=True)
class SoundnessResult:
    rho: float
    argmin_word: BitVector | None


def ltc_soundness_exhaustive(c: TannerCode) -> float:
    """Largest rho with violated_fraction(w) >= rho dist(w, C)/n for all w."""
    return soundness_search(c).rho


def soundness_search(c: TannerCode) -> SoundnessResult:
    dist = distance_table(c)
    viol = violated_counts(c)
    far = np.flatnonzero(dist > 0)
    if far.size == 0:
        return SoundnessResult(math.inf, None)
    ratio = (viol[far] / c.m) * c.n / dist[far]
    i = int(np.argmin(ratio))
    word = int(far[i])
    bits = [(word >> j) & 1 for j in range(c.n)]
    return SoundnessResult(float(ratio[i]), BitVector.from_bits(bits))


def soundness_report(g: Graph) -> dict:
    """Exhaustive soundness of the graph repetition code next to 2h(G)/d."""
    c = repetition_from_graph(g)
    res = soundness_search(c)
    d = g.max_degree()
    bound = 2 * cheeger_exhaustive(g) / d if g.n <= 20 else None
    return {
        "n": g.n,
        "m": g.m,
        "rho_exhaustive": res.rho,
        "rho_bound": bound,
        "argmin_word": str(res.argmin_word) if res.argmin_word is not None else None,
    }


def cluster_radius(eps: float, rho: float) -> float:
    """Fractional radius eps/rho around the code containing an eps-violating word."""
    if rho <= 0:
        raise ZeroSoundnessError("soundness must be positive")
    return eps / rho


def robust_ltc_check(sub: Graph, d: int, eps_p: float, gap: float) -> dict:
    """Exhaustive check of the robust-testability bound on a residual graph.

    Every word w on the residual vertices violating a fraction delta of its
    edges must be within (delta + 2 eps')/(gap (1 - eps')) of 0 or 1.
    """
    n = sub.n
    if n > 16:
        raise TooLargeError(f"residual graph with {n} > 16 vertices")
    c = TannerCode(incidence(sub))
    viol = violated_counts(c)
    words = np.arange(1 << n, dtype=np.int64)
    wt = np.bitwise_count(words).astype(np.int64)
    frac = np.minimum(wt, n - wt) / n
    delta = viol / max(sub.m, 1)
    if eps_p >= 1 or gap <= 0:
        return {"n": n, "applicable": False, "holds": True, "min_slack": None}
    bound = (delta + 2 * eps_p) / (gap * (1 - eps_p))
    slack = bound - frac
    i = int(np.argmin(slack))
    return {
        "n": n,
        "applicable": True,
        "holds": bool(slack.min() >= -1e-12),
        "min_slack": float(slack[i]),
        "worst_word": int(words[i]),
    }


def expansion_band_check(sub: Graph, eps_p: float, factor: float = 3.0, lo_mult: float = 100.0) -> dict:
    """Check |boundary(w)| >= factor |w| for lo_mult eps' <= |w|/n <= 1/2.

    Returns the band and whether the implication holds; an empty band is
    reported as vacuous rather than as a pass or failure.
    """
    n = sub.n
    if n > 16:
        raise TooLargeError(f"residual graph with {n} > 16 vertices")
    words = np.arange(1, 1 << n, dtype=np.int64)
    wt = np.bitwise_count(words).astype(np.int64)
    lo = lo_mult * eps_p
    sel = (wt / n >= lo) & (wt / n <= 0.5)
    band = (lo, 0.5)
    if not sel.any():
        return {"band": band, "vacuous": True, "holds": True, "min_ratio": None}
    c = TannerCode(incidence(sub))
    cut = violated_counts(c)[1:][sel]
    ratio = cut / wt[sel]
    return {
        "band": band,
        "vacuous": False,
        "holds": bool(ratio.min() >= factor),
        "min_ratio": float(ratio.min()),
    }
