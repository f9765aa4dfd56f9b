"""Slow reference implementations used to cross-check the packed kernels."""

from __future__ import annotations

import itertools

import numpy as np


def naive_rank(a: np.ndarray) -> int:
    a = (np.array(a, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def span(vectors: list[np.ndarray], n: int) -> set[tuple[int, ...]]:
    out = {tuple([0] * n)}
    for v in vectors:
        out |= {tuple(np.bitwise_xor(np.array(w), v)) for w in out}
    return out


def all_words(n: int) -> np.ndarray:
    return np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.uint8)


def naive_hamming_expansion(points: dict[int, float], n: int, ell: int) -> float:
    """Exact h_ell by sweeping every subset of F_2^n (n <= 4)."""
    size = 1 << n
    mass = np.array([points.get(x, 0.0) for x in range(size)])
    best = np.inf
    for subset in range(1, 1 << size):
        members = [x for x in range(size) if subset >> x & 1]
        pm = mass[members].sum()
        if pm <= 1e-15 or pm > 0.5 + 1e-12:
            continue
        boundary = 0.0
        for y in range(size):
            dists = [bin(x ^ y).count("1") for x in members]
            inside = y in members
            near_in = min(dists) <= ell
            near_out = any(bin(z ^ y).count("1") <= ell for z in range(size) if not subset >> z & 1)
            if (inside and near_out) or (not inside and near_in):
                boundary += mass[y]
        best = min(best, boundary / pm)
    return best


def _span_ints(rows: np.ndarray) -> np.ndarray:
    """Every element of the row span as little-endian integers."""
    weights = (1 << np.arange(rows.shape[1], dtype=np.int64)) if rows.size else np.zeros(0, np.int64)
    out = np.zeros(1, dtype=np.int64)
    for r in rows:
        v = int((r.astype(np.int64) * weights).sum())
        out = np.union1d(out, out ^ v)
    return out


def _as_int(bits: np.ndarray) -> int:
    return int(sum(int(b) << q for q, b in enumerate(bits)))


def code_state_vector(hx: np.ndarray, n: int, bx, alpha, beta, r0=None, ex=None, ez=None) -> np.ndarray:
    """Dense state vector of alpha |0_L> + beta |1_L> under X^ex Z^ez (qubit q = bit q)."""
    zero = np.zeros(n, dtype=np.uint8)
    r0 = zero if r0 is None else np.asarray(r0)
    ex = zero if ex is None else np.asarray(ex)
    ez = zero if ez is None else np.asarray(ez)
    sx = _span_ints(np.asarray(hx, dtype=np.uint8))
    psi = np.zeros(1 << n, dtype=complex)
    a0 = _as_int(r0)
    a1 = a0 ^ _as_int(bx)
    psi[sx ^ a0] += alpha / np.sqrt(len(sx))
    psi[sx ^ a1] += beta / np.sqrt(len(sx))
    idx = np.arange(1 << n, dtype=np.int64)
    zmask = _as_int(ez)
    sign = 1 - 2 * (np.bitwise_count(idx & zmask).astype(np.int64) & 1)
    psi = psi * sign
    return psi[idx ^ _as_int(ex)]


def hadamard_all(psi: np.ndarray, n: int) -> np.ndarray:
    """Apply H to every qubit by in-place butterflies."""
    out = psi.copy()
    h = 1
    while h < len(out):
        v = out.reshape(-1, 2, h)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = a + b
        v[:, 1, :] = a - b
        h *= 2
    return out / np.sqrt(len(out)) if n else out


def cell_masses_dense(probs: np.ndarray, n: int, checks: np.ndarray, logical) -> tuple[float, float, float]:
    """(cell 0, cell 1, elsewhere) masses: kernel of ``checks`` split by pairing with ``logical``."""
    idx = np.nonzero(probs > 1e-15)[0]
    bits = ((idx[:, None] >> np.arange(n)) & 1).astype(np.int64)
    ok = np.all(bits @ np.asarray(checks, dtype=np.int64).T % 2 == 0, axis=1)
    par = bits @ np.asarray(logical, dtype=np.int64) % 2
    p = probs[idx]
    return float(p[ok & (par == 0)].sum()), float(p[ok & (par == 1)].sum()), float(p[~ok].sum())
