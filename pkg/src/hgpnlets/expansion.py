"""Vertex expansion of distributions over F_2^n and the bounds built on it.

Words are integer codes with bit ``i`` holding position ``i``; bit strings
print position 0 first.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from hgpnlets.circuits import Circuit, light_cones, random_brickwork, random_product, simulate
from hgpnlets.errors import InvalidMuError, NoValidCandidateError, SetTooImplicitError
from hgpnlets.gf2 import BitVector

MASS_TOL = 1e-10
MAX_DENSE_N = 20
MAX_EXACT_N = 4
GAMMA_GRID = (0.0, 0.125, 0.25, 0.375, 0.5)


def _reverse_bits(codes: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(codes)
    for j in range(n):
        out |= ((codes >> (n - 1 - j)) & 1) << j
    return out


def code_to_str(code: int, n: int) -> str:
    return "".join("1" if (code >> i) & 1 else "0" for i in range(n))


def str_to_code(s: str) -> int:
    return sum(1 << i for i, ch in enumerate(s) if ch == "1")


@dataclass
class Distribution:
    n: int
    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int64)
        self.masses = np.asarray(self.masses, dtype=np.float64)
        if self.points.shape != self.masses.shape:
            raise ValueError("points and masses differ in shape")
        if np.unique(self.points).size != self.points.size:
            raise ValueError("support points must be distinct")
        if np.any(self.masses <= 0):
            raise ValueError("masses must be positive")
        if abs(self.masses.sum() - 1) > MASS_TOL:
            raise ValueError(f"masses sum to {self.masses.sum()}")

    @classmethod
    def from_dense(cls, n: int, probs: np.ndarray, msb_first: bool = False, floor: float = 1e-15) -> Distribution:
        probs = np.asarray(probs, dtype=np.float64)
        idx = np.flatnonzero(probs > floor)
        masses = probs[idx] / probs[idx].sum()
        codes = idx.astype(np.int64)
        if msb_first:
            codes = _reverse_bits(codes, n)
        order = np.argsort(codes)
        return cls(n, codes[order], masses[order])

    @classmethod
    def from_dict(cls, n: int, d: dict[str, float]) -> Distribution:
        pts = [str_to_code(k) for k in d]
        return cls(n, np.array(pts, dtype=np.int64), np.array(list(d.values()), dtype=np.float64))

    @classmethod
    def uniform(cls, n: int) -> Distribution:
        return cls(n, np.arange(1 << n), np.full(1 << n, 1 / (1 << n)))

    def to_dict(self) -> dict[str, float]:
        return {code_to_str(int(p), self.n): float(m) for p, m in zip(self.points, self.masses)}

    def dense(self) -> np.ndarray:
        if self.n > MAX_DENSE_N:
            raise SetTooImplicitError(f"n={self.n} too large for a dense table")
        out = np.zeros(1 << self.n)
        out[self.points] = self.masses
        return out

    def mass_of(self, indicator: np.ndarray) -> float:
        return float(self.masses[indicator[self.points]].sum())

    def marginal(self, keep: Sequence[int]) -> Distribution:
        keep = list(keep)
        codes = np.zeros_like(self.points)
        for j, q in enumerate(keep):
            codes |= ((self.points >> q) & 1) << j
        uniq, inv = np.unique(codes, return_inverse=True)
        masses = np.bincount(inv, weights=self.masses)
        return Distribution(len(keep), uniq, masses / masses.sum())

    def support_vectors(self) -> list[BitVector]:
        return [BitVector.from_str(code_to_str(int(p), self.n)) for p in self.points]


@dataclass(frozen=True)
class Ball:
    center: int
    radius: int


def indicator(n: int, S) -> np.ndarray:
    """Boolean table over F_2^n for an explicit set, a ball or a predicate."""
    if n > MAX_DENSE_N:
        raise SetTooImplicitError(f"n={n} too large for a membership table")
    if isinstance(S, np.ndarray) and S.dtype == bool and S.size == 1 << n:
        return S
    words = np.arange(1 << n, dtype=np.int64)
    if isinstance(S, Ball):
        return np.bitwise_count(words ^ S.center) <= S.radius
    if callable(S):
        return np.asarray(S(words), dtype=bool)
    out = np.zeros(1 << n, dtype=bool)
    idx = np.fromiter((int(x) for x in S), dtype=np.int64)
    out[idx] = True
    return out


def _dilate(ind: np.ndarray, n: int, steps: int) -> np.ndarray:
    words = np.arange(ind.size, dtype=np.int64)
    cur = ind
    for _ in range(min(steps, n)):
        nxt = cur.copy()
        for i in range(n):
            nxt |= cur[words ^ (1 << i)]
        cur = nxt
    return cur


def boundary_indicator(ind: np.ndarray, n: int, ell: float) -> np.ndarray:
    """Points of S with a non-member within ``ell`` plus non-members within ``ell`` of S."""
    r = int(math.floor(ell + 1e-12))
    if r <= 0:
        return np.zeros_like(ind)
    inner = ind & _dilate(~ind, n, r)
    outer = ~ind & _dilate(ind, n, r)
    return inner | outer


def boundary_mass(p: Distribution, S, ell: float) -> float:
    """p-mass of the radius-``ell`` vertex boundary of S.

    Distances are integers, so a real radius acts as ``floor(ell)``.
    """
    if isinstance(S, Ball) and p.n > MAX_DENSE_N:
        d = np.bitwise_count(p.points ^ S.center).astype(np.int64)
        r = int(math.floor(ell + 1e-12))
        inside = d <= S.radius
        inner = inside & (np.minimum(d + r, p.n) > S.radius)
        outer = ~inside & (d - S.radius <= r)
        return float(p.masses[inner | outer].sum())
    ind = indicator(p.n, S)
    return p.mass_of(boundary_indicator(ind, p.n, ell))


@dataclass(frozen=True)
class ExpansionResult:
    ratio: float
    index: int
    set_mass: float
    boundary: float


def expansion_upper(p: Distribution, candidates: Sequence, ell: float) -> ExpansionResult:
    """Min of boundary mass over set mass across candidates with 0 < p(S) <= 1/2."""
    best = None
    for i, S in enumerate(candidates):
        ind = indicator(p.n, S)
        ps = p.mass_of(ind)
        if not (ps > MASS_TOL and ps <= 0.5 + MASS_TOL):
            continue
        b = p.mass_of(boundary_indicator(ind, p.n, ell))
        r = b / ps
        if best is None or r < best.ratio:
            best = ExpansionResult(r, i, ps, b)
    if best is None:
        raise NoValidCandidateError("no candidate has mass in (0, 1/2]")
    return best


def exact_expansion(p: Distribution, ell: float) -> ExpansionResult:
    """Exact h_ell by sweeping every subset of F_2^n (n <= 4)."""
    n = p.n
    if n > MAX_EXACT_N:
        raise SetTooImplicitError(f"exact sweep limited to n <= {MAX_EXACT_N}")
    size = 1 << n
    r = int(math.floor(ell + 1e-12))
    words = np.arange(size)
    balls = [int(sum(1 << int(y) for y in words[np.bitwise_count(words ^ x) <= r])) for x in range(size)]
    subsets = np.arange(1, 1 << size, dtype=np.int64)
    dense = p.dense()
    mass = np.zeros(subsets.size)
    bnd = np.zeros(subsets.size)
    for x in range(size):
        inside = (subsets >> x) & 1
        mass += inside * dense[x]
        if r == 0:
            continue
        ball = balls[x]
        eroded = (subsets & ball) == ball
        touches = (subsets & ball) != 0
        on = np.where(inside == 1, ~eroded, touches)
        bnd += on * dense[x]
    ok = (mass > MASS_TOL) & (mass <= 0.5 + MASS_TOL)
    if not ok.any():
        raise NoValidCandidateError("no subset has mass in (0, 1/2]")
    ratio = np.where(ok, bnd / np.where(ok, mass, 1), np.inf)
    i = int(np.argmin(ratio))
    return ExpansionResult(float(ratio[i]), int(subsets[i]), float(mass[i]), float(bnd[i]))


# --------------------------------------------------------------------------
# closed-form bounds


def theorem_vertex_bound(n: int, B: float, gamma: float) -> tuple[float, float]:
    """(ell, bound) with ell = B (Bn)^(1/2 - gamma) / 4 and bound = (nB)^(-2 gamma) / 8."""
    if not 0 <= gamma <= 0.5:
        raise ValueError("gamma must lie in [0, 1/2]")
    ell = 0.25 * B * (B * n) ** (0.5 - gamma)
    bound = (n * B) ** (-2 * gamma) / 8
    return ell, bound


def chebyshev_degree(n: int, B: float, gamma: float) -> int:
    return max(1, math.ceil(0.5 * (B * n) ** (0.5 - gamma)))


def proof_radius(n: int, B: int, gamma: float) -> int:
    """Radius B * m reached by a degree-m polynomial in a B-local operator."""
    return B * chebyshev_degree(n, B, gamma)


def _check_mu(mu: float) -> None:
    if not 0 < mu <= 0.5:
        raise InvalidMuError(f"mu={mu} outside (0, 1/2]")


def partition_distance_bound(mu: float, B: float, n: int) -> float:
    """4 sqrt(n) B^1.5 / mu."""
    _check_mu(mu)
    return 4 * math.sqrt(n) * B**1.5 / mu


def depth_lower_bound(mu: float, D: float, n: int) -> float:
    """(2/3) log2(mu D / (4 sqrt n))."""
    _check_mu(mu)
    if D > n:
        raise ValueError(f"distance D={D} exceeds n={n}")
    return (2 / 3) * math.log2(mu * D / (4 * math.sqrt(n)))


def gamma_depth_bound(mu: float, D: float, n: int, gamma: float) -> dict:
    """Smallest blow-up B compatible with a (mu, D) partition at a given gamma.

    Peeling radius-ell shells off one cell gives a set whose boundary mass is
    at most (1 - 2 mu) 2 ell / D of its mass, so the vertex bound can only
    hold when D <= 2 ell(B) (1 + 8 (1 - 2 mu)(nB)^(2 gamma) / mu).  The
    smallest real B >= 1 meeting this gives depth >= log2 B.
    """
    _check_mu(mu)

    def reach(B: float) -> float:
        ell, _ = theorem_vertex_bound(n, B, gamma)
        return 2 * ell * (1 + 8 * (1 - 2 * mu) * (n * B) ** (2 * gamma) / mu)

    lo, hi = 1.0, 1.0
    if reach(lo) >= D:
        return {"gamma": gamma, "B_min": 1.0, "depth_lb": 0.0}
    while reach(hi) < D:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if reach(mid) >= D:
            hi = mid
        else:
            lo = mid
    return {"gamma": gamma, "B_min": hi, "depth_lb": math.log2(hi)}


def chebyshev(m: int, x: float) -> float:
    """T_m(x): three-term recurrence on [-1, 1], cosh form outside."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    if abs(x) > 1:
        sign = 1.0 if x > 0 or m % 2 == 0 else -1.0
        return sign * math.cosh(m * math.acosh(abs(x)))
    t0, t1 = 1.0, x
    if m == 0:
        return t0
    for _ in range(m - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


def _log_cosh(a: float) -> float:
    return a + math.log1p(math.exp(-2 * a)) - math.log(2)


def cheb_ratio(m: int, y: float, y0: float) -> float:
    """T_m(y) / T_m(y0) for y0 > 1 without overflow."""
    a0 = m * math.acosh(y0)
    if abs(y) <= 1:
        return chebyshev(m, y) * math.exp(-_log_cosh(a0))
    sign = 1.0 if y > 0 or m % 2 == 0 else -1.0
    a = m * math.acosh(abs(y))
    return sign * math.exp(_log_cosh(a) - _log_cosh(a0))


def cheb_filter(m: int, L: int, x: float) -> float:
    """C_m(x) = 1 - T_m(f(x)) / T_m(f(0)) with f(x) = (1 + 1/L - 2x)/(1 - 1/L)."""
    if L < 2:
        raise ValueError("L must be at least 2")
    if m < 1:
        raise ValueError("degree must be at least 1")

    def f(t: float) -> float:
        return (1 + 1 / L - 2 * t) / (1 - 1 / L)

    if x == 0:
        return 0.0
    return 1 - cheb_ratio(m, f(x), f(0.0))


@dataclass
class ChebProfile:
    m: int
    L: int
    at_zero: float
    min_gap: float
    max_value: float
    min_value: float
    gap_target: float
    at_threshold: float

    @property
    def ok(self) -> bool:
        return (
            self.at_zero == 0.0
            and self.min_value >= -1e-12
            and self.max_value <= 2 + 1e-12
            and self.min_gap >= self.gap_target
        )


def cheb_operatorless_profile(
    m: int | None, L_size: int | None, n: int, B: int, gamma: float, samples: int = 10_000
) -> ChebProfile:
    """Sample C_m on [0, 1]; defaults m = ceil((Bn)^(1/2 - gamma)/2) and |L| = nB."""
    m = chebyshev_degree(n, B, gamma) if m is None else m
    L = n * B if L_size is None else L_size
    xs = np.unique(np.concatenate([np.linspace(0, 1, samples), [1 / L]]))
    vals = np.array([cheb_filter(m, L, float(x)) for x in xs])
    hi = xs >= 1 / L
    return ChebProfile(
        m=m,
        L=L,
        at_zero=cheb_filter(m, L, 0.0),
        min_gap=float(vals[hi].min()),
        max_value=float(vals.max()),
        min_value=float(vals.min()),
        gap_target=0.25 * (n * B) ** (-2 * gamma),
        at_threshold=cheb_filter(m, L, 1 / L),
    )


# --------------------------------------------------------------------------
# empirical checks


def candidate_sets(p: Distribution, rng: np.random.Generator, centers: int = 6, randoms: int = 6) -> list:
    """Hamming balls, greedy accretion prefixes and random subsets of the support."""
    n = p.n
    order = np.argsort(-p.masses)
    cands: list = []
    for c in p.points[order[:centers]]:
        c = int(c)
        for r in range(n + 1):
            cands.append(Ball(c, r))
        # accretion: nearest points first, heavier first within a shell
        d = np.bitwise_count(p.points ^ c)
        seq = np.lexsort((-p.masses, d))
        cum = np.cumsum(p.masses[seq])
        for target in np.arange(1, 9) / 16:
            k = int(np.searchsorted(cum, target, side="right"))
            if k > 0:
                cands.append(p.points[seq[:k]])
    for _ in range(randoms):
        perm = rng.permutation(p.points.size)
        cum = np.cumsum(p.masses[perm])
        k = int(np.searchsorted(cum, rng.uniform(0.05, 0.5), side="right"))
        if k > 0:
            cands.append(p.points[perm[:k]])
    return cands


@dataclass
class GammaCheck:
    gamma: float
    ell: float
    radius: int
    bound: float
    min_ratio: float | None
    degenerate: bool
    violated: bool
    proof_radius: int
    proof_min_ratio: float | None
    proof_violated: bool


@dataclass
class TrialReport:
    seed: int
    n: int
    depth: int
    blow_up: int
    exact: bool
    checks: list[GammaCheck] = field(default_factory=list)


def _min_ratio(p: Distribution, cands: list, ell: float, exact: bool) -> float | None:
    if ell < 1:
        return None
    if exact:
        return exact_expansion(p, ell).ratio
    try:
        return expansion_upper(p, cands, ell).ratio
    except NoValidCandidateError:
        return None


def vertex_trial(c: Circuit, gammas: Sequence[float], rng: np.random.Generator, seed: int = 0) -> TrialReport:
    p = simulate(c)
    B = light_cones(c).blow_up
    exact = p.n <= MAX_EXACT_N
    cands = [] if exact else candidate_sets(p, rng)
    rep = TrialReport(seed=seed, n=p.n, depth=c.depth, blow_up=B, exact=exact)
    for g in gammas:
        ell, bound = theorem_vertex_bound(p.n, B, g)
        radius = int(math.floor(ell + 1e-12))
        degenerate = radius < 1
        mr = _min_ratio(p, cands, ell, exact)
        pr = proof_radius(p.n, B, g)
        pmr = _min_ratio(p, cands, pr, exact)
        rep.checks.append(
            GammaCheck(
                gamma=g,
                ell=ell,
                radius=radius,
                bound=bound,
                min_ratio=mr,
                degenerate=degenerate,
                violated=(not degenerate) and mr is not None and mr < bound - 1e-12,
                proof_radius=pr,
                proof_min_ratio=pmr,
                proof_violated=pmr is not None and pmr < bound - 1e-12,
            )
        )
    return rep


def empirical_vertex_theorem(
    trials: int, n: int = 10, depth: int = 2, gammas: Sequence[float] = GAMMA_GRID, seed: int = 0
) -> dict:
    """Random circuits checked against the vertex-expansion lower bound.

    Radii below 1 make every boundary empty; such (trial, gamma) pairs are
    counted as degenerate rather than tested.
    """
    if n > 12 or depth > 3:
        raise ValueError("empirical trials limited to n <= 12, depth <= 3")
    reports = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        c = random_product(n, rng) if depth == 0 else random_brickwork(n, depth, rng)
        reports.append(vertex_trial(c, gammas, rng, seed=t))
    checks = [ch for r in reports for ch in r.checks]
    return {
        "trials": trials,
        "n": n,
        "depth": depth,
        "gammas": list(gammas),
        "violations": sum(ch.violated for ch in checks),
        "proof_radius_violations": sum(ch.proof_violated for ch in checks),
        "degenerate": sum(ch.degenerate for ch in checks),
        "tested": sum((not ch.degenerate) and ch.min_ratio is not None for ch in checks),
        "max_blow_up": max(r.blow_up for r in reports) if reports else 0,
        "reports": reports,
    }
