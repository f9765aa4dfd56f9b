"""Layered circuits of 1- and 2-qubit gates, exact simulation and light cones."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from hgpnlets.errors import TooManyQubitsError

MAX_SIM_QUBITS = 20
UNITARY_TOL = 1e-10

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    qubits: tuple[int, ...]
    unitary: np.ndarray

    def __post_init__(self):
        q = tuple(int(x) for x in self.qubits)
        u = np.asarray(self.unitary, dtype=complex)
        if len(q) not in (1, 2) or len(set(q)) != len(q):
            raise ValueError(f"gate must act on 1 or 2 distinct qubits, got {q}")
        dim = 2 ** len(q)
        if u.shape != (dim, dim):
            raise ValueError(f"unitary shape {u.shape} does not match {len(q)} qubits")
        if not np.allclose(u.conj().T @ u, np.eye(dim), atol=UNITARY_TOL):
            raise ValueError("gate matrix is not unitary")
        object.__setattr__(self, "qubits", q)
        object.__setattr__(self, "unitary", u)


@dataclass(frozen=True)
class Circuit:
    """``n`` qubits and a list of layers; a layer is a list of disjoint gates."""

    n: int
    layers: tuple[tuple[Gate, ...], ...]

    def __init__(self, n: int, layers):
        frozen = []
        for li, layer in enumerate(layers):
            used: set[int] = set()
            gates = []
            for g in layer:
                if any(not 0 <= q < n for q in g.qubits):
                    raise ValueError(f"layer {li}: qubit out of range in {g.qubits}")
                if used & set(g.qubits):
                    raise ValueError(f"layer {li}: qubit used twice")
                used |= set(g.qubits)
                gates.append(g)
            frozen.append(tuple(gates))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "layers", tuple(frozen))

    @property
    def depth(self) -> int:
        return len(self.layers)


def _apply(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    k = len(gate.qubits)
    u = gate.unitary.reshape((2,) * (2 * k))
    state = np.tensordot(u, state, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    # tensordot puts the gate's output axes first; move them back
    return np.moveaxis(state, list(range(k)), list(gate.qubits))


def statevector(c: Circuit) -> np.ndarray:
    """Amplitudes of ``U|0^n>``; qubit 0 is the most significant index bit."""
    if c.n > MAX_SIM_QUBITS:
        raise TooManyQubitsError(f"{c.n} qubits exceed simulator cap {MAX_SIM_QUBITS}")
    state = np.zeros((2,) * c.n, dtype=complex)
    state[(0,) * c.n] = 1.0
    for layer in c.layers:
        for g in layer:
            state = _apply(state, g, c.n)
    return state.reshape(-1)


def simulate(c: Circuit, keep: int | None = None):
    """Exact output distribution of the first ``keep`` qubits."""
    from hgpnlets.expansion import Distribution

    keep = c.n if keep is None else keep
    if not 0 <= keep <= c.n:
        raise ValueError(f"keep={keep} outside [0, {c.n}]")
    probs = np.abs(statevector(c)) ** 2
    probs = probs.reshape(2**keep, -1).sum(axis=1)
    return Distribution.from_dense(keep, probs, msb_first=True)


@dataclass(frozen=True)
class LightConeReport:
    cones: tuple[frozenset[int], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cones)

    @property
    def blow_up(self) -> int:
        return max(self.sizes) if self.cones else 1


def light_cones(c: Circuit, outputs: int | None = None) -> LightConeReport:
    """Input qubits each output depends on, by walking the layers backwards."""
    outputs = c.n if outputs is None else outputs
    cones = []
    for q in range(outputs):
        cone = {q}
        for layer in reversed(c.layers):
            for g in layer:
                if cone.intersection(g.qubits):
                    cone.update(g.qubits)
        cones.append(frozenset(cone))
    return LightConeReport(tuple(cones))


def cat_circuit(n: int) -> Circuit:
    """H on qubit 0 then a CNOT chain, one gate per layer."""
    layers = [[Gate((0,), H)]] + [[Gate((i, i + 1), CNOT)] for i in range(n - 1)]
    return Circuit(n, layers)


def random_brickwork(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    """Layers of Haar-random 2-qubit gates on a random perfect-ish matching."""
    layers = []
    for _ in range(depth):
        perm = rng.permutation(n)
        gates = []
        for a in range(0, n - 1, 2):
            u = unitary_group.rvs(4, random_state=rng)
            gates.append(Gate((int(perm[a]), int(perm[a + 1])), u))
        if n % 2:
            gates.append(Gate((int(perm[-1]),), unitary_group.rvs(2, random_state=rng)))
        layers.append(gates)
    return Circuit(n, layers)


def random_product(n: int, rng: np.random.Generator) -> Circuit:
    return Circuit(n, [[Gate((q,), unitary_group.rvs(2, random_state=rng)) for q in range(n)]])
