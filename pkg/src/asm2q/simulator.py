"""Dense statevector simulator with reset, measurement and shot sampling.

Qubit ``q`` is bit ``q`` of the flat amplitude index (qubit 0 is the least
significant).  Internally the amplitudes are viewed as an ``(2,) * n`` tensor
in C order, so qubit ``q`` lives on axis ``n - 1 - q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circuit import Gate, GateKind, QuantumCircuit
from .errors import TooManyQubits

MAX_QUBITS = 24
# Collapse probabilities below this are treated as exactly zero.
ZERO_TOL = 1e-12
_SQRT1_2 = 1.0 / np.sqrt(2.0)


class StateVector:
    """Complex amplitudes of an n-qubit pure state."""

    def __init__(self, num_qubits: int, basis: int = 0):
        if num_qubits > MAX_QUBITS:
            raise TooManyQubits(
                f"{num_qubits} qubits exceed the dense simulator cap of {MAX_QUBITS}"
            )
        self.num_qubits = num_qubits
        self.amplitudes = np.zeros(2**num_qubits, dtype=np.complex128)
        self.amplitudes[basis] = 1.0

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(round(np.log2(len(amps))))
        if 2**n != len(amps):
            raise ValueError("amplitude count must be a power of two")
        state = cls(n)
        state.amplitudes[:] = amps
        return state

    def copy(self) -> "StateVector":
        other = StateVector.__new__(StateVector)
        other.num_qubits = self.num_qubits
        other.amplitudes = self.amplitudes.copy()
        return other

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def index(self, fixed: Mapping[int, int]) -> tuple:
        idx: list = [slice(None)] * self.num_qubits
        for q, v in fixed.items():
            idx[self.num_qubits - 1 - q] = v
        return tuple(idx)

    def probability_one(self, qubit: int) -> float:
        half = self.tensor()[self.index({qubit: 1})]
        return float(np.sum(half.real**2 + half.imag**2))

    def basis_value(self, qubits: Sequence[int], index: int) -> int:
        return sum(((index >> q) & 1) << i for i, q in enumerate(qubits))


def _fixed_controls(gate: Gate) -> dict[int, int]:
    fixed = {c: 1 for c in gate.controls}
    fixed.update({c: 0 for c in gate.negated_controls})
    return fixed


def apply_gate(state: StateVector, gate: Gate) -> None:
    """Apply a unitary gate in place.  Barriers are the identity."""
    kind = gate.kind
    if kind is GateKind.BARRIER:
        return
    t = state.tensor()
    if kind in (GateKind.X, GateKind.CX, GateKind.MCT):
        fixed = _fixed_controls(gate)
        i0 = state.index({**fixed, gate.target: 0})
        i1 = state.index({**fixed, gate.target: 1})
        tmp = t[i0].copy()
        t[i0] = t[i1]
        t[i1] = tmp
    elif kind is GateKind.H:
        i0 = state.index({gate.target: 0})
        i1 = state.index({gate.target: 1})
        a = t[i0].copy()
        b = t[i1].copy()
        t[i0] = (a + b) * _SQRT1_2
        t[i1] = (a - b) * _SQRT1_2
    elif kind in (GateKind.Z, GateKind.MCZ):
        fixed = _fixed_controls(gate)
        t[state.index({**fixed, gate.target: 1})] *= -1
    elif kind is GateKind.SWAP:
        i01 = state.index({gate.target: 0, gate.partner: 1})
        i10 = state.index({gate.target: 1, gate.partner: 0})
        tmp = t[i01].copy()
        t[i01] = t[i10]
        t[i10] = tmp
    else:
        raise ValueError(f"{kind.name} is not unitary; use apply_reset/apply_measure")


def _collapse(state: StateVector, qubit: int, rng) -> int:
    p1 = state.probability_one(qubit)
    if p1 < ZERO_TOL:
        outcome = 0
    elif 1.0 - p1 < ZERO_TOL:
        outcome = 1
    else:
        if rng is None:
            raise ValueError("a random generator is needed for a non-deterministic collapse")
        outcome = int(rng.random() < p1)
    t = state.tensor()
    discard = state.index({qubit: 1 - outcome})
    keep = p1 if outcome else 1.0 - p1
    if 1.0 - keep < ZERO_TOL:
        # certain outcome: the discarded half is already (numerically) empty
        t[discard] = 0.0
        return outcome
    t[discard] = 0.0
    state.amplitudes /= np.sqrt(keep)
    return outcome


def apply_reset(state: StateVector, qubit: int, rng=None) -> int:
    """Project `qubit` onto a sampled outcome and return it to |0>.

    Returns the sampled outcome of the projection (before the correcting X).
    """
    outcome = _collapse(state, qubit, rng)
    if outcome:
        apply_gate(state, Gate.x(qubit))
    return outcome


def apply_measure(state: StateVector, qubit: int, clbit: int, record, rng=None) -> int:
    outcome = _collapse(state, qubit, rng)
    record[clbit] = outcome
    return outcome


def _is_deterministic(state: StateVector, qubit: int) -> bool:
    p1 = state.probability_one(qubit)
    return p1 < ZERO_TOL or 1.0 - p1 < ZERO_TOL


def _step(state: StateVector, gate: Gate, record, rng) -> None:
    if gate.kind is GateKind.RESET:
        apply_reset(state, gate.target, rng)
    elif gate.kind is GateKind.MEASURE:
        apply_measure(state, gate.target, gate.clbit, record, rng)
    else:
        apply_gate(state, gate)


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Independent, schedule-free random stream for one shot."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(shot,)))


def simulate(circuit: QuantumCircuit, initial: int = 0, seed: int = 0,
             shot: int = 0) -> tuple[StateVector, np.ndarray]:
    """Run a single trajectory and return (final state, classical record)."""
    state = StateVector(circuit.qubit_count, basis=initial)
    record = np.zeros(circuit.classical_bit_count, dtype=np.int8)
    rng = shot_rng(seed, shot)
    for gate in circuit.gates:
        _step(state, gate, record, rng)
    return state, record


@dataclass
class Histogram:
    counts: dict[str, int]
    shots: int
    layout: tuple[tuple[str, int], ...] = field(default=())

    def sorted_items(self) -> list[tuple[str, int]]:
        """Descending by count, ties broken by bitstring."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def probability(self, key: str) -> float:
        return self.counts.get(key, 0) / self.shots

    def values(self, key: str) -> dict[str, int]:
        """Decimal reading of every classical register within one key."""
        out = {}
        pos = 0
        for name, width in self.layout:
            chunk = key[pos:pos + width]
            out[name] = int(chunk, 2) if chunk else 0
            pos += width
        return out


def _layout(circuit: QuantumCircuit,
            registers: Mapping[str, Sequence[int]] | None) -> list[tuple[str, tuple[int, ...]]]:
    if registers:
        return [(name, tuple(bits)) for name, bits in registers.items()]
    if circuit.classical_bit_count:
        return [("c", tuple(range(circuit.classical_bit_count)))]
    return []


def _key(record, layout) -> str:
    return "".join(
        "".join(str(int(record[b])) for b in reversed(bits)) for _, bits in layout
    )


def run(circuit: QuantumCircuit, shots: int = 1024, seed: int = 0,
        registers: Mapping[str, Sequence[int]] | None = None,
        initial: int = 0) -> Histogram:
    """Sample `shots` executions and histogram the classical registers.

    Keys concatenate the registers in `registers` order, each most
    significant bit first.  Execution is shared across shots for as long as
    every reset/measurement is deterministic; trailing measurements are
    sampled from the final distribution.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    layout = _layout(circuit, registers)
    state = StateVector(circuit.qubit_count, basis=initial)
    record = np.zeros(circuit.classical_bit_count, dtype=np.int8)
    gates = circuit.gates
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind in (GateKind.RESET, GateKind.MEASURE) and not _is_deterministic(state, g.target):
            break
        _step(state, g, record, None)
        i += 1

    hist_layout = tuple((name, len(bits)) for name, bits in layout)
    if i == len(gates):
        return Histogram({_key(record, layout): shots}, shots, hist_layout)

    counts: dict[str, int] = {}
    rest = gates[i:]
    if all(g.kind in (GateKind.MEASURE, GateKind.BARRIER) for g in rest):
        cumulative = np.cumsum(state.probabilities())
        cumulative /= cumulative[-1]
        measures = [g for g in rest if g.kind is GateKind.MEASURE]
        for shot in range(shots):
            idx = int(np.searchsorted(cumulative, shot_rng(seed, shot).random(), side="right"))
            idx = min(idx, len(cumulative) - 1)
            rec = record.copy()
            for g in measures:
                rec[g.clbit] = (idx >> g.target) & 1
            key = _key(rec, layout)
            counts[key] = counts.get(key, 0) + 1
    else:
        for shot in range(shots):
            s = state.copy()
            rec = record.copy()
            rng = shot_rng(seed, shot)
            for g in rest:
                _step(s, g, rec, rng)
            key = _key(rec, layout)
            counts[key] = counts.get(key, 0) + 1
    return Histogram(counts, shots, hist_layout)


def unitary_columns(circuit: QuantumCircuit, basis_states: Iterable[int] | None = None) -> np.ndarray:
    """Matrix whose column k is the circuit applied to basis state k (unitary circuits)."""
    n = circuit.qubit_count
    cols = list(range(2**n)) if basis_states is None else list(basis_states)
    out = np.zeros((2**n, len(cols)), dtype=np.complex128)
    for j, k in enumerate(cols):
        state = StateVector(n, basis=k)
        for g in circuit.gates:
            apply_gate(state, g)
        out[:, j] = state.amplitudes
    return out
