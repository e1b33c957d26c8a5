"""Circuit builders for the instruction families.

Builders append gates to a :class:`Workspace`.  They assume destination
qubits start in |0>; the compiler driver enforces that before calling them.
Ancillas are borrowed from the register file and handed back clean, either
uncomputed (coherent mode) or reset (reset mode).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..circuit import Gate, QuantumCircuit, RegisterFile
from ..errors import OverlappingRanges

Qubits = Sequence[int]


@dataclass
class Workspace:
    circuit: QuantumCircuit
    regs: RegisterFile
    coherent: bool = False

    def emit(self, gate: Gate) -> None:
        self.circuit.append(gate)

    def x(self, *qubits: int) -> None:
        for q in qubits:
            self.emit(Gate.x(q))

    def h(self, *qubits: int) -> None:
        for q in qubits:
            self.emit(Gate.h(q))

    def cx(self, control: int, target: int) -> None:
        self.emit(Gate.cx(control, target))

    def mct(self, controls: Iterable[int], target: int, negated: Iterable[int] = ()) -> None:
        self.emit(Gate.mct(controls, target, negated))

    def swap(self, a: int, b: int) -> None:
        self.emit(Gate.swap(a, b))

    def reset(self, *qubits: int) -> None:
        for q in qubits:
            self.emit(Gate.reset(q))

    def borrow(self, count: int) -> list[int]:
        return self.regs.borrow(self.circuit, count)

    def release(self, qubits: Iterable[int]) -> None:
        self.regs.release(qubits)

    def constant(self, value: int, width: int) -> list[int]:
        """Borrow `width` ancillas holding the classical `value`."""
        qs = self.borrow(width)
        self.x(*(q for i, q in enumerate(qs) if (value >> i) & 1))
        return qs

    def drop_constant(self, qubits: Qubits, value: int) -> None:
        self.x(*(q for i, q in enumerate(qubits) if (value >> i) & 1))
        self.release(qubits)

    def copy(self, src: Qubits) -> list[int]:
        """Borrow ancillas and CX-copy `src` into them (basis-state copy)."""
        qs = self.borrow(len(src))
        for s, d in zip(src, qs):
            self.cx(s, d)
        return qs

    def drop_copy(self, src: Qubits, qubits: Qubits) -> None:
        for s, d in zip(src, qubits):
            self.cx(s, d)
        self.release(qubits)


def require_disjoint(*ranges: Qubits) -> None:
    seen: set[int] = set()
    for r in ranges:
        if r is None:
            continue
        overlap = seen.intersection(r)
        if overlap:
            raise OverlappingRanges(f"qubit ranges overlap on {sorted(overlap)}")
        seen.update(r)
