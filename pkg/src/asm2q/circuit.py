"""Gate-list circuit IR, register allocation, and segment inversion.

Qubit 0 of a register is its least significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import DuplicateRegister, IndexOutOfRange, NotInvertible


class GateKind(str, Enum):
    X = "x"
    H = "h"
    Z = "z"
    CX = "cx"
    SWAP = "swap"
    MCT = "mct"
    MCZ = "mcz"
    RESET = "reset"
    MEASURE = "measure"
    BARRIER = "barrier"


SELF_INVERSE = frozenset(
    {GateKind.X, GateKind.H, GateKind.Z, GateKind.CX, GateKind.SWAP,
     GateKind.MCT, GateKind.MCZ, GateKind.BARRIER}
)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int | None = None
    controls: tuple[int, ...] = ()
    negated_controls: tuple[int, ...] = ()
    partner: int | None = None
    clbit: int | None = None

    @classmethod
    def x(cls, target: int) -> "Gate":
        return cls(GateKind.X, target)

    @classmethod
    def h(cls, target: int) -> "Gate":
        return cls(GateKind.H, target)

    @classmethod
    def z(cls, target: int) -> "Gate":
        return cls(GateKind.Z, target)

    @classmethod
    def cx(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CX, target, (control,))

    @classmethod
    def swap(cls, a: int, b: int) -> "Gate":
        return cls(GateKind.SWAP, a, partner=b)

    @classmethod
    def mct(cls, controls: Iterable[int], target: int,
            negated: Iterable[int] = ()) -> "Gate":
        return cls(GateKind.MCT, target, tuple(controls), tuple(negated))

    @classmethod
    def mcz(cls, controls: Iterable[int], target: int) -> "Gate":
        return cls(GateKind.MCZ, target, tuple(controls))

    @classmethod
    def reset(cls, target: int) -> "Gate":
        return cls(GateKind.RESET, target)

    @classmethod
    def measure(cls, target: int, clbit: int) -> "Gate":
        return cls(GateKind.MEASURE, target, clbit=clbit)

    @classmethod
    def barrier(cls) -> "Gate":
        return cls(GateKind.BARRIER)

    @property
    def all_controls(self) -> tuple[int, ...]:
        return self.controls + self.negated_controls

    def qubits(self) -> tuple[int, ...]:
        """Every qubit index the gate references (barriers reference none)."""
        if self.kind is GateKind.BARRIER:
            return ()
        extra = (self.partner,) if self.partner is not None else ()
        return self.all_controls + (self.target,) + extra

    def written(self) -> tuple[int, ...]:
        """Qubits whose state the gate may change."""
        if self.kind in (GateKind.BARRIER, GateKind.MEASURE):
            return ()
        if self.kind is GateKind.SWAP:
            return (self.target, self.partner)
        return (self.target,)


@dataclass
class QuantumCircuit:
    qubit_count: int = 0
    classical_bit_count: int = 0
    gates: list[Gate] = field(default_factory=list)
    labels: dict[int, str] = field(default_factory=dict)

    def add_qubits(self, count: int, label: str | None = None) -> tuple[int, ...]:
        start = self.qubit_count
        self.qubit_count += count
        new = tuple(range(start, start + count))
        if label is not None:
            for i, q in enumerate(new):
                self.labels[q] = f"{label}[{i}]"
        return new

    def add_clbits(self, count: int) -> tuple[int, ...]:
        start = self.classical_bit_count
        self.classical_bit_count += count
        return tuple(range(start, start + count))

    def append(self, gate: Gate) -> None:
        _validate(gate, self.qubit_count, self.classical_bit_count)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)

    @property
    def has_measurements(self) -> bool:
        return any(g.kind is GateKind.MEASURE for g in self.gates)

    def label(self, qubit: int) -> str:
        return self.labels.get(qubit, f"q[{qubit}]")


def _validate(gate: Gate, n_qubits: int, n_clbits: int) -> None:
    for q in gate.qubits():
        if not 0 <= q < n_qubits:
            raise IndexOutOfRange(f"qubit {q} out of range for {n_qubits}-qubit circuit")
    controls = gate.all_controls
    if len(set(controls)) != len(controls):
        raise IndexOutOfRange(f"duplicate control qubits in {gate}")
    if gate.target in controls:
        raise IndexOutOfRange(f"target {gate.target} is also a control")
    if gate.kind is GateKind.SWAP and gate.partner == gate.target:
        raise IndexOutOfRange("SWAP needs two distinct qubits")
    if gate.kind is GateKind.MEASURE:
        if gate.clbit is None or not 0 <= gate.clbit < n_clbits:
            raise IndexOutOfRange(f"classical bit {gate.clbit} out of range")


def invert_segment(gates: Sequence[Gate]) -> list[Gate]:
    """Return the inverse of a gate segment.

    Every gate in the IR's unitary subset is self-inverse, so the inverse is
    the reversed sequence.  Resets and measurements make a segment
    non-invertible.
    """
    for g in gates:
        if g.kind not in SELF_INVERSE:
            raise NotInvertible(
                f"cannot reverse a segment containing {g.kind.name}; "
                "oracle bodies must not reset or measure (enable maintain_coherence)"
            )
    return list(reversed(gates))


# ---------------------------------------------------------------------------
# Register file
# ---------------------------------------------------------------------------

# PSR qubit layout follows the ARM NZCV nibble: V is bit 0, N is bit 3.
FLAG_BITS = {"V": 0, "C": 1, "Z": 2, "N": 3}


@dataclass
class RegisterFile:
    register_size: int
    registers: dict[str, tuple[int, ...]] = field(default_factory=dict)
    classical_registers: dict[str, tuple[int, ...]] = field(default_factory=dict)
    psr: tuple[int, ...] | None = None
    target_qubit: int | None = None
    ancillas: list[int] = field(default_factory=list)
    ancilla_pool: list[int] = field(default_factory=list)

    def allocate_register(self, circuit: QuantumCircuit, name: str) -> tuple[int, ...]:
        if name in self.registers:
            raise DuplicateRegister(f"register {name} is already allocated")
        qubits = circuit.add_qubits(self.register_size, name)
        self.registers[name] = qubits
        return qubits

    def register(self, circuit: QuantumCircuit, name: str) -> tuple[int, ...]:
        """Qubits of `name`, allocating them in |0> on first use."""
        if name not in self.registers:
            return self.allocate_register(circuit, name)
        return self.registers[name]

    def classical(self, circuit: QuantumCircuit, name: str,
                  width: int | None = None) -> tuple[int, ...]:
        if name not in self.classical_registers:
            self.classical_registers[name] = circuit.add_clbits(width or self.register_size)
        return self.classical_registers[name]

    def flags(self, circuit: QuantumCircuit) -> tuple[int, ...]:
        if self.psr is None:
            self.psr = circuit.add_qubits(4)
            for flag, bit in FLAG_BITS.items():
                circuit.labels[self.psr[bit]] = f"PSR.{flag}"
        return self.psr

    def flag(self, circuit: QuantumCircuit, name: str) -> int:
        return self.flags(circuit)[FLAG_BITS[name]]

    def target(self, circuit: QuantumCircuit) -> tuple[int, bool]:
        """Return (target qubit, freshly allocated?)."""
        if self.target_qubit is None:
            (self.target_qubit,) = circuit.add_qubits(1)
            circuit.labels[self.target_qubit] = "target"
            return self.target_qubit, True
        return self.target_qubit, False

    def borrow(self, circuit: QuantumCircuit, count: int) -> list[int]:
        """Take `count` clean ancillas, reusing released ones first."""
        self.ancilla_pool.sort()
        taken = self.ancilla_pool[:count]
        del self.ancilla_pool[:count]
        while len(taken) < count:
            (q,) = circuit.add_qubits(1)
            circuit.labels[q] = f"anc[{len(self.ancillas)}]"
            self.ancillas.append(q)
            taken.append(q)
        return taken

    def release(self, qubits: Iterable[int]) -> None:
        """Return ancillas to the pool; the caller guarantees they are |0>."""
        for q in qubits:
            if q not in self.ancillas or q in self.ancilla_pool:
                raise IndexOutOfRange(f"qubit {q} is not a borrowed ancilla")
            self.ancilla_pool.append(q)

    def owner(self, qubit: int) -> str | None:
        for name, qs in self.registers.items():
            if qubit in qs:
                return name
        if self.psr is not None and qubit in self.psr:
            return "PSR"
        if qubit == self.target_qubit:
            return "target"
        return None
