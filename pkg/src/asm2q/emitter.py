"""OpenQASM 2.0 serialization and a plain-text circuit diagram."""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Gate, GateKind, QuantumCircuit, RegisterFile

QASM_HEADER = ('OPENQASM 2.0;', 'include "qelib1.inc";')
QASM_KINDS = frozenset({
    GateKind.X, GateKind.H, GateKind.Z, GateKind.CX, GateKind.SWAP,
    GateKind.RESET, GateKind.MEASURE, GateKind.BARRIER,
})


@dataclass(frozen=True)
class QasmDocument:
    text: str

    def __str__(self) -> str:
        return self.text

    @property
    def lines(self) -> list[str]:
        return self.text.splitlines()


def _scratch_needed(circuit: QuantumCircuit) -> int:
    need = 0
    for g in circuit.gates:
        if g.kind in (GateKind.MCT, GateKind.MCZ):
            need = max(need, len(g.all_controls) - 2)
    return need


def _v_chain(controls: list[int], target: int, scratch: list[int]) -> list[Gate]:
    """Toffoli ladder for a k-control NOT using k-2 clean scratch qubits."""
    k = len(controls)
    if k == 0:
        return [Gate.x(target)]
    if k == 1:
        return [Gate.cx(controls[0], target)]
    if k == 2:
        return [Gate.mct(controls, target)]
    ladder = [Gate.mct((controls[0], controls[1]), scratch[0])]
    for i in range(2, k - 1):
        ladder.append(Gate.mct((controls[i], scratch[i - 2]), scratch[i - 1]))
    top = Gate.mct((controls[k - 1], scratch[k - 3]), target)
    return ladder + [top] + ladder[::-1]


def _expand(g: Gate, scratch: list[int]) -> list[Gate]:
    if g.kind in QASM_KINDS:
        return [g]
    flips = [Gate.x(q) for q in g.negated_controls]
    controls = list(g.all_controls)
    if g.kind is GateKind.MCZ and not controls:
        return [Gate.z(g.target)]
    body = _v_chain(controls, g.target, scratch)
    if g.kind is GateKind.MCZ:
        body = [Gate.h(g.target)] + body + [Gate.h(g.target)]
    return flips + body + flips


def decompose(circuit: QuantumCircuit, regs: RegisterFile | None = None) -> QuantumCircuit:
    """Rewrite `circuit` over x/h/z/cx/ccx/swap plus reset, measure and barrier.

    Multi-controlled gates with more than two controls use a V-chain over
    scratch qubits appended after the existing ones (labelled as further
    ``anc`` entries); negated controls become X sandwiches.
    """
    out = QuantumCircuit(circuit.qubit_count, circuit.classical_bit_count,
                         labels=dict(circuit.labels))
    first = len(regs.ancillas) if regs is not None else 0
    scratch = list(out.add_qubits(_scratch_needed(circuit)))
    for i, q in enumerate(scratch):
        out.labels[q] = f"anc[{first + i}]"
    for g in circuit.gates:
        out.extend(_expand(g, scratch))
    return out


class _Names:
    """Maps circuit qubits and classical bits to QASM register references."""

    def __init__(self, circuit: QuantumCircuit, regs: RegisterFile | None):
        self.qregs: dict[str, list[int]] = {}
        self.qubit: dict[int, str] = {}
        owned: dict[int, str] = {}
        if regs is not None:
            for name, qs in regs.registers.items():
                for q in qs:
                    owned[q] = name.lower()
            if regs.psr is not None:
                for q in regs.psr:
                    owned[q] = "psr"
            if regs.target_qubit is not None:
                owned[regs.target_qubit] = "tgt"
            for q in regs.ancillas:
                owned[q] = "anc"
        fallback = "anc" if regs is not None else "q"
        order = [n.lower() for n in (regs.registers if regs else ())] + ["psr", "anc", "q", "tgt"]
        members: dict[str, list[int]] = {}
        for q in range(circuit.qubit_count):
            members.setdefault(owned.get(q, fallback), []).append(q)
        for name in order:
            if name in members:
                self.qregs[name] = members[name]
                for i, q in enumerate(members[name]):
                    self.qubit[q] = f"{name}[{i}]"

        self.cregs: dict[str, int] = {}
        self.clbit: dict[int, str] = {}
        covered: set[int] = set()
        if regs is not None:
            for name, bits in regs.classical_registers.items():
                cname = name.lower()
                if cname in self.qregs:
                    cname = f"c_{cname}"
                self.cregs[cname] = len(bits)
                for i, b in enumerate(bits):
                    self.clbit[b] = f"{cname}[{i}]"
                covered.update(bits)
        loose = [b for b in range(circuit.classical_bit_count) if b not in covered]
        if loose:
            self.cregs["c"] = len(loose)
            for i, b in enumerate(loose):
                self.clbit[b] = f"c[{i}]"


def _qasm_line(g: Gate, names: _Names) -> str:
    q = names.qubit
    if g.kind is GateKind.BARRIER:
        return f"barrier {','.join(names.qregs)};"
    if g.kind is GateKind.MEASURE:
        return f"measure {q[g.target]} -> {names.clbit[g.clbit]};"
    if g.kind is GateKind.SWAP:
        return f"swap {q[g.target]},{q[g.partner]};"
    if g.kind is GateKind.MCT:
        return f"ccx {q[g.controls[0]]},{q[g.controls[1]]},{q[g.target]};"
    if g.kind is GateKind.CX:
        return f"cx {q[g.controls[0]]},{q[g.target]};"
    return f"{g.kind.value} {q[g.target]};"


def emit_qasm(circuit: QuantumCircuit, regs: RegisterFile | None = None) -> QasmDocument:
    flat = decompose(circuit, regs)
    names = _Names(flat, regs)
    lines = list(QASM_HEADER)
    lines += [f"qreg {name}[{len(qs)}];" for name, qs in names.qregs.items()]
    lines += [f"creg {name}[{width}];" for name, width in names.cregs.items()]
    if flat.gates and not names.qregs:
        raise ValueError("cannot emit gates for a circuit without qubits")
    lines += [_qasm_line(g, names) for g in flat.gates]
    return QasmDocument("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Text diagram
# ---------------------------------------------------------------------------

_WIRE = "───"
_CROSS = "─┼─"


def _column(g: Gate, n: int) -> list[str]:
    cells = [_WIRE] * n
    if g.kind is GateKind.BARRIER:
        return ["─║─"] * n
    marks: dict[int, str] = {}
    for c in g.controls:
        marks[c] = "─●─"
    for c in g.negated_controls:
        marks[c] = "─○─"
    symbol = {
        GateKind.X: "─X─", GateKind.H: "─H─", GateKind.Z: "─Z─", GateKind.CX: "─⊕─",
        GateKind.MCT: "─⊕─", GateKind.MCZ: "─Z─", GateKind.SWAP: "─×─",
        GateKind.RESET: "|0⟩", GateKind.MEASURE: "─M─",
    }[g.kind]
    marks[g.target] = symbol
    if g.kind is GateKind.SWAP:
        marks[g.partner] = symbol
    lo, hi = min(marks), max(marks)
    for q in range(lo, hi + 1):
        cells[q] = marks.get(q, _CROSS)
    return cells


def emit_text_diagram(circuit: QuantumCircuit, regs: RegisterFile | None = None) -> str:
    """One row per qubit, one three-character column per gate.

    Symbols: ● control, ○ negated control, ⊕ NOT target, × SWAP, M measure,
    |0⟩ reset, ║ barrier, ┼ a wire crossed by a multi-qubit gate.
    """
    n = circuit.qubit_count
    header = (f"qubits={n} clbits={circuit.classical_bit_count} "
              f"gates={len(circuit.gates)}")
    if n == 0:
        return header + "\n"
    labels = [circuit.label(q) for q in range(n)]
    width = max(len(s) for s in labels)
    columns = [_column(g, n) for g in circuit.gates]
    rows = [header]
    for q in range(n):
        wire = "".join(col[q] for col in columns)
        rows.append(f"{labels[q]:>{width}} : {wire}─")
    return "\n".join(rows) + "\n"
