"""Lower a parsed Program into a QuantumCircuit.

Write discipline: a destination register must be |0> before it is written.
A register that already holds a value is Reset first in reset mode; with
``maintain_coherence`` the rewrite is rejected, because the old value cannot
be discarded without breaking coherence.  Ancillas are always handed back
clean, by uncomputation in coherent mode (and inside oracle blocks) or by
Reset otherwise.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

from .circuit import Gate, GateKind, QuantumCircuit, RegisterFile, invert_segment
from .errors import Asm2QError, OracleStructure, OverlappingRanges, RewriteInCoherentMode
from .frontend import (
    Config, Flag, Immediate, Instruction, MemoryRef, Mnemonic, Program, Register,
    RegisterList, check_immediate, parse_source,
)
from .lowering import Workspace
from .lowering.arith import (
    ArithKind, build_multiplier, build_ripple_adder, build_shift, build_subtractor,
)
from .lowering.grover import (
    OracleRecorder, build_diffuser, build_had, build_mct_target, build_tgt, build_xxx,
    prepare_target,
)
from .lowering.logic import (
    FlagUpdate, build_bitwise, build_copy, build_flag_update, build_init, build_psr_move,
    build_store,
)

_SUBTRACT = {
    Mnemonic.SUB: ArithKind.SUB,
    Mnemonic.SBC: ArithKind.SUB_WITH_CARRY,
    Mnemonic.RSB: ArithKind.REVERSE_SUB,
    Mnemonic.RSC: ArithKind.REVERSE_SUB_WITH_CARRY,
}
_BITWISE = {Mnemonic.AND: "and", Mnemonic.ORR: "orr", Mnemonic.EOR: "eor", Mnemonic.BIC: "bic"}
_ALL_FLAGS = FlagUpdate(zero=True, negative=True, carry=True, overflow=True)
_LOGIC_FLAGS = FlagUpdate(zero=True, negative=True, carry=False, overflow=True)


@dataclass
class TraceEntry:
    text: str
    line: int
    gate_count: int
    qubits: tuple[int, ...]
    total_qubits: int

    def __str__(self) -> str:
        touched = ",".join(map(str, self.qubits)) or "-"
        return (f"{self.line:>4}  {self.text:<24} gates={self.gate_count:<4} "
                f"qubits={touched}  total={self.total_qubits}")


@dataclass
class CompiledProgram:
    program: Program
    circuit: QuantumCircuit
    registers: RegisterFile
    trace: list[TraceEntry] = field(default_factory=list)

    @property
    def config(self) -> Config:
        return self.program.config


def compile_source(text: str, **kwargs) -> CompiledProgram:
    return compile_program(parse_source(text), **kwargs)


def compile_program(program: Program, *, inputs: tuple[str, ...] = (),
                    auto_measure: bool = True) -> CompiledProgram:
    """Lower `program` to a circuit.

    `inputs` names registers (or ``"PSR"``) that are allocated up front and
    treated as holding arbitrary values, which is how basis-state test
    harnesses feed operands in.  When the program has no STR and
    `auto_measure` is set, every general register is measured at the end
    into a classical register of the same name.
    """
    lowerer = _Lowerer(program)
    for name in inputs:
        lowerer.declare_input(name)
    lowerer.run()
    if auto_measure and not any(i.mnemonic is Mnemonic.STR for i in program.instructions):
        lowerer.measure_all()
    return CompiledProgram(program, lowerer.circuit, lowerer.regs, lowerer.trace)


def _events(program: Program) -> list[tuple[str, object]]:
    events = list(program.events())
    rounds = program.config.grover_iterations
    if rounds == 1:
        return events
    if program.oracle_span is None:
        raise OracleStructure("grover_iterations > 1 needs an ORACLE block")
    start = events.index(("marker", "ORACLE"))
    after = events.index(("marker", "REVERSE_ORACLE" if program.reverse_oracle_at is not None
                          else "END_ORACLE"))
    stop = next((i for i in range(after, len(events))
                 if events[i][0] == "instr" and events[i][1].mnemonic is Mnemonic.DIF), None)
    if stop is None:
        raise OracleStructure("grover_iterations > 1 needs a DIF after the oracle",
                              program.marker_lines.get("ORACLE"))
    return events[:start] + events[start:stop + 1] * rounds + events[stop + 1:]


class _Lowerer:
    def __init__(self, program: Program):
        self.program = program
        self.cfg = program.config
        self.n = self.cfg.register_size
        self.circuit = QuantumCircuit()
        self.regs = RegisterFile(self.n)
        self.dirty: set[int] = set()
        self.trace: list[TraceEntry] = []
        self.recorder = OracleRecorder()
        self.uses_target = any(
            i.mnemonic in (Mnemonic.MCT, Mnemonic.TGT) for i in program.instructions
        )
        self._snapshot: set[int] = set()
        self._body_written: set[int] = set()

    # -- bookkeeping -----------------------------------------------------

    def ws(self, in_oracle: bool = False) -> Workspace:
        return Workspace(self.circuit, self.regs, self.cfg.maintain_coherence or in_oracle)

    def _tracked(self, q: int) -> bool:
        return q not in self.regs.ancillas and q != self.regs.target_qubit

    def _note_gates(self, start: int) -> None:
        for g in self.circuit.gates[start:]:
            if g.kind is GateKind.RESET:
                self.dirty.discard(g.target)
            else:
                self.dirty.update(q for q in g.written() if self._tracked(q))

    def declare_input(self, name: str) -> None:
        qubits = self.regs.flags(self.circuit) if name == "PSR" else self._reg(name)
        self.dirty.update(qubits)

    def _reg(self, name: str) -> tuple[int, ...]:
        return self.regs.register(self.circuit, name)

    def _check_writable(self, qubits, name: str) -> None:
        if self.cfg.maintain_coherence and self.dirty.intersection(qubits):
            raise RewriteInCoherentMode(
                f"{name} already holds a value and maintain_coherence forbids overwriting it; "
                "write the result to a fresh register instead"
            )

    def _clear(self, ws: Workspace, qubits) -> None:
        stale = [q for q in qubits if q in self.dirty]
        ws.reset(*stale)
        self.dirty.difference_update(stale)

    def _prepare(self, ws: Workspace, qubits, name: str) -> None:
        self._check_writable(qubits, name)
        self._clear(ws, qubits)

    # -- driver ----------------------------------------------------------

    def run(self) -> None:
        for kind, item in _events(self.program):
            start = len(self.circuit.gates)
            if kind == "marker":
                line = self.program.marker_lines.get(item, 0)
                text = item
                try:
                    self._marker(item)
                except Asm2QError as exc:
                    raise exc.at(line)
            else:
                line, text = item.source_line, str(item)
                try:
                    self._instruction(item)
                except Asm2QError as exc:
                    raise exc.at(line)
                self._note_gates(start)
            self._record(text, line, start)

    def _record(self, text: str, line: int, start: int) -> None:
        new = self.circuit.gates[start:]
        touched = sorted({q for g in new for q in g.qubits()})
        self.trace.append(
            TraceEntry(text, line, len(new), tuple(touched), self.circuit.qubit_count)
        )

    def measure_all(self) -> None:
        start = len(self.circuit.gates)
        ws = self.ws()
        for name, qubits in self.regs.registers.items():
            build_store(ws, qubits, self.regs.classical(self.circuit, name, len(qubits)))
        if len(self.circuit.gates) > start:
            self._record("(measure all registers)", 0, start)

    def _written_since(self, start: int, stop: int | None = None) -> set[int]:
        return {q for g in self.circuit.gates[start:stop] for q in g.written()}

    def _marker(self, name: str) -> None:
        ws = self.ws(in_oracle=True)
        if name == "ORACLE":
            if self.uses_target:
                # prepare outside the recorded body so REVERSE_ORACLE keeps it
                prepare_target(ws)
            self._snapshot = set(self.dirty)
            self.recorder.begin(ws)
        elif name == "END_ORACLE":
            self.recorder.end(ws)
            rec = self.recorder.recording
            self._body_written = self._written_since(rec.start_gate_index, rec.end_gate_index)
        else:
            rec = self.recorder.recording
            between = self._written_since(rec.end_gate_index)
            self.recorder.reverse(ws)
            self.dirty = {
                q for q in self.dirty
                if q not in self._body_written or q in self._snapshot or q in between
            }

    # -- operands --------------------------------------------------------

    @contextmanager
    def _source(self, ws: Workspace, op, avoid=()):
        """Qubits holding an operand; immediates and aliases go to ancillas."""
        if isinstance(op, Immediate):
            value = check_immediate(op.value, self.n)
            qs = ws.constant(value, self.n)
            yield qs
            ws.drop_constant(qs, value)
            return
        qs = self._reg(op.name)
        if set(qs) & set(avoid):
            copy = ws.copy(qs)
            yield copy
            ws.drop_copy(qs, copy)
        else:
            yield qs

    def _used(self, *ops) -> set[int]:
        used: set[int] = set()
        for op in ops:
            if isinstance(op, Register):
                used.update(self._reg(op.name))
        return used

    def _into(self, ws: Workspace, dest: Register, used: set[int], build) -> None:
        """Run `build(qubits)` so that its result lands in register `dest`."""
        qubits = self._reg(dest.name)
        if not used.intersection(qubits):
            self._prepare(ws, qubits, dest.name)
            build(qubits)
            return
        self._check_writable(qubits, dest.name)
        scratch = ws.borrow(self.n)
        build(scratch)
        self._clear(ws, qubits)
        for s, d in zip(scratch, qubits):
            ws.cx(s, d)
        for s, d in zip(scratch, qubits):
            ws.cx(d, s)
        ws.release(scratch)

    # -- instructions ----------------------------------------------------

    def _instruction(self, ins: Instruction) -> None:
        handler = getattr(self, f"_op_{ins.mnemonic.value.lower()}")
        handler(self.ws(ins.in_oracle), ins, *ins.operands)

    def _op_add(self, ws, ins, rd, rn, op2):
        with self._source(ws, rn) as a, self._source(ws, op2, avoid=a) as b:
            self._into(ws, rd, self._used(rn, op2),
                       lambda d: build_ripple_adder(ws, a, b, d))

    def _op_adc(self, ws, ins, rd, rn, op2):
        carry = self.regs.flag(self.circuit, "C")
        self._check_writable([carry], "the carry flag")
        with self._source(ws, rn) as a, self._source(ws, op2, avoid=a) as b:
            (k,) = ws.borrow(1)
            self._into(ws, rd, self._used(rn, op2),
                       lambda d: build_ripple_adder(ws, a, b, d, carry_out=k, carry_in=carry))
        self._clear(ws, [carry])
        ws.cx(k, carry)
        ws.cx(carry, k)
        ws.release([k])

    def _subtract(self, ws, ins, rd, rn, op2):
        variant = _SUBTRACT[ins.mnemonic]
        carry = None
        if variant in (ArithKind.SUB_WITH_CARRY, ArithKind.REVERSE_SUB_WITH_CARRY):
            carry = self.regs.flag(self.circuit, "C")
        with self._source(ws, rn) as a, self._source(ws, op2, avoid=a) as b:
            self._into(ws, rd, self._used(rn, op2),
                       lambda d: build_subtractor(ws, a, b, d, variant, carry_in=carry))

    _op_sub = _op_sbc = _op_rsb = _op_rsc = _subtract

    def _op_mul(self, ws, ins, rd, rm, rs):
        with self._source(ws, rm) as a, self._source(ws, rs, avoid=a) as b:
            self._into(ws, rd, self._used(rm, rs), lambda d: build_multiplier(ws, a, b, d))

    def _op_mla(self, ws, ins, rd, rm, rs, rn):
        with self._source(ws, rm) as a, self._source(ws, rs, avoid=a) as b, \
                self._source(ws, rn) as acc:
            self._into(ws, rd, self._used(rm, rs, rn),
                       lambda d: build_multiplier(ws, a, b, d, accumulate=acc))

    def _shift(self, ws, ins, rd, rn, amount):
        direction = "left" if ins.mnemonic is Mnemonic.LSL else "right"
        with self._source(ws, rn) as s:
            self._into(ws, rd, self._used(rn),
                       lambda d: build_shift(ws, s, d, amount.value, direction))

    _op_lsl = _op_lsr = _shift

    def _bitwise(self, ws, ins, rd, rn, op2):
        kind = _BITWISE[ins.mnemonic]
        with self._source(ws, rn) as a, self._source(ws, op2, avoid=a) as b:
            self._into(ws, rd, self._used(rn, op2), lambda d: build_bitwise(ws, kind, a, b, d))

    _op_and = _op_orr = _op_eor = _op_bic = _bitwise

    def _op_mvn(self, ws, ins, rd, op2):
        with self._source(ws, op2) as b:
            self._into(ws, rd, self._used(op2), lambda d: build_bitwise(ws, "mvn", None, b, d))

    def _op_mov(self, ws, ins, rd, op2):
        if isinstance(op2, Immediate):
            self._load(ws, ins, rd, check_immediate(op2.value, self.n))
            return
        if op2.name == rd.name:
            if ins.in_oracle:
                raise OverlappingRanges("MOV inside an oracle needs two distinct registers")
            return
        src = self._reg(op2.name)
        if ins.in_oracle:
            build_copy(ws, src, self._reg(rd.name), in_oracle=True)
        else:
            self._into(ws, rd, set(src), lambda d: build_copy(ws, src, d))

    def _load(self, ws, ins, rd, value):
        if ins.in_oracle:
            build_init(ws, self._reg(rd.name), value, in_oracle=True)
        else:
            self._into(ws, rd, set(), lambda d: build_init(ws, d, value))

    def _op_ldr(self, ws, ins, rd, src):
        if isinstance(src, MemoryRef):
            value = self.cfg.memory.get(src.offset, 0)
        else:
            value = src.value
        self._load(ws, ins, rd, check_immediate(value, self.n))

    def _op_str(self, ws, ins, a, b):
        if isinstance(b, MemoryRef):
            reg, creg = a, f"CR{b.offset}"
        else:
            creg, reg = a.name, b
        qubits = self._reg(reg.name)
        build_store(ws, qubits, self.regs.classical(self.circuit, creg))

    def _op_mrs(self, ws, ins, rd, psr):
        self.regs.flags(self.circuit)
        self._into(ws, rd, set(), lambda d: build_psr_move(ws, "to_register", d))

    def _op_msr(self, ws, ins, psr, rn):
        flags = self.regs.flags(self.circuit)[:min(4, self.n)]
        self._prepare(ws, flags, "PSR")
        build_psr_move(ws, "from_register", self._reg(rn.name))

    def _compare(self, ws, ins, rn, op2):
        update = _ALL_FLAGS if ins.mnemonic in (Mnemonic.CMP, Mnemonic.CMN) else _LOGIC_FLAGS
        flags = [self.regs.flag(self.circuit, f) for f in update.names]
        self._check_writable(flags, "PSR")
        with self._source(ws, rn) as a, self._source(ws, op2, avoid=a) as b:
            result = ws.borrow(self.n)
            (k,) = ws.borrow(1)
            start = len(self.circuit.gates)
            if ins.mnemonic is Mnemonic.CMP:
                build_subtractor(ws, a, b, result, ArithKind.SUB, carry_out=k)
            elif ins.mnemonic is Mnemonic.CMN:
                build_ripple_adder(ws, a, b, result, carry_out=k)
            else:
                kind = "eor" if ins.mnemonic is Mnemonic.TEQ else "and"
                build_bitwise(ws, kind, a, b, result)
            stop = len(self.circuit.gates)
            self._clear(ws, flags)
            build_flag_update(ws, result, a[-1], b[-1], update,
                              carry_source=k if update.carry else None)
            if ws.coherent:
                self.circuit.extend(invert_segment(self.circuit.gates[start:stop]))
            else:
                ws.reset(*result, k)
            ws.release(result + [k])

    _op_cmp = _op_cmn = _op_teq = _op_tst = _compare

    def _op_had(self, ws, ins, reg):
        build_had(ws, self._reg(reg.name))

    def _op_xxx(self, ws, ins, reg):
        build_xxx(ws, self._reg(reg.name))

    def _op_mct(self, ws, ins, reg):
        build_mct_target(ws, self._reg(reg.name))

    def _op_tgt(self, ws, ins, src):
        if isinstance(src, Flag):
            build_tgt(ws, self.regs.flag(self.circuit, src.name))
        else:
            build_tgt(ws, self._reg(src.name)[0])

    def _op_dif(self, ws, ins, regs):
        names = regs.names if isinstance(regs, RegisterList) else (regs.name,)
        if len(set(names)) != len(names):
            raise OverlappingRanges("DIF lists a register twice")
        build_diffuser(ws, [q for name in names for q in self._reg(name)])

    def _op_bar(self, ws, ins):
        ws.emit(Gate.barrier())
