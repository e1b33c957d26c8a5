"""Quantum-specific mnemonics and ORACLE block recording."""

from __future__ import annotations

from dataclasses import dataclass

from ..circuit import Gate, invert_segment
from ..errors import OracleStructure
from . import Qubits, Workspace


def build_had(ws: Workspace, reg: Qubits) -> None:
    ws.h(*reg)


def build_xxx(ws: Workspace, reg: Qubits) -> None:
    ws.x(*reg)


def prepare_target(ws: Workspace) -> int:
    """Allocate the phase-kickback target on first use and put it in |->."""
    target, fresh = ws.regs.target(ws.circuit)
    if fresh:
        ws.x(target)
        ws.h(target)
    return target


def build_mct_target(ws: Workspace, reg: Qubits) -> None:
    """MCT from every bit of `reg` onto the |-> target: a phase flip on |1...1>."""
    target = prepare_target(ws)
    ws.mct(tuple(reg), target)


def build_tgt(ws: Workspace, source: int) -> None:
    """CX from a flag qubit (or a register's bit 0) onto the target."""
    target = prepare_target(ws)
    ws.cx(source, target)


def build_diffuser(ws: Workspace, qubits: Qubits) -> None:
    """Inversion about the mean: H X MCZ X H over the concatenated qubits."""
    if not qubits:
        raise ValueError("diffuser needs at least one qubit")
    qubits = tuple(qubits)
    ws.h(*qubits)
    ws.x(*qubits)
    ws.emit(Gate.mcz(qubits[:-1], qubits[-1]))
    ws.x(*qubits)
    ws.h(*qubits)


@dataclass
class OracleRecording:
    start_gate_index: int
    end_gate_index: int | None = None
    reversed: bool = False


class OracleRecorder:
    """Tracks the gate span between ORACLE and END_ORACLE for one round."""

    def __init__(self):
        self.recording: OracleRecording | None = None

    def begin(self, ws: Workspace) -> None:
        self.recording = OracleRecording(len(ws.circuit.gates))

    def end(self, ws: Workspace) -> None:
        if self.recording is None:
            raise OracleStructure("END_ORACLE without ORACLE")
        self.recording.end_gate_index = len(ws.circuit.gates)

    def body(self, ws: Workspace) -> list[Gate]:
        rec = self.recording
        return ws.circuit.gates[rec.start_gate_index:rec.end_gate_index]

    def reverse(self, ws: Workspace) -> list[Gate]:
        """Append the inverse of the recorded body and return it."""
        rec = self.recording
        if rec is None or rec.end_gate_index is None:
            raise OracleStructure("REVERSE_ORACLE needs a closed ORACLE block")
        if rec.reversed:
            raise OracleStructure("the oracle has already been reversed")
        inverse = invert_segment(self.body(ws))
        ws.circuit.extend(inverse)
        rec.reversed = True
        return inverse
