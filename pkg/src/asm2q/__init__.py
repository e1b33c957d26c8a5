"""Compile ARM-style assembly with quantum mnemonics into gate-level circuits."""

from .circuit import Gate, GateKind, QuantumCircuit, RegisterFile
from .compiler import CompiledProgram, compile_program, compile_source
from .emitter import QasmDocument, decompose, emit_qasm, emit_text_diagram
from .errors import Asm2QError
from .frontend import Config, Program, parse_program, parse_source
from .simulator import Histogram, StateVector, run, simulate

__all__ = [
    "Asm2QError", "CompiledProgram", "Config", "Gate", "GateKind", "Histogram", "Program",
    "QasmDocument", "QuantumCircuit", "RegisterFile", "StateVector", "compile_program",
    "compile_source", "decompose", "emit_qasm", "emit_text_diagram", "parse_program",
    "parse_source", "run", "simulate",
]
