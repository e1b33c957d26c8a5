"""Shared test helpers: classical oracles, basis-state harness, QASM reader."""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from asm2q.circuit import FLAG_BITS, Gate, QuantumCircuit
from asm2q.compiler import CompiledProgram, compile_program
from asm2q.frontend import parse_source
from asm2q.simulator import simulate

PROGRAMS = Path(__file__).resolve().parent.parent / "src" / "asm2q" / "programs"


def source(register_size: int, *lines: str, coherent: bool = False, **extra) -> str:
    header = {"register_size": register_size, "maintain_coherence": coherent, **extra}
    return json.dumps(header) + "\n" + "\n".join(lines) + "\n"


def compile_text(text: str, inputs=(), auto_measure=False) -> CompiledProgram:
    return compile_program(parse_source(text), inputs=tuple(inputs), auto_measure=auto_measure)


# -- classical reference semantics ---------------------------------------

def oracle(mnemonic: str, n: int, a: int, b: int, carry: int = 0, acc: int = 0) -> int:
    """Integer result of one data-processing instruction, mod 2**n."""
    mask = (1 << n) - 1
    table = {
        "ADD": lambda: a + b,
        "ADC": lambda: a + b + carry,
        "SUB": lambda: a - b,
        "SBC": lambda: a - b - 1 + carry,
        "RSB": lambda: b - a,
        "RSC": lambda: b - a - 1 + carry,
        "AND": lambda: a & b,
        "ORR": lambda: a | b,
        "EOR": lambda: a ^ b,
        "BIC": lambda: a & ~b,
        "MVN": lambda: ~b,
        "LSL": lambda: a << b,
        "LSR": lambda: a >> b,
        "MUL": lambda: a * b,
        "MLA": lambda: a * b + acc,
    }
    return table[mnemonic]() & mask


def compare_flags(mnemonic: str, n: int, a: int, b: int) -> dict[str, int]:
    mask = (1 << n) - 1
    msb = n - 1
    if mnemonic == "CMP":
        total = a + (~b & mask) + 1
    elif mnemonic == "CMN":
        total = a + b
    elif mnemonic == "TEQ":
        total = a ^ b
    else:
        total = a & b
    result = total & mask
    flags = {
        "Z": int(result == 0),
        "N": (result >> msb) & 1,
        "V": ((a >> msb) ^ (b >> msb)) & 1,
    }
    if mnemonic in ("CMP", "CMN"):
        flags["C"] = (total >> n) & 1
    return flags


# -- basis-state harness -------------------------------------------------

def place(value: int, qubits) -> int:
    return sum(((value >> i) & 1) << q for i, q in enumerate(qubits))


def read(index: int, qubits) -> int:
    return sum(((index >> q) & 1) << i for i, q in enumerate(qubits))


def run_basis(compiled: CompiledProgram, values: dict[str, int],
              flags: dict[str, int] | None = None) -> tuple[int, float]:
    """Simulate from a basis input; return (most likely index, its probability)."""
    regs = compiled.registers
    index = 0
    for name, value in values.items():
        index |= place(value, regs.registers[name])
    for name, bit in (flags or {}).items():
        index |= bit << regs.psr[FLAG_BITS[name]]
    state, _ = simulate(compiled.circuit, initial=index)
    probs = state.probabilities()
    best = int(np.argmax(probs))
    return best, float(probs[best])


def register_value(compiled: CompiledProgram, index: int, name: str) -> int:
    return read(index, compiled.registers.registers[name])


def flag_value(compiled: CompiledProgram, index: int, name: str) -> int:
    return (index >> compiled.registers.psr[FLAG_BITS[name]]) & 1


def ancillas_clean(compiled: CompiledProgram, index: int) -> bool:
    return all(not (index >> q) & 1 for q in compiled.registers.ancillas)


# -- minimal OpenQASM 2.0 reader (test-side second route) -----------------

_DECL = re.compile(r"(qreg|creg)\s+(\w+)\[(\d+)\];")
_REF = re.compile(r"(\w+)\[(\d+)\]")


def read_qasm(text: str) -> QuantumCircuit:
    """Parse the gate subset the emitter produces into a flat circuit."""
    lines = text.splitlines()
    assert lines[0] == "OPENQASM 2.0;"
    assert lines[1] == 'include "qelib1.inc";'
    qbase: dict[str, int] = {}
    cbase: dict[str, int] = {}
    circuit = QuantumCircuit()
    for line in lines[2:]:
        m = _DECL.fullmatch(line.strip())
        if m:
            kind, name, size = m.group(1), m.group(2), int(m.group(3))
            if kind == "qreg":
                qbase[name] = circuit.add_qubits(size)[0] if size else circuit.qubit_count
            else:
                cbase[name] = circuit.add_clbits(size)[0] if size else circuit.classical_bit_count
            continue
        op, _, rest = line.strip().rstrip(";").partition(" ")
        if op == "barrier":
            circuit.append(Gate.barrier())
            continue
        if op == "measure":
            q, c = (s.strip() for s in rest.split("->"))
            qn, qi = _REF.fullmatch(q).groups()
            cn, ci = _REF.fullmatch(c).groups()
            circuit.append(Gate.measure(qbase[qn] + int(qi), cbase[cn] + int(ci)))
            continue
        qs = [qbase[name] + int(i) for name, i in _REF.findall(rest)]
        if op == "x":
            circuit.append(Gate.x(qs[0]))
        elif op == "h":
            circuit.append(Gate.h(qs[0]))
        elif op == "z":
            circuit.append(Gate.z(qs[0]))
        elif op == "cx":
            circuit.append(Gate.cx(qs[0], qs[1]))
        elif op == "ccx":
            circuit.append(Gate.mct(qs[:2], qs[2]))
        elif op == "swap":
            circuit.append(Gate.swap(qs[0], qs[1]))
        elif op == "reset":
            circuit.append(Gate.reset(qs[0]))
        else:
            raise ValueError(f"unexpected QASM line {line!r}")
    return circuit
