"""Bitwise, move, store and status-flag circuits."""

from __future__ import annotations

from dataclasses import dataclass

from ..circuit import Gate
from ..errors import MissingCarrySource, WidthMismatch
from . import Qubits, Workspace, require_disjoint

BITWISE_KINDS = ("and", "orr", "eor", "bic", "mvn")


@dataclass(frozen=True)
class FlagUpdate:
    zero: bool = True
    negative: bool = True
    carry: bool = False
    overflow: bool = True

    def __post_init__(self):
        if not (self.zero or self.negative or self.carry or self.overflow):
            raise ValueError("FlagUpdate must request at least one flag")

    @property
    def names(self) -> tuple[str, ...]:
        wanted = {"Z": self.zero, "N": self.negative, "C": self.carry, "V": self.overflow}
        return tuple(f for f, on in wanted.items() if on)


def build_bitwise(ws: Workspace, kind: str, rn: Qubits | None, op2: Qubits, dest: Qubits) -> None:
    """Per-bit logic into a clean `dest` (MVN ignores `rn`)."""
    if kind not in BITWISE_KINDS:
        raise ValueError(f"unknown bitwise kind {kind!r}")
    if len(op2) != len(dest) or (kind != "mvn" and len(rn) != len(dest)):
        raise WidthMismatch("bitwise operands must share the register width")
    require_disjoint(op2, dest)
    if kind == "mvn":
        for s, d in zip(op2, dest):
            ws.cx(s, d)
        ws.x(*dest)
        return
    require_disjoint(rn, dest)
    require_disjoint(rn, op2)
    for a, b, d in zip(rn, op2, dest):
        if kind == "and":
            ws.mct((a, b), d)
        elif kind == "bic":
            ws.mct((a,), d, negated=(b,))
        elif kind == "orr":
            # De Morgan: a | b = ~(~a & ~b)
            ws.mct((), d, negated=(a, b))
            ws.x(d)
        else:
            # the two minterms are disjoint, so both can flip d directly
            ws.mct((a,), d, negated=(b,))
            ws.mct((b,), d, negated=(a,))


def build_init(ws: Workspace, dest: Qubits, value: int, in_oracle: bool = False) -> None:
    """Load a classical constant.

    Outside an oracle this X-flips the set bits of a clean register.  Inside
    an oracle it flips the *clear* bits, so an MCT over `dest` afterwards
    fires exactly when the register held `value`.
    """
    for i, q in enumerate(dest):
        if bool((value >> i) & 1) != in_oracle:
            ws.x(q)


def build_copy(ws: Workspace, src: Qubits, dest: Qubits, in_oracle: bool = False) -> None:
    """Register move: CX copy, or XNOR into `dest` inside an oracle."""
    if len(src) != len(dest):
        raise WidthMismatch("move operands must share the register width")
    require_disjoint(src, dest)
    for s, d in zip(src, dest):
        ws.cx(s, d)
    if in_oracle:
        ws.x(*dest)


def build_store(ws: Workspace, src: Qubits, classical_dest: Qubits) -> None:
    if len(src) != len(classical_dest):
        raise WidthMismatch(
            f"cannot store a {len(src)}-qubit register into {len(classical_dest)} classical bits"
        )
    for q, c in zip(src, classical_dest):
        ws.emit(Gate.measure(q, c))


def build_psr_move(ws: Workspace, direction: str, reg: Qubits) -> None:
    """MRS ("to_register") or MSR ("from_register") over the low 4 bits.

    Bit i of the register pairs with PSR bit i (V, C, Z, N).  The receiving
    side is XOR-accumulated, so it must be |0> for a faithful copy.
    """
    psr = ws.regs.flags(ws.circuit)
    for i in range(min(4, len(reg))):
        if direction == "to_register":
            ws.cx(psr[i], reg[i])
        elif direction == "from_register":
            ws.cx(reg[i], psr[i])
        else:
            raise ValueError(f"unknown direction {direction!r}")


def build_flag_update(ws: Workspace, result: Qubits, rn_msb: int, op2_msb: int,
                      update: FlagUpdate, carry_source: int | None = None) -> None:
    """Write the requested flags into clean PSR qubits.

    Z fires when every result bit is 0, N copies the result MSB, C copies
    the adder carry and V is the XOR of the two input MSBs.
    """
    if update.carry and carry_source is None:
        raise MissingCarrySource("carry flag requested but no adder carry is available")
    flag = lambda name: ws.regs.flag(ws.circuit, name)  # noqa: E731
    if update.zero:
        ws.mct((), flag("Z"), negated=tuple(result))
    if update.negative:
        ws.cx(result[-1], flag("N"))
    if update.carry:
        ws.cx(carry_source, flag("C"))
    if update.overflow:
        ws.cx(rn_msb, flag("V"))
        ws.cx(op2_msb, flag("V"))

