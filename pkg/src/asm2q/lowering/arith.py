"""Reversible arithmetic: ripple adders, subtractors, multiplier, shifts."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import MissingCarrySource, OverlappingRanges, WidthMismatch
from . import Qubits, Workspace, require_disjoint


class ArithKind(Enum):
    ADD = "add"
    ADD_WITH_CARRY = "add_with_carry"
    SUB = "sub"
    SUB_WITH_CARRY = "sub_with_carry"
    REVERSE_SUB = "reverse_sub"
    REVERSE_SUB_WITH_CARRY = "reverse_sub_with_carry"
    MUL = "mul"
    MUL_ACCUMULATE = "mul_accumulate"
    SHIFT_LEFT = "shift_left"
    SHIFT_RIGHT = "shift_right"


SUBTRACT_KINDS = (ArithKind.SUB, ArithKind.SUB_WITH_CARRY,
                  ArithKind.REVERSE_SUB, ArithKind.REVERSE_SUB_WITH_CARRY)


@dataclass(frozen=True)
class ArithPlan:
    kind: ArithKind
    dest: str
    sources: tuple
    carry_in_used: bool = False
    sets_carry_out: bool = False


def _same_width(*ranges: Qubits) -> int:
    widths = {len(r) for r in ranges}
    if len(widths) != 1:
        raise WidthMismatch(f"register widths differ: {sorted(widths)}")
    return widths.pop()


def _majority(ws: Workspace, a: int, b: int, c: int | None, out: int) -> None:
    # MAJ(a, b, c) = ab ^ ac ^ bc
    ws.mct((a, b), out)
    if c is not None:
        ws.mct((a, c), out)
        ws.mct((b, c), out)


def build_ripple_adder(ws: Workspace, a: Qubits, b: Qubits, dest: Qubits,
                       carry_out: int | None = None, carry_in: int | None = None) -> None:
    """dest ^= (a + b + carry_in) mod 2**n; flip `carry_out` on overflow.

    Carries c[i+1] = MAJ(a[i], b[i], c[i]) are computed into borrowed
    ancillas, the sum bits are a[i] ^ b[i] ^ c[i], and the carry chain is then
    uncomputed (coherent) or reset.  `dest` must start in |0> for a plain sum.
    """
    n = _same_width(a, b, dest)
    extra = [q for q in (carry_in, carry_out) if q is not None]
    require_disjoint(a, b, dest, extra)
    if carry_in is not None and carry_in == carry_out:
        raise OverlappingRanges("carry_in and carry_out must be distinct qubits")

    need = n if carry_out is not None else n - 1
    carries = ws.borrow(need)
    c: list[int | None] = [carry_in] + carries
    for i in range(need):
        _majority(ws, a[i], b[i], c[i], c[i + 1])
    for i in range(n):
        ws.cx(a[i], dest[i])
        ws.cx(b[i], dest[i])
        if c[i] is not None:
            ws.cx(c[i], dest[i])
    if carry_out is not None:
        ws.cx(c[n], carry_out)
    if ws.coherent:
        for i in reversed(range(need)):
            _majority(ws, a[i], b[i], c[i], c[i + 1])
    else:
        ws.reset(*carries)
    ws.release(carries)


def add_in_place(ws: Workspace, addend: Qubits, target: Qubits,
                 carry_out: int | None = None) -> None:
    """target := (target + addend) mod 2**w with a MAJ/UMA ripple.

    `addend` is used as the carry chain and is restored afterwards; one
    clean ancilla supplies the incoming carry.
    """
    w = _same_width(addend, target)
    require_disjoint(addend, target, [carry_out] if carry_out is not None else None)
    if w == 0:
        return
    (c0,) = ws.borrow(1)
    chain = [c0] + list(addend)

    def maj(x, y, z):
        ws.cx(z, y)
        ws.cx(z, x)
        ws.mct((x, y), z)

    def uma(x, y, z):
        ws.mct((x, y), z)
        ws.cx(z, x)
        ws.cx(x, y)

    for i in range(w):
        maj(chain[i], target[i], addend[i])
    if carry_out is not None:
        ws.cx(addend[w - 1], carry_out)
    for i in reversed(range(w)):
        uma(chain[i], target[i], addend[i])
    ws.release([c0])


def build_subtractor(ws: Workspace, rn: Qubits, op2: Qubits, dest: Qubits,
                     variant: ArithKind, carry_in: int | None = None,
                     carry_out: int | None = None) -> None:
    """Two's-complement subtraction into a clean `dest`.

    SUB: rn - op2; SBC: rn - op2 - 1 + C; RSB: op2 - rn; RSC: op2 - rn - 1 + C.
    The subtrahend is inverted in place with X gates, added with an incoming
    carry of 1 (or C), then restored.  `carry_out` receives the adder carry,
    i.e. NOT borrow.
    """
    if variant not in SUBTRACT_KINDS:
        raise ValueError(f"{variant} is not a subtraction")
    _same_width(rn, op2, dest)
    require_disjoint(rn, dest)
    require_disjoint(op2, dest)
    reverse = variant in (ArithKind.REVERSE_SUB, ArithKind.REVERSE_SUB_WITH_CARRY)
    with_carry = variant in (ArithKind.SUB_WITH_CARRY, ArithKind.REVERSE_SUB_WITH_CARRY)
    minuend, subtrahend = (op2, rn) if reverse else (rn, op2)
    if with_carry and carry_in is None:
        raise MissingCarrySource(f"{variant.name} needs the carry flag as input")

    ws.x(*subtrahend)
    one = None
    if not with_carry:
        (one,) = ws.borrow(1)
        ws.x(one)
        carry_in = one
    build_ripple_adder(ws, minuend, subtrahend, dest, carry_out=carry_out, carry_in=carry_in)
    ws.x(*subtrahend)
    if one is not None:
        ws.x(one)
        ws.release([one])


def build_multiplier(ws: Workspace, a: Qubits, b: Qubits, dest: Qubits,
                     accumulate: Qubits | None = None) -> None:
    """dest := (a * b [+ accumulate]) mod 2**n into a clean `dest`.

    Row 0 of the partial products goes straight into `dest`; every later row
    a & b[i] is formed in ancillas by Toffolis and ripple-added at offset i.
    A single-bit row folds into the top bit directly, which for n = 2 gives
    R0 = A0 B0 and R1 = A1 B0 ^ A0 B1.
    """
    n = _same_width(a, b, dest)
    require_disjoint(a, dest)
    require_disjoint(b, dest)
    if accumulate is not None:
        _same_width(accumulate, dest)
        require_disjoint(accumulate, dest)
    if a and set(a) & set(b):
        raise OverlappingRanges("multiplier operands must be distinct registers")

    for j in range(n):
        ws.mct((a[j], b[0]), dest[j])
    for i in range(1, n):
        width = n - i
        if width == 1:
            ws.mct((a[0], b[i]), dest[n - 1])
            continue
        row = ws.borrow(width)
        for j in range(width):
            ws.mct((a[j], b[i]), row[j])
        add_in_place(ws, row, dest[i:])
        if ws.coherent:
            for j in range(width):
                ws.mct((a[j], b[i]), row[j])
        else:
            ws.reset(*row)
        ws.release(row)
    if accumulate is not None:
        add_in_place(ws, accumulate, dest)


def build_shift(ws: Workspace, src: Qubits, dest: Qubits, amount: int, direction: str) -> None:
    """Copy the surviving bits of `src` into `dest`, then walk them with SWAPs.

    Bits shifted past either end are never copied, so nothing wraps.
    """
    n = _same_width(src, dest)
    require_disjoint(src, dest)
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    if amount < 0:
        raise ValueError("shift amount must be non-negative")
    if amount >= n:
        return
    if direction == "left":
        for j in range(n - amount):
            ws.cx(src[j], dest[j])
        if amount:
            for p in range(n - 1 - amount, -1, -1):
                ws.swap(dest[p], dest[p + amount])
    else:
        for j in range(amount, n):
            ws.cx(src[j], dest[j])
        if amount:
            for p in range(amount, n):
                ws.swap(dest[p], dest[p - amount])
