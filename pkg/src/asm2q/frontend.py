"""Frontend: JSON configuration header, tokenizer and instruction parser.

Source files look like::

    {"register_size": 2}
    ;hadamard
    HAD R1
    ORACLE
        MOV R1, #1
    END_ORACLE
    MCT R1
    REVERSE_ORACLE
    DIF {R1}
    STR CR1, R1

The header is optional.  Mnemonics and register names are case-insensitive.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Union

from .errors import (
    ArityMismatch,
    BadToken,
    MalformedHeader,
    OracleStructure,
    OutOfRange,
    UnknownKeyWarning,
    UnknownMnemonic,
    UnsupportedInstruction,
)

MAX_REGISTER_SIZE = 8
DISPLAY_MODES = ("none", "text", "qasm", "both")


# ---------------------------------------------------------------------------
# Configuration header
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Config:
    register_size: int = 2
    decode: bool = False
    execute: bool = True
    display: str = "text"
    shots: int = 1024
    seed: int = 0
    maintain_coherence: bool = False
    grover_iterations: int = 1
    memory: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_config(self)

    def to_json(self) -> str:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["memory"] = {str(k): v for k, v in sorted(self.memory.items())}
        return json.dumps(data)


_BOOL_KEYS = ("decode", "execute", "maintain_coherence")
_INT_KEYS = ("register_size", "shots", "seed", "grover_iterations")


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_config(cfg: Config) -> None:
    for key in _INT_KEYS:
        if not _is_int(getattr(cfg, key)):
            raise MalformedHeader(f"{key} must be an integer, got {getattr(cfg, key)!r}")
    for key in _BOOL_KEYS:
        if not isinstance(getattr(cfg, key), bool):
            raise MalformedHeader(f"{key} must be true or false, got {getattr(cfg, key)!r}")
    if not 1 <= cfg.register_size <= MAX_REGISTER_SIZE:
        raise OutOfRange(
            f"register_size must lie in [1, {MAX_REGISTER_SIZE}], got {cfg.register_size}"
        )
    if cfg.shots < 1:
        raise OutOfRange(f"shots must be at least 1, got {cfg.shots}")
    if not 0 <= cfg.seed < 2**64:
        raise OutOfRange(f"seed must be a 64-bit unsigned integer, got {cfg.seed}")
    if cfg.grover_iterations < 1:
        raise OutOfRange(f"grover_iterations must be at least 1, got {cfg.grover_iterations}")
    if cfg.display not in DISPLAY_MODES:
        raise MalformedHeader(
            f"display must be one of {', '.join(DISPLAY_MODES)}, got {cfg.display!r}"
        )
    for addr, value in cfg.memory.items():
        if not (_is_int(addr) and _is_int(value)) or value < 0:
            raise MalformedHeader(f"memory entries must map addresses to values >= 0: {addr!r}")


def _config_from_mapping(data: dict, line: int) -> Config:
    known = {f.name for f in fields(Config)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            warnings.warn(f"line {line}: unknown header key {key!r} ignored", UnknownKeyWarning)
            continue
        if key == "display" and isinstance(value, str):
            value = value.lower()
        if key == "memory":
            if not isinstance(value, dict):
                raise MalformedHeader("memory must be a JSON object", line)
            try:
                value = {int(str(k), 10): v for k, v in value.items()}
            except ValueError as exc:
                raise MalformedHeader(f"memory addresses must be decimal: {exc}", line) from None
        kwargs[key] = value
    try:
        return Config(**kwargs)
    except (MalformedHeader, OutOfRange) as exc:
        raise exc.at(line)


def parse_header(text: str) -> tuple[Config, str]:
    """Split an optional leading JSON object off `text`.

    Returns the parsed configuration (defaults for absent keys) and the
    remaining source.  The rest of the header's closing line may only hold
    whitespace or a comment.
    """
    config, body, _ = _split_header(text)
    return config, body


def _split_header(text: str) -> tuple[Config, str, int]:
    stripped = text.lstrip()
    if not stripped.startswith("{"):
        return Config(), text, 0
    start = len(text) - len(stripped)
    start_line = text.count("\n", 0, start) + 1
    try:
        data, end = json.JSONDecoder().raw_decode(text, start)
    except json.JSONDecodeError as exc:
        raise MalformedHeader(f"unparseable JSON header: {exc.msg}", exc.lineno) from None
    newline = text.find("\n", end)
    tail_end = len(text) if newline < 0 else newline
    tail = text[end:tail_end].split(";", 1)[0]
    if tail.strip():
        raise MalformedHeader(
            f"unexpected text after JSON header: {tail.strip()!r}", text.count("\n", 0, end) + 1
        )
    config = _config_from_mapping(data, start_line)
    body_start = len(text) if newline < 0 else newline + 1
    return config, text[body_start:], text.count("\n", 0, body_start)


# ---------------------------------------------------------------------------
# Operands and instructions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Register:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Immediate:
    value: int

    def __str__(self) -> str:
        return f"#{self.value}"


@dataclass(frozen=True)
class RegisterList:
    names: tuple[str, ...]

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


@dataclass(frozen=True)
class MemoryRef:
    base: str
    offset: int = 0

    def __str__(self) -> str:
        return f"[{self.base}, #{self.offset}]"


@dataclass(frozen=True)
class ClassicalRegister:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Flag:
    """A single PSR condition flag, as used by ``TGT Z``."""

    name: str

    def __str__(self) -> str:
        return self.name


Operand = Union[Register, Immediate, RegisterList, MemoryRef, ClassicalRegister, Flag]


class Mnemonic(str, Enum):
    ADC = "ADC"
    ADD = "ADD"
    AND = "AND"
    BIC = "BIC"
    CMN = "CMN"
    CMP = "CMP"
    EOR = "EOR"
    LDR = "LDR"
    LSL = "LSL"
    LSR = "LSR"
    MLA = "MLA"
    MOV = "MOV"
    MRS = "MRS"
    MSR = "MSR"
    MUL = "MUL"
    MVN = "MVN"
    ORR = "ORR"
    RSB = "RSB"
    RSC = "RSC"
    SBC = "SBC"
    STR = "STR"
    SUB = "SUB"
    TEQ = "TEQ"
    TST = "TST"
    HAD = "HAD"
    XXX = "XXX"
    TGT = "TGT"
    MCT = "MCT"
    DIF = "DIF"
    BAR = "BAR"

    def __str__(self) -> str:
        return self.value


# Operand kind codes: R general register, O register or immediate, I immediate,
# P status register, C classical register, M memory ref, L register list,
# F condition flag.
_THREE_OP = [("R", "R", "O")]
SIGNATURES: dict[Mnemonic, list[tuple[str, ...]]] = {
    **{m: _THREE_OP for m in (Mnemonic.ADD, Mnemonic.ADC, Mnemonic.SUB, Mnemonic.SBC,
                              Mnemonic.RSB, Mnemonic.RSC, Mnemonic.AND, Mnemonic.ORR,
                              Mnemonic.EOR, Mnemonic.BIC)},
    **{m: [("R", "O")] for m in (Mnemonic.MOV, Mnemonic.MVN, Mnemonic.CMP, Mnemonic.CMN,
                                 Mnemonic.TEQ, Mnemonic.TST)},
    Mnemonic.MUL: [("R", "R", "R")],
    Mnemonic.MLA: [("R", "R", "R", "R")],
    Mnemonic.LSL: [("R", "R", "I")],
    Mnemonic.LSR: [("R", "R", "I")],
    Mnemonic.LDR: [("R", "M"), ("R", "I")],
    Mnemonic.STR: [("C", "R"), ("R", "M")],
    Mnemonic.MRS: [("R", "P")],
    Mnemonic.MSR: [("P", "R")],
    Mnemonic.HAD: [("R",)],
    Mnemonic.XXX: [("R",)],
    Mnemonic.MCT: [("R",)],
    Mnemonic.TGT: [("R",), ("F",)],
    Mnemonic.DIF: [("L",), ("R",)],
    Mnemonic.BAR: [()],
}

MARKERS = ("ORACLE", "END_ORACLE", "REVERSE_ORACLE")

_BRANCH_HINT = "unravel the branch (unroll the loop, drop labels and branches) before compiling"
_COND_BRANCH_HINT = (
    _BRANCH_HINT + ", then use controlled gates to conditionally run operations"
)
_CONDITIONS = ("EQ", "NE", "CS", "CC", "HS", "LO", "MI", "PL", "VS", "VC",
               "HI", "LS", "GE", "LT", "GT", "LE", "AL")
UNSUPPORTED: dict[str, str] = {
    "B": _BRANCH_HINT,
    "BL": "branch with link has no quantum transformation; " + _BRANCH_HINT,
    "BX": "branch and exchange is not translatable",
    **{"B" + cond: _COND_BRANCH_HINT for cond in _CONDITIONS},
    "LDM": "stack manipulation (LDM) has no quantum transformation",
    "STM": "stack manipulation (STM) has no quantum transformation",
    "SWP": "swap with memory has no quantum transformation",
    "SWI": "software interrupts have no quantum transformation",
    "NOP": "remove NOP instructions before compiling",
    **{m: "coprocessor-specific instructions are not supported"
       for m in ("CDP", "LDC", "MCR", "MRC", "STC")},
}


@dataclass(frozen=True)
class Instruction:
    mnemonic: Mnemonic
    operands: tuple = ()
    in_oracle: bool = False
    source_line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        if not self.operands:
            return str(self.mnemonic)
        return f"{self.mnemonic} " + ", ".join(str(op) for op in self.operands)


@dataclass(frozen=True)
class Program:
    config: Config
    instructions: tuple[Instruction, ...]
    oracle_span: tuple[int, int] | None = None
    # REVERSE_ORACLE sits immediately before instructions[reverse_oracle_at].
    reverse_oracle_at: int | None = None
    marker_lines: dict = field(default_factory=dict, compare=False)

    def events(self):
        """Yield ``("marker", name)`` and ``("instr", Instruction)`` in source order."""
        positions: list[tuple[int, str]] = []
        if self.oracle_span is not None:
            positions.append((self.oracle_span[0], "ORACLE"))
            positions.append((self.oracle_span[1], "END_ORACLE"))
        if self.reverse_oracle_at is not None:
            positions.append((self.reverse_oracle_at, "REVERSE_ORACLE"))
        for i in range(len(self.instructions) + 1):
            # stable order: ORACLE, END_ORACLE, REVERSE_ORACLE at equal positions
            for pos, name in positions:
                if pos == i:
                    yield "marker", name
            if i < len(self.instructions):
                yield "instr", self.instructions[i]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # word | imm | reglist | memref | label
    text: str
    value: object = None

    def __repr__(self) -> str:
        return f"[{self.text}]"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[\s,]+)
  | (?P<reglist>\{[^{}]*\})
  | (?P<memref>\[[^\[\]]*\])
  | (?P<imm>\#\d+(?![\w]))
  | (?P<label>[A-Za-z_][A-Za-z0-9_]*:)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)
_GENERAL_RE = re.compile(r"R\d+\Z")
_CLASSICAL_RE = re.compile(r"CR\d+\Z")
_OFFSET_RE = re.compile(r"#?([+-]?\d+)\Z")
_PSR_NAMES = ("PSR", "CPSR", "APSR")
_FLAG_NAMES = ("N", "Z", "C", "V")


def _canonical_register(name: str, line: int) -> str:
    upper = name.upper()
    if _GENERAL_RE.match(upper):
        return upper
    if upper in _PSR_NAMES:
        return "PSR"
    if upper == "TARGET":
        return "target"
    raise BadToken(f"expected a register name, got {name!r}", line)


def tokenize(line: str, line_no: int = 0) -> list[Token]:
    """Split one source line into tokens; comments start at ``;``."""
    code = line.split(";", 1)[0]
    tokens: list[Token] = []
    pos = 0
    while pos < len(code):
        m = _TOKEN_RE.match(code, pos)
        if m is None:
            snippet = code[pos:].split()[0]
            raise BadToken(f"unrecognised token {snippet!r}", line_no)
        pos = m.end()
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            continue
        if kind == "imm":
            tokens.append(Token("imm", text, int(text[1:], 10)))
        elif kind == "reglist":
            inner = [p.strip() for p in text[1:-1].split(",")]
            if inner == [""]:
                raise BadToken("empty register list", line_no)
            names = tuple(_canonical_register(p, line_no) for p in inner)
            tokens.append(Token("reglist", text, names))
        elif kind == "memref":
            parts = [p.strip() for p in text[1:-1].split(",")]
            base = _canonical_register(parts[0], line_no)
            offset = 0
            if len(parts) == 2:
                om = _OFFSET_RE.match(parts[1])
                if om is None:
                    raise BadToken(f"bad memory offset {parts[1]!r}", line_no)
                offset = int(om.group(1), 10)
            elif len(parts) > 2:
                raise BadToken(f"bad memory reference {text!r}", line_no)
            tokens.append(Token("memref", text, (base, offset)))
        else:
            tokens.append(Token(kind, text))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _operand(tok: Token, line: int) -> Operand:
    if tok.kind == "imm":
        return Immediate(tok.value)
    if tok.kind == "reglist":
        return RegisterList(tok.value)
    if tok.kind == "memref":
        return MemoryRef(*tok.value)
    if tok.kind == "word":
        upper = tok.text.upper()
        if _CLASSICAL_RE.match(upper):
            return ClassicalRegister(upper)
        if upper in _FLAG_NAMES:
            return Flag(upper)
        return Register(_canonical_register(tok.text, line))
    raise BadToken(f"unexpected {tok.text!r}", line)


def _kind_matches(code: str, op: Operand) -> bool:
    if code == "R":
        return isinstance(op, Register) and op.name.startswith("R")
    if code == "O":
        return isinstance(op, Immediate) or _kind_matches("R", op)
    if code == "I":
        return isinstance(op, Immediate)
    if code == "P":
        return isinstance(op, Register) and op.name == "PSR"
    if code == "C":
        return isinstance(op, ClassicalRegister)
    if code == "M":
        return isinstance(op, MemoryRef)
    if code == "L":
        return isinstance(op, RegisterList) and all(_GENERAL_RE.match(n) for n in op.names)
    if code == "F":
        return isinstance(op, Flag)
    raise AssertionError(code)


def _check_signature(mnemonic: Mnemonic, operands: tuple, line: int) -> None:
    sigs = SIGNATURES[mnemonic]
    same_len = [s for s in sigs if len(s) == len(operands)]
    if not same_len:
        counts = " or ".join(sorted({str(len(s)) for s in sigs}))
        raise ArityMismatch(
            f"{mnemonic} takes {counts} operand(s), got {len(operands)}", line
        )
    for sig in same_len:
        if all(_kind_matches(c, op) for c, op in zip(sig, operands)):
            return
    shown = ", ".join(str(op) for op in operands)
    raise ArityMismatch(f"operands of {mnemonic} do not fit its signature: {shown}", line)


def parse_line(line: str, line_no: int) -> Instruction | str | None:
    """Parse one line into an Instruction, a marker name, or None if empty."""
    tokens = tokenize(line, line_no)
    while tokens and tokens[0].kind == "label":
        tokens.pop(0)
    if not tokens:
        return None
    head = tokens[0]
    if head.kind != "word":
        raise BadToken(f"expected a mnemonic, got {head.text!r}", line_no)
    name = head.text.upper()
    if name in MARKERS:
        if len(tokens) > 1:
            raise ArityMismatch(f"{name} takes no operands", line_no)
        return name
    if name in UNSUPPORTED:
        raise UnsupportedInstruction(f"{name}: {UNSUPPORTED[name]}", line_no)
    try:
        mnemonic = Mnemonic(name)
    except ValueError:
        raise UnknownMnemonic(f"unknown mnemonic {head.text!r}", line_no) from None
    operands = tuple(_operand(t, line_no) for t in tokens[1:])
    _check_signature(mnemonic, operands, line_no)
    return Instruction(mnemonic, operands, source_line=line_no)


def parse_program(text: str, config: Config | None = None, line_offset: int = 0) -> Program:
    """Parse header-free assembly text into a Program.

    `line_offset` is added to line numbers, so diagnostics still point into
    the original file after a header was stripped.
    """
    config = config or Config()
    instructions: list[Instruction] = []
    oracle_start = oracle_end = reverse_at = None
    marker_lines: dict[str, int] = {}
    for idx, raw in enumerate(text.splitlines()):
        line_no = idx + 1 + line_offset
        parsed = parse_line(raw, line_no)
        if parsed is None:
            continue
        if isinstance(parsed, str):
            if parsed == "ORACLE":
                if oracle_start is not None:
                    raise OracleStructure("only one ORACLE block is allowed", line_no)
                oracle_start = len(instructions)
            elif parsed == "END_ORACLE":
                if oracle_start is None or oracle_end is not None:
                    raise OracleStructure("END_ORACLE without a matching ORACLE", line_no)
                oracle_end = len(instructions)
            else:
                if oracle_end is None:
                    raise OracleStructure("REVERSE_ORACLE must follow END_ORACLE", line_no)
                if reverse_at is not None:
                    raise OracleStructure("REVERSE_ORACLE may appear only once", line_no)
                reverse_at = len(instructions)
            marker_lines[parsed] = line_no
            continue
        inside = oracle_start is not None and oracle_end is None
        if inside:
            parsed = Instruction(parsed.mnemonic, parsed.operands, True, parsed.source_line)
        instructions.append(parsed)
    if oracle_start is not None and oracle_end is None:
        raise OracleStructure("ORACLE block is never closed by END_ORACLE", marker_lines["ORACLE"])
    span = (oracle_start, oracle_end) if oracle_start is not None else None
    return Program(config, tuple(instructions), span, reverse_at, marker_lines)


def parse_source(text: str) -> Program:
    """Parse a complete source file: optional JSON header plus assembly."""
    config, body, offset = _split_header(text)
    return parse_program(body, config, line_offset=offset)


def format_program(program: Program) -> str:
    """Render a Program back to source text that parses to an equal Program."""
    lines = [program.config.to_json()]
    for kind, item in program.events():
        if kind == "marker":
            lines.append(item)
        else:
            lines.append(("    " if item.in_oracle else "") + str(item))
    return "\n".join(lines) + "\n"


def check_immediate(value: int, register_size: int, line: int | None = None) -> int:
    if value >= 2**register_size:
        raise OutOfRange(
            f"immediate #{value} does not fit in {register_size} bits", line
        )
    return value
