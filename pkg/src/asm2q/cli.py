"""Command-line driver: parse, lower, emit and simulate one assembly file.

Option precedence is command-line flag, then JSON header, then default.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from .compiler import CompiledProgram, TraceEntry, compile_program
from .emitter import emit_qasm, emit_text_diagram
from .errors import Asm2QError
from .frontend import DISPLAY_MODES, Config, parse_source
from .simulator import Histogram, run


@dataclass
class RunReport:
    qasm_path: Path | None = None
    qasm: str | None = None
    diagram: str | None = None
    histogram: Histogram | None = None
    decode_trace: list[TraceEntry] | None = None

    def render(self) -> str:
        parts: list[str] = []
        if self.decode_trace is not None:
            parts.append("decode:\n" + "\n".join(str(e) for e in self.decode_trace))
        if self.diagram is not None:
            parts.append(self.diagram.rstrip("\n"))
        if self.qasm is not None:
            parts.append(self.qasm.rstrip("\n"))
        if self.qasm_path is not None:
            parts.append(f"wrote {self.qasm_path}")
        if self.histogram is not None:
            parts.append(format_histogram(self.histogram))
        return "\n\n".join(parts) + "\n" if parts else ""


def format_histogram(hist: Histogram) -> str:
    """`bitstring: count` lines, most frequent first, with per-register values."""
    lines = []
    for key, count in hist.sorted_items():
        values = " ".join(f"{name}={v}" for name, v in hist.values(key).items())
        lines.append(f"{key or '-'}: {count}" + (f"  {values}" if values else ""))
    return "\n".join(lines) if lines else "(no measurements)"


def decode_trace(compiled: CompiledProgram) -> list[TraceEntry]:
    return list(compiled.trace)


def execute(compiled: CompiledProgram) -> Histogram:
    cfg = compiled.config
    return run(compiled.circuit, shots=cfg.shots, seed=cfg.seed,
               registers=compiled.registers.classical_registers)


def build_report(compiled: CompiledProgram, qasm_path: Path | None = None) -> RunReport:
    cfg = compiled.config
    report = RunReport()
    if cfg.decode:
        report.decode_trace = decode_trace(compiled)
    if cfg.display in ("text", "both"):
        report.diagram = emit_text_diagram(compiled.circuit, compiled.registers)
    if cfg.display in ("qasm", "both") or qasm_path is not None:
        text = emit_qasm(compiled.circuit, compiled.registers).text
        if qasm_path is not None:
            qasm_path.write_text(text, encoding="utf-8")
            report.qasm_path = qasm_path
        if cfg.display in ("qasm", "both"):
            report.qasm = text
    if cfg.execute:
        report.histogram = execute(compiled)
    return report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="asm2q",
        description="Compile ARM-style assembly with quantum mnemonics to a circuit, "
                    "then emit and simulate it.",
    )
    p.add_argument("path", type=Path, help="assembly source file")
    p.add_argument("--shots", type=int, help="simulation repetitions")
    p.add_argument("--seed", type=int, help="simulator RNG seed")
    p.add_argument("--emit-qasm", type=Path, metavar="PATH", help="write OpenQASM 2.0 here")
    p.add_argument("--display", choices=DISPLAY_MODES, help="what to print about the circuit")
    p.add_argument("--no-execute", action="store_true", help="skip simulation")
    p.add_argument("--decode", action="store_true", help="print the per-instruction trace")
    p.add_argument("--coherent", action="store_true",
                   help="uncompute instead of resetting (maintain_coherence)")
    return p


def apply_overrides(cfg: Config, args: argparse.Namespace) -> Config:
    changes = {}
    if args.shots is not None:
        changes["shots"] = args.shots
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.display is not None:
        changes["display"] = args.display
    if args.no_execute:
        changes["execute"] = False
    if args.decode:
        changes["decode"] = True
    if args.coherent:
        changes["maintain_coherence"] = True
    return dataclasses.replace(cfg, **changes) if changes else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    path: Path = args.path
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        print(f"{path}: file not found", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{path}: {exc.strerror}", file=sys.stderr)
        return 1
    try:
        program = parse_source(text)
        program = dataclasses.replace(program, config=apply_overrides(program.config, args))
        report = build_report(compile_program(program), args.emit_qasm)
    except Asm2QError as exc:
        print(f"{path}:{exc.line or 0}: {exc.message}", file=sys.stderr)
        return 1
    sys.stdout.write(report.render())
    return 0


if __name__ == "__main__":
    sys.exit(main())
