import itertools

import pytest

from asm2q.circuit import FLAG_BITS, Gate, GateKind
from asm2q.errors import NotInvertible, OutOfRange, RewriteInCoherentMode, WidthMismatch
from asm2q.lowering import Workspace
from asm2q.lowering.logic import FlagUpdate, build_bitwise, build_store

from support import (
    ancillas_clean, compare_flags, compile_text, flag_value, oracle, register_value, run_basis,
    source,
)


@pytest.mark.parametrize("op, rn, op2, expected", [
    ("AND", 0b11, 0b01, 0b01),
    ("BIC", 0b11, 0b01, 0b10),
])
def test_bitwise_small_cases(op, rn, op2, expected):
    compiled = compile_text(source(2, f"{op} R3, R1, R2"), ("R1", "R2"))
    idx, _ = run_basis(compiled, {"R1": rn, "R2": op2})
    assert register_value(compiled, idx, "R3") == expected


@pytest.mark.parametrize("op", ["AND", "ORR", "EOR", "BIC", "MVN"])
def test_bitwise_exhaustive_three_bits(op):
    n = 3
    line = "MVN R3, R2" if op == "MVN" else f"{op} R3, R1, R2"
    compiled = compile_text(source(n, line), ("R1", "R2"))
    # per-bit logic needs no scratch qubits
    assert compiled.registers.ancillas == []
    for a, b in itertools.product(range(8), repeat=2):
        idx, p = run_basis(compiled, {"R1": a, "R2": b})
        assert p > 1 - 1e-12
        assert register_value(compiled, idx, "R3") == oracle(op, n, a, b)
        assert (register_value(compiled, idx, "R1"), register_value(compiled, idx, "R2")) == (a, b)


def test_bic_uses_a_negated_control():
    compiled = compile_text(source(1, "BIC R3, R1, R2"), ("R1", "R2"))
    (gate,) = compiled.circuit.gates
    assert gate.kind is GateKind.MCT and len(gate.negated_controls) == 1


def test_bitwise_rejects_unknown_kind_and_width():
    compiled = compile_text(source(2, "MOV R1, #0"))
    ws = Workspace(compiled.circuit, compiled.registers)
    with pytest.raises(ValueError):
        build_bitwise(ws, "nand", (0, 1), (0, 1), (0, 1))
    with pytest.raises(WidthMismatch):
        build_bitwise(ws, "and", (0, 1), (0,), (0, 1))


def test_flag_update_needs_a_flag():
    with pytest.raises(ValueError):
        FlagUpdate(zero=False, negative=False, carry=False, overflow=False)
    assert FlagUpdate().names == ("Z", "N", "V")


def test_mov_zero_emits_nothing():
    compiled = compile_text(source(2, "MOV R1, #0"))
    assert compiled.circuit.gates == []
    assert compiled.circuit.qubit_count == 2


def test_mov_one_flips_low_bit():
    compiled = compile_text(source(2, "MOV R2, #1"))
    r2 = compiled.registers.registers["R2"]
    assert compiled.circuit.gates == [Gate.x(r2[0])]


def test_mov_inside_oracle_flips_clear_bits():
    compiled = compile_text(source(2, "ORACLE", "MOV R1, #1", "END_ORACLE"))
    r1 = compiled.registers.registers["R1"]
    assert compiled.circuit.gates == [Gate.x(r1[1])]


def test_mov_register_copy_and_rewrite():
    compiled = compile_text(source(3, "MOV R1, #5", "MOV R2, R1", "MOV R1, #2"))
    idx, _ = run_basis(compiled, {})
    assert register_value(compiled, idx, "R2") == 5
    assert register_value(compiled, idx, "R1") == 2
    assert compiled.circuit.count(GateKind.RESET) > 0


def test_mov_rewrite_rejected_in_coherent_mode():
    with pytest.raises(RewriteInCoherentMode):
        compile_text(source(2, "MOV R1, #1", "MOV R1, #2", coherent=True))


def test_mov_to_itself_is_a_no_op():
    compiled = compile_text(source(2, "MOV R1, #3", "MOV R1, R1"))
    assert len(compiled.circuit.gates) == 2


def test_mov_immediate_range():
    with pytest.raises(OutOfRange):
        compile_text(source(2, "MOV R1, #4"))


def test_ldr_reads_configured_memory():
    compiled = compile_text(source(3, "LDR R1, [R0, #4]", "LDR R2, [R0, #5]", memory={"4": 6}))
    idx, _ = run_basis(compiled, {})
    assert register_value(compiled, idx, "R1") == 6
    assert register_value(compiled, idx, "R2") == 0


def test_str_memory_form_targets_classical_register():
    compiled = compile_text(source(2, "MOV R1, #2", "STR R1, [R0, #3]"))
    assert "CR3" in compiled.registers.classical_registers


def test_store_width_mismatch():
    compiled = compile_text(source(2, "MOV R1, #1", "STR CR1, R1"))
    ws = Workspace(compiled.circuit, compiled.registers)
    with pytest.raises(WidthMismatch):
        build_store(ws, compiled.registers.registers["R1"], (0,))


def test_auto_measure_when_no_store():
    compiled = compile_text(source(2, "MOV R1, #1", "MOV R2, #2"), auto_measure=True)
    assert set(compiled.registers.classical_registers) == {"R1", "R2"}
    no_auto = compile_text(source(2, "MOV R1, #1", "STR CR1, R1"), auto_measure=True)
    assert set(no_auto.registers.classical_registers) == {"CR1"}


def test_mrs_copies_single_flag():
    compiled = compile_text(source(4, "MRS R1, PSR"), ("PSR",))
    idx, _ = run_basis(compiled, {}, {"Z": 1})
    assert register_value(compiled, idx, "R1") == 1 << FLAG_BITS["Z"]


def test_msr_then_mrs_round_trip():
    for value in range(16):
        compiled = compile_text(source(4, f"MOV R1, #{value}", "MSR PSR, R1", "MRS R2, PSR"))
        idx, _ = run_basis(compiled, {})
        assert register_value(compiled, idx, "R2") == value


def test_mrs_after_compare_of_equal_registers():
    compiled = compile_text(source(3, "MOV R1, #5", "CMP R1, R1", "MRS R2, PSR"))
    idx, _ = run_basis(compiled, {})
    assert (register_value(compiled, idx, "R2") >> FLAG_BITS["Z"]) & 1 == 1


def test_cmp_equal_values():
    compiled = compile_text(source(3, "CMP R1, R2"), ("R1", "R2"))
    idx, _ = run_basis(compiled, {"R1": 2, "R2": 2})
    assert flag_value(compiled, idx, "Z") == 1
    assert flag_value(compiled, idx, "N") == 0


def test_cmn_overflow_sets_carry():
    compiled = compile_text(source(2, "CMN R1, R2"), ("R1", "R2"))
    idx, _ = run_basis(compiled, {"R1": 3, "R2": 1})
    assert flag_value(compiled, idx, "Z") == 1
    assert flag_value(compiled, idx, "C") == 1


def test_tst_disjoint_bits_sets_zero():
    compiled = compile_text(source(2, "TST R1, R2"), ("R1", "R2"))
    idx, _ = run_basis(compiled, {"R1": 0b10, "R2": 0b01})
    assert flag_value(compiled, idx, "Z") == 1


@pytest.mark.parametrize("op", ["CMP", "CMN", "TEQ", "TST"])
def test_compare_with_immediate(op):
    n = 3
    for k in range(8):
        compiled = compile_text(source(n, f"{op} R1, #{k}", coherent=True), ("R1",))
        for a in range(8):
            idx, _ = run_basis(compiled, {"R1": a})
            for flag, bit in compare_flags(op, n, a, k).items():
                assert flag_value(compiled, idx, flag) == bit
            assert ancillas_clean(compiled, idx)


def test_teq_keeps_carry():
    compiled = compile_text(source(2, "TEQ R1, R2"), ("R1", "R2", "PSR"))
    idx, _ = run_basis(compiled, {"R1": 1, "R2": 1}, {"C": 1})
    assert flag_value(compiled, idx, "C") == 1


def test_second_compare_resets_flags_in_reset_mode():
    compiled = compile_text(source(2, "CMP R1, R2", "CMP R2, R1"), ("R1", "R2"))
    idx, _ = run_basis(compiled, {"R1": 1, "R2": 2})
    assert flag_value(compiled, idx, "N") == compare_flags("CMP", 2, 2, 1)["N"]
    assert flag_value(compiled, idx, "C") == compare_flags("CMP", 2, 2, 1)["C"]


def test_second_compare_rejected_in_coherent_mode():
    with pytest.raises(RewriteInCoherentMode):
        compile_text(source(2, "CMP R1, R2", "CMP R2, R1", coherent=True), ("R1", "R2"))


def test_store_inside_oracle_is_not_invertible():
    with pytest.raises(NotInvertible) as info:
        compile_text(source(2, "ORACLE", "STR CR1, R1", "END_ORACLE", "REVERSE_ORACLE"))
    assert info.value.line == 5
