import pytest
from hypothesis import given
from hypothesis import strategies as st

from asm2q.circuit import (
    FLAG_BITS, Gate, GateKind, QuantumCircuit, RegisterFile, invert_segment,
)
from asm2q.errors import DuplicateRegister, IndexOutOfRange, NotInvertible
from asm2q.simulator import StateVector, apply_gate

from support import compile_text, source


def test_register_allocation_is_monotone():
    circuit, regs = QuantumCircuit(), RegisterFile(2)
    assert regs.allocate_register(circuit, "R1") == (0, 1)
    assert regs.allocate_register(circuit, "R2") == (2, 3)
    with pytest.raises(DuplicateRegister):
        regs.allocate_register(circuit, "R1")
    assert circuit.label(0) == "R1[0]" and circuit.label(3) == "R2[1]"


def test_flags_and_target_are_lazy():
    circuit, regs = QuantumCircuit(), RegisterFile(2)
    assert regs.psr is None and regs.target_qubit is None
    psr = regs.flags(circuit)
    assert len(psr) == 4
    assert regs.flag(circuit, "Z") == psr[FLAG_BITS["Z"]]
    assert circuit.label(psr[FLAG_BITS["N"]]) == "PSR.N"
    t, fresh = regs.target(circuit)
    assert fresh and regs.target(circuit) == (t, False)
    assert regs.owner(t) == "target"


def test_ancilla_pool_reuses_lowest_first():
    circuit, regs = QuantumCircuit(), RegisterFile(2)
    a = regs.borrow(circuit, 3)
    regs.release([a[2], a[0]])
    assert regs.borrow(circuit, 1) == [a[0]]
    with pytest.raises(IndexOutOfRange):
        regs.release([a[1], a[1]])


def test_append_single_gate():
    circuit = QuantumCircuit(1)
    circuit.append(Gate.x(0))
    assert circuit.gates == [Gate.x(0)]


def test_append_out_of_range_control():
    with pytest.raises(IndexOutOfRange):
        QuantumCircuit(2).append(Gate.cx(5, 1))


@pytest.mark.parametrize("gate", [
    Gate.mct((0, 0), 1), Gate.mct((0,), 0), Gate.swap(1, 1), Gate.measure(0, 3),
    Gate.mct((0,), 1, negated=(0,)),
])
def test_append_rejects_malformed(gate):
    with pytest.raises(IndexOutOfRange):
        QuantumCircuit(2, 1).append(gate)


def test_barrier_is_identity():
    circuit = QuantumCircuit(2)
    circuit.append(Gate.barrier())
    assert len(circuit.gates) == 1
    state = StateVector(2, basis=3)
    apply_gate(state, circuit.gates[0])
    assert state.amplitudes[3] == 1


def test_invert_segment_reverses():
    assert invert_segment([Gate.x(0), Gate.cx(0, 1)]) == [Gate.cx(0, 1), Gate.x(0)]


def test_invert_segment_rejects_reset():
    with pytest.raises(NotInvertible):
        invert_segment([Gate.x(0), Gate.reset(0)])


def test_grover_oracle_segment_mirrors_itself():
    compiled = compile_text(source(2, "ORACLE", "MOV R1, #1", "END_ORACLE", "REVERSE_ORACLE"),
                            auto_measure=False)
    gates = compiled.circuit.gates
    assert gates == [Gate.x(1), Gate.x(1)]
    for basis in range(4):
        state = StateVector(compiled.circuit.qubit_count, basis=basis)
        for g in gates:
            apply_gate(state, g)
        assert state.amplitudes[basis] == pytest.approx(1)


def test_written_qubits():
    assert Gate.mct((0, 1), 2).written() == (2,)
    assert set(Gate.swap(0, 3).written()) == {0, 3}
    assert Gate.barrier().written() == ()


_GATE = st.tuples(st.sampled_from("xhzcsmn"), st.permutations(range(6)), st.integers(0, 4))


def _gate(entry):
    kind, order, k = entry
    t, rest = order[0], order[1:]
    return {
        "x": lambda: Gate.x(t), "h": lambda: Gate.h(t), "z": lambda: Gate.z(t),
        "c": lambda: Gate.cx(rest[0], t), "s": lambda: Gate.swap(t, rest[0]),
        "m": lambda: Gate.mct(rest[:k], t, negated=rest[k:k + 1]),
        "n": lambda: Gate.mcz(rest[:k], t),
    }[kind]()


@given(st.lists(_GATE, max_size=20), st.integers(0, 63))
def test_segment_then_inverse_is_identity(specs, basis):
    gates = [_gate(s) for s in specs]
    state = StateVector(6, basis=basis)
    for g in gates + invert_segment(gates):
        apply_gate(state, g)
    assert abs(state.amplitudes[basis]) == pytest.approx(1, abs=1e-12)


@given(st.lists(_GATE, max_size=30))
def test_gate_indices_stay_in_range(specs):
    circuit = QuantumCircuit(6)
    circuit.extend(_gate(s) for s in specs)
    assert all(q < circuit.qubit_count for g in circuit.gates for q in g.qubits())
    assert circuit.count(GateKind.BARRIER) == 0
