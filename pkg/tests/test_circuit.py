import numpy as np
import pytest

import rpsim as rp
from rpsim.circuit import Circuit, Gate
from rpsim.refsolver import QuantumState
from rpsim.spinham import build_pauli_terms
from rpsim import qsim

from util import circuit_unitary_oracle


def test_gate_validation():
    Gate("H", (0,))
    Gate("RZ", (2,), 0.5)
    Gate("PauliRot2", (0, 2), 1.0, ("X", "Z"))
    with pytest.raises(ValueError):
        Gate("H", (0,), 0.5)  # angle on a non-rotation
    with pytest.raises(ValueError):
        Gate("RZ", (0,))  # missing angle
    with pytest.raises(ValueError):
        Gate("RX", (0,), np.inf)
    with pytest.raises(ValueError):
        Gate("CNOT", (1, 1))  # duplicate qubits
    with pytest.raises(ValueError):
        Gate("PauliRot2", (0, 1), 1.0, ("X", "Q"))
    with pytest.raises(ValueError):
        Gate("PauliRot2", (0, 1), 1.0)  # letters required


def test_circuit_validation():
    gates = (Gate("H", (0,)),)
    c = Circuit(3, gates, trotter_steps=1, target_time=0.0)
    assert c.body == gates
    with pytest.raises(ValueError):
        Circuit(2, (Gate("H", (5,)),), 1, 0.0)


def test_prepare_singlet_state():
    prep = rp.prepare_singlet()
    assert [g.kind for g in prep] == ["X", "X", "H", "CNOT"]
    psi0 = np.zeros(8, dtype=complex)
    psi0[0] = 1.0
    circ = Circuit(3, tuple(prep), 1, 0.0)
    out = qsim.run_statevector(circ, QuantumState.pure(psi0))
    assert np.allclose(out.data, rp.singlet_vector(3, "0") * np.exp(1j * np.angle(out.data[0b010])), atol=1e-12)
    # population check is phase-free
    assert rp.singlet_population_from_state(out) == pytest.approx(1.0, abs=1e-12)


def test_basis_change_maps_singlet_to_11():
    """After the inverse-preparation rotation the singlet reads out as 11."""
    gates = tuple(rp.measurement_basis_change())
    circ = Circuit(3, gates, 1, 0.0)
    out = qsim.run_statevector(circ, QuantumState.pure(rp.singlet_vector(3, "0")))
    probs = qsim.electron_outcome_probabilities(out)
    assert probs[0b11] == pytest.approx(1.0, abs=1e-12)


def test_trotter_step_worked_angle(prototype):
    """Field x-rotation angle at dt = 1/15 us, perpendicular geometry."""
    terms = build_pauli_terms(prototype)
    gates = rp.trotter_step(terms, 1 / 15, rp.HBAR_NEV_US)
    rx = gates[0]
    assert rx.kind == "RX" and rx.qubits == (0,)
    coeff = terms[0].coefficient
    assert rx.angle == pytest.approx(2 * coeff * (1 / 15) / rp.HBAR_NEV_US, rel=1e-14)
    assert rx.angle == pytest.approx(0.58626, abs=2e-5)
    for g in gates:
        assert g.kind in ("RX", "RY", "RZ", "PauliRot2")


def test_trotter_step_structure(prototype_polar):
    terms = build_pauli_terms(prototype_polar)
    gates = rp.trotter_step(terms, 0.001, rp.HBAR_NEV_US)
    # 6 single-qubit Zeeman rotations (zeros kept here) + 9 two-qubit terms
    assert len(gates) == 15
    kinds = [g.kind for g in gates]
    assert kinds[:6] == ["RX", "RY", "RZ", "RX", "RY", "RZ"]
    assert all(k == "PauliRot2" for k in kinds[6:])
    with pytest.raises(ValueError):
        rp.trotter_step(terms, -0.1, rp.HBAR_NEV_US)


def test_compile_structure(prototype):
    circ = rp.compile(prototype, 1.0, 3)
    assert circ.trotter_steps == 3
    assert circ.target_time == 1.0
    assert circ.prep_len == 4 and circ.tail_len == 2
    assert len(circ.body) == 3 * 15
    assert circ.metadata["delta_t"] == pytest.approx(1.0 / 3)
    assert circ.metadata["system_hash"] == prototype.content_hash()
    with pytest.raises(ValueError):
        rp.compile(prototype, -1.0, 3)
    with pytest.raises(ValueError):
        rp.compile(prototype, 1.0, 0)


def test_compile_zero_time(prototype):
    circ = rp.compile(prototype, 0.0, 2)
    assert all(g.angle == 0.0 for g in circ.body if g.angle is not None)


def test_lowering_preserves_unitary(prototype):
    """Lowered circuit implements the same unitary as the abstract one."""
    for theta in (0.0, np.pi / 2, 1.234):
        sys_t = prototype.with_angles(theta)
        circ = rp.compile(sys_t, 0.37, 2)
        low = rp.lower_to_basis(circ)
        U_abstract = circuit_unitary_oracle(circ.gates, 3)
        U_lowered = circuit_unitary_oracle(low.gates, 3)
        assert np.allclose(U_abstract, U_lowered, atol=1e-12)
        assert low.prep_len == 4 and low.tail_len == 2


def test_lowering_basis_kinds_only(prototype):
    low = rp.lower_to_basis(rp.compile(prototype, 0.5, 2))
    for g in low.gates:
        assert g.kind in ("X", "H", "CNOT", "RX", "RY", "RZ")


def test_gate_counts(prototype):
    for n, total in ((1, 61), (3, 171), (10, 556)):
        low = rp.lower_to_basis(rp.compile(prototype, 1.0, n))
        counts = rp.gate_count(low)
        assert counts["total"] == total == 6 + 55 * n
        assert counts["trotter_only"] == 55 * n
        per_kind = counts["per_kind"]
        assert per_kind["CNOT"] == 1 + 18 * n + 1
        assert sum(per_kind.values()) == total


def test_full_pruning_drops_zero_couplings(prototype):
    low = rp.lower_to_basis(rp.compile(prototype, 1.0, 1), prune_all_zero=True)
    assert rp.gate_count(low)["trotter_only"] == 21


def test_no_zeeman_pruning_keeps_zero_rotations(prototype):
    low = rp.lower_to_basis(rp.compile(prototype, 1.0, 1), prune_zeeman_zero=False)
    # the two zero-angle field rotations per step come back
    assert rp.gate_count(low)["trotter_only"] == 57


def test_lowering_zero_time_prunes_field_rotations(prototype):
    low = rp.lower_to_basis(rp.compile(prototype, 0.0, 1))
    assert rp.gate_count(low)["trotter_only"] == 51


def test_dump_format(prototype):
    circ = rp.lower_to_basis(rp.compile(prototype, 1.0, 1))
    text = rp.dump_circuit(circ)
    lines = text.splitlines()
    assert lines[0] == "# qubits=3"
    assert lines[1] == "# steps=1"
    assert lines[2] == "X 0"
    assert lines[5] == "CNOT 0,1"
    assert text.endswith("\n")
    assert "\r" not in text
    # every rotation line carries an angle in radians
    for line in lines[2:]:
        kind = line.split()[0]
        if kind.startswith("R"):
            assert len(line.split(" ")[1].split(",")) == 2


def test_dump_unlowered_two_qubit_rotation(prototype_polar):
    circ = rp.compile(prototype_polar, 0.0771, 1)
    text = rp.dump_circuit(circ)
    want = f"RZZ 0,2,{2 * 2.5 * 0.0771 / rp.HBAR_NEV_US:.12g}"
    assert want in text.splitlines()


def test_body_step_slices_are_equal(prototype):
    circ = rp.compile(prototype, 0.9, 3)
    per = len(circ.body) // 3
    step_kinds = [tuple(g.kind for g in circ.body[i * per : (i + 1) * per]) for i in range(3)]
    assert step_kinds[0] == step_kinds[1] == step_kinds[2]
