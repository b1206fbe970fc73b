"""Gate-circuit compilation of Trotterized radical-pair evolution.

A compiled circuit is: singlet preparation, n first-order product-formula
steps (one rotation per Hamiltonian term, in term order), then the
measurement basis change that maps the electron singlet onto |11>.

Rotation conventions:
    RX/RY/RZ(phi)      = exp(-i phi/2 sigma)
    PauliRot2(a,b,phi) = exp(-i phi/2 sigma_a x sigma_b)
so a term with energy coefficient c evolved for delta_t carries the angle
phi = 2 c delta_t / hbar.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .spinham import PauliTerm, RadicalPairSystem, build_pauli_terms

BASIS_KINDS = ("X", "H", "CNOT", "RX", "RY", "RZ")
ROTATION_KINDS = ("RX", "RY", "RZ", "PauliRot2")

_ROT_FOR_LETTER = {"X": "RX", "Y": "RY", "Z": "RZ"}


@dataclass(frozen=True)
class Gate:
    """One gate: kind, qubit indices, rotation angle, PauliRot2 letters."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    letters: tuple[str, str] | None = None

    def __post_init__(self):
        if self.kind in ROTATION_KINDS:
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")
        if self.kind == "PauliRot2":
            if self.letters is None or len(self.letters) != 2:
                raise ValueError("PauliRot2 needs two Pauli letters")
            if set(self.letters) - {"X", "Y", "Z"}:
                raise ValueError("PauliRot2 letters must be X, Y or Z")
        elif self.letters is not None:
            raise ValueError(f"{self.kind} takes no letters")
        expected = 2 if self.kind in ("CNOT", "PauliRot2") else 1
        if len(self.qubits) != expected:
            raise ValueError(f"{self.kind} acts on {expected} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("qubit indices must be distinct")


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate program: prep ++ trotter steps ++ basis change.

    prep_len and tail_len delimit the preparation and basis-change
    segments so gate censuses can attribute counts to the Trotter body.
    """

    n_qubits: int
    gates: tuple[Gate, ...]
    trotter_steps: int
    target_time: float
    prep_len: int = 0
    tail_len: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for gate in self.gates:
            if max(gate.qubits) >= self.n_qubits:
                raise ValueError(
                    f"gate {gate.kind} on {gate.qubits} exceeds {self.n_qubits} qubits"
                )

    @property
    def body(self) -> tuple[Gate, ...]:
        """The Trotter-step gates, prep and basis change excluded."""
        end = len(self.gates) - self.tail_len
        return self.gates[self.prep_len : end]


def prepare_singlet() -> list[Gate]:
    """Gates taking |00> on the electron qubits to (|01> - |10>)/sqrt(2)."""
    return [
        Gate("X", (0,)),
        Gate("X", (1,)),
        Gate("H", (0,)),
        Gate("CNOT", (0, 1)),
    ]


def measurement_basis_change() -> list[Gate]:
    """Maps the electron singlet onto |11> for computational-basis readout."""
    return [Gate("CNOT", (0, 1)), Gate("H", (0,))]


def trotter_step(terms: Sequence[PauliTerm], delta_t: float, hbar: float) -> list[Gate]:
    """One product-formula step: a rotation per term, in term order.

    Zero-coefficient terms still emit angle-0 rotations (pruning is a
    lowering-time policy). delta_t = 0 is allowed and yields all-zero
    angles.

    Raises:
        ValueError: negative delta_t, or a term with more than two
            non-identity letters.
    """
    if delta_t < 0:
        raise ValueError("delta_t must be >= 0")
    gates: list[Gate] = []
    for term in terms:
        support = [(site, s) for site, s in enumerate(term.letters) if s != "I"]
        angle = 2.0 * term.coefficient * delta_t / hbar
        if len(support) == 1:
            site, letter = support[0]
            gates.append(Gate(_ROT_FOR_LETTER[letter], (site,), angle))
        elif len(support) == 2:
            (q0, l0), (q1, l1) = support
            gates.append(Gate("PauliRot2", (q0, q1), angle, letters=(l0, l1)))
        elif len(support) > 2:
            raise ValueError("terms with more than 2 non-identity letters unsupported")
        # weight-0 terms are global phases; nothing to emit
    return gates


def compile(system: RadicalPairSystem, t: float, n: int) -> Circuit:
    """Compile evolution to time t with n Trotter steps.

    Deterministic: identical inputs produce identical gate lists.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    terms = build_pauli_terms(system)
    delta_t = t / n
    prep = prepare_singlet()
    step = trotter_step(terms, delta_t, system.hbar)
    tail = measurement_basis_change()
    gates = tuple(prep + step * n + tail)
    metadata = {
        "system_hash": system.content_hash(),
        "term_order": [
            (term.coefficient, "".join(term.letters)) for term in terms
        ],
        "delta_t": delta_t,
        "hbar": system.hbar,
    }
    return Circuit(
        n_qubits=system.n_sites,
        gates=gates,
        trotter_steps=n,
        target_time=t,
        prep_len=len(prep),
        tail_len=len(tail),
        metadata=metadata,
    )


def _lower_gate(gate: Gate, prune_zeeman_zero: bool, prune_all_zero: bool) -> list[Gate]:
    if gate.kind != "PauliRot2":
        if (
            gate.kind in ("RX", "RY", "RZ")
            and gate.angle == 0.0
            and (prune_zeeman_zero or prune_all_zero)
        ):
            return []
        return [gate]
    if gate.angle == 0.0 and prune_all_zero:
        return []
    q0, q1 = gate.qubits
    before: list[Gate] = []
    after: list[Gate] = []
    for letter, q in zip(gate.letters, gate.qubits):
        if letter == "X":
            before.append(Gate("H", (q,)))
            after.append(Gate("H", (q,)))
        elif letter == "Y":
            before.append(Gate("RX", (q,), np.pi / 2))
            after.append(Gate("RX", (q,), -np.pi / 2))
        # Z needs no conjugation
    core = [Gate("CNOT", (q0, q1)), Gate("RZ", (q1,), gate.angle), Gate("CNOT", (q0, q1))]
    return before + core + after


def lower_to_basis(
    circuit: Circuit,
    prune_zeeman_zero: bool = True,
    prune_all_zero: bool = False,
) -> Circuit:
    """Rewrite PauliRot2 gates over the {X, H, CNOT, RX, RY, RZ} set.

    Each PauliRot2(a, b, phi) becomes single-qubit basis changes around
    CNOT - RZ(phi) - CNOT: letter X contributes H before and after on its
    qubit, letter Y contributes RX(pi/2) before and RX(-pi/2) after,
    letter Z contributes nothing.

    Pruning policy (the asymmetry reproduces published gate censuses):
    two-qubit rotations are lowered even at angle 0, while single-qubit
    rotations with exactly-zero angle are dropped iff prune_zeeman_zero.
    prune_all_zero=True instead drops every zero-angle rotation,
    two-qubit ones included.
    """
    segments = []
    for segment in (
        circuit.gates[: circuit.prep_len],
        circuit.body,
        circuit.gates[len(circuit.gates) - circuit.tail_len :],
    ):
        lowered: list[Gate] = []
        for gate in segment:
            lowered.extend(_lower_gate(gate, prune_zeeman_zero, prune_all_zero))
        segments.append(lowered)
    metadata = dict(circuit.metadata)
    metadata.update(
        lowered=True,
        prune_zeeman_zero=prune_zeeman_zero,
        prune_all_zero=prune_all_zero,
    )
    return Circuit(
        n_qubits=circuit.n_qubits,
        gates=tuple(segments[0] + segments[1] + segments[2]),
        trotter_steps=circuit.trotter_steps,
        target_time=circuit.target_time,
        prep_len=len(segments[0]),
        tail_len=len(segments[2]),
        metadata=metadata,
    )


def gate_count(circuit: Circuit) -> dict:
    """Census of the gate list: total, per kind, and Trotter-body-only."""
    per_kind: dict[str, int] = {}
    for gate in circuit.gates:
        per_kind[gate.kind] = per_kind.get(gate.kind, 0) + 1
    return {
        "total": len(circuit.gates),
        "per_kind": per_kind,
        "trotter_only": len(circuit.body),
    }


def dump_circuit(circuit: Circuit) -> str:
    """Line-oriented text form, one gate per line, stable ordering.

    Format: `KIND q0[,q1][,angle_rad]` after `# qubits=` / `# steps=`
    headers. PauliRot2 gates print as R<ab>, e.g. RXZ 0,2,0.123.
    """
    lines = [f"# qubits={circuit.n_qubits}", f"# steps={circuit.trotter_steps}"]
    for gate in circuit.gates:
        kind = gate.kind if gate.kind != "PauliRot2" else "R" + "".join(gate.letters)
        fields = [str(q) for q in gate.qubits]
        if gate.angle is not None:
            fields.append(f"{gate.angle:.12g}")
        lines.append(f"{kind} " + ",".join(fields))
    return "\n".join(lines) + "\n"
