"""Measurement protocols: population traces, yield curves, and sweeps.

Every trace here follows the per-time-point convention: the value at
grid time t comes from a fresh n-step circuit with step size t/n, which
is what a gate-based device would execute for each requested time.

Performance notes (single-core): sweeping 128 angles with n=1024 steps
over a 1001-point grid is far too slow gate by gate in Python, so the
statevector path composes the closed-form per-term unitaries
U_k = cos(h) I - i sin(h) P_k (h = c dt / hbar), which is exactly the
matrix of the compiled rotation sequence, batched over the time grid.
The noisy path composes per-gate superoperators of the lowered circuit
(depolarizing channels folded in) the same way. Both are pinned to the
per-gate simulators by equivalence tests.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from itertools import product as _product

import numpy as np

from . import qsim
from .circuit import compile as compile_circuit
from .circuit import lower_to_basis, measurement_basis_change, trotter_step
from .observables import YieldCurve, singlet_yield
from .paulis import embedded_pauli, pauli_string_matrix
from .refsolver import (
    PopulationTrace,
    QuantumState,
    apply_decay,
    evolve_exact,
    initial_state,
    singlet_vector,
)
from .spinham import RadicalPairSystem, build_pauli_terms, to_dense_matrix

TAIL_EPSILON = 1e-6  # survival threshold for tail="extend"


def time_grid(t_max: float, dt: float, k: float | None = None, tail: str = "none") -> np.ndarray:
    """Uniform grid [0, t_max] with step dt; optionally extended.

    tail="extend" lengthens the grid until exp(-k t) < 1e-6 so the
    truncated yield integral approximates the infinite-limit value.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if t_max < dt:
        raise ValueError("t_max must be >= dt")
    end = t_max
    if tail == "extend":
        if not k or k <= 0:
            raise ValueError("tail extension needs a positive rate")
        end = max(t_max, -np.log(TAIL_EPSILON) / k)
    elif tail != "none":
        raise ValueError(f"unknown tail policy {tail!r}")
    n_steps = int(np.ceil(round(end / dt, 9)))
    return np.arange(n_steps + 1) * dt


# ---------------------------------------------------------------------------
# reference (exact) traces

def reference_trace(
    system: RadicalPairSystem,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
) -> PopulationTrace:
    """Undecayed singlet populations from the eigendecomposition solver."""
    times = time_grid(t_max, dt, k=system.k_singlet, tail=tail)
    H = to_dense_matrix(build_pauli_terms(system), system.n_sites)
    kind = "density" if nuclear == "mixed" else "pure"
    state0 = initial_state(nuclear, system.n_sites, kind=kind)
    return evolve_exact(H, state0, times, hbar=system.hbar)


# ---------------------------------------------------------------------------
# batched Trotter statevector path

def _term_data(system: RadicalPairSystem):
    terms = build_pauli_terms(system)
    coeffs = np.array([t.coefficient for t in terms])
    mats = np.stack([pauli_string_matrix(t.letters) for t in terms])
    return coeffs, mats


def _batched_step_unitaries(coeffs, mats, dts, hbar) -> np.ndarray:
    """U_step(dt) for a batch of step sizes; terms applied in list order."""
    T = len(dts)
    d = mats.shape[1]
    eye = np.eye(d, dtype=complex)
    U = np.broadcast_to(eye, (T, d, d)).copy()
    for c, P in zip(coeffs, mats):
        h = c * np.asarray(dts) / hbar  # half-angle of the rotation
        Uk = np.cos(h)[:, None, None] * eye - 1j * np.sin(h)[:, None, None] * P
        U = Uk @ U
    return U


def _batched_power(U: np.ndarray, n: int) -> np.ndarray:
    T, d, _ = U.shape
    out = np.broadcast_to(np.eye(d, dtype=complex), (T, d, d)).copy()
    base = U
    e = n
    while e:
        if e & 1:
            out = base @ out
        e >>= 1
        if e:
            base = base @ base
    return out


def _nuclear_bit_configs(n_nuc: int, nuclear: str) -> list[str]:
    if nuclear == "up":
        return ["0" * n_nuc]
    if nuclear == "down":
        return ["1" * n_nuc]
    if nuclear == "mixed":
        return ["".join(bits) for bits in _product("01", repeat=n_nuc)]
    raise ValueError(f"unknown nuclear_config {nuclear!r}")


def trotter_trace_statevector(
    system: RadicalPairSystem,
    n: int,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
) -> PopulationTrace:
    """Undecayed populations from the noiseless Trotter circuit.

    nuclear="mixed" averages the pure-configuration runs, which equals
    the density-matrix run with maximally mixed nuclei.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    times = time_grid(t_max, dt, k=system.k_singlet, tail=tail)
    coeffs, mats = _term_data(system)
    U = _batched_step_unitaries(coeffs, mats, times[1:] / n, system.hbar)
    U = _batched_power(U, n)
    configs = _nuclear_bit_configs(system.n_nuclei, nuclear)
    psi0 = np.stack([singlet_vector(system.n_sites, bits) for bits in configs])
    evolved = np.einsum("tab,cb->tca", U, psi0)  # (T-1, config, dim)
    d_nuc = 2**system.n_nuclei
    block = evolved.reshape(len(times) - 1, len(configs), 4, d_nuc)
    amp = (block[:, :, 0b01, :] - block[:, :, 0b10, :]) / np.sqrt(2)
    pops = np.empty(len(times))
    pops[0] = 1.0
    pops[1:] = (np.abs(amp) ** 2).sum(axis=2).mean(axis=1)
    return PopulationTrace(times, pops, decayed=False)


# ---------------------------------------------------------------------------
# batched noisy density path (lowered circuit, per-gate depolarizing)

def _full_unitary(U: np.ndarray, qubits, n: int) -> np.ndarray:
    """Embed a small gate unitary into the full 2^n space."""
    d = 2**n
    cols = np.eye(d, dtype=complex).reshape([2] * (2 * n))
    out = qsim._apply_to_axes(cols, U, list(qubits))
    return out.reshape(d, d)


def _unitary_superop(U_full: np.ndarray) -> np.ndarray:
    # row-major vec: vec(U rho U^dag) = (U kron conj(U)) vec(rho)
    return np.kron(U_full, U_full.conj())


def _depol_superop(qubits, p: float, n: int) -> np.ndarray:
    d = 2**n
    S = np.empty((d * d, d * d), dtype=complex)
    basis = np.zeros((d, d), dtype=complex)
    for j in range(d * d):
        basis[:] = 0
        basis[j // d, j % d] = 1
        S[:, j] = qsim.depolarize(basis, list(qubits), p, n).reshape(-1)
    return S


class _StepTemplate:
    """Lowered Trotter step as constant superoperator blocks plus
    delta_t-scaled rotations, mirroring the canonical lowering."""

    def __init__(self, system: RadicalPairSystem, noise, prune_zeeman_zero=True, prune_all_zero=False):
        n = system.n_sites
        d = 2**n
        self.n_sites = n
        self.dim = d
        noisy = noise is not None and noise.enabled
        p1 = noise.p_depol_1q if noisy else 0.0
        p2 = noise.p_depol_2q if noisy else 0.0
        depol_cache: dict = {}

        def depol(qubits, p):
            key = (tuple(qubits), p)
            if key not in depol_cache:
                depol_cache[key] = (
                    np.eye(d * d, dtype=complex)
                    if p == 0.0
                    else _depol_superop(qubits, p, n)
                )
            return depol_cache[key]

        def gate_so(kind, qubits, angle=None, letters=None):
            from .circuit import Gate

            U = qsim.gate_matrix(Gate(kind, tuple(qubits), angle, letters))
            return _unitary_superop(_full_unitary(U, qubits, n))

        # ops: ("const", S) applied as S_tot <- S @ S_tot (token carries a
        # ready superop), ("rz", q, rate) and ("rot", axis, q, rate) are
        # built per delta_t batch. Each scaled op's depolarizing channel is
        # folded into the const block that follows it.
        ops: list = []
        const = np.eye(d * d, dtype=complex)

        def push_const(S):
            nonlocal const
            const = S @ const

        def flush():
            nonlocal const
            ops.append(("const", const))
            const = np.eye(d * d, dtype=complex)

        # angle per unit delta_t: trotter_step at delta_t = 1
        rate_gates = trotter_step(build_pauli_terms(system), 1.0, system.hbar)
        for gate in rate_gates:
            if gate.kind in ("RX", "RY", "RZ"):
                if gate.angle == 0.0 and (prune_zeeman_zero or prune_all_zero):
                    continue
                q = gate.qubits[0]
                flush()
                if gate.kind == "RZ":
                    ops.append(("rz", q, gate.angle))
                else:
                    ops.append(("rot", gate.kind[1], q, gate.angle))
                push_const(depol((q,), p1))
            elif gate.kind == "PauliRot2":
                if gate.angle == 0.0 and prune_all_zero:
                    continue
                q0, q1 = gate.qubits
                before, after = [], []
                for letter, q in zip(gate.letters, gate.qubits):
                    if letter == "X":
                        before.append(("H", (q,), None))
                        after.append(("H", (q,), None))
                    elif letter == "Y":
                        before.append(("RX", (q,), np.pi / 2))
                        after.append(("RX", (q,), -np.pi / 2))
                for kind, qubits, angle in before:
                    push_const(depol(qubits, p1) @ gate_so(kind, qubits, angle))
                push_const(depol((q0, q1), p2) @ gate_so("CNOT", (q0, q1)))
                flush()
                ops.append(("rz", q1, gate.angle))
                push_const(depol((q1,), p1))
                push_const(depol((q0, q1), p2) @ gate_so("CNOT", (q0, q1)))
                for kind, qubits, angle in after:
                    push_const(depol(qubits, p1) @ gate_so(kind, qubits, angle))
            else:
                raise ValueError(f"unexpected gate in Trotter step: {gate.kind}")
        flush()
        self.ops = ops
        self._z_signs = {}
        self._paulis = {}
        for op in ops:
            if op[0] == "rz":
                q = op[1]
                if q not in self._z_signs:
                    bits = (np.arange(d) >> (n - 1 - q)) & 1
                    self._z_signs[q] = 1.0 - 2.0 * bits
            elif op[0] == "rot":
                _, axis, q, _ = op
                self._paulis[(axis, q)] = embedded_pauli(axis, q, n)

    def superops(self, dts: np.ndarray) -> np.ndarray:
        """Step superoperators batched over step sizes (T, d^2, d^2)."""
        T = len(dts)
        d = self.dim
        eye = np.eye(d, dtype=complex)
        S = np.broadcast_to(np.eye(d * d, dtype=complex), (T, d * d, d * d)).copy()
        for op in self.ops:
            if op[0] == "const":
                S = op[1] @ S
            elif op[0] == "rz":
                _, q, rate = op
                phi = rate * dts
                u = np.exp(-0.5j * np.outer(phi, self._z_signs[q]))  # (T, d)
                diag = (u[:, :, None] * u.conj()[:, None, :]).reshape(T, d * d)
                S = diag[:, :, None] * S
            else:
                _, axis, q, rate = op
                phi = rate * dts
                P = self._paulis[(axis, q)]
                Ufull = (
                    np.cos(phi / 2)[:, None, None] * eye
                    - 1j * np.sin(phi / 2)[:, None, None] * P
                )
                so = np.einsum("tab,tcd->tacbd", Ufull, Ufull.conj()).reshape(
                    T, d * d, d * d
                )
                S = so @ S
        return S


def _segment_superop(gates, noise, n: int) -> np.ndarray:
    """Superoperator of a fixed gate list with per-gate depolarizing."""
    d = 2**n
    noisy = noise is not None and noise.enabled
    S = np.eye(d * d, dtype=complex)
    for gate in gates:
        S = _unitary_superop(_full_unitary(qsim.gate_matrix(gate), gate.qubits, n)) @ S
        if noisy:
            p = noise.p_depol_2q if len(gate.qubits) == 2 else noise.p_depol_1q
            if p:
                S = _depol_superop(gate.qubits, p, n) @ S
    return S


def _initial_density_vec(system: RadicalPairSystem, nuclear: str) -> np.ndarray:
    """vec of |00><00| on electrons (pre-preparation) x nuclear state."""
    if nuclear == "mixed":
        single = np.eye(2, dtype=complex) / 2
    elif nuclear in ("up", "down"):
        b = 0 if nuclear == "up" else 1
        single = np.zeros((2, 2), dtype=complex)
        single[b, b] = 1.0
    else:
        raise ValueError(f"unknown nuclear_config {nuclear!r}")
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    for _ in range(system.n_nuclei):
        rho = np.kron(rho, single)
    return rho.reshape(-1)


def _measurement_vec(n_sites: int) -> np.ndarray:
    """vec of the |11> electron projector (diagonal, real)."""
    d = 2**n_sites
    diag = np.zeros(d)
    d_nuc = 2 ** (n_sites - 2)
    diag[3 * d_nuc : 4 * d_nuc] = 1.0
    M = np.diag(diag).astype(complex)
    return M.reshape(-1)


def trotter_trace_density(
    system: RadicalPairSystem,
    n: int,
    noise=None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
    prune_zeeman_zero: bool = True,
    prune_all_zero: bool = False,
) -> PopulationTrace:
    """Undecayed populations from the lowered circuit with per-gate noise.

    The full pipeline is simulated: preparation gates, n lowered Trotter
    steps, measurement basis change, then the |11> electron-readout
    expectation (equal to the singlet population when noise is off).
    The t=0 grid point runs the actual zero-time circuit, whose canonical
    lowering drops the zero-angle field rotations.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    times = time_grid(t_max, dt, k=system.k_singlet, tail=tail)
    n_sites = system.n_sites
    template = _StepTemplate(system, noise, prune_zeeman_zero, prune_all_zero)
    from .circuit import prepare_singlet

    prep = _segment_superop(prepare_singlet(), noise, n_sites)
    tail_so = _segment_superop(measurement_basis_change(), noise, n_sites)
    v0 = prep @ _initial_density_vec(system, nuclear)
    meas = _measurement_vec(n_sites)
    # Tr[M rho'] with vec(rho') = Tail vec(rho) equals (Tail^T m) . vec(rho)
    meas_after_tail = tail_so.T @ meas

    steps = template.superops(times[1:] / n)
    v = np.broadcast_to(v0, (len(times) - 1, v0.size)).copy()
    if n <= 64:
        for _ in range(n):
            v = np.einsum("tij,tj->ti", steps, v)
    else:
        v = np.einsum("tij,tj->ti", _batched_power(steps, n), v)
    pops = np.empty(len(times))
    pops[1:] = np.einsum("i,ti->t", meas_after_tail, v).real

    # zero-time circuit, executed gate by gate through the simulator
    zero = lower_to_basis(
        compile_circuit(system, 0.0, n),
        prune_zeeman_zero=prune_zeeman_zero,
        prune_all_zero=prune_all_zero,
    )
    rho0 = QuantumState(
        "density",
        _initial_density_vec(system, nuclear).reshape(2**n_sites, 2**n_sites),
        n_sites,
    )
    final0 = qsim.run_density(zero, rho0, noise)
    pops[0] = np.einsum("i,i->", meas, final0.data.reshape(-1)).real
    return PopulationTrace(times, pops, decayed=False)


# ---------------------------------------------------------------------------
# yield curves and sweeps

MODES = ("reference", "statevector", "density")


def _symmetric_rate(system: RadicalPairSystem) -> float:
    if system.k_singlet != system.k_triplet:
        raise NotImplementedError(
            "asymmetric recombination (k_S != k_T) is not supported"
        )
    return system.k_singlet


def population_trace(
    system: RadicalPairSystem,
    mode: str = "reference",
    n: int | None = None,
    noise=None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
) -> PopulationTrace:
    """Undecayed singlet-population trace in the requested mode."""
    if mode == "reference":
        return reference_trace(system, nuclear, t_max, dt, tail)
    if n is None or n < 1:
        raise ValueError("Trotter modes need n >= 1")
    if mode == "statevector":
        return trotter_trace_statevector(system, n, nuclear, t_max, dt, tail)
    if mode == "density":
        return trotter_trace_density(
            system, n, noise, nuclear, t_max, dt, tail
        )
    raise ValueError(f"unknown mode {mode!r}")


def yield_from_trace(trace: PopulationTrace, k: float) -> float:
    return singlet_yield(apply_decay(trace, k), k)


def singlet_yield_at(
    system: RadicalPairSystem,
    mode: str = "reference",
    n: int | None = None,
    noise=None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
) -> float:
    k = _symmetric_rate(system)
    trace = population_trace(system, mode, n, noise, nuclear, t_max, dt, tail)
    return yield_from_trace(trace, k)


def yield_curve(
    system: RadicalPairSystem,
    thetas,
    mode: str = "reference",
    n: int | None = None,
    noise=None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
    threads: int = 1,
) -> YieldCurve:
    """Singlet yield versus field angle theta.

    Each angle gets its own Hamiltonian, trace, and truncated yield
    integral; angles are independent, so they fan out over a thread
    pool when threads > 1 (matmul releases the GIL).
    """
    thetas = np.asarray(thetas, dtype=float)
    k = _symmetric_rate(system)

    def one(theta: float) -> float:
        sys_t = system.with_angles(theta)
        trace = population_trace(sys_t, mode, n, noise, nuclear, t_max, dt, tail)
        return yield_from_trace(trace, k)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yields = np.array(list(pool.map(one, thetas)))
    else:
        yields = np.array([one(th) for th in thetas])
    meta = {
        "mode": mode,
        "n": n,
        "nuclear": nuclear,
        "t_max": t_max,
        "dt": dt,
        "tail": tail,
        "k_MHz": k,
        "noise": None if noise is None else noise.as_dict(),
        "system_hash": system.content_hash(),
    }
    return YieldCurve(thetas, yields, meta)


def trotter_sweep(
    system: RadicalPairSystem,
    n_list,
    theta: float | None = None,
    noise=None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    dt_noisy: float | None = None,
    tail: str = "none",
) -> list[dict]:
    """Yield versus Trotter order, noiseless and (optionally) noisy."""
    sys_t = system if theta is None else system.with_angles(theta)
    k = _symmetric_rate(sys_t)
    rows = []
    for n in n_list:
        row = {"n": int(n)}
        trace = trotter_trace_statevector(sys_t, int(n), nuclear, t_max, dt, tail)
        row["yield_noiseless"] = yield_from_trace(trace, k)
        if noise is not None and noise.enabled:
            noisy = trotter_trace_density(
                sys_t, int(n), noise, nuclear, t_max, dt_noisy or dt, tail
            )
            row["yield_noisy"] = yield_from_trace(noisy, k)
        rows.append(row)
    return rows


def rate_sweep(
    system: RadicalPairSystem,
    k_list,
    theta: float | None = None,
    mode: str = "reference",
    n: int | None = None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.001,
    tail: str = "none",
) -> list[dict]:
    """Yield versus recombination rate, reusing one undecayed trace.

    The unitary dynamics do not depend on k, so the trace is computed
    once; each k only re-applies the decay envelope and integral. With
    tail="extend" the grid covers the slowest rate in the list.
    """
    ks = [float(k) for k in k_list]
    if any(k <= 0 for k in ks):
        raise ValueError("rates must be > 0")
    sys_t = system if theta is None else system.with_angles(theta)
    grid_k = min(ks)  # slowest decay needs the longest grid
    times = time_grid(t_max, dt, k=grid_k, tail=tail)
    trace = population_trace(
        sys_t, mode, n, None, nuclear, times[-1], dt, "none"
    )
    return [{"k_MHz": k, "yield": yield_from_trace(trace, k)} for k in ks]


def shot_sweep(
    system: RadicalPairSystem,
    shot_list,
    theta: float | None = None,
    n: int = 5,
    seed: int = 0,
    noise=None,
    nuclear: str = "mixed",
    t_max: float = 1.0,
    dt: float = 0.01,
) -> list[dict]:
    """Sampling-noise study: RMS error of estimated populations vs shots.

    For each grid time the lowered circuit's outcome distribution is
    sampled with the given shot budget; the row reports the RMS
    deviation of the |11>-frequency estimate from the exact expectation
    across the grid. Seeds are drawn per (shots, time) from one master
    generator, so runs are reproducible.
    """
    if any(int(s) < 1 for s in shot_list):
        raise ValueError("shot counts must be >= 1")
    sys_t = system if theta is None else system.with_angles(theta)
    times = time_grid(t_max, dt)
    n_sites = sys_t.n_sites

    # exact per-time outcome distributions from the full pipeline
    states = []
    for t in times:
        circ = lower_to_basis(compile_circuit(sys_t, float(t), n))
        rho0 = QuantumState(
            "density",
            _initial_density_vec(sys_t, nuclear).reshape(2**n_sites, 2**n_sites),
            n_sites,
        )
        states.append(qsim.run_density(circ, rho0, noise))
    # expectation of the frequency estimator, including readout flips
    transition = qsim.readout_transition_matrix(noise)
    exact = np.array(
        [
            float(qsim.electron_outcome_probabilities(s) @ transition[:, 0b11])
            for s in states
        ]
    )

    master = np.random.default_rng(seed)
    rows = []
    for shots in shot_list:
        shots = int(shots)
        seeds = master.integers(0, 2**63, size=len(times))
        estimates = np.empty(len(times))
        for i, state in enumerate(states):
            result = qsim.sample_measurements(state, shots, int(seeds[i]), noise)
            estimates[i] = result.counts.get("11", 0) / shots
        rms = float(np.sqrt(np.mean((estimates - exact) ** 2)))
        rows.append({"shots": shots, "rms_error": rms})
    return rows
