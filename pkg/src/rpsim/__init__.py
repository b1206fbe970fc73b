"""Radical-pair spin dynamics on an emulated gate-based quantum computer.

The package has three layers: an exact reference solver for the
two-electron, few-nucleus spin Hamiltonian with symmetric recombination
kinetics; a Trotter circuit compiler plus noiseless and noisy circuit
simulators; and measurement protocols (population traces, yield curves,
convergence and sampling sweeps) with a reproducible CLI harness.
"""

from .circuit import (
    Circuit,
    Gate,
    compile,
    dump_circuit,
    gate_count,
    lower_to_basis,
    measurement_basis_change,
    prepare_singlet,
    trotter_step,
)
from .config import DEFAULTS, ConfigError, ExperimentConfig, resolve
from .observables import (
    YieldCurve,
    anisotropy,
    nuclear_average,
    pearson_r,
    rescale_fit,
    singlet_population_from_counts,
    singlet_population_from_state,
    singlet_yield,
)
from .protocols import (
    population_trace,
    rate_sweep,
    reference_trace,
    shot_sweep,
    singlet_yield_at,
    time_grid,
    trotter_sweep,
    trotter_trace_density,
    trotter_trace_statevector,
    yield_curve,
)
from .qsim import (
    NoiseProfile,
    ShotResult,
    depolarize,
    electron_outcome_probabilities,
    gate_matrix,
    run_density,
    run_statevector,
    sample_measurements,
)
from .refsolver import (
    PopulationTrace,
    QuantumState,
    apply_decay,
    evolve_exact,
    initial_state,
    rk4_haberkorn,
    singlet_projector,
    singlet_vector,
    triplet_projector,
)
from .spinham import (
    BOHR_MAGNETON_NEV_PER_MT,
    HBAR_NEV_US,
    PauliTerm,
    RadicalPairSystem,
    build_pauli_terms,
    prototype_system,
    to_dense_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BOHR_MAGNETON_NEV_PER_MT",
    "Circuit",
    "ConfigError",
    "DEFAULTS",
    "ExperimentConfig",
    "Gate",
    "HBAR_NEV_US",
    "NoiseProfile",
    "PauliTerm",
    "PopulationTrace",
    "QuantumState",
    "RadicalPairSystem",
    "ShotResult",
    "YieldCurve",
    "anisotropy",
    "apply_decay",
    "build_pauli_terms",
    "compile",
    "depolarize",
    "dump_circuit",
    "electron_outcome_probabilities",
    "evolve_exact",
    "gate_count",
    "gate_matrix",
    "initial_state",
    "lower_to_basis",
    "measurement_basis_change",
    "nuclear_average",
    "pearson_r",
    "population_trace",
    "prepare_singlet",
    "prototype_system",
    "rate_sweep",
    "reference_trace",
    "rescale_fit",
    "resolve",
    "rk4_haberkorn",
    "run_density",
    "run_statevector",
    "sample_measurements",
    "shot_sweep",
    "singlet_population_from_counts",
    "singlet_population_from_state",
    "singlet_projector",
    "singlet_vector",
    "singlet_yield",
    "singlet_yield_at",
    "time_grid",
    "to_dense_matrix",
    "triplet_projector",
    "trotter_step",
    "trotter_sweep",
    "trotter_trace_density",
    "trotter_trace_statevector",
    "yield_curve",
]
