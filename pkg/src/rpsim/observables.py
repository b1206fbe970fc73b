"""Populations, reaction yields, anisotropy, and the extrema-matching fit.

The singlet yield is the truncated integral
    Phi_S = k * integral_0^tmax Tr[P_S rho(t)] dt
evaluated with the trapezoidal rule on the trace's uniform grid; the
trace must already carry the exp(-k t) survival factor. Anisotropy is
max - min of the yield over field orientations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qsim import ShotResult
from .refsolver import PopulationTrace, QuantumState, singlet_projector


@dataclass(frozen=True, eq=False)
class YieldCurve:
    """Singlet yield per field polar angle."""

    thetas: np.ndarray
    yields: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        ys = np.asarray(self.yields, dtype=float)
        if th.ndim != 1 or th.shape != ys.shape:
            raise ValueError("thetas and yields must be matching 1-D arrays")
        if th.size >= 2 and np.diff(th).min() <= 0:
            raise ValueError("thetas must be strictly increasing")
        if not np.isfinite(ys).all():
            raise ValueError("yields must be finite")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "yields", ys)


def singlet_population_from_state(state: QuantumState) -> float:
    """Tr[P_S rho] with P_S = |S><S| on electrons, identity on nuclei."""
    if state.n_sites < 3:
        raise ValueError("state must cover at least 3 sites")
    d_nuc = state.dim // 4
    if state.kind == "pure":
        block = state.data.reshape(4, d_nuc)
        amp = (block[0b01] - block[0b10]) / np.sqrt(2)
        return float(np.real(np.vdot(amp, amp)))
    proj = singlet_projector(state.n_sites)
    return float(np.einsum("ab,ba->", proj, state.data).real)


def singlet_population_from_counts(result: ShotResult) -> float:
    """Fraction of shots that read out |11> on the electron qubits."""
    if result.shots < 1:
        raise ValueError("shots must be >= 1")
    return result.counts.get("11", 0) / result.shots


def nuclear_average(trace_up: PopulationTrace, trace_down: PopulationTrace) -> PopulationTrace:
    """Pointwise mean of the two pure nuclear-configuration traces."""
    if trace_up.times.shape != trace_down.times.shape or np.abs(
        trace_up.times - trace_down.times
    ).max() > 1e-12:
        raise ValueError("traces must share one time grid")
    if trace_up.decayed != trace_down.decayed:
        raise ValueError("traces must have matching decayed flags")
    return PopulationTrace(
        trace_up.times,
        0.5 * (trace_up.populations + trace_down.populations),
        decayed=trace_up.decayed,
    )


def singlet_yield(trace: PopulationTrace, k: float) -> float:
    """k times the trapezoidal integral of a decayed trace."""
    if not trace.decayed:
        raise ValueError("singlet_yield needs a decayed trace")
    return float(k * np.trapezoid(trace.populations, x=trace.times))


def anisotropy(curve: YieldCurve) -> float:
    """max(yields) - min(yields)."""
    if curve.yields.size < 2:
        raise ValueError("need at least 2 grid points")
    return float(curve.yields.max() - curve.yields.min())


def pearson_r(a, b) -> float:
    return float(np.corrcoef(np.asarray(a, float), np.asarray(b, float))[0, 1])


def rescale_fit(noisy: YieldCurve, reference: YieldCurve) -> YieldCurve:
    """Affine map of the noisy curve onto the reference extrema.

    y -> a*y + b with a = (max r - min r)/(max y - min y) and
    b = min r - a * min y, so the fitted extrema equal the reference
    extrema exactly and extrema locations are unchanged.

    Raises:
        ValueError: mismatched theta grids or a flat noisy curve.
    """
    if noisy.thetas.shape != reference.thetas.shape or np.abs(
        noisy.thetas - reference.thetas
    ).max() > 1e-12:
        raise ValueError("curves must share one theta grid")
    spread = noisy.yields.max() - noisy.yields.min()
    if spread <= 0:
        raise ValueError("noisy curve is flat; rescale is undefined")
    a = (reference.yields.max() - reference.yields.min()) / spread
    b = reference.yields.min() - a * noisy.yields.min()
    fitted = a * noisy.yields + b
    metadata = dict(noisy.metadata)
    metadata.update(rescale_a=float(a), rescale_b=float(b))
    return YieldCurve(noisy.thetas, fitted, metadata)
