"""Bell-diagonal states, two-qubit noise channels, end-to-end fidelity.

Basis convention throughout: |00>, |01>, |10>, |11> (row-major), qubit 1 is
the matter qubit held at the source, qubit 2 the flying qubit.  The noise
pipeline applies memory phase damping (qubit 1), channel phase damping
(qubit 2), then amplitude damping with p_ad = 1 - p_succ (qubit 2), in that
order.  The closed-form fidelity and the density-matrix pipeline are
independent implementations of the same pipeline; the density-matrix route
is the ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_I2 = np.eye(2, dtype=np.complex128)
_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

# |Phi+> = (|00> + |11>)/sqrt(2)
_PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)


def _validate_probability(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {p}")


@dataclass(frozen=True)
class BellDiagonalState:
    lam00: float
    lam01: float
    lam10: float
    lam11: float

    def __post_init__(self) -> None:
        for name in ("lam00", "lam01", "lam10", "lam11"):
            _validate_probability(name, getattr(self, name))
        total = self.lam00 + self.lam01 + self.lam10 + self.lam11
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixing weights must sum to 1, got {total}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam00, self.lam01, self.lam10, self.lam11)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """4x4 two-qubit density matrix; validated on construction."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {m.shape}")
        if float(np.max(np.abs(m - m.conj().T))) > 1e-12:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        if abs(float(np.trace(m).real) - 1.0) > 1e-12 or abs(float(np.trace(m).imag)) > 1e-12:
            raise ValueError(f"trace must be 1, got {np.trace(m)}")
        if float(np.min(np.linalg.eigvalsh(m))) < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue beyond -1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class NoisePipeline:
    p1: float
    p_pd: float
    p_succ: float

    def __post_init__(self) -> None:
        _validate_probability("p1", self.p1)
        _validate_probability("p_pd", self.p_pd)
        _validate_probability("p_succ", self.p_succ)


@lru_cache(maxsize=4)
def bell_projector(m: int, n: int) -> DensityMatrix:
    """Projector onto |Phi_mn> = (sigma_x^m sigma_z^n tensor I)|Phi+>."""
    if m not in (0, 1) or n not in (0, 1):
        raise ValueError(f"bell indices must be bits, got ({m}, {n})")
    op = np.kron(
        np.linalg.matrix_power(_SIGMA_X, m) @ np.linalg.matrix_power(_SIGMA_Z, n), _I2
    )
    ket = op @ _PHI_PLUS
    return DensityMatrix(np.outer(ket, ket.conj()))


def to_density(state: BellDiagonalState) -> DensityMatrix:
    rho = np.zeros((4, 4), dtype=np.complex128)
    for (m, n), lam in zip(((0, 0), (0, 1), (1, 0), (1, 1)), state.as_tuple()):
        rho += lam * bell_projector(m, n).matrix
    return DensityMatrix(rho)


def _embed(op: np.ndarray, qubit: int) -> np.ndarray:
    if qubit == 1:
        return np.kron(op, _I2)
    if qubit == 2:
        return np.kron(_I2, op)
    raise ValueError(f"qubit must be 1 or 2, got {qubit}")


def _apply_kraus(rho: DensityMatrix, kraus: list[np.ndarray]) -> DensityMatrix:
    m = rho.matrix
    out = np.zeros_like(m)
    for k in kraus:
        out += k @ m @ k.conj().T
    return DensityMatrix(out)


def apply_phase_damping(rho: DensityMatrix, p: float, qubit: int) -> DensityMatrix:
    """(1-p) rho + p (sigma_z rho sigma_z) on the chosen qubit."""
    _validate_probability("p", p)
    kraus = [
        math.sqrt(1.0 - p) * _embed(_I2, qubit),
        math.sqrt(p) * _embed(_SIGMA_Z, qubit),
    ]
    return _apply_kraus(rho, kraus)


def apply_amplitude_damping(rho: DensityMatrix, p: float, qubit: int) -> DensityMatrix:
    """Kraus pair E0 = |0><0| + sqrt(1-p)|1><1|, E1 = sqrt(p)|0><1|."""
    _validate_probability("p", p)
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=np.complex128)
    e1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=np.complex128)
    return _apply_kraus(rho, [_embed(e0, qubit), _embed(e1, qubit)])


def fidelity_to_phi00(rho: DensityMatrix) -> float:
    phi = bell_projector(0, 0).matrix
    overlap = complex(np.trace(phi @ rho.matrix))
    if abs(overlap.imag) > 1e-12:
        raise ValueError(f"fidelity has non-real overlap: {overlap}")
    return float(overlap.real)


def _damped_weights(state: BellDiagonalState, pipe: NoisePipeline):
    """Mixing weights after both phase dampings.

    A sigma_z on either qubit toggles the phase index of a Bell projector,
    so each damping mixes lam_jk with lam_j(k xor 1).
    """
    lam = {
        (0, 0): state.lam00,
        (0, 1): state.lam01,
        (1, 0): state.lam10,
        (1, 1): state.lam11,
    }
    v = {
        (j, k): (1.0 - pipe.p1) * lam[(j, k)] + pipe.p1 * lam[(j, k ^ 1)]
        for j in (0, 1)
        for k in (0, 1)
    }
    u = {
        (j, k): (1.0 - pipe.p_pd) * v[(j, k)] + pipe.p_pd * v[(j, k ^ 1)]
        for j in (0, 1)
        for k in (0, 1)
    }
    return u


def e2e_fidelity_closed(state: BellDiagonalState, pipe: NoisePipeline) -> float:
    """Closed-form pipeline fidelity.

    Amplitude damping of strength 1 - p_succ on the flying qubit leaves the
    Phi_0k projectors with overlap (1 +/- sqrt(p_succ))^2 / 4 against the
    target and the Phi_1k ones with (1 - p_succ)/4 each; averaging over the
    phase-damped weights gives the four-term expression.
    """
    u = _damped_weights(state, pipe)
    p = pipe.p_succ
    s = math.sqrt(p)
    f = (
        0.25 * (u[(0, 0)] + u[(0, 1)])
        + 0.25 * (1.0 - p) * (u[(1, 0)] + u[(1, 1)])
        + 0.25 * p * (u[(0, 0)] + u[(0, 1)])
        + 0.5 * s * (u[(0, 0)] - u[(0, 1)])
    )
    if not -1e-12 <= f <= 1.0 + 1e-12:
        raise ValueError(f"fidelity {f} outside [0, 1]")
    return min(max(f, 0.0), 1.0)


def e2e_fidelity_oracle(state: BellDiagonalState, pipe: NoisePipeline) -> float:
    """Ground truth: run the density matrix through the pipeline step by step."""
    rho = to_density(state)
    rho = apply_phase_damping(rho, pipe.p1, qubit=1)
    rho = apply_phase_damping(rho, pipe.p_pd, qubit=2)
    rho = apply_amplitude_damping(rho, 1.0 - pipe.p_succ, qubit=2)
    return fidelity_to_phi00(rho)
