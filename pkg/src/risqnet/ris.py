"""Reconfigurable reflecting array: mode switching, efficiency, leakage.

Elements carry a passive reflection coefficient (amplitude in [0, 1]) and an
active one (gain above 1); a per-element SNR threshold picks the mode.  The
link budget only sees the array through a scalar efficiency, selected per
user by the same threshold rule.  Mode switching over time forms a binary
trace whose information leakage toward an eavesdropper is estimated with a
plug-in mutual information over a bit-flip observation channel.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

_TWO_PI = 2.0 * math.pi


def _wrap_phase(x: float) -> float:
    y = math.fmod(x, _TWO_PI)
    return y + _TWO_PI if y < 0.0 else y


@dataclass(frozen=True)
class RisElement:
    passive_amp: float
    passive_phase: float
    active_gain: float
    active_phase: float
    mode: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.passive_amp <= 1.0:
            raise ValueError(f"passive amplitude must be in [0, 1], got {self.passive_amp}")
        if not self.active_gain > 1.0:
            raise ValueError(f"active gain must exceed 1, got {self.active_gain}")
        if self.mode not in (0, 1):
            raise ValueError(f"mode must be 0 (passive) or 1 (active), got {self.mode}")
        object.__setattr__(self, "passive_phase", _wrap_phase(self.passive_phase))
        object.__setattr__(self, "active_phase", _wrap_phase(self.active_phase))


@dataclass(frozen=True)
class RisArray:
    elements: tuple[RisElement, ...]
    snr_threshold: float
    eff_passive: float
    eff_active: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) < 1:
            raise ValueError("array needs at least one element")
        if not 0.0 < self.eff_passive < 1.0:
            raise ValueError(f"passive efficiency must be in (0, 1), got {self.eff_passive}")
        if not self.eff_active > 1.0:
            raise ValueError(f"active efficiency must exceed 1, got {self.eff_active}")
        if not self.snr_threshold > 0.0:
            raise ValueError(f"snr threshold must be positive, got {self.snr_threshold}")

    @property
    def n_elements(self) -> int:
        return len(self.elements)


def uniform_array(
    n: int,
    snr_threshold: float = 1.0,
    eff_passive: float = 0.97,
    eff_active: float = 1.1,
    passive_amp: float = 1.0,
    active_gain: float = 2.0,
) -> RisArray:
    """Array of identical passive-mode elements with zero phases."""
    element = RisElement(passive_amp, 0.0, active_gain, 0.0, mode=0)
    return RisArray((element,) * n, snr_threshold, eff_passive, eff_active)


@dataclass(frozen=True)
class SwitchingTrace:
    matrix: np.ndarray
    time_step: float

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.uint8)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError(f"trace must be a nonempty 2-D bit matrix, got shape {m.shape}")
        if np.any(m > 1):
            raise ValueError("trace entries must be bits")
        if not self.time_step > 0.0:
            raise ValueError(f"time step must be positive, got {self.time_step}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_steps(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_elements(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class AdversaryModel:
    """Observes each mode bit through an independent flip with probability q."""

    flip_prob: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.flip_prob <= 0.5:
            raise ValueError(f"flip probability must be in [0, 0.5], got {self.flip_prob}")


def reflection_coefficient(e: RisElement) -> complex:
    if e.mode == 0:
        return e.passive_amp * cmath.exp(1j * e.passive_phase)
    return e.active_gain * cmath.exp(1j * e.active_phase)


def _thresholded_modes(array: RisArray, snr_per_element: Sequence[float]) -> np.ndarray:
    snr = np.asarray(snr_per_element, dtype=float)
    if snr.shape != (array.n_elements,):
        raise ValueError(
            f"need one SNR per element ({array.n_elements}), got shape {snr.shape}"
        )
    return (snr < array.snr_threshold).astype(np.uint8)


def update_modes(array: RisArray, snr_per_element: Sequence[float]) -> RisArray:
    """Set each element passive when its SNR meets the threshold, else active."""
    modes = _thresholded_modes(array, snr_per_element)
    elements = tuple(
        replace(e, mode=int(m)) for e, m in zip(array.elements, modes)
    )
    return replace(array, elements=elements)


def reflection_efficiency(array: RisArray, user_snr: float) -> float:
    return array.eff_passive if user_snr >= array.snr_threshold else array.eff_active


def simulate_switching_trace(
    array: RisArray,
    snr_process: Sequence[Sequence[float]],
    policy: str = "deterministic",
    p_flip: float = 0.5,
    rng: np.random.Generator | None = None,
    time_step: float = 1.0,
) -> SwitchingTrace:
    """Threshold each step's SNRs into mode bits, one trace row per step.

    The randomized policy flips every bit independently with probability
    p_flip after thresholding, hiding the channel state from the trace.
    """
    if policy not in ("deterministic", "randomized"):
        raise ValueError(f"unknown policy {policy!r}")
    if len(snr_process) < 1:
        raise ValueError("snr process must have at least one step")
    rows = np.stack([_thresholded_modes(array, step) for step in snr_process])
    if policy == "randomized":
        if not 0.0 <= p_flip <= 1.0:
            raise ValueError(f"flip probability must be in [0, 1], got {p_flip}")
        if rng is None:
            raise ValueError("randomized policy needs an rng")
        flips = (rng.random(rows.shape) < p_flip).astype(np.uint8)
        rows ^= flips
    return SwitchingTrace(rows, time_step)


def _plug_in_mi_bits(x: np.ndarray, y: np.ndarray) -> float:
    """Empirical mutual information between two aligned bit sequences."""
    counts = np.bincount(2 * x.astype(np.int64) + y.astype(np.int64), minlength=4)
    n = counts.sum()
    pxy = counts.reshape(2, 2) / n
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    mi = 0.0
    for i in (0, 1):
        for j in (0, 1):
            if pxy[i, j] > 0.0:
                mi += pxy[i, j] * math.log2(pxy[i, j] / (px[i] * py[j]))
    return max(mi, 0.0)


def leakage_mutual_information(
    trace: SwitchingTrace, adversary: AdversaryModel, rng: np.random.Generator
) -> float:
    """Per-element average of I(mode bit; observed bit), in bits per step.

    The observation is the trace passed through independent bit flips of
    probability q, so a balanced trace leaks at most 1 - H_b(q) bits.
    """
    if trace.n_steps < 1000:
        raise ValueError(f"need at least 1000 steps for a stable estimate, got {trace.n_steps}")
    flips = (rng.random(trace.matrix.shape) < adversary.flip_prob).astype(np.uint8)
    observed = trace.matrix ^ flips
    per_element = [
        _plug_in_mi_bits(trace.matrix[:, e], observed[:, e]) for e in range(trace.n_elements)
    ]
    return float(np.mean(per_element))


def trace_mutual_information(a: SwitchingTrace, b: SwitchingTrace) -> float:
    """Per-element average MI between two aligned traces, in bits per step."""
    if a.matrix.shape != b.matrix.shape:
        raise ValueError(
            f"traces must be aligned, got shapes {a.matrix.shape} and {b.matrix.shape}"
        )
    per_element = [
        _plug_in_mi_bits(a.matrix[:, e], b.matrix[:, e]) for e in range(a.n_elements)
    ]
    return float(np.mean(per_element))


def binary_entropy(p: float) -> float:
    """Entropy of a Bernoulli(p) variable in bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def write_trace_csv(trace: SwitchingTrace, path: str) -> None:
    """One row per (step, element) pair with the mode bit."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "element", "mode"])
        for t in range(trace.n_steps):
            for e in range(trace.n_elements):
                writer.writerow([t, e, int(trace.matrix[t, e])])
