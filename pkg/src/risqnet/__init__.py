"""Simulation and optimization toolkit for RIS-assisted THz quantum links.

Subpackages and modules:

- ``specfun``: special functions (gamma family, Bessel K, Meijer G, erf).
- ``geometry``: 3-D points, deployment regions, user placement sampling.
- ``channel``: THz link budget, turbulence/pointing fading, success probability.
- ``quantum``: Bell-diagonal states, damping channels, end-to-end fidelity.
- ``ris``: reflection model, mode switching, leakage mutual information.
- ``network``: rate/fidelity bookkeeping, constraint evaluation, baselines.
- ``optimizer``: simulated-annealing solver for joint placement/allocation.
- ``cli``: command-line entry points (simulate, optimize, sweep, validate).
"""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
