"""Simulated annealing over rate allocation, relay position, and modes.

Candidates that violate any constraint are rejected before the Metropolis
test (a soft-penalty mode exists behind a flag, default off).  Acceptance
and best-so-far tracking use the configured utility: the fairness index by
default, or the capacity-normalized weighted sum rate.  Both figures are
recorded per iteration so either convergence curve can be plotted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from . import geometry as geo
from . import network as net

OBJECTIVES = ("wfi", "weighted_sum")

# rough per-constraint scales turning slacks into comparable O(1) violations
_SLACK_SCALES = {
    "memory_cap": None,  # scaled by c_max at use
    "rate_floor": None,
    "fidelity_floor": 1.0,
    "fairness": 1.0,
    "region": 100.0,
    "modes_binary": 1.0,
}


@dataclass(frozen=True)
class NeighborScales:
    rate_step: float = 1e5
    position_step: float = 25.0
    mode_flips: int = 1

    def __post_init__(self) -> None:
        if self.rate_step < 0.0 or self.position_step < 0.0 or self.mode_flips < 0:
            raise ValueError("neighbor scales must be >= 0")


@dataclass(frozen=True)
class SaParams:
    t0: float = 1.0
    t_min: float = 1e-4
    cooling_rate: float = 0.95
    iters_per_temp: int = 100
    neighbor_scales: NeighborScales = NeighborScales()
    objective: str = "wfi"
    restarts: int = 20
    penalty_mode: bool = False

    def __post_init__(self) -> None:
        if not self.t0 > self.t_min > 0.0:
            raise ValueError(f"need t0 > t_min > 0, got t0={self.t0}, t_min={self.t_min}")
        if not 0.0 < self.cooling_rate < 1.0:
            raise ValueError(f"cooling rate must be in (0, 1), got {self.cooling_rate}")
        if self.iters_per_temp < 1:
            raise ValueError(f"iters_per_temp must be >= 1, got {self.iters_per_temp}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.restarts < 0:
            raise ValueError(f"restarts must be >= 0, got {self.restarts}")


@dataclass(frozen=True)
class SaRecord:
    iteration: int
    temperature: float
    current_u: float
    best_u: float
    accepted: bool
    feasible: bool
    wfi: float
    sum_norm: float


@dataclass(frozen=True)
class SaTrace:
    records: tuple[SaRecord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        best = -math.inf
        for r in self.records:
            if r.best_u < best - 1e-15:
                raise ValueError("best objective must be non-decreasing over the trace")
            best = max(best, r.best_u)

    def __len__(self) -> int:
        return len(self.records)


class InfeasibleProblem(Exception):
    """No feasible starting point found; carries the closest miss."""

    def __init__(self, solution: net.Solution, evaluation: net.Evaluation):
        self.solution = solution
        self.evaluation = evaluation
        slacks = ", ".join(
            f"{c.name}={c.slack:.4g}" for c in evaluation.constraints if not c.satisfied
        )
        super().__init__(f"no feasible initial solution; violated: {slacks}")


def neighbor(
    sol: net.Solution,
    scenario: net.Scenario,
    scales: NeighborScales,
    rng: np.random.Generator,
) -> net.Solution:
    """Perturb one variable class: a user's rate, the position, or k modes."""
    move = rng.integers(3)
    if move == 0:
        i = int(rng.integers(scenario.n_users))
        step = rng.uniform(-scales.rate_step, scales.rate_step)
        r_in = list(sol.r_in)
        r_in[i] = max(r_in[i] + step, 0.0)
        return replace(sol, r_in=tuple(r_in))
    if move == 1:
        s = scales.position_step
        moved = geo.Point3(
            sol.ris_pos.x + rng.uniform(-s, s),
            sol.ris_pos.y + rng.uniform(-s, s),
            sol.ris_pos.z + rng.uniform(-s, s),
        )
        return replace(sol, ris_pos=geo.clamp_to_region(scenario.region, moved))
    n = len(sol.modes)
    k = min(scales.mode_flips, n)
    if k == 0:
        return sol
    modes = list(sol.modes)
    for idx in rng.choice(n, size=k, replace=False):
        modes[idx] ^= 1
    return replace(sol, modes=tuple(modes))


def accept(delta_u: float, t: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: uphill always, downhill with probability e^(dU/T)."""
    if not t > 0.0:
        raise ValueError(f"temperature must be > 0, got {t}")
    if delta_u > 0.0:
        return True
    return math.exp(delta_u / t) > rng.random()


def _utility(ev: net.Evaluation, scenario: net.Scenario, objective: str) -> float:
    if objective == "wfi":
        return ev.wfi
    return ev.weighted_sum / scenario.c_max


def _violation(ev: net.Evaluation, scenario: net.Scenario) -> float:
    total = 0.0
    for c in ev.constraints:
        if c.satisfied:
            continue
        scale = _SLACK_SCALES[c.name] or scenario.c_max
        total += -c.slack / scale
    return total


def _initial_candidates(
    scenario: net.Scenario, params: SaParams, rng: np.random.Generator
):
    n = scenario.n_users
    modes = (0,) * scenario.ris_defaults.n_elements
    yield net.Solution(
        (scenario.c_max / (2.0 * n),) * n, scenario.region.centroid(), modes
    )
    reg = scenario.region
    # restarts share one rate across users (fairness-safe) drawn inside the
    # representable per-user range so the fidelity bookkeeping is not pinned
    # at its clamped extreme
    hi = min(net.R_IN_CAP, scenario.c_max / n)
    lo = min(net.RATE_SCALE * net.ALPHA_S_MIN, hi)
    for _ in range(params.restarts):
        pos = geo.Point3(
            rng.uniform(reg.x_min, reg.x_max),
            rng.uniform(reg.y_min, reg.y_max),
            rng.uniform(reg.h_min, reg.h_max),
        )
        yield net.Solution((rng.uniform(lo, hi),) * n, pos, modes)


class _CachedEvaluator:
    """Evaluate solutions while reusing channel work per relay position."""

    def __init__(self, scenario: net.Scenario):
        self.scenario = scenario
        self._budgets: dict[geo.Point3, tuple[net.LinkBudget, ...]] = {}

    def __call__(self, sol: net.Solution) -> net.Evaluation:
        budgets = self._budgets.get(sol.ris_pos)
        if budgets is None:
            budgets = net.link_budgets(self.scenario, sol.ris_pos)
            self._budgets[sol.ris_pos] = budgets
        return net.evaluate(self.scenario, sol, budgets=budgets)


def solve_p1(
    scenario: net.Scenario, params: SaParams = SaParams(), seed: int = 0
) -> tuple[net.Solution, net.Evaluation, SaTrace]:
    """Anneal from a feasible start; returns the best solution, its fresh
    re-evaluation, and the per-iteration trace.

    Raises InfeasibleProblem when no restart yields a feasible start; the
    exception carries the least-violating candidate and its slacks.
    """
    rng = np.random.default_rng(seed)
    evaluate = _CachedEvaluator(scenario)

    current = None
    closest = None
    closest_ev = None
    closest_violation = math.inf
    for cand in _initial_candidates(scenario, params, rng):
        ev = evaluate(cand)
        if ev.feasible:
            current, current_ev = cand, ev
            break
        v = _violation(ev, scenario)
        if v < closest_violation:
            closest, closest_ev, closest_violation = cand, ev, v
    if current is None:
        raise InfeasibleProblem(closest, closest_ev)

    current_u = _utility(current_ev, scenario, params.objective)
    best, best_u = current, current_u
    records = []
    iteration = 0
    t = params.t0
    while t >= params.t_min:
        for _ in range(params.iters_per_temp):
            cand = neighbor(current, scenario, params.neighbor_scales, rng)
            ev = evaluate(cand)
            feasible = ev.feasible
            accepted = False
            if feasible:
                u = _utility(ev, scenario, params.objective)
                if accept(u - current_u, t, rng):
                    current, current_ev, current_u = cand, ev, u
                    accepted = True
                if u > best_u:
                    best, best_u = cand, u
            elif params.penalty_mode:
                u = _utility(ev, scenario, params.objective) - _violation(ev, scenario)
                if accept(u - current_u, t, rng):
                    current, current_ev, current_u = cand, ev, u
                    accepted = True
            records.append(
                SaRecord(
                    iteration=iteration,
                    temperature=t,
                    current_u=current_u,
                    best_u=best_u,
                    accepted=accepted,
                    feasible=feasible,
                    wfi=current_ev.wfi,
                    sum_norm=current_ev.weighted_sum / scenario.c_max,
                )
            )
            iteration += 1
        t *= params.cooling_rate

    best_ev = net.evaluate(scenario, best)
    if not best_ev.feasible:
        raise AssertionError("annealer returned an infeasible best solution")
    return best, best_ev, SaTrace(tuple(records))


def write_trace_csv(trace: SaTrace, path: str) -> None:
    """Convergence log: iter, temperature, current_U, best_U, accepted, feasible."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "temperature", "current_u", "best_u", "accepted", "feasible"])
        for r in trace.records:
            writer.writerow(
                [
                    r.iteration,
                    format(r.temperature, ".12g"),
                    format(r.current_u, ".12g"),
                    format(r.best_u, ".12g"),
                    int(r.accepted),
                    int(r.feasible),
                ]
            )
