"""Rate allocation, fairness, and per-user quality evaluation.

A scenario holds one base station, a set of ground users, and the physical
layer configuration; a solution assigns an injection rate per user plus a
relay position and element modes.  Evaluation runs every user through the
channel and noise pipeline and scores the allocation against the capacity,
rate-floor, fidelity-floor, fairness, placement, and mode constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import channel as ch
from . import geometry as geo
from . import quantum as qm
from . import ris as ra

# The rate map r = 2e6 * alpha_s is only meaningful for alpha_s in
# [5e-4, 0.5); the upper clamp stays strictly below 0.5 so the target weight
# 1 - alpha_s keeps a majority share.
ALPHA_S_MIN = 5.0e-4
ALPHA_S_MAX = 0.49975
RATE_SCALE = 2.0e6
R_IN_CAP = RATE_SCALE * ALPHA_S_MAX

EVALUATION_CSV_HEADER = (
    "user",
    "d_e2e_m",
    "p_succ",
    "p_pd",
    "eta",
    "r_e2e_hz",
    "fidelity",
)


@dataclass(frozen=True)
class User:
    position: geo.Point3
    weight: float
    r_min: float
    f_min: float

    def __post_init__(self) -> None:
        if not self.weight > 0.0:
            raise ValueError(f"weight must be > 0, got {self.weight}")
        if self.r_min < 0.0:
            raise ValueError(f"r_min must be >= 0, got {self.r_min}")
        if not 0.0 < self.f_min <= 1.0:
            raise ValueError(f"f_min must be in (0, 1], got {self.f_min}")


@dataclass(frozen=True)
class Environment:
    """Turbulence strength plus receive-side pointing geometry."""

    cn2: float
    aperture_radius: float
    divergence: float
    jitter_sigma: float

    def __post_init__(self) -> None:
        for name in ("cn2", "aperture_radius", "divergence", "jitter_sigma"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class Scenario:
    qbs: geo.Point3
    users: tuple[User, ...]
    region: geo.DeploymentRegion
    link: ch.ThzLinkParams
    environment: Environment
    ris_defaults: ra.RisArray
    c_max: float
    delta_th: float
    p1: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "users", tuple(self.users))
        if len(self.users) < 1:
            raise ValueError("scenario needs at least one user")
        if not self.c_max > 0.0:
            raise ValueError(f"c_max must be > 0, got {self.c_max}")
        if not 0.0 < self.delta_th <= 1.0:
            raise ValueError(f"delta_th must be in (0, 1], got {self.delta_th}")
        if not 0.0 <= self.p1 <= 1.0:
            raise ValueError(f"p1 must be a probability, got {self.p1}")

    @property
    def n_users(self) -> int:
        return len(self.users)


def standard_scenario(
    users: Sequence[User],
    *,
    cn2: float = 5e-14,
    wavelength: float = 1550e-9,
    kappa_db_km: float = 0.43,
    detection_efficiency: float = 0.95,
    gain_threshold: float = 0.05,
    aperture_radius: float = 0.55,
    divergence: float = 8e-3,
    jitter_sigma: float = 1e-3,
    n_elements: int = 64,
    snr_threshold: float = 1.0,
    eff_passive: float = 0.97,
    eff_active: float = 1.1,
    c_max: float = 1e7,
    delta_th: float = 0.95,
    p1: float = 0.02,
    qbs: geo.Point3 = geo.Point3(0.0, 0.0, 90.0),
    region: geo.DeploymentRegion = geo.DeploymentRegion(50.0, 450.0, 0.0, 400.0, 35.0, 90.0),
) -> Scenario:
    """Scenario with the documented default urban configuration."""
    return Scenario(
        qbs=qbs,
        users=tuple(users),
        region=region,
        link=ch.ThzLinkParams.from_db_per_km(
            wavelength, kappa_db_km, detection_efficiency, gain_threshold
        ),
        environment=Environment(cn2, aperture_radius, divergence, jitter_sigma),
        ris_defaults=ra.uniform_array(
            n_elements,
            snr_threshold=snr_threshold,
            eff_passive=eff_passive,
            eff_active=eff_active,
        ),
        c_max=c_max,
        delta_th=delta_th,
        p1=p1,
    )


@dataclass(frozen=True)
class Solution:
    r_in: tuple[float, ...]
    ris_pos: geo.Point3
    modes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "r_in", tuple(float(r) for r in self.r_in))
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if any(r < 0.0 for r in self.r_in):
            raise ValueError("injection rates must be >= 0")
        if any(m not in (0, 1) for m in self.modes):
            raise ValueError("modes must be bits")


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    satisfied: bool
    slack: float


@dataclass(frozen=True)
class LinkBudget:
    d_e2e: float
    p_succ: float
    p_pd: float
    eta: float
    varsigma: float


@dataclass(frozen=True)
class Evaluation:
    d_e2e: tuple[float, ...]
    p_succ: tuple[float, ...]
    p_pd: tuple[float, ...]
    eta: tuple[float, ...]
    r_e2e: tuple[float, ...]
    fidelity: tuple[float, ...]
    weighted_sum: float
    wfi: float
    constraints: tuple[ConstraintCheck, ...]

    def __post_init__(self) -> None:
        if any(r < 0.0 for r in self.r_e2e):
            raise ValueError("rates must be >= 0")
        if not 0.0 <= self.wfi <= 1.0:
            raise ValueError(f"fairness index must be in [0, 1], got {self.wfi}")
        if any(not 0.0 <= f <= 1.0 for f in self.fidelity):
            raise ValueError("fidelities must be in [0, 1]")

    @property
    def feasible(self) -> bool:
        return all(c.satisfied for c in self.constraints)

    def constraint(self, name: str) -> ConstraintCheck:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)


def rate_from_alpha_s(alpha_s: float) -> tuple[float, float]:
    """Injection rate and target Bell weight for a source split alpha_s."""
    if not ALPHA_S_MIN <= alpha_s < 0.5:
        raise ValueError(f"alpha_s must be in [{ALPHA_S_MIN}, 0.5), got {alpha_s}")
    return RATE_SCALE * alpha_s, 1.0 - alpha_s


def alpha_s_from_rate(r_in: float) -> float:
    """Source split implied by an injection rate, clamped to the valid range."""
    if r_in < 0.0:
        raise ValueError(f"rate must be >= 0, got {r_in}")
    return min(max(r_in / RATE_SCALE, ALPHA_S_MIN), ALPHA_S_MAX)


def bell_state_for_rate(r_in: float) -> qm.BellDiagonalState:
    """Bell-diagonal source state at the given rate; residual weight split
    symmetrically over the three error projectors."""
    alpha_s = alpha_s_from_rate(r_in)
    rest = alpha_s / 3.0
    return qm.BellDiagonalState(1.0 - alpha_s, rest, rest, rest)


def effective_egr(r: float, eta: float, c_max: float) -> float:
    if min(r, eta, c_max) < 0.0:
        raise ValueError("rate, transmissivity, and capacity must be >= 0")
    return min(c_max, r * eta)


def e2e_rate(p_succ: float, r_in: float) -> float:
    if not 0.0 <= p_succ <= 1.0:
        raise ValueError(f"p_succ must be a probability, got {p_succ}")
    if r_in < 0.0:
        raise ValueError(f"rate must be >= 0, got {r_in}")
    return p_succ * r_in


def wfi(rates: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted Jain fairness index (Sum w r)^2 / (N Sum (w r)^2) in (0, 1].

    The 1/N normalization puts the all-equal optimum at exactly 1 so the
    index is comparable against a threshold in (0, 1].
    """
    if len(rates) != len(weights) or len(rates) < 1:
        raise ValueError("need one weight per rate")
    if any(w <= 0.0 for w in weights):
        raise ValueError("weights must be > 0")
    if any(r < 0.0 for r in rates):
        raise ValueError("rates must be >= 0")
    products = [w * r for w, r in zip(weights, rates)]
    denom = len(products) * sum(p * p for p in products)
    if denom == 0.0:
        raise ValueError("fairness undefined for an all-zero rate vector")
    total = sum(products)
    # Cauchy-Schwarz bounds the index by 1; clamp the last-ulp overshoot
    return min(total * total / denom, 1.0)


def link_budgets(scenario: Scenario, ris_pos: geo.Point3) -> tuple[LinkBudget, ...]:
    """Physical-layer figures for every user with the relay at ris_pos.

    Fading enters the transmissivity in expectation (unit mean); its
    randomness is already integrated inside the success probability.
    """
    out = []
    for user in scenario.users:
        d = geo.e2e_distance(scenario.qbs, ris_pos, user.position)
        env = scenario.environment
        model = ch.composite_model_at_distance(
            d,
            scenario.link,
            env.cn2,
            env.aperture_radius,
            env.divergence,
            env.jitter_sigma,
        )
        p_succ = ch.success_probability(model, scenario.link)
        sigma_r2 = ch.rytov_variance(model.turbulence, scenario.link.wavelength, d)
        p_pd = ch.phase_damping_prob(sigma_r2)
        vt = model.pointing.vartheta
        mean_pointing = model.pointing.a0 * vt / (vt + 1.0)
        mean_gain = model.h_pl * mean_pointing
        varsigma = ra.reflection_efficiency(
            scenario.ris_defaults, mean_gain / scenario.link.chi_th
        )
        eta = ch.transmissivity(varsigma, model.h_pl, 1.0, mean_pointing)
        out.append(LinkBudget(d, p_succ, p_pd, eta, varsigma))
    return tuple(out)


def evaluate(
    scenario: Scenario,
    solution: Solution,
    budgets: tuple[LinkBudget, ...] | None = None,
) -> Evaluation:
    """Score a solution; pass precomputed budgets to reuse channel work."""
    n = scenario.n_users
    if len(solution.r_in) != n:
        raise ValueError(f"need one rate per user ({n}), got {len(solution.r_in)}")
    if len(solution.modes) != scenario.ris_defaults.n_elements:
        raise ValueError(
            f"need one mode per element ({scenario.ris_defaults.n_elements}), "
            f"got {len(solution.modes)}"
        )
    if budgets is None:
        budgets = link_budgets(scenario, solution.ris_pos)

    rates = []
    fidelities = []
    for user, r_in, b in zip(scenario.users, solution.r_in, budgets):
        rates.append(e2e_rate(b.p_succ, r_in))
        pipe = qm.NoisePipeline(scenario.p1, b.p_pd, b.p_succ)
        fidelities.append(qm.e2e_fidelity_closed(bell_state_for_rate(r_in), pipe))

    weights = [u.weight for u in scenario.users]
    weighted_sum = sum(w * r for w, r in zip(weights, rates))
    fairness = 0.0 if all(r == 0.0 for r in rates) else wfi(rates, weights)

    total_in = sum(solution.r_in)
    rate_slack = min(r - u.r_min for r, u in zip(rates, scenario.users))
    fid_slack = min(f - u.f_min for f, u in zip(fidelities, scenario.users))
    outside = geo.region_distance(scenario.region, solution.ris_pos)
    constraints = (
        ConstraintCheck("memory_cap", total_in <= scenario.c_max, scenario.c_max - total_in),
        ConstraintCheck("rate_floor", rate_slack >= 0.0, rate_slack),
        ConstraintCheck("fidelity_floor", fid_slack >= 0.0, fid_slack),
        ConstraintCheck("fairness", fairness >= scenario.delta_th, fairness - scenario.delta_th),
        ConstraintCheck("region", outside == 0.0, -outside),
        ConstraintCheck("modes_binary", True, 0.0),
    )
    return Evaluation(
        d_e2e=tuple(b.d_e2e for b in budgets),
        p_succ=tuple(b.p_succ for b in budgets),
        p_pd=tuple(b.p_pd for b in budgets),
        eta=tuple(b.eta for b in budgets),
        r_e2e=tuple(rates),
        fidelity=tuple(fidelities),
        weighted_sum=weighted_sum,
        wfi=fairness,
        constraints=constraints,
    )


def evaluation_rows(ev: Evaluation) -> list[tuple]:
    """Per-user rows matching EVALUATION_CSV_HEADER."""
    return [
        (i, ev.d_e2e[i], ev.p_succ[i], ev.p_pd[i], ev.eta[i], ev.r_e2e[i], ev.fidelity[i])
        for i in range(len(ev.r_e2e))
    ]


def _all_passive_modes(scenario: Scenario) -> tuple[int, ...]:
    return (0,) * scenario.ris_defaults.n_elements


def baseline_rate_max(scenario: Scenario, ris_pos: geo.Point3) -> Solution:
    """Greedy throughput foil: everything to the best link, floors elsewhere.

    Every other user gets the minimal injection meeting its rate floor (none
    when the link is dead); fairness is deliberately ignored.
    """
    budgets = link_budgets(scenario, ris_pos)
    best = max(range(scenario.n_users), key=lambda i: (budgets[i].eta, -i))
    r_in = [0.0] * scenario.n_users
    for i, (user, b) in enumerate(zip(scenario.users, budgets)):
        if i != best and user.r_min > 0.0 and b.p_succ > 0.0:
            r_in[i] = user.r_min / b.p_succ
    r_in[best] = max(scenario.c_max - sum(r_in), 0.0)
    return Solution(tuple(r_in), ris_pos, _all_passive_modes(scenario))


def baseline_log_rate(scenario: Scenario, ris_pos: geo.Point3) -> Solution:
    """Proportional-fair foil: weight-proportional split of the budget.

    The log objective makes the optimal injection proportional to the
    weight, independent of per-link transmissivity; shares above the valid
    per-user rate cap are clamped and the remainder redistributed.
    """
    n = scenario.n_users
    r_in = [0.0] * n
    active = list(range(n))
    remaining = scenario.c_max
    while active:
        total_w = sum(scenario.users[i].weight for i in active)
        shares = {i: remaining * scenario.users[i].weight / total_w for i in active}
        over = [i for i in active if shares[i] > R_IN_CAP]
        if not over:
            for i in active:
                r_in[i] = shares[i]
            break
        for i in over:
            r_in[i] = R_IN_CAP
            remaining -= R_IN_CAP
            active.remove(i)
    return Solution(tuple(r_in), ris_pos, _all_passive_modes(scenario))
