"""Forward Monte-Carlo of the threshold choice model.

Draws endowments from the class-conditional uniform supports, applies the
two-threshold choice rule, and tallies father-to-child transitions; also
generates synthetic log-normal income panels so the premia pipeline can be
exercised end to end on data with known moments.

Randomness comes from a Philox counter-based generator seeded with the
config seed; agent i consumes the i-th variate of the stream, so a shard
[a, b) of agents can reproduce its draws independently of the rest and
tallies are order-independent. Identical configs give identical counts on
every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataio import IncomeRecord, TransitionCounts
from .errors import InvalidParamsError, InvalidPrimitivesError
from .model import (
    ClassShares,
    ModelParams,
    OccClass,
    Primitives,
    thresholds_from_primitives,
)

__all__ = [
    "SimConfig",
    "Agent",
    "params_from_primitives",
    "allocate_fathers",
    "draw_theta",
    "choose_class",
    "simulate_cohort",
    "simulate_agents",
    "simulate_incomes",
]


def params_from_primitives(prim: Primitives, theta_max: float = 1.0,
                           theta_min: float = 0.0, theta_m_min: float = 0.0,
                           theta_m_max: float = 1.0) -> ModelParams:
    """Thresholds from deep parameters plus caller-chosen supports.

    Supports default to the full unit interval for every father class (the
    perfect-mobility configuration); the deep model pins down the lambdas
    only, so supports stay free knobs.
    """
    th = thresholds_from_primitives(prim)
    return ModelParams(th.lambda_m, th.lambda_u, theta_max, theta_min,
                       theta_m_min, theta_m_max)


def _support_violations(p: ModelParams) -> list[str]:
    # The simulator needs sane supports and ordered thresholds, nothing
    # more: configurations that break the well-definedness inequalities
    # (e.g. immobile societies) are legitimate things to simulate.
    out = []
    if not 0.0 <= p.lambda_m <= p.lambda_u <= 1.0:
        out.append("0 <= lambda_m <= lambda_u <= 1")
    if not 0.0 < p.theta_max <= 1.0:
        out.append("0 < theta_max <= 1")
    if not 0.0 <= p.theta_m_min < p.theta_m_max <= 1.0:
        out.append("0 <= theta_m_min < theta_m_max <= 1")
    if not 0.0 <= p.theta_min < 1.0:
        out.append("0 <= theta_min < 1")
    return out


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: model, father shares, population size, seed."""

    params: ModelParams
    fathers: ClassShares
    population: int
    seed: int

    def __post_init__(self):
        if isinstance(self.params, Primitives):
            object.__setattr__(self, "params", params_from_primitives(self.params))
        if not isinstance(self.fathers, ClassShares):
            object.__setattr__(self, "fathers", ClassShares(self.fathers))
        if self.population < 1:
            raise ValueError("population must be >= 1")


@dataclass(frozen=True)
class Agent:
    """One simulated father-child pair."""

    father_class: OccClass
    theta: float
    chosen_class: OccClass
    log_utility: float | None = None


def allocate_fathers(shares, population: int) -> np.ndarray:
    """Integer father counts per class by largest-remainder rounding.

    Exact marginals up to rounding; remainder seats go to the largest
    fractional parts, ties to the lower class index. Deterministic.
    """
    s = np.asarray(ClassShares(shares).shares)
    quota = s * population
    base = np.floor(quota).astype(np.int64)
    frac = quota - base
    left = population - int(base.sum())
    for i in np.argsort(-frac, kind="stable")[:left]:
        base[i] += 1
    return base


def draw_theta(father: OccClass, params: ModelParams, rng) -> float:
    """One endowment draw from the father-conditional uniform support."""
    lo, span = _supports(params)
    f = int(father)
    return float(lo[f] + rng.random() * span[f])


def choose_class(theta: float, lambda_m: float, lambda_u: float) -> OccClass:
    """Threshold rule; boundary endowments take the higher class."""
    if not 0.0 <= lambda_m <= lambda_u <= 1.0:
        raise InvalidParamsError(["0 <= lambda_m <= lambda_u <= 1"])
    return OccClass(int(theta >= lambda_m) + int(theta >= lambda_u))


def _supports(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([0.0, params.theta_m_min, params.theta_min])
    hi = np.array([params.theta_max, params.theta_m_max, 1.0])
    return lo, hi - lo


def _draws(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    bad = _support_violations(cfg.params)
    if bad:
        raise InvalidParamsError(bad)
    counts = allocate_fathers(cfg.fathers, cfg.population)
    fathers = np.repeat(np.arange(3, dtype=np.int64), counts)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    u = rng.random(cfg.population)
    lo, span = _supports(cfg.params)
    return fathers, u, lo, span


def simulate_cohort(cfg: SimConfig) -> TransitionCounts:
    """Simulate one father-to-child generation and tally transitions."""
    fathers, u, lo, span = _draws(cfg)
    counts = _kernels.tally_transitions(
        u, fathers, lo, span, cfg.params.lambda_m, cfg.params.lambda_u
    )
    return TransitionCounts(counts)


def simulate_agents(cfg: SimConfig) -> list[Agent]:
    """Like simulate_cohort but keeps every agent.

    Uses the identical variate-per-agent rule, so tallying the returned
    agents reproduces simulate_cohort(cfg) exactly. Meant for moderate
    populations feeding the income generator.
    """
    fathers, u, lo, span = _draws(cfg)
    theta = lo[fathers] + u * span[fathers]
    child = (theta >= cfg.params.lambda_m).astype(np.int64) + (theta >= cfg.params.lambda_u)
    return [
        Agent(OccClass(int(f)), float(t), OccClass(int(c)))
        for f, t, c in zip(fathers, theta, child)
    ]


def simulate_incomes(prim: Primitives, agents: list[Agent], rng,
                     wave_year: int = 2000, birth_year: int = 1950) -> list[IncomeRecord]:
    """Synthetic incomes: log income = systematic utility + Gaussian noise.

    The systematic part depends on the chosen class: mu_w for Working, and
    2*theta*mu for Middle/Upper (the same theta that drove the choice). The
    noise variance is the chosen class's sigma2; zero variance is allowed
    here so exact-moment fixtures can be generated. Every agent yields one
    record tagged with the given wave and birth year.
    """
    sig2 = np.array([prim.sigma2_w, prim.sigma2_m, prim.sigma2_u])
    if not np.all(np.isfinite(sig2)) or sig2.min() < 0:
        raise InvalidPrimitivesError("class variances must be finite and >= 0")
    cls = np.array([int(a.chosen_class) for a in agents], dtype=np.int64)
    theta = np.array([a.theta for a in agents])
    mu = np.array([prim.mu_w, prim.mu_m, prim.mu_u])
    v = np.where(cls == 0, mu[0], 2.0 * theta * mu[cls])
    log_u = v + rng.standard_normal(len(agents)) * np.sqrt(sig2[cls])
    return [
        IncomeRecord(wave_year, birth_year, OccClass(int(c)), float(np.exp(x)))
        for c, x in zip(cls, log_u)
    ]
