"""Empirical pipeline: observed matrix, structural matrix, amendment,
indexes, bootstrap standard errors, and income premia.

The observed transition matrix P is decomposed as P = Q.R where R is the
row-stochastic matrix moving the fewest people consistent with the change in
the class structure (a small LP maximizing the trace) and Q = P.R^-1 is the
incentive-driven part. When Q comes out with negative entries it is amended
by a zero-and-renormalize fixed point, after which Q.R = P holds only
approximately; the residual is reported, never hidden.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .dataio import CohortSpec, MicroRecord, IncomeRecord, TransitionCounts
from .errors import (
    DataError,
    DecompositionError,
    EmptyClassError,
    MobilityError,
)
from .lp import LinearProgram, solve_lp
from .model import ClassShares, identify_params, mobility_indexes

__all__ = [
    "TransitionCounts",
    "Decomposition",
    "BootstrapSummary",
    "PremiaReport",
    "estimate_p",
    "shares_from_counts",
    "solve_r",
    "amend_decomposition",
    "decompose",
    "bootstrap",
    "income_premia",
    "premium_interpretation",
]

_CLASS_CODES = "WMU"

# Negative entries of Q smaller than this (in magnitude) are treated as
# inversion noise and clamped rather than triggering the amendment loop.
_NEG_TOL = 1e-9


def _as_counts(counts) -> np.ndarray:
    a = np.asarray(counts, dtype=float)
    if a.shape != (3, 3):
        raise DataError(f"expected 3x3 counts, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or a.min() < 0:
        raise DataError("counts must be finite and nonnegative")
    return a


def estimate_p(counts) -> np.ndarray:
    """Observed transition matrix: counts normalized row by row."""
    a = _as_counts(counts)
    totals = a.sum(axis=1)
    for i in range(3):
        if totals[i] == 0.0:
            raise EmptyClassError(f"father class {_CLASS_CODES[i]} has no observations")
    return a / totals[:, None]


def shares_from_counts(counts) -> tuple[ClassShares, ClassShares]:
    """Marginal class shares of fathers (rows) and children (columns)."""
    a = _as_counts(counts)
    total = a.sum()
    if total == 0.0:
        raise EmptyClassError("no observations")
    return ClassShares(a.sum(axis=1) / total), ClassShares(a.sum(axis=0) / total)


def solve_r(fathers, children) -> np.ndarray:
    """Structural matrix under globally minimum mobility.

    Maximizes tr(R) over row-stochastic R with R'.fathers = children,
    i.e. moves only the mass the change in class structure forces to move.
    Solved as a 9-variable LP (row-major R entries); with valid share
    vectors and strictly positive father shares the program is feasible,
    but solver statuses are surfaced if numerics disagree.
    """
    f = np.asarray(ClassShares(fathers).shares)
    c = np.asarray(ClassShares(children).shares)
    for i in range(3):
        if f[i] == 0.0:
            raise EmptyClassError(
                f"father share for class {_CLASS_CODES[i]} is zero; "
                "merge it with a neighboring class before decomposing"
            )
    obj = np.zeros(9)
    obj[[0, 4, 8]] = -1.0
    a = np.zeros((6, 9))
    for j in range(3):  # children margin: sum_i f_i r_ij = c_j
        for i in range(3):
            a[j, 3 * i + j] = f[i]
    for i in range(3):  # row sums
        a[3 + i, 3 * i:3 * i + 3] = 1.0
    sol = solve_lp(LinearProgram(obj, a, np.concatenate([c, np.ones(3)])))
    if sol.status != "optimal":
        raise DecompositionError(f"structural mobility program is {sol.status}")
    r = sol.x.reshape(3, 3).copy()
    r[(r < 0) & (r >= -1e-12)] = 0.0
    return r


def _rownorm(m: np.ndarray) -> np.ndarray:
    sums = m.sum(axis=1)
    if np.any(sums <= 0):
        raise DecompositionError("cannot row-normalize: nonpositive row sum")
    return m / sums[:, None]


def _clamp_tiny(q: np.ndarray) -> np.ndarray:
    # Entries in [-_NEG_TOL, 0) are rounding debris from the inversion.
    q = q.copy()
    q[(q < 0) & (q >= -_NEG_TOL)] = 0.0
    return _rownorm(q)


def amend_decomposition(p, r0) -> tuple[np.ndarray, np.ndarray, bool]:
    """Correct a decomposition whose implied Q has negative entries.

    Q' = P.R0^-1 is kept as-is when nonnegative. Otherwise: zero the
    negative entries of Q, row-normalize, recompute R = rownorm(Q^-1.P),
    and take Q = P.R^-1 again; repeated until Q is clean (at most 5
    passes). The amended pair no longer multiplies back to P exactly;
    callers report the residual. R itself may keep small negative entries,
    which is inherent to the procedure and left visible.
    """
    p = np.asarray(p, dtype=float)
    r0 = np.asarray(r0, dtype=float)
    try:
        q = p @ np.linalg.inv(r0)
    except np.linalg.LinAlgError:
        raise DecompositionError("structural matrix is singular") from None
    if q.min() >= -_NEG_TOL:
        return _clamp_tiny(q), r0, False

    r = r0
    for _ in range(5):
        q3 = _rownorm(np.clip(q, 0.0, None))
        try:
            r = _rownorm(np.linalg.inv(q3) @ p)
            q = p @ np.linalg.inv(r)
        except np.linalg.LinAlgError:
            raise DecompositionError("amendment produced a singular matrix") from None
        if q.min() >= -_NEG_TOL:
            return _clamp_tiny(q), r, True
    raise DecompositionError("amendment did not converge in 5 passes")


@dataclass(frozen=True)
class Decomposition:
    """Observed matrix P split into true part Q and structural part R."""

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    fathers: ClassShares
    children: ClassShares
    amended: bool
    qr_residual: float

    @property
    def r_min_entry(self) -> float:
        return float(self.r.min())

    def to_document(self) -> dict:
        return {
            "fathers": np.asarray(self.fathers).tolist(),
            "children": np.asarray(self.children).tolist(),
            "matrices": {
                "P": self.p.tolist(),
                "R": self.r.tolist(),
                "Q": self.q.tolist(),
            },
            "diagnostics": {
                "amended": self.amended,
                "qr_residual": self.qr_residual,
                "r_min_entry": self.r_min_entry,
            },
        }


def decompose(counts) -> Decomposition:
    """Full chain: estimate P, solve for R, amend Q, report residuals."""
    a = _as_counts(counts)
    p = estimate_p(a)
    fathers, children = shares_from_counts(a)
    r0 = solve_r(fathers, children)
    q, r, amended = amend_decomposition(p, r0)
    residual = float(np.max(np.abs(q @ r - p)))
    return Decomposition(p, q, r, fathers, children, amended, residual)


# ---------------------------------------------------------------------------
# bootstrap

ESTIMATE_KEYS = (
    "i_obs", "i_true", "i_os", "i_opp", "i_loi",
    "lambda_m", "lambda_u", "theta_max", "theta_min", "theta_m_min", "theta_m_max",
)


@dataclass(frozen=True)
class BootstrapSummary:
    """Point estimates with resampling standard errors.

    replications counts successful replicates; failed ones (singular or
    non-identifiable resamples) are dropped and counted in failures.
    """

    replications: int
    failures: int
    point: dict[str, float]
    se: dict[str, float]
    seed: int
    flags: tuple[str, ...]

    def to_document(self) -> dict:
        return {
            "replications": self.replications,
            "failures": self.failures,
            "seed": self.seed,
            "flags": list(self.flags),
            "point": dict(self.point),
            "se": dict(self.se),
        }


def _estimates_from_counts(counts: np.ndarray) -> dict[str, float]:
    dec = decompose(counts)
    params = identify_params(dec.q)
    idx = mobility_indexes(dec.p, dec.q, params)
    out = idx.as_dict()
    out.update(params.as_dict())
    return out


def bootstrap(records: list[MicroRecord], cohort: CohortSpec, replications: int = 1000,
              seed: int = 0, use_weights: bool = True) -> BootstrapSummary:
    """Resample father-child pairs within a cohort and re-estimate everything.

    Replicate r draws indexes with a generator seeded from (seed, r), so
    results do not depend on execution order. Standard errors are sample
    standard deviations (ddof=1) across successful replicates; point
    estimates come from the full (unresampled) cohort.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    recs = [rec for rec in records if cohort.contains(rec.birth_year)]
    if not recs:
        raise DataError(f"cohort {cohort.label!r} has no records")
    n = len(recs)
    f = np.array([rec.father_class for rec in recs], dtype=np.int64)
    c = np.array([rec.child_class for rec in recs], dtype=np.int64)
    if use_weights:
        w = np.array([rec.weight for rec in recs], dtype=float)
    else:
        w = np.ones(n)

    full = np.bincount(f * 3 + c, weights=w, minlength=9).reshape(3, 3)
    point = _estimates_from_counts(full)

    draws: dict[str, list[float]] = {k: [] for k in ESTIMATE_KEYS}
    failures = 0
    for rep in range(replications):
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(seed, spawn_key=(rep,)))
        )
        idx = rng.integers(0, n, n)
        counts = np.bincount(f[idx] * 3 + c[idx], weights=w[idx], minlength=9).reshape(3, 3)
        try:
            est = _estimates_from_counts(counts)
        except MobilityError:
            failures += 1
            continue
        for k in ESTIMATE_KEYS:
            draws[k].append(est[k])

    ok = replications - failures
    if ok == 0:
        raise DecompositionError(f"all {replications} bootstrap replicates failed")
    if ok > 1:
        se = {k: float(np.std(draws[k], ddof=1)) for k in ESTIMATE_KEYS}
    else:
        se = {k: 0.0 for k in ESTIMATE_KEYS}
    flags = []
    if ok == 1:
        flags.append("degenerate")
    if ok < 100:
        flags.append("low_replications")
    return BootstrapSummary(ok, failures, point, se, seed, tuple(flags))


# ---------------------------------------------------------------------------
# income premia


@dataclass(frozen=True)
class PremiaReport:
    """Log-income moments by class with the four premium ratios.

    Moments are computed per survey wave and class (cells with fewer than
    two usable incomes are skipped), then averaged across waves with
    weights proportional to cell counts; var is the square of the
    aggregated standard deviation.
    """

    class_log_means: np.ndarray
    class_log_sds: np.ndarray
    class_counts: np.ndarray
    ratios: dict[str, float]
    waves: dict[int, dict[str, dict[str, float]]]
    rejected: int
    flags: tuple[str, ...]

    def to_document(self) -> dict:
        return {
            "premia": {
                "ratios": dict(self.ratios),
                "class_log_means": self.class_log_means.tolist(),
                "class_log_sds": self.class_log_sds.tolist(),
                "class_counts": self.class_counts.tolist(),
                "rejected": self.rejected,
                "flags": list(self.flags),
                "waves": {
                    str(wave): {code: dict(stats) for code, stats in sorted(by_class.items())}
                    for wave, by_class in sorted(self.waves.items())
                },
            }
        }


def _ratio(num: float, den: float, flags: list[str], flag: str) -> float:
    if den == 0.0:
        if flag not in flags:
            flags.append(flag)
        return float("nan")
    return num / den


def income_premia(incomes: list[IncomeRecord], cohort: CohortSpec) -> PremiaReport:
    """Premium ratios mean_M/mean_W, mean_U/mean_M and the variance analogues.

    Works on log incomes. Nonpositive incomes are rejected and counted; a
    class without a single usable (wave, class) cell is an error. Constant
    incomes make the variance ratios undefined; they come back NaN with a
    degenerate_variance flag rather than raising.
    """
    cells: dict[tuple[int, int], list[float]] = {}
    rejected = 0
    for rec in incomes:
        if not cohort.contains(rec.birth_year):
            continue
        if not np.isfinite(rec.income) or rec.income <= 0:
            rejected += 1
            continue
        cells.setdefault((rec.wave_year, int(rec.occ_class)), []).append(log(rec.income))

    waves: dict[int, dict[str, dict[str, float]]] = {}
    agg_n = np.zeros(3)
    agg_mean = np.zeros(3)
    agg_sd = np.zeros(3)
    for (wave, cls), logs in sorted(cells.items()):
        n = len(logs)
        if n < 2:
            continue
        mean = float(np.mean(logs))
        sd = float(np.std(logs, ddof=1))
        waves.setdefault(wave, {})[_CLASS_CODES[cls]] = {"n": n, "mean": mean, "sd": sd}
        agg_n[cls] += n
        agg_mean[cls] += n * mean
        agg_sd[cls] += n * sd
    for cls in range(3):
        if agg_n[cls] == 0:
            raise EmptyClassError(
                f"class {_CLASS_CODES[cls]}: no wave with at least 2 usable incomes"
            )
    agg_mean /= agg_n
    agg_sd /= agg_n

    flags: list[str] = []
    var = agg_sd**2
    ratios = {
        "mean_m_over_w": _ratio(agg_mean[1], agg_mean[0], flags, "zero_mean"),
        "mean_u_over_m": _ratio(agg_mean[2], agg_mean[1], flags, "zero_mean"),
        "var_m_over_w": _ratio(var[1], var[0], flags, "degenerate_variance"),
        "var_u_over_m": _ratio(var[2], var[1], flags, "degenerate_variance"),
    }
    return PremiaReport(agg_mean, agg_sd, agg_n, ratios, waves, rejected, tuple(flags))


def premium_interpretation(ratio: float, base_income: float) -> float:
    """Income a premium ratio corresponds to at a given base: base**ratio."""
    if base_income <= 0:
        raise ValueError("base_income must be positive")
    return base_income**ratio
