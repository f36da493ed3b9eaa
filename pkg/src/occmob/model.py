"""Core model: thresholds, true-mobility matrix, identification and indexes.

The model partitions occupations into three ordered classes (Working, Middle,
Upper). A child with endowment theta, drawn uniformly on a support that
depends on the father's class, picks the class whose net expected utility is
highest; with two income-incentive thresholds lambda_M <= lambda_U the choice
rule is

    theta <  lambda_M            -> Working
    lambda_M <= theta < lambda_U -> Middle
    theta >= lambda_U            -> Upper

Integrating the rule over the class-conditional supports yields the
true-mobility matrix Q; inverting that construction identifies the six
parameters from an estimated Q. Everything here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import (
    DegenerateSupportError,
    InvalidParamsError,
    InvalidPrimitivesError,
    NonIdentifiableError,
    NotStochasticError,
    UndefinedIndexError,
)

__all__ = [
    "OccClass",
    "Primitives",
    "Thresholds",
    "ModelParams",
    "MobilityIndexes",
    "ClassShares",
    "as_transition_matrix",
    "as_shares",
    "thresholds_from_primitives",
    "build_true_matrix",
    "identify_params",
    "mobility_indexes",
    "i_true_from_params",
    "opportunity_index",
    "lack_of_incentive_index",
    "pms_matrix",
    "pis_matrix",
]


class OccClass(IntEnum):
    """The three occupational classes, ordered Working < Middle < Upper."""

    WORKING = 0
    MIDDLE = 1
    UPPER = 2

    @property
    def code(self) -> str:
        return "WMU"[self.value]

    @classmethod
    def from_code(cls, code: str) -> "OccClass":
        try:
            return cls("WMU".index(code.strip().upper()))
        except ValueError:
            raise ValueError(f"unknown class code {code!r}, expected W, M or U") from None


@dataclass(frozen=True)
class Primitives:
    """Deep parameters of the random-utility model (forward simulation only).

    mu_* are expected systematic utilities, sigma2_* the utility variances,
    c_m_e / c_u_e the education access costs for Middle / Upper, delta the
    attribute cost-reduction coefficient, and kappa the slope of the linear
    risk premium rp(x) = kappa * (x - 1) applied to variance ratios.
    """

    mu_w: float
    mu_m: float
    mu_u: float
    sigma2_w: float
    sigma2_m: float
    sigma2_u: float
    c_m_e: float
    c_u_e: float
    delta: float
    kappa: float = 0.0

    def violations(self) -> list[str]:
        out = []
        if not self.mu_w <= self.mu_m <= self.mu_u:
            out.append("mu_w <= mu_m <= mu_u")
        if not self.c_u_e > self.c_m_e:
            out.append("c_u_e > c_m_e")
        if min(self.sigma2_w, self.sigma2_m, self.sigma2_u) <= 0:
            out.append("sigma2 > 0 for every class")
        if not 0.0 <= self.delta <= 1.0:
            out.append("0 <= delta <= 1")
        if self.kappa < 0:
            out.append("kappa >= 0")
        return out


@dataclass(frozen=True)
class Thresholds:
    """Income-incentive thresholds plus the Working->Upper cross check.

    valid is True when the strict ordering lambda_u > lambda_wu > lambda_m
    holds and all three values lie in [0, 1]; it is reported, never enforced.
    """

    lambda_m: float
    lambda_u: float
    lambda_wu: float
    valid: bool


@dataclass(frozen=True)
class ModelParams:
    """The six identified parameters of the model.

    lambda_m / lambda_u are the choice thresholds; (0, theta_max),
    (theta_m_min, theta_m_max) and (theta_min, 1) are the endowment supports
    conditional on a Working / Middle / Upper father.
    """

    lambda_m: float
    lambda_u: float
    theta_max: float
    theta_min: float
    theta_m_min: float
    theta_m_max: float

    def violations(self) -> list[str]:
        """Violated well-definedness inequalities (empty list = valid)."""
        out = []
        if not 0.0 <= self.lambda_m <= self.lambda_u <= 1.0:
            out.append("0 <= lambda_m <= lambda_u <= 1")
        if not self.theta_max >= self.lambda_u:
            out.append("theta_max >= lambda_u")
        if not self.theta_m_max >= self.lambda_u:
            out.append("theta_m_max >= lambda_u")
        if not self.lambda_m >= self.theta_m_min:
            out.append("lambda_m >= theta_m_min")
        if not self.lambda_m >= self.theta_min:
            out.append("lambda_m >= theta_min")
        if not self.theta_m_min < self.theta_m_max:
            out.append("theta_m_min < theta_m_max")
        if not 0.0 < self.theta_max <= 1.0:
            out.append("0 < theta_max <= 1")
        if not 0.0 <= self.theta_min < 1.0:
            out.append("0 <= theta_min < 1")
        if not 0.0 <= self.theta_m_min < 1.0:
            out.append("0 <= theta_m_min < 1")
        if not 0.0 < self.theta_m_max <= 1.0:
            out.append("0 < theta_m_max <= 1")
        return out

    @property
    def is_valid(self) -> bool:
        return not self.violations()

    def as_dict(self) -> dict[str, float]:
        return {
            "lambda_m": float(self.lambda_m),
            "lambda_u": float(self.lambda_u),
            "theta_max": float(self.theta_max),
            "theta_min": float(self.theta_min),
            "theta_m_min": float(self.theta_m_min),
            "theta_m_max": float(self.theta_m_max),
        }


@dataclass(frozen=True)
class MobilityIndexes:
    """The five scalar mobility indexes.

    Identities i_obs = i_true * i_os and i_true = i_opp - i_loi hold by
    construction up to floating-point noise.
    """

    i_obs: float
    i_true: float
    i_os: float
    i_opp: float
    i_loi: float

    def as_dict(self) -> dict[str, float]:
        return {
            "i_obs": float(self.i_obs),
            "i_true": float(self.i_true),
            "i_os": float(self.i_os),
            "i_opp": float(self.i_opp),
            "i_loi": float(self.i_loi),
        }


@dataclass(frozen=True)
class ClassShares:
    """Population shares by occupational class (validated simplex vector)."""

    shares: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "shares", as_shares(self.shares))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.shares, dtype=dtype)

    def __getitem__(self, i):
        return self.shares[i]

    def tolist(self) -> list[float]:
        return self.shares.tolist()


def as_transition_matrix(m, tol: float = 1e-6) -> np.ndarray:
    """Validate and exactly renormalize a 3x3 row-stochastic matrix.

    Accepts anything array-like. Entries may deviate from [0, 1] and row sums
    from 1 by at most tol (published tables are rounded to 2 decimals, so
    callers may pass a looser tol); rows are then renormalized to sum to 1
    exactly. Raises NotStochasticError beyond tolerance.
    """
    a = np.asarray(m, dtype=float)
    if a.shape != (3, 3):
        raise NotStochasticError(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotStochasticError("matrix has non-finite entries")
    if a.min() < -tol or a.max() > 1.0 + tol:
        raise NotStochasticError(
            f"entries outside [0, 1] beyond tolerance {tol:g} (min {a.min():g}, max {a.max():g})"
        )
    sums = a.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > 3 * tol:
        raise NotStochasticError(
            f"row sums deviate from 1 beyond tolerance (sums {sums.tolist()})"
        )
    a = np.clip(a, 0.0, None)
    return a / a.sum(axis=1, keepdims=True)


def as_shares(v, tol: float = 1e-6) -> np.ndarray:
    """Validate and exactly renormalize a 3-vector of class shares."""
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise NotStochasticError(f"expected a 3-vector of shares, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotStochasticError("shares have non-finite entries")
    if a.min() < -tol:
        raise NotStochasticError(f"negative share beyond tolerance (min {a.min():g})")
    total = a.sum()
    if abs(total - 1.0) > 3 * tol:
        raise NotStochasticError(f"shares sum to {total:g}, expected 1")
    a = np.clip(a, 0.0, None)
    return a / a.sum()


def _rp(ratio: float, kappa: float) -> float:
    # Linear risk premium: zero at equal variances, negative when the
    # destination class is less risky.
    return kappa * (ratio - 1.0)


def thresholds_from_primitives(p: Primitives) -> Thresholds:
    """Compute the income-incentive thresholds from deep parameters.

    lambda_m  = [mu_w + rp(s2_m/s2_w) + c_m_e] / (2 mu_m + delta c_m_e)
    lambda_u  = [mu_m + rp(s2_u/s2_m) + c_u_e] / (2 mu_u + delta c_u_e)
    lambda_wu = [mu_w + rp(s2_u/s2_w) + c_u_e] / (2 mu_u + delta c_u_e)

    lambda_wu is computed for the ordering check only; the true-mobility
    matrix depends on lambda_m and lambda_u alone.
    """
    bad = p.violations()
    if bad:
        raise InvalidPrimitivesError("primitives violate: " + "; ".join(bad))
    den_m = 2.0 * p.mu_m + p.delta * p.c_m_e
    den_u = 2.0 * p.mu_u + p.delta * p.c_u_e
    if den_m == 0.0 or den_u == 0.0:
        raise InvalidPrimitivesError("zero threshold denominator (mu and delta*c both zero)")
    lam_m = (p.mu_w + _rp(p.sigma2_m / p.sigma2_w, p.kappa) + p.c_m_e) / den_m
    lam_u = (p.mu_m + _rp(p.sigma2_u / p.sigma2_m, p.kappa) + p.c_u_e) / den_u
    lam_wu = (p.mu_w + _rp(p.sigma2_u / p.sigma2_w, p.kappa) + p.c_u_e) / den_u
    in_range = all(0.0 <= v <= 1.0 for v in (lam_m, lam_u, lam_wu))
    valid = in_range and lam_u > lam_wu > lam_m
    return Thresholds(lam_m, lam_u, lam_wu, valid)


def _check_supports(params: ModelParams) -> None:
    if params.theta_min >= 1.0:
        raise DegenerateSupportError("upper-class support has zero width (theta_min >= 1)")
    if params.theta_max <= 0.0:
        raise DegenerateSupportError("working-class support has zero width (theta_max <= 0)")
    if params.theta_m_max <= params.theta_m_min:
        raise DegenerateSupportError(
            "middle-class support has zero width (theta_m_min >= theta_m_max)"
        )


def build_true_matrix(params: ModelParams) -> np.ndarray:
    """True-mobility matrix: choice-rule mass per class-conditional support.

    Row i gives the distribution of the child's class for a father in class
    i, integrating the threshold rule over that father's uniform endowment
    support. Row-stochastic by construction; requires the well-definedness
    inequalities so every cell is a probability.
    """
    _check_supports(params)
    bad = params.violations()
    if bad:
        raise InvalidParamsError(bad)
    lm, lu = params.lambda_m, params.lambda_u
    tmax, tmin = params.theta_max, params.theta_min
    tmm, tmx = params.theta_m_min, params.theta_m_max
    span_m = tmx - tmm
    span_u = 1.0 - tmin
    return np.array(
        [
            [lm / tmax, (lu - lm) / tmax, (tmax - lu) / tmax],
            [(lm - tmm) / span_m, (lu - lm) / span_m, (tmx - lu) / span_m],
            [(lm - tmin) / span_u, (lu - lm) / span_u, (1.0 - lu) / span_u],
        ]
    )


def identify_params(q, tol: float = 1e-6) -> ModelParams:
    """Invert a true-mobility matrix into the six model parameters.

    The first two columns of rows Working and Upper pin the thresholds; the
    diagonal then pins the support bounds. Values are never clamped:
    out-of-range results come back as-is and show up in the returned
    params' violations() report.
    """
    q = as_transition_matrix(q, tol=tol)
    for i in range(3):
        if q[i, i] <= 0.0:
            raise NonIdentifiableError(
                f"zero diagonal entry q{i + 1}{i + 1}: class {OccClass(i).code} never persists"
            )
    r1 = q[0, 1] / q[0, 0]
    r3 = q[2, 1] / q[2, 2]
    den = (1.0 + r1) * (1.0 + r3) - 1.0
    if den == 0.0:
        # For a nonnegative Q this forces q12 = q32 = 0, so the numerator is
        # zero as well; resolve 0/0 to 0 (no mass ever moves up from Working
        # or Upper). A nonzero numerator here cannot happen for valid input.
        if r3 != 0.0:
            raise NonIdentifiableError("degenerate identification system (zero denominator)")
        lam_m = 0.0
    else:
        lam_m = r3 / den
    lam_u = lam_m * (1.0 + r1)
    theta_max = lam_m / q[0, 0]
    theta_min = 1.0 - (1.0 - lam_u) / q[2, 2]
    theta_m_min = lam_m - (lam_u - lam_m) * (q[1, 0] / q[1, 1])
    theta_m_max = theta_m_min + (lam_u - lam_m) / q[1, 1]
    return ModelParams(lam_m, lam_u, theta_max, theta_min, theta_m_min, theta_m_max)


def mobility_indexes(p, q, params: ModelParams | None = None) -> MobilityIndexes:
    """Compute the five indexes from observed and true mobility matrices.

    i_obs and i_true are one minus the normalized trace; i_os is their
    ratio (structural mobility); i_opp is the equality-of-opportunity area
    and i_loi the lack-of-incentive remainder, both from the parameters
    identified out of q (pass params to reuse an existing identification).
    """
    p = as_transition_matrix(p)
    q = as_transition_matrix(q)
    i_obs = 1.0 - np.trace(p) / 3.0
    i_true = 1.0 - np.trace(q) / 3.0
    if i_true == 0.0:
        raise UndefinedIndexError("structural index undefined: true mobility is zero (Q = identity)")
    if params is None:
        params = identify_params(q)
    i_opp = opportunity_index(params)
    return MobilityIndexes(
        i_obs=i_obs,
        i_true=i_true,
        i_os=i_obs / i_true,
        i_opp=i_opp,
        i_loi=i_opp - i_true,
    )


def i_true_from_params(params: ModelParams) -> float:
    """Closed-form true-mobility index, 1 - tr(build_true_matrix(params))/3."""
    _check_supports(params)
    bad = params.violations()
    if bad:
        raise InvalidParamsError(bad)
    lm, lu = params.lambda_m, params.lambda_u
    return 1.0 - (
        lm / params.theta_max
        + (lu - lm) / (params.theta_m_max - params.theta_m_min)
        + (1.0 - lu) / (1.0 - params.theta_min)
    ) / 3.0


def opportunity_index(params: ModelParams) -> float:
    """Equality-of-opportunity index: mean width of the endowment supports."""
    return (
        1.0
        + params.theta_max
        + params.theta_m_max
        - params.theta_min
        - params.theta_m_min
    ) / 3.0


def lack_of_incentive_index(params: ModelParams) -> float:
    """Lack-of-incentive index in its explicit form.

    Algebraically equal to opportunity_index(params) minus
    i_true_from_params(params); the explicit form is kept as an
    independently testable expression.
    """
    _check_supports(params)
    lm, lu = params.lambda_m, params.lambda_u
    return (
        1.0
        + params.theta_max
        + params.theta_m_max
        - params.theta_min
        - params.theta_m_min
        + lm / params.theta_max
        + (lu - lm) / (params.theta_m_max - params.theta_m_min)
        + (1.0 - lu) / (1.0 - params.theta_min)
    ) / 3.0 - 1.0


def pms_matrix(lambda_m: float, lambda_u: float) -> np.ndarray:
    """Perfect-mobility matrix: child class independent of the father's."""
    if not 0.0 <= lambda_m <= lambda_u <= 1.0:
        raise InvalidParamsError(["0 <= lambda_m <= lambda_u <= 1"])
    row = (lambda_m, lambda_u - lambda_m, 1.0 - lambda_u)
    return np.array([row, row, row])


def pis_matrix() -> np.ndarray:
    """Perfect-immobility matrix: every child stays in the father's class."""
    return np.eye(3)
