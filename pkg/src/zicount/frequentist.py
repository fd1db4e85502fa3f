"""Maximum likelihood estimation and classical tests for excess zeros.

Tests address the null of no zero inflation (weight p = 0) against the
one-sided alternative p > 0, with two-sided variants.  The score statistic
has a closed form in the sufficient statistics (n, n0, ybar); the likelihood
ratio statistic needs the full-model MLE, obtained for the Poisson case by a
damped fixed-point iteration and for the geometric case in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .distributions import CountSample, Family, _log_likelihood, _loglik_gradient
from .errors import DegenerateSampleError

FIXED_POINT_TOL = 1e-10
FIXED_POINT_MAX_ITER = 10_000


class Sidedness(Enum):
    ONE_SIDED = "one"
    TWO_SIDED = "two"


class TestMethod(Enum):
    __test__ = False  # not a pytest class, despite the name

    SCORE = "score"
    LR = "lr"
    BAYES = "bayes"


@dataclass(frozen=True)
class MleResult:
    """Maximum likelihood fit of a zero-inflated power series model.

    ``boundary`` marks fits whose supremum is attained only in the closure of
    the parameter range (no zeros in the sample, or every positive count
    equal to one); ``p_hat`` is then the boundary value or NaN.
    """

    p_hat: float
    theta_hat: float
    loglik: float
    converged: bool
    iterations: int
    boundary: bool = False


@dataclass(frozen=True)
class TestReport:
    """Outcome of a single test for excess zeros."""

    __test__ = False  # not a pytest class, despite the name

    method: TestMethod
    statistic: float
    signed_root: float | None
    p_value: float | None
    posterior_prob: float | None
    alpha: float
    reject: bool
    sidedness: Sidedness
    mc_se: float | None = None


def mle_null(family: Family, sample: CountSample) -> MleResult:
    """MLE under the no-inflation null (p = 0).

    The base parameter is matched to the sample mean: the rate itself for
    Poisson, ``ybar / (1 + ybar)`` for geometric.
    """
    if sample.s == 0:
        raise DegenerateSampleError(
            "no positive counts: null MLE sits at the boundary of the base family")
    theta0 = family.theta_from_mean(sample.ybar)
    ll = _log_likelihood(family, 0.0, theta0, sample)
    return MleResult(0.0, theta0, ll, converged=True, iterations=0)


def _poisson_theta_fixed_point(c: float, tol: float, max_iter: int):
    """Solve ``theta = c * (1 - exp(-theta))`` by damped fixed point.

    ``c = s / (n - n0)`` is both the starting value and the map scale.  The
    map is monotone and contracts near the solution; damping by half guards
    against overshoot when successive steps change direction.
    """
    theta = c
    prev_delta = 0.0
    for it in range(1, max_iter + 1):
        new = c * -math.expm1(-theta)
        delta = new - theta
        if prev_delta * delta < 0.0:
            new = 0.5 * (new + theta)
            delta = new - theta
        theta = new
        if abs(delta) < tol:
            return theta, it, True
        prev_delta = delta
    return theta, max_iter, False


def _mle_full_stats(family: Family, n: int, n0: int, s: int,
                    tol: float = FIXED_POINT_TOL,
                    max_iter: int = FIXED_POINT_MAX_ITER):
    """Full-model MLE from sufficient statistics.

    Returns ``(p_hat, theta_hat, iterations, converged, boundary)`` without
    evaluating the likelihood; callers add whatever log likelihood convention
    they need.
    """
    if n0 == n:
        raise DegenerateSampleError("all counts are zero: (p, theta) not identifiable")
    m = n - n0
    if s == m:
        # every positive count equals one; the likelihood supremum is only
        # approached as theta tends to zero, with p running off to the
        # lower endpoint along pstar = n0/n
        return math.nan, 0.0, 0, True, True
    if family is Family.POISSON:
        c = s / m
        theta, iters, converged = _poisson_theta_fixed_point(c, tol, max_iter)
        e = math.exp(-theta)
        p_hat = (n0 / n - e) / (1.0 - e)
    else:
        theta = (s - m) / s
        p_hat = (n0 / n - (1.0 - theta)) / theta
        iters, converged = 0, True
    boundary = n0 == 0
    return p_hat, theta, iters, converged, boundary


def _loglik_at_fit(family: Family, p_hat: float, theta_hat: float,
                   sample: CountSample, boundary: bool) -> float:
    if not boundary:
        return _log_likelihood(family, p_hat, theta_hat, sample)
    if theta_hat == 0.0:
        # supremum value for samples whose positive counts are all one;
        # the factorial constants vanish since log(1!) = 0
        n, n0 = sample.n, sample.n0
        ll = (sample.n - n0) * math.log((n - n0) / n)
        if n0 > 0:
            ll += n0 * math.log(n0 / n)
        return ll
    return _log_likelihood(family, p_hat, theta_hat, sample, allow_boundary=True)


def mle_full(family: Family, sample: CountSample,
             tol: float = FIXED_POINT_TOL,
             max_iter: int = FIXED_POINT_MAX_ITER) -> MleResult:
    """MLE of (p, theta) over the extended weight range.

    A sample without zeros yields a boundary fit with negative ``p_hat`` at
    the lower endpoint (flagged, not an error).  An all-zero sample raises,
    since (p, theta) is then not identifiable.
    """
    p_hat, theta_hat, iters, converged, boundary = _mle_full_stats(
        family, sample.n, sample.n0, sample.s, tol, max_iter)
    ll = _loglik_at_fit(family, p_hat, theta_hat, sample, boundary)
    return MleResult(p_hat, theta_hat, ll, converged, iters, boundary)


def gradient_norm_at(family: Family, result: MleResult, sample: CountSample) -> float:
    """Euclidean norm of the log-likelihood gradient at a fit (diagnostic)."""
    if result.boundary:
        raise ValueError("gradient undefined at a boundary fit")
    return float(np.linalg.norm(
        _loglik_gradient(family, result.p_hat, result.theta_hat, sample)))


def _score_statistic(family: Family, n: int, n0: int, s: int) -> tuple[float, float]:
    """Score statistic and its sign from sufficient statistics."""
    ybar = s / n
    if family is Family.POISSON:
        e0 = math.exp(-ybar)
        num = (n0 / e0 - n) ** 2
        den = n * ((1.0 - e0) / e0 - ybar)
        stat = num / den
        direction = n0 / n - e0
    else:
        stat = n * (1.0 + ybar) / ybar ** 2 * (n0 / n * (1.0 + ybar) - 1.0) ** 2
        f0 = 1.0 / (1.0 + ybar)
        direction = n0 / n - f0
    return stat, math.copysign(1.0, direction) if direction != 0.0 else 0.0


def _build_report(method: TestMethod, stat: float, sign: float,
                  alpha: float, sidedness: Sidedness) -> TestReport:
    signed_root = sign * math.sqrt(max(stat, 0.0))
    if sidedness is Sidedness.ONE_SIDED:
        p_value = float(stats.norm.sf(signed_root))
        reject = signed_root > stats.norm.ppf(1.0 - alpha)
    else:
        p_value = float(stats.chi2.sf(stat, 1))
        reject = stat > stats.chi2.ppf(1.0 - alpha, 1)
    return TestReport(method=method, statistic=stat, signed_root=signed_root,
                      p_value=p_value, posterior_prob=None, alpha=alpha,
                      reject=bool(reject), sidedness=sidedness)


def score_test(family: Family, sample: CountSample, alpha: float = 0.05,
               sidedness: Sidedness = Sidedness.ONE_SIDED) -> TestReport:
    """Score test of p = 0.

    The statistic depends on the data only through (n, n0, ybar).  One-sided
    tests use the signed root against the upper normal quantile; two-sided
    tests refer the statistic to chi-square with one degree of freedom.
    """
    if sample.s == 0:
        raise DegenerateSampleError("no positive counts: score test undefined")
    stat, sign = _score_statistic(family, sample.n, sample.n0, sample.s)
    return _build_report(TestMethod.SCORE, stat, sign, alpha, sidedness)


def lr_test(family: Family, sample: CountSample, alpha: float = 0.05,
            sidedness: Sidedness = Sidedness.ONE_SIDED,
            tol: float = FIXED_POINT_TOL,
            max_iter: int = FIXED_POINT_MAX_ITER) -> TestReport:
    """Likelihood ratio test of p = 0, with the same rejection rules as
    ``score_test``.

    When the full-model weight estimate is undefined (boundary fits), the
    sign of the root falls back to the score direction ``n0/n - f0(theta0)``.
    """
    null = mle_null(family, sample)
    full = mle_full(family, sample, tol, max_iter)
    stat = 2.0 * (full.loglik - null.loglik)
    if stat < 0.0:
        stat = 0.0  # clamp numerical noise from the fixed point
    if full.boundary and math.isnan(full.p_hat):
        _, sign = _score_statistic(family, sample.n, sample.n0, sample.s)
    else:
        sign = math.copysign(1.0, full.p_hat) if full.p_hat != 0.0 else 0.0
    return _build_report(TestMethod.LR, stat, sign, alpha, sidedness)
