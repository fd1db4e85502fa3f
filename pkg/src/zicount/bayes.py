"""Objective-prior Bayesian inference for the zero-inflation weight.

The working prior is the conditional Jeffreys prior for the weight p at fixed
theta (proper over the extended weight range, where it is a Beta(1/2, 1/2)
law on the zero-probability scale) times the Jeffreys prior for theta from
the non-inflated family.  Under the orthogonal coordinates
``pstar = p + (1 - p) * f0(theta)`` the posterior factorizes:

* ``pstar | y ~ Beta(n0 + 1/2, n - n0 + 1/2)`` for both families;
* Poisson: ``theta | y`` has density proportional to
  ``(exp(-theta) / (1 - exp(-theta)))**(n - n0) * theta**(s - 1/2)``;
* geometric: ``theta | y ~ Beta(s - (n - n0) + 1/2, n - n0)``.

The test statistic is the posterior probability of positive weight,
``T(Y) = P(p > 0 | Y)``, estimated either by a self-normalized importance
sampler (Poisson) or exact posterior draws (geometric), and independently by
two-dimensional adaptive quadrature over the original (p, theta) coordinates,
which serves as the deterministic oracle for the Monte Carlo estimate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, interpolate, optimize, special, stats

from .distributions import CountSample, Family, _log_likelihood
from .errors import (DegenerateSampleError, ParameterRangeError,
                     QuadratureError, SamplerError)

DEFAULT_DRAWS = 10_000
_THETA_GRID_SIZE = 4096
_TAIL_LOG_CUTOFF = math.log(1e-16)


class PriorKind(Enum):
    JEFFREYS_JOINT = "jeffreys_joint"
    CONDITIONAL_JEFFREYS = "conditional_jeffreys_times_marginal"


@dataclass(frozen=True)
class PriorSpec:
    """Which objective prior to use for (p, theta)."""

    kind: PriorKind
    family: Family


def default_prior(family: Family) -> PriorSpec:
    return PriorSpec(PriorKind.CONDITIONAL_JEFFREYS, family)


class IntervalKind(Enum):
    EQUAL_TAIL = "equal_tail"
    HPD = "hpd"


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float
    level: float
    kind: IntervalKind
    density_threshold: float | None = None
    note: str | None = None


@dataclass(frozen=True)
class PosteriorDraws:
    """Joint posterior draws in both coordinate systems.

    ``weights`` are importance weights, all equal to one for the direct
    posterior draws produced by ``draw_posterior``.
    """

    family: Family
    pstar: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    seed: int
    B: int


@dataclass(frozen=True)
class PosteriorProbability:
    """Monte Carlo estimate of P(p > 0 | Y) with its standard error."""

    value: float
    mc_se: float
    ess: float
    draws: int
    seed: int

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class BayesFactorResult:
    """Posterior-odds to prior-odds ratio for the event {p > 0}.

    This is a reproducible stand-in, not a reference Bayes factor: the theta
    prior is improper, so prior odds are computed on a stated theta window
    and the value is flagged non-authoritative wherever it is reported.
    """

    value: float
    posterior_prob: float
    prior_prob: float
    theta_window: tuple[float, float]
    lower_bound: bool
    non_authoritative: bool = True


# ---------------------------------------------------------------------------
# prior densities


def log_prior(spec: PriorSpec, p: float, theta: float) -> float:
    """Log of the (unnormalized) prior density at (p, theta)."""
    fam = spec.family
    fam.require_theta(theta)
    f0 = fam.f0(theta)
    lo = -f0 / (1.0 - f0)
    if not (lo < p < 1.0):
        raise ParameterRangeError(f"p={p!r} outside extended range ({lo!r}, 1)")
    a = f0 + p * (1.0 - f0)
    if spec.kind is PriorKind.CONDITIONAL_JEFFREYS:
        # conditional factor integrates to one in p at every theta
        if fam is Family.POISSON:
            om = -math.expm1(-theta)
            val = (-math.log(math.pi)
                   + 0.5 * (math.log(om) - math.log1p(-p) - math.log(a))
                   - 0.5 * math.log(theta))
        else:
            val = (-math.log(math.pi)
                   - 0.5 * (math.log1p(-p) + math.log(a))
                   - math.log1p(-theta))
    else:
        if fam is Family.POISSON:
            e = f0
            val = (0.5 * math.log(1.0 - e - theta * e)
                   - 0.5 * (math.log(theta) + math.log(a)))
        else:
            val = (0.5 * math.log(theta) - math.log1p(-theta)
                   - 0.5 * math.log(a))
    return val


def prior_density(spec: PriorSpec, p: float, theta: float) -> float:
    """Unnormalized prior density; proper in p for the conditional kind."""
    return math.exp(log_prior(spec, p, theta))


def grad_log_prior(spec: PriorSpec, p: float, theta: float) -> np.ndarray:
    """Gradient of log prior in (p, theta), in closed form."""
    fam = spec.family
    fam.require_theta(theta)
    f0 = fam.f0(theta)
    a = f0 + p * (1.0 - f0)
    if fam is Family.POISSON:
        a_p, a_t = 1.0 - f0, -(1.0 - p) * f0
    else:
        a_p, a_t = theta, -(1.0 - p)
    if spec.kind is PriorKind.CONDITIONAL_JEFFREYS:
        gp = 0.5 / (1.0 - p) - 0.5 * a_p / a
        if fam is Family.POISSON:
            om = -math.expm1(-theta)
            gt = 0.5 * f0 / om - 0.5 * a_t / a - 0.5 / theta
        else:
            gt = -0.5 * a_t / a + 1.0 / (1.0 - theta)
    else:
        gp = -0.5 * a_p / a
        if fam is Family.POISSON:
            c = 1.0 - f0 - theta * f0
            gt = 0.5 * theta * f0 / c - 0.5 / theta - 0.5 * a_t / a
        else:
            gt = 0.5 / theta + 1.0 / (1.0 - theta) - 0.5 * a_t / a
    return np.array([gp, gt])


def _log_prior_pstar(spec: PriorSpec, pstar, theta):
    """Log prior mapped to (pstar, theta) coordinates; numpy-broadcastable."""
    pstar = np.asarray(pstar, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if spec.kind is PriorKind.CONDITIONAL_JEFFREYS:
        base = (-math.log(math.pi)
                - 0.5 * (np.log(pstar) + np.log1p(-pstar)))
        if spec.family is Family.POISSON:
            return base - 0.5 * np.log(theta)
        return base - np.log1p(-theta) - 0.5 * np.log(theta)
    if spec.family is Family.POISSON:
        e = np.exp(-theta)
        om = -np.expm1(-theta)
        return (0.5 * np.log(1.0 - e - theta * e)
                - 0.5 * (np.log(theta) + np.log(pstar)) - np.log(om))
    return (-0.5 * np.log(theta) - np.log1p(-theta)
            - 0.5 * np.log(pstar))


# ---------------------------------------------------------------------------
# posterior sampling


def _zip_theta_log_kernel(theta, m: int, s: float):
    theta = np.asarray(theta, dtype=float)
    return (-m * theta - m * np.log(-np.expm1(-theta))
            + (s - 0.5) * np.log(theta))


def _zip_theta_bracket(m: int, s: float) -> tuple[float, float, float]:
    """Mode and a (lo, hi) range holding all but ~1e-16 of the mass."""
    ratio = (s - 0.5) / m
    if ratio > 1.0:
        phi = lambda t: t / -math.expm1(-t) - ratio
        hi0 = max(2.0 * ratio, 10.0)
        mode = optimize.brentq(phi, 1e-10, hi0, xtol=1e-12)
    else:
        mode = 1e-10  # mass piles up against zero; kernel ~ theta**(-1/2)
    ref = float(_zip_theta_log_kernel(max(mode, 1e-10), m, s))
    lo = mode / 2.0 if mode > 1e-9 else 1e-12
    while lo > 1e-280 and _zip_theta_log_kernel(lo, m, s) > ref + _TAIL_LOG_CUTOFF:
        lo /= 2.0
    hi = max(2.0 * mode, 1.0)
    while _zip_theta_log_kernel(hi, m, s) > ref + _TAIL_LOG_CUTOFF:
        hi *= 1.5
    return mode, lo, hi


def _zip_theta_inverse_cdf(m: int, s: float):
    """Tabulated inverse CDF of the Poisson-case theta posterior.

    A 4096-point grid spans the bracketed range; the CDF comes from
    trapezoidal accumulation and is inverted with a monotone spline.
    """
    _, lo, hi = _zip_theta_bracket(m, s)
    grid = np.linspace(lo, hi, _THETA_GRID_SIZE)
    logk = _zip_theta_log_kernel(grid, m, s)
    dens = np.exp(logk - logk.max())
    cdf = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
    cdf /= cdf[-1]
    keep = np.concatenate(([True], np.diff(cdf) > 0.0))
    return interpolate.PchipInterpolator(cdf[keep], grid[keep])


def zip_theta_rejection_draws(rng: np.random.Generator, m: int, s: float,
                              size: int, max_batches: int = 200) -> np.ndarray:
    """Gamma-envelope rejection sampler for the Poisson-case theta posterior.

    Cross-check for the grid inverse-CDF sampler.  The target kernel is the
    gamma kernel with shape ``s - m + 1/2`` and rate ``m`` times
    ``exp(m * r(theta))`` with ``r = log(theta / (1 - exp(-theta)))``, and r
    is increasing and concave, so bounding it by its tangent at the target
    mode gives an exact gamma envelope with the same shape and rate
    ``m * (1 - r'(mode))``.
    """
    shape = s - m + 0.5
    if shape <= 0.0 or m <= 0:
        raise SamplerError("rejection envelope undefined for this sample")

    def r_slope(t):
        # d/dt log(t / (1 - exp(-t))), in (0, 1/2), decreasing
        return 1.0 / t - math.exp(-t) / -math.expm1(-t)

    mode, _, _ = _zip_theta_bracket(m, s)
    mode = max(mode, 1e-6)
    slope = r_slope(mode)
    rate = m * (1.0 - slope)
    if rate <= 0.0:
        raise SamplerError("degenerate envelope rate")

    def log_ratio(t):
        # target/envelope kernel ratio; maximized (at zero) at the tangent point
        r = np.log(t) - np.log(-np.expm1(-t))
        r_mode = math.log(mode) - math.log(-math.expm1(-mode))
        return m * (r - r_mode - slope * (t - mode))

    out = np.empty(0)
    proposed = accepted = 0
    for _ in range(max_batches):
        batch = max(size, 1024)
        cand = rng.gamma(shape, 1.0 / rate, batch)
        ratio = np.exp(log_ratio(cand))
        if np.any(ratio > 1.0 + 1e-9):
            raise SamplerError("envelope failed to dominate the target")
        keep = rng.random(batch) < ratio
        proposed += batch
        accepted += int(keep.sum())
        out = np.concatenate([out, cand[keep]])
        if out.size >= size:
            return out[:size]
        if proposed >= 10 * size and accepted / proposed < 1e-4:
            break
    raise SamplerError(
        f"rejection sampler acceptance too low ({accepted}/{proposed})")


def draw_posterior(family: Family, sample: CountSample, B: int = DEFAULT_DRAWS,
                   seed: int = 0) -> PosteriorDraws:
    """Exact joint posterior draws under the conditional Jeffreys prior.

    ``pstar`` is Beta-distributed for both families; ``theta`` is drawn by
    grid inverse-CDF (Poisson) or from its Beta posterior (geometric).  The
    weight draws are recovered as ``p = (pstar - f0) / (1 - f0)``.
    """
    if B <= 0:
        raise ValueError("B must be positive")
    n, n0, s = sample.n, sample.n0, sample.s
    m = n - n0
    if n0 == 0 or n0 == n:
        raise DegenerateSampleError(
            "posterior sampling needs both zero and positive counts")
    if s == m:
        warnings.warn("all positive counts equal one; theta posterior is "
                      "unbounded at zero and draws may be inaccurate",
                      stacklevel=2)
    rng = np.random.default_rng(seed)
    pstar = rng.beta(n0 + 0.5, m + 0.5, B)
    if family is Family.POISSON:
        inv_cdf = _zip_theta_inverse_cdf(m, s)
        theta = np.asarray(inv_cdf(rng.random(B)))
        f0 = np.exp(-theta)
    else:
        theta = rng.beta(s - m + 0.5, m, B)
        f0 = 1.0 - theta
    p = (pstar - f0) / (1.0 - f0)
    return PosteriorDraws(family=family, pstar=pstar, theta=theta, p=p,
                          weights=np.ones(B), seed=seed, B=B)


# ---------------------------------------------------------------------------
# the Bayes test statistic T(Y) = P(p > 0 | Y)


def _posterior_prob_poisson(n: int, n0: int, s: int, prior: PriorSpec,
                            B: int, rng: np.random.Generator):
    """Self-normalized importance sampling estimate for the Poisson family.

    Proposal: ``pstar ~ Beta(n0 + 1, n - n0 + 1)`` and theta from the gamma
    with shape ``s - (n - n0) + 1`` and rate ``n - n0`` (the shape/rate
    reading that makes the proposal density match the likelihood factor it
    is meant to absorb).  Weights carry the prior times
    ``(theta / (1 - exp(-theta)))**(n - n0)``; the numerator adds the
    indicator of ``pstar > exp(-theta)``.
    """
    m = n - n0
    pstar = rng.beta(n0 + 1.0, m + 1.0, B)
    theta = rng.gamma(s - m + 1.0, 1.0 / m, B)
    logw = (_log_prior_pstar(prior, pstar, theta)
            + m * (np.log(theta) - np.log(-np.expm1(-theta))))
    w = np.exp(logw - logw.max())
    wsum = w.sum()
    wn = w / wsum
    ind = pstar > np.exp(-theta)
    value = float(wn[ind].sum())
    mc_se = float(np.sqrt(np.sum(wn ** 2 * (ind - value) ** 2)))
    ess = float(wsum ** 2 / np.sum(w ** 2))
    return value, mc_se, ess


def _posterior_prob_geometric(n: int, n0: int, s: int, prior: PriorSpec,
                              B: int, rng: np.random.Generator):
    """Exact posterior draws for the geometric family (both coordinates Beta)."""
    m = n - n0
    beta2 = m + 0.5 if prior.kind is PriorKind.CONDITIONAL_JEFFREYS else m + 1.0
    pstar = rng.beta(n0 + 0.5, beta2, B)
    theta = rng.beta(s - m + 0.5, m, B)
    ind = pstar > 1.0 - theta
    value = float(np.mean(ind))
    mc_se = math.sqrt(max(value * (1.0 - value), 1.0 / B) / B)
    return value, mc_se, float(B)


def posterior_prob_positive(family: Family, sample: CountSample,
                            prior: PriorSpec | None = None,
                            B: int = DEFAULT_DRAWS,
                            seed: int = 0) -> PosteriorProbability:
    """Monte Carlo estimate of the test statistic T(Y) = P(p > 0 | Y)."""
    prior = prior or default_prior(family)
    if prior.family is not family:
        raise ValueError("prior family does not match the model family")
    n, n0, s = sample.n, sample.n0, sample.s
    if s == 0 or n0 == n:
        raise DegenerateSampleError("all counts zero: T(Y) undefined")
    if B <= 0:
        raise ValueError("B must be positive")
    rng = np.random.default_rng(seed)
    if family is Family.POISSON:
        value, mc_se, ess = _posterior_prob_poisson(n, n0, s, prior, B, rng)
        if ess / B < 0.01:
            warnings.warn(f"importance sampling ESS low: {ess:.1f} of {B}",
                          stacklevel=2)
    else:
        value, mc_se, ess = _posterior_prob_geometric(n, n0, s, prior, B, rng)
    return PosteriorProbability(value=value, mc_se=mc_se, ess=ess,
                                draws=B, seed=seed)


# ---------------------------------------------------------------------------
# quadrature oracle and posterior normalization


def _log_posterior_kernel(family: Family, sample: CountSample,
                          prior: PriorSpec, p: float, theta: float) -> float:
    # boundary-tolerant likelihood: quadrature windows may touch the open
    # endpoints more closely than the model constructor allows
    return (_log_likelihood(family, p, theta, sample, allow_boundary=True)
            + log_prior(prior, p, theta))


def _theta_range(family: Family, sample: CountSample) -> tuple[float, float]:
    m = sample.n - sample.n0
    if family is Family.POISSON:
        _, lo, hi = _zip_theta_bracket(m, sample.s)
        return max(lo, 1e-8), hi
    lo = stats.beta.ppf(1e-14, sample.s - m + 0.5, max(m, 1))
    hi = stats.beta.isf(1e-14, sample.s - m + 0.5, max(m, 1))
    return max(lo, 1e-9), min(hi, 1.0 - 1e-9)


def _log_wedge_integral(family: Family, sample: CountSample, prior: PriorSpec,
                        positive_only: bool) -> tuple[float, float]:
    """Log of the posterior-kernel integral over the parameter wedge.

    Integrates ``exp(log likelihood + log prior)`` over theta and, inside,
    over p from the extended lower endpoint (or zero) to one, by nested
    adaptive quadrature.  Returns the log value and a relative error bound.
    """
    t_lo, t_hi = _theta_range(family, sample)

    def p_window(theta: float) -> tuple[float, float]:
        f0 = family.f0(theta)
        lo = -f0 / (1.0 - f0)
        eps = 1e-13 * max(1.0, abs(lo))
        start = 0.0 + 1e-300 if positive_only else lo + eps
        return max(start, lo + eps), 1.0 - 1e-13

    # scale constant from a coarse mesh so the integrand stays O(1)
    t_mesh = np.linspace(t_lo, t_hi, 48)
    big = -math.inf
    for t in t_mesh:
        a, b = p_window(float(t))
        for q in np.linspace(a + 1e-9, b - 1e-9, 32):
            val = _log_posterior_kernel(family, sample, prior, float(q), float(t))
            if val > big:
                big = val
    if not math.isfinite(big):
        raise QuadratureError("posterior kernel vanished on the search mesh")

    def inner(theta: float) -> float:
        a, b = p_window(theta)
        if a >= b:
            return 0.0
        f = lambda q: math.exp(
            _log_posterior_kernel(family, sample, prior, q, theta) - big)
        val, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-10, limit=200)
        return val

    # widen the theta range until the profile is negligible at both ends
    peak = inner(0.5 * (t_lo + t_hi))
    for _ in range(60):
        if inner(t_lo) < 1e-14 * peak or t_lo < 1e-8:
            break
        t_lo = max(t_lo / 2.0, 1e-12)
    for _ in range(60):
        if inner(t_hi) < 1e-14 * peak:
            break
        t_hi = t_hi * 1.5 if family is Family.POISSON else 0.5 * (t_hi + 1.0)
        if family is Family.GEOMETRIC and t_hi > 1.0 - 1e-12:
            t_hi = 1.0 - 1e-12
            break

    value, err = integrate.quad(inner, t_lo, t_hi,
                                epsabs=1e-13, epsrel=1e-10, limit=200)
    if value <= 0.0:
        raise QuadratureError("posterior integral evaluated to zero")
    return math.log(value) + big, err / value


_GL_CACHE: dict = {}


def _gauss_legendre(order: int = 256):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def posterior_prob_positive_factorized(family: Family,
                                       sample: CountSample) -> float:
    """Deterministic T(Y) from the factorized posterior, by 1-D quadrature.

    Under the conditional Jeffreys prior, ``T = E[SF(f0(theta))]`` where the
    survival function is that of the Beta posterior of the zero probability
    and the expectation runs over the theta posterior.  Much faster than the
    two-dimensional oracle and far more accurate than the importance sampler
    for large samples, where the sampler's proposal drifts away from the
    posterior.
    """
    n, n0, s = sample.n, sample.n0, sample.s
    m = n - n0
    if s == 0 or n0 == n:
        raise DegenerateSampleError("all counts zero: T(Y) undefined")
    nodes, gl_weights = _gauss_legendre()
    if family is Family.POISSON:
        _, lo, hi = _zip_theta_bracket(m, s)
        t = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        logk = _zip_theta_log_kernel(t, m, s)
        f0 = np.exp(-t)
    else:
        lo = float(stats.beta.ppf(1e-15, s - m + 0.5, m))
        hi = float(stats.beta.isf(1e-15, s - m + 0.5, m))
        t = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        logk = (s - m - 0.5) * np.log(t) + (m - 1.0) * np.log1p(-t)
        f0 = 1.0 - t
    w = gl_weights * np.exp(logk - logk.max())
    # Beta(n0 + 1/2, m + 1/2) survival function via the regularized
    # incomplete beta, cheaper than the frozen-distribution call
    tail = special.betainc(m + 0.5, n0 + 0.5, 1.0 - f0)
    return float(np.sum(w * tail) / np.sum(w))


def posterior_prob_positive_quadrature(family: Family, sample: CountSample,
                                       prior: PriorSpec | None = None) -> float:
    """Deterministic T(Y) by the ratio of two-dimensional quadratures.

    Absolute accuracy target 1e-6; raises when far off and warns with the
    achieved accuracy when moderately off.
    """
    prior = prior or default_prior(family)
    if sample.s == 0 or sample.n0 == sample.n:
        raise DegenerateSampleError("all counts zero: T(Y) undefined")
    log_num, err_num = _log_wedge_integral(family, sample, prior, positive_only=True)
    log_den, err_den = _log_wedge_integral(family, sample, prior, positive_only=False)
    value = math.exp(log_num - log_den)
    accuracy = value * (err_num + err_den)
    if accuracy > 1e-4:
        raise QuadratureError(f"quadrature accuracy {accuracy:.2e} exceeds 1e-4")
    if accuracy > 1e-6:
        warnings.warn(f"quadrature accuracy {accuracy:.2e} above the 1e-6 target",
                      stacklevel=2)
    return min(value, 1.0)


# ---------------------------------------------------------------------------
# marginal density of the weight, credible and HPD intervals


def _marginal_density_evaluator(draws: PosteriorDraws, sample: CountSample):
    """Vectorized p -> estimated marginal posterior density of the weight.

    Averages the conditional density of p given each drawn theta (a Beta law
    on the zero-probability scale, transformed back to p), which smooths much
    better than a histogram of the p draws and integrates to one by
    construction.
    """
    n0, m = sample.n0, sample.n - sample.n0
    a_beta, b_beta = n0 + 0.5, m + 0.5
    theta = draws.theta
    if draws.family is Family.POISSON:
        f0 = np.exp(-theta)
    else:
        f0 = 1.0 - theta
    scale = 1.0 - f0  # Jacobian of p -> pstar at fixed theta
    log_norm = float(special.betaln(a_beta, b_beta))

    def evaluate(p_values) -> np.ndarray:
        p_values = np.atleast_1d(np.asarray(p_values, dtype=float))
        out = np.empty(p_values.shape)
        for idx, pj in enumerate(p_values):
            if pj >= 1.0:
                out[idx] = 0.0
                continue
            pstar = f0 + pj * scale
            valid = pstar > 0.0
            if not np.any(valid):
                out[idx] = 0.0
                continue
            logpdf = ((a_beta - 1.0) * np.log(pstar[valid])
                      + (b_beta - 1.0) * (math.log1p(-pj) + np.log(scale[valid]))
                      + np.log(scale[valid]) - log_norm)
            out[idx] = np.exp(logpdf).sum() / draws.B
        return out

    return evaluate


def marginal_posterior_density(draws: PosteriorDraws, sample: CountSample,
                               at_p) -> np.ndarray:
    """Estimated marginal posterior density of the weight at given points.

    Nonnegative everywhere and integrates to one over the extended range up
    to Monte Carlo error; points below the weight range at every drawn theta
    get density zero.
    """
    evaluate = _marginal_density_evaluator(draws, sample)
    return evaluate(at_p)


def credible_interval(draws: PosteriorDraws, level: float) -> IntervalEstimate:
    """Equal-tail posterior interval from the weight draws."""
    if not (0.0 < level < 1.0):
        raise ValueError("level must be strictly between 0 and 1")
    half = 0.5 * (1.0 - level)
    lo, hi = np.quantile(draws.p, [half, 1.0 - half])
    return IntervalEstimate(float(lo), float(hi), level, IntervalKind.EQUAL_TAIL)


def hpd_interval(draws: PosteriorDraws, sample: CountSample,
                 level: float) -> IntervalEstimate:
    """Highest posterior density interval for the weight.

    The density threshold is the ``100 * (1 - level)`` percentile of the
    estimated density at the draws; the interval endpoints solve
    ``density = threshold`` on each monotone flank of the (unimodal)
    estimate.  If the estimate crosses the threshold more than twice, the
    hull of the super-level set is returned with a warning.
    """
    if not (0.0 < level < 1.0):
        raise ValueError("level must be strictly between 0 and 1")
    evaluate = _marginal_density_evaluator(draws, sample)
    lo, hi = float(draws.p.min()), float(draws.p.max())
    grid = np.linspace(lo, hi, 1025)
    dens = evaluate(grid)
    dens_at_draws = np.interp(draws.p, grid, dens)
    threshold = float(np.percentile(dens_at_draws, 100.0 * (1.0 - level)))

    above = dens >= threshold
    flips = int(np.sum(above[1:] != above[:-1]))
    mode_idx = int(np.argmax(dens))
    note = None
    if flips > 2:
        warnings.warn("estimated posterior not unimodal at the HPD threshold; "
                      "returning the hull of the super-level set", stacklevel=2)
        idx = np.where(above)[0]
        lower, upper = float(grid[idx[0]]), float(grid[idx[-1]])
        note = "multimodal density estimate; hull of super-level set"
    else:
        f = lambda q: float(evaluate(q)[0]) - threshold
        below_left = np.where(~above[:mode_idx + 1])[0]
        if below_left.size:
            i = below_left[-1]
            lower = float(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-10))
        else:
            lower = lo
        below_right = np.where(~above[mode_idx:])[0]
        if below_right.size:
            j = mode_idx + below_right[0]
            upper = float(optimize.brentq(f, grid[j - 1], grid[j], xtol=1e-10))
        else:
            upper = hi
    return IntervalEstimate(lower, upper, level, IntervalKind.HPD,
                            density_threshold=threshold, note=note)


def density_curve(draws: PosteriorDraws, sample: CountSample,
                  num: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Marginal posterior density of the weight on an adaptive grid.

    The grid starts at the hull of the draws and widens until the endpoint
    densities fall below a thousandth of the peak (or the support edge),
    so the curve spans the visible mass of the extended weight range.
    """
    if num < 16:
        raise ValueError("num must be at least 16")
    evaluate = _marginal_density_evaluator(draws, sample)
    if draws.family is Family.POISSON:
        f0 = np.exp(-draws.theta)
    else:
        f0 = 1.0 - draws.theta
    support_lo = float(np.min(-f0 / (1.0 - f0)))
    lo, hi = float(draws.p.min()), float(draws.p.max())
    span = hi - lo
    peak = float(evaluate(np.linspace(lo, hi, 64)).max())
    for _ in range(40):
        moved = False
        if lo > support_lo + 1e-12 and evaluate(lo)[0] >= 1e-3 * peak:
            lo = max(lo - 0.1 * span, support_lo + 1e-12)
            moved = True
        if hi < 1.0 - 1e-9 and evaluate(hi)[0] >= 1e-3 * peak:
            hi = min(hi + 0.1 * span, 1.0 - 1e-9)
            moved = True
        if not moved:
            break
    grid = np.linspace(lo, hi, num)
    return grid, evaluate(grid)


# ---------------------------------------------------------------------------
# posterior-odds Bayes factor


def _prior_prob_positive(prior: PriorSpec,
                         theta_window: tuple[float, float]) -> tuple[float, tuple[float, float]]:
    """Prior probability of positive weight, theta averaged over a window."""
    fam = prior.family
    lo, hi = theta_window
    if fam is Family.GEOMETRIC:
        hi = min(hi, 1.0 - 1e-6)
    lo = max(lo, 1e-12)
    if not hi > lo:
        raise ValueError("empty theta window")

    if prior.kind is PriorKind.CONDITIONAL_JEFFREYS:
        # conditional mass above zero is a Beta(1/2, 1/2) tail on the
        # zero-probability scale
        positive = lambda f0: 1.0 - special.betainc(0.5, 0.5, f0)
    else:
        positive = lambda f0: 1.0 - math.sqrt(f0)

    if fam is Family.POISSON:
        weight = lambda t: 1.0 / math.sqrt(t)
    else:
        weight = lambda t: 1.0 / ((1.0 - t) * math.sqrt(t))

    num, _ = integrate.quad(lambda t: weight(t) * positive(fam.f0(t)), lo, hi,
                            limit=200)
    den, _ = integrate.quad(weight, lo, hi, limit=200)
    return num / den, (lo, hi)


def bayes_factor_positive(family: Family, sample: CountSample,
                          prior: PriorSpec | None = None,
                          B: int = DEFAULT_DRAWS, seed: int = 0,
                          theta_window: tuple[float, float] = (0.0, 50.0)
                          ) -> BayesFactorResult:
    """Posterior odds of {p > 0} divided by its prior odds.

    When the posterior probability is within Monte Carlo error of one, the
    returned value is a lower bound (flagged on the result).
    """
    prior = prior or default_prior(family)
    est = posterior_prob_positive(family, sample, prior, B, seed)
    q, window = _prior_prob_positive(prior, theta_window)
    floor = max(est.mc_se, 1.0 / B)
    lower_bound = est.value > 1.0 - floor
    t_eff = min(est.value, 1.0 - floor)
    value = (t_eff / (1.0 - t_eff)) / (q / (1.0 - q))
    return BayesFactorResult(value=value, posterior_prob=est.value,
                             prior_prob=q, theta_window=window,
                             lower_bound=lower_bound)
