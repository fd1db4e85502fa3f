"""Zero-inflated power series count distributions.

A power series family puts mass proportional to ``a_y * theta**y`` on the
nonnegative integers; Poisson and geometric are the two members shipped here.
The zero-inflated variant adds an extra weight ``p`` at zero,

    P(Y = 0) = p + (1 - p) * f(0 | theta)
    P(Y = y) = (1 - p) * f(y | theta),   y >= 1,

and remains a proper distribution for negative ``p`` down to the open lower
endpoint ``-f0 / (1 - f0)``.  Negative weights describe a deficit of zeros
(zero deflation), so ``p = 0`` sits in the interior of the parameter range
and standard interior-point inference applies.

Everything in this module is a pure function of its inputs.  ``sample`` takes
an explicit seed and never touches global random state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special, stats

from .errors import ParameterRangeError

# Open endpoints are rejected within this relative margin to keep logs finite.
BOUNDARY_MARGIN = 1e-12


class Family(Enum):
    """Power series base family."""

    POISSON = "poisson"
    GEOMETRIC = "geometric"

    def require_theta(self, theta: float) -> None:
        """Raise unless ``theta`` is strictly inside the family's range."""
        if self is Family.POISSON:
            if not theta > BOUNDARY_MARGIN:
                raise ParameterRangeError(
                    f"poisson rate must be positive, got theta={theta!r}")
        else:
            if not (BOUNDARY_MARGIN < theta < 1.0 - BOUNDARY_MARGIN):
                raise ParameterRangeError(
                    f"geometric parameter must lie in (0, 1), got theta={theta!r}")

    def f0(self, theta: float) -> float:
        """Base-family probability of zero."""
        if self is Family.POISSON:
            return math.exp(-theta)
        return 1.0 - theta

    def log_f0(self, theta: float) -> float:
        if self is Family.POISSON:
            return -theta
        return math.log1p(-theta)

    def base_mean(self, theta: float) -> float:
        """Mean of the non-inflated family."""
        if self is Family.POISSON:
            return theta
        return theta / (1.0 - theta)

    def theta_from_mean(self, mean: float) -> float:
        """Invert ``base_mean``; used for moment-matching starting values."""
        if self is Family.POISSON:
            return mean
        return mean / (1.0 + mean)

    def base_log_pmf(self, y, theta: float):
        """Log pmf of the non-inflated family, vectorized over ``y``."""
        y = np.asarray(y)
        if self is Family.POISSON:
            return -theta + y * math.log(theta) - special.gammaln(y + 1.0)
        return math.log1p(-theta) + y * math.log(theta)

    def support_bound(self, theta: float, eps: float) -> int:
        """Smallest y with base-family tail mass beyond y below ``eps``."""
        if self is Family.POISSON:
            # scipy's inverse survival function loses precision below 1e-16;
            # extend geometrically from there using the tail ratio bound
            clamped = max(eps, 1e-16)
            bound = int(stats.poisson.isf(clamped, theta)) + 2
            if eps < clamped:
                ratio = min(theta / (bound + 1.0), 0.99)
                bound += int(math.ceil(math.log(eps / clamped)
                                       / math.log(ratio))) + 1
        else:
            # P(Y > y) = theta**(y + 1)
            bound = int(math.ceil(math.log(eps) / math.log(theta))) + 2
        return max(bound, 10)


class Parametrization(Enum):
    """Coordinate system of a Fisher information matrix."""

    P_THETA = "p_theta"
    PSTAR_THETA = "pstar_theta"


def p_lower(family: Family, theta: float) -> float:
    """Open lower endpoint of the zero-inflation weight range.

    Equals ``-f0 / (1 - f0)`` where ``f0`` is the base probability of zero;
    always negative and approaching 0 from below as ``f0`` shrinks.
    """
    family.require_theta(theta)
    f0 = family.f0(theta)
    return -f0 / (1.0 - f0)


@dataclass(frozen=True)
class ZipsModel:
    """A zero-inflated power series model on the extended weight range.

    Parameters
    ----------
    family : Family
        Base power series family.
    p : float
        Mixing weight for the extra mass at zero; may be negative down to
        (but excluding) ``p_lower(family, theta)``.
    theta : float
        Base family parameter (Poisson rate, or geometric parameter in (0,1)).
    """

    family: Family
    p: float
    theta: float

    def __post_init__(self):
        self.family.require_theta(self.theta)
        lo = p_lower(self.family, self.theta)
        # margin scaled by the range width below zero so that p = 0 stays
        # valid even when the lower endpoint is within rounding of zero
        margin = BOUNDARY_MARGIN * abs(lo)
        if not (lo + margin < self.p < 1.0 - BOUNDARY_MARGIN):
            raise ParameterRangeError(
                f"zero-inflation weight p={self.p!r} outside open range "
                f"({lo!r}, 1) for theta={self.theta!r}")

    @property
    def pzero(self) -> float:
        """Total probability of zero, ``p + (1 - p) * f0``."""
        f0 = self.family.f0(self.theta)
        return f0 + self.p * (1.0 - f0)

    def mean(self) -> float:
        """Model mean, ``(1 - p)`` times the base-family mean."""
        return (1.0 - self.p) * self.family.base_mean(self.theta)

    def support_bound(self, eps: float) -> int:
        """Smallest y with model tail mass beyond y below ``eps``."""
        scale = max(1.0 - self.p, 1e-300)
        return self.family.support_bound(self.theta, eps / scale)


@dataclass(frozen=True)
class CountSample:
    """A frequency table of nonnegative counts with cached sufficient stats.

    Attributes
    ----------
    freq : dict
        Map from count value to positive frequency.
    n : int
        Total sample size.
    n0 : int
        Number of zeros.
    s : int
        Sum of all counts.
    ybar : float
        Sample mean ``s / n``.
    """

    freq: dict

    def __post_init__(self):
        clean = {}
        for value, count in self.freq.items():
            v, c = int(value), int(count)
            if v != value or c != count:
                raise ValueError(f"non-integer entry {value!r}: {count!r}")
            if v < 0:
                raise ValueError(f"negative count value {v}")
            if c <= 0:
                raise ValueError(f"frequency for value {v} must be positive, got {c}")
            clean[v] = clean.get(v, 0) + c
        if not clean:
            raise ValueError("empty sample")
        object.__setattr__(self, "freq", clean)
        object.__setattr__(self, "n", sum(clean.values()))
        object.__setattr__(self, "n0", clean.get(0, 0))
        object.__setattr__(self, "s", sum(v * c for v, c in clean.items()))
        object.__setattr__(self, "ybar", self.s / self.n)

    @classmethod
    def from_values(cls, values) -> "CountSample":
        values = np.asarray(values)
        if values.size == 0:
            raise ValueError("empty sample")
        counts = np.bincount(values.astype(np.int64))
        return cls({int(v): int(c) for v, c in enumerate(counts) if c > 0})

    def items(self):
        """Frequency table entries in increasing count order."""
        return sorted(self.freq.items())

    def __eq__(self, other):
        return isinstance(other, CountSample) and self.items() == other.items()

    def __hash__(self):
        return hash(tuple(self.items()))


@dataclass(frozen=True)
class FisherInfo:
    """Per-observation Fisher information matrix entries."""

    i11: float
    i12: float
    i22: float
    parametrization: Parametrization

    def matrix(self) -> np.ndarray:
        return np.array([[self.i11, self.i12], [self.i12, self.i22]])

    def det(self) -> float:
        return self.i11 * self.i22 - self.i12 * self.i12


def log_pmf(model: ZipsModel, y):
    """Log probability mass at ``y`` (scalar or integer array)."""
    arr = np.asarray(y)
    if np.any(arr < 0) or not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)) or np.any(arr < 0):
            raise ValueError("y must contain nonnegative integers")
        arr = arr.astype(np.int64)
    base = model.family.base_log_pmf(arr, model.theta)
    out = np.where(arr == 0,
                   math.log(model.pzero),
                   math.log1p(-model.p) + base)
    return out if isinstance(y, np.ndarray) else float(out)


def pmf(model: ZipsModel, y):
    """Probability mass at ``y``; handles negative weights in range."""
    return np.exp(log_pmf(model, y)) if isinstance(y, np.ndarray) else math.exp(log_pmf(model, y))


def _log_likelihood(family: Family, p: float, theta: float, sample: CountSample,
                    *, allow_boundary: bool = False,
                    include_constants: bool = True) -> float:
    """Log likelihood at raw parameter values.

    With ``allow_boundary`` the weight may sit at the exact lower endpoint,
    where the zero-probability term is dropped when the sample has no zeros
    and -inf is returned when it does.
    """
    family.require_theta(theta)
    f0 = family.f0(theta)
    lo = -f0 / (1.0 - f0)
    if allow_boundary:
        if not (lo - 1e-9 <= p < 1.0):
            raise ParameterRangeError(f"p={p!r} outside closed range [{lo!r}, 1)")
    else:
        margin = BOUNDARY_MARGIN * abs(lo)
        if not (lo + margin < p < 1.0 - BOUNDARY_MARGIN):
            raise ParameterRangeError(f"p={p!r} outside open range ({lo!r}, 1)")

    pzero = f0 + p * (1.0 - f0)
    m = sample.n - sample.n0
    ll = 0.0
    if sample.n0 > 0:
        if pzero <= 0.0:
            return -math.inf
        ll += sample.n0 * math.log(pzero)
    if m > 0:
        ll += m * math.log1p(-p)
        if family is Family.POISSON:
            ll += -m * theta + sample.s * math.log(theta)
            if include_constants:
                for value, count in sample.freq.items():
                    if value > 0:
                        ll -= count * special.gammaln(value + 1.0)
        else:
            ll += m * math.log1p(-theta) + sample.s * math.log(theta)
    return ll


def log_likelihood(model: ZipsModel, sample: CountSample) -> float:
    """Log likelihood of the sample under the model.

    Includes the data-dependent constants (for Poisson, the log factorial
    terms), so absolute values are comparable across families; likelihood
    ratios cancel them either way.
    """
    return _log_likelihood(model.family, model.p, model.theta, sample)


def _loglik_gradient(family: Family, p: float, theta: float,
                     sample: CountSample) -> np.ndarray:
    """Gradient of the total log likelihood in (p, theta)."""
    f0 = family.f0(theta)
    pzero = f0 + p * (1.0 - f0)
    m = sample.n - sample.n0
    if family is Family.POISSON:
        a_p, a_t = 1.0 - f0, -(1.0 - p) * f0
        dtheta_pos = -m + sample.s / theta
    else:
        a_p, a_t = theta, -(1.0 - p)
        dtheta_pos = -m / (1.0 - theta) + sample.s / theta
    gp = sample.n0 * a_p / pzero - m / (1.0 - p)
    gt = sample.n0 * a_t / pzero + dtheta_pos
    return np.array([gp, gt])


def loglik_derivatives(family: Family, p: float, theta: float,
                       sample: CountSample):
    """First, second and third derivatives of the total log likelihood.

    Returns ``(grad, hess, third)`` with shapes (2,), (2, 2) and (2, 2, 2),
    in (p, theta) order.  The third-order tensor is symmetric in its indices.
    """
    family.require_theta(theta)
    f0 = family.f0(theta)
    a = f0 + p * (1.0 - f0)
    if a <= 0.0 or p >= 1.0:
        raise ParameterRangeError("parameters outside the extended range")
    n0, m, s = sample.n0, sample.n - sample.n0, sample.s

    if family is Family.POISSON:
        e = f0
        ap, at = 1.0 - e, -(1.0 - p) * e
        apt, att = e, (1.0 - p) * e
        aptt, attt = -e, -(1.0 - p) * e
        t1 = -m + s / theta
        t2 = -s / theta ** 2
        t3 = 2.0 * s / theta ** 3
    else:
        ap, at = theta, -(1.0 - p)
        apt, att = 1.0, 0.0
        aptt, attt = 0.0, 0.0
        q = 1.0 - theta
        t1 = -m / q + s / theta
        t2 = -m / q ** 2 - s / theta ** 2
        t3 = -2.0 * m / q ** 3 + 2.0 * s / theta ** 3

    # derivatives of log(a); a_pp and all its p,p,* derivatives vanish
    lp, lt = ap / a, at / a
    lpp = -(ap / a) ** 2
    lpt = apt / a - ap * at / a ** 2
    ltt = att / a - (at / a) ** 2
    lppp = 2.0 * ap ** 3 / a ** 3
    lppt = -2.0 * apt * ap / a ** 2 + 2.0 * ap ** 2 * at / a ** 3
    lptt = aptt / a - (2.0 * apt * at + att * ap) / a ** 2 + 2.0 * ap * at ** 2 / a ** 3
    lttt = attt / a - 3.0 * att * at / a ** 2 + 2.0 * at ** 3 / a ** 3

    one_m_p = 1.0 - p
    grad = np.array([n0 * lp - m / one_m_p, n0 * lt + t1])
    hess = np.array([
        [n0 * lpp - m / one_m_p ** 2, n0 * lpt],
        [n0 * lpt, n0 * ltt + t2],
    ])
    third = np.empty((2, 2, 2))
    third[0, 0, 0] = n0 * lppp - 2.0 * m / one_m_p ** 3
    third[0, 0, 1] = third[0, 1, 0] = third[1, 0, 0] = n0 * lppt
    third[0, 1, 1] = third[1, 0, 1] = third[1, 1, 0] = n0 * lptt
    third[1, 1, 1] = n0 * lttt + t3
    return grad, hess, third


def fisher_info(model: ZipsModel) -> FisherInfo:
    """Per-observation Fisher information in the (p, theta) coordinates."""
    p, theta = model.p, model.theta
    f0 = model.family.f0(theta)
    a = f0 + p * (1.0 - f0)
    if model.family is Family.POISSON:
        i11 = (1.0 - f0) / ((1.0 - p) * a)
        i12 = -f0 / a
        i22 = (1.0 - p) / theta - p * (1.0 - p) * f0 / a
    else:
        i11 = theta / ((1.0 - p) * a)
        i12 = -1.0 / a
        q = 1.0 - theta
        i22 = (1.0 - p) * ((theta + q * q) / (q * q * theta) + (1.0 - p) / a)
    return FisherInfo(i11, i12, i22, Parametrization.P_THETA)


def to_pstar(model: ZipsModel) -> tuple[float, float]:
    """Map to the orthogonal coordinates ``(pstar, theta)``.

    ``pstar = p + (1 - p) * f0`` is the total probability of zero; the map is
    increasing in ``p`` and sends the extended weight range onto (0, 1).
    """
    return model.pzero, model.theta


def from_pstar(family: Family, pstar: float, theta: float) -> ZipsModel:
    """Inverse of ``to_pstar``; requires ``0 < pstar < 1``."""
    family.require_theta(theta)
    if not (BOUNDARY_MARGIN < pstar < 1.0 - BOUNDARY_MARGIN):
        raise ParameterRangeError(f"pstar={pstar!r} outside open (0, 1)")
    f0 = family.f0(theta)
    p = (pstar - f0) / (1.0 - f0)
    return ZipsModel(family, p, theta)


def fisher_info_orthogonal(family: Family, pstar: float, theta: float) -> FisherInfo:
    """Per-observation Fisher information in the (pstar, theta) coordinates.

    The matrix is exactly diagonal: pstar is a Bernoulli zero-probability,
    so its information is ``1 / (pstar * (1 - pstar))`` regardless of family.
    """
    family.require_theta(theta)
    if not (0.0 < pstar < 1.0):
        raise ParameterRangeError(f"pstar={pstar!r} outside open (0, 1)")
    i11 = 1.0 / (pstar * (1.0 - pstar))
    if family is Family.POISSON:
        e = math.exp(-theta)
        om = -math.expm1(-theta)
        i22 = (1.0 - e - theta * e) * (1.0 - pstar) / (theta * om * om)
    else:
        q = 1.0 - theta
        i22 = (1.0 - pstar) / (theta * q * q)
    return FisherInfo(i11, 0.0, i22, Parametrization.PSTAR_THETA)


def _pmf_table(model: ZipsModel, upper: int) -> np.ndarray:
    ys = np.arange(upper + 1)
    return np.exp(log_pmf(model, ys))


def sample(model: ZipsModel, n: int, rng_seed) -> CountSample:
    """Draw ``n`` independent counts from the model.

    For ``p >= 0`` the two-stage mixture is used (with probability p emit a
    zero, otherwise draw from the base family).  For negative p the mixture
    decomposition is invalid, so draws come from the inverse CDF of the
    zero-inflated pmf directly.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    values = sample_values(model, n, rng)
    return CountSample.from_values(values)


def sample_values(model: ZipsModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """Raw count draws as an integer array (back end for ``sample``)."""
    p, theta = model.p, model.theta
    if p >= 0.0:
        out = _base_draws(model.family, theta, n, rng)
        if p > 0.0:
            out[rng.random(n) < p] = 0
        return out
    upper = model.support_bound(1e-15)
    cdf = np.cumsum(_pmf_table(model, upper))
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    return np.minimum(idx, upper).astype(np.int64)


def _base_draws(family: Family, theta: float, n: int, rng: np.random.Generator) -> np.ndarray:
    if family is Family.POISSON:
        return rng.poisson(theta, n)
    # numpy's geometric counts trials >= 1 with success probability 1 - theta
    return rng.geometric(1.0 - theta, n) - 1
