"""Shared fixtures and independent numerical oracles for the test suite.

The oracles here (finite differences, brute-force summation, adaptive
quadrature over the factorized posterior) deliberately avoid the code paths
they are used to check.
"""

import math

import numpy as np
import pytest
from scipy import integrate, optimize, stats

from zicount import CountSample


@pytest.fixture(scope="session")
def uti():
    return CountSample({0: 81, 1: 9, 2: 7, 3: 1})


@pytest.fixture(scope="session")
def terror():
    return CountSample({0: 38, 1: 26, 2: 8, 3: 2, 4: 1})


@pytest.fixture(scope="session")
def cholera():
    return CountSample({0: 168, 1: 32, 2: 16, 3: 6, 4: 1})


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        out[i] = (f(x + e) - f(x - e)) / (2.0 * e[i])
    return out


def fd_hessian(f, x, h=1e-4):
    """Richardson-extrapolated central second differences."""
    x = np.asarray(x, dtype=float)
    k = x.size

    def cross(i, j, step):
        ei = np.zeros(k); ei[i] = step * max(1.0, abs(x[i]))
        ej = np.zeros(k); ej[j] = step * max(1.0, abs(x[j]))
        return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej)
                + f(x - ei - ej)) / (4.0 * ei[i] * ej[j])

    out = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            d1, d2 = cross(i, j, h), cross(i, j, h / 2.0)
            out[i, j] = out[j, i] = (4.0 * d2 - d1) / 3.0
    return out


def fd_third(hess_fn, x, h=5e-4):
    """Third-derivative tensor from Richardson-extrapolated central
    differences of an exact Hessian."""
    x = np.asarray(x, dtype=float)
    k = x.size

    def slab(c, step):
        e = np.zeros(k)
        e[c] = step * max(1.0, abs(x[c]))
        return (hess_fn(x + e) - hess_fn(x - e)) / (2.0 * e[c])

    out = np.empty((k, k, k))
    for c in range(k):
        d1, d2 = slab(c, h), slab(c, h / 2.0)
        out[:, :, c] = (4.0 * d2 - d1) / 3.0
    return out


class PosteriorOracle:
    """Exact posterior quantities for the Poisson family via 1-D quadrature.

    Uses the factorization of the posterior under the conditional Jeffreys
    prior: the zero probability is Beta(n0 + 1/2, n - n0 + 1/2) independent
    of theta, whose posterior kernel is integrated adaptively here.
    """

    def __init__(self, sample: CountSample):
        self.n, self.n0, self.s = sample.n, sample.n0, sample.s
        self.m = self.n - self.n0
        ratio = (self.s - 0.5) / self.m
        mode = optimize.brentq(lambda t: t / -math.expm1(-t) - ratio,
                               1e-9, max(3.0 * ratio, 10.0))
        self._scale = self._logk(mode)
        lo, hi = mode / 2.0, max(2.0 * mode, 1.0)
        while lo > 1e-12 and self._logk(lo) - self._scale > math.log(1e-18):
            lo /= 2.0
        while self._logk(hi) - self._scale > math.log(1e-18):
            hi *= 1.5
        self.lo, self.hi = lo, hi
        self.norm = self._quad(lambda t: 1.0)

    def _logk(self, t):
        return (-self.m * t - self.m * math.log(-math.expm1(-t))
                + (self.s - 0.5) * math.log(t))

    def _quad(self, g):
        f = lambda t: math.exp(self._logk(t) - self._scale) * g(t)
        return integrate.quad(f, self.lo, self.hi, limit=400)[0]

    def theta_mean(self):
        return self._quad(lambda t: t) / self.norm

    def prob_positive(self):
        g = lambda t: stats.beta.sf(math.exp(-t), self.n0 + 0.5, self.m + 0.5)
        return self._quad(g) / self.norm

    def p_cdf(self, x):
        g = lambda t: stats.beta.cdf(math.exp(-t) + x * (1.0 - math.exp(-t)),
                                     self.n0 + 0.5, self.m + 0.5)
        return self._quad(g) / self.norm

    def p_quantile(self, q):
        return optimize.brentq(lambda x: self.p_cdf(x) - q, -50.0, 1.0 - 1e-12,
                               xtol=1e-8)

    def p_density(self, x):
        def g(t):
            f0 = math.exp(-t)
            return (1.0 - f0) * stats.beta.pdf(f0 + x * (1.0 - f0),
                                               self.n0 + 0.5, self.m + 0.5)
        return self._quad(g) / self.norm
