"""Closed-form monomial moments on the sphere, ball and simplex.

These Gamma/Beta identities back the normalization constants, the weighted
Gram matrices for product-power weights, and the independent oracles used to
verify cubature rules after domain transfer.
"""

import numpy as np
from scipy.special import gammaln

__all__ = [
    "sphere_surface_area",
    "sphere_moment",
    "sphere_moments",
    "ball_moment",
    "simplex_moment",
    "monomial_exponents",
    "monomial_exponents_upto",
]


def sphere_surface_area(d):
    """Surface measure of S^{d-1} in R^d."""
    return 2.0 * np.pi ** (d / 2.0) / np.exp(gammaln(d / 2.0))


def sphere_moments(beta, alpha):
    """Integrals over S^{d-1} of x^beta * prod_j |x_j|^{alpha_j} d(sigma).

    `beta` is an (m, d) integer array of monomial exponents, `alpha` a length-d
    exponent vector with every entry > -1.  Rows with any odd beta_j integrate
    to zero by symmetry.
    """
    beta = np.atleast_2d(np.asarray(beta))
    alpha = np.asarray(alpha, dtype=float)
    out = np.zeros(len(beta))
    even = np.all(beta % 2 == 0, axis=1)
    if np.any(even):
        t = (beta[even] + alpha + 1.0) / 2.0
        out[even] = 2.0 * np.exp(np.sum(gammaln(t), axis=1) - gammaln(np.sum(t, axis=1)))
    return out


def sphere_moment(beta, alpha=None):
    beta = np.asarray(beta)
    if alpha is None:
        alpha = np.zeros(len(beta))
    return float(sphere_moments(beta[None, :], alpha)[0])


def ball_moment(beta):
    """Integral of x^beta over the unit ball B^d (Lebesgue measure)."""
    beta = np.asarray(beta)
    if np.any(beta % 2 == 1):
        return 0.0
    d = len(beta)
    t = (beta + 1.0) / 2.0
    return float(np.exp(np.sum(gammaln(t)) - gammaln(np.sum(t) + 1.0)))


def simplex_moment(beta):
    """Integral of x^beta over the standard simplex T^d (Dirichlet formula)."""
    beta = np.asarray(beta, dtype=float)
    d = len(beta)
    return float(np.exp(np.sum(gammaln(beta + 1.0)) - gammaln(np.sum(beta) + d + 1.0)))


def monomial_exponents(d, degree):
    """All exponent tuples of total degree exactly `degree` in d variables."""
    out = []

    def rec(prefix, rem, k):
        if k == d - 1:
            out.append(prefix + [rem])
            return
        for i in range(rem + 1):
            rec(prefix + [i], rem - i, k + 1)

    rec([], degree, 0)
    return np.array(out, dtype=int)


def monomial_exponents_upto(d, degree):
    """All exponent tuples of total degree <= `degree`, ordered by degree."""
    return np.vstack([monomial_exponents(d, k) for k in range(degree + 1)])
