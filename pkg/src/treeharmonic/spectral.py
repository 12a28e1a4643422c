"""Spectral side of the tree: gamma, the c-function, Plancherel density, phi_lambda.

Everything is written in terms of theta = lambda * log Q, so that gamma is a
plain cosine and the spectrum [-tau/2, tau/2] becomes [-pi, pi].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PoleError

POLE_TOL = 1e-12


@dataclass(frozen=True)
class SpectralParams:
    Q: int

    def __post_init__(self):
        if int(self.Q) != self.Q or self.Q < 2:
            raise ParameterError(f"Q must be an integer >= 2, got {self.Q}")

    @property
    def logQ(self) -> float:
        return math.log(self.Q)

    @property
    def tau(self) -> float:
        """Period of the spectrum, 2 pi / log Q."""
        return 2 * math.pi / self.logQ

    @property
    def gamma0(self) -> float:
        return 2.0 / (math.sqrt(self.Q) + 1.0 / math.sqrt(self.Q))

    @property
    def plancherel_constant(self) -> float:
        """Makes dlambda/|c|^2 a probability measure on one period."""
        Q = self.Q
        return Q * self.logQ / (4 * math.pi * (Q + 1))


@dataclass
class SphericalFunction:
    lam: complex
    values: np.ndarray

    def __getitem__(self, n):
        return self.values[n]


def gamma(params: SpectralParams, lam):
    """gamma(lambda) = gamma(0) cos(lambda log Q).  Vectorized over lambda."""
    return params.gamma0 * np.cos(np.asarray(lam) * params.logQ)


def c_function(params: SpectralParams, z):
    Q = params.Q
    z = np.asarray(z, dtype=complex)
    qz = np.exp(1j * z * params.logQ)  # Q^{iz}
    denom = qz - 1.0 / qz
    if np.any(np.abs(denom) < POLE_TOL):
        raise PoleError(f"c-function evaluated at a pole (z in (tau/2)Z, tau={params.tau})")
    numer = math.sqrt(Q) * qz - 1.0 / (math.sqrt(Q) * qz)
    out = numer / denom / (math.sqrt(Q) + 1.0 / math.sqrt(Q))
    return out[()] if out.ndim == 0 else out


def inverse_c_squared(params: SpectralParams, lam):
    """1/|c(lambda)|^2 for real lambda, in a form without 0/0 at (tau/2)Z.

    With theta = lambda log Q:
        |c|^-2 = (Q^1/2 + Q^-1/2)^2 * 4 sin^2 theta / (Q + 1/Q - 2 cos 2 theta).
    The denominator is >= (Q^1/2 - Q^-1/2)^2 > 0.
    """
    Q = params.Q
    th = np.asarray(lam, dtype=float) * params.logQ
    a = math.sqrt(Q) + 1.0 / math.sqrt(Q)
    return a * a * 4.0 * np.sin(th) ** 2 / (Q + 1.0 / Q - 2.0 * np.cos(2.0 * th))


def plancherel_weight(params: SpectralParams, lam):
    """Density of the Plancherel measure w.r.t. dlambda on [-tau/2, tau/2]."""
    return params.plancherel_constant * inverse_c_squared(params, lam)


def phi_table(params: SpectralParams, lam, N: int) -> np.ndarray:
    """phi_lambda(n) for n = 0..N (rows) and every lambda given (columns).

    Radial form of M phi = gamma phi: at x0 all Q+1 neighbours sit on shell 1,
    so phi(1) = gamma; for n >= 1 one neighbour is on shell n-1 and Q are on
    shell n+1, so (phi(n-1) + Q phi(n+1)) / (Q+1) = gamma phi(n).
    """
    if N < 0:
        raise ParameterError("N must be >= 0")
    Q = params.Q
    lam = np.atleast_1d(np.asarray(lam))
    g = gamma(params, lam)
    dtype = complex if np.iscomplexobj(g) else float
    out = np.empty((N + 1, lam.size), dtype=dtype)
    out[0] = 1.0
    if N >= 1:
        out[1] = g
    for n in range(1, N):
        out[n + 1] = ((Q + 1) * g * out[n] - out[n - 1]) / Q
    return out


def phi_theta_table(params: SpectralParams, theta, N: int) -> np.ndarray:
    """Same as :func:`phi_table` but indexed by theta = lambda log Q."""
    return phi_table(params, np.asarray(theta) / params.logQ, N)


def phi(params: SpectralParams, lam, N: int) -> SphericalFunction:
    return SphericalFunction(lam, phi_table(params, lam, N)[:, 0])


def phi_c_expansion(params: SpectralParams, lam: float, N: int) -> np.ndarray:
    """c(l) Q^{(il - 1/2) n} + c(-l) Q^{(-il - 1/2) n}; cross-check only."""
    n = np.arange(N + 1)
    L = params.logQ
    cp = c_function(params, lam)
    cm = c_function(params, -lam)
    return cp * np.exp((1j * lam - 0.5) * n * L) + cm * np.exp((-1j * lam - 0.5) * n * L)
