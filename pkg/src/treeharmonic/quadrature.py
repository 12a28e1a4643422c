"""Quadrature rules over one period of the spectrum."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .spectral import SpectralParams


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform periodic trapezoid on [-tau/2, tau/2).

    Exact for Q^{i lambda m} with |m| < M, and spectrally accurate for the
    smooth tau-periodic integrands met here.
    """

    tau: float
    M: int = 512
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.M < 8 or self.M % 2:
            raise ParameterError(f"node count must be even and >= 8, got {self.M}")
        if not self.tau > 0:
            raise ParameterError("period must be positive")
        j = np.arange(self.M)
        object.__setattr__(self, "nodes", -self.tau / 2 + j * (self.tau / self.M))
        object.__setattr__(self, "weights", np.full(self.M, self.tau / self.M))

    @property
    def theta(self) -> np.ndarray:
        """Nodes rescaled to [-pi, pi)."""
        return self.nodes * (2 * math.pi / self.tau)

    def integrate(self, values) -> complex:
        return np.sum(self.weights * values)

    def coarsened(self) -> QuadratureGrid:
        """Every other node; used for a posteriori error estimates."""
        return QuadratureGrid(self.tau, self.M // 2)


def periodic_grid(params: SpectralParams, M: int = 512) -> QuadratureGrid:
    return QuadratureGrid(params.tau, M)


def tanh_sinh(a: float, b: float, h: float = 1 / 32, tmax: float = 3.2):
    """Double-exponential rule on [a, b].

    Returns (x, w, da, db) with da = x - a and db = b - x computed without
    cancellation, so integrands with endpoint singularities can be evaluated
    accurately right next to the endpoints.
    """
    if not b > a:
        raise ParameterError("tanh-sinh needs b > a")
    t = np.arange(-tmax, tmax + h / 2, h)
    u = 0.5 * math.pi * np.sinh(t)
    half = 0.5 * (b - a)
    # 1 - tanh(u) = 2 / (1 + e^{2u}),  1 + tanh(u) = 2 / (1 + e^{-2u})
    db = half * 2.0 / (1.0 + np.exp(2 * u))
    da = half * 2.0 / (1.0 + np.exp(-2 * u))
    w = h * half * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = (da > 0) & (db > 0)
    return a + da[keep], w[keep], da[keep], db[keep]
