"""Spherical Fourier transform, its inverse, and the factorization through Abel.

Conventions (theta = lambda log Q):
    H f(lambda)    = sum_n |S(n)| f(n) phi_lambda(n)
    H^-1 F(n)      = int F(lambda) phi_lambda(n) dmu(lambda),  dmu = Plancherel
    F^-1 F(n)      = (1/tau) int F(lambda) Q^{-i lambda n} dlambda
    A^-1 g(n)      = sum_k Q^{-n/2-k} (g(n+2k) - g(n+2k+2))
The forward Abel transform is realized as F^-1 o H, so that H = F o A holds
by construction and A^-1 can be checked against it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ParameterError, ResolutionError, ToleranceError
from .quadrature import QuadratureGrid, periodic_grid
from .spectral import SpectralParams, phi_table, plancherel_weight
from .tree import RadialFunction

EPS = np.finfo(float).eps
DEFAULT_NODES = 512
DEFAULT_SERIES_CUTOFF = 60


@dataclass
class SpectralFunction:
    params: SpectralParams
    grid: QuadratureGrid
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex).reshape(-1)
        if self.samples.size != self.grid.M:
            raise ParameterError(f"{self.samples.size} samples for a {self.grid.M}-node grid")

    @classmethod
    def from_callable(cls, params: SpectralParams, grid: QuadratureGrid, fn: Callable) -> SpectralFunction:
        return cls(params, grid, fn(grid.nodes))

    def __add__(self, other):
        return SpectralFunction(self.params, self.grid, self.samples + other.samples)

    def __mul__(self, other):
        if isinstance(other, SpectralFunction):
            return SpectralFunction(self.params, self.grid, self.samples * other.samples)
        return SpectralFunction(self.params, self.grid, self.samples * other)

    __rmul__ = __mul__


@dataclass
class EvenSequence:
    """g(n) for n = 0..len-1, extended evenly to negative n; zero past the end."""

    values: np.ndarray
    error_bound: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return self.values.size


def _check_resolution(grid: QuadratureGrid, N: int):
    if grid.M < 2 * N + 8:
        raise ResolutionError(f"{grid.M} nodes cannot resolve shells up to {N}; need M >= {2 * N + 8}")


def spherical_transform(f: RadialFunction, grid: QuadratureGrid | None = None) -> SpectralFunction:
    params = SpectralParams(f.q)
    grid = periodic_grid(params) if grid is None else grid
    table = phi_table(params, grid.nodes, f.N)
    coeffs = f.sphere_weights() * f.values
    return SpectralFunction(params, grid, coeffs @ table)


def _quadrature_with_estimate(terms: np.ndarray) -> tuple[np.ndarray, float]:
    """Row sums of ``terms`` (shape (N+1, M)) plus an error estimate.

    The estimate is |full rule - half rule| plus a rounding floor, taken
    over all rows; it is always positive.
    """
    full = terms.sum(axis=1)
    half = 2.0 * terms[:, ::2].sum(axis=1)
    rounding = 8 * EPS * np.abs(terms).sum(axis=1) + np.finfo(float).tiny
    return full, float(np.max(np.abs(full - half) + rounding))


def inverse_spherical(F: SpectralFunction, N: int) -> RadialFunction:
    grid = F.grid
    _check_resolution(grid, N)
    params = F.params
    table = phi_table(params, grid.nodes, N)
    dmu = grid.weights * plancherel_weight(params, grid.nodes)
    values, err = _quadrature_with_estimate(table * (F.samples * dmu))
    return RadialFunction(params.Q, values, error_bound=err)


def fourier_inverse(F: SpectralFunction, N: int) -> EvenSequence:
    """(1/tau) int F(lambda) Q^{-i lambda n} dlambda for n = 0..N."""
    grid = F.grid
    _check_resolution(grid, N)
    n = np.arange(N + 1)[:, None]
    kernel = np.exp(-1j * n * grid.theta[None, :])
    values, err = _quadrature_with_estimate(kernel * (F.samples * grid.weights / grid.tau))
    return EvenSequence(values, err)


def abel_inverse(
    g: EvenSequence | np.ndarray,
    N: int,
    K: int = DEFAULT_SERIES_CUTOFF,
    q: int | None = None,
    tol: float | None = None,
) -> RadialFunction:
    """Truncated series sum_{k<=K} Q^{-n/2-k} (g(n+2k) - g(n+2k+2)), n = 0..N.

    ``g`` is read as zero past its stored length.  The error budget adds the
    geometric tail 2 sup|g| Q^-(K+1) / (1 - 1/Q) and the propagated input
    error 2 err(g) / (1 - 1/Q).
    """
    if q is None:
        raise ParameterError("abel_inverse needs the branching number q")
    if q < 2:
        raise ParameterError("q must be >= 2")
    if K < 0:
        raise ParameterError("series cutoff K must be >= 0")
    if not isinstance(g, EvenSequence):
        g = EvenSequence(g)
    need = N + 2 * K + 3
    vals = np.zeros(max(need, len(g)), dtype=complex)
    vals[: len(g)] = g.values
    sup = float(np.max(np.abs(g.values))) if len(g) else 0.0
    geom = 1.0 / (1.0 - 1.0 / q)
    tail = 2.0 * sup * float(q) ** (-(K + 1)) * geom
    if tol is not None and tail > tol:
        raise ToleranceError(
            f"series cutoff K={K} leaves a tail bound {tail:.3e} above tolerance {tol:.3e}", achievable=tail
        )
    k = np.arange(K + 1)
    out = np.empty(N + 1, dtype=complex)
    for n in range(N + 1):
        diffs = vals[n + 2 * k] - vals[n + 2 * k + 2]
        out[n] = np.sum(float(q) ** (-n / 2.0 - k) * diffs)
    return RadialFunction(q, out, error_bound=tail + 2.0 * g.error_bound * geom)


def abel_forward(f: RadialFunction, grid: QuadratureGrid | None = None, N: int | None = None) -> EvenSequence:
    """A f computed as F^-1(H f); vanishes past supp f for finitely supported f."""
    params = SpectralParams(f.q)
    grid = periodic_grid(params) if grid is None else grid
    return fourier_inverse(spherical_transform(f, grid), f.N if N is None else N)
