"""Riesz means S_R^z f = f * kappa_R^z and the objects that control them.

The kernel kappa_R^z is computed two independent ways:

* ``kernel_spectral``: Plancherel inversion of the multiplier, using phi_lambda
  and the Plancherel density;
* ``kernel_abel``: the explicit sine-series
      kappa(n) = (2/pi) sum_k Q^{-n/2-k} int_0^pi m(theta) sin(theta) sin((n+2k+1) theta) dtheta
  obtained by composing the inverse Abel series with the cosine form of F^-1.

For R >= 2 the multiplier base 1 - (1 - gamma)/R stays positive, the
integrands are analytic and periodic, and the uniform grid is used.  For
R < 2 the positive part may switch on; the support [0, theta*] is then
integrated with a tanh-sinh rule that tolerates the t^z endpoint behaviour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundViolation, ParameterError
from .quadrature import QuadratureGrid, periodic_grid, tanh_sinh
from .spectral import SpectralParams, gamma, phi_theta_table, plancherel_weight
from .transforms import (
    DEFAULT_SERIES_CUTOFF,
    EPS,
    SpectralFunction,
    _check_resolution,
    _quadrature_with_estimate,
    inverse_spherical,
)
from .tree import RadialFunction, TreeFunction, Vertex, radial_convolve


@dataclass(frozen=True)
class RieszParams:
    z: complex
    R: float

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        if not self.z.real > 0:
            raise ParameterError(f"Riesz order needs Re z > 0, got z={self.z}")
        if not self.R > 0:
            raise ParameterError(f"summation parameter R must be positive, got {self.R}")


def decay_constant(Q: int) -> float:
    """Constant 1/(1 - 1/Q) in |kappa_R^z(n)| <= c Q^{-n/2} for |m| <= 1."""
    return 1.0 / (1.0 - 1.0 / Q)


def _power(t, z: complex):
    """t^z on t >= 0 with the principal branch and 0^z = 0 (Re z > 0)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    pos = t > 0
    out[pos] = np.exp(z * np.log(t[pos]))
    return out


def multiplier(params: RieszParams, spectral: SpectralParams, lam):
    """m_R^z(lambda) = (1 - (1 - gamma(lambda))/R)_+^z."""
    t = 1.0 - (1.0 - gamma(spectral, lam)) / params.R
    return _power(t, params.z)


def multiplier_function(params: RieszParams, spectral: SpectralParams, grid: QuadratureGrid) -> SpectralFunction:
    return SpectralFunction.from_callable(spectral, grid, lambda lam: multiplier(params, spectral, lam))


def _kink_rule(params: RieszParams, spectral: SpectralParams):
    """tanh-sinh nodes on [0, theta*] and m sampled there, for R < 2.

    theta* solves gamma = 1 - R when that has a solution, else theta* = pi.
    The base is evaluated as
        t = (gamma0/R) 2 sin((theta + theta*)/2) sin((theta* - theta)/2) + (R - 1 + gamma0 cos theta*)/R
    so it stays accurate next to the kink.
    """
    g0 = spectral.gamma0
    R = params.R
    c = (1.0 - R) / g0
    if c >= 1.0:
        return None
    theta_star = math.acos(c) if c > -1.0 else math.pi
    theta, w, _, db = tanh_sinh(0.0, theta_star)
    offset = (R - 1.0 + g0 * math.cos(theta_star)) / R
    t = (g0 / R) * 2.0 * np.sin((theta + theta_star) / 2.0) * np.sin(db / 2.0) + offset
    return theta, w, _power(t, params.z)


def _tanh_sinh_rows(terms: np.ndarray) -> tuple[np.ndarray, float]:
    full = terms.sum(axis=1)
    coarse = 2.0 * terms[:, ::2].sum(axis=1)
    rounding = 8 * EPS * np.abs(terms).sum(axis=1) + np.finfo(float).tiny
    return full, float(np.max(np.abs(full - coarse) + rounding))


def kernel_spectral(
    params: RieszParams,
    spectral: SpectralParams,
    grid: QuadratureGrid | None = None,
    N: int = 30,
) -> RadialFunction:
    """kappa_R^z = H^-1(m_R^z) on shells 0..N."""
    grid = periodic_grid(spectral) if grid is None else grid
    _check_resolution(grid, N)
    if params.R >= 2:
        return inverse_spherical(multiplier_function(params, spectral, grid), N)
    rule = _kink_rule(params, spectral)
    if rule is None:
        return RadialFunction(spectral.Q, np.zeros(N + 1), error_bound=0.0)
    theta, w, m = rule
    # even integrand: int_{-tau/2}^{tau/2} dlambda = (2 / log Q) int_0^theta* dtheta
    dmu = w * plancherel_weight(spectral, theta / spectral.logQ) * (2.0 / spectral.logQ)
    values, err = _tanh_sinh_rows(phi_theta_table(spectral, theta, N) * (m * dmu))
    return RadialFunction(spectral.Q, values, error_bound=err)


def _sine_moments(
    params: RieszParams, spectral: SpectralParams, grid: QuadratureGrid, jmax: int
) -> tuple[np.ndarray, float]:
    """(2/pi) int_0^pi m(theta) sin(theta) sin(j theta) dtheta for j = 0..jmax."""
    j = np.arange(jmax + 1)[:, None]
    if params.R >= 2:
        theta = grid.theta
        m = multiplier(params, spectral, grid.nodes)
        # even 2pi-periodic integrand: (2/pi) int_0^pi = (1/pi) int_{-pi}^{pi} = (2/M) sum
        terms = (2.0 / grid.M) * m * np.sin(theta) * np.sin(j * theta)
        return _quadrature_with_estimate(terms)
    rule = _kink_rule(params, spectral)
    if rule is None:
        return np.zeros(jmax + 1, dtype=complex), 0.0
    theta, w, m = rule
    terms = (2.0 / math.pi) * w * m * np.sin(theta) * np.sin(j * theta)
    return _tanh_sinh_rows(terms)


def kernel_abel(
    params: RieszParams,
    spectral: SpectralParams,
    grid: QuadratureGrid | None = None,
    N: int = 30,
    K: int = DEFAULT_SERIES_CUTOFF,
) -> RadialFunction:
    """Explicit sine-series route to kappa_R^z, truncated at k = K."""
    grid = periodic_grid(spectral) if grid is None else grid
    Q = spectral.Q
    jmax = N + 2 * K + 1
    _check_resolution(grid, jmax // 2)
    moments, err = _sine_moments(params, spectral, grid, jmax)
    k = np.arange(K + 1)
    values = np.empty(N + 1, dtype=complex)
    for n in range(N + 1):
        values[n] = np.sum(float(Q) ** (-n / 2.0 - k) * moments[n + 2 * k + 1])
    geom = decay_constant(Q)
    # |moment| <= 1 because |m| <= 1 and (2/pi) int_0^pi sin|sin j| <= 1
    tail = float(Q) ** (-(K + 1)) * geom
    return RadialFunction(Q, values, error_bound=tail + err * geom)


@dataclass
class KernelReport:
    Q: int
    z: complex
    R: float
    kernel: RadialFunction
    decay_ratio: np.ndarray
    cross_check_error: float
    abel: RadialFunction | None = field(default=None, repr=False)

    @property
    def empirical_constant(self) -> float:
        return float(np.max(self.decay_ratio))


def kernel_report(
    params: RieszParams,
    spectral: SpectralParams,
    grid: QuadratureGrid | None = None,
    N: int = 30,
    K: int = DEFAULT_SERIES_CUTOFF,
) -> KernelReport:
    grid = periodic_grid(spectral) if grid is None else grid
    ks = kernel_spectral(params, spectral, grid, N)
    ka = kernel_abel(params, spectral, grid, N, K)
    n = np.arange(N + 1)
    ratio = float(spectral.Q) ** (n / 2.0) * np.abs(ks.values)
    return KernelReport(
        spectral.Q, params.z, params.R, ks, ratio, float(np.max(np.abs(ks.values - ka.values))), ka
    )


@dataclass
class DecayTable:
    rows: list[tuple]  # (Q, z, R, n, Q^{n/2}|kappa(n)|)
    bound: float
    empirical_constant: float


def decay_check(reports: Sequence[KernelReport], slack: float = 1e-8, raise_on_violation: bool = True) -> DecayTable:
    """Check Q^{n/2}|kappa_R^z(n)| <= 1/(1 - 1/Q) + slack over all reports."""
    if not reports:
        raise ParameterError("decay_check needs at least one kernel report")
    Qs = {r.Q for r in reports}
    if len(Qs) != 1:
        raise ParameterError("decay_check expects reports for a single Q")
    Q = Qs.pop()
    bound = decay_constant(Q) + slack
    rows = []
    worst = 0.0
    for rep in reports:
        for n, ratio in enumerate(rep.decay_ratio):
            rows.append((Q, rep.z, rep.R, n, float(ratio)))
            worst = max(worst, float(ratio))
            if raise_on_violation and not ratio <= bound:
                raise BoundViolation(
                    f"Q^(n/2)|kappa| = {ratio:.6g} exceeds {bound:.6g} at z={rep.z}, R={rep.R}, n={n}",
                    z=rep.z,
                    R=rep.R,
                    n=n,
                )
    return DecayTable(rows, bound, worst)


def riesz_apply(
    params: RieszParams,
    f: TreeFunction,
    N: int,
    points: Iterable[Vertex] | None = None,
    grid: QuadratureGrid | None = None,
    kernel: RadialFunction | None = None,
) -> TreeFunction:
    """S_R^z f = f * kappa_R^z with kappa truncated at shell N.

    Per-vertex error budgets combine the kernel's quadrature budget with the
    dropped shells.  A dropped shell d is charged |kappa(d)| + err from an
    extended kernel when d is within its range, and the uniform bound
    Q^{-d/2}/(1 - 1/Q) beyond.
    """
    Q = f.params.Q
    spectral = SpectralParams(Q)
    grid = periodic_grid(spectral) if grid is None else grid
    C = decay_constant(Q)
    if kernel is None:
        n_ext = max(N, min((grid.M - 8) // 2, N + 2 * f.params.depth))
        ext = kernel_spectral(params, spectral, grid, n_ext)
        kernel = RadialFunction(Q, ext.values[: N + 1], error_bound=ext.error_bound)
    else:
        ext = kernel
        n_ext = kernel.N

    def tail(d):
        if d <= n_ext:
            return abs(ext.values[d]) + ext.error_bound
        return C * Q ** (-d / 2.0)

    return radial_convolve(f, kernel, points, tail=tail)


def maximal_apply(
    z: complex,
    R_grid: Sequence[float],
    f: TreeFunction,
    N: int,
    points: Iterable[Vertex] | None = None,
    grid: QuadratureGrid | None = None,
) -> TreeFunction:
    """max over R in R_grid of |S_R^z f(x)|: a lower bound for sup_{R>0}."""
    if len(R_grid) == 0:
        raise ParameterError("R grid must be nonempty")
    points = None if points is None else list(points)
    best: dict[Vertex, float] = {}
    budget: dict[Vertex, float] = {}
    for R in R_grid:
        s = riesz_apply(RieszParams(z, R), f, N, points, grid)
        for x, v in s.entries.items():
            a = abs(v)
            if x not in best or a > best[x]:
                best[x] = a
            budget[x] = max(budget.get(x, 0.0), s.error_bounds.get(x, 0.0))
    return TreeFunction(f.params, best, budget)


def comparison_kernel(Q: int, N: int) -> RadialFunction:
    """kappa_Q(n) = Q^{-n/2}, with its geometric continuation declared."""
    if Q < 2:
        raise ParameterError("Q must be >= 2")
    n = np.arange(N + 1)
    return RadialFunction(Q, float(Q) ** (-n / 2.0), tail_ratio=float(Q) ** -0.5)


def radial_lq_power(k: RadialFunction, q: float) -> float:
    """||k||_q^q = |k(0)|^q + (Q+1) sum_{n>=1} Q^{n-1} |k(n)|^q; inf if divergent."""
    if not q >= 1:
        raise ParameterError(f"exponent must be >= 1, got {q}")
    Q = k.q
    a = np.abs(k.values)
    if math.isinf(q):
        return float(a.max())
    total = float(np.sum(k.sphere_weights() * a**q))
    if k.tail_ratio is None or a[-1] == 0:
        return total
    rho = Q * abs(k.tail_ratio) ** q
    if rho >= 1.0 - 1e-12:
        return math.inf
    first = (Q + 1) * float(Q) ** k.N * (a[-1] * abs(k.tail_ratio)) ** q
    return total + first / (1.0 - rho)


def radial_lq_norm(k: RadialFunction, q: float) -> float:
    p = radial_lq_power(k, q)
    if math.isinf(q) or math.isinf(p):
        return p
    return p ** (1.0 / q)
