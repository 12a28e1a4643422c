"""Heat semigroup e^{-R L} and the dense-subspace experiment.

Since L = I - M with M stochastic, e^{-RL} = e^{-R} sum_k R^k/k! M^k.  Mass on
shell n only comes from k >= n and M^k has total mass one, so

    |S(n)| h_R(n) <= P(Poisson(R) >= n),

which is the tail bound used for every truncation below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import pdtrc

from .errors import ParameterError, TruncationError
from .quadrature import QuadratureGrid, periodic_grid
from .riesz import RieszParams, multiplier
from .spectral import SpectralParams, gamma
from .transforms import SpectralFunction, inverse_spherical
from .tree import RadialFunction, TreeFunction, Vertex, ball, lp_norm, radial_convolve, sphere_size

DEFAULT_TAIL_TOL = 1e-15


@dataclass(frozen=True)
class HeatParams:
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise ParameterError(f"heat time must be positive, got {self.R}")


def heat_multiplier(R: float, spectral: SpectralParams, lam):
    return np.exp(-R * (1.0 - gamma(spectral, lam)))


def poisson_tail(R: float, n: int) -> float:
    """P(Poisson(R) >= n)."""
    if n <= 0:
        return 1.0
    return float(pdtrc(n - 1, R))


def heat_shell_bound(R: float, Q: int, n: int) -> float:
    """Upper bound on h_R(n) for a single vertex on shell n."""
    return poisson_tail(R, n) / sphere_size(Q, n)


def heat_range(R: float, tol: float = DEFAULT_TAIL_TOL, cap: int = 200) -> int:
    """Smallest N with P(Poisson(R) > N) <= tol."""
    for n in range(cap + 1):
        if poisson_tail(R, n + 1) <= tol:
            return n
    return cap


def heat_kernel(
    params: HeatParams, spectral: SpectralParams, grid: QuadratureGrid | None = None, N: int = 40
) -> RadialFunction:
    """h_R = H^-1(e^{-R(1 - gamma)}) on shells 0..N."""
    grid = periodic_grid(spectral) if grid is None else grid
    F = SpectralFunction.from_callable(spectral, grid, lambda lam: heat_multiplier(params.R, spectral, lam))
    return inverse_spherical(F, N)


def heat_apply(
    params: HeatParams,
    f: TreeFunction,
    N: int | None = None,
    points: Iterable[Vertex] | None = None,
    grid: QuadratureGrid | None = None,
) -> TreeFunction:
    """e^{-RL} f = f * h_R, kernel truncated at N (default: Poisson tail <= 1e-15)."""
    Q = f.params.Q
    N = heat_range(params.R) if N is None else N
    h = heat_kernel(params, SpectralParams(Q), grid, N)
    return radial_convolve(f, h, points, tail=lambda d: heat_shell_bound(params.R, Q, d))


def heat_maximal_apply(
    R_grid: Sequence[float],
    f: TreeFunction,
    N: int,
    points: Iterable[Vertex] | None = None,
    grid: QuadratureGrid | None = None,
) -> TreeFunction:
    """max over the grid of |f * h_R|; observed, not asserted, to be L^2 bounded."""
    if len(R_grid) == 0:
        raise ParameterError("R grid must be nonempty")
    points = None if points is None else list(points)
    best: dict[Vertex, float] = {}
    for R in R_grid:
        for x, v in heat_apply(HeatParams(R), f, N, points, grid).entries.items():
            best[x] = max(best.get(x, 0.0), abs(v))
    return TreeFunction(f.params, best)


@dataclass
class HeatNormCheck:
    R: float
    grid_sup: float
    closed_form: float

    @property
    def discrepancy(self) -> float:
        return abs(self.grid_sup - self.closed_form)

    @property
    def contractive(self) -> bool:
        return self.closed_form <= 1.0


def heat_l2_norm_check(params: HeatParams, spectral: SpectralParams, grid: QuadratureGrid | None = None) -> HeatNormCheck:
    """Grid sup of the heat multiplier against e^{-R(1 - gamma(0))}."""
    grid = periodic_grid(spectral) if grid is None else grid
    sup = float(np.max(np.abs(heat_multiplier(params.R, spectral, grid.nodes))))
    return HeatNormCheck(params.R, sup, math.exp(-params.R * (1.0 - spectral.gamma0)))


def _product_kernel(spectral, grid, N, s, t, riesz: RieszParams | None = None):
    """H^-1 of e^{-(1/t)(1-gamma)} e^{-s(1-gamma)}, times (m_R^z - 1) if given."""

    def fn(lam):
        heat = heat_multiplier(1.0 / t, spectral, lam) * heat_multiplier(s, spectral, lam)
        if riesz is None:
            return heat
        return (multiplier(riesz, spectral, lam) - 1.0) * heat

    return inverse_spherical(SpectralFunction.from_callable(spectral, grid, fn), N)


def dense_subspace_experiment(
    f: TreeFunction,
    st_pairs: Sequence[tuple[float, float]],
    p_grid: Sequence[float],
    R_grid: Sequence[float],
    z: complex = 1.0,
    radius: int | None = None,
    sample_points: Sequence[Vertex] | None = None,
    grid: QuadratureGrid | None = None,
) -> list[dict]:
    """Tabulate ||g - f||_p and |S_R^z g(x) - g(x)| for g = e^{-L/t} e^{-sL} f.

    ``radius`` is the ball on which g - f is evaluated (default supp + 8);
    the mass g carries outside it is bounded with the Poisson tail and
    reported as ``error_budget``.  Rows are dicts with keys
    kind ('norm' | 'riesz'), s, t, param (p or R), vertex, value, error_budget.
    """
    params = f.params
    Q = params.Q
    spectral = SpectralParams(Q)
    grid = periodic_grid(spectral) if grid is None else grid
    supp = f.support_radius()
    radius = supp + 8 if radius is None else radius
    N = radius + supp  # every support point is within N of every evaluation point
    if radius + N > params.depth:
        raise TruncationError(
            f"experiment radius {radius} with support radius {supp} needs depth {radius + N}", radius=radius + N
        )
    if sample_points is None:
        sample_points = [Vertex((), Q)]
    l1 = sum(abs(v) for _, v in f.support())
    rows = []
    for s, t in st_pairs:
        if not (0 < s <= 1 and t >= 1):
            raise ParameterError(f"need 0 < s <= 1 and t >= 1, got s={s}, t={t}")
        T = s + 1.0 / t
        kern = _product_kernel(spectral, grid, N, s, t)
        g = radial_convolve(f, kern, ball(params, radius))
        diff = g - f
        # outside ball(radius): sum |g| <= sum_y |f(y)| P(Poisson(T) > radius - |y|)
        outside = sum(abs(v) * poisson_tail(T, radius - len(y) + 1) for y, v in f.support())
        quad = kern.error_bound * l1 * params.ball_size(radius)
        for p in p_grid:
            rows.append(
                dict(kind="norm", s=s, t=t, param=p, vertex="", value=lp_norm(diff, p), error_budget=float(outside + quad))
            )
        for R in R_grid:
            kr = _product_kernel(spectral, grid, N, s, t, RieszParams(z, R))
            sg = radial_convolve(f, kr, sample_points)
            for x in sample_points:
                rows.append(
                    dict(
                        kind="riesz",
                        s=s,
                        t=t,
                        param=R,
                        vertex="".join(map(str, x.word)) or "x0",
                        value=abs(sg[x]),
                        error_budget=float(sg.error_bounds[x]),
                    )
                )
    return rows
