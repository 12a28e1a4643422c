import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from treeharmonic.errors import ParameterError, ResolutionError, ToleranceError
from treeharmonic.quadrature import QuadratureGrid, periodic_grid, tanh_sinh
from treeharmonic.spectral import SpectralParams, gamma, plancherel_weight
from treeharmonic.transforms import (
    EvenSequence,
    SpectralFunction,
    abel_forward,
    abel_inverse,
    fourier_inverse,
    inverse_spherical,
    spherical_transform,
)
from treeharmonic.tree import RadialFunction

coeffs = st.lists(st.floats(-5, 5), min_size=1, max_size=9)


def setup(Q, M=512):
    sp = SpectralParams(Q)
    return sp, periodic_grid(sp, M)


def test_grid_layout():
    sp, grid = setup(3, 64)
    assert grid.nodes[0] == pytest.approx(-sp.tau / 2)
    assert np.allclose(np.diff(grid.nodes), sp.tau / 64)
    assert grid.weights.sum() == pytest.approx(sp.tau, rel=1e-15)
    assert grid.coarsened().M == 32
    with pytest.raises(ParameterError):
        QuadratureGrid(sp.tau, 7)
    with pytest.raises(ParameterError):
        QuadratureGrid(sp.tau, 6)


@pytest.mark.parametrize("Q", [2, 3, 4])
def test_grid_integrates_trig_polynomials_exactly(Q):
    sp, grid = setup(Q)
    for m in range(-511, 512, 7):
        val = grid.integrate(np.exp(1j * m * grid.theta))
        assert abs(val - (sp.tau if m == 0 else 0)) < 1e-12


def test_tanh_sinh_accuracy():
    x, w, da, db = tanh_sinh(0.0, 2.0)
    assert abs(np.sum(w * np.sqrt(da)) - (2 / 3) * 2**1.5) < 1e-12
    assert np.allclose(x, da)
    with pytest.raises(ParameterError):
        tanh_sinh(1.0, 1.0)


def test_spherical_transform_examples():
    for Q in (2, 3):
        sp, grid = setup(Q)
        assert np.max(np.abs(spherical_transform(RadialFunction(Q, [1.0]), grid).samples - 1)) == 0
        h1 = spherical_transform(RadialFunction.shell(Q, 1), grid).samples
        assert np.max(np.abs(h1 - (1 + Q) * gamma(sp, grid.nodes))) < 1e-13


@given(st.integers(2, 5), coeffs)
def test_spherical_transform_even_and_periodic(Q, c):
    sp, _ = setup(Q)
    grid = QuadratureGrid(sp.tau, 64)
    f = RadialFunction(Q, c)
    H = spherical_transform(f, grid).samples
    # node j and node M - j are reflections of each other about 0
    assert np.max(np.abs(H[1:] - H[1:][::-1])) <= 1e-9 * (1 + np.max(np.abs(H)))


@given(st.integers(2, 4), coeffs, st.integers(0, 2**32 - 1))
def test_plancherel_isometry_property(Q, c, seed):
    sp, grid = setup(Q)
    rng = np.random.default_rng(seed)
    f = RadialFunction(Q, np.array(c) + 1j * rng.normal(size=len(c)))
    dmu = grid.weights * plancherel_weight(sp, grid.nodes)
    rhs = np.sum(np.abs(spherical_transform(f, grid).samples) ** 2 * dmu)
    lhs = f.l2_norm_squared()
    assert abs(lhs - rhs) <= 1e-10 * lhs


def test_inverse_spherical_examples():
    for Q in (2, 3, 4):
        sp, grid = setup(Q)
        one = SpectralFunction.from_callable(sp, grid, lambda l: np.ones_like(l))
        d = inverse_spherical(one, 10)
        assert abs(d.values[0] - 1) < 1e-10 and np.max(np.abs(d.values[1:])) < 1e-10
        s3 = inverse_spherical(spherical_transform(RadialFunction.shell(Q, 3), grid), 8)
        assert np.max(np.abs(s3.values - RadialFunction.shell(Q, 3, 8).values)) < 1e-10
        assert s3.error_bound > 0


@given(st.integers(2, 4), coeffs, coeffs, st.floats(-3, 3), st.floats(-3, 3))
def test_inverse_spherical_linear(Q, c1, c2, a, b):
    sp, grid = setup(Q, 128)
    F = spherical_transform(RadialFunction(Q, c1), grid)
    G = spherical_transform(RadialFunction(Q, c2), grid)
    lhs = inverse_spherical(a * F + b * G, 12).values
    rhs = a * inverse_spherical(F, 12).values + b * inverse_spherical(G, 12).values
    assert np.max(np.abs(lhs - rhs)) < 1e-11 * (1 + np.max(np.abs(rhs)))


@given(st.integers(2, 4), coeffs)
def test_spherical_roundtrip(Q, c):
    _, grid = setup(Q)
    f = RadialFunction(Q, c)
    back = inverse_spherical(spherical_transform(f, grid), 10)
    scale = max(1.0, float(np.max(np.abs(f.values))))
    assert np.max(np.abs(back.values[: f.N + 1] - f.values)) < 1e-10 * scale
    assert np.max(np.abs(back.values[f.N + 1 :]), initial=0) < 1e-10 * scale


def test_resolution_error():
    sp, grid = setup(2, 32)
    F = spherical_transform(RadialFunction(2, [1.0]), grid)
    inverse_spherical(F, 12)
    with pytest.raises(ResolutionError):
        inverse_spherical(F, 13)
    with pytest.raises(ResolutionError):
        fourier_inverse(F, 13)


def test_fourier_inverse_examples():
    sp, grid = setup(3)
    one = fourier_inverse(SpectralFunction.from_callable(sp, grid, np.ones_like), 6).values
    assert abs(one[0] - 1) < 1e-14 and np.max(np.abs(one[1:])) < 1e-14
    g = fourier_inverse(SpectralFunction.from_callable(sp, grid, lambda l: gamma(sp, l)), 6).values
    expected = np.zeros(7)
    expected[1] = sp.gamma0 / 2
    assert np.max(np.abs(g - expected)) < 1e-14
    assert np.max(np.abs(g.imag)) <= 1e-14


@pytest.mark.parametrize("Q", [2, 3, 5])
def test_fourier_inverse_both_forms_agree(Q):
    sp, grid = setup(Q)

    def F(lam):
        return np.exp(np.cos(lam * sp.logQ)) / (2.5 - np.cos(2 * lam * sp.logQ))

    got = fourier_inverse(SpectralFunction.from_callable(sp, grid, F), 12).values
    for n in range(13):
        ref, _ = quad(lambda t: F(sp.tau * t / (2 * math.pi)) * math.cos(t * n), 0, math.pi, epsabs=1e-15, limit=200)
        assert abs(got[n] - ref / math.pi) < 1e-12
    assert np.max(np.abs(got.imag)) <= 1e-14


def brute_abel_inverse(g, Q, n, K):
    get = lambda m: g[abs(m)] if abs(m) < len(g) else 0.0
    total = 0.0
    for k in range(K + 1):
        total += Q ** (-n / 2 - k) * (get(n + 2 * k) - get(n + 2 * k + 2))
    return total


def test_abel_inverse_examples():
    assert np.all(abel_inverse(np.zeros(5), 6, q=2).values == 0)
    unit = abel_inverse(np.eye(1, 3)[0], 8, q=3)
    assert unit.values[0] == 1 and np.all(unit.values[1:] == 0)
    const = abel_inverse(np.ones(200), 10, q=2)
    assert np.max(np.abs(const.values)) < 1e-15


@given(st.integers(2, 5), st.lists(st.floats(-2, 2), min_size=1, max_size=30))
def test_abel_inverse_matches_partial_sums(Q, g):
    got = abel_inverse(np.array(g), 10, K=60, q=Q).values
    for n in range(11):
        assert abs(got[n] - brute_abel_inverse(g, Q, n, 60)) < 1e-13


def test_abel_inverse_budget_and_tolerance():
    g = EvenSequence(np.ones(4), error_bound=1e-12)
    r = abel_inverse(g, 3, K=10, q=2)
    assert r.error_bound == pytest.approx(2 * 2.0**-11 * 2 + 2 * 1e-12 * 2)
    with pytest.raises(ToleranceError) as exc:
        abel_inverse(g, 3, K=10, q=2, tol=1e-6)
    assert exc.value.achievable == pytest.approx(2 * 2.0**-11 * 2)
    abel_inverse(g, 3, K=60, q=2, tol=1e-15)
    with pytest.raises(ParameterError):
        abel_inverse(g, 3)


def test_abel_forward_delta():
    sp, grid = setup(2)
    a = abel_forward(RadialFunction(2, [1.0]), grid, 5).values
    assert abs(a[0] - 1) < 1e-14 and np.max(np.abs(a[1:])) < 1e-14


@given(st.integers(2, 4), st.lists(st.floats(-3, 3), min_size=1, max_size=7))
def test_abel_roundtrip(Q, c):
    _, grid = setup(Q)
    f = RadialFunction(Q, c)
    Af = abel_forward(f, grid, f.N + 2 * 60 + 2)
    back = abel_inverse(Af, f.N, K=60, q=Q)
    assert np.max(np.abs(back.values - f.values)) < 1e-9


@given(st.integers(2, 4), coeffs, coeffs, st.floats(-3, 3))
def test_abel_forward_linear(Q, c1, c2, a):
    _, grid = setup(Q, 128)
    f, g = RadialFunction(Q, c1), RadialFunction(Q, c2)
    n = max(f.N, g.N)
    fg = RadialFunction(Q, np.pad(f.values, (0, n - f.N)) * a + np.pad(g.values, (0, n - g.N)))
    lhs = abel_forward(fg, grid, 20).values
    rhs = a * abel_forward(f, grid, 20).values + abel_forward(g, grid, 20).values
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * (1 + np.max(np.abs(rhs)))


def test_abel_forward_vanishes_past_support():
    _, grid = setup(3)
    f = RadialFunction(3, [0.5, -1.0, 2.0, 0.25])
    Af = abel_forward(f, grid, 20).values
    assert np.max(np.abs(Af[4:])) < 1e-13
