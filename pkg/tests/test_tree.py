import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from treeharmonic.errors import ParameterError, TruncationError
from treeharmonic.tree import (
    RadialFunction,
    TreeFunction,
    TreeParams,
    Vertex,
    ball,
    delta,
    distance,
    indicator,
    laplacian_apply,
    lift_radial,
    lp_norm,
    mean_apply,
    radial_convolve,
    random_tree_function,
    root,
    sphere,
    sphere_size,
)

from oracles import brute_convolve, explicit_ball, graph_distances


def words(Q, max_len):
    first = st.integers(0, Q)
    rest = st.lists(st.integers(0, Q - 1), max_size=max_len - 1)
    return st.one_of(st.just(()), st.tuples(first, rest).map(lambda t: (t[0],) + tuple(t[1])))


@pytest.mark.parametrize("Q,n,expected", [(2, 0, 1), (2, 1, 3), (3, 2, 12), (4, 3, 80)])
def test_sphere_size_examples(Q, n, expected):
    assert sphere_size(Q, n) == expected


def test_distance_examples():
    x0 = root(2)
    assert distance(x0, x0) == 0
    assert distance(x0, Vertex((2, 1, 0), 2)) == 3
    assert distance(Vertex((0, 1), 2), Vertex((0, 0, 1), 2)) == 3


def test_distance_mismatched_q():
    with pytest.raises(ParameterError):
        distance(Vertex((0,), 2), Vertex((0,), 3))


@pytest.mark.parametrize("Q", [2, 3])
def test_distance_matches_graph_search_exhaustively(Q):
    depth = 5 if Q == 2 else 4
    verts, _, adj = explicit_ball(Q, depth)
    d = graph_distances(adj, list(range(len(verts))))
    for i, x in enumerate(verts):
        for j, y in enumerate(verts):
            assert distance(x, y) == d[i, j]


@given(st.data())
def test_distance_is_a_metric(data):
    Q = data.draw(st.integers(2, 5))
    x, y, z = (Vertex(data.draw(words(Q, 7)), Q) for _ in range(3))
    assert distance(x, y) == distance(y, x)
    assert (distance(x, y) == 0) == (x == y)
    assert distance(x, z) <= distance(x, y) + distance(y, z)


def test_invalid_labels():
    with pytest.raises(ParameterError):
        Vertex((3,), 2)
    with pytest.raises(ParameterError):
        Vertex((0, 2), 2)
    Vertex((2, 1), 2)


def test_params_validation():
    with pytest.raises(ParameterError):
        TreeParams(1, 3)
    with pytest.raises(ParameterError):
        TreeParams(2, 0)


@pytest.mark.parametrize("Q,depth", [(2, 6), (3, 4), (5, 3)])
def test_ball_matches_explicit_construction(Q, depth):
    params = TreeParams(Q, depth)
    got = list(ball(params))
    assert got == sorted(got)
    assert sorted(got) == sorted(explicit_ball(Q, depth)[0])
    assert len(got) == params.ball_size()


def test_sphere_examples():
    params = TreeParams(2, 4)
    x0 = root(2)
    assert sphere(params, x0, 0) == [x0]
    assert len(sphere(params, x0, 2)) == 6
    s = sphere(params, Vertex((1,), 2), 1)
    assert len(s) == 3 and x0 in s


@pytest.mark.parametrize("Q", [2, 3])
def test_sphere_homogeneity(Q):
    params = TreeParams(Q, 5)
    for x in ball(params, 2):
        for n in range(0, 5 - len(x) + 1):
            s = sphere(params, x, n)
            assert len(s) == sphere_size(Q, n)
            assert all(distance(x, y) == n for y in s)
            assert s == sorted(s)


def test_sphere_escape_raises():
    params = TreeParams(2, 3)
    with pytest.raises(TruncationError) as exc:
        sphere(params, Vertex((0, 1), 2), 2)
    assert exc.value.radius == 4


def test_lp_norm_examples():
    params = TreeParams(2, 3)
    d = delta(params)
    for p in (1, 2, 3.5, math.inf):
        assert lp_norm(d, p) == 1.0
    s1 = indicator(params, sphere(params, root(2), 1))
    assert lp_norm(s1, 1) == 3.0
    assert lp_norm(s1, 2) == pytest.approx(math.sqrt(3), rel=1e-15)
    with pytest.raises(ParameterError):
        lp_norm(d, 0.5)


def test_mean_examples():
    params = TreeParams(2, 3)
    md = mean_apply(delta(params))
    assert md.support() == [(Vertex((j,), 2), pytest.approx(1 / 3)) for j in range(3)]
    assert md.total() == pytest.approx(1.0, abs=1e-15)
    const = indicator(params, ball(params))
    interior = list(ball(params, 2))
    m = mean_apply(const, interior)
    assert max(abs(m[x] - 1.0) for x in interior) < 1e-15


def test_laplacian_examples():
    params = TreeParams(2, 3)
    ld = laplacian_apply(delta(params))
    assert ld[root(2)] == 1.0
    for j in range(3):
        assert ld[Vertex((j,), 2)] == pytest.approx(-1 / 3)
    assert abs(ld.total()) < 1e-15
    const = indicator(params, ball(params))
    interior = list(ball(params, 2))
    lc = laplacian_apply(const, interior)
    assert max(abs(lc[x]) for x in interior) < 1e-15


def test_mean_boundary_raises():
    params = TreeParams(2, 3)
    with pytest.raises(TruncationError):
        mean_apply(delta(params, Vertex((0, 0, 0), 2)))
    with pytest.raises(TruncationError):
        mean_apply(delta(params), [Vertex((0, 0, 0), 2)])


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_mean_preserves_mass(Q, seed):
    params = TreeParams(Q, 5)
    f = random_tree_function(params, 3, np.random.default_rng(seed))
    scale = sum(abs(v) for _, v in f.items())
    assert abs(mean_apply(f).total() - f.total()) <= 1e-13 * scale
    assert abs(laplacian_apply(f).total()) <= 1e-13 * scale


def test_mean_matches_matrix_oracle():
    from oracles import mean_matrix

    Q, depth = 3, 4
    params = TreeParams(Q, depth)
    f = random_tree_function(params, 3, np.random.default_rng(1))
    verts, index, M = mean_matrix(Q, depth)
    vec = np.array([f[v] for v in verts])
    ref = M @ vec
    got = mean_apply(f)
    for v in ball(params, 3):
        assert abs(got[v] - ref[index[v]]) < 1e-15


def test_convolution_examples():
    params = TreeParams(2, 6)
    k = RadialFunction(2, [0.7, -0.2, 0.1, 0.05])
    out = radial_convolve(delta(params), k)
    for x in ball(params, 3):
        assert out[x] == k(len(x))
    f = random_tree_function(params, 2, np.random.default_rng(0))
    ident = radial_convolve(f, RadialFunction(2, [1.0]), ball(params, 4))
    assert all(ident[x] == f[x] for x in ball(params, 4))


def test_convolution_frozen_value():
    # k(n) = 2^-n against the indicator of S(x0, 1), evaluated at x0
    params = TreeParams(2, 5)
    s1 = indicator(params, sphere(params, root(2), 1))
    k = RadialFunction(2, [2.0**-n for n in range(5)])
    assert radial_convolve(s1, k, [root(2)])[root(2)] == 1.5
    f = {y: 1.0 for y in sphere(params, root(2), 1)}
    assert brute_convolve(2, 5, f, k, root(2)) == 1.5


@given(st.integers(0, 2**32 - 1))
def test_convolution_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    Q, depth, N = 2, 6, 3
    params = TreeParams(Q, depth)
    f = random_tree_function(params, 2, rng)
    k = RadialFunction(Q, rng.normal(size=N + 1))
    pts = list(ball(params, depth - N))
    x = pts[int(rng.integers(len(pts)))]
    got = radial_convolve(f, k, [x])[x]
    ref = brute_convolve(Q, depth, dict(f.items()), k, x)
    assert abs(got - ref) < 1e-12


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(itertools.permutations(range(3)))))
def test_convolution_commutes_with_branch_permutation(seed, perm):
    rng = np.random.default_rng(seed)
    params = TreeParams(2, 6)
    f = random_tree_function(params, 2, rng)
    k = RadialFunction(2, rng.normal(size=4))
    a = radial_convolve(f, k).permute_branches(perm)
    b = radial_convolve(f.permute_branches(perm), k)
    assert set(a.entries) == set(b.entries)
    for x in a.entries:
        assert abs(a[x] - b[x]) < 1e-13


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_convolution_is_bilinear(seed, a, b):
    rng = np.random.default_rng(seed)
    params = TreeParams(3, 4)
    f = random_tree_function(params, 1, rng)
    g = random_tree_function(params, 2, rng)
    k1 = RadialFunction(3, rng.normal(size=3))
    k2 = RadialFunction(3, rng.normal(size=3))
    pts = list(ball(params, 2))
    lhs = radial_convolve(f.scale(a) + g.scale(b), k1, pts)
    rhs = radial_convolve(f, k1, pts).scale(a) + radial_convolve(g, k1, pts).scale(b)
    k12 = RadialFunction(3, a * k1.values + b * k2.values)
    lhs2 = radial_convolve(f, k12, pts)
    rhs2 = radial_convolve(f, k1, pts).scale(a) + radial_convolve(f, k2, pts).scale(b)
    for x in pts:
        assert abs(lhs[x] - rhs[x]) < 1e-12
        assert abs(lhs2[x] - rhs2[x]) < 1e-12


def test_convolution_truncation_reports_radius():
    params = TreeParams(2, 4)
    k = RadialFunction(2, np.ones(3))
    with pytest.raises(TruncationError) as exc:
        radial_convolve(delta(params), k, [Vertex((0, 0, 0), 2)])
    assert exc.value.radius == 5
    with pytest.raises(TruncationError):
        radial_convolve(delta(params), RadialFunction(2, np.ones(6)))


def test_convolution_is_deterministic():
    params = TreeParams(3, 5)
    f = random_tree_function(params, 2, np.random.default_rng(5))
    k = RadialFunction(3, np.random.default_rng(6).normal(size=3))
    a = radial_convolve(f, k)
    b = radial_convolve(f, k)
    assert all(a[x] == b[x] for x in a.entries)


def test_tree_function_rejects_foreign_vertices():
    params = TreeParams(2, 2)
    with pytest.raises(ParameterError):
        TreeFunction(params, {Vertex((0,), 3): 1.0})
    with pytest.raises(TruncationError):
        TreeFunction(params, {Vertex((0, 0, 0), 2): 1.0})


def test_radial_function_norms():
    k = RadialFunction(2, [1.0, 0.5, 0.25])
    assert k.l2_norm_squared() == 1 + 3 * 0.25 + 6 * 0.0625
    assert k.mass() == 1 + 1.5 + 1.5
    assert k(7) == 0.0
    lifted = lift_radial(TreeParams(2, 3), k)
    assert lifted.total() == pytest.approx(k.mass())
