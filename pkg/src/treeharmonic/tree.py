"""Geometry and counting measure of the homogeneous tree of degree Q+1.

Vertices are words over edge labels read from the base point x0: the first
label picks one of the Q+1 neighbours of x0, every later label picks one of
the Q forward (non-backtracking) neighbours.  With this encoding the distance
is |x| + |y| - 2 lcp(x, y) and no adjacency structure is ever stored.

Only a ball of radius ``depth`` around x0 is "materialized".  Operators that
would need a vertex outside it raise :class:`TruncationError`; nothing is
silently zero-padded.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ParameterError, TruncationError


@dataclass(frozen=True)
class TreeParams:
    Q: int
    depth: int

    def __post_init__(self):
        if int(self.Q) != self.Q or self.Q < 2:
            raise ParameterError(f"branching number Q must be an integer >= 2, got {self.Q}")
        if int(self.depth) != self.depth or self.depth < 1:
            raise ParameterError(f"depth must be an integer >= 1, got {self.depth}")

    def ball_size(self, radius: int | None = None) -> int:
        r = self.depth if radius is None else radius
        return 1 + (self.Q + 1) * (self.Q**r - 1) // (self.Q - 1)


@dataclass(frozen=True, order=True)
class Vertex:
    word: tuple[int, ...]
    q: int = field(compare=False)

    def __post_init__(self):
        word = tuple(int(a) for a in self.word)
        object.__setattr__(self, "word", word)
        for i, a in enumerate(word):
            upper = self.q + 1 if i == 0 else self.q
            if not 0 <= a < upper:
                raise ParameterError(f"label {a} at position {i} out of range for Q={self.q}")

    def __len__(self):
        return len(self.word)

    @property
    def norm(self) -> int:
        """|x| = d(x, x0)."""
        return len(self.word)

    def parent(self) -> Vertex | None:
        if not self.word:
            return None
        return Vertex(self.word[:-1], self.q)

    def children(self) -> list[Vertex]:
        width = self.q + 1 if not self.word else self.q
        return [Vertex(self.word + (j,), self.q) for j in range(width)]

    def neighbors(self) -> list[Vertex]:
        p = self.parent()
        return ([p] if p is not None else []) + self.children()

    def __repr__(self):
        return f"Vertex({list(self.word)})"


def root(Q: int) -> Vertex:
    return Vertex((), Q)


def sphere_size(Q: int | TreeParams, n: int) -> int:
    """Number of vertices at distance n from any vertex."""
    if isinstance(Q, TreeParams):
        Q = Q.Q
    if n < 0:
        raise ParameterError("shell index must be >= 0")
    return 1 if n == 0 else (Q + 1) * Q ** (n - 1)


def _lcp(a: Sequence[int], b: Sequence[int]) -> int:
    m = min(len(a), len(b))
    i = 0
    while i < m and a[i] == b[i]:
        i += 1
    return i


def distance(x: Vertex, y: Vertex) -> int:
    if x.q != y.q:
        raise ParameterError(f"vertices belong to different trees (Q={x.q} vs Q={y.q})")
    return len(x.word) + len(y.word) - 2 * _lcp(x.word, y.word)


def ball(params: TreeParams, radius: int | None = None) -> Iterator[Vertex]:
    """All vertices with |x| <= radius, in lexicographic word order."""
    r = params.depth if radius is None else radius
    if r > params.depth:
        raise TruncationError(f"ball of radius {r} exceeds depth {params.depth}", radius=r)
    if r < 0:
        return
    Q = params.Q

    def walk(word):
        yield Vertex(word, Q)
        if len(word) < r:
            width = Q + 1 if not word else Q
            for j in range(width):
                yield from walk(word + (j,))

    yield from walk(())


def sphere(params: TreeParams, x: Vertex, n: int) -> list[Vertex]:
    """Vertices at distance exactly n from x, found by BFS inside the ball."""
    if x.q != params.Q:
        raise ParameterError("vertex and tree parameters disagree on Q")
    if len(x) + n > params.depth:
        raise TruncationError(
            f"S(x, {n}) with |x|={len(x)} escapes the depth-{params.depth} ball",
            radius=len(x) + n,
        )
    seen = {x}
    frontier = [x]
    for _ in range(n):
        nxt = []
        for v in frontier:
            for w in v.neighbors():
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(frontier)


def bfs_distances(params: TreeParams, x: Vertex) -> dict[Vertex, int]:
    """Shortest-path lengths from x to every ball vertex, using ball edges only."""
    dist = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for w in v.neighbors():
            if len(w) <= params.depth and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


@dataclass
class RadialFunction:
    """f(x) = values[|x|] for |x| <= N, zero (or ``tail_ratio``-geometric) beyond.

    ``error_bound`` is the sup-norm error budget attached by the routine that
    produced the values.  ``tail_ratio`` (optional) declares that the function
    continues past N as values[N] * tail_ratio**(n - N); it is used only by
    closed-form norm tails.
    """

    q: int
    values: np.ndarray
    error_bound: float = 0.0
    tail_ratio: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        if self.values.size == 0:
            raise ParameterError("a radial function needs at least the n = 0 value")

    @property
    def N(self) -> int:
        return self.values.size - 1

    def __getitem__(self, n):
        return self.values[n]

    def __call__(self, n: int) -> complex:
        return complex(self.values[n]) if 0 <= n <= self.N else 0.0

    @classmethod
    def shell(cls, q: int, n: int, N: int | None = None) -> RadialFunction:
        """Indicator of the sphere S(x0, n)."""
        v = np.zeros((N if N is not None else n) + 1, dtype=complex)
        v[n] = 1.0
        return cls(q, v)

    def sphere_weights(self) -> np.ndarray:
        return np.array([sphere_size(self.q, n) for n in range(self.N + 1)], dtype=float)

    def l2_norm_squared(self) -> float:
        """Tree-side ||f||_2^2 = |f(0)|^2 + sum (Q+1) Q^(n-1) |f(n)|^2."""
        return float(np.sum(self.sphere_weights() * np.abs(self.values) ** 2))

    def mass(self) -> complex:
        return complex(np.sum(self.sphere_weights() * self.values))


class TreeFunction:
    """Finitely supported function on the depth-D ball.

    Missing keys read as zero.  ``error_bounds`` optionally attaches a
    per-vertex absolute error budget.
    """

    def __init__(
        self,
        params: TreeParams,
        entries: Mapping[Vertex, complex] | None = None,
        error_bounds: Mapping[Vertex, float] | None = None,
    ):
        self.params = params
        self.entries: dict[Vertex, complex] = {}
        self.error_bounds: dict[Vertex, float] = dict(error_bounds or {})
        for x, v in (entries or {}).items():
            if x.q != params.Q:
                raise ParameterError(f"vertex {x} built for Q={x.q}, tree has Q={params.Q}")
            if len(x) > params.depth:
                raise TruncationError(f"vertex {x} lies outside the depth-{params.depth} ball", radius=len(x))
            self.entries[x] = complex(v)

    def __getitem__(self, x: Vertex) -> complex:
        return self.entries.get(x, 0.0)

    def __len__(self):
        return len(self.entries)

    def items(self):
        return sorted(self.entries.items())

    def support(self) -> list[tuple[Vertex, complex]]:
        return [(x, v) for x, v in self.items() if v != 0]

    def support_radius(self) -> int:
        return max((len(x) for x, _ in self.support()), default=0)

    def total(self) -> complex:
        return sum((v for _, v in self.items()), 0j)

    def max_error(self) -> float:
        return max(self.error_bounds.values(), default=0.0)

    def _combine(self, other, op):
        keys = set(self.entries) | set(other.entries)
        return TreeFunction(self.params, {x: op(self[x], other[x]) for x in keys})

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def scale(self, c: complex) -> TreeFunction:
        return TreeFunction(self.params, {x: c * v for x, v in self.entries.items()})

    def abs(self) -> TreeFunction:
        return TreeFunction(self.params, {x: abs(v) for x, v in self.entries.items()})

    def permute_branches(self, perm: Sequence[int]) -> TreeFunction:
        """Relabel the first-level branches: an isometry fixing x0."""
        out = {}
        for x, v in self.entries.items():
            w = x.word
            out[Vertex((perm[w[0]],) + w[1:] if w else w, x.q)] = v
        return TreeFunction(self.params, out)

    def __repr__(self):
        return f"TreeFunction(Q={self.params.Q}, depth={self.params.depth}, nnz={len(self.support())})"


def delta(params: TreeParams, x: Vertex | None = None) -> TreeFunction:
    x = root(params.Q) if x is None else x
    return TreeFunction(params, {x: 1.0})


def indicator(params: TreeParams, vertices: Iterable[Vertex]) -> TreeFunction:
    return TreeFunction(params, {x: 1.0 for x in vertices})


def lift_radial(
    params: TreeParams, k: RadialFunction, vertices: Iterable[Vertex] | None = None
) -> TreeFunction:
    """Tree function x -> k(|x|) on the given vertices (default: ball of radius N)."""
    if vertices is None:
        vertices = ball(params, min(k.N, params.depth))
    return TreeFunction(params, {x: k(len(x)) for x in vertices})


def random_tree_function(params: TreeParams, radius: int, rng: np.random.Generator) -> TreeFunction:
    """Real values uniform in [-1, 1] on every vertex of ball(radius)."""
    verts = list(ball(params, radius))
    vals = rng.uniform(-1.0, 1.0, size=len(verts))
    return TreeFunction(params, dict(zip(verts, vals)))


def lp_norm(f: TreeFunction, p: float) -> float:
    """Counting-measure l^p norm; p = inf gives the sup norm."""
    if not p >= 1:
        raise ParameterError(f"l^p norm needs p >= 1, got {p}")
    vals = np.array([abs(v) for _, v in f.items()], dtype=float)
    if vals.size == 0:
        return 0.0
    if math.isinf(p):
        return float(vals.max())
    return float(np.sum(vals**p) ** (1.0 / p))


def mean_apply(f: TreeFunction, points: Iterable[Vertex] | None = None) -> TreeFunction:
    """(Mf)(x) = (1/(Q+1)) sum over the Q+1 neighbours y of x of f(y).

    Without ``points`` the whole image is produced by scattering each support
    value to its neighbours; that needs supp f inside depth D-1.  With
    ``points`` the sum is gathered at those vertices only, which must satisfy
    |x| <= D-1.
    """
    params = f.params
    Q = params.Q
    if points is None:
        r = f.support_radius()
        if r > params.depth - 1:
            raise TruncationError(
                f"support reaches radius {r}; mean operator needs it within depth {params.depth - 1}",
                radius=r,
            )
        out: dict[Vertex, complex] = {}
        for y, v in f.support():
            for x in y.neighbors():
                out[x] = out.get(x, 0j) + v / (Q + 1)
        return TreeFunction(params, out)

    out = {}
    for x in points:
        if len(x) > params.depth - 1:
            raise TruncationError(f"neighbours of {x} escape the depth-{params.depth} ball", radius=len(x) + 1)
        out[x] = sum((f[y] for y in x.neighbors()), 0j) / (Q + 1)
    return TreeFunction(params, out)


def laplacian_apply(f: TreeFunction, points: Iterable[Vertex] | None = None) -> TreeFunction:
    """L f = f - M f."""
    if points is not None:
        points = list(points)
    mf = mean_apply(f, points)
    if points is None:
        return f - mf
    return TreeFunction(f.params, {x: f[x] - mf[x] for x in points})


def radial_convolve(
    f: TreeFunction,
    k: RadialFunction,
    points: Iterable[Vertex] | None = None,
    tail: Callable[[int], float] | None = None,
) -> TreeFunction:
    """(f * k)(x) = sum_n k(n) sum_{y in S(x, n)} f(y).

    Evaluated at ``points`` (default: every x with |x| + N <= D, N the kernel
    range).  Each sphere sum is accumulated from supp f; shells are summed in
    ascending order and support vertices in lexicographic order, so results
    are bit-reproducible.

    ``tail(d)`` bounds |k(d)| for d > N; when given, support points farther
    than N from x contribute ``|f(y)| * tail(d)`` to the per-vertex error
    budget, alongside ``k.error_bound * sum |f|``.
    """
    params = f.params
    if k.q != params.Q:
        raise ParameterError(f"kernel built for Q={k.q}, function lives on Q={params.Q}")
    N = k.N
    if points is None:
        r = params.depth - N
        if r < 0:
            raise TruncationError(
                f"kernel range {N} exceeds depth {params.depth}; no vertex can be evaluated", radius=N
            )
        points = ball(params, r)
    support = f.support()
    words = [y.word for y, _ in support]
    vals = np.array([v for _, v in support], dtype=complex)
    absvals = np.abs(vals)
    kv = k.values
    tail_cache: dict[int, float] = {}
    out: dict[Vertex, complex] = {}
    budget: dict[Vertex, float] = {}
    for x in points:
        if x.q != params.Q:
            raise ParameterError("evaluation vertex built for a different Q")
        if len(x) + N > params.depth:
            raise TruncationError(
                f"evaluation at |x|={len(x)} with kernel range {N} needs radius {len(x) + N} > depth {params.depth}",
                radius=len(x) + N,
            )
        xw = x.word
        lx = len(xw)
        shell_sums = np.zeros(N + 1, dtype=complex)
        near_mass = 0.0
        far = 0.0
        for w, v, a in zip(words, vals, absvals):
            d = lx + len(w) - 2 * _lcp(xw, w)
            if d <= N:
                shell_sums[d] += v
                near_mass += a
            elif tail is not None:
                if d not in tail_cache:
                    tail_cache[d] = tail(d)
                far += a * tail_cache[d]
        total = 0j
        for n in range(N + 1):
            total += kv[n] * shell_sums[n]
        out[x] = total
        budget[x] = k.error_bound * near_mass + far
    return TreeFunction(params, out, budget)
