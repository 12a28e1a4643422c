"""Command-line driver: ``treeharmonic {verify,kernel,converge,heat,maximal}``.

Every CSV starts with ``# config: <json>`` and uses 17 significant digits.
Exit codes: 0 success, 1 check failure, 2 config error, 3 numerical budget.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import checks
from .errors import ParameterError, ResolutionError, ToleranceError, TruncationError
from .heat import dense_subspace_experiment
from .quadrature import periodic_grid
from .riesz import (
    RieszParams,
    comparison_kernel,
    decay_constant,
    kernel_report,
    maximal_apply,
    riesz_apply,
)
from .spectral import SpectralParams
from .tree import TreeParams, ball, delta, radial_convolve, random_tree_function

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
COMMANDS = ("verify", "kernel", "converge", "heat", "maximal")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    q: int = 2
    depth: int = 12
    nodes: int = 512
    series_cutoff: int = 60
    z_re: float = 1.0
    z_im: float = 0.0
    r_min: float = 2.0
    r_max: float = 16384.0
    r_steps: int = 14
    tolerance: float = 1e-8
    output: str | None = None
    seed: int = 0
    kernel_shells: int = 30
    split_kinks: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.q < 2:
            raise ConfigError("q must be >= 2")
        if self.depth < 1 or self.nodes < 8 or self.nodes % 2 or self.series_cutoff < 0:
            raise ConfigError("depth >= 1, nodes even and >= 8, series-cutoff >= 0 required")
        if not self.z_re > 0:
            raise ConfigError(f"Riesz order needs z-re > 0, got {self.z_re}")
        if self.r_steps < 1 or not self.r_min > 0 or self.r_max < self.r_min:
            raise ConfigError("R grid needs r-steps >= 1 and 0 < r-min <= r-max")
        if self.r_min < 2 and not self.split_kinks:
            raise ConfigError("r-min < 2 requires --split-kinks")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.kernel_shells < 0:
            raise ConfigError("kernel-shells must be >= 0")

    @property
    def z(self) -> complex:
        return complex(self.z_re, self.z_im)

    def r_grid(self) -> list[float]:
        if self.r_steps == 1:
            return [self.r_min]
        ratio = self.r_max / self.r_min
        return [self.r_min * ratio ** (i / (self.r_steps - 1)) for i in range(self.r_steps)]

    def canonical(self) -> str:
        """Sorted-key JSON of every computational field (the output path is not one)."""
        d = asdict(self)
        d.pop("output")
        return json.dumps(d, sort_keys=True, separators=(",", ":"))


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.16e}"


def render_csv(config: ExperimentConfig, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# config: {config.canonical()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path: str | os.PathLike, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit(config: ExperimentConfig, text: str):
    if config.output:
        write_atomic(config.output, text)
    else:
        sys.stdout.write(text)


def cmd_verify(config: ExperimentConfig) -> int:
    results = checks.run_all(config.q, config.nodes, config.series_cutoff, config.tolerance)
    rows = [[c.check_id, c.observed, c.bound, c.passed] for c in results]
    text = render_csv(config, ["check_id", "observed", "bound", "pass"], rows)
    if config.output:
        write_atomic(config.output, text)
    failed = [c for c in results if not c.passed]
    for c in results:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.check_id:<34} observed={c.observed:.3e} bound={c.bound:.3e}")
    if failed:
        print(f"first failing check: {failed[0].check_id}", file=sys.stderr)
        print(f"{len(failed)} of {len(results)} checks failed")
        return EXIT_CHECK
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _z_tag(z: complex) -> str:
    return f"{z.real:g}{z.imag:+g}i"


def cmd_kernel(config: ExperimentConfig) -> int:
    sp = SpectralParams(config.q)
    grid = periodic_grid(sp, config.nodes)
    N = config.kernel_shells
    bound = decay_constant(config.q) + min(1e-8, config.tolerance)
    outdir = Path(config.output or "kernels")
    status = EXIT_OK
    for R in config.r_grid():
        rep = kernel_report(RieszParams(config.z, R), sp, grid, N, config.series_cutoff)
        disc = np.abs(rep.kernel.values - rep.abel.values)
        budget = rep.kernel.error_bound + rep.abel.error_bound
        rows = [
            [n, rep.kernel.values[n].real, rep.kernel.values[n].imag, rep.decay_ratio[n], disc[n], budget]
            for n in range(N + 1)
        ]
        header = ["n", "re_kappa", "im_kappa", "decay_ratio", "route_discrepancy", "error_budget"]
        write_atomic(outdir / f"kernel_q{config.q}_z{_z_tag(config.z)}_R{R:.6g}.csv", render_csv(config, header, rows))
        if rep.empirical_constant > bound or rep.cross_check_error > min(1e-8, config.tolerance):
            print(f"R={R:g}: decay {rep.empirical_constant:.6g} (bound {bound:.6g}), "
                  f"route discrepancy {rep.cross_check_error:.3e}", file=sys.stderr)
            status = EXIT_CHECK
    return status


def _test_functions(config: ExperimentConfig, params: TreeParams):
    rng = np.random.default_rng(config.seed)
    return [("delta", delta(params)), ("random", random_tree_function(params, 2, rng))]


def cmd_converge(config: ExperimentConfig) -> int:
    N = min(config.kernel_shells, config.depth // 2)
    params = TreeParams(config.q, config.depth)
    radius = config.depth - N
    grid = periodic_grid(SpectralParams(config.q), config.nodes)
    pts = list(ball(params, radius))
    rows = []
    for label, f in _test_functions(config, params):
        for R in config.r_grid():
            s = riesz_apply(RieszParams(config.z, R), f, N, pts, grid)
            for shell in range(radius + 1):
                on = [x for x in pts if len(x) == shell]
                err = max(abs(s[x] - f[x]) for x in on)
                budget = max(s.error_bounds[x] for x in on)
                rows.append([label, R, shell, err, budget])
    emit(config, render_csv(config, ["function", "R", "x_shell", "abs_error", "error_budget"], rows))
    return EXIT_OK


def cmd_heat(config: ExperimentConfig) -> int:
    params = TreeParams(config.q, config.depth)
    grid = periodic_grid(SpectralParams(config.q), config.nodes)
    f = delta(params)
    radius = max(1, config.depth // 2)
    table = dense_subspace_experiment(
        f,
        [(1.0, 1.0), (0.1, 10.0), (0.01, 100.0), (0.001, 1000.0)],
        [1.0, 2.0, math.inf],
        config.r_grid(),
        config.z,
        radius=radius,
        grid=grid,
    )
    header = ["kind", "s", "t", "param", "vertex", "value", "error_budget"]
    rows = [[r[k] for k in header] for r in table]
    emit(config, render_csv(config, header, rows))
    return EXIT_OK


def cmd_maximal(config: ExperimentConfig) -> int:
    params = TreeParams(config.q, config.depth)
    rng = np.random.default_rng(config.seed)
    f = random_tree_function(params, 2, rng)
    N = min(config.kernel_shells, config.depth // 2)
    pts = list(ball(params, config.depth - N))
    grid = periodic_grid(SpectralParams(config.q), config.nodes)
    smax = maximal_apply(config.z, config.r_grid(), f, N, pts, grid)
    dom = radial_convolve(f.abs(), comparison_kernel(config.q, N), pts)
    C = decay_constant(config.q)
    rows = []
    status = EXIT_OK
    for x in pts:
        # far support points are dropped from S_R f; their worst case sits in the budget
        bound = C * dom[x].real + smax.error_bounds[x]
        rows.append(["".join(map(str, x.word)) or "x0", len(x), smax[x].real, bound, smax[x].real <= bound + 1e-12])
        if smax[x].real > bound + 1e-12:
            status = EXIT_CHECK
    emit(config, render_csv(config, ["vertex", "x_shell", "maximal", "domination_bound", "pass"], rows))
    return status


HANDLERS = {
    "verify": cmd_verify,
    "kernel": cmd_kernel,
    "converge": cmd_converge,
    "heat": cmd_heat,
    "maximal": cmd_maximal,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeharmonic", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    d = ExperimentConfig("verify")
    p.add_argument("--q", type=int, default=d.q, help="branching number Q (degree Q+1)")
    p.add_argument("--depth", type=int, default=d.depth, help="radius of the materialized ball")
    p.add_argument("--nodes", type=int, default=d.nodes, help="quadrature nodes M")
    p.add_argument("--series-cutoff", type=int, default=d.series_cutoff, help="Abel series cutoff K")
    p.add_argument("--z-re", type=float, default=d.z_re)
    p.add_argument("--z-im", type=float, default=d.z_im)
    p.add_argument("--r-min", type=float, default=d.r_min)
    p.add_argument("--r-max", type=float, default=d.r_max)
    p.add_argument("--r-steps", type=int, default=d.r_steps)
    p.add_argument("--tolerance", type=float, default=d.tolerance)
    p.add_argument("--output", default=None, help="CSV path (directory for 'kernel')")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--kernel-shells", type=int, default=d.kernel_shells)
    p.add_argument("--split-kinks", action="store_true", help="allow R < 2 via kink-split quadrature")
    return p


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(**{k: v for k, v in vars(ns).items()})
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        config = config_from_args(ns)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return HANDLERS[config.command](config)
    except (TruncationError, ResolutionError, ToleranceError) as exc:
        print(f"numerical budget failure: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
