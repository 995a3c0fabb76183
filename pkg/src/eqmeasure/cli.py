"""Batch command-line interface.

Usage::

    eqmeasure {edges,density,verify,sample,ortho,sweep} --config job.json [--grid N] [--seed S] [--out PATH]

The job file is one JSON document::

    {
      "potential": {"kind": "polynomial", "coeffs": [0, 0, 1]},
      "sigma": 0, "tau": "inf",
      "grid": 200, "seed": 1,
      "gas": {"n": 8, "beta": 2, "sweeps": 201000, "burn_in": 1000, "step_scale": 0.5},
      "ortho": {"n": 7, "mu": 0},
      "sweep": {"parameter": "sigma", "start": -2, "stop": 1, "num": 31},
      "tolerances": {"mass": 1e-10},
      "weight_scale": 1.0
    }

``"poly_log"`` potentials read ``{"kind": "poly_log", "coeffs": [0, 0, 1],
"alpha": a}`` and mean ``Q(x) = x**2 - 2 a log(x)`` on ``[sigma, inf)``;
only the quadratic polynomial part is supported.  ``weight_scale`` multiplies
the weight polynomial before ``verify`` and exists to exercise the failure
path.

Exit codes: 0 ok, 1 configuration error, 2 solver failure, 3 verification
failure.  Numbers are written with 15 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import reference_families as rf
from .edge_solver import Barriers, EdgeClassification, SolverError, classify, solve_free_edges
from .gas import GasConfig, empirical_distance, run_chain
from .measure import MeasureError, build_measure, cdf, density_at
from .ortho import MAX_BASIS, build_basis, fn_density, limit_density
from .polycalc import Polynomial
from .verify import DEFAULT_TOLERANCES, run_diagnostics

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3
HIST_BINS = 64
DEFAULT_GRID = 200


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.15g}"


def _round15(x):
    if isinstance(x, float):
        return float(f"{x:.15g}") if math.isfinite(x) else fmt(x)
    if isinstance(x, dict):
        return {k: _round15(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round15(v) for v in x]
    return x


def dump_json(obj) -> str:
    return json.dumps(_round15(obj), ensure_ascii=False)


@dataclass
class JobConfig:
    kind: str
    coeffs: tuple[float, ...]
    alpha: float
    sigma: float
    tau: float
    grid: int = DEFAULT_GRID
    seed: int = 0
    gas: dict[str, Any] = field(default_factory=dict)
    ortho: dict[str, Any] = field(default_factory=dict)
    sweep: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    weight_scale: float = 1.0

    @property
    def potential(self) -> Polynomial:
        return Polynomial(self.coeffs)

    @property
    def barriers(self) -> Barriers:
        return Barriers(self.sigma, self.tau)


def _finite(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{name} must be finite")
    return v


def _barrier(value, name, literal, inf_value) -> float:
    if value is None:
        return inf_value
    if isinstance(value, str):
        if value == literal:
            return inf_value
        raise ConfigError(f'{name} must be a number or "{literal}", got {value!r}')
    return _finite(value, name)


def _int(value, name, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    v = int(value)
    if minimum is not None and v < minimum:
        raise ConfigError(f"{name} must be >= {minimum}")
    return v


def parse_config(doc: dict, grid: int | None = None, seed: int | None = None) -> JobConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    pot = doc.get("potential")
    if not isinstance(pot, dict) or "kind" not in pot:
        raise ConfigError('config needs a "potential" object with a "kind"')
    kind = pot["kind"]
    if kind not in ("polynomial", "poly_log"):
        raise ConfigError(f"unknown potential kind {kind!r}")
    coeffs = pot.get("coeffs")
    if not isinstance(coeffs, list) or not coeffs:
        raise ConfigError("potential.coeffs must be a nonempty list")
    coeffs = tuple(_finite(c, "coeff") for c in coeffs)
    alpha = 0.0
    if kind == "poly_log":
        alpha = _finite(pot.get("alpha"), "potential.alpha")
        if alpha < 0:
            raise ConfigError("potential.alpha must be nonnegative")
        if Polynomial(coeffs).coeffs != (0.0, 0.0, 1.0):
            raise ConfigError("poly_log potentials support only coeffs [0, 0, 1]")
    elif "alpha" in pot:
        raise ConfigError("alpha is only valid for poly_log potentials")
    sigma = _barrier(doc.get("sigma", "-inf"), "sigma", "-inf", -math.inf)
    tau = _barrier(doc.get("tau", "inf"), "tau", "inf", math.inf)
    if not sigma < tau:
        raise ConfigError(f"need sigma < tau, got sigma={sigma}, tau={tau}")
    job = JobConfig(kind, coeffs, alpha, sigma, tau)
    job.grid = _int(grid if grid is not None else doc.get("grid", DEFAULT_GRID), "grid", 2)
    job.seed = _int(seed if seed is not None else doc.get("seed", 0), "seed", 0)
    for block in ("gas", "ortho", "sweep", "tolerances"):
        val = doc.get(block, {})
        if not isinstance(val, dict):
            raise ConfigError(f"{block} must be an object")
        setattr(job, block, val)
    unknown = set(job.tolerances) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerance names {sorted(unknown)}")
    job.tolerances = {k: _finite(v, f"tolerances.{k}") for k, v in job.tolerances.items()}
    job.weight_scale = _finite(doc.get("weight_scale", 1.0), "weight_scale")
    return job


def _require_polynomial(job: JobConfig, command: str):
    if job.kind != "polynomial":
        raise ConfigError(f"{command} needs a polynomial potential")
    p = job.potential
    if p.degree < 2 or p.degree % 2 or p.coeffs[-1] <= 0:
        raise ConfigError("potential must have even degree >= 2 and positive leading coefficient")


def _logpot_classification(job: JobConfig) -> tuple[EdgeClassification, float, float]:
    if job.tau != math.inf:
        raise ConfigError("poly_log potentials support tau = inf only")
    if job.alpha > 0 and job.sigma < 0:
        raise ConfigError("poly_log potentials with alpha > 0 need sigma >= 0")
    if job.alpha > 0:
        a0, b0 = rf.solve_logpot_soft_edges(job.alpha)
    else:
        a0, b0 = -rf.SQRT2, rf.SQRT2
    return rf.logpot_classify(job.alpha, job.sigma), a0, b0


def _classification(job: JobConfig):
    if job.kind == "poly_log":
        return _logpot_classification(job)
    _require_polynomial(job, "edges")
    a0, b0 = solve_free_edges(job.potential)
    return classify(job.potential, job.barriers), a0, b0


def cmd_edges(job: JobConfig, out) -> int:
    cls, a0, b0 = _classification(job)
    out.write(dump_json({"case": cls.case.value, "a": cls.a, "b": cls.b, "a0": a0, "b0": b0}) + "\n")
    return EXIT_OK


def support_grid(cls: EdgeClassification, size: int) -> np.ndarray:
    """``size`` uniform points on the support with hard endpoints left out."""
    k = int(cls.case.hard_left) + int(cls.case.hard_right)
    xs = np.linspace(cls.a, cls.b, size + k)
    if cls.case.hard_left:
        xs = xs[1:]
    if cls.case.hard_right:
        xs = xs[:-1]
    return xs


def _write_csv(out, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    out.write(buf.getvalue())


def cmd_density(job: JobConfig, out) -> int:
    if job.kind == "poly_log":
        cls, _, _ = _logpot_classification(job)
        xs = support_grid(cls, job.grid)
        dens = rf.logpot_density(job.alpha, job.sigma, xs)
    else:
        _require_polynomial(job, "density")
        m = build_measure(job.potential, job.barriers)
        xs = support_grid(m.classification, job.grid)
        dens = density_at(m, xs)
    _write_csv(out, ["x", "density"], zip(xs, np.atleast_1d(dens)))
    return EXIT_OK


def cmd_verify(job: JobConfig, out) -> int:
    _require_polynomial(job, "verify")
    m = build_measure(job.potential, job.barriers)
    if job.weight_scale != 1.0:
        m = m.scaled(job.weight_scale)
    report = run_diagnostics(m, job.tolerances)
    out.write(dump_json(report.to_dict()) + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


def _gas_config(job: JobConfig) -> GasConfig:
    g = job.gas
    allowed = {"n", "beta", "sweeps", "burn_in", "step_scale"}
    unknown = set(g) - allowed
    if unknown:
        raise ConfigError(f"unknown gas fields {sorted(unknown)}")
    try:
        return GasConfig(
            n=_int(g.get("n", 8), "gas.n", 1),
            beta=_finite(g.get("beta", 2.0), "gas.beta"),
            sweeps=_int(g.get("sweeps", 10_000), "gas.sweeps", 1),
            burn_in=_int(g.get("burn_in", 1_000), "gas.burn_in", 0),
            step_scale=_finite(g.get("step_scale", 0.5), "gas.step_scale"),
            seed=job.seed,
            barriers=job.barriers,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_sample(job: JobConfig, out, summary) -> int:
    _require_polynomial(job, "sample")
    cfg = _gas_config(job)
    m = build_measure(job.potential, job.barriers)
    run = run_chain(job.potential, cfg)
    pts = run.samples.ravel()
    lo, hi = min(m.a, float(pts.min())), max(m.b, float(pts.max()))
    counts, edges = np.histogram(pts, bins=HIST_BINS, range=(lo, hi))
    width = edges[1] - edges[0]
    emp = counts / (pts.size * width)
    lim = np.diff(cdf(m, edges)) / width
    _write_csv(out, ["bin_left", "bin_right", "empirical_density", "limit_density"],
               zip(edges[:-1], edges[1:], emp, lim))
    ks = empirical_distance(run, m)
    summary.write(dump_json({
        "ks_distance": ks,
        "acceptance_rate": run.acceptance_rate,
        "n": cfg.n,
        "beta": cfg.beta,
        "kept_sweeps": len(run),
        "case": m.case.value,
        "a": m.a,
        "b": m.b,
    }) + "\n")
    return EXIT_OK


def cmd_ortho(job: JobConfig, out) -> int:
    o = job.ortho
    n = _int(o.get("n", 7), "ortho.n", 1)
    if n > MAX_BASIS:
        raise ConfigError(f"ortho.n must be <= {MAX_BASIS}")
    if "mu" in o:
        mu = _finite(o["mu"], "ortho.mu")
    elif job.kind == "poly_log":
        mu = job.alpha * n
    else:
        mu = 0.0
    if mu < 0:
        raise ConfigError("ortho.mu must be nonnegative")
    if job.kind == "polynomial" and (job.potential.coeffs != (0.0, 0.0, 1.0) or mu != 0):
        raise ConfigError("ortho with a polynomial potential needs coeffs [0, 0, 1] and mu = 0")
    alpha = mu / n
    cls = rf.logpot_classify(alpha, 0.0)
    upper = 1.25 * cls.b
    xs = np.linspace(0.0, upper, job.grid + 1)[1:]
    basis = build_basis(mu, n)
    _write_csv(out, ["x", "f_n", "f_limit"], zip(xs, fn_density(basis, xs), limit_density(alpha, xs)))
    return EXIT_OK


def cmd_sweep(job: JobConfig, out) -> int:
    s = job.sweep
    param = s.get("parameter", "sigma")
    if param not in ("sigma", "tau"):
        raise ConfigError('sweep.parameter must be "sigma" or "tau"')
    start = _finite(s.get("start"), "sweep.start")
    stop = _finite(s.get("stop"), "sweep.stop")
    num = _int(s.get("num", 11), "sweep.num", 1)
    rows = []
    for v in np.linspace(start, stop, num):
        sigma, tau = (v, job.tau) if param == "sigma" else (job.sigma, v)
        if not sigma < tau:
            raise ConfigError(f"sweep produces sigma >= tau at {param}={v}")
        sub = JobConfig(job.kind, job.coeffs, job.alpha, sigma, tau)
        cls, _, _ = _classification(sub)
        rows.append((sigma, tau, cls.case.value, cls.a, cls.b))
    _write_csv(out, ["sigma", "tau", "case", "a", "b"], rows)
    return EXIT_OK


COMMANDS = ("edges", "density", "verify", "sample", "ortho", "sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqmeasure", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="job JSON file ('-' for stdin)")
    parser.add_argument("--grid", type=int, help="grid size override")
    parser.add_argument("--seed", type=int, help="seed override")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--summary", help="JSON summary path for 'sample' (default: stderr)")
    return parser


def _load(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = parse_config(_load(args.config), grid=args.grid, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    buf = io.StringIO()
    summary = io.StringIO()
    try:
        if args.command == "edges":
            code = cmd_edges(job, buf)
        elif args.command == "density":
            code = cmd_density(job, buf)
        elif args.command == "verify":
            code = cmd_verify(job, buf)
        elif args.command == "sample":
            code = cmd_sample(job, buf, summary)
        elif args.command == "ortho":
            code = cmd_ortho(job, buf)
        else:
            code = cmd_sweep(job, buf)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, MeasureError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if summary.getvalue():
        if args.summary:
            with open(args.summary, "w", encoding="utf-8") as fh:
                fh.write(summary.getvalue())
        else:
            sys.stderr.write(summary.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
