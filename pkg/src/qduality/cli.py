"""Command-line front end.

    qduality analyze --state werner --R 0.8
    qduality verify --trials 10000 --seed 7
    qduality filter --state pure --schmidt 0.8

Exit codes: 0 ok, 1 duality violation (or filtering did not converge),
2 unreadable or invalid state file, 3 bad parameters, 4 singular marginal.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .bell import bell_max, is_entangled, normal_form
from .errors import BadParameter, BadProbabilities, NotDensityMatrix, SingularMarginal
from .filtering import filter_to_bell_diagonal
from .harness import same_meter_sweep, saturation_search, sweep_random
from .knowledge import distinguishability_excess
from .measurement import MeasurementAxis
from .states import (
    bell_mixture,
    bell_weights,
    bloch_decompose,
    depolarized_state,
    loads_state,
    pure_schmidt,
    random_state,
    state_to_dict,
    werner,
)

EXIT_OK, EXIT_VIOLATION, EXIT_BAD_FILE, EXIT_BAD_PARAM, EXIT_SINGULAR = 0, 1, 2, 3, 4
SEED_ENV = "QDUALITY_SEED"
FAMILIES = ("werner", "depolarized", "bell-mixture", "pure", "random", "file")


class BadStateFile(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    state: str | None = None
    params: dict = field(default_factory=dict)
    path: str | None = None
    seed: int = 0
    trials: int = 1000
    tol: float = 1e-8
    max_iter: int = 200
    workers: int = 1
    fmt: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise BadParameter(f"--trials must be >= 1, got {self.trials}")
        if self.tol <= 0:
            raise BadParameter("--tol must be positive")
        if self.max_iter < 1 or self.workers < 1:
            raise BadParameter("--max-iter and --workers must be >= 1")
        if self.state == "file" and not self.path:
            raise BadParameter("--state file needs --path")


def _need(cfg, key):
    value = cfg.params.get(key)
    if value is None:
        raise BadParameter(f"--state {cfg.state} needs --{key.replace('_', '-')}")
    return value


def resolve_state(cfg: RunConfig):
    fam = cfg.state
    if fam == "werner":
        return werner(_need(cfg, "R")), f"werner(R={cfg.params['R']})"
    if fam == "depolarized":
        r1, r2 = _need(cfg, "R1"), _need(cfg, "R2")
        return depolarized_state(r1, r2), f"depolarized(R1={r1}, R2={r2})"
    if fam == "bell-mixture":
        p = _need(cfg, "p")
        if len(p) != 4:
            raise BadProbabilities("--p needs four comma-separated weights")
        return bell_mixture(*p), f"bell_mixture(p={p})"
    if fam == "pure":
        lam = _need(cfg, "schmidt")
        return pure_schmidt(lam), f"pure(schmidt={lam})"
    if fam == "random":
        rank = cfg.params.get("rank") or 4
        return random_state(cfg.seed, rank), f"random(seed={cfg.seed}, rank={rank})"
    if fam == "file":
        try:
            with open(cfg.path) as fh:
                text = fh.read()
            return loads_state(text), f"file({cfg.path})"
        except (OSError, NotDensityMatrix) as exc:
            raise BadStateFile(str(exc)) from exc
    raise BadParameter(f"unknown state family {fam!r}")


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _matrix_dict(a):
    a = np.asarray(a)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def cmd_analyze(cfg: RunConfig) -> tuple[dict, int]:
    s, label = resolve_state(cfg)
    b = bloch_decompose(s)
    nf = normal_form(s)
    z_dir, x_dir = MeasurementAxis.from_vector(nf.o_S[2]), MeasurementAxis.from_vector(nf.o_S[0])
    sat = saturation_search(s, label)
    bmax = bell_max(s)
    report = {
        "state_label": label,
        "state": state_to_dict(s),
        "n": b.n,
        "m": b.m,
        "T": b.T,
        "normal_form": {"tbar": nf.tbar, "nbar": nf.nbar, "mbar": nf.mbar},
        "bell_max": bmax,
        "delta_D": distinguishability_excess(s, z_dir),
        "delta_D_prime": distinguishability_excess(s, x_dir),
        "a_S": z_dir.a,
        "a_S_prime": x_dir.a,
        "duality": sat.to_dict(),
        "bell_violating": bmax > 2 + 1e-12,
        "entangled": is_entangled(s),
    }
    return _plain(report), EXIT_OK


def cmd_verify(cfg: RunConfig, records=None) -> tuple[dict, int]:
    sweeps = {
        "random_axes": sweep_random(cfg.trials, cfg.seed, "random_axes", cfg.workers, records),
        "optimal_axes": sweep_random(cfg.trials, cfg.seed, "optimal_axes", cfg.workers, records),
        "same_meter": same_meter_sweep(cfg.trials, cfg.seed, cfg.workers),
    }
    violations = sum(sw.violations for sw in sweeps.values())
    report = {"seed": cfg.seed, "trials": cfg.trials, "violations": violations,
              **{k: v.to_dict() for k, v in sweeps.items()}}
    return _plain(report), EXIT_OK if violations == 0 else EXIT_VIOLATION


def cmd_filter(cfg: RunConfig) -> tuple[dict, int]:
    s, label = resolve_state(cfg)
    out = filter_to_bell_diagonal(s, tol=cfg.tol, max_iter=cfg.max_iter)
    report = {
        "state_label": label,
        "filter_S": _matrix_dict(out.total_filter_S.f),
        "filter_M": _matrix_dict(out.total_filter_M.f),
        "success_prob": out.success_prob,
        "iterations": out.iterations,
        "converged": out.converged,
        "bell_before": out.bell_before,
        "bell_after": out.bell_after,
        "bell_weights": bell_weights(out.state),
        "state": state_to_dict(out.state),
    }
    return _plain(report), EXIT_OK if out.converged else EXIT_VIOLATION


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, json.dumps(v) if isinstance(v, list) else v


def render(report: dict, fmt: str, records=None) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2)
    buf = io.StringIO()
    if fmt == "csv":
        if records:
            writer = csv.DictWriter(buf, fieldnames=list(records[0].keys()), extrasaction="ignore")
            writer.writeheader()
            for row in records:
                writer.writerow({k: json.dumps(v) if isinstance(v, (list, tuple)) else v for k, v in row.items()})
        else:
            writer = csv.writer(buf)
            writer.writerow(["key", "value"])
            writer.writerows(_flatten(report))
        return buf.getvalue().rstrip("\n")
    for key, value in _flatten(report):
        if key.startswith("state.") or key.startswith("filter_"):
            continue
        if isinstance(value, float):
            value = f"{value:.10g}"
        buf.write(f"{key:32s} {value}\n")
    return buf.getvalue().rstrip("\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_PARAM, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "pretty"), default="json")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", choices=FAMILIES, required=True)
    state.add_argument("--R", type=float)
    state.add_argument("--R1", type=float)
    state.add_argument("--R2", type=float)
    state.add_argument("--p", type=_floats, help="Bell weights p1,p2,p3,p4 (Psi-, Phi-, Psi+, Phi+)")
    state.add_argument("--schmidt", type=float, help="lambda in sqrt(lambda)|VH> - sqrt(1-lambda)|HV>")
    state.add_argument("--rank", type=int, choices=(1, 2, 3, 4))
    state.add_argument("--path", help="JSON state file with 're' and 'im' 4x4 arrays")

    parser = _Parser(prog="qduality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("analyze", parents=[common, state], help="Bloch form, normal form, Bell factor, excesses")
    v = sub.add_parser("verify", parents=[common], help="Monte Carlo sweeps of both duality relations")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--workers", type=int, default=1)
    f = sub.add_parser("filter", parents=[common, state], help="filter to Bell-diagonal form")
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--max-iter", type=int, default=200)
    return parser


def config_from_args(ns) -> RunConfig:
    seed = ns.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError as exc:
            raise BadParameter(f"${SEED_ENV} must be an integer, got {env!r}") from exc
    params = {k: getattr(ns, k, None) for k in ("R", "R1", "R2", "p", "schmidt", "rank")}
    return RunConfig(
        command=ns.command,
        state=getattr(ns, "state", None),
        params=params,
        path=getattr(ns, "path", None),
        seed=seed,
        trials=getattr(ns, "trials", 1000),
        tol=getattr(ns, "tol", 1e-8),
        max_iter=getattr(ns, "max_iter", 200),
        workers=getattr(ns, "workers", 1),
        fmt=ns.fmt,
    )


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    records = None
    try:
        cfg = config_from_args(ns)
        if cfg.command == "analyze":
            report, code = cmd_analyze(cfg)
        elif cfg.command == "verify":
            records = [] if cfg.fmt == "csv" else None
            report, code = cmd_verify(cfg, records)
        else:
            report, code = cmd_filter(cfg)
    except BadStateFile as exc:
        print(f"qduality: invalid state file: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    except SingularMarginal as exc:
        print(f"qduality: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (BadParameter, BadProbabilities) as exc:
        print(f"qduality: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAM
    print(render(report, cfg.fmt, records))
    if code == EXIT_VIOLATION and cfg.command == "verify":
        for name in ("random_axes", "optimal_axes", "same_meter"):
            for off in report[name]["offenders"]:
                print(f"violation in {name}: {json.dumps(off)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
