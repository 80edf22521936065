"""Command-line front end: channel checks, process classification, tables.

Commands: check-channel, classify-process, trajectory, physicality,
amplification. Inputs are JSON files (schemas in the README); outputs are
JSON or CSV, written atomically when --out is given.

Exit codes: 0 success; 1 bad input or usage; 2 globally unphysical process;
3 numerical failure (singular X_t, quadrature breakdown).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import models
from .channels import GaussianMap, classify_positivity, is_cp
from .divisibility import (
    GaussianProcess,
    classify_process,
    trajectory,
    worker_count,
)
from .errors import QuadratureError, SingularMapError
from .models import (
    PiecewiseConstantRates,
    QbmParams,
    RateProfile,
    amplification_windows,
    damping_profile,
    is_physical,
    phase_insensitive_process,
    physicality_eigenvalues,
    physicality_integrals,
    qbm_process,
    qbm_rate_profile,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_UNPHYSICAL = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    command: str
    input_path: str
    grid: int = 400
    tol: float = 1e-9
    margin: float = 1e-6
    tau: float = 1e-4
    fd_step: float = 1e-4
    seed: int = 0
    fmt: str = "json"
    out: str | None = None

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError("--grid must be at least 2")
        if min(self.tol, self.margin, self.tau, self.fd_step) <= 0:
            raise ValueError("tolerances must be positive")


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gaussdiv",
                     description="Divisibility analysis of Gaussian processes")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "check-channel": "positivity class of a channel file",
        "classify-process": "markovian / weak / strong verdict of a process file",
        "trajectory": "rate-plane trajectory table of a process file",
        "physicality": "global-physicality eigenvalue table of a rate profile",
        "amplification": "sub-quantum-limit amplification windows of a rate profile",
    }
    defaults_fmt = {
        "check-channel": "json",
        "classify-process": "json",
        "trajectory": "csv",
        "physicality": "csv",
        "amplification": "json",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="path to the input JSON file")
        p.add_argument("--grid", type=int, default=400)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--margin", type=float, default=1e-6)
        p.add_argument("--tau", type=float, default=1e-4)
        p.add_argument("--fd-step", type=float, default=1e-4)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=["json", "csv"],
                       default=defaults_fmt[name], dest="fmt")
        p.add_argument("--out", default=None)
    return parser


def _write_output(text: str, out: str | None) -> None:
    """Write once, atomically (temp file + rename) or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".gaussdiv-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_path, out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_channel(spec: dict) -> GaussianMap:
    n = int(spec["n"])
    X = np.asarray(spec["X"], dtype=float)
    Y = np.asarray(spec["Y"], dtype=float)
    return GaussianMap(n, X, Y)


def load_process(spec: dict) -> tuple[GaussianProcess, RateProfile | None]:
    """Process plus its rate profile when the input is rate-generated."""
    kind = spec.get("type")
    if kind == "tabulated":
        proc = GaussianProcess.from_table(spec["times"], spec["X"], spec["Y"])
        return proc, None
    if kind == "rates":
        segments = [(s["t0"], s["t1"], s["eps"], s["mu"]) for s in spec["segments"]]
        profile = PiecewiseConstantRates(segments)
        return phase_insensitive_process(profile), profile
    if kind == "qbm":
        params = QbmParams(
            omega0=float(spec["omega0"]),
            omega_c=float(spec["omega_c"]),
            alpha=float(spec["alpha"]),
            T_bath=float(spec.get("T_bath", 0.0)),
            horizon=float(spec["horizon"]) if "horizon" in spec else None,
        )
        return qbm_process(params), qbm_rate_profile(params)
    if kind == "damping":
        profile = damping_profile(
            gamma=float(spec["gamma"]),
            nu_inf=float(spec.get("nu_inf", 0.5)),
            horizon=float(spec.get("horizon", 10.0)),
        )
        return phase_insensitive_process(profile), profile
    raise ValueError(f"unknown process type: {kind!r}")


def _require_profile(profile: RateProfile | None) -> RateProfile:
    if profile is None:
        raise ValueError(
            "this command needs a rate-generated process "
            "(types: rates, qbm, damping)"
        )
    return profile


def cmd_check_channel(cfg: RunConfig) -> int:
    m = load_channel(_load_json(cfg.input_path))
    verdict = classify_positivity(m, tol=cfg.tol, seed=cfg.seed)
    report = {
        "class": verdict.klass,
        "cp_margin": verdict.cp_margin,
        "p_margin": verdict.p_margin,
    }
    if verdict.falsifier_only:
        report["caveat"] = "falsifier-only"
    if verdict.witness is not None:
        report["witness"] = np.asarray(verdict.witness).tolist()
    _write_output(_json_text(report), cfg.out)
    return EXIT_OK


def _global_physicality(proc: GaussianProcess, profile: RateProfile | None,
                        cfg: RunConfig) -> models.PhysicalityResult:
    if profile is not None:
        return is_physical(profile, grid=cfg.grid)
    # Tabulated process: check complete positivity of the global map on the grid.
    ts = np.linspace(0.0, proc.horizon, cfg.grid + 1)[1:]
    for t in ts:
        X, Y = proc.sample(t)
        ok, _ = is_cp(GaussianMap(proc.n, X, Y), tol=1e-8)
        if not ok:
            return models.PhysicalityResult(physical=False, violation_time=float(t))
    return models.PhysicalityResult(physical=True, violation_time=None)


def cmd_classify_process(cfg: RunConfig) -> int:
    proc, profile = load_process(_load_json(cfg.input_path))
    threads = worker_count()
    report = classify_process(proc, grid=cfg.grid, margin=cfg.margin,
                              h=cfg.fd_step, threads=threads)
    phys = _global_physicality(proc, profile, cfg)
    payload = report.to_dict()
    payload["physicality"] = {
        "physical": phys.physical,
        "violation_time": phys.violation_time,
    }
    _write_output(_json_text(payload), cfg.out)
    return EXIT_OK if phys.physical else EXIT_UNPHYSICAL


def cmd_trajectory(cfg: RunConfig) -> int:
    proc, _ = load_process(_load_json(cfg.input_path))
    points = trajectory(proc, grid=cfg.grid, margin=cfg.margin, h=cfg.fd_step,
                        threads=worker_count())
    if cfg.fmt == "csv":
        rows = [[p.t, p.eps, p.mu, p.delta, p.kappa, p.region] for p in points]
        text = _csv_text(["t", "eps", "mu", "delta", "kappa", "region"], rows)
    else:
        text = _json_text([
            {"t": p.t, "eps": p.eps, "mu": p.mu, "delta": p.delta,
             "kappa": p.kappa, "region": p.region}
            for p in points
        ])
    _write_output(text, cfg.out)
    return EXIT_OK


def cmd_physicality(cfg: RunConfig) -> int:
    _, profile = load_process(_load_json(cfg.input_path))
    profile = _require_profile(profile)
    ts = np.linspace(0.0, profile.horizon, cfg.grid + 1)[1:]
    lam_p, lam_m = physicality_eigenvalues(profile, ts)
    int_p, int_m = physicality_integrals(profile, ts)
    result = is_physical(profile, grid=cfg.grid)
    if cfg.fmt == "csv":
        rows = [
            [float(t), float(lp), float(lm), float(ip), float(im)]
            for t, lp, lm, ip, im in zip(ts, lam_p, lam_m, int_p, int_m)
        ]
        text = _csv_text(
            ["t", "lambda_plus", "lambda_minus", "cond_plus", "cond_minus"], rows
        )
        if not result.physical:
            print(f"unphysical at t = {result.violation_time!r}", file=sys.stderr)
    else:
        text = _json_text({
            "physical": result.physical,
            "violation_time": result.violation_time,
            "samples": [
                {"t": float(t), "lambda_plus": float(lp), "lambda_minus": float(lm),
                 "cond_plus": float(ip), "cond_minus": float(im)}
                for t, lp, lm, ip, im in zip(ts, lam_p, lam_m, int_p, int_m)
            ],
        })
    _write_output(text, cfg.out)
    return EXIT_OK if result.physical else EXIT_UNPHYSICAL


def cmd_amplification(cfg: RunConfig) -> int:
    _, profile = load_process(_load_json(cfg.input_path))
    profile = _require_profile(profile)
    windows = amplification_windows(profile, grid=cfg.grid)
    if cfg.fmt == "csv":
        rows = [[w.t_start, w.t_end, w.max_gap] for w in windows]
        text = _csv_text(["t_start", "t_end", "max_gap"], rows)
    else:
        text = _json_text([
            {"t_start": w.t_start, "t_end": w.t_end, "max_gap": w.max_gap}
            for w in windows
        ])
    _write_output(text, cfg.out)
    return EXIT_OK


_COMMANDS = {
    "check-channel": cmd_check_channel,
    "classify-process": cmd_classify_process,
    "trajectory": cmd_trajectory,
    "physicality": cmd_physicality,
    "amplification": cmd_amplification,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            input_path=args.input,
            grid=args.grid,
            tol=args.tol,
            margin=args.margin,
            tau=args.tau,
            fd_step=args.fd_step,
            seed=args.seed,
            fmt=args.fmt,
            out=args.out,
        )
        return _COMMANDS[cfg.command](cfg)
    except SingularMapError as exc:
        stamp = "" if exc.t is None else f" at t = {exc.t!r}"
        print(f"numerical failure{stamp}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (QuadratureError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
