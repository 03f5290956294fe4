"""Command-line front end: parameter sweeps, verification suite, oracle runs.

Commands:
    sweep   fidelity vs g_I/g_C over channel lengths, CSV or JSON output
    verify  run the named numerical checks, emit a JSON report, exit 0/1
    oracle  brute-force many-body checks (swap phases, formula equivalence)
    phases  per-basis-state Jordan-Wigner phase table

Exit codes: 0 success, 1 failed check or I/O error, 2 usage error.
g_C is fixed to 1 in all runs; the ratio axis directly sets g_I.
Configuration may come from a JSON file (--config); explicit flags win
over file values, file values win over defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .model import derive_parameters
from .propagator import (closed_form_effective_elements, eigendecompose,
                         mirror_inversion_report, propagator_at)
from .model import build_effective_coupling_matrix, build_full_coupling_matrix
from .fidelity import (RegisterElements, default_ratio_grid,
                       extract_register_elements, f_dfs, f_ndfs, sweep_fidelity)
from . import oracle as orc

__all__ = ["RunConfig", "parse_config", "run_sweep", "run_verify",
           "run_oracle", "run_phases", "main"]

_DEFAULTS = dict(
    n=2,
    channel_lengths=[101, 151, 201],
    ratio_min=1e-3,
    ratio_max=1.0,
    ratio_steps=40,
    linear=False,
    encoding="both",
    time="tau",
    sigma_lambda=0.0,
    shots=200,
    seed=42,
    output_path=None,
    format="csv",
    tolerance_scale=1.0,
)


@dataclasses.dataclass
class RunConfig:
    command: str
    n: int
    channel_lengths: list[int]
    ratio_min: float
    ratio_max: float
    ratio_steps: int
    linear: bool
    encoding: str
    time: str | float
    sigma_lambda: float
    shots: int
    seed: int
    output_path: str | None
    format: str
    tolerance_scale: float


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfsqst", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("sweep", "verify", "oracle", "phases"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--n", type=int)
        sp.add_argument("--channel-lengths", type=int, nargs="+", dest="channel_lengths")
        sp.add_argument("--ratio-min", type=float, dest="ratio_min")
        sp.add_argument("--ratio-max", type=float, dest="ratio_max")
        sp.add_argument("--ratio-steps", type=int, dest="ratio_steps")
        sp.add_argument("--linear", action="store_const", const=True)
        sp.add_argument("--encoding", choices=["dfs", "ndfs", "both"])
        sp.add_argument("--time")
        sp.add_argument("--sigma-lambda", type=float, dest="sigma_lambda")
        sp.add_argument("--shots", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--output", dest="output_path")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--tolerance-scale", type=float, dest="tolerance_scale")
    return p


def parse_config(argv) -> RunConfig:
    parser = _build_parser()
    ns = parser.parse_args(argv)

    merged = dict(_DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config file: {exc}")
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in _DEFAULTS:
        val = getattr(ns, key, None)
        if val is not None:
            merged[key] = val

    cfg = RunConfig(command=ns.command, **merged)

    # validation; any violation is a usage error (exit 2)
    if cfg.n < 1:
        parser.error("n must be >= 1")
    if not cfg.channel_lengths:
        parser.error("channel length list must not be empty")
    for N in cfg.channel_lengths:
        if N < 1 or N % 2 == 0:
            parser.error(f"channel length must be a positive odd integer, got {N}")
    if cfg.ratio_steps < 1:
        parser.error("ratio-steps must be >= 1")
    if cfg.ratio_min <= 0 or (cfg.ratio_min >= cfg.ratio_max and cfg.ratio_steps > 1):
        parser.error("need 0 < ratio-min < ratio-max")
    if cfg.shots < 1:
        parser.error("shots must be >= 1")
    if cfg.sigma_lambda < 0:
        parser.error("sigma-lambda must be >= 0")
    if cfg.format not in ("csv", "json"):
        parser.error(f"unknown format {cfg.format!r}")
    if cfg.time != "tau":
        try:
            cfg.time = float(cfg.time)
        except (TypeError, ValueError):
            parser.error(f"--time must be 'tau' or a number, got {cfg.time!r}")
    if cfg.command == "phases" and cfg.n > 3:
        parser.error("phases is capped at n = 3")
    return cfg


def _write_output(text: str, path: str | None) -> None:
    """Write atomically; on failure remove the partial file and exit 1."""
    if path is None:
        sys.stdout.write(text)
        return
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        if os.path.exists(tmp):
            os.unlink(tmp)
        sys.exit(1)


def _sweep_rows_text(rows, fmt: str) -> str:
    if fmt == "csv":
        lines = ["N,n,ratio,time,encoding,fidelity"]
        for r in rows:
            lines.append(f"{r.N},{r.n},{r.ratio:.14e},{r.t!r},{r.encoding},{r.fidelity!r}")
        return "\n".join(lines) + "\n"
    objs = [{"N": r.N, "n": r.n, "ratio": r.ratio, "time": r.t,
             "encoding": r.encoding, "fidelity": r.fidelity} for r in rows]
    return json.dumps(objs, indent=2) + "\n"


def run_sweep(cfg: RunConfig) -> int:
    grid = default_ratio_grid(cfg.ratio_min, cfg.ratio_max, cfg.ratio_steps,
                              log_spaced=not cfg.linear)
    encodings = ("dfs", "ndfs") if cfg.encoding == "both" else (cfg.encoding,)
    result = sweep_fidelity(n=cfg.n, N_list=cfg.channel_lengths, ratio_grid=grid,
                            t_choice=cfg.time, encodings=encodings)
    _write_output(_sweep_rows_text(result.rows, cfg.format), cfg.output_path)
    return 0


def _verify_checks(cfg: RunConfig):
    scale = cfg.tolerance_scale
    rng = np.random.default_rng(cfg.seed)
    checks = []

    def add(name, max_error, tolerance):
        checks.append({"name": name, "max_error": float(max_error),
                       "tolerance": float(tolerance),
                       "pass": bool(max_error <= tolerance)})

    # mirror inversion, n = 1..4
    err = max(mirror_inversion_report(derive_parameters(nn, 3, 1.0, 0.1)).max_error
              for nn in (1, 2, 3, 4))
    add("mirror_inversion", err, 1e-10 * scale)

    # closed-form elements, n = 2 effective, 1000 times in [0, 2 tau]
    spec = derive_parameters(2, 3, 1.0, 0.1)
    dec = eigendecompose(build_effective_coupling_matrix(spec))
    err = 0.0
    for t in np.linspace(0.0, 2 * spec.tau, 1000):
        e = extract_register_elements(propagator_at(dec, t))
        c11, c22, c12 = closed_form_effective_elements(spec.g0, t)
        err = max(err, abs(e.d_r1l1 - c11), abs(e.d_r2l2 - c22), abs(e.d_r1l2 - c12))
    add("closed_form_match", err, 1e-10 * scale)

    # unitarity of full-model propagators over random specs
    err = 0.0
    for _ in range(20):
        sp = derive_parameters(int(rng.integers(1, 4)),
                               int(rng.choice([3, 5, 7, 51, 101])),
                               1.0, float(rng.uniform(0.01, 1.0)))
        d = propagator_at(eigendecompose(build_full_coupling_matrix(sp)),
                          float(rng.uniform(0, 2 * sp.tau))).entries
        err = max(err, float(np.max(np.abs(d.conj().T @ d - np.eye(len(d))))))
    add("unitarity", err, 1e-10 * scale)

    # kappa-parity sign invariance of both fidelity formulas
    err = 0.0
    for _ in range(50):
        vals = rng.normal(size=4) + 1j * rng.normal(size=4)
        e = RegisterElements(*vals)
        flipped = RegisterElements(*(-vals))
        err = max(err, abs(f_dfs(e) - f_dfs(flipped)), abs(f_ndfs(e) - f_ndfs(flipped)))
    add("kappa_parity_invariance", err, 1e-12 * scale)

    # formula vs many-body oracle, N = 3, n = 2
    sp = derive_parameters(2, 3, 1.0, 0.2)
    dec = eigendecompose(build_full_coupling_matrix(sp))
    err = 0.0
    for t in rng.uniform(0, 2 * sp.tau, 4):
        e = extract_register_elements(propagator_at(dec, float(t)))
        err = max(err,
                  abs(f_dfs(e) - orc.average_fidelity_bruteforce(sp, "dfs", float(t))),
                  abs(f_ndfs(e) - orc.average_fidelity_bruteforce(sp, "ndfs", float(t))))
    add("formula_vs_oracle", err, 1e-8 * scale)

    # dephasing protection, effective model
    sp = derive_parameters(2, 3, 1.0, 0.1)
    sigma = (cfg.sigma_lambda if cfg.sigma_lambda > 0 else 0.5 / sp.tau)
    rep = orc.dephasing_protection_report(
        sp, orc.DephasingModel(sigma_lambda=sigma, samples=cfg.shots, seed=cfg.seed),
        sp.tau)
    add("dephasing_dfs_invariance", rep.dfs_max_deviation, 1e-10 * scale)
    add("dephasing_ndfs_suppression",
        abs(rep.ndfs_measured_suppression - rep.ndfs_predicted_suppression),
        3.0 * rep.ndfs_stderr * scale)
    return checks


def run_verify(cfg: RunConfig) -> int:
    checks = _verify_checks(cfg)
    overall = all(c["pass"] for c in checks)
    report = {"checks": checks, "overall_pass": overall}
    _write_output(json.dumps(report, indent=2) + "\n", cfg.output_path)
    return 0 if overall else 1


def run_oracle(cfg: RunConfig) -> int:
    n = min(cfg.n, 3)
    swap = orc.effective_swap_check(n)
    sp = derive_parameters(2, 3, 1.0, 0.2)
    dec = eigendecompose(build_full_coupling_matrix(sp))
    rng = np.random.default_rng(cfg.seed)
    diffs = []
    for t in rng.uniform(0, 2 * sp.tau, 4):
        e = extract_register_elements(propagator_at(dec, float(t)))
        diffs.append(abs(f_dfs(e) - orc.average_fidelity_bruteforce(sp, "dfs", float(t))))
        diffs.append(abs(f_ndfs(e) - orc.average_fidelity_bruteforce(sp, "ndfs", float(t))))
    report = {
        "swap_check": {"n": swap.n, "max_amplitude_error": swap.max_amplitude_error,
                       "pass": swap.passed},
        "formula_vs_oracle": {"max_error": max(diffs), "tolerance": 1e-8,
                              "pass": max(diffs) <= 1e-8},
    }
    overall = swap.passed and max(diffs) <= 1e-8
    report["overall_pass"] = overall
    _write_output(json.dumps(report, indent=2) + "\n", cfg.output_path)
    return 0 if overall else 1


def run_phases(cfg: RunConfig) -> int:
    rows = orc.phase_table(cfg.n)
    lines = ["pattern,predicted,measured,match"]
    for r in rows:
        bits = "".join(str(b) for b in
                       list(r.pattern.n_L) + [r.pattern.n_kappa] + list(r.pattern.n_R[::-1]))
        lines.append(f"{bits},{r.predicted:+d},{r.measured:+d},{str(r.match).lower()}")
    _write_output("\n".join(lines) + "\n", cfg.output_path)
    return 0 if all(r.match for r in rows) else 1


def main(argv=None) -> int:
    cfg = parse_config(sys.argv[1:] if argv is None else argv)
    runner = {"sweep": run_sweep, "verify": run_verify,
              "oracle": run_oracle, "phases": run_phases}[cfg.command]
    return runner(cfg)


if __name__ == "__main__":
    sys.exit(main())
