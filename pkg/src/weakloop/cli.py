"""Command-line entry points: simulate, verify, learn, serve.

Exit codes: 0 success, 1 runtime failure, 2 bad configuration or missing
file, 3 performance budget violated (verify).  The ``WEAKLOOP_LOG``
environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .errors import ConfigError, NotSettledError, WeakloopError
from .sim import (
    ScenarioConfig,
    apply_case,
    emit_trace,
    run_case,
    steady_state,
)
from .verify import PerfReport, ke_dc_residual, nominal_perf_dc, stability_probe, worst_case_dc

__all__ = ["main"]

log = logging.getLogger("weakloop.cli")


def _setup_logging():
    level = os.environ.get("WEAKLOOP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _load_config(path: str, case: int | None, seed: int | None) -> ScenarioConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    cfg = ScenarioConfig.from_dict(data)
    if case is not None:
        cfg = apply_case(cfg, case)
    if seed is not None:
        cfg = cfg.replace(policy_seed=seed, learner_seed=seed + 1)
    return cfg


def _manifest(cfg: ScenarioConfig, trace, extras, report: PerfReport | None) -> dict:
    manifest = {
        "config": cfg.to_dict(),
        "config_hash": cfg.hash(),
        "steps": len(trace),
    }
    y_vals = [float(np.asarray(rec.y).reshape(())) for rec in trace]
    f_vals = [rec.cost for rec in trace]
    try:
        manifest["steady_y"] = steady_state(y_vals)
    except NotSettledError:
        manifest["steady_y"] = None
    try:
        manifest["steady_cost"] = steady_state(f_vals)
    except (NotSettledError, ValueError):
        manifest["steady_cost"] = None
    learner = extras.get("learner")
    if learner is not None:
        manifest["learner"] = {
            "converged": learner.converged,
            "direction": learner.current.direction.tolist(),
            "gamma": learner.current.gamma,
            "recorded_hyperplanes": len(learner.directions),
            "update_count": learner.k,
        }
    if report is not None:
        manifest["perf_report"] = report.to_dict()
    return manifest


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config, args.case, args.seed)
    trace, extras = run_case(cfg, return_extras=True)
    emit_trace(trace, args.format, args.out)
    report = None
    if cfg.K_e is not None:
        expander = extras.get("expander")
        plant = cfg.plant()
        rho = nominal_perf_dc(plant, cfg.K_e)
        worst = (
            worst_case_dc(plant, cfg.K_e, expander)
            if expander is not None and expander.kind == "segment"
            else rho
        )
        report = PerfReport(
            rho_nominal=rho,
            worst_dc_deviation=worst,
            budget_satisfied=bool(worst <= rho + cfg.delta_rho + 1e-9),
            ke_dc_residual=ke_dc_residual(plant, cfg.K_e),
            probe_max_output=float(
                max(abs(np.asarray(rec.y).reshape(())) for rec in trace)
            ),
        )
    manifest = _manifest(cfg, trace, extras, report)
    manifest_path = args.out + ".manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    learner = extras.get("learner")
    if learner is not None:
        # Sidecar checkpoint: enough to resume the update loop elsewhere.
        with open(args.out + ".learner.json", "w") as fh:
            json.dump(learner.to_dict(), fh, indent=2, sort_keys=True)
    log.info("trace written to %s, manifest to %s", args.out, manifest_path)
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config, args.case, args.seed)
    plant = cfg.plant()
    if cfg.K_e is None:
        raise ConfigError("verify requires K_e in the config")
    expander = cfg.build_expander()
    rho = nominal_perf_dc(plant, cfg.K_e)
    worst = (
        worst_case_dc(plant, cfg.K_e, expander)
        if expander is not None and expander.kind == "segment"
        else rho
    )
    probe_cfg = cfg.replace(learner_enabled=False)
    if probe_cfg.policy_kind == "zero":
        probe_cfg = probe_cfg.replace(policy_kind="nominal")
    probe_max = stability_probe(probe_cfg, probe_cfg.policy_kind, N=cfg.horizon)
    report = PerfReport(
        rho_nominal=rho,
        worst_dc_deviation=worst,
        budget_satisfied=bool(worst <= rho + cfg.delta_rho + 1e-9),
        ke_dc_residual=ke_dc_residual(plant, cfg.K_e),
        probe_max_output=probe_max,
    )
    print(report.format())
    return 0 if report.budget_satisfied else 3


def _cmd_serve(args) -> int:
    from .service import serve

    cfg = None
    if args.config:
        cfg = _load_config(args.config, args.case, args.seed)
    serve(port=args.port, default_config=cfg, static_dir=args.static)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakloop",
        description="Set-valued feedback control simulator and verifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="scenario JSON file")
        p.add_argument("--case", type=int, choices=(1, 2, 3, 4), default=None)
        p.add_argument("--seed", type=int, default=None)

    p_sim = sub.add_parser("simulate", help="run a scenario and write its trace")
    common(p_sim)
    p_sim.add_argument("--out", required=True, help="trace output path")
    p_sim.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_sim.set_defaults(func=_cmd_simulate)

    p_learn = sub.add_parser("learn", help="shortcut for simulate --case 4")
    common(p_learn)
    p_learn.add_argument("--out", required=True)
    p_learn.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_learn.set_defaults(func=_cmd_simulate, forced_case=4)

    p_verify = sub.add_parser("verify", help="check the performance budget")
    common(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_serve = sub.add_parser("serve", help="run the interactive session service")
    common(p_serve, config_required=False)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--static", default=None, help="static files directory")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "forced_case", None) is not None:
        args.case = args.forced_case
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except WeakloopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
