"""Scenario orchestration: configs, the closed-loop engine, and trace logging.

A scenario couples one plant, one gain, an optional set expander, a decision
policy, and an optional learner.  Four standard cases cover the benchmark
experiment:

1. no feedback at all (``u = 0``);
2. the controller alone, candidate set collapsed to the nominal action;
3. the controller with a fixed expander and a rational decision maker;
4. case 3 with the expander learned online.

The same stepping engine backs batch runs (:func:`run_case`) and interactive
sessions (the service drives :class:`LoopSession` one decision at a time).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .controller import IMCController
from .decision import (
    ExtremePolicy,
    NominalPolicy,
    OptimizerPolicy,
    QuadraticCost,
    RandomPolicy,
)
from .errors import ConfigError, NotSettledError
from .expander import BoxExpander, SegmentExpander, contains
from .learner import LearnerState, PerfBudget, is_interior, learner_step, max_gamma
from .lti import PlantState, StateSpace, dc_gain, step as plant_step, zoh_discretize

__all__ = [
    "ScenarioConfig",
    "TraceRecord",
    "LoopSession",
    "run_case",
    "emit_trace",
    "parse_trace",
    "steady_state",
    "benchmark_config",
    "apply_case",
]

TRACE_FIELDS = (
    "t",
    "y",
    "v",
    "u",
    "delta",
    "cost",
    "gamma",
    "direction",
    "interior",
    "case",
)

POLICY_KINDS = ("zero", "nominal", "optimizer", "random", "extreme")


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one closed-loop run."""

    A: list
    B_u: list
    B_w: list
    C: list
    dt: float = 1.0
    horizon: int = 200
    disturbance_time: int = 0
    disturbance_magnitude: float = 1.0
    reference_magnitude: float = 0.0
    K_e: list = None
    expander: dict | None = None
    policy_kind: str = "nominal"
    policy_seed: int = 0
    cost_Q: list = None
    cost_c: list = None
    learner_enabled: bool = False
    learning_horizon: int | None = None
    delta_rho: float = 0.2
    learner_eta: float = 0.1
    learner_patience: int = 5
    learner_margin: float = 0.01
    gamma_max: float = 1e3
    learner_seed: int = 1
    case_label: str = "custom"

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.policy_kind not in POLICY_KINDS:
            raise ConfigError(f"unknown policy kind {self.policy_kind!r}")
        if self.learner_enabled and (
            self.expander is None or self.expander.get("kind") != "segment"
        ):
            raise ConfigError("the learner requires a segment expander")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    # Construction helpers -------------------------------------------------

    def plant(self) -> StateSpace:
        return StateSpace(A=self.A, B_u=self.B_u, B_w=self.B_w, C=self.C)

    def cost(self) -> QuadraticCost | None:
        if self.cost_Q is None or self.cost_c is None:
            return None
        return QuadraticCost(Q=self.cost_Q, c=self.cost_c)

    def budget(self) -> PerfBudget:
        plant = self.plant()
        return PerfBudget(
            rho=0.0,
            delta_rho=self.delta_rho,
            dc_Pu=dc_gain(plant, "u"),
            dc_Pw=float(np.asarray(dc_gain(plant, "w")).reshape(())),
            K_e=np.asarray(self.K_e, float).reshape(-1),
        )

    def build_expander(self):
        """Instantiate the configured expander; ``gamma: "auto"`` resolves
        to the largest budget-feasible value."""
        if self.expander is None:
            return None
        spec = dict(self.expander)
        kind = spec.pop("kind", "segment")
        if kind == "box":
            return BoxExpander(gammas=spec["ratios"])
        if kind != "segment":
            raise ConfigError(f"unknown expander kind {kind!r}")
        gamma = spec.get("gamma", "auto")
        if gamma == "auto":
            gamma = max_gamma(
                spec["direction"], spec["sensor"], self.budget(), self.gamma_max
            )
        return SegmentExpander(
            direction=spec["direction"], sensor=spec["sensor"], gamma=gamma
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class TraceRecord:
    """One step of a closed-loop run, in logging order."""

    t: int
    y: float
    v: np.ndarray
    u: np.ndarray
    delta: float | np.ndarray
    cost: float
    gamma: float | None
    direction: np.ndarray | None
    interior: bool | None
    case: str


def benchmark_config(case: int = 2) -> ScenarioConfig:
    """Bundled three-state diagonal benchmark, preset for one of the cases."""
    base = ScenarioConfig(
        A=[[-1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -0.5]],
        B_u=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        B_w=[[1.0], [1.0], [1.0]],
        C=[[1.0, 1.0, 1.0]],
        dt=1.0,
        horizon=200,
        K_e=[[2.0 / 6.0], [4.0 / 6.0], [1.0 / 6.0]],
        expander={
            "kind": "segment",
            "direction": [1.0, 0.0, 0.0],
            "sensor": [1.0 / math.sqrt(3.0)] * 3,
            "gamma": "auto",
        },
        cost_Q=[[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]],
        cost_c=[1.0, 0.0, 4.0],
        delta_rho=0.2,
        learning_horizon=24000,
        policy_kind="nominal",
    )
    return apply_case(base, case)


def apply_case(cfg: ScenarioConfig, case: int) -> ScenarioConfig:
    """Structural toggles for the four standard cases."""
    if case == 1:
        return cfg.replace(
            policy_kind="zero", expander=None, learner_enabled=False, case_label="case1"
        )
    if case == 2:
        return cfg.replace(
            policy_kind="nominal",
            expander=None,
            learner_enabled=False,
            case_label="case2",
        )
    if case == 3:
        return cfg.replace(
            policy_kind="optimizer", learner_enabled=False, case_label="case3"
        )
    if case == 4:
        return cfg.replace(
            policy_kind="optimizer",
            learner_enabled=True,
            horizon=cfg.learning_horizon or cfg.horizon,
            case_label="case4",
        )
    raise ConfigError(f"case must be 1..4, got {case}")


def _build_policy(cfg: ScenarioConfig, plant: StateSpace):
    if cfg.policy_kind in ("zero", "nominal"):
        return NominalPolicy()
    if cfg.policy_kind == "optimizer":
        cost = cfg.cost()
        if cost is None:
            raise ConfigError("optimizer policy requires cost_Q and cost_c")
        return OptimizerPolicy(cost)
    if cfg.policy_kind == "random":
        return RandomPolicy(cfg.policy_seed)
    if cfg.policy_kind == "extreme":
        return ExtremePolicy(np.asarray(dc_gain(plant, "u")).reshape(-1))
    raise ConfigError(f"unknown policy kind {cfg.policy_kind!r}")


class LoopSession:
    """Stepwise closed-loop engine shared by batch runs and live sessions.

    After construction the first candidate set is pending; each
    :meth:`advance` applies one decision (the internal policy's when none is
    supplied), runs the learner, marches the plant, and publishes the next
    candidate set.
    """

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.plant = cfg.plant()
        self.plant_d = zoh_discretize(self.plant, cfg.dt)
        self.cost = cfg.cost()
        self.no_controller = cfg.policy_kind == "zero"
        self.policy = _build_policy(cfg, self.plant)
        self.expander = None if self.no_controller else cfg.build_expander()
        self.controller = (
            None
            if self.no_controller
            else IMCController(cfg.K_e, self.plant_d, self.expander)
        )
        self.learner = None
        if cfg.learner_enabled and not self.no_controller:
            self.learner = LearnerState(
                current=self.expander,
                budget=cfg.budget(),
                margin=cfg.learner_margin,
                eta=cfg.learner_eta,
                patience=cfg.learner_patience,
                gamma_max=cfg.gamma_max,
                seed=cfg.learner_seed,
            )

        self.state = PlantState.zero(self.plant_d.n)
        self.u_prev = np.zeros(self.plant_d.m)
        self.t = 0
        self.trace: list[TraceRecord] = []
        self.state_norms: list[float] = []
        self.pending_v = None
        self.pending_set = None
        self.pending_y = None
        self._prepare()

    # ------------------------------------------------------------------

    @property
    def done(self) -> bool:
        return self.t >= self.cfg.horizon

    def _signals(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        w = (
            self.cfg.disturbance_magnitude
            if k >= self.cfg.disturbance_time
            else 0.0
        )
        r = self.cfg.reference_magnitude
        return (
            np.full(self.plant_d.l, float(r)),
            np.full(self.plant_d.q, float(w)),
        )

    def _prepare(self):
        """Compute the output and candidate set of the current step."""
        if self.done:
            self.pending_v = self.pending_set = self.pending_y = None
            return
        r, _ = self._signals(self.t)
        y = self.plant_d.C @ self.state.x
        if self.no_controller:
            v, admissible = np.zeros(self.plant_d.m), None
        else:
            v, admissible = self.controller.step(r, y, self.u_prev)
        self.pending_y = y
        self.pending_v = v
        self.pending_set = admissible

    def advance(self, u: np.ndarray | None = None) -> TraceRecord:
        """Apply one decision and march the loop to the next candidate set."""
        if self.done:
            raise RuntimeError("session already ran to its horizon")
        v, admissible, y = self.pending_v, self.pending_set, self.pending_y
        if self.no_controller:
            u = np.zeros(self.plant_d.m)
            delta = 0.0
        else:
            if u is None:
                u = self.policy.decide(admissible)
            u = np.asarray(u, float).reshape(-1)
            delta = admissible.parameter_of(u)

        interior = None
        gamma, direction = None, None
        if self.expander is not None and self.expander.kind == "segment":
            gamma = self.expander.gamma
            direction = self.expander.direction.copy()
        elif self.expander is not None:
            gamma = self.expander.gammas.copy()
        if self.learner is not None:
            interior = is_interior(v, u, self.learner.current, self.learner.margin)
            self.learner, new_expander = learner_step(self.learner, v, u)
            if new_expander is not self.expander:
                self.expander = new_expander
                self.controller.expander = new_expander

        record = TraceRecord(
            t=self.t,
            y=float(y.reshape(())) if y.size == 1 else y.copy(),
            v=v.copy(),
            u=u.copy(),
            delta=delta,
            cost=self.cost.value(u) if self.cost is not None else float("nan"),
            gamma=gamma,
            direction=direction,
            interior=interior,
            case=self.cfg.case_label,
        )
        self.trace.append(record)

        _, w = self._signals(self.t)
        self.state, _ = plant_step(self.plant_d, self.state, u, w)
        self.state_norms.append(float(np.linalg.norm(self.state.x)))
        self.u_prev = u
        self.t += 1
        self._prepare()
        return record


def run_case(cfg: ScenarioConfig, return_extras: bool = False):
    """Run a configured scenario to its horizon; deterministic given seeds."""
    session = LoopSession(cfg)
    while not session.done:
        session.advance()
    if not return_extras:
        return session.trace
    extras = {
        "state_norms": session.state_norms,
        "learner": session.learner,
        "expander": session.expander,
    }
    return session.trace, extras


# Trace serialization -----------------------------------------------------


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    arr = np.asarray(value)
    if arr.ndim == 0:
        return _fmt(float(arr))
    return ";".join(_fmt(x) for x in arr.reshape(-1))


def _uncell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if ";" in text:
        return np.asarray([float(x) for x in text.split(";")])
    try:
        return float(text)
    except ValueError:
        return text


def _record_to_row(rec: TraceRecord) -> list:
    return [
        str(rec.t),
        _cell(rec.y),
        _cell(rec.v),
        _cell(rec.u),
        _cell(rec.delta),
        _cell(rec.cost),
        _cell(rec.gamma),
        _cell(rec.direction),
        _cell(rec.interior),
        rec.case,
    ]


def _quantize(value):
    """Apply the 12-significant-digit emission precision to JSON payloads."""
    if value is None or isinstance(value, (bool, str, int)):
        return value
    arr = np.asarray(value)
    if arr.ndim == 0:
        return float(_fmt(float(arr)))
    return [float(_fmt(x)) for x in arr.reshape(-1)]


def emit_trace(trace, fmt: str, path):
    """Write a trace to ``path`` as ``csv`` or ``jsonl`` (one record per line).

    Columns follow the record field order; floats carry 12 significant
    digits; vector cells join components with ``;`` in the CSV form.
    """
    path = str(path)
    try:
        if fmt == "csv":
            lines = [",".join(TRACE_FIELDS)]
            lines += [",".join(_record_to_row(rec)) for rec in trace]
            text = "\n".join(lines) + "\n"
        elif fmt == "jsonl":
            rows = []
            for rec in trace:
                rows.append(
                    json.dumps(
                        {
                            "t": rec.t,
                            "y": _quantize(rec.y),
                            "v": _quantize(rec.v),
                            "u": _quantize(rec.u),
                            "delta": _quantize(rec.delta),
                            "cost": _quantize(rec.cost),
                            "gamma": _quantize(rec.gamma),
                            "direction": _quantize(rec.direction),
                            "interior": rec.interior,
                            "case": rec.case,
                        }
                    )
                )
            text = "\n".join(rows) + ("\n" if rows else "")
        else:
            raise ValueError(f"unknown trace format {fmt!r}")
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed writing trace to {path}: {exc}") from exc


def parse_trace(path, fmt: str) -> list[TraceRecord]:
    """Read back a trace written by :func:`emit_trace`."""
    path = str(path)
    records = []
    try:
        with open(path) as fh:
            if fmt == "csv":
                header = fh.readline().strip()
                if header and header.split(",") != list(TRACE_FIELDS):
                    raise ValueError(f"unexpected trace header in {path}")
                for line in fh:
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    cells = line.split(",")
                    records.append(
                        TraceRecord(
                            t=int(cells[0]),
                            y=_uncell(cells[1]),
                            v=_uncell(cells[2]),
                            u=_uncell(cells[3]),
                            delta=_uncell(cells[4]),
                            cost=_uncell(cells[5]),
                            gamma=_uncell(cells[6]),
                            direction=_uncell(cells[7]),
                            interior=_uncell(cells[8]),
                            case=cells[9],
                        )
                    )
            elif fmt == "jsonl":
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    row = json.loads(line)
                    records.append(
                        TraceRecord(
                            t=int(row["t"]),
                            y=row["y"],
                            v=np.asarray(row["v"], float),
                            u=np.asarray(row["u"], float),
                            delta=(
                                np.asarray(row["delta"], float)
                                if isinstance(row["delta"], list)
                                else row["delta"]
                            ),
                            cost=row["cost"],
                            gamma=(
                                np.asarray(row["gamma"], float)
                                if isinstance(row["gamma"], list)
                                else row["gamma"]
                            ),
                            direction=(
                                None
                                if row["direction"] is None
                                else np.asarray(row["direction"], float)
                            ),
                            interior=row["interior"],
                            case=row["case"],
                        )
                    )
            else:
                raise ValueError(f"unknown trace format {fmt!r}")
    except OSError as exc:
        raise OSError(f"failed reading trace from {path}: {exc}") from exc
    return records


def steady_state(values, frac: float = 0.1, tol: float = 1e-6) -> float:
    """Mean of the trailing window, required to have max-min spread < tol.

    The window is the last ``frac`` of the samples.  Raises
    :class:`NotSettledError` when the spread exceeds ``tol``.
    """
    arr = np.asarray(values, float).reshape(-1)
    n = max(1, int(round(frac * arr.size)))
    window = arr[-n:]
    spread = float(window.max() - window.min())
    if spread > tol:
        raise NotSettledError(
            f"trailing window spread {spread:.3g} exceeds tolerance {tol:.3g}"
        )
    return float(window.mean())


def audit_membership(cfg: ScenarioConfig, trace, tol: float = 1e-9) -> bool:
    """Cross-module audit: every logged action lies in its step's candidate set.

    Replays the configuration step by step, feeding back the logged actions,
    and checks membership of each against the live candidate set.
    """
    session = LoopSession(cfg)
    for rec in trace:
        if session.done:
            return False
        u = np.asarray(rec.u, float).reshape(-1)
        if session.pending_set is not None and not contains(
            session.pending_set, u, tol
        ):
            return False
        session.advance(None if session.no_controller else u)
    return True
