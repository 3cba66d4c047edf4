"""Online reshaping of the candidate set from observed rational decisions.

Whenever the decision maker's constrained optimum lands strictly inside the
segment, first-order optimality pins the unknown unconstrained optimum to a
hyperplane through the decision, normal to the expansion direction.  The
learner stacks those hyperplanes, intersects them in least squares once the
stack has full row rank, re-aims the expansion direction from the nominal
action toward the estimate, and rescales the expansion so a hard steady-state
performance budget stays satisfied with equality.

Non-interior decisions carry no hyperplane information and are skipped; a
patience counter fires a small random perturbation of the direction when
interior data stays absent, so the stack keeps growing.  Once three
consecutive re-aims agree, the direction has converged and the expander is
frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDirectionError,
    InteriorityError,
    RankError,
    UnboundedGammaError,
)
from .expander import SegmentExpander

__all__ = [
    "PerfBudget",
    "LearnerState",
    "is_interior",
    "record_hyperplane",
    "estimate_ustar",
    "update_direction",
    "perturb_direction",
    "max_gamma",
    "learner_step",
]

RANK_RTOL = 1e-8
CONVERGENCE_TOL = 1e-6
CONVERGENCE_STREAK = 3


@dataclass(frozen=True)
class PerfBudget:
    """Frozen loop data for the steady-state performance budget.

    ``rho`` is the nominal criterion value, ``delta_rho`` the admissible
    deterioration; ``dc_Pu`` (row), ``dc_Pw`` (scalar) and ``K_e`` (column)
    are the DC data of the loop the budget is evaluated on.
    """

    rho: float
    delta_rho: float
    dc_Pu: np.ndarray
    dc_Pw: float
    K_e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dc_Pu", np.asarray(self.dc_Pu, float).reshape(-1))
        object.__setattr__(self, "dc_Pw", float(np.asarray(self.dc_Pw).reshape(())))
        object.__setattr__(self, "K_e", np.asarray(self.K_e, float).reshape(-1))
        if self.delta_rho < 0:
            raise ValueError("delta_rho must be non-negative")
        if self.rho < 0:
            raise ValueError("rho must be non-negative")


def max_gamma(
    direction,
    sensor,
    budget: PerfBudget,
    gamma_max: float | None = 1e3,
) -> float:
    """Largest expansion ratio keeping the DC deterioration within budget.

    The steady-output deviation of a constant selection ``delta`` is
    ``delta * |dc_Pu . direction| * |sensor . K_e| * dc_Pw``, linear in
    ``delta``, so the budget binds at the endpoints and

        gamma = delta_rho / |dc_Pu . direction * sensor . K_e * dc_Pw|.

    A direction invisible at DC makes the denominator vanish; the cap
    ``gamma_max`` is returned then (pass ``gamma_max=None`` to raise
    :class:`UnboundedGammaError` instead).
    """
    direction = np.asarray(direction, float).reshape(-1)
    sensor = np.asarray(sensor, float).reshape(-1)
    denom = abs(
        float(budget.dc_Pu @ direction)
        * float(sensor @ budget.K_e)
        * budget.dc_Pw
    )
    if denom == 0.0 or budget.delta_rho / denom > (gamma_max or np.inf):
        if gamma_max is None:
            raise UnboundedGammaError(
                "expansion direction is invisible at DC; gamma is unbounded"
            )
        return float(gamma_max)
    return budget.delta_rho / denom


def is_interior(v, u_dagger, expander: SegmentExpander, margin: float = 0.01) -> bool:
    """Strict interiority of a decision in the segment generated at ``v``.

    True iff ``||u - v|| < (1 - margin) * gamma * ||direction|| * |sensor . v|``
    (Euclidean norms).  The relative margin enforces strictness: decisions at
    or numerically near the segment boundary are classified non-interior,
    because the stationarity argument behind the hyperplane fact fails there.
    """
    if not 0 < margin < 1:
        raise ValueError("margin must lie in (0, 1)")
    v = np.asarray(v, float).reshape(-1)
    u_dagger = np.asarray(u_dagger, float).reshape(-1)
    half_width = (
        expander.gamma
        * float(np.linalg.norm(expander.direction))
        * abs(float(expander.sensor @ v))
    )
    return bool(np.linalg.norm(u_dagger - v) < (1.0 - margin) * half_width)


@dataclass
class LearnerState:
    """Hyperplane stack, current expander, and update bookkeeping.

    ``directions`` and ``offsets`` hold one entry per recorded interior
    decision: the expansion direction active at the time and the projection
    of the decision onto it.  ``current`` is the live expander; the sensor
    vector stays fixed throughout.
    """

    current: SegmentExpander
    budget: PerfBudget
    margin: float = 0.01
    eta: float = 0.1
    patience: int = 5
    gamma_max: float = 1e3
    seed: int = 0
    directions: list = field(default_factory=list)
    offsets: list = field(default_factory=list)
    ustar_estimate: np.ndarray | None = None
    k: int = 0
    skip_count: int = 0
    reaim_prev: np.ndarray | None = None
    reaim_streak: int = 0
    converged: bool = False
    perturb_rng: np.random.Generator = None

    def __post_init__(self):
        if self.perturb_rng is None:
            self.perturb_rng = np.random.default_rng(self.seed)

    @property
    def dim(self) -> int:
        return self.current.direction.shape[0]

    def stacked_directions(self) -> np.ndarray:
        """Recorded directions as columns of an (m, k) matrix."""
        if not self.directions:
            return np.zeros((self.dim, 0))
        return np.column_stack(self.directions)

    def has_full_rank(self) -> bool:
        E = self.stacked_directions()
        if E.shape[1] < self.dim:
            return False
        s = np.linalg.svd(E, compute_uv=False)
        return bool(s[-1] > RANK_RTOL * s[0])

    # Checkpointing ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "direction": self.current.direction.tolist(),
            "sensor": self.current.sensor.tolist(),
            "gamma": self.current.gamma,
            "margin": self.margin,
            "eta": self.eta,
            "patience": self.patience,
            "gamma_max": self.gamma_max,
            "seed": self.seed,
            "directions": [d.tolist() for d in self.directions],
            "offsets": list(self.offsets),
            "ustar_estimate": (
                None
                if self.ustar_estimate is None
                else self.ustar_estimate.tolist()
            ),
            "k": self.k,
            "skip_count": self.skip_count,
            "reaim_prev": (
                None if self.reaim_prev is None else self.reaim_prev.tolist()
            ),
            "reaim_streak": self.reaim_streak,
            "converged": self.converged,
            "rng_state": self.perturb_rng.bit_generator.state,
            "budget": {
                "rho": self.budget.rho,
                "delta_rho": self.budget.delta_rho,
                "dc_Pu": self.budget.dc_Pu.tolist(),
                "dc_Pw": self.budget.dc_Pw,
                "K_e": self.budget.K_e.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LearnerState":
        budget = PerfBudget(**data["budget"])
        state = cls(
            current=SegmentExpander(
                direction=data["direction"],
                sensor=data["sensor"],
                gamma=data["gamma"],
            ),
            budget=budget,
            margin=data["margin"],
            eta=data["eta"],
            patience=data["patience"],
            gamma_max=data["gamma_max"],
            seed=data["seed"],
            directions=[np.asarray(d, float) for d in data["directions"]],
            offsets=list(data["offsets"]),
            ustar_estimate=(
                None
                if data["ustar_estimate"] is None
                else np.asarray(data["ustar_estimate"], float)
            ),
            k=data["k"],
            skip_count=data["skip_count"],
            reaim_prev=(
                None
                if data["reaim_prev"] is None
                else np.asarray(data["reaim_prev"], float)
            ),
            reaim_streak=data["reaim_streak"],
            converged=data["converged"],
        )
        state.perturb_rng.bit_generator.state = data["rng_state"]
        return state


def record_hyperplane(state: LearnerState, v, u_dagger) -> LearnerState:
    """Append the hyperplane pinned by an interior decision.

    The caller must filter: recording non-interior data raises
    :class:`InteriorityError` because the hyperplane fact does not hold at
    the segment boundary.
    """
    if not is_interior(v, u_dagger, state.current, state.margin):
        raise InteriorityError("hyperplane data must come from an interior optimum")
    u_dagger = np.asarray(u_dagger, float).reshape(-1)
    direction = state.current.direction.copy()
    state.directions.append(direction)
    state.offsets.append(float(direction @ u_dagger))
    return state


def estimate_ustar(state: LearnerState) -> np.ndarray:
    """Least-squares intersection point of the recorded hyperplanes.

    Solves ``direction_j . u = offset_j`` for all records; requires the
    stacked direction matrix to have full row rank (:class:`RankError`
    otherwise, which sends the caller to the perturbation branch).
    """
    if not state.has_full_rank():
        raise RankError(
            f"direction stack has rank < {state.dim}; cannot estimate optimum"
        )
    E = state.stacked_directions()
    b = np.asarray(state.offsets, float)
    estimate, *_ = np.linalg.lstsq(E.T, b, rcond=None)
    return estimate


def update_direction(state: LearnerState, v, ustar) -> SegmentExpander:
    """Re-aim the expansion from the nominal action toward the estimate.

    The new direction is ``normalize(v - ustar)``; only the direction
    matters since the expansion ratio is rescaled by :func:`max_gamma`
    afterwards.  Raises :class:`DegenerateDirectionError` when ``v`` already
    equals the estimate.
    """
    v = np.asarray(v, float).reshape(-1)
    ustar = np.asarray(ustar, float).reshape(-1)
    diff = v - ustar
    norm = float(np.linalg.norm(diff))
    if norm < 1e-12:
        raise DegenerateDirectionError("nominal action equals the estimated optimum")
    direction = diff / norm
    gamma = max_gamma(direction, state.current.sensor, state.budget, state.gamma_max)
    return state.current.replace(direction=direction, gamma=gamma)


def perturb_direction(state: LearnerState) -> SegmentExpander:
    """Randomly tilt the direction to explore and to break rank deficiency.

    ``direction <- normalize(direction + eta * g)`` with ``g`` a seeded
    unit-norm random vector; with probability one the result is linearly
    independent of every previously recorded direction.
    """
    g = state.perturb_rng.standard_normal(state.dim)
    g /= np.linalg.norm(g)
    tilted = state.current.direction + state.eta * g
    norm = float(np.linalg.norm(tilted))
    if norm < 1e-12:
        tilted, norm = g, 1.0
    direction = tilted / norm
    gamma = max_gamma(direction, state.current.sensor, state.budget, state.gamma_max)
    return state.current.replace(direction=direction, gamma=gamma)


def learner_step(state: LearnerState, v, u_dagger) -> tuple[LearnerState, SegmentExpander]:
    """One pass of the update loop on a fresh ``(v, decision)`` sample.

    Interior samples are recorded; with a full-rank stack the direction is
    re-aimed at ``v - estimate``, otherwise perturbed.  Non-interior samples
    are skipped and only counted; ``patience`` consecutive skips fire a
    perturbation so exploration continues even with a full-rank stack.
    Convergence is declared after three consecutive re-aims agree to
    ``1e-6``; the expander is frozen from then on.
    """
    if state.converged:
        return state, state.current

    v = np.asarray(v, float).reshape(-1)
    u_dagger = np.asarray(u_dagger, float).reshape(-1)

    if is_interior(v, u_dagger, state.current, state.margin):
        record_hyperplane(state, v, u_dagger)
        state.skip_count = 0
        if state.has_full_rank():
            state.ustar_estimate = estimate_ustar(state)
            try:
                new = update_direction(state, v, state.ustar_estimate)
            except DegenerateDirectionError:
                new = state.current
            if (
                state.reaim_prev is not None
                and np.linalg.norm(new.direction - state.reaim_prev)
                < CONVERGENCE_TOL
            ):
                state.reaim_streak += 1
            else:
                state.reaim_streak = 0
            state.reaim_prev = new.direction.copy()
            if state.reaim_streak >= CONVERGENCE_STREAK:
                state.converged = True
        else:
            new = perturb_direction(state)
        state.current = new
        state.k += 1
    else:
        state.skip_count += 1
        if state.skip_count >= state.patience:
            state.current = perturb_direction(state)
            state.k += 1
            state.skip_count = 0

    return state, state.current
