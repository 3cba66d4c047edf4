"""Performance and stability verification of the set-valued loop.

The normative performance criterion is the DC gain of the regulation channel:
the steady output magnitude per unit step disturbance.  The nominal value,
the worst case over all constant admissible selections, and empirical
bounded-response probes are computed here; a frequency-gridded gain sweep is
available as a diagnostic but takes no part in budget enforcement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError
from .expander import SegmentExpander
from .lti import StateSpace, dc_gain

__all__ = [
    "PerfReport",
    "nominal_perf_dc",
    "worst_case_dc",
    "stability_probe",
    "frequency_sweep",
]

DIVERGENCE_NORM = 1e6


@dataclass
class PerfReport:
    """Verification summary embedded in run manifests."""

    rho_nominal: float
    worst_dc_deviation: float
    budget_satisfied: bool
    ke_dc_residual: float
    probe_max_output: float

    def to_dict(self) -> dict:
        return {
            "rho_nominal": self.rho_nominal,
            "worst_dc_deviation": self.worst_dc_deviation,
            "budget_satisfied": self.budget_satisfied,
            "ke_dc_residual": self.ke_dc_residual,
            "probe_max_output": self.probe_max_output,
        }

    def format(self) -> str:
        lines = [f"{key} = {value}" for key, value in self.to_dict().items()]
        return "\n".join(lines)


def _norm(value) -> float:
    arr = np.atleast_2d(np.asarray(value, float))
    if arr.size == 1:
        return abs(float(arr.reshape(())))
    return float(np.linalg.norm(arr, 2))


def nominal_perf_dc(plant: StateSpace, K_e) -> float:
    """Nominal DC criterion ``|(I - Pu(0) K_e) Pw(0)|`` of the closed loop."""
    K_e = np.atleast_2d(np.asarray(K_e, float))
    Pu0 = dc_gain(plant, "u")
    Pw0 = dc_gain(plant, "w")
    return _norm((np.eye(plant.l) - Pu0 @ K_e) @ Pw0)


def ke_dc_residual(plant: StateSpace, K_e) -> float:
    """Design residual ``|I - Pu(0) K_e|`` of the gain before disturbance scaling."""
    K_e = np.atleast_2d(np.asarray(K_e, float))
    Pu0 = dc_gain(plant, "u")
    return _norm(np.eye(plant.l) - Pu0 @ K_e)


def worst_case_dc(plant: StateSpace, K_e, expander: SegmentExpander) -> float:
    """Worst DC criterion over all constant admissible selections.

    Evaluates ``|(I - Pu(0)(I + delta * direction sensor') K_e) Pw(0)|`` at
    the endpoints ``delta = +-gamma``; the expression is affine in ``delta``
    so endpoints suffice.
    """
    K_e = np.atleast_2d(np.asarray(K_e, float))
    Pu0 = dc_gain(plant, "u")
    Pw0 = dc_gain(plant, "w")
    rank_one = np.outer(expander.direction, expander.sensor)
    worst = 0.0
    for delta in (-expander.gamma, expander.gamma):
        value = _norm(
            (np.eye(plant.l) - Pu0 @ (np.eye(plant.m) + delta * rank_one) @ K_e) @ Pw0
        )
        worst = max(worst, value)
    return worst


def stability_probe(config, policy_kind: str, N: int, seed: int = 0) -> float:
    """Run ``N`` closed-loop steps under a policy and check bounded response.

    Returns ``max |y|`` over the run.  Raises :class:`InstabilityError` when
    the plant state norm exceeds ``1e6`` (never expected when the plant is
    stable and the gain static), and :class:`InstabilityError` when the
    trailing-window mean state norm at the end differs by more than 1% from
    the one at mid-run.  Windowed means are used because stochastic policies
    keep the loop persistently excited; a pointwise norm comparison would be
    meaningless there.
    """
    from .sim import run_case  # local import to avoid a module cycle

    cfg = config.replace(policy_kind=policy_kind, policy_seed=seed, horizon=N)
    trace, extras = run_case(cfg, return_extras=True)
    norms = np.asarray(extras["state_norms"])
    if np.any(norms > DIVERGENCE_NORM):
        raise InstabilityError("plant state diverged during probe")
    window = max(1, N // 10)
    mid = norms[max(0, N // 2 - window) : N // 2].mean()
    end = norms[N - window :].mean()
    if mid > 1e-12 and abs(end - mid) > 0.01 * mid:
        raise InstabilityError(
            f"state norm not settled: mid-run {mid:.6g} vs end {end:.6g}"
        )
    return float(max(abs(rec.y) for rec in trace))


def frequency_sweep(
    plant: StateSpace,
    K_e,
    expander: SegmentExpander | None = None,
    n_points: int = 400,
    w_min: float = 1e-3,
    w_max: float = 1e3,
) -> tuple[np.ndarray, np.ndarray]:
    """Diagnostic gain sweep of the regulation channel on a log grid.

    Returns ``(omega, gain)`` where ``gain[i]`` is the largest magnitude of
    ``(I - Pu(jw)(I + delta * direction sensor') K_e) Pw(jw)`` over the
    selection endpoints (``delta = 0`` only when no expander is given).
    """
    K_e = np.atleast_2d(np.asarray(K_e, float))
    omega = np.logspace(np.log10(w_min), np.log10(w_max), n_points)
    deltas = (0.0,)
    rank_one = np.zeros((plant.m, plant.m))
    if expander is not None:
        deltas = (-expander.gamma, 0.0, expander.gamma)
        rank_one = np.outer(expander.direction, expander.sensor)
    gains = np.zeros(n_points)
    I_n = np.eye(plant.n)
    for i, w in enumerate(omega):
        G = np.linalg.solve(1j * w * I_n - plant.A, np.hstack([plant.B_u, plant.B_w]))
        Pu = plant.C @ G[:, : plant.m]
        Pw = plant.C @ G[:, plant.m :]
        worst = 0.0
        for delta in deltas:
            T = (np.eye(plant.l) - Pu @ (np.eye(plant.m) + delta * rank_one) @ K_e) @ Pw
            mag = np.linalg.norm(T, 2) if T.size > 1 else abs(complex(T.reshape(())))
            worst = max(worst, float(mag))
        gains[i] = worst
    return omega, gains
