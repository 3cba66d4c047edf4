"""Decision-maker policies that pick one action from an admissible set.

The loop treats the decision maker as a black box constrained only by set
membership.  Policies here cover the cases needed for experiments: the
nominal selection, a rational quadratic optimizer (with closed forms for
segments and boxes), seeded random selection, a worst-case endpoint probe,
and an externally fed selection for interactive sessions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecisionPendingError, OptimizationError
from .expander import AdmissibleSet, Box, Segment

__all__ = [
    "QuadraticCost",
    "NominalPolicy",
    "OptimizerPolicy",
    "RandomPolicy",
    "ExtremePolicy",
    "ExternalPolicy",
    "decide",
    "minimize_on_segment",
    "minimize_on_box",
]


@dataclass(frozen=True)
class QuadraticCost:
    """Strictly convex cost ``f(u) = u'Qu - c'u`` with symmetric SPD ``Q``."""

    Q: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Q", np.atleast_2d(np.asarray(self.Q, float)))
        object.__setattr__(self, "c", np.asarray(self.c, float).reshape(-1))
        if self.Q.shape[0] != self.Q.shape[1]:
            raise ValueError("Q must be square")
        if self.Q.shape[0] != self.c.shape[0]:
            raise ValueError("Q and c dimensions must match")
        if not np.allclose(self.Q, self.Q.T, rtol=1e-10, atol=1e-12):
            raise ValueError("Q must be symmetric")
        # Positive definiteness via Cholesky.
        try:
            np.linalg.cholesky(self.Q)
        except np.linalg.LinAlgError as exc:
            raise ValueError("Q must be positive definite") from exc

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def value(self, u) -> float:
        u = np.asarray(u, float).reshape(-1)
        return float(u @ self.Q @ u - self.c @ u)

    def gradient(self, u) -> np.ndarray:
        u = np.asarray(u, float).reshape(-1)
        return 2.0 * (self.Q @ u) - self.c

    def unconstrained_minimizer(self) -> np.ndarray:
        """Stationary point of the cost: ``u = Q^-1 c / 2``."""
        return 0.5 * np.linalg.solve(self.Q, self.c)


def minimize_on_segment(
    cost: QuadraticCost,
    center: np.ndarray,
    direction: np.ndarray,
    delta_max: float,
) -> tuple[np.ndarray, float]:
    """Minimize the cost over ``{center + delta * direction, |delta| <= delta_max}``.

    The restriction ``g(delta) = f(center + delta d)`` is a scalar quadratic
    ``a delta^2 + b delta + const`` with ``a = d'Qd >= 0``; the minimizer is
    the clamped stationary point.  Returns ``(u, delta)``.
    """
    if delta_max < 0:
        raise ValueError("delta_max must be non-negative")
    center = np.asarray(center, float).reshape(-1)
    d = np.asarray(direction, float).reshape(-1)
    a = float(d @ cost.Q @ d)
    b = float(d @ cost.gradient(center))
    if a > 0:
        delta = float(np.clip(-b / (2.0 * a), -delta_max, delta_max))
    elif b == 0.0:
        delta = 0.0
    else:
        delta = -delta_max * float(np.sign(b))
    return center + delta * d, delta


def minimize_on_box(
    cost: QuadraticCost,
    center: np.ndarray,
    half_lengths: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> np.ndarray:
    """Minimize the cost over an axis-aligned box.

    With diagonal ``Q`` the problem separates and the answer is the per-axis
    clamp of the unconstrained minimizer.  Otherwise projected gradient
    descent with step ``1/lambda_max`` of the Hessian ``2Q`` is used; the
    projection problem is convex so convergence is guaranteed at that step.
    """
    center = np.asarray(center, float).reshape(-1)
    h = np.asarray(half_lengths, float).reshape(-1)
    if np.any(h < 0):
        raise ValueError("half_lengths must be non-negative")
    lo, hi = center - h, center + h
    ustar = cost.unconstrained_minimizer()
    if np.count_nonzero(cost.Q - np.diag(np.diagonal(cost.Q))) == 0:
        return np.clip(ustar, lo, hi)
    lam_max = float(np.linalg.eigvalsh(cost.Q)[-1])
    alpha = 1.0 / (2.0 * lam_max)
    u = np.clip(center, lo, hi)
    for _ in range(max_iter):
        u_next = np.clip(u - alpha * cost.gradient(u), lo, hi)
        if np.linalg.norm(u_next - u) < tol:
            return u_next
        u = u_next
    raise OptimizationError(
        f"projected gradient did not converge within {max_iter} iterations"
    )


class NominalPolicy:
    """Always picks the set center (the nominal action)."""

    def decide(self, admissible: AdmissibleSet) -> np.ndarray:
        return admissible.center.copy()


class OptimizerPolicy:
    """Rational decision maker: minimizes a quadratic cost over the set."""

    def __init__(self, cost: QuadraticCost):
        self.cost = cost

    def decide(self, admissible: AdmissibleSet) -> np.ndarray:
        if isinstance(admissible, Segment):
            u, _ = minimize_on_segment(
                self.cost, admissible.center, admissible.direction, admissible.gamma
            )
            return u
        return minimize_on_box(self.cost, admissible.center, admissible.half_lengths)


class RandomPolicy:
    """Uniformly random admissible selection from a seeded generator."""

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    def decide(self, admissible: AdmissibleSet) -> np.ndarray:
        if isinstance(admissible, Segment):
            delta = self.rng.uniform(-admissible.gamma, admissible.gamma)
            return admissible.select(delta)
        delta = self.rng.uniform(-1.0, 1.0, size=admissible.dim)
        return admissible.select(delta)


class ExtremePolicy:
    """Deterministic worst-case probe for the steady-output budget.

    Picks the set point maximizing the predicted output deviation
    ``|dc_gain_u . (u - center)|``, breaking the segment-endpoint tie toward
    a positive deviation.
    """

    def __init__(self, dc_gain_u: np.ndarray):
        self.dc_gain_u = np.asarray(dc_gain_u, float).reshape(-1)

    def decide(self, admissible: AdmissibleSet) -> np.ndarray:
        g = self.dc_gain_u
        if isinstance(admissible, Segment):
            proj = float(g @ admissible.direction)
            sign = 1.0 if proj >= 0 else -1.0
            return admissible.select(sign * admissible.gamma)
        signs = np.where(g >= 0, 1.0, -1.0)
        return admissible.select(signs)


class ExternalPolicy:
    """Mailbox for selections supplied by a service or UI, one per step."""

    def __init__(self):
        self._pending = None

    def submit(self, u: np.ndarray):
        self._pending = np.asarray(u, float).reshape(-1)

    def decide(self, admissible: AdmissibleSet) -> np.ndarray:
        if self._pending is None:
            raise DecisionPendingError("no selection submitted for this step")
        u, self._pending = self._pending, None
        return u


def decide(policy, admissible: AdmissibleSet) -> np.ndarray:
    """Apply a policy to an admissible set, returning the chosen action."""
    return policy.decide(admissible)
