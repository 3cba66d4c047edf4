"""Continuous-time LTI plants, exact zero-order-hold discretization, and DC gains.

The plant convention throughout the package is

    dx/dt = A x + B_u u + B_w w,      y = C x,

with a control channel ``u`` and a disturbance channel ``w``.  Discretization
is exact for piecewise-constant inputs (zero-order hold), so step simulation
of the discrete system reproduces the continuous response at the sample
instants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DiscretizationError, SingularityError, StabilityError

__all__ = [
    "StateSpace",
    "DiscreteStateSpace",
    "PlantState",
    "is_hurwitz",
    "zoh_discretize",
    "dc_gain",
    "discrete_dc_gain",
    "step",
]


def _as_matrix(value, rows=None, cols=None, name="matrix") -> np.ndarray:
    m = np.atleast_2d(np.asarray(value, dtype=float))
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"{name} must have {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"{name} must have {cols} columns, got {m.shape[1]}")
    return m


@dataclass
class StateSpace:
    """Continuous-time plant with separate control and disturbance inputs.

    Parameters
    ----------
    A : (n, n) array
        State matrix.
    B_u : (n, m) array
        Control input matrix.
    B_w : (n, q) array
        Disturbance input matrix.
    C : (l, n) array
        Output matrix.
    """

    A: np.ndarray
    B_u: np.ndarray
    B_w: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        self.A = _as_matrix(self.A, name="A")
        n = self.A.shape[0]
        if self.A.shape[1] != n:
            raise ValueError("A must be square")
        self.B_u = _as_matrix(self.B_u, rows=n, name="B_u")
        self.B_w = _as_matrix(self.B_w, rows=n, name="B_w")
        self.C = _as_matrix(self.C, cols=n, name="C")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B_u.shape[1]

    @property
    def q(self) -> int:
        return self.B_w.shape[1]

    @property
    def l(self) -> int:
        return self.C.shape[0]


@dataclass
class DiscreteStateSpace:
    """Zero-order-hold discretization of a :class:`StateSpace` at period ``dt``."""

    Ad: np.ndarray
    Bd_u: np.ndarray
    Bd_w: np.ndarray
    C: np.ndarray
    dt: float

    def __post_init__(self):
        self.Ad = _as_matrix(self.Ad, name="Ad")
        n = self.Ad.shape[0]
        self.Bd_u = _as_matrix(self.Bd_u, rows=n, name="Bd_u")
        self.Bd_w = _as_matrix(self.Bd_w, rows=n, name="Bd_w")
        self.C = _as_matrix(self.C, cols=n, name="C")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @property
    def n(self) -> int:
        return self.Ad.shape[0]

    @property
    def m(self) -> int:
        return self.Bd_u.shape[1]

    @property
    def q(self) -> int:
        return self.Bd_w.shape[1]

    @property
    def l(self) -> int:
        return self.C.shape[0]


@dataclass
class PlantState:
    """State vector and step index of a simulated plant."""

    x: np.ndarray
    t: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(-1)

    @classmethod
    def zero(cls, n: int) -> "PlantState":
        return cls(np.zeros(n), 0)


def is_hurwitz(A: np.ndarray, tol: float = 0.0) -> bool:
    """True when all eigenvalues of ``A`` have real part < ``-tol``."""
    return bool(np.all(np.linalg.eigvals(np.atleast_2d(A)).real < -tol))


def _is_nilpotent_like(A: np.ndarray, tol: float = 1e-9) -> bool:
    # Integrator chains: every eigenvalue at the origin.
    return bool(np.all(np.abs(np.linalg.eigvals(np.atleast_2d(A))) < tol))


def zoh_discretize(sys: StateSpace, dt: float) -> DiscreteStateSpace:
    """Exact zero-order-hold discretization of both input channels.

    Uses the block-augmented matrix exponential

        exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]],

    which equals ``Bd = A^-1 (Ad - I) B`` when ``A`` is invertible and also
    covers integrator plants with singular ``A``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not all(
        np.all(np.isfinite(M)) for M in (sys.A, sys.B_u, sys.B_w, sys.C)
    ):
        raise DiscretizationError("plant matrices contain non-finite entries")
    if not (is_hurwitz(sys.A) or _is_nilpotent_like(sys.A)):
        raise StabilityError(
            "plant A matrix must be Hurwitz (or an integrator) before discretization"
        )
    n = sys.n
    B = np.hstack([sys.B_u, sys.B_w])
    p = B.shape[1]
    M = np.zeros((n + p, n + p))
    M[:n, :n] = sys.A
    M[:n, n:] = B
    Phi = expm(M * dt)
    Ad = Phi[:n, :n]
    Bd = Phi[:n, n:]
    if not (np.all(np.isfinite(Ad)) and np.all(np.isfinite(Bd))):
        raise DiscretizationError("matrix exponential produced non-finite entries")
    return DiscreteStateSpace(
        Ad=Ad,
        Bd_u=Bd[:, : sys.m],
        Bd_w=Bd[:, sys.m :],
        C=sys.C.copy(),
        dt=float(dt),
    )


def dc_gain(sys: StateSpace, channel: str = "u") -> np.ndarray:
    """Steady-state gain ``-C A^-1 B`` of the chosen input channel.

    ``channel`` is ``"u"`` for the control input or ``"w"`` for the
    disturbance input.  Raises :class:`SingularityError` when ``A`` is
    singular (an integrator has no finite DC gain).
    """
    if channel == "u":
        B = sys.B_u
    elif channel == "w":
        B = sys.B_w
    else:
        raise ValueError(f"unknown channel {channel!r}")
    try:
        X = np.linalg.solve(sys.A, B)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("A is singular; DC gain undefined") from exc
    if not np.all(np.isfinite(X)):
        raise SingularityError("A is numerically singular; DC gain undefined")
    return -sys.C @ X


def discrete_dc_gain(sysd: DiscreteStateSpace, channel: str = "u") -> np.ndarray:
    """Steady-state gain ``C (I - Ad)^-1 Bd`` of the discretized system."""
    B = sysd.Bd_u if channel == "u" else sysd.Bd_w
    try:
        X = np.linalg.solve(np.eye(sysd.n) - sysd.Ad, B)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("I - Ad is singular; DC gain undefined") from exc
    return sysd.C @ X


def step(
    sysd: DiscreteStateSpace,
    state: PlantState,
    u: np.ndarray,
    w: np.ndarray,
) -> tuple[PlantState, np.ndarray]:
    """Advance one sample: ``x+ = Ad x + Bd_u u + Bd_w w``, ``y = C x``.

    The output is computed from the state *before* the update, so the loop
    is strictly causal through the plant: the controller may use ``y`` at
    step ``k`` without creating an algebraic loop.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    w = np.asarray(w, dtype=float).reshape(-1)
    if u.shape[0] != sysd.m:
        raise ValueError(f"u must have length {sysd.m}, got {u.shape[0]}")
    if w.shape[0] != sysd.q:
        raise ValueError(f"w must have length {sysd.q}, got {w.shape[0]}")
    y = sysd.C @ state.x
    x_next = sysd.Ad @ state.x + sysd.Bd_u @ u + sysd.Bd_w @ w
    return PlantState(x_next, state.t + 1), y
