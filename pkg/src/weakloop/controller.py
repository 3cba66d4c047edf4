"""Internal-model controller that emits set-valued control candidates.

The controller keeps a copy of the control-channel plant model, drives it
with the action actually applied at the previous step, and computes the
nominal action from the disturbance estimate ``y - y_model``:

    v = K_e (r - y + y_model).

With an exact model this cancels the control contribution from the feedback
path, so the closed loop is an open cascade from ``(r, w)`` through ``K_e``
and the plant; stability then holds for *every* admissible decision.
:func:`cascade_response` evaluates that cascade directly and serves as the
closed-loop oracle.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError
from .expander import AdmissibleSet, Segment, Box
from .lti import DiscreteStateSpace, PlantState

__all__ = ["IMCController", "cascade_response"]


class IMCController:
    """Static gain plus internal plant model, producing ``(v, candidate set)``.

    Parameters
    ----------
    K_e : (m, l) array
        Static gain mapping output errors to nominal actions.
    model : DiscreteStateSpace
        Discretized control-channel plant model (the disturbance channel of
        the model is never driven).
    expander : BoxExpander | SegmentExpander | None
        Set generator applied to the nominal action; ``None`` emits the
        singleton ``{v}``.
    """

    def __init__(self, K_e, model: DiscreteStateSpace, expander=None):
        self.K_e = np.atleast_2d(np.asarray(K_e, float))
        if self.K_e.shape != (model.m, model.l):
            raise ValueError(
                f"K_e must be {model.m}x{model.l}, got {self.K_e.shape[0]}x{self.K_e.shape[1]}"
            )
        self.model = model
        self.model_state = PlantState.zero(model.n)
        self.expander = expander

    def reset(self):
        self.model_state = PlantState.zero(self.model.n)

    def step(self, r, y, u_prev) -> tuple[np.ndarray, AdmissibleSet]:
        """Advance the internal model by ``u_prev`` and emit ``(v, set)``.

        ``u_prev`` must be the action applied at the previous plant step
        (zero at the first step).  Raises :class:`NumericalError` on
        non-finite inputs.
        """
        r = np.asarray(r, float).reshape(-1)
        y = np.asarray(y, float).reshape(-1)
        u_prev = np.asarray(u_prev, float).reshape(-1)
        if not (
            np.all(np.isfinite(r))
            and np.all(np.isfinite(y))
            and np.all(np.isfinite(u_prev))
        ):
            raise NumericalError("controller received non-finite inputs")
        x = self.model.Ad @ self.model_state.x + self.model.Bd_u @ u_prev
        self.model_state = PlantState(x, self.model_state.t + 1)
        y_model = self.model.C @ x
        v = self.K_e @ (r - y + y_model)
        if self.expander is None:
            admissible = Segment(center=v, direction=np.zeros_like(v), gamma=0.0)
        else:
            admissible = self.expander.expand(v)
        return v, admissible


def cascade_response(
    plant: DiscreteStateSpace,
    K_e,
    expander,
    delta_sequence,
    r,
    w,
    N: int,
) -> np.ndarray:
    """Closed-loop output computed open-loop through the cascade form.

    Feeds the disturbance through the plant's ``w`` channel, forms
    ``v_k = K_e (r_k - y_w_k)``, applies the recorded selections, and feeds
    the resulting actions through the plant's ``u`` channel:

        y_k = [P_u u]_k + y_w_k.

    ``delta_sequence`` holds one entry per step: scalar segment parameters
    when ``expander`` is given, or raw offset vectors (``u - v``) when
    ``expander`` is ``None``.  ``r`` and ``w`` may be constants or arrays of
    length ``N``.  Used as the independent oracle for closed-loop traces.
    """
    K_e = np.atleast_2d(np.asarray(K_e, float))
    r_seq = _broadcast_signal(r, N, plant.l)
    w_seq = _broadcast_signal(w, N, plant.q)

    x_w = np.zeros(plant.n)
    x_u = np.zeros(plant.n)
    y_out = np.zeros((N, plant.l))
    for k in range(N):
        y_w = plant.C @ x_w
        y_u = plant.C @ x_u
        v = K_e @ (r_seq[k] - y_w)
        if expander is None:
            offset = (
                np.zeros(plant.m)
                if delta_sequence is None
                else np.asarray(delta_sequence[k], float).reshape(-1)
            )
            u = v + offset
        else:
            delta = 0.0 if delta_sequence is None else float(delta_sequence[k])
            u = expander.expand(v).select(delta)
        y_out[k] = y_u + y_w
        x_w = plant.Ad @ x_w + plant.Bd_w @ w_seq[k]
        x_u = plant.Ad @ x_u + plant.Bd_u @ u
    return y_out


def _broadcast_signal(sig, N: int, width: int) -> np.ndarray:
    arr = np.asarray(sig, float)
    if arr.ndim == 0:
        return np.full((N, width), float(arr))
    if arr.ndim == 1 and arr.shape[0] == N and width == 1:
        return arr.reshape(N, 1)
    if arr.ndim == 1 and arr.shape[0] == width:
        return np.tile(arr, (N, 1))
    if arr.shape == (N, width):
        return arr
    raise ValueError(f"signal shape {arr.shape} incompatible with ({N}, {width})")
