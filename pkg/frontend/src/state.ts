// View-model state and the pure transitions driving the console.  The server
// is the source of truth: the view only advances when a server response
// lands, and the slider can never encode a value outside [-gamma, gamma].

import type { BaselinePayload, SegmentGeometry, SessionState, SetGeometry } from "./types";

export interface SessionView {
  sessionId: string | null;
  status: "connecting" | "awaiting_decision" | "done";
  step: number;
  segment: SegmentGeometry | null;
  sliderDelta: number;
  y: number | null;
  yHistory: number[];
  fHistory: number[];
  gammaHistory: number[];
  deltaRho: number;
  configHash: string;
  error: string | null;
  rejectedSet: SetGeometry | null;
  baselines: BaselinePayload | null;
  baselineWarning: string | null;
}

export const initialView: SessionView = {
  sessionId: null,
  status: "connecting",
  step: 0,
  segment: null,
  sliderDelta: 0,
  y: null,
  yHistory: [],
  fHistory: [],
  gammaHistory: [],
  deltaRho: 0.2,
  configHash: "",
  error: null,
  rejectedSet: null,
  baselines: null,
  baselineWarning: null,
};

export function clampDelta(delta: number, gamma: number): number {
  if (Number.isNaN(delta)) return 0;
  return Math.min(gamma, Math.max(-gamma, delta));
}

export interface SliderRange {
  min: number;
  max: number;
  disabled: boolean;
}

/** Slider limits for the pending set: exactly [-gamma, gamma], disabled when
 * the segment degenerates to the single point {v}. */
export function sliderRange(segment: SegmentGeometry | null): SliderRange {
  if (segment === null) {
    return { min: 0, max: 0, disabled: true };
  }
  const reach = Math.hypot(...segment.direction) * segment.gamma;
  if (reach === 0) {
    return { min: 0, max: 0, disabled: true };
  }
  return { min: -segment.gamma, max: segment.gamma, disabled: false };
}

export function applyServerState(view: SessionView, state: SessionState): SessionView {
  const segment = state.set && state.set.kind === "segment" ? state.set : null;
  return {
    ...view,
    sessionId: state.id,
    status: state.status,
    step: state.t,
    segment,
    sliderDelta: segment ? clampDelta(view.sliderDelta, segment.gamma) : 0,
    y: state.y,
    yHistory: state.y_history,
    fHistory: state.f_so_far,
    gammaHistory:
      segment && state.status === "awaiting_decision"
        ? [...view.gammaHistory.slice(0, state.t), segment.gamma]
        : view.gammaHistory,
    deltaRho: state.delta_rho,
    configHash: state.config_hash,
    error: null,
    rejectedSet: null,
  };
}

export function applyRejection(
  view: SessionView,
  message: string,
  set: SetGeometry | null,
): SessionView {
  // State does not advance: the server refused the action.
  return { ...view, error: message, rejectedSet: set };
}

export function applyBaselines(
  view: SessionView,
  payload: BaselinePayload | null,
  failure?: string,
): SessionView {
  if (payload === null) {
    return {
      ...view,
      baselines: null,
      baselineWarning: failure ?? "baselines unavailable; overlay hidden",
    };
  }
  if (payload.config_hash !== view.configHash) {
    return {
      ...view,
      baselines: payload,
      baselineWarning: "baseline config differs from this session",
    };
  }
  return { ...view, baselines: payload, baselineWarning: null };
}

export function steadyMean(values: number[], frac = 0.1): number {
  if (values.length === 0) return NaN;
  const n = Math.max(1, Math.round(values.length * frac));
  const tail = values.slice(-n);
  return tail.reduce((a, b) => a + b, 0) / tail.length;
}

/** Steady costs of the overlay curves; `ordered` is the headline claim the
 * overlay makes: learning <= fixed set <= no freedom. */
export function baselineOrdering(payload: BaselinePayload): {
  f2: number;
  f3: number;
  f4: number;
  ordered: boolean;
} {
  const f2 = steadyMean(payload.cases["2"]?.f ?? []);
  const f3 = steadyMean(payload.cases["3"]?.f ?? []);
  const f4 = steadyMean(payload.cases["4"]?.f ?? []);
  return { f2, f3, f4, ordered: f4 <= f3 && f3 <= f2 };
}
