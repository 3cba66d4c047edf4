// Wire types mirroring the session service JSON payloads, field for field.

export interface SegmentGeometry {
  kind: "segment";
  center: number[];
  direction: number[];
  gamma: number;
}

export interface BoxGeometry {
  kind: "box";
  center: number[];
  half_lengths: number[];
}

export type SetGeometry = SegmentGeometry | BoxGeometry;

export interface SessionState {
  id: string;
  status: "awaiting_decision" | "done";
  t: number;
  y: number | null;
  v: number[] | null;
  set: SetGeometry | null;
  gamma: number | null;
  f_so_far: number[];
  y_history: number[];
  delta_rho: number;
  config_hash: string;
}

export interface RejectionBody {
  error: string;
  set?: SetGeometry | null;
}

export interface BaselineCurves {
  t: number[];
  y: number[];
  f: number[];
}

export interface BaselinePayload {
  config_hash: string;
  cases: Record<string, BaselineCurves>;
}
