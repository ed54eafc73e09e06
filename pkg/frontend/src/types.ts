/** Wire types of the control service API (v1). */

export interface Pose {
  theta: number;
  phi: number;
  rail_mm: number;
  moving: boolean;
}

export interface Status {
  pose: Pose;
  active_run_id: string | null;
}

export type RunPhase =
  | "created"
  | "running"
  | "paused"
  | "completed"
  | "aborted"
  | "failed";

export interface RunState {
  run_id: string;
  phase: RunPhase;
  completed_positions: number;
  total_positions: number;
  current_pose: Pose;
  last_error: string | null;
}

export interface SourceField {
  name: string;
  type: "float" | "int" | "str";
  required: boolean;
  default: number | string | null;
}

export interface SourceInfo {
  name: string;
  fields: SourceField[];
}

export interface ScanForm {
  theta_step: number;
  phi_step: number;
  theta_extent: number;
  phi_extent: number;
  samples_per_position: number;
}

export interface CreateRunRequest {
  run_id: string;
  scan: ScanForm;
  source_name: string;
  source_config: Record<string, number | string>;
  seed: number;
}

export interface PreviewPoint {
  theta: number;
  mean_cm: number;
}

export interface Preview {
  run_id: string;
  phase: RunPhase;
  completed: number;
  total: number;
  phi: number;
  points: PreviewPoint[];
}

export interface ApiErrorBody {
  error: string;
  message: string;
}

/** Derived view of one run: everything shown is traceable to an API field. */
export interface RunView {
  state: RunState;
  percent: number; // completed/total, in [0, 100]
}

export function toRunView(state: RunState): RunView {
  const percent =
    state.total_positions > 0
      ? (100 * state.completed_positions) / state.total_positions
      : 0;
  return { state, percent };
}
