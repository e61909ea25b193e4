/** Payload types mirroring the session service JSON, field for field. */

export type Triple = [number, number, number];
export type XY = [number, number];

export interface SessionSummary {
  session_id: string;
  name: string;
  scenario_set: string;
  phase: string;
  participants: { participant_id: string; display_name: string; role: string }[];
  agreed_scenario_id: number | null;
  constraints: ConstraintDoc[];
  event_count: number;
}

export interface ConstraintDoc {
  axis: "a" | "b" | "c";
  kind: "min" | "max";
  value: number;
}

export interface ChoiceDoc {
  scenario_id: number;
  raw: { social: number; environmental: number; economic_cost: number };
  generation_mix: Triple;
  normalized?: Triple;
  point?: Triple;
  point_xy?: XY;
}

export interface QuestionDoc {
  done: boolean;
  question_id?: string;
  choice_a?: ChoiceDoc;
  choice_b?: ChoiceDoc;
  asked_count: number;
  converged: boolean;
}

export interface AnswerResult {
  status: "recorded" | "duplicate";
  question_id: string;
  asked_count?: number;
  converged?: boolean;
}

export interface PreferenceDoc {
  participant_id: string;
  map_estimate: Triple;
  map_xy: XY;
  credible_region_diameter: number;
  converged: boolean;
  response_count: number;
}

export interface IntentMemberDoc {
  participant_id: string;
  point: Triple;
  xy: XY;
}

export interface IntentGroupDoc {
  group_id: number;
  member_ids: string[];
  size: number;
  is_majority: boolean;
  aggregation_point: Triple;
  aggregation_xy: XY;
  members: IntentMemberDoc[];
}

export interface IntentDoc {
  session_id?: string;
  groups: IntentGroupDoc[];
}

export interface SegmentDoc {
  start: Triple;
  end: Triple;
  start_xy: XY;
  end_xy: XY;
  held_coordinate: string | null;
}

export interface CompromisePathDoc {
  via: Triple;
  via_xy: XY;
  held_axes: [string, string];
  total_length: number;
  segments: SegmentDoc[];
}

export interface GeometryDoc {
  reference_point: Triple;
  reference_point_xy: XY;
  groups: {
    group_id: number;
    size: number;
    is_majority: boolean;
    aggregation_point: Triple;
    aggregation_xy: XY;
  }[];
  conflict_segments: SegmentDoc[];
  compromise_paths: { from_group: number; to_group: number; paths: CompromisePathDoc[] }[];
  candidate_region: { vertices: Triple[]; vertices_xy: XY[]; area: number };
  applied_constraints: ConstraintDoc[];
}

export interface SocialChoiceDoc {
  target_point: Triple;
  target_xy: XY;
  chosen_scenario_id: number;
  weights_used: [number, number];
  dimension_ratio_used: number;
}

export interface ConsensusDoc {
  session_id: string;
  geometry: GeometryDoc;
  social_choice: SocialChoiceDoc | null;
  dims_total: number;
  dims_minority_respected: number;
}

export interface AlertDoc {
  alert_id: string;
  distance: number;
  observed_mix: Triple;
  agreed_mix: Triple;
}

export interface InterventionDoc {
  status: "ok" | "not_ready";
  intervention: {
    participant_id: string;
    tier: number;
    ratio: number;
    message_key: string;
  } | null;
}

export interface ApiError {
  code: string;
  message: string;
  detail: unknown;
}
