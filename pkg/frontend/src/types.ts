// JSON shapes of the control service and the building simulator.
// These mirror the wire format exactly; field names stay snake_case.

export type CallStatus = "success" | "failed" | "skipped";

export interface CallResultDoc {
  call_index: number;
  method: string;
  endpoint: string;
  status: CallStatus;
  http_status: number | null;
  response_body: string | null;
  latency_ms: number;
  error: string | null;
}

export interface ReportDoc {
  api_id: string;
  overall: "success" | "partial_failure";
  results: CallResultDoc[];
}

export interface DecisionDoc {
  status: "accepted" | "rejected";
  api_id: string | null;
  gate_similarity: number;
  class_scores: Record<string, number>;
  threshold: number;
}

export interface StepRecordDoc {
  step: number;
  duration_ms: number;
  summary: string;
}

export interface MatchedExemplarDoc {
  record_id: string;
  api_id: string;
  order: string;
  similarity: number;
}

export interface ChatResponseDoc {
  decision: DecisionDoc;
  report: ReportDoc | null;
  matched_exemplar: MatchedExemplarDoc | null;
  trace: StepRecordDoc[];
}

export interface HealthDoc {
  status: string;
  exemplars: number;
  apis: number;
}

export interface BuildingState {
  aircons: Record<string, { power: string; setpoint?: number }>;
  lights: Record<string, { power: string }>;
  elevator: { current_floor: number; last_operation: string };
  spaces: Record<string, { floor: number; ac_ids?: string[]; light_ids?: string[] }>;
}

export interface ChatMessageView {
  direction: "user" | "system";
  text: string;
  response?: ChatResponseDoc;
  timestamp: number;
}
