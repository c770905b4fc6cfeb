import type {
  BuildingState,
  CallResultDoc,
  CallStatus,
  ChatResponseDoc,
  StepRecordDoc,
} from "./types.js";

/** One glyph per call outcome: ran, broke, or never dispatched. */
export function callGlyph(status: CallStatus): string {
  switch (status) {
    case "success":
      return "✓";
    case "failed":
      return "✗";
    case "skipped":
      return "–";
  }
}

/** One line per executed call, in report order. */
export function callLines(results: CallResultDoc[]): string[] {
  return results.map((result) => {
    const head = `${callGlyph(result.status)} ${result.method} ${result.endpoint}`;
    if (result.status === "success") {
      return `${head} (${result.http_status})`;
    }
    if (result.error !== null && result.error !== "") {
      return `${head} (${result.error})`;
    }
    return head;
  });
}

/** Headline for a chat answer: what was routed, or why nothing ran. */
export function decisionHeadline(response: ChatResponseDoc): string {
  const decision = response.decision;
  if (decision.status === "accepted") {
    const similarity = decision.gate_similarity.toFixed(3);
    return `routed to ${decision.api_id} (similarity ${similarity})`;
  }
  const similarity = decision.gate_similarity.toFixed(3);
  const threshold = decision.threshold.toFixed(2);
  return `not a building command (similarity ${similarity} below ${threshold})`;
}

/** Pipeline steps as "1. summary (0.12ms)" lines. */
export function traceLines(trace: StepRecordDoc[]): string[] {
  return trace.map(
    (step) => `${step.step}. ${step.summary} (${step.duration_ms.toFixed(2)}ms)`,
  );
}

export interface PanelRow {
  label: string;
  value: string;
}

function powerWord(power: string): string {
  return power === "on" ? "on" : "off";
}

/** Device panel rows grouped by space, elevator last. */
export function panelRows(state: BuildingState): PanelRow[] {
  const rows: PanelRow[] = [];
  const spaceIds = Object.keys(state.spaces).sort();
  for (const spaceId of spaceIds) {
    const space = state.spaces[spaceId];
    for (const acId of space.ac_ids ?? []) {
      const aircon = state.aircons[acId];
      if (aircon === undefined) continue;
      let value = powerWord(aircon.power);
      if (aircon.setpoint !== undefined) {
        value += ` at ${aircon.setpoint}°C`;
      }
      rows.push({ label: `${spaceId} aircon ${acId}`, value });
    }
    for (const lightId of space.light_ids ?? []) {
      const light = state.lights[lightId];
      if (light === undefined) continue;
      rows.push({ label: `${spaceId} light ${lightId}`, value: powerWord(light.power) });
    }
  }
  rows.push({ label: "elevator", value: elevatorLine(state) });
  return rows;
}

/** "floor 3" plus the last movement when one was recorded. */
export function elevatorLine(state: BuildingState): string {
  const elevator = state.elevator;
  if (elevator.last_operation === "") {
    return `floor ${elevator.current_floor}`;
  }
  return `floor ${elevator.current_floor} (last: ${elevator.last_operation})`;
}
