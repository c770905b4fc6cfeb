import type { BuildingState, ChatResponseDoc, HealthDoc } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** An HTTP response the service answered with a non-2xx status. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorText(response: Response): Promise<string> {
  // Service errors carry {"error": "..."}; fall back to the status line.
  try {
    const body = (await response.json()) as { error?: unknown };
    if (typeof body.error === "string" && body.error.length > 0) {
      return body.error;
    }
  } catch {
    // not JSON
  }
  return `HTTP ${response.status}`;
}

/** Thin client over the control service and the simulator's state endpoint. */
export class ServiceClient {
  constructor(
    readonly serviceUrl: string,
    readonly simulatorUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async sendChat(message: string): Promise<ChatResponseDoc> {
    const response = await this.fetchImpl(`${this.serviceUrl}/chat`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ message }),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await errorText(response));
    }
    return (await response.json()) as ChatResponseDoc;
  }

  async getState(): Promise<BuildingState> {
    const response = await this.fetchImpl(`${this.simulatorUrl}/state`);
    if (!response.ok) {
      throw new ApiError(response.status, await errorText(response));
    }
    return (await response.json()) as BuildingState;
  }

  async getHealth(): Promise<HealthDoc> {
    const response = await this.fetchImpl(`${this.serviceUrl}/healthz`);
    if (!response.ok) {
      throw new ApiError(response.status, await errorText(response));
    }
    return (await response.json()) as HealthDoc;
  }
}
