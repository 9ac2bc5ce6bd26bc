// Thin typed client over the service API. fetch is injectable so the
// contract tests can replay recorded responses without a network.

import type {
  ConstructResponse,
  DecomposeResponse,
  SaveResponse,
  SegmentFile,
  UploadResponse,
  ValidateResponse,
  WorkflowGraph,
  WorkflowSummary,
} from "./types.js";
import { isApiError } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const body = (await response.json()) as unknown;
  if (!response.ok) {
    if (isApiError(body)) {
      throw new ApiRequestError(body.error.code, body.error.message, response.status);
    }
    throw new ApiRequestError("HttpError", `status ${response.status}`, response.status);
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private get(path: string): Promise<Response> {
    return this.fetchImpl(this.baseUrl + path);
  }

  private send(path: string, method: string, body?: unknown): Promise<Response> {
    return this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  async health(): Promise<{ status: string; segment_count: number }> {
    return parseResponse(await this.get("/health"));
  }

  async uploadWorkflow(filename: string, payload: string): Promise<UploadResponse> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/workflows?filename=${encodeURIComponent(filename)}`,
      { method: "POST", body: payload },
    );
    return parseResponse(response);
  }

  async listWorkflows(): Promise<WorkflowSummary[]> {
    const body = await parseResponse<{ workflows: WorkflowSummary[] }>(
      await this.get("/workflows"),
    );
    return body.workflows;
  }

  async getWorkflow(workflowId: string): Promise<WorkflowGraph> {
    return parseResponse(await this.get(`/workflows/${workflowId}`));
  }

  async decompose(workflowId: string): Promise<DecomposeResponse> {
    return parseResponse(await this.send(`/workflows/${workflowId}/decompose`, "POST"));
  }

  async getSegment(segmentId: string): Promise<SegmentFile> {
    return parseResponse(await this.get(`/segments/${segmentId}`));
  }

  async validateSegment(
    segmentId: string,
    update: { description?: string; graph?: unknown },
  ): Promise<ValidateResponse> {
    return parseResponse(
      await this.send(`/segments/${segmentId}`, "PUT", { ...update, validate_only: true }),
    );
  }

  async saveSegment(
    segmentId: string,
    update: { description?: string; graph?: unknown },
  ): Promise<SaveResponse> {
    return parseResponse(await this.send(`/segments/${segmentId}`, "PUT", update));
  }

  async construct(requirement: string, k?: number, theta?: number): Promise<ConstructResponse> {
    return parseResponse(await this.send("/construct", "POST", { requirement, k, theta }));
  }

  async exportWorkflow(workflowId: string, platform = "n8n"): Promise<Record<string, unknown>> {
    return parseResponse(await this.send("/export", "POST", { workflow_id: workflowId, platform }));
  }
}

// Monotonic sequence gate: panels tag each request and drop stale responses
// so a slow earlier reply can never overwrite a newer one.
export class LatestGate {
  private counter = 0;

  next(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.counter;
  }
}
