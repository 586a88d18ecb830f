import type { DetectionFile, InferenceReport, SolveResponse } from "./types.js";

/** What the session needs from the service.  solveRaw keeps the exact body
 * text so exports can be byte-identical to what the server sent. */
export interface ApiClient {
  infer(detections: DetectionFile): Promise<InferenceReport>;
  solveRaw(spec: unknown, samples: number): Promise<{ parsed: SolveResponse; raw: string }>;
}

export class ApiRequestError extends Error {
  readonly code: string;
  readonly fieldPath?: string;

  constructor(code: string, detail: string, fieldPath?: string) {
    super(detail);
    this.code = code;
    this.fieldPath = fieldPath;
  }
}

async function throwApiError(res: Response): Promise<never> {
  let code = `http_${res.status}`;
  let detail = res.statusText;
  let fieldPath: string | undefined;
  try {
    const body = await res.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      detail = body.detail ?? detail;
      fieldPath = body.field_path;
    }
  } catch {
    // non-JSON error body; keep the HTTP status fallback
  }
  throw new ApiRequestError(code, detail, fieldPath);
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly base: string = "") {}

  async infer(detections: DetectionFile): Promise<InferenceReport> {
    const res = await fetch(`${this.base}/api/infer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(detections),
    });
    if (!res.ok) await throwApiError(res);
    return (await res.json()) as InferenceReport;
  }

  async solveRaw(spec: unknown, samples: number): Promise<{ parsed: SolveResponse; raw: string }> {
    const res = await fetch(`${this.base}/api/solve?samples=${samples}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(spec),
    });
    if (!res.ok) await throwApiError(res);
    const raw = await res.text();
    return { parsed: JSON.parse(raw) as SolveResponse, raw };
  }
}
