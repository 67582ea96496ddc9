/** Typed client for the annotation HTTP API.
 *
 * The server contract (field names are fixed):
 *   GET  /api/queue               -> QueueSummary[]
 *   GET  /api/item/{id}           -> ItemDetail          (404 when gone)
 *   POST /api/item/{id}/annotate  -> AnnotateResponse    (404 / 422 on errors)
 *   GET  /api/progress            -> Progress
 */

export interface QueueSummary {
  id: string;
  lp: number;
  session: number;
  date: string;
  rule: string;
  sentence: string;
  reasons: string[];
}

export interface Candidate {
  member_id: string;
  name: string;
  party: string | null;
  gender: string;
  lps_served: number[];
}

export interface ItemState {
  cause: string | null;
  resolved_member: string | null;
  status: string;
}

export interface ItemDetail extends QueueSummary {
  trigger_text: string | null;
  candidates: Candidate[];
  state: ItemState;
}

export interface Progress {
  pending: number;
  resolved: number;
  rejected: number;
}

export interface AnnotatePayload {
  cause?: string;
  resolved_member?: string;
  status_override?: "confirmed" | "rejected";
  annotator: string;
  note?: string;
}

export interface AnnotateResponse {
  ok: boolean;
  item: ItemDetail | null;
  progress: Progress;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}

export class AnnotationApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  queue(): Promise<QueueSummary[]> {
    return this.get<QueueSummary[]>("/api/queue");
  }

  item(id: string): Promise<ItemDetail> {
    return this.get<ItemDetail>(`/api/item/${encodeURIComponent(id)}`);
  }

  progress(): Promise<Progress> {
    return this.get<Progress>("/api/progress");
  }

  async annotate(id: string, payload: AnnotatePayload): Promise<AnnotateResponse> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/item/${encodeURIComponent(id)}/annotate`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      },
    );
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as AnnotateResponse;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, { method: "GET" });
    if (!response.ok) throw new ApiError(response.status, await detailOf(response));
    return (await response.json()) as T;
  }
}
