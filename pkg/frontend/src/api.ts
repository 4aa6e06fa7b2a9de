// Typed client for the gateway's JSON endpoints. The panel never talks
// to anything else; all state on screen derives from these responses.

export interface GatewayEvent {
  id: number;
  camera: string;
  message: string;
  snapshot: string;
  created_at: number;
  channel: string;
  status: string;
}

export interface EventsPage {
  events: GatewayEvent[];
  now: number;
}

export interface DoorSnapshot {
  state: "locked" | "unlocked";
  relock_deadline: number | null;
  powered: boolean;
  now: number;
}

export interface ProfileImage {
  data: string; // base64 PNG
  box?: [number, number, number, number];
}

export interface EnrollResult {
  accepted: number;
  guidance: string[];
  person_id?: string;
  model_version?: number;
}

export interface RecordingSegment {
  id: number;
  camera: string;
  start_ms: number;
  end_ms: number;
  snapshot: string;
  frame_count: number;
}

export interface RecordingsPage {
  segments: RecordingSegment[];
  message?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`gateway ${status}: ${detail}`);
  }
}

interface TokenStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const TOKEN_KEY = "safegate.token";

export class GatewayClient {
  constructor(
    private readonly base: string = "",
    private readonly storage: TokenStore | null = typeof localStorage === "undefined"
      ? null
      : localStorage,
  ) {}

  get token(): string {
    return this.storage?.getItem(TOKEN_KEY) ?? "";
  }

  setToken(value: string): void {
    this.storage?.setItem(TOKEN_KEY, value.trim());
  }

  mediaUrl(relPath: string): string {
    return `${this.base}/media/${relPath}`;
  }

  async events(since?: number, limit?: number): Promise<EventsPage> {
    const params = new URLSearchParams();
    if (since !== undefined) params.set("since", String(since));
    if (limit !== undefined) params.set("limit", String(limit));
    const query = params.toString();
    return this.request("GET", `/events${query ? `?${query}` : ""}`);
  }

  async door(): Promise<DoorSnapshot> {
    return this.request("GET", "/door");
  }

  async doorCommand(command: "open" | "close"): Promise<DoorSnapshot> {
    return this.request("POST", "/door", { command }, true);
  }

  async enroll(name: string, contact: string, images: ProfileImage[]): Promise<EnrollResult> {
    try {
      return await this.request("POST", "/profile", { name, contact, images });
    } catch (err) {
      // 422 means no usable image; the body still carries the per-image
      // labels the wizard needs to show
      if (err instanceof ApiError && err.status === 422 && err.payload?.guidance) {
        return { accepted: 0, guidance: err.payload.guidance as string[] };
      }
      throw err;
    }
  }

  async recordings(date: string, time: string, windowMin?: number): Promise<RecordingsPage> {
    const params = new URLSearchParams({ date, time });
    if (windowMin !== undefined) params.set("window", String(windowMin));
    return this.request("GET", `/recordings?${params.toString()}`);
  }

  async emergency(note: string): Promise<{ status: string }> {
    return this.request("POST", "/emergency", note ? { note } : {}, true);
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
    auth = false,
  ): Promise<any> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (auth) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: any = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const detail =
        payload && typeof payload.detail === "string" ? payload.detail : response.statusText;
      const error = new ApiError(response.status, detail);
      error.payload = payload;
      throw error;
    }
    return payload;
  }
}

// carries the parsed error body (e.g. guidance labels on 422)
export interface ApiError {
  payload?: any;
}
