/**
 * Typed client for the /v1 API. Every call goes through request(), which
 * attaches the bearer session and converts problem-details responses into
 * ApiError so views can render field-level messages.
 */

export interface ProblemDetails {
  code: string;
  message: string;
  field?: string;
  errors?: { code: string; field?: string; message: string }[];
  preview?: { title: string; body: string };
  findings?: { kind: string; span: [number, number] }[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly problem: ProblemDetails,
  ) {
    super(problem.message || problem.code);
  }

  fieldMessage(field: string): string | null {
    if (this.problem.field === field) return this.problem.message;
    const hit = this.problem.errors?.find((e) => e.field === field);
    return hit ? hit.message || hit.code : null;
  }
}

export interface Profile {
  worker_id: string;
  username: string;
  role: string;
  platforms: string[];
}

export interface EvidenceSummary {
  entry_id: string;
  work_date: string;
  duration_minutes: number;
  income_amount: string;
  city?: string;
}

export interface VisibleStory {
  story_id: string;
  display_name: string;
  story_type: string;
  tags: string[];
  title: string;
  body: string;
  audience: string[];
  created_at: string;
  platforms: string[];
  edited: boolean;
  like_count: number;
  liked_by_viewer: boolean;
  media: string | null;
  is_own: boolean;
  evidence: EvidenceSummary[];
}

export interface FeedPage {
  items: VisibleStory[];
  next_cursor: string | null;
}

export interface StoryDraftBody {
  story_type: string;
  tags: string[];
  title?: string;
  body?: string;
  display_mode?: string;
  audience: string[];
  evidence?: string[];
  acknowledge_redaction?: boolean;
}

export interface TrendsReport {
  range: { from: string; to: string };
  total_income: string;
  total_expenses: string;
  net_earnings: string;
  hours_worked: string;
  hourly_rate: string;
  zero_hours: boolean;
  daily_by_month: Record<string, string>;
  weekly_series: { week: string; income: string }[];
  hourly_profile: string[];
  paid_time_share: string;
}

export interface InsightCell {
  cohort_key: string;
  suppressed?: boolean;
  count?: number;
  value?: string;
}

export interface InsightTable {
  dimension: string;
  breakdown_attribute: string;
  k: number;
  cells: InsightCell[];
  self_marker: string | null;
}

export interface Projection {
  total_expected: string;
  confidence: string;
  per_slot: { weekday: number; hour: number; expected: string }[];
}

export interface ImportReport {
  accepted: number;
  duplicates: number;
  rejected: { line: number; error: string }[];
  source_digest: string;
}

export interface TaxInfo {
  resources: {
    title: string;
    audience: string;
    platform: string | null;
    url: string | null;
    body: string | null;
    tax_day_relevant: boolean;
  }[];
  next_tax_day: { date: string; label: string } | null;
}

export interface ManagedData {
  stories: Record<string, unknown>[];
  incomes: Record<string, unknown>[];
  expenses: Record<string, unknown>[];
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown, contentType = "application/json"): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let payload: string | undefined;
    if (body !== undefined) {
      headers["Content-Type"] = contentType;
      payload = contentType === "application/json" ? JSON.stringify(body) : (body as string);
    }
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, { method, headers, body: payload });
    if (resp.status === 204) return undefined as T;
    const data = await resp.json().catch(() => ({ code: "BAD_RESPONSE", message: `HTTP ${resp.status}` }));
    if (!resp.ok) throw new ApiError(resp.status, data as ProblemDetails);
    return data as T;
  }

  redeemInvite(token: string, username: string, demographics?: Record<string, string>) {
    return this.request<{ session_token: string; profile: Profile }>("POST", "/v1/auth/redeem-invite", {
      token,
      username,
      demographics,
    });
  }

  me() {
    return this.request<{ worker_id: string; role: string; platforms: string[] }>("GET", "/v1/me");
  }

  listStories(params: { type?: string; platform?: string; tag?: string; cursor?: string; limit?: number } = {}) {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined && value !== "") query.set(key, String(value));
    }
    const suffix = query.toString() ? `?${query}` : "";
    return this.request<FeedPage>("GET", `/v1/stories${suffix}`);
  }

  postStory(draft: StoryDraftBody) {
    return this.request<{ story_id: string }>("POST", "/v1/stories", draft);
  }

  likeStory(storyId: string) {
    return this.request<{ like_count: number }>("POST", `/v1/stories/${storyId}/like`);
  }

  unlikeStory(storyId: string) {
    return this.request<{ like_count: number }>("DELETE", `/v1/stories/${storyId}/like`);
  }

  updateStory(storyId: string, changes: Record<string, unknown>) {
    return this.request<{ story_id: string; edit_count: number }>("PATCH", `/v1/stories/${storyId}`, changes);
  }

  deleteStory(storyId: string) {
    return this.request<void>("DELETE", `/v1/stories/${storyId}`);
  }

  postIncome(entry: Record<string, unknown>) {
    return this.request<Record<string, unknown>>("POST", "/v1/income", entry);
  }

  uploadTripsCsv(csvText: string) {
    return this.request<ImportReport>("POST", "/v1/income/csv", csvText, "text/csv");
  }

  deleteIncome(entryId: string) {
    return this.request<void>("DELETE", `/v1/income/${entryId}`);
  }

  postExpense(entry: Record<string, unknown>) {
    return this.request<Record<string, unknown>>("POST", "/v1/expenses", entry);
  }

  deleteExpense(entryId: string) {
    return this.request<void>("DELETE", `/v1/expenses/${entryId}`);
  }

  manageData() {
    return this.request<ManagedData>("GET", "/v1/data");
  }

  trends(from: string, to: string) {
    return this.request<TrendsReport>("GET", `/v1/trends/personal?from=${from}&to=${to}`);
  }

  insights(dimension: string, breakdown: string) {
    return this.request<InsightTable>("GET", `/v1/insights?dimension=${dimension}&breakdown=${breakdown}`);
  }

  planProjection(slots: [number, number][], lookbackWeeks = 8) {
    return this.request<Projection>("POST", "/v1/planner/project", {
      slots,
      lookback_weeks: lookbackWeeks,
    });
  }

  taxResources() {
    return this.request<TaxInfo>("GET", "/v1/tax/resources");
  }
}
