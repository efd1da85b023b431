import type {
  ApiErrorBody,
  CitySummary,
  IterationReport,
  KpiDelta,
  ScenarioControls,
  SessionHistory,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: unknown = null,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    /* non-JSON error body */
  }
  return new ApiError(
    response.status,
    body?.code ?? 'http-error',
    body?.message ?? `request failed with status ${response.status}`,
    body?.details ?? null,
  );
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { 'content-type': 'application/json' },
      ...init,
    });
    if (!response.ok) throw await parseError(response);
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  listCities(): Promise<CitySummary[]> {
    return this.request('/api/v1/cities');
  }

  controlsSchema(): Promise<Record<string, unknown>> {
    return this.request('/api/v1/schemas/controls');
  }

  async createSession(cityId: string): Promise<string> {
    const body = await this.request<{ session_id: string }>('/api/v1/sessions', {
      method: 'POST',
      body: JSON.stringify({ city_id: cityId }),
    });
    return body.session_id;
  }

  postIteration(sessionId: string, controls: ScenarioControls): Promise<IterationReport> {
    return this.request(`/api/v1/sessions/${sessionId}/iterations`, {
      method: 'POST',
      body: JSON.stringify(controls),
    });
  }

  getSession(sessionId: string): Promise<SessionHistory> {
    return this.request(`/api/v1/sessions/${sessionId}`);
  }

  getDiff(sessionId: string, a: number, b: number): Promise<KpiDelta> {
    return this.request(`/api/v1/sessions/${sessionId}/diff?a=${a}&b=${b}`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request(`/api/v1/sessions/${sessionId}`, { method: 'DELETE' });
  }
}
