// Thin REST client. All science (suggestions, regret, stopping) comes from the
// service; this layer only moves JSON and surfaces typed errors.

import type {
  CampaignSummary,
  CampaignView,
  GameView,
  Point,
  SubmitResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let res: Response;
    try {
      res = await fetch(this.base + path, {
        headers: { "content-type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new ApiError(0, "unreachable", `service unreachable: ${err}`);
    }
    const text = await res.text();
    if (!res.ok) {
      let code = "error";
      let message = text;
      try {
        const body = JSON.parse(text);
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body: keep raw text
      }
      throw new ApiError(res.status, code, message);
    }
    return (text ? JSON.parse(text) : undefined) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/healthz");
  }

  createCampaign(req: {
    target: number;
    strategy?: string;
    tolerance?: number;
    seed?: number;
  }): Promise<CampaignView> {
    return this.request("/campaigns", { method: "POST", body: JSON.stringify(req) });
  }

  listCampaigns(): Promise<{ campaigns: CampaignSummary[] }> {
    return this.request("/campaigns");
  }

  getCampaign(id: string): Promise<CampaignView> {
    return this.request(`/campaigns/${id}`);
  }

  initialize(id: string, n: number, seed?: number): Promise<{ points: Point[] }> {
    return this.request(`/campaigns/${id}/initialize`, {
      method: "POST",
      body: JSON.stringify(seed === undefined ? { n } : { n, seed }),
    });
  }

  suggest(id: string, q = 2): Promise<{ points: Point[]; fresh: boolean }> {
    return this.request(`/campaigns/${id}/suggest?q=${q}`, { method: "POST" });
  }

  observe(
    id: string,
    point: Point,
    size: number,
    feasible: boolean,
    manual = false,
  ): Promise<CampaignView> {
    return this.request(`/campaigns/${id}/observations`, {
      method: "POST",
      body: JSON.stringify({ point, size, feasible, manual }),
    });
  }

  exportCsvUrl(id: string): string {
    return `${this.base}/campaigns/${id}/export`;
  }

  createGame(target: number, seed = 0): Promise<GameView> {
    return this.request("/games", { method: "POST", body: JSON.stringify({ target, seed }) });
  }

  getGame(id: string): Promise<GameView> {
    return this.request(`/games/${id}`);
  }

  submitGame(id: string, points: Point[]): Promise<SubmitResult> {
    return this.request(`/games/${id}/submit`, {
      method: "POST",
      body: JSON.stringify({ points }),
    });
  }
}
