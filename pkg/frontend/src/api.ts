import type { DatasetMeta, LabelRequest, PlacementsDoc, UploadResult } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function fail(resp: Response): Promise<never> {
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (typeof body.detail === "string") message = body.detail;
    else if (typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(resp.status, message);
}

/** Thin typed client for the three service endpoints. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  async uploadDataset(xml: string): Promise<UploadResult> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/datasets`, {
      method: "POST",
      headers: { "content-type": "application/xml" },
      body: xml,
    });
    if (!resp.ok) await fail(resp);
    return resp.json();
  }

  async datasetMeta(datasetId: string): Promise<DatasetMeta> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/datasets/${datasetId}/meta`);
    if (!resp.ok) await fail(resp);
    return resp.json();
  }

  async label(req: LabelRequest): Promise<PlacementsDoc> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/label`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) await fail(resp);
    return resp.json();
  }
}
