/** Thin typed client over the analysis HTTP API.
 *
 * The fetch function is injectable so tests can stand in a fake server.
 * Non-2xx responses are surfaced as ApiFailure carrying the server's
 * machine-readable error code; the 409 Conflict case drives the stale
 * version prompt in the curation flow.
 */

import type {
  ApiErrorBody,
  ClusterDetailResponse,
  DecisionResponse,
  DraftDecision,
  PeaksResponse,
  SegmentsResponse,
  SpectrumResponse,
  UploadResponse,
  YearClustersResponse,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: ApiErrorBody['code'],
    message: string,
    readonly detail?: unknown,
  ) {
    super(message);
    this.name = 'ApiFailure';
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { code: 'Internal', message: `HTTP ${response.status}` };
  }
  throw new ApiFailure(response.status, body.code, body.message, body.detail);
}

function query(params: Record<string, number | string | undefined>): string {
  const parts = Object.entries(params)
    .filter(([, v]) => v !== undefined)
    .map(([k, v]) => `${k}=${encodeURIComponent(String(v))}`);
  return parts.length ? `?${parts.join('&')}` : '';
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, '')}${path}`;
  }

  async uploadDataset(content: string, format = 'auto'): Promise<UploadResponse> {
    const response = await this.fetchFn(this.url('/datasets'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ content, format }),
    });
    return asJson<UploadResponse>(response);
  }

  async getSpectrum(
    datasetId: string,
    range: { minRpy?: number; maxRpy?: number } = {},
  ): Promise<SpectrumResponse> {
    const qs = query({ min_rpy: range.minRpy, max_rpy: range.maxRpy });
    const response = await this.fetchFn(
      this.url(`/datasets/${datasetId}/spectrum${qs}`),
    );
    return asJson<SpectrumResponse>(response);
  }

  async getPeaks(
    datasetId: string,
    params: { minDeviation?: number; maxRpy?: number } = {},
  ): Promise<PeaksResponse> {
    const qs = query({
      min_deviation: params.minDeviation,
      max_rpy: params.maxRpy,
    });
    const response = await this.fetchFn(
      this.url(`/datasets/${datasetId}/peaks${qs}`),
    );
    return asJson<PeaksResponse>(response);
  }

  async getYearClusters(
    datasetId: string,
    rpy: number,
    top = 25,
  ): Promise<YearClustersResponse> {
    const response = await this.fetchFn(
      this.url(`/datasets/${datasetId}/years/${rpy}/clusters${query({ top })}`),
    );
    return asJson<YearClustersResponse>(response);
  }

  async getCluster(
    datasetId: string,
    clusterId: string,
  ): Promise<ClusterDetailResponse> {
    const response = await this.fetchFn(
      this.url(`/datasets/${datasetId}/clusters/${clusterId}`),
    );
    return asJson<ClusterDetailResponse>(response);
  }

  async getSegments(
    datasetId: string,
    params: { kMax?: number; minLen?: number; scale?: string } = {},
  ): Promise<SegmentsResponse> {
    const qs = query({
      k_max: params.kMax,
      min_len: params.minLen,
      scale: params.scale,
    });
    const response = await this.fetchFn(
      this.url(`/datasets/${datasetId}/segments${qs}`),
    );
    return asJson<SegmentsResponse>(response);
  }

  /** POST a curation decision pinned to the version the UI last rendered. */
  async postDecision(
    datasetId: string,
    decision: DraftDecision,
    expectedVersion: number,
  ): Promise<DecisionResponse> {
    const body =
      decision.kind === 'merge'
        ? {
            kind: 'merge',
            clusters: decision.clusters,
            expected_version: expectedVersion,
          }
        : {
            kind: 'split',
            cluster: decision.cluster,
            members: decision.members,
            expected_version: expectedVersion,
          };
    const response = await this.fetchFn(
      this.url(`/datasets/${datasetId}/decisions`),
      {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      },
    );
    return asJson<DecisionResponse>(response);
  }
}
