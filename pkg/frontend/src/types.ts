/** Payload shapes of the analysis HTTP API. */

export interface SpectrumPoint {
  rpy: number;
  ncr: number;
  deviation: number;
}

export interface SpectrumResponse {
  version: number;
  spectrum: SpectrumPoint[];
}

export interface UploadResponse {
  dataset_id: string;
  version: number;
  n_publications: number;
  n_refs: number;
}

export interface PeakTopCluster {
  cluster_id: string;
  n_cr: number;
  canonical: string;
}

export interface Peak {
  rpy: number;
  deviation: number;
  ncr: number;
  top_clusters: PeakTopCluster[];
}

export interface PeaksResponse {
  version: number;
  peaks: Peak[];
}

export interface ClusterRow {
  cluster_id: string;
  canonical: string;
  rpy: number | null;
  n_cr: number;
  n_members: number;
  perc_yr: number;
  perc_all: number;
  n_top10: number;
  n_top25: number;
  n_top50: number;
}

export interface YearClustersResponse {
  version: number;
  rpy: number;
  clusters: ClusterRow[];
}

export interface ClusterMember {
  citing_id: string;
  position: number;
  raw: string;
  first_author: string;
  rpy: number | null;
  source: string | null;
  volume: string | null;
  page: string | null;
  doi: string | null;
}

export interface ClusterDetail {
  cluster_id: string;
  canonical: string;
  rpy: number | null;
  n_cr: number;
  members: ClusterMember[];
  citing_year_profile: Record<string, number>;
}

export interface ClusterDetailResponse {
  version: number;
  cluster: ClusterDetail;
}

export interface SegmentShape {
  start_rpy: number;
  end_rpy: number;
  slope: number;
  intercept: number;
  sse: number;
}

export interface SegmentFit {
  k: number;
  total_sse: number;
  bic: number | null;
  scale: string;
  segments: SegmentShape[];
}

export interface SegmentsResponse {
  version: number;
  fit: SegmentFit;
}

export interface DecisionResponse {
  version: number;
}

export type DraftDecision =
  | { kind: 'merge'; clusters: string[] }
  | { kind: 'split'; cluster: string; members: [string, number][] };

export interface ApiErrorBody {
  code: 'BadRequest' | 'NotFound' | 'Conflict' | 'Internal';
  message: string;
  detail?: unknown;
}
