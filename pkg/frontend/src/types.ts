/** Wire types mirrored from the service's JSON responses. */

export interface TreeNode {
  class: "value" | "group";
  label: string;
  kind: "data-term" | "group-term" | "interval-term";
  parent: { class: string; label: string } | null;
}

export interface FacetSummary {
  name: string;
  type: string;
  visible: boolean;
  order: number;
  identifier: boolean;
  derivation: string | null;
  intervals: IntervalSpecParams[] | null;
  tree: TreeNode[];
}

export interface IntervalSpecParams {
  kind: "linear" | "logarithmic" | "explicit";
  min?: number;
  max?: number;
  width?: number;
  base?: number;
  bounds?: number[];
}

export interface Outcome {
  status: "applied" | "skipped";
  reason: string | null;
}

export interface OpenResponse {
  session_id: string;
  project: { name: string; kind: string };
  outcomes: Outcome[];
  facets: FacetSummary[];
  row_count: number;
}

export interface FacetsResponse {
  facets: FacetSummary[];
  identifier_facet: string | null;
  row_count: number;
}

export interface ValuesResponse {
  values: { value: string; count: number }[];
  missing: number;
}

export interface RowsResponse {
  header: string[];
  rows: { index: number; cells: (string | null)[] }[];
  total: number;
  offset: number;
}

export interface LogRecordView {
  seq: number;
  type: string;
  params: Record<string, unknown>;
  recorded_at: string | null;
  outcome: Outcome;
}

export interface LogResponse {
  records: LogRecordView[];
  redo_depth: number;
}

export interface TransformResponse {
  outcome: Outcome;
  record: { seq: number; type: string; params: Record<string, unknown> };
  facets: FacetSummary[];
  row_count: number;
}

export interface ProjectInfo {
  name: string;
  kind: string;
  log_length: number;
}

export interface IntervalsPreviewResponse {
  levels: { boundaries: number[]; labels: string[] }[];
}

export type Transformation = { type: string; params: Record<string, unknown> };
