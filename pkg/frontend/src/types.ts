// Server payload shapes the console consumes. All verdicts (badges,
// compliance, flags) arrive precomputed; the console never derives them.

export interface ProjectSummary {
  project: string;
  specimens: number;
  sequences: number;
  bins: number;
  sequence_recovery_rate: number;
  bin_discordance_rate: number;
  sequence_length_histogram: { edges: number[]; counts: number[] };
  issues: IssueLink[];
}

export interface IssueLink {
  sample_id: string;
  process_id: string | null;
  issue: string;
}

export interface RecordRow {
  sample_id: string;
  process_ids: string[];
  species: string | null;
  has_gps: boolean;
  has_images: boolean;
  has_traces: boolean;
  barcode_compliant: boolean | null;
  stop_codon: boolean;
  contamination: boolean;
  flagged: boolean;
  tags: string[];
  bins: string[];
  version: number;
}

export interface RecordConsole {
  project: string;
  rows: RecordRow[];
}

export interface SpecimenDoc {
  sample_id: string;
  project: string;
  storing_institution: string;
  taxonomy: Record<string, string | null>;
  collection: Record<string, unknown>;
  process_ids: string[];
  tags: { label: string; author: string; timestamp: string }[];
  comments: { text: string; author: string; timestamp: string }[];
  visibility: string;
  version: number;
  [key: string]: unknown;
}

export interface ActivityRow {
  timestamp: string;
  actor: string;
  action: string;
}

export interface SpecimenPage {
  record: SpecimenDoc;
  sequences: { process_id: string; marker_code: string; flags: string[]; length: number }[];
  bins: { bin_uri: string; marker: string; member_count: number }[];
  activity: ActivityRow[];
  version: number;
}

export interface DeltaTriple {
  field: string;
  old: unknown;
  new: unknown;
}

export interface BatchIdResult {
  columns: string[];
  rows: Record<string, unknown>[];
  queries: { query_id: string; matches?: number; error?: string }[];
}

export interface AnalysisJob {
  job_id: string;
  tool: string;
  status: "queued" | "running" | "done" | "error";
  result: Record<string, unknown> | null;
  error: string | null;
}

export interface BinPage {
  details: {
    bin_uri: string;
    doi: string | null;
    member_count: number;
    public_member_count: number;
    compliant_member_count: number;
    all_members_compliant: boolean;
    founding: string | null;
    avg_distance: number;
    max_distance: number;
  };
  nearest_neighbor: {
    bin_uri: string;
    distance: number;
    member_count: number;
    nearest_member: string;
    nearest_member_taxonomy: string[];
  } | null;
  taxonomy_tallies: Record<string, Record<string, number>>;
  collection_sites: { latitude: number; longitude: number; country: string | null }[];
  distance_histogram: { edges: number[]; counts: number[] };
}

export interface ApiError {
  status: number;
  error?: string;
  detail?: string;
  permission?: string;
}
