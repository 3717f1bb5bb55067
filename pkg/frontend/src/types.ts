// Wire shapes of the session service (JSON bodies and SSE record payloads).

export interface Frame {
  timestamp_ms: number;
  valence: number;
  arousal: number;
}

export interface Scores {
  vision: number;
  language: number;
}

export interface TranscriptRecord {
  seq: number;
  kind: "event" | "action";
  type: string;
  text?: string;
  frames?: Frame[];
  rating?: number;
  subject_id?: string;
  stimulus_id?: string;
  stimulus_ids?: string[];
  top_hits?: number;
  bottom_hits?: number;
}

export interface CommittedRecord {
  subject_id: string;
  stimulus_id: string;
  category: string;
  initial_scores: Scores;
  final_scores: Scores;
  zone_initial: string;
  zone_final: string;
  extensions_used: number;
  resolved: boolean;
  rating: number | null;
  committed_at: number;
}

export interface ZoneConfig {
  theta_vision: number;
  theta_language: number;
}

export interface StimulusInfo {
  id: string;
  category: string;
  duration_ms: number;
}

export interface Snapshot {
  session_id: string;
  subject_id: string;
  created_at: string;
  phase: string;
  current_index: number;
  stimulus_count: number;
  current_stimulus: StimulusInfo;
  extension_count: number;
  max_extensions: number;
  top_k: number;
  zone_config: ZoneConfig;
  initial_scores: Scores | null;
  initial_zone: string | null;
  last_observation: Scores | null;
  observation_zone: string | null;
  rating: number | null;
  committed: CommittedRecord[];
  last_seq: number;
  done: boolean;
}

export interface CreateSessionResponse {
  session_id: string;
  actions: Array<Record<string, unknown>>;
  state: Snapshot;
}

export interface PostEventResponse {
  actions: Array<Record<string, unknown>>;
  state: Snapshot;
}
