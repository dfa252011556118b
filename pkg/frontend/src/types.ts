// Payload shapes mirrored from the corekit HTTP service. The UI never
// invents concept fields; everything below arrives over the wire.

export interface TokenStatsRow {
  turn: number;
  baseline_prompt_tokens: number | null;
  core_prompt_tokens: number;
  savings_pct: number | null;
  baseline_cumulative: number | null;
  core_cumulative: number;
  cumulative_savings_pct: number | null;
}

export type KeyValuePairs = [string, string][];

export interface ConceptDocument {
  concept_id: string;
  task_summary: string;
  constraints: KeyValuePairs;
  intermediate_results: KeyValuePairs;
  resolved_questions: string[];
  pending_questions: string[];
  active_operator: string | null;
  operator_history: string[];
  status: string;
  topic_keywords: string[];
  last_updated: string;
}

export interface TopicDecision {
  kind: string;
  target_concept_id: string | null;
  score: number | null;
}

export interface TurnResponse {
  response_text: string;
  operator_id: string;
  rule_id: string;
  topic_decision: TopicDecision;
  concept_after: ConceptDocument;
  token_stats_row: TokenStatsRow;
  turn_index: number;
  packet_text: string;
  over_budget: boolean;
}

export interface DormantSummary {
  concept_id: string;
  task_summary: string;
  last_updated: string;
}

export interface StateDocument {
  session_id: string;
  user_id: string;
  turn_counter: number;
  active_concept: ConceptDocument | null;
  dormant_concepts: DormantSummary[];
  operator_history: string[];
  stats: { rows: TokenStatsRow[] };
}

export interface SessionDescriptor {
  session_id: string;
  user_id: string;
}

export interface StatsReport {
  rows: TokenStatsRow[];
  series: {
    baseline_cumulative: (number | null)[];
    core_cumulative: number[];
  };
}
