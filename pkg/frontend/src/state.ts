// Pure view-state logic. The ViewState is rebuilt solely from service
// responses; the only client-side derivation is the chart series, and even
// those are cross-checked against the server's cumulative columns.

import type {
  ConceptDocument,
  DormantSummary,
  StateDocument,
  TokenStatsRow,
  TurnResponse,
} from "./types";

export interface ChatEntry {
  role: "user" | "assistant";
  text: string;
  operatorId?: string;
  ruleId?: string;
  topicKind?: string;
}

export interface ViewState {
  sessionId: string | null;
  userId: string;
  chat: ChatEntry[];
  concept: ConceptDocument | null;
  dormants: DormantSummary[];
  rows: TokenStatsRow[];
  banner: string | null;
  pending: boolean;
}

export function initialViewState(userId = "playground"): ViewState {
  return {
    sessionId: null,
    userId,
    chat: [],
    concept: null,
    dormants: [],
    rows: [],
    banner: null,
    pending: false,
  };
}

export function withSession(state: ViewState, sessionId: string): ViewState {
  return { ...initialViewState(state.userId), sessionId };
}

export function canSubmit(state: ViewState, draft: string): boolean {
  return state.sessionId !== null && !state.pending && draft.trim().length > 0;
}

/** Fold one successful turn into the view: chat grows by the user line and
 * the assistant line (badged with operator and selecting rule), and the
 * inspector plus chart refresh from the same response. */
export function applyTurn(state: ViewState, instruction: string, turn: TurnResponse): ViewState {
  return {
    ...state,
    pending: false,
    banner: null,
    chat: [
      ...state.chat,
      { role: "user", text: instruction },
      {
        role: "assistant",
        text: turn.response_text,
        operatorId: turn.operator_id,
        ruleId: turn.rule_id,
        topicKind: turn.topic_decision.kind,
      },
    ],
    concept: turn.concept_after,
    rows: [...state.rows, turn.token_stats_row],
  };
}

/** Refresh inspector, dormant list, and chart rows from a state document
 * (used after reactivation and on reload). Chat is untouched: the server
 * does not replay transcripts, and neither do we. */
export function applyStateDocument(state: ViewState, doc: StateDocument): ViewState {
  return {
    ...state,
    pending: false,
    concept: doc.active_concept,
    dormants: doc.dormant_concepts,
    rows: doc.stats.rows,
  };
}

/** Failed request: surface the banner, keep the chat log and draft intact. */
export function applyError(state: ViewState, message: string): ViewState {
  return { ...state, pending: false, banner: message };
}

export interface ChartSeries {
  turns: number[];
  baselineCumulative: number[];
  coreCumulative: number[];
}

/** Chart series from the server rows; null when the shadow baseline is
 * disabled (no baseline columns → the chart is hidden). */
export function chartSeries(rows: TokenStatsRow[]): ChartSeries | null {
  const withBaseline = rows.filter((r) => r.baseline_cumulative !== null);
  if (withBaseline.length === 0) return null;
  return {
    turns: withBaseline.map((r) => r.turn),
    baselineCumulative: withBaseline.map((r) => r.baseline_cumulative as number),
    coreCumulative: withBaseline.map((r) => r.core_cumulative),
  };
}

/** Recompute running sums client-side and compare with the server columns.
 * A mismatch means the client is inventing numbers; dev builds assert. */
export function verifyCumulative(rows: TokenStatsRow[]): boolean {
  let baseline = 0;
  let core = 0;
  for (const row of rows) {
    core += row.core_prompt_tokens;
    if (row.core_cumulative !== core) return false;
    if (row.baseline_prompt_tokens !== null) {
      baseline += row.baseline_prompt_tokens;
      if (row.baseline_cumulative !== baseline) return false;
    }
  }
  return true;
}

const fmtPct = (value: number | null): string =>
  value === null ? "n/a" : `${value.toFixed(1)}%`;

/** Hover text for one chart point: the full per-turn row. */
export function tooltipText(row: TokenStatsRow): string {
  return [
    `Turn ${row.turn}`,
    `baseline ${row.baseline_prompt_tokens ?? "n/a"} tok`,
    `concept-first ${row.core_prompt_tokens} tok`,
    `savings ${fmtPct(row.savings_pct)}`,
    `cumulative ${row.baseline_cumulative ?? "n/a"} vs ${row.core_cumulative}`,
    `cumulative savings ${fmtPct(row.cumulative_savings_pct)}`,
  ].join(" · ");
}

/** Dormant topics owned by other concepts than the active one. */
export function dormantEntries(state: ViewState): DormantSummary[] {
  return state.dormants.filter((d) => d.concept_id !== state.concept?.concept_id);
}
