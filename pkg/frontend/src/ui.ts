// DOM rendering and event wiring. All state transitions live in state.ts;
// this module only paints a ViewState and forwards user intent.

import * as api from "./api";
import { chartPoints, nearestTurnIndex, renderChartSvg, DEFAULT_GEOMETRY } from "./chart";
import {
  applyError,
  applyStateDocument,
  applyTurn,
  canSubmit,
  chartSeries,
  dormantEntries,
  initialViewState,
  tooltipText,
  verifyCumulative,
  withSession,
  ViewState,
} from "./state";
import type { KeyValuePairs, TokenStatsRow } from "./types";

const DEV = (location.hostname === "localhost" || location.hostname === "127.0.0.1");

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function pairsTable(pairs: KeyValuePairs, emptyNote: string): HTMLElement {
  if (pairs.length === 0) return el("p", "empty", emptyNote);
  const table = el("table");
  for (const [key, value] of pairs) {
    const row = el("tr");
    row.append(el("td", "k", key), el("td", "v", value));
    table.append(row);
  }
  return table;
}

export class App {
  private state: ViewState = initialViewState();
  private draft = "";
  private demoRows: TokenStatsRow[] | null = null;

  constructor(private root: HTMLElement) {}

  async start(): Promise<void> {
    try {
      const session = await api.createSession(this.state.userId);
      this.state = withSession(this.state, session.session_id);
    } catch (error) {
      this.state = applyError(this.state, `session create failed: ${String(error)}`);
    }
    this.render();
  }

  private async submit(): Promise<void> {
    const instruction = this.draft.trim();
    const sessionId = this.state.sessionId;
    if (!canSubmit(this.state, instruction) || !sessionId) return;
    this.state = { ...this.state, pending: true, banner: null };
    this.render();
    try {
      const turn = await api.postTurn(sessionId, instruction);
      this.state = applyTurn(this.state, instruction, turn);
      this.draft = "";
      const doc = await api.getState(sessionId);
      this.state = applyStateDocument(this.state, doc);
    } catch (error) {
      this.state = applyError(this.state, String(error)); // draft preserved for retry
    }
    this.render();
  }

  private async reactivate(conceptId: string): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const doc = await api.reactivateConcept(this.state.sessionId, conceptId);
      this.state = applyStateDocument(this.state, doc);
    } catch (error) {
      this.state = applyError(this.state, String(error));
    }
    this.render();
  }

  private async toggleDemoStats(): Promise<void> {
    if (this.demoRows) {
      this.demoRows = null;
    } else {
      try {
        const report = await api.getReplayDemoStats();
        this.demoRows = report.rows;
      } catch (error) {
        this.state = applyError(this.state, `demo stats unavailable: ${String(error)}`);
      }
    }
    this.render();
  }

  render(): void {
    this.root.replaceChildren(
      this.renderHeader(),
      this.renderBanner(),
      this.renderMain(),
      this.renderChart()
    );
  }

  private renderHeader(): HTMLElement {
    const header = el("header");
    header.append(el("h1", undefined, "corekit playground"));
    const session = el(
      "span",
      "session",
      this.state.sessionId ? `session ${this.state.sessionId}` : "no session"
    );
    header.append(session);
    return header;
  }

  private renderBanner(): HTMLElement {
    const banner = el("div", "banner" + (this.state.banner ? " visible" : ""));
    if (this.state.banner) banner.textContent = this.state.banner;
    return banner;
  }

  private renderMain(): HTMLElement {
    const main = el("main");
    main.append(this.renderChat(), this.renderInspector());
    return main;
  }

  private renderChat(): HTMLElement {
    const panel = el("section", "chat");
    const log = el("div", "log");
    for (const entry of this.state.chat) {
      const bubble = el("div", `msg ${entry.role}`);
      if (entry.operatorId) {
        const badge = el("span", "badge", `${entry.operatorId} · ${entry.ruleId ?? ""}`);
        badge.title = `topic: ${entry.topicKind ?? "continue"}`;
        bubble.append(badge);
      }
      bubble.append(el("div", "text", entry.text));
      log.append(bubble);
    }
    panel.append(log);

    const bar = el("div", "input-bar");
    const input = el("textarea");
    input.rows = 2;
    input.placeholder = "Type an instruction…";
    input.value = this.draft;
    input.addEventListener("input", () => {
      this.draft = input.value;
      send.disabled = !canSubmit(this.state, this.draft);
    });
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        void this.submit();
      }
    });
    const send = el("button", undefined, this.state.pending ? "…" : "Send");
    send.disabled = !canSubmit(this.state, this.draft);
    send.addEventListener("click", () => void this.submit());
    bar.append(input, send);
    panel.append(bar);
    return panel;
  }

  private renderInspector(): HTMLElement {
    const panel = el("section", "inspector");
    panel.append(el("h2", undefined, "Local concept"));
    const concept = this.state.concept;
    if (!concept) {
      panel.append(el("p", "empty", "no active concept"));
    } else {
      panel.append(el("p", "task", concept.task_summary || "(empty task summary)"));
      panel.append(el("h3", undefined, "Constraints"));
      panel.append(pairsTable(concept.constraints, "none recorded"));
      panel.append(el("h3", undefined, "Intermediate results"));
      panel.append(pairsTable(concept.intermediate_results, "none recorded"));
      panel.append(el("h3", undefined, "Questions"));
      const questions = el("ul", "questions");
      for (const q of concept.pending_questions) questions.append(el("li", "pending", `pending: ${q}`));
      for (const q of concept.resolved_questions) questions.append(el("li", "resolved", `resolved: ${q}`));
      if (!concept.pending_questions.length && !concept.resolved_questions.length) {
        questions.append(el("li", "empty", "none"));
      }
      panel.append(questions);
      panel.append(
        el("p", "meta", `operator: ${concept.active_operator ?? "-"} · updated ${concept.last_updated}`)
      );
    }

    panel.append(el("h2", undefined, "Dormant topics"));
    const dormants = dormantEntries(this.state);
    if (dormants.length === 0) {
      panel.append(el("p", "empty", "none"));
    } else {
      const list = el("ul", "dormants");
      for (const dormant of dormants) {
        const item = el("li");
        item.append(el("span", undefined, dormant.task_summary));
        const button = el("button", "reactivate", "Reactivate");
        button.addEventListener("click", () => void this.reactivate(dormant.concept_id));
        item.append(button);
        list.append(item);
      }
      panel.append(list);
    }
    return panel;
  }

  private renderChart(): HTMLElement {
    const panel = el("section", "chart");
    const heading = el("h2", undefined, "Cumulative prompt tokens");
    const demo = el("button", "demo", this.demoRows ? "Show session data" : "Load reference data");
    demo.addEventListener("click", () => void this.toggleDemoStats());
    heading.append(demo);
    panel.append(heading);

    const rows = this.demoRows ?? this.state.rows;
    if (DEV && !verifyCumulative(rows)) {
      console.assert(false, "server cumulative columns disagree with recomputed sums");
    }
    const series = chartSeries(rows);
    if (!series) {
      panel.append(el("p", "empty", "chart hidden: shadow baseline disabled or no turns yet"));
      return panel;
    }
    const host = el("div", "chart-host");
    host.innerHTML = renderChartSvg(series);
    const tooltip = el("div", "tooltip");
    const points = chartPoints(series, DEFAULT_GEOMETRY);
    host.addEventListener("mousemove", (event) => {
      const bounds = host.getBoundingClientRect();
      const scale = DEFAULT_GEOMETRY.width / bounds.width;
      const index = nearestTurnIndex(points, (event.clientX - bounds.left) * scale);
      const row = rows.filter((r) => r.baseline_cumulative !== null)[index];
      if (row) {
        tooltip.textContent = tooltipText(row);
        tooltip.classList.add("visible");
      }
    });
    host.addEventListener("mouseleave", () => tooltip.classList.remove("visible"));
    panel.append(host, tooltip);
    panel.append(
      el("p", "legend", "orange: token-first baseline · blue: concept-first packets")
    );
    return panel;
  }
}
