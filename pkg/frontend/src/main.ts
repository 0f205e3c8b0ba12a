// Single-page companion for interactive synthesis sessions: upload
// schemas and the example, watch candidate programs, answer
// distinguishing-input queries as tables, download the results.

import { createSession, getProgram, getSession, migrate, postAnswer } from "./api.js";
import {
  RowEdit,
  SessionState,
  TargetRelation,
  queryTupleCount,
  rowsToInstance,
  topLevelRelations,
  validateCell,
} from "./model.js";

const BASE = "";
const POLL_MS = 1000;

interface AppState {
  sessionId: string | null;
  session: SessionState | null;
  targetSchema: { types: Record<string, string | { record: string[] }>; top?: string[] } | null;
  targetRelations: TargetRelation[];
  edits: Record<string, RowEdit[]>;
  showRaw: boolean;
  message: string;
  poller: number | null;
}

const state: AppState = {
  sessionId: null,
  session: null,
  targetSchema: null,
  targetRelations: [],
  edits: {},
  showRaw: false,
  message: "",
  poller: null,
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function readJson(textarea: HTMLTextAreaElement): object {
  return JSON.parse(textarea.value);
}

async function startSession(): Promise<void> {
  const source = readJson(byId<HTMLTextAreaElement>("source-schema"));
  const target = readJson(byId<HTMLTextAreaElement>("target-schema"));
  const example = readJson(byId<HTMLTextAreaElement>("example")) as {
    input: object;
    output: object;
  };
  state.targetSchema = target as AppState["targetSchema"];
  state.targetRelations = topLevelRelations(state.targetSchema!);
  const created = await createSession(BASE, { source_schema: source, target_schema: target, example });
  state.sessionId = created.id;
  state.session = created;
  state.message = "";
  schedulePoll();
  render();
}

function schedulePoll(): void {
  if (state.poller !== null) window.clearTimeout(state.poller);
  state.poller = window.setTimeout(poll, POLL_MS);
}

async function poll(): Promise<void> {
  if (!state.sessionId) return;
  state.session = await getSession(BASE, state.sessionId);
  if (state.session.status === "synthesizing") {
    schedulePoll();
  } else if (state.session.status === "awaiting_answer") {
    seedEdits();
  }
  render();
}

function seedEdits(): void {
  state.edits = {};
  for (const rel of state.targetRelations) {
    state.edits[rel.name] = [{ cells: rel.attributes.map(() => "") }];
  }
}

async function submitAnswer(): Promise<void> {
  if (!state.sessionId) return;
  const built = rowsToInstance(state.targetRelations, state.edits);
  if (!built.ok) {
    state.message = built.error;
    render();
    return;
  }
  try {
    state.session = await postAnswer(BASE, state.sessionId, built.instance);
    state.message = "";
  } catch (err) {
    state.message = String(err);
  }
  schedulePoll();
  render();
}

function download(name: string, text: string): void {
  const a = el("a", {
    href: URL.createObjectURL(new Blob([text], { type: "text/plain" })),
    download: name,
  });
  a.click();
}

async function exportProgram(): Promise<void> {
  if (!state.sessionId) return;
  const info = await getProgram(BASE, state.sessionId);
  download("program.dl", info.text);
}

async function exportMigration(): Promise<void> {
  if (!state.sessionId) return;
  const instance = readJson(byId<HTMLTextAreaElement>("migrate-instance"));
  const out = await migrate(BASE, state.sessionId, instance);
  download("migrated.json", JSON.stringify(out.instance, null, 2));
}

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function renderQueryTables(session: SessionState): HTMLElement {
  const box = el("div", { class: "query" });
  box.append(el("h3", {}, `distinguishing input (${queryTupleCount(session)} tuples)`));
  for (const [rel, table] of Object.entries(session.query!.relations)) {
    const t = el("table", { class: "input-table" });
    t.append(el("tr", {}, ...table.attributes.map((a) => el("th", {}, a))));
    for (const row of table.rows) {
      t.append(el("tr", {}, ...row.map((v) => el("td", {}, String(v)))));
    }
    box.append(el("h4", {}, rel), t);
  }
  return box;
}

function renderAnswerEditor(): HTMLElement {
  const box = el("div", { class: "answer" });
  box.append(el("h3", {}, "expected output for this input"));
  for (const rel of state.targetRelations) {
    const t = el("table", { class: "answer-table" });
    t.append(el("tr", {}, ...rel.attributes.map((a) => el("th", {}, `${a.name}: ${a.kind}`))));
    (state.edits[rel.name] ?? []).forEach((row, i) => {
      const tr = el("tr");
      rel.attributes.forEach((attr, j) => {
        const input = el("input", { value: row.cells[j] ?? "" }) as HTMLInputElement;
        input.oninput = () => {
          row.cells[j] = input.value;
          const check = validateCell(attr.kind, input.value);
          input.className = input.value.trim() !== "" && !check.ok ? "bad-cell" : "";
        };
        tr.append(el("td", {}, input));
      });
      t.append(tr);
    });
    const add = el("button", {}, "add row");
    add.onclick = () => {
      state.edits[rel.name].push({ cells: rel.attributes.map(() => "") });
      render();
    };
    box.append(el("h4", {}, rel.name), t, add);
  }
  const submit = el("button", { id: "submit-answer" }, "submit answer");
  submit.onclick = () => void submitAnswer();
  box.append(el("div", {}, submit));
  return box;
}

function renderPrograms(session: SessionState): HTMLElement {
  const box = el("div", { class: "programs" });
  const title = session.status === "awaiting_answer" ? "candidate programs" : "program";
  box.append(el("h3", {}, title));
  box.append(el("pre", { class: "program" }, session.program ?? ""));
  if (session.second_program) {
    box.append(el("pre", { class: "program second" }, session.second_program));
  }
  if (session.status === "done") {
    const toggle = el("button", {}, state.showRaw ? "show simplified" : "show raw completion");
    toggle.onclick = async () => {
      state.showRaw = !state.showRaw;
      if (state.sessionId) {
        const info = await getProgram(BASE, state.sessionId);
        const holes = info.holes
          .map((h) => `??${h.hole} [${h.attribute}] := ${h.assigned}`)
          .join("\n");
        byId<HTMLPreElement>("raw-view").textContent = state.showRaw
          ? `${info.raw_text ?? ""}\n${holes}`
          : "";
      }
      render();
    };
    const exportBtn = el("button", {}, "download program");
    exportBtn.onclick = () => void exportProgram();
    box.append(toggle, exportBtn, el("pre", { id: "raw-view" }));
  }
  return box;
}

function render(): void {
  const root = byId<HTMLDivElement>("session");
  root.replaceChildren();
  if (state.message) root.append(el("p", { class: "error" }, state.message));
  const s = state.session;
  if (!s) return;
  root.append(
    el(
      "p",
      { class: "status" },
      `session ${s.id}: ${s.status} (${s.examples} example(s), ${s.iterations} iteration(s), ` +
        `search space ${s.search_space})`
    )
  );
  if (s.status === "failed") {
    root.append(el("p", { class: "error" }, s.error ?? "synthesis failed"));
    return;
  }
  if (s.program) root.append(renderPrograms(s));
  if (s.status === "awaiting_answer" && s.query) {
    root.append(renderQueryTables(s), renderAnswerEditor());
  }
  if (s.status === "done") {
    byId<HTMLDivElement>("migrate-box").style.display = "block";
  }
}

export function install(): void {
  byId<HTMLButtonElement>("start").onclick = () => {
    startSession().catch((err) => {
      state.message = String(err);
      render();
    });
  };
  byId<HTMLButtonElement>("do-migrate").onclick = () => {
    exportMigration().catch((err) => {
      state.message = String(err);
      render();
    });
  };
}

if (typeof document !== "undefined" && document.getElementById("start")) {
  install();
}
