// Session payload shapes and the pure table-editing logic.
// Everything here is framework-free so it can be unit tested without a DOM;
// no synthesis logic lives client-side.

export type PrimKind = "Int" | "String";

export interface QueryTable {
  attributes: string[];
  rows: (number | string)[][];
}

export interface SessionState {
  id: string;
  status: "synthesizing" | "awaiting_answer" | "done" | "failed";
  examples: number;
  iterations: number;
  search_space: number;
  queries_asked: number;
  error?: string;
  program?: string;
  second_program?: string;
  query?: { relations: Record<string, QueryTable> };
}

export interface ProgramInfo {
  text: string;
  raw_text: string | null;
  holes: { hole: number; attribute: string; assigned: string }[];
  stats: Record<string, number>;
}

export interface CellCheck {
  ok: boolean;
  value?: number | string;
  error?: string;
}

// Parse one edited cell against the column kind. Int columns accept
// optional-sign decimal digits only; everything else is an inline error.
export function validateCell(kind: PrimKind, text: string): CellCheck {
  const trimmed = text.trim();
  if (kind === "Int") {
    if (!/^-?\d+$/.test(trimmed)) {
      return { ok: false, error: `not an Int: ${JSON.stringify(text)}` };
    }
    return { ok: true, value: parseInt(trimmed, 10) };
  }
  return { ok: true, value: text };
}

export interface TargetRelation {
  name: string;
  attributes: { name: string; kind: PrimKind }[];
}

// Flat relations of a schema document, with primitive attribute kinds;
// nested records are listed as their own relations.
export function relationsOf(schema: {
  types: Record<string, string | { record: string[] }>;
}): TargetRelation[] {
  const out: TargetRelation[] = [];
  for (const [name, def] of Object.entries(schema.types)) {
    if (typeof def === "string") continue;
    const attributes: TargetRelation["attributes"] = [];
    for (const attr of def.record) {
      const attrDef = schema.types[`${name}.${attr}`] ?? schema.types[attr];
      if (attrDef === "Int" || attrDef === "String") {
        attributes.push({ name: attr, kind: attrDef });
      }
    }
    out.push({ name, attributes });
  }
  return out;
}

export function topLevelRelations(schema: {
  types: Record<string, string | { record: string[] }>;
  top?: string[];
}): TargetRelation[] {
  const all = relationsOf(schema);
  if (schema.top) {
    return all.filter((r) => schema.top!.includes(r.name));
  }
  const nested = new Set<string>();
  for (const def of Object.values(schema.types)) {
    if (typeof def === "string") continue;
    for (const attr of def.record) {
      const attrDef = schema.types[attr];
      if (attrDef && typeof attrDef !== "string") nested.add(attr);
    }
  }
  return all.filter((r) => !nested.has(r.name));
}

export interface RowEdit {
  cells: string[];
}

// Turn the edited answer rows into an instance document, or report the
// first invalid cell. Rows that are entirely blank are skipped.
export function rowsToInstance(
  relations: TargetRelation[],
  edits: Record<string, RowEdit[]>
): { ok: true; instance: Record<string, object[]> } | { ok: false; error: string } {
  const instance: Record<string, object[]> = {};
  for (const rel of relations) {
    instance[rel.name] = [];
    for (const [i, row] of (edits[rel.name] ?? []).entries()) {
      if (row.cells.every((c) => c.trim() === "")) continue;
      const record: Record<string, number | string> = {};
      for (const [j, attr] of rel.attributes.entries()) {
        const check = validateCell(attr.kind, row.cells[j] ?? "");
        if (!check.ok) {
          return {
            ok: false,
            error: `${rel.name} row ${i + 1}, column ${attr.name}: ${check.error}`,
          };
        }
        record[attr.name] = check.value!;
      }
      instance[rel.name].push(record);
    }
  }
  return { ok: true, instance };
}

export function queryTupleCount(state: SessionState): number {
  if (!state.query) return 0;
  return Object.values(state.query.relations).reduce((n, t) => n + t.rows.length, 0);
}
