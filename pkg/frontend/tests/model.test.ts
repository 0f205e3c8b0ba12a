import { describe, expect, it } from "vitest";

import {
  queryTupleCount,
  relationsOf,
  rowsToInstance,
  topLevelRelations,
  validateCell,
  type SessionState,
} from "../src/model.js";

describe("validateCell", () => {
  it("accepts integers for Int columns", () => {
    expect(validateCell("Int", "42")).toEqual({ ok: true, value: 42 });
    expect(validateCell("Int", "  -7 ")).toEqual({ ok: true, value: -7 });
  });

  it("rejects non-integers for Int columns", () => {
    for (const bad of ["abc", "1.5", "", "4x", '"7"']) {
      const check = validateCell("Int", bad);
      expect(check.ok).toBe(false);
      expect(check.error).toContain("not an Int");
    }
  });

  it("passes strings through for String columns", () => {
    expect(validateCell("String", "CS")).toEqual({ ok: true, value: "CS" });
    expect(validateCell("String", "11")).toEqual({ ok: true, value: "11" });
  });
});

const WORKSIN_SCHEMA = {
  types: {
    WorksIn: { record: ["name", "deptName"] },
    name: "String",
    deptName: "String",
  },
};

describe("schema relations", () => {
  it("extracts attribute kinds", () => {
    const rels = relationsOf(WORKSIN_SCHEMA);
    expect(rels).toEqual([
      {
        name: "WorksIn",
        attributes: [
          { name: "name", kind: "String" },
          { name: "deptName", kind: "String" },
        ],
      },
    ]);
  });

  it("omits nested records from the top level", () => {
    const nested = {
      types: {
        Univ: { record: ["id", "name", "Admit"] },
        Admit: { record: ["uid", "count"] },
        id: "Int",
        name: "String",
        uid: "Int",
        count: "Int",
      },
    };
    expect(topLevelRelations(nested).map((r) => r.name)).toEqual(["Univ"]);
    expect(relationsOf(nested).map((r) => r.name)).toEqual(["Univ", "Admit"]);
  });

  it("honors qualified attribute definitions", () => {
    const schema = {
      types: {
        A: { record: ["x"] },
        "A.x": "Int",
      },
    };
    expect(relationsOf(schema)[0].attributes).toEqual([{ name: "x", kind: "Int" }]);
  });
});

describe("rowsToInstance", () => {
  const rels = relationsOf(WORKSIN_SCHEMA);

  it("builds an instance from edited rows", () => {
    const built = rowsToInstance(rels, {
      WorksIn: [{ cells: ["Alice", "CS"] }, { cells: ["Bob", "EE"] }],
    });
    expect(built).toEqual({
      ok: true,
      instance: {
        WorksIn: [
          { name: "Alice", deptName: "CS" },
          { name: "Bob", deptName: "EE" },
        ],
      },
    });
  });

  it("skips fully blank rows and supports an empty answer", () => {
    const built = rowsToInstance(rels, { WorksIn: [{ cells: ["", ""] }] });
    expect(built).toEqual({ ok: true, instance: { WorksIn: [] } });
  });

  it("blocks submission on a bad cell with a located error", () => {
    const intRels = relationsOf({
      types: { T: { record: ["n"] }, n: "Int" },
    });
    const built = rowsToInstance(intRels, { T: [{ cells: ["seven"] }] });
    expect(built.ok).toBe(false);
    if (!built.ok) {
      expect(built.error).toContain("T row 1");
      expect(built.error).toContain("not an Int");
    }
  });
});

describe("queryTupleCount", () => {
  it("totals rows across relations", () => {
    const state = {
      id: "s",
      status: "awaiting_answer",
      examples: 1,
      iterations: 1,
      search_space: 16,
      queries_asked: 0,
      query: {
        relations: {
          Employee: { attributes: ["name", "deptId"], rows: [["Alice", 11]] },
          Department: { attributes: ["id", "deptName"], rows: [[102, "x2"]] },
        },
      },
    } as SessionState;
    expect(queryTupleCount(state)).toBe(2);
  });
});
