import { describe, expect, it } from "vitest";
import { fileURLToPath } from "url";
import { MissingColumnError, column, loadTable, parseTable } from "../src/csv.js";

const FIXTURES = fileURLToPath(new URL("./fixtures/validate_out", import.meta.url));

describe("parseTable", () => {
  it("parses numeric columns and keeps the column list", () => {
    const t = parseTable("a.csv", "x,y\n1,2\n3,4\n", ["x", "y"]);
    expect(t.columns).toEqual(["x", "y"]);
    expect(column(t, "x")).toEqual([1, 3]);
    expect(column(t, "y")).toEqual([2, 4]);
  });

  it("drops the ghost row a trailing newline produces", () => {
    const t = parseTable("a.csv", "x\n1\n2\n\n", ["x"]);
    expect(t.rows.length).toBe(2);
  });

  it("raises MissingColumnError naming file and column", () => {
    let caught: unknown;
    try {
      parseTable("report.csv", "x,y\n1,2\n", ["x", "z"]);
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(MissingColumnError);
    const e = caught as MissingColumnError;
    expect(e.file).toBe("report.csv");
    expect(e.column).toBe("z");
    expect(e.message).toContain("report.csv");
    expect(e.message).toContain("z");
  });
});

describe("loadTable", () => {
  it("reads a real report file", () => {
    const t = loadTable(FIXTURES, "survival.csv", ["x", "J"]);
    expect(t.rows.length).toBeGreaterThan(0);
    expect(Math.max(...column(t, "J"))).toBeLessThanOrEqual(1.0 + 1e-9);
  });

  it("treats an absent file as a missing column naming the file", () => {
    expect(() => loadTable(FIXTURES, "no_such_report.csv", ["x"])).toThrowError(
      MissingColumnError
    );
    try {
      loadTable(FIXTURES, "no_such_report.csv", ["x"]);
    } catch (err) {
      expect((err as MissingColumnError).file).toBe("no_such_report.csv");
    }
  });
});
