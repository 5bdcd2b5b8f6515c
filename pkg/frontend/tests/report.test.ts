import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { CsvError, parseCsv } from "../src/csv.js";
import { renderFigure } from "../src/report.js";

const FIXTURES = join(__dirname, "fixtures");
const OUT = mkdtempSync(join(tmpdir(), "report-"));

function render(kind: "moments" | "coupling" | "bounds", file: string, out: string): string {
  return renderFigure({ kind, inputCsv: join(FIXTURES, file), output: join(OUT, out) });
}

describe("figure rendering", () => {
  it("renders the moments kind", () => {
    const svg = render("moments", "moments.csv", "moments.svg");
    expect(svg).toContain("<svg");
    expect(svg).toContain("mean momentum");
    expect(svg).toContain("weighted moments");
    expect(svg).toContain("W2 to reference");
    expect(readFileSync(join(OUT, "moments.svg"), "utf8").length).toBeGreaterThan(0);
  });

  it("renders the coupling kind with a log axis", () => {
    const svg = render("coupling", "coupling.csv", "coupling.svg");
    expect(svg).toContain("Gronwall envelope");
    expect(svg).toContain("log scale");
    expect(svg).toContain("gamma_fitted");
  });

  it("renders the bounds kind as a bar chart", () => {
    const svg = render("bounds", "bounds.csv", "bounds.svg");
    expect(svg).toContain("max_ratio");
    expect(svg).toContain("lambda");
    expect(svg).toContain("sigma_diff_lipschitz");
    expect((svg.match(/<rect/g) ?? []).length).toBeGreaterThanOrEqual(7);
  });

  it("is deterministic", () => {
    const a = render("coupling", "coupling.csv", "det_a.svg");
    const b = render("coupling", "coupling.csv", "det_b.svg");
    expect(a).toBe(b);
    expect(readFileSync(join(OUT, "det_a.svg"))).toStrictEqual(
      readFileSync(join(OUT, "det_b.svg")),
    );
  });

  it("floors an all-zero coupling series at the log floor", () => {
    const svg = render("coupling", "coupling_zero.csv", "coupling_zero.svg");
    expect(svg).toContain("<polyline");
    expect(svg).toContain("e-16");
  });

  it("handles a single-row moments file with markers", () => {
    const svg = render("moments", "moments_single.csv", "moments_single.svg");
    expect(svg).toContain("<circle");
  });

  it("rejects a header from the wrong kind", () => {
    expect(() => render("bounds", "coupling.csv", "wrong.svg")).toThrow(CsvError);
  });

  it("rejects ragged rows", () => {
    const bad = join(OUT, "bad.csv");
    writeFileSync(bad, "t,w2_sq,envelope,gamma_fitted\n0,1,2\n");
    expect(() =>
      renderFigure({ kind: "coupling", inputCsv: bad, output: join(OUT, "bad.svg") }),
    ).toThrow(CsvError);
  });

  it("rejects non-numeric cells", () => {
    const bad = join(OUT, "nan.csv");
    writeFileSync(bad, "t,w2_sq,envelope,gamma_fitted\n0,abc,2,3\n");
    expect(() =>
      renderFigure({ kind: "coupling", inputCsv: bad, output: join(OUT, "nan.svg") }),
    ).toThrow(CsvError);
  });

  it("rejects non-SVG output paths", () => {
    expect(() =>
      renderFigure({
        kind: "coupling",
        inputCsv: join(FIXTURES, "coupling.csv"),
        output: join(OUT, "fig.png"),
      }),
    ).toThrow(/SVG/);
  });
});

describe("csv parsing", () => {
  it("treats empty trailing cells as optional values", () => {
    const table = parseCsv(
      "t,mean_px,mean_py,mean_pz,mean_energy,m2,m4,m7,w2_to_ref\n0,1,2,3,4,5,6,7,\n",
      "moments",
    );
    expect(table.rows[0][8]).toBe("");
  });

  it("rejects empty files", () => {
    expect(() => parseCsv("", "moments")).toThrow(CsvError);
  });

  it("rejects header-only files", () => {
    expect(() => parseCsv("bound_id,n_samples,max_ratio,argmax\n", "bounds")).toThrow(CsvError);
  });
});
