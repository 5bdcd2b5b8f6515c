/**
 * Figure rendering for the three rellandau CSV kinds.
 *
 * moments  -> multi-panel time series (momentum, energy, weighted moments)
 * coupling -> w2_sq and Gronwall envelope on a shared log axis
 * bounds   -> bar chart of empirical max_ratio per bound_id
 */

import { readFileSync, writeFileSync } from "fs";

import { CsvError, FigureKind, column, parseCsv, textColumn } from "./csv.js";
import {
  PALETTE,
  Rect,
  SvgBuilder,
  drawAxes,
  extent,
} from "./svg.js";

export interface FigureSpec {
  inputCsv: string;
  kind: FigureKind;
  output: string;
}

/** Floor for the log axis so all-zero coupling series still render. */
export const LOG_FLOOR = 1e-16;

export function renderFigure(spec: FigureSpec): string {
  const text = readFileSync(spec.inputCsv, "utf8");
  const table = parseCsv(text, spec.kind);
  let svg: string;
  if (spec.kind === "moments") {
    svg = renderMoments(table);
  } else if (spec.kind === "coupling") {
    svg = renderCoupling(table);
  } else {
    svg = renderBounds(table);
  }
  if (!spec.output.endsWith(".svg")) {
    throw new CsvError(
      `unsupported output format '${spec.output}': this renderer emits SVG; ` +
        "rasterize to PNG with an external tool if needed",
    );
  }
  writeFileSync(spec.output, svg);
  return svg;
}

type Table = ReturnType<typeof parseCsv>;

function seriesPoints(
  t: number[],
  v: number[],
  x: (a: number) => number,
  y: (a: number) => number,
): Array<[number, number]> {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < t.length; i++) {
    if (!Number.isNaN(v[i])) pts.push([x(t[i]), y(v[i])]);
  }
  return pts;
}

function drawSeries(
  svg: SvgBuilder,
  pts: Array<[number, number]>,
  color: string,
): void {
  if (pts.length === 1) {
    svg.circle(pts[0][0], pts[0][1], 3, color);
  } else if (pts.length > 1) {
    svg.polyline(pts, color);
  }
}

function renderMoments(table: Table): string {
  const t = column(table, "t");
  const w2 = column(table, "w2_to_ref");
  const hasW2 = w2.some((v) => !Number.isNaN(v));

  const panels: Array<{ title: string; yLabel: string; series: Array<{ name: string; values: number[] }> }> = [
    {
      title: "mean momentum",
      yLabel: "momentum component",
      series: ["mean_px", "mean_py", "mean_pz"].map((name) => ({
        name,
        values: column(table, name),
      })),
    },
    {
      title: "mean energy",
      yLabel: "energy",
      series: [{ name: "mean_energy", values: column(table, "mean_energy") }],
    },
    {
      title: "weighted moments",
      yLabel: "moment value",
      series: ["m2", "m4", "m7"].map((name) => ({ name, values: column(table, name) })),
    },
  ];
  if (hasW2) {
    panels.push({
      title: "W2 to reference",
      yLabel: "W2",
      series: [{ name: "w2_to_ref", values: w2 }],
    });
  }

  const panelH = 180;
  const width = 640;
  const svg = new SvgBuilder(width, 40 + panels.length * panelH);
  svg.text(width / 2, 22, "moments: particle-system trajectory", {
    anchor: "middle",
    size: 15,
  });

  panels.forEach((panel, k) => {
    const area: Rect = { x: 70, y: 60 + k * panelH, width: width - 100, height: panelH - 60 };
    const all = panel.series.flatMap((s) => s.values.filter((v) => !Number.isNaN(v)));
    const [lo, hi] = extent(all);
    const pad = (hi - lo) * 0.08;
    const { x, y } = drawAxes(svg, area, extent(t), [lo - pad, hi + pad], {
      xLabel: "t",
      yLabel: panel.yLabel,
      title: panel.title,
    });
    panel.series.forEach((s, i) => {
      drawSeries(svg, seriesPoints(t, s.values, x, y), PALETTE[i % PALETTE.length]);
      svg.text(area.x + area.width - 4, area.y + 14 + i * 13, s.name, {
        anchor: "end",
        size: 10,
        fill: PALETTE[i % PALETTE.length],
      });
    });
  });
  return svg.render();
}

function renderCoupling(table: Table): string {
  const t = column(table, "t");
  const w2sq = column(table, "w2_sq");
  const envelope = column(table, "envelope");
  const gamma = column(table, "gamma_fitted")[0];

  const floored = (v: number[]) => v.map((a) => Math.max(a, LOG_FLOOR));
  const fw = floored(w2sq);
  const fe = floored(envelope.filter((v) => Number.isFinite(v)).length ? envelope : w2sq);
  const finiteEnv = fe.filter((v) => Number.isFinite(v));
  const [lo1, hi1] = extent(fw);
  const [lo2, hi2] = extent(finiteEnv.length ? finiteEnv : fw);
  const lo = Math.max(Math.min(lo1, lo2) / 2, LOG_FLOOR);
  const hi = Math.max(hi1, hi2) * 2;

  const width = 640;
  const height = 360;
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 22, "coupling: W2² vs Gronwall envelope", {
    anchor: "middle",
    size: 15,
  });
  const area: Rect = { x: 80, y: 50, width: width - 120, height: height - 110 };
  const { x, y } = drawAxes(svg, area, extent(t), [lo, hi], {
    xLabel: "t",
    yLabel: "w2_sq (log scale)",
    yLog: true,
  });
  drawSeries(svg, seriesPoints(t, fw, x, y), PALETTE[0]);
  drawSeries(
    svg,
    seriesPoints(
      t,
      fe.map((v) => (Number.isFinite(v) ? v : NaN)),
      x,
      y,
    ),
    PALETTE[1],
  );
  svg.text(area.x + area.width - 4, area.y + 14, "w2_sq", {
    anchor: "end",
    size: 10,
    fill: PALETTE[0],
  });
  svg.text(area.x + area.width - 4, area.y + 27, "envelope", {
    anchor: "end",
    size: 10,
    fill: PALETTE[1],
  });
  svg.text(area.x, height - 14, `gamma_fitted = ${gamma}`, { size: 11 });
  return svg.render();
}

function renderBounds(table: Table): string {
  const ids = textColumn(table, "bound_id");
  const ratios = column(table, "max_ratio");
  const n = column(table, "n_samples");

  const width = 640;
  const height = 320;
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 22, "bounds: empirical max LHS/RHS per bound_id", {
    anchor: "middle",
    size: 15,
  });
  const area: Rect = { x: 80, y: 50, width: width - 120, height: height - 120 };
  const hi = Math.max(...ratios, 1e-12) * 1.15;
  const { y } = drawAxes(svg, area, [0, ids.length], [0, hi], {
    xLabel: "",
    yLabel: "max_ratio",
  });
  const slot = area.width / ids.length;
  ids.forEach((id, i) => {
    const barW = slot * 0.6;
    const bx = area.x + i * slot + (slot - barW) / 2;
    const by = y(ratios[i]);
    svg.rect(bx, by, barW, area.y + area.height - by, PALETTE[i % PALETTE.length]);
    svg.text(bx + barW / 2, by - 4, `${ratios[i]}`, { anchor: "middle", size: 9 });
    svg.raw(
      `<text x="${bx + barW / 2}" y="${area.y + area.height + 14}" font-size="9" ` +
        `text-anchor="end" fill="#222222" transform="rotate(-30 ${bx + barW / 2} ` +
        `${area.y + area.height + 14})">${id} (n=${n[i]})</text>`,
    );
  });
  return svg.render();
}
