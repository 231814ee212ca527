import {
  EmptyReport,
  Profile,
  ResidualsPayload,
  StabilityPayload,
  SweepPayload,
} from "./schema.js";
import { SvgPlot, extent } from "./svg.js";

const VERDICT_COLOR: Record<string, string> = {
  stable: "#2a7e3b",
  marginal: "#c98a00",
  unstable: "#b03030",
};

/**
 * Stability diagram: worst eigenvalue vs. swept parameter, records colored
 * by verdict.  For cylinder height sweeps the analytic threshold
 * h = pi r / sqrt(n-1) is drawn as a dashed overlay.
 */
export function stabilityDiagram(sweep: SweepPayload): string {
  const pts = sweep.diagram.filter((d) => d.worst_lambda !== null);
  if (pts.length === 0) throw new EmptyReport("stability diagram: every record failed");
  const xs = pts.map((d) => d.param);
  const ys = pts.map((d) => d.worst_lambda as number);
  const plot = new SvgPlot(640, 420, extent(xs), extent([...ys, 0]), {
    title: `stability diagram (${String(sweep.spec.family)}, ${sweep.param} sweep)`,
    xLabel: sweep.param,
    yLabel: "worst eigenvalue",
  });
  plot.hline(0, "#888");
  plot.polyline(xs, ys, "#555");
  for (const d of pts) {
    plot.dot(d.param, d.worst_lambda as number, VERDICT_COLOR[d.verdict ?? ""] ?? "#777",
      3.5, `verdict-${d.verdict}`);
  }
  const overlay = analyticThreshold(sweep);
  if (overlay !== null) {
    plot.vline(overlay, "#1f4f9c", "h = πr/√(n−1)");
  }
  return plot.render();
}

/** Analytic cylinder instability threshold for height sweeps, else null. */
export function analyticThreshold(sweep: SweepPayload): number | null {
  if (sweep.spec.family !== "cylinder" || sweep.param !== "height") return null;
  const n = Number(sweep.spec.n ?? 2);
  const r = Number(sweep.spec.radius ?? 1);
  return (Math.PI * r) / Math.sqrt(n - 1);
}

/** Worst eigenvalue per mode l from a single stability report. */
export function eigenCurve(payload: StabilityPayload): string {
  const modes = payload.stability.modes;
  const xs = modes.map((m) => m.l);
  const ys = modes.map((m) => m.lambda_min);
  const plot = new SvgPlot(560, 400, extent(xs, 0.1), extent([...ys, 0]), {
    title: `mode spectrum (verdict: ${payload.stability.verdict})`,
    xLabel: "mode l",
    yLabel: "lambda_min",
  });
  plot.hline(0, "#888");
  plot.polyline(xs, ys, "#555");
  for (const m of modes) {
    const color = m.zero_mode ? "#999" : m.lambda_min < 0 ? "#b03030" : "#2a7e3b";
    plot.dot(m.l, m.lambda_min, color, 4, m.zero_mode ? "zero-mode" : "");
  }
  return plot.render();
}

/**
 * Residual vs. grid size on log-log axes, one polyline per identity, with a
 * slope -2 reference; needs the same residual report at two or more grids.
 */
export function residualConvergence(payloads: ResidualsPayload[]): string {
  const series = new Map<string, { grid: number; val: number }[]>();
  for (const p of payloads) {
    for (const rep of p.reports) {
      const val = rep.max_pointwise ?? rep.integral_rel;
      if (val === null || val <= 0) continue;
      const arr = series.get(rep.identity) ?? [];
      arr.push({ grid: rep.grid, val });
      series.set(rep.identity, arr);
    }
  }
  if (series.size === 0) throw new EmptyReport("no positive residuals to plot");
  const grids = [...series.values()].flat().map((d) => d.grid);
  const vals = [...series.values()].flat().map((d) => d.val);
  const plot = new SvgPlot(640, 440, extent(grids, 0.02), extent(vals, 0.1), {
    title: "identity residual convergence",
    xLabel: "grid points",
    yLabel: "residual",
    logX: true,
    logY: true,
  });
  const palette = ["#1f4f9c", "#b03030", "#2a7e3b", "#c98a00", "#7b3f9c", "#3a8fa0"];
  let i = 0;
  for (const [name, pts] of series) {
    pts.sort((a, b) => a.grid - b.grid);
    const color = palette[i++ % palette.length];
    plot.polyline(pts.map((d) => d.grid), pts.map((d) => d.val), color);
    const last = pts[pts.length - 1];
    plot.text(last.grid, last.val, name, color);
  }
  // slope -2 reference anchored at the largest residual
  const g0 = Math.min(...grids);
  const g1 = Math.max(...grids);
  const v0 = Math.max(...vals);
  plot.polyline([g0, g1], [v0, v0 * (g0 / g1) ** 2], "#888", "5,4");
  return plot.render();
}

/** Small-multiple gallery of profile curves in the (x, z) half-plane. */
export function profileGallery(profiles: { label: string; profile: Profile }[]): string {
  if (profiles.length === 0) throw new EmptyReport("no profiles to plot");
  const cols = Math.min(profiles.length, 4);
  const rows = Math.ceil(profiles.length / cols);
  const cell = 220;
  const parts: string[] = [];
  profiles.forEach(({ label, profile }, idx) => {
    const plot = new SvgPlot(cell, cell, extent([0, ...profile.x]), extent(profile.z), {
      title: label,
    });
    plot.polyline(profile.x, profile.z, "#1f4f9c");
    const col = idx % cols;
    const row = Math.floor(idx / cols);
    const inner = plot.render().replace(/^<svg[^>]*>/, "").replace(/<\/svg>\s*$/, "");
    parts.push(`<g transform="translate(${col * cell},${row * cell})">${inner}</g>`);
  });
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${cols * cell}" height="${rows * cell}" font-family="sans-serif">\n` +
    parts.join("\n") +
    "\n</svg>\n"
  );
}
