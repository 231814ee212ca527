import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { describe, expect, it } from "vitest";

import {
  EmptyReport,
  SchemaMismatch,
  parseProfileCsv,
  parseResiduals,
  parseStability,
  parseSweep,
} from "../src/schema.js";
import {
  analyticThreshold,
  eigenCurve,
  profileGallery,
  residualConvergence,
  stabilityDiagram,
} from "../src/plots.js";

const FIX = resolve(__dirname, "fixtures");
const readJson = (p: string) => JSON.parse(readFileSync(p, "utf-8"));

const sweep = parseSweep(readJson(join(FIX, "sweep_cyl/sweep.json")));
const stability = parseStability(readJson(join(FIX, "stab_cyl/stability.json")));

describe("schema validation", () => {
  it("accepts real payloads", () => {
    expect(sweep.records.length).toBe(41);
    expect(stability.stability.verdict).toBe("unstable");
  });

  it("rejects wrong schema_version", () => {
    const bad = { ...readJson(join(FIX, "sweep_cyl/sweep.json")), schema_version: "0" };
    expect(() => parseSweep(bad)).toThrow(SchemaMismatch);
  });

  it("rejects missing schema_version", () => {
    expect(() => parseStability({ stability: {} })).toThrow(SchemaMismatch);
  });

  it("raises EmptyReport on empty sweeps", () => {
    const empty = {
      ...readJson(join(FIX, "sweep_cyl/sweep.json")),
      records: [],
      diagram: [],
    };
    expect(() => parseSweep(empty)).toThrow(EmptyReport);
  });

  it("parses profile CSV and rejects bad headers", () => {
    const text = readFileSync(join(FIX, "gallery/profile_000.csv"), "utf-8");
    const prof = parseProfileCsv(text);
    expect(prof.s.length).toBe(400);
    expect(prof.s[0]).toBe(0);
    expect(() => parseProfileCsv("a,b,c\n1,2,3\n")).toThrow(SchemaMismatch);
  });
});

describe("renderers", () => {
  it("stability diagram colors verdicts and draws the overlay", () => {
    const svg = stabilityDiagram(sweep);
    expect(svg).toContain("verdict-stable");
    expect(svg).toContain("verdict-unstable");
    expect(svg).toContain('class="overlay"');
  });

  it("criterion 10: verdict flip aligns with the analytic overlay h = pi r", () => {
    // sorted sweep: last stable and first unstable param bracket the overlay
    const pts = sweep.diagram.slice().sort((a, b) => a.param - b.param);
    const lastStable = pts.filter((d) => d.verdict === "stable").pop();
    const firstUnstable = pts.find((d) => d.verdict === "unstable");
    expect(lastStable && firstUnstable).toBeTruthy();
    const overlay = analyticThreshold(sweep);
    expect(overlay).toBeCloseTo(Math.PI, 10);
    expect(lastStable!.param).toBeLessThan(overlay!);
    expect(firstUnstable!.param).toBeGreaterThan(overlay!);
    // flip localized to one sweep step around the overlay
    expect(firstUnstable!.param - lastStable!.param).toBeLessThanOrEqual(0.051);
    // and the rendered overlay line sits between the flip markers
    const svg = stabilityDiagram(sweep);
    const overlayX = Number(/class="overlay" x1="([\d.]+)"/.exec(svg)![1]);
    const cxOf = (cls: string) =>
      [...svg.matchAll(new RegExp(`cx="([\\d.]+)" cy="[\\d.]+" r="[\\d.]+" fill="[^"]+" class="${cls}"`, "g"))];
    const stableXs = cxOf("verdict-stable").map((m) => Number(m[1]));
    const unstableXs = cxOf("verdict-unstable").map((m) => Number(m[1]));
    expect(Math.max(...stableXs)).toBeLessThan(overlayX);
    expect(Math.min(...unstableXs)).toBeGreaterThan(overlayX);
  });

  it("eigen curve marks the zero mode", () => {
    const svg = eigenCurve(stability);
    expect(svg).toContain("zero-mode");
    expect(svg).toContain("unstable");
  });

  it("residual convergence plots log-log series", () => {
    const payloads = ["res_500", "res_1000", "res_2000"].map((d) =>
      parseResiduals(readJson(join(FIX, d, "residuals.json"))),
    );
    const svg = residualConvergence(payloads);
    expect(svg).toContain("position_laplacian");
    expect(svg).toContain("<polyline");
  });

  it("profile gallery renders one panel per profile", () => {
    const manifest = readJson(join(FIX, "gallery/manifest.json"));
    const profiles = manifest.profiles.map((e: { file: string; neck: number }) => ({
      label: `neck = ${e.neck}`,
      profile: parseProfileCsv(readFileSync(join(FIX, "gallery", e.file), "utf-8")),
    }));
    const svg = profileGallery(profiles);
    expect((svg.match(/<g transform/g) ?? []).length).toBe(4);
  });
});

describe("cli", () => {
  it("exits 0 on the full suite of reports", () => {
    const dir = mkdtempSync(join(tmpdir(), "capstab-plot-"));
    const spec = {
      plots: [
        { kind: "stability_diagram", input: join(FIX, "sweep_cyl/sweep.json"), out: "diagram.svg" },
        { kind: "eigen_curve", input: join(FIX, "stab_cyl/stability.json"), out: "eigen.svg" },
        {
          kind: "residual_convergence",
          inputs: ["res_500", "res_1000", "res_2000"].map((d) => join(FIX, d, "residuals.json")),
          out: "convergence.svg",
        },
        { kind: "profile_gallery", manifest: join(FIX, "gallery/manifest.json"), out: "gallery.svg" },
      ],
    };
    const specPath = join(dir, "plots.json");
    writeFileSync(specPath, JSON.stringify(spec));
    const cli = resolve(__dirname, "../dist/cli.js");
    execFileSync("node", [cli, "--spec", specPath]); // throws on nonzero exit
    for (const name of ["diagram.svg", "eigen.svg", "convergence.svg", "gallery.svg"]) {
      expect(readFileSync(join(dir, name), "utf-8")).toContain("<svg");
    }
  });

  it("exits 2 on a schema mismatch", () => {
    const dir = mkdtempSync(join(tmpdir(), "capstab-plot-"));
    writeFileSync(join(dir, "bad.json"), JSON.stringify({ schema_version: "0" }));
    const spec = {
      plots: [{ kind: "stability_diagram", input: "bad.json", out: "x.svg" }],
    };
    writeFileSync(join(dir, "plots.json"), JSON.stringify(spec));
    const cli = resolve(__dirname, "../dist/cli.js");
    let code = 0;
    try {
      execFileSync("node", [cli, "--spec", join(dir, "plots.json")]);
    } catch (err) {
      code = (err as { status: number }).status;
    }
    expect(code).toBe(2);
  });
});
