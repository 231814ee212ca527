#!/usr/bin/env node
import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { z } from "zod";

import {
  EmptyReport,
  SchemaMismatch,
  parseProfileCsv,
  parseResiduals,
  parseStability,
  parseSweep,
} from "./schema.js";
import {
  eigenCurve,
  profileGallery,
  residualConvergence,
  stabilityDiagram,
} from "./plots.js";

const plotSpecSchema = z.object({
  plots: z.array(
    z.object({
      kind: z.enum([
        "stability_diagram",
        "eigen_curve",
        "residual_convergence",
        "profile_gallery",
      ]),
      input: z.string().optional(),
      inputs: z.array(z.string()).optional(),
      manifest: z.string().optional(),
      out: z.string(),
    }),
  ),
});

type PlotEntry = z.infer<typeof plotSpecSchema>["plots"][number];

function readJson(path: string): unknown {
  return JSON.parse(readFileSync(path, "utf-8"));
}

function inputPaths(entry: PlotEntry, base: string): string[] {
  const raw = entry.inputs ?? (entry.input ? [entry.input] : []);
  return raw.map((p) => resolve(base, p));
}

export function renderEntry(entry: PlotEntry, base: string): string {
  const paths = inputPaths(entry, base);
  switch (entry.kind) {
    case "stability_diagram": {
      if (paths.length !== 1) throw new SchemaMismatch("stability_diagram takes one input");
      return stabilityDiagram(parseSweep(readJson(paths[0]), paths[0]));
    }
    case "eigen_curve": {
      if (paths.length !== 1) throw new SchemaMismatch("eigen_curve takes one input");
      return eigenCurve(parseStability(readJson(paths[0]), paths[0]));
    }
    case "residual_convergence": {
      if (paths.length === 0) throw new SchemaMismatch("residual_convergence needs inputs");
      return residualConvergence(paths.map((p) => parseResiduals(readJson(p), p)));
    }
    case "profile_gallery": {
      let files = paths;
      let labels = paths.map((p) => p.split("/").pop() ?? p);
      if (entry.manifest) {
        const mpath = resolve(base, entry.manifest);
        const manifest = z
          .object({
            param: z.string(),
            profiles: z.array(z.record(z.unknown()).and(z.object({ file: z.string() }))),
          })
          .parse(readJson(mpath));
        const mdir = dirname(mpath);
        files = manifest.profiles.map((e) => resolve(mdir, e.file));
        labels = manifest.profiles.map(
          (e) => `${manifest.param} = ${String(e[manifest.param] ?? "?")}`,
        );
      }
      if (files.length === 0) throw new EmptyReport("profile_gallery has no inputs");
      return profileGallery(
        files.map((f, i) => ({
          label: labels[i],
          profile: parseProfileCsv(readFileSync(f, "utf-8"), f),
        })),
      );
    }
  }
}

export function main(argv: string[]): number {
  const idx = argv.indexOf("--spec");
  if (idx < 0 || idx + 1 >= argv.length) {
    console.error("usage: capstab-plot --spec <file>");
    return 2;
  }
  const specPath = resolve(argv[idx + 1]);
  try {
    const spec = plotSpecSchema.parse(readJson(specPath));
    const base = dirname(specPath);
    for (const entry of spec.plots) {
      const svg = renderEntry(entry, base);
      const out = resolve(base, entry.out);
      mkdirSync(dirname(out), { recursive: true });
      writeFileSync(out, svg);
      console.log(`wrote ${out}`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof z.ZodError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof EmptyReport) {
      console.error(`empty report: ${err.message}`);
      return 3;
    }
    console.error(String(err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
