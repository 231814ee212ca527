import { z } from "zod";

export const SCHEMA_VERSION = "1";

export class SchemaMismatch extends Error {}
export class EmptyReport extends Error {}

const versioned = z.object({ schema_version: z.string() });

export const sweepRecordSchema = z.object({
  params: z.record(z.number()),
  verdict: z.string().nullable(),
  worst_lambda: z.number().nullable(),
  worst_l: z.number().nullable(),
  ell_stop: z.number().nullable(),
  surface_hash: z.string().nullable(),
  identity_residual: z.number().nullable(),
  error: z.string().nullable(),
});

export const sweepSchema = z.object({
  schema_version: z.string(),
  config_hash: z.string(),
  param: z.string(),
  spec: z.record(z.unknown()),
  records: z.array(sweepRecordSchema),
  diagram: z.array(
    z.object({
      param: z.number(),
      verdict: z.string().nullable(),
      worst_lambda: z.number().nullable(),
      worst_l: z.number().nullable(),
    }),
  ),
  succeeded: z.number(),
  failed: z.number(),
});

export const modeSchema = z.object({
  l: z.number(),
  lambda_min: z.number(),
  constrained: z.boolean(),
  zero_mode: z.boolean(),
});

export const stabilitySchema = z.object({
  schema_version: z.string(),
  config_hash: z.string(),
  spec: z.record(z.unknown()),
  stability: z.object({
    modes: z.array(modeSchema),
    verdict: z.string(),
    worst_l: z.number(),
    worst_lambda: z.number(),
    grid: z.number(),
    eps_stab: z.number(),
  }),
});

export const residualReportSchema = z.object({
  identity: z.string(),
  grid: z.number(),
  max_pointwise: z.number().nullable(),
  integral_abs: z.number().nullable(),
  integral_rel: z.number().nullable(),
  convergence_order: z.number().nullable(),
});

export const residualsSchema = z.object({
  schema_version: z.string(),
  config_hash: z.string(),
  spec: z.record(z.unknown()),
  reports: z.array(residualReportSchema),
});

export type SweepPayload = z.infer<typeof sweepSchema>;
export type StabilityPayload = z.infer<typeof stabilitySchema>;
export type ResidualsPayload = z.infer<typeof residualsSchema>;

function checkVersion(raw: unknown, path: string): void {
  const head = versioned.safeParse(raw);
  if (!head.success) {
    throw new SchemaMismatch(`${path}: missing schema_version`);
  }
  if (head.data.schema_version !== SCHEMA_VERSION) {
    throw new SchemaMismatch(
      `${path}: schema_version ${head.data.schema_version} != ${SCHEMA_VERSION}`,
    );
  }
}

export function parseSweep(raw: unknown, path = "<sweep>"): SweepPayload {
  checkVersion(raw, path);
  const res = sweepSchema.safeParse(raw);
  if (!res.success) throw new SchemaMismatch(`${path}: ${res.error.message}`);
  if (res.data.records.length === 0) {
    throw new EmptyReport(`${path}: sweep has no records`);
  }
  return res.data;
}

export function parseStability(raw: unknown, path = "<stability>"): StabilityPayload {
  checkVersion(raw, path);
  const res = stabilitySchema.safeParse(raw);
  if (!res.success) throw new SchemaMismatch(`${path}: ${res.error.message}`);
  if (res.data.stability.modes.length === 0) {
    throw new EmptyReport(`${path}: no modes`);
  }
  return res.data;
}

export function parseResiduals(raw: unknown, path = "<residuals>"): ResidualsPayload {
  checkVersion(raw, path);
  const res = residualsSchema.safeParse(raw);
  if (!res.success) throw new SchemaMismatch(`${path}: ${res.error.message}`);
  if (res.data.reports.length === 0) {
    throw new EmptyReport(`${path}: no residual reports`);
  }
  return res.data;
}

export interface Profile {
  s: number[];
  x: number[];
  z: number[];
  alpha: number[];
}

/** Parse a profile CSV with the canonical `s,x,z,alpha` header. */
export function parseProfileCsv(text: string, path = "<profile>"): Profile {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 2 || lines[0].trim() !== "s,x,z,alpha") {
    throw new SchemaMismatch(`${path}: expected header s,x,z,alpha`);
  }
  const prof: Profile = { s: [], x: [], z: [], alpha: [] };
  for (const line of lines.slice(1)) {
    const cells = line.split(",").map(Number);
    if (cells.length !== 4 || cells.some((c) => Number.isNaN(c))) {
      throw new SchemaMismatch(`${path}: malformed row "${line}"`);
    }
    prof.s.push(cells[0]);
    prof.x.push(cells[1]);
    prof.z.push(cells[2]);
    prof.alpha.push(cells[3]);
  }
  return prof;
}
