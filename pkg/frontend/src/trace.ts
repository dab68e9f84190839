// Parser for solver trace CSVs: a "# manifest: {...}" comment, the fixed
// header below, then one row per epoch boundary. Values are decimal floats
// as printed by the solver (incl. "nan"/"inf"), parsed back exactly.

export const TRACE_HEADER =
  "epoch,wall_seconds,psi,rel_err,nnz,train_acc,test_acc,residual_norm";

const FIELDS = TRACE_HEADER.split(",");

export interface TraceRow {
  epoch: number;
  wall_seconds: number;
  psi: number;
  rel_err: number;
  nnz: number;
  train_acc: number;
  test_acc: number;
  residual_norm: number;
}

export interface Manifest {
  config?: Record<string, unknown>;
  seed?: number;
  dataset?: string;
  version?: string;
  started?: string;
}

export interface Trace {
  manifest: Manifest | null;
  rows: TraceRow[];
}

function parseNumber(token: string, column: string, line: number): number {
  const t = token.trim();
  if (t === "nan") return NaN;
  if (t === "inf") return Infinity;
  if (t === "-inf") return -Infinity;
  if (t === "") throw new Error(`line ${line}: empty value in column ${column}`);
  const v = Number(t);
  if (Number.isNaN(v)) {
    throw new Error(`line ${line}: bad value ${JSON.stringify(t)} in column ${column}`);
  }
  return v;
}

export function parseTrace(text: string, name = "<trace>"): Trace {
  let manifest: Manifest | null = null;
  const body: Array<{ line: string; num: number }> = [];
  text.split(/\r?\n/).forEach((line, idx) => {
    if (line.startsWith("#")) {
      const payload = line.slice(1).trim();
      if (payload.startsWith("manifest:")) {
        manifest = JSON.parse(payload.slice("manifest:".length));
      }
      return;
    }
    if (line.trim() !== "") body.push({ line, num: idx + 1 });
  });
  if (body.length === 0) throw new Error(`${name}: empty trace body`);

  const header = body[0].line;
  if (header !== TRACE_HEADER) {
    const got = header.split(",");
    let offending = got.length > FIELDS.length ? got[FIELDS.length] : "<missing>";
    for (let i = 0; i < FIELDS.length; i++) {
      if (got[i] !== FIELDS[i]) {
        offending = got[i] ?? "<missing>";
        break;
      }
    }
    throw new Error(
      `${name}: trace header mismatch near column ${JSON.stringify(offending)}`,
    );
  }

  const rows: TraceRow[] = [];
  for (const { line, num } of body.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== FIELDS.length) {
      throw new Error(`${name}: line ${num}: expected ${FIELDS.length} fields, got ${parts.length}`);
    }
    const rec = Object.fromEntries(
      FIELDS.map((f, i) => [f, parseNumber(parts[i], f, num)]),
    ) as unknown as TraceRow;
    rows.push(rec);
  }
  if (rows.length === 0) throw new Error(`${name}: trace has a header but no rows`);
  return { manifest, rows };
}
