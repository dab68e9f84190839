"""Trace records, CSV serialization, and run manifests.

One row is logged per epoch boundary. The manifest travels as '#'-prefixed
comment lines ahead of the header so a trace file is self-describing; the
data schema itself is the fixed header below. Floats are printed with
repr so that parse-back equals emit bit for bit.
"""

import json
from dataclasses import asdict, dataclass

TRACE_HEADER = "epoch,wall_seconds,psi,rel_err,nnz,train_acc,test_acc,residual_norm"
_FIELDS = TRACE_HEADER.split(",")


@dataclass
class TraceRecord:
    epoch: float
    wall_seconds: float
    psi: float
    rel_err: float
    nnz: int
    train_acc: float
    test_acc: float
    residual_norm: float

    def to_csv_row(self):
        d = asdict(self)
        return ",".join(repr(float(d[f])) if f != "nnz" else str(int(d[f]))
                        for f in _FIELDS)

    @classmethod
    def from_csv_row(cls, row):
        parts = row.split(",")
        if len(parts) != len(_FIELDS):
            raise ValueError(f"trace row has {len(parts)} fields, expected {len(_FIELDS)}")
        vals = {f: (int(p) if f == "nnz" else float(p)) for f, p in zip(_FIELDS, parts)}
        return cls(**vals)


def write_trace(path, manifest, records):
    with open(path, "w") as fh:
        fh.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
        fh.write(TRACE_HEADER + "\n")
        for rec in records:
            fh.write(rec.to_csv_row() + "\n")


def read_trace(path):
    """Returns (manifest dict or None, list of TraceRecord)."""
    manifest = None
    records = []
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    body = []
    for ln in lines:
        if ln.startswith("#"):
            payload = ln[1:].strip()
            if payload.startswith("manifest:"):
                manifest = json.loads(payload[len("manifest:"):])
            continue
        if ln:
            body.append(ln)
    if not body:
        raise ValueError(f"{path}: empty trace file")
    if body[0] != TRACE_HEADER:
        got = body[0].split(",")
        exp = _FIELDS
        bad = next((g for g, e in zip(got, exp) if g != e), got[-1] if got else "?")
        raise ValueError(f"{path}: bad trace header near column {bad!r}")
    for ln in body[1:]:
        records.append(TraceRecord.from_csv_row(ln))
    return manifest, records
