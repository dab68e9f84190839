"""LIBSVM-format parsing, CSR dataset container, and train/test splitting."""

import gzip
import hashlib
import io
import os
from dataclasses import dataclass

import numpy as np


@dataclass
class SparseRow:
    """One sample: strictly ascending 0-based feature ids, values, label in {-1,+1}."""

    indices: np.ndarray
    values: np.ndarray
    label: float


class Dataset:
    """Immutable sparse dataset in CSR form with +/-1 labels."""

    def __init__(self, data, indices, indptr, labels, num_features, name=""):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int32)
        self.labels = np.ascontiguousarray(labels, dtype=np.float64)
        self.num_features = int(num_features)
        self.name = name
        if len(self.indices) and self.indices.max() >= self.num_features:
            raise ValueError(
                f"feature index {self.indices.max()} out of range for num_features={self.num_features}"
            )

    def __len__(self):
        return len(self.labels)

    @property
    def num_samples(self):
        return len(self.labels)

    def row(self, i):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return SparseRow(self.indices[lo:hi], self.data[lo:hi], float(self.labels[i]))

    def subset(self, rows, name=None):
        """New dataset restricted to the given row order."""
        rows = np.asarray(rows, dtype=np.int64)
        counts = (self.indptr[rows + 1] - self.indptr[rows]).astype(np.int64)
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        data = np.empty(int(indptr[-1]), dtype=np.float64)
        indices = np.empty(int(indptr[-1]), dtype=np.int32)
        for j, r in enumerate(rows):
            lo, hi = self.indptr[r], self.indptr[r + 1]
            data[indptr[j] : indptr[j + 1]] = self.data[lo:hi]
            indices[indptr[j] : indptr[j + 1]] = self.indices[lo:hi]
        return Dataset(data, indices, indptr, self.labels[rows], self.num_features,
                       name=name if name is not None else self.name)

    def with_num_features(self, num_features):
        if num_features < self.num_features and len(self.indices) and self.indices.max() >= num_features:
            raise ValueError("cannot shrink num_features below the largest stored index")
        return Dataset(self.data, self.indices, self.indptr, self.labels, num_features, self.name)


def _map_label(tok, lineno):
    if tok in ("1", "+1", "1.0", "+1.0"):
        return 1.0
    if tok in ("-1", "0", "-1.0", "0.0"):
        return -1.0
    raise ValueError(f"line {lineno}: unknown label {tok!r} (expected -1/0/1)")


def parse_libsvm(source, num_features=None, name=""):
    """Parse LIBSVM text ("<label> <idx>:<val> ...", 1-based indices).

    Labels 0/-1 map to -1 and 1/+1 to +1; indices are shifted to 0-based.
    `source` may be a path (``.gz`` decompressed transparently), a text
    stream, or a string of lines.
    """
    if isinstance(source, str):
        if "\n" not in source and source and os.path.exists(source):
            opener = gzip.open if source.endswith(".gz") else open
            with opener(source, "rt") as fh:
                return parse_libsvm(fh, num_features=num_features, name=name or source)
        source = io.StringIO(source)

    data, indices, indptr, labels = [], [], [0], []
    max_index = -1
    for lineno, line in enumerate(source, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        labels.append(_map_label(toks[0], lineno))
        prev = -1
        for tok in toks[1:]:
            try:
                idx_s, val_s = tok.split(":", 1)
                idx = int(idx_s) - 1
                val = float(val_s)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: malformed feature token {tok!r}") from exc
            if idx < 0:
                raise ValueError(f"line {lineno}: feature index must be >= 1, got {idx + 1}")
            if idx <= prev:
                raise ValueError(f"line {lineno}: feature indices not strictly ascending")
            prev = idx
            indices.append(idx)
            data.append(val)
            max_index = max(max_index, idx)
        indptr.append(len(indices))

    n = num_features if num_features is not None else max_index + 1
    return Dataset(np.array(data), np.array(indices, dtype=np.int32),
                   np.array(indptr), np.array(labels), max(n, 0), name=name)


def write_libsvm(dataset, target):
    """Serialize to LIBSVM text; values printed with round-trip precision."""
    if isinstance(target, str):
        with open(target, "w") as fh:
            write_libsvm(dataset, fh)
        return
    for i in range(len(dataset)):
        row = dataset.row(i)
        feats = " ".join(f"{int(j) + 1}:{float(v)!r}" for j, v in zip(row.indices, row.values))
        label = "+1" if row.label > 0 else "-1"
        target.write(f"{label} {feats}".rstrip() + "\n")


def split_train_test(dataset, fraction, rng):
    """Seeded shuffle then split; the two parts are disjoint and exhaustive."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n = len(dataset)
    perm = rng.permutation(n)
    n_train = int(fraction * n)
    if n_train == 0 or n_train == n:
        raise ValueError(f"degenerate split: {n_train}/{n - n_train} rows")
    return (dataset.subset(perm[:n_train]), dataset.subset(perm[n_train:]))


def dataset_fingerprint(path):
    """sha256 of the raw file bytes; identical iff the file bytes are."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
