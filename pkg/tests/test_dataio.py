import gzip
import io

import numpy as np
import pytest

from seqn.dataio import (Dataset, dataset_fingerprint, parse_libsvm, split_train_test,
                         write_libsvm)


def test_parse_basic_line():
    ds = parse_libsvm("-1 5:0.5 12:1\n")
    assert len(ds) == 1
    row = ds.row(0)
    assert row.label == -1.0
    assert np.array_equal(row.indices, [4, 11])
    assert np.array_equal(row.values, [0.5, 1.0])
    assert ds.num_features == 12


def test_parse_label_conventions():
    ds = parse_libsvm("0 1:1\n1 1:2\n+1 1:3\n-1 1:4\n")
    assert list(ds.labels) == [-1.0, 1.0, 1.0, -1.0]


def test_parse_empty_feature_list():
    ds = parse_libsvm("1\n-1 2:0.25\n")
    assert len(ds) == 2
    assert len(ds.row(0).indices) == 0


def test_parse_blank_lines_and_comments():
    ds = parse_libsvm("# header comment\n\n1 1:1\n")
    assert len(ds) == 1


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="line 1"):
        parse_libsvm("2 1:1\n")
    with pytest.raises(ValueError, match="line 2"):
        parse_libsvm("1 1:1\n1 3:0.5 2:0.5\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_libsvm("1 1:abc\n")
    with pytest.raises(ValueError, match="line 1"):
        parse_libsvm("1 0:1\n")


def test_parse_num_features_override():
    ds = parse_libsvm("1 2:1\n", num_features=10)
    assert ds.num_features == 10
    grown = ds.with_num_features(12)
    assert grown.num_features == 12
    with pytest.raises(ValueError):
        ds.with_num_features(1)


def test_round_trip_identical(tmp_path):
    rng = np.random.default_rng(np.random.Philox(0))
    lines = []
    for i in range(50):
        idx = np.sort(rng.choice(100, size=rng.integers(0, 8), replace=False)) + 1
        feats = " ".join(f"{j}:{rng.normal():.17g}" for j in idx)
        lines.append(("+1 " if rng.random() < 0.5 else "-1 ") + feats)
    text = "\n".join(lines) + "\n"
    ds = parse_libsvm(text, num_features=100)
    out = io.StringIO()
    write_libsvm(ds, out)
    ds2 = parse_libsvm(out.getvalue(), num_features=100)
    assert np.array_equal(ds.labels, ds2.labels)
    assert np.array_equal(ds.data, ds2.data)
    assert np.array_equal(ds.indices, ds2.indices)
    assert np.array_equal(ds.indptr, ds2.indptr)


def test_parse_gzip_transparent(tmp_path):
    path = tmp_path / "tiny.txt.gz"
    with gzip.open(path, "wt") as fh:
        fh.write("1 1:0.5\n-1 2:1.5\n")
    ds = parse_libsvm(str(path))
    assert len(ds) == 2
    assert ds.num_features == 2


def test_split_sizes_and_determinism():
    ds = parse_libsvm("".join(f"1 1:{i}\n" for i in range(1, 11)))
    rng1 = np.random.default_rng(np.random.Philox(3))
    train, test = split_train_test(ds, 0.8, rng1)
    assert len(train) == 8 and len(test) == 2
    rng2 = np.random.default_rng(np.random.Philox(3))
    train2, test2 = split_train_test(ds, 0.8, rng2)
    assert np.array_equal(train.data, train2.data)
    assert np.array_equal(test.data, test2.data)
    # union of splits is the original multiset of rows
    vals = sorted(np.concatenate([train.data, test.data]).tolist())
    assert vals == sorted(ds.data.tolist())


def test_split_rejects_degenerate():
    ds = parse_libsvm("1 1:1\n-1 1:2\n")
    rng = np.random.default_rng(np.random.Philox(0))
    with pytest.raises(ValueError):
        split_train_test(ds, 0.2, rng)
    with pytest.raises(ValueError):
        split_train_test(ds, 1.5, rng)


def test_fingerprint_tracks_bytes(tmp_path):
    p1 = tmp_path / "a.txt"
    p1.write_text("1 1:1\n")
    f1 = dataset_fingerprint(str(p1))
    assert f1 == dataset_fingerprint(str(p1))
    p1.write_text("1 1:1\n-1 2:1\n")
    assert dataset_fingerprint(str(p1)) != f1


def test_dataset_index_bounds_checked():
    with pytest.raises(ValueError):
        Dataset(np.array([1.0]), np.array([5], dtype=np.int32), np.array([0, 1]),
                np.array([1.0]), num_features=3)
