import logging

import numpy as np
import pytest

from sscn.datasets import (
    LibsvmFormatError,
    SparseDataset,
    data_dir,
    dataset_stats,
    load_dataset,
    parse_libsvm,
    serialize_libsvm,
)
from sscn.problems import make_synthetic_dataset


def test_parse_basic_line():
    ds = parse_libsvm("+1 1:0.5 3:2.0\n")
    assert ds.n_samples == 1
    assert ds.labels == (1,)
    assert ds.rows == (((0, 0.5), (2, 2.0)),)
    assert ds.n_features == 3


def test_parse_empty_row():
    ds = parse_libsvm("-1\n")
    assert ds.n_samples == 1
    assert ds.labels == (-1,)
    assert ds.rows == ((),)


def test_parse_two_line_fixture_against_reference_reader(tmp_path):
    # derived fixture: same bytes through sklearn's LibSVM reader
    text = "0 2:1\n+1 1:1\n"
    ds = parse_libsvm(text)
    assert ds.labels == (-1, 1)
    assert ds.n_features == 2

    from sklearn.datasets import load_svmlight_file

    path = tmp_path / "two.svm"
    path.write_text(text)
    X, y = load_svmlight_file(str(path))
    assert X.shape == (ds.n_samples, ds.n_features)
    ours = ds.to_csr()
    assert np.allclose(X.toarray(), ours.toarray())
    # raw labels 0/1 map to -1/+1 by the documented rule
    assert [1 if v == 1 else -1 for v in y] == list(ds.labels)


def test_parse_accepts_bytes_and_streams(tmp_path):
    text = "+1 1:1 2:3\n-1 2:0.5\n"
    a = parse_libsvm(text)
    b = parse_libsvm(text.encode())
    path = tmp_path / "d.svm"
    path.write_text(text)
    with open(path, "rb") as fh:
        c = parse_libsvm(fh)
    assert a == b == c


def test_parse_skips_comments_and_blank_lines():
    ds = parse_libsvm("# header\n\n+1 1:1\n   \n-1 1:2\n")
    assert ds.n_samples == 2


def test_parse_hint_only_raises_features():
    ds = parse_libsvm("+1 1:1\n", n_features_hint=9)
    assert ds.n_features == 9
    # a smaller hint never shrinks below the max seen index
    ds2 = parse_libsvm("+1 5:1\n", n_features_hint=2)
    assert ds2.n_features == 5


def test_parse_errors_carry_line_numbers():
    with pytest.raises(LibsvmFormatError, match="line 2"):
        parse_libsvm("+1 1:1\n+1 1:x\n")
    with pytest.raises(LibsvmFormatError, match="not strictly increasing"):
        parse_libsvm("+1 2:1 2:3\n")
    with pytest.raises(LibsvmFormatError, match="not strictly increasing"):
        parse_libsvm("+1 3:1 2:1\n")
    with pytest.raises(LibsvmFormatError, match="label"):
        parse_libsvm("2 1:1\n")
    with pytest.raises(LibsvmFormatError):
        parse_libsvm("")


def test_zero_label_remap_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="sscn.datasets"):
        parse_libsvm("0 1:1\n")
    assert any("remapped" in r.message for r in caplog.records)


def test_roundtrip_serialization():
    ds = make_synthetic_dataset(n_features=20, n_samples=30, seed=3)
    again = parse_libsvm(serialize_libsvm(ds))
    assert again == ds
    # order preserving: sample i in the text is row i
    text = serialize_libsvm(ds)
    for i, line in enumerate(text.strip().split("\n")):
        row = parse_libsvm(line + "\n", n_features_hint=ds.n_features).rows[0]
        assert row == ds.rows[i]


def test_dataset_invariants_enforced():
    with pytest.raises(ValueError):
        SparseDataset(2, 1, (((0, 1.0), (0, 2.0)),), (1,))  # duplicate index
    with pytest.raises(ValueError):
        SparseDataset(1, 1, (((3, 1.0),),), (1,))  # out of range
    with pytest.raises(ValueError):
        SparseDataset(1, 2, (((0, 1.0),),), (1, -1))  # length mismatch
    with pytest.raises(ValueError):
        SparseDataset(1, 1, (((0, 1.0),),), (2,))  # bad label


def test_stats_single_sample():
    assert dataset_stats(parse_libsvm("+1 1:1\n")) == (1, 1, 1, 1.0)


def test_stats_two_line_fixture():
    assert dataset_stats(parse_libsvm("0 2:1\n+1 1:1\n")) == (2, 2, 2, 0.5)


def test_data_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("SSCN_DATA_DIR", str(tmp_path))
    assert data_dir() == tmp_path
    (tmp_path / "toy.svm").write_text("+1 1:1\n")
    ds = load_dataset("toy.svm")
    assert ds.n_samples == 1


_GISETTE = data_dir() / "gisette_scale"


@pytest.mark.skipif(not _GISETTE.exists(), reason="gisette_scale not present under SSCN_DATA_DIR")
def test_gisette_metadata():
    stats = dataset_stats(load_dataset("gisette_scale"))
    assert stats.n_features == 5000
    assert stats.n_samples == 6000
    assert stats.nnz > 0
