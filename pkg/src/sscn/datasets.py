"""LibSVM-format classification datasets as row-sparse design matrices."""

import io
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

_VALID_LABELS = (1.0, -1.0, 0.0)


class LibsvmFormatError(ValueError):
    """Malformed LibSVM input; carries the 1-based line number."""

    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


@dataclass(frozen=True)
class SparseDataset:
    """Row-sparse design matrix with +/-1 labels.

    ``rows[i]`` is the list of ``(feature_index, value)`` pairs of sample i,
    0-based and with strictly increasing indices. Immutable after
    construction; safe for concurrent reads.
    """

    n_features: int
    n_samples: int
    rows: tuple
    labels: tuple
    _csr_cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.n_features < 1:
            raise ValueError("n_features must be >= 1")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if len(self.rows) != self.n_samples or len(self.labels) != self.n_samples:
            raise ValueError("rows/labels length must equal n_samples")
        for row in self.rows:
            prev = -1
            for j, _ in row:
                if not prev < j < self.n_features:
                    raise ValueError(f"feature index {j} out of range or not increasing")
                prev = j
        for y in self.labels:
            if y not in (1, -1):
                raise ValueError(f"label {y} not in {{+1, -1}}")

    @property
    def nnz(self):
        return sum(len(row) for row in self.rows)

    def to_csr(self):
        """Design matrix as a scipy CSR matrix (cached)."""
        if not self._csr_cache:
            indptr = np.zeros(self.n_samples + 1, dtype=np.int64)
            indices = np.empty(self.nnz, dtype=np.int64)
            data = np.empty(self.nnz, dtype=np.float64)
            pos = 0
            for i, row in enumerate(self.rows):
                for j, v in row:
                    indices[pos] = j
                    data[pos] = v
                    pos += 1
                indptr[i + 1] = pos
            mat = sp.csr_matrix((data, indices, indptr), shape=(self.n_samples, self.n_features))
            self._csr_cache.append(mat)
        return self._csr_cache[0]

    def label_array(self):
        return np.asarray(self.labels, dtype=np.float64)


class DatasetStats(NamedTuple):
    n_features: int
    n_samples: int
    nnz: int
    label_balance: float


def _normalize_label(raw, lineno):
    try:
        y = float(raw)
    except ValueError:
        raise LibsvmFormatError(lineno, f"cannot parse label {raw!r}") from None
    if y not in _VALID_LABELS:
        raise LibsvmFormatError(lineno, f"label {raw!r} not in {{0, 1, -1, +1}}")
    return 1 if y == 1.0 else -1, y == 0.0


def parse_libsvm(text, n_features_hint=None):
    """Parse LibSVM classification text into a :class:`SparseDataset`.

    Accepts str, bytes, or a readable text/binary stream. File indices are
    1-based and strictly increasing per line; they are stored 0-based.
    Labels {0,1} are remapped to {-1,+1} (0 -> -1) with a logged warning;
    blank lines and lines starting with '#' are skipped.
    """
    if isinstance(text, bytes):
        lines = io.StringIO(text.decode("ascii")).readlines()
    elif isinstance(text, str):
        lines = io.StringIO(text).readlines()
    else:
        raw = text.read()
        if isinstance(raw, bytes):
            raw = raw.decode("ascii")
        lines = io.StringIO(raw).readlines()

    rows = []
    labels = []
    max_index = 0
    remapped = False
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        label, was_zero = _normalize_label(tokens[0], lineno)
        remapped |= was_zero
        row = []
        prev = 0  # indices in the file are 1-based
        for tok in tokens[1:]:
            try:
                idx_str, val_str = tok.split(":", 1)
                idx = int(idx_str)
                val = float(val_str)
            except ValueError:
                raise LibsvmFormatError(lineno, f"malformed token {tok!r}") from None
            if idx <= prev:
                raise LibsvmFormatError(lineno, f"index {idx} not strictly increasing")
            prev = idx
            row.append((idx - 1, val))
        max_index = max(max_index, prev)
        rows.append(tuple(row))
        labels.append(label)

    if not rows:
        raise LibsvmFormatError(0, "no samples found")
    if remapped:
        logger.warning("labels {0,1} remapped to {-1,+1}")
    n_features = max(max_index, n_features_hint or 0, 1)
    return SparseDataset(n_features=n_features, n_samples=len(rows), rows=tuple(rows), labels=tuple(labels))


def serialize_libsvm(dataset):
    """Inverse of :func:`parse_libsvm`: one `<label> <idx>:<val> ...` line per sample."""
    out = []
    for y, row in zip(dataset.labels, dataset.rows):
        parts = ["+1" if y == 1 else "-1"]
        parts.extend(f"{j + 1}:{v!r}" for j, v in row)
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def dataset_stats(dataset):
    """(n_features, n_samples, nnz, fraction of +1 labels)."""
    pos = sum(1 for y in dataset.labels if y == 1)
    return DatasetStats(dataset.n_features, dataset.n_samples, dataset.nnz, pos / dataset.n_samples)


def data_dir():
    """Dataset directory: $SSCN_DATA_DIR, default ./data."""
    return Path(os.environ.get("SSCN_DATA_DIR", "./data"))


def load_dataset(path, n_features_hint=None):
    """Load a LibSVM file; relative paths resolve against :func:`data_dir`."""
    p = Path(path)
    if not p.is_absolute():
        p = data_dir() / p
    with open(p, "rb") as fh:
        return parse_libsvm(fh, n_features_hint=n_features_hint)
