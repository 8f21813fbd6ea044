"""Datasets, mixing models, simulation, and CSV interchange.

A Dataset is an immutable T x N sample matrix (rows = observations).
MixingModel couples an invertible mixing matrix with per-channel source
specs and is the ground truth against which separation quality is scored.
"""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (EmptyChannels, InvalidConfig, IoError, NonFinite,
                     SingularTransform, TooFewSamples)
from .rng import Rng
from .sources import SourceSpec

# relative determinant floor below which a matrix counts as singular
EPS_DET = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Dataset:
    """T x N sample matrix with optional channel names.

    Construct through validate_dataset unless the array is already known
    to be finite with T >= 2; the shape and entries never change after
    construction.
    """

    samples: np.ndarray
    channel_names: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen(self.samples))
        if self.samples.ndim != 2 or self.samples.shape[1] == 0:
            raise EmptyChannels("samples must be a T x N matrix with N >= 1")
        if self.samples.shape[0] < 2:
            raise TooFewSamples("datasets need at least 2 observations")
        if not np.isfinite(self.samples).all():
            raise NonFinite(context="dataset")
        if self.channel_names is not None:
            names = tuple(str(n) for n in self.channel_names)
            if len(names) != self.samples.shape[1]:
                raise EmptyChannels("channel_names length must equal N")
            object.__setattr__(self, "channel_names", names)

    @property
    def T(self) -> int:
        return self.samples.shape[0]

    @property
    def N(self) -> int:
        return self.samples.shape[1]

    def names(self) -> tuple[str, ...]:
        if self.channel_names is not None:
            return self.channel_names
        return tuple(f"y{i + 1}" for i in range(self.N))

    def column(self, i: int) -> np.ndarray:
        return self.samples[:, i]


def validate_dataset(raw, channel_names=None) -> Dataset:
    """Validate a raw matrix into a Dataset.

    Rejections carry the offending location: NonFinite(row, col) for the
    first bad entry, TooFewSamples for T < 2, EmptyChannels for N = 0.
    """
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.size == 0 or arr.shape[1] == 0:
        raise EmptyChannels("dataset needs at least one channel")
    if arr.shape[0] < 2:
        raise TooFewSamples("dataset needs at least 2 observations")
    bad = ~np.isfinite(arr)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise NonFinite(int(r), int(c))
    return Dataset(arr, channel_names)


@dataclass(frozen=True)
class MixingModel:
    """Ground truth (mixing matrix A, list of unit-variance sources)."""

    mixing: np.ndarray
    sources: tuple[SourceSpec, ...]

    def __post_init__(self):
        A = _frozen(self.mixing)
        object.__setattr__(self, "mixing", A)
        object.__setattr__(self, "sources", tuple(self.sources))
        n = len(self.sources)
        if A.ndim != 2 or A.shape != (n, n):
            raise InvalidConfig("mixing matrix must be square, one row per source")
        if not np.isfinite(A).all():
            raise NonFinite(context="mixing matrix")
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[-1] <= EPS_DET * sv[0]:
            raise SingularTransform("mixing matrix is singular within tolerance")

    @property
    def N(self) -> int:
        return len(self.sources)


def simulate(model: MixingModel, T: int, rng: Rng) -> tuple[Dataset, Dataset]:
    """Draw T source rows and mix them: returns (X, S) with X = S A^T.

    Columns of S are drawn independently, one child stream per channel, so
    adding a channel never perturbs the others.
    """
    if T < 2:
        raise TooFewSamples("simulation needs T >= 2")
    n = model.N
    S = np.empty((T, n))
    for i, spec in enumerate(model.sources):
        S[:, i] = spec.sample(rng.child(i).generator(), T)
    X = S @ model.mixing.T
    src_names = tuple(f"s{i + 1}" for i in range(n))
    mix_names = tuple(f"x{i + 1}" for i in range(n))
    return Dataset(X, mix_names), Dataset(S, src_names)


def random_mixing(n: int, rng: Rng, cond: float = 5.0) -> np.ndarray:
    """Random n x n matrix with exact condition number `cond`.

    Built as U diag(s) V^T with Haar-random orthogonal factors and singular
    values geometrically spaced so max(s)/min(s) = cond and the geometric
    mean is 1.
    """
    if cond < 1.0:
        raise InvalidConfig("condition number must be >= 1")
    gen = rng.generator()
    U = np.linalg.qr(gen.standard_normal((n, n)))[0]
    V = np.linalg.qr(gen.standard_normal((n, n)))[0]
    if n == 1:
        return np.abs(U * V)
    s = np.exp(np.linspace(0.5 * math.log(cond), -0.5 * math.log(cond), n))
    return (U * s) @ V.T


# -- CSV interchange ------------------------------------------------------
# Header row of channel names, one observation per row, '.' decimal point.
# %.17g round-trips float64 exactly, keeping reruns byte-identical.

def write_csv(path, data: Dataset) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(data.names())
            for row in np.asarray(data.samples):
                w.writerow([f"{v:.17g}" for v in row])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> Dataset:
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            return _parse_csv(fh, str(path))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _parse_csv(fh: io.TextIOBase, label: str) -> Dataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise IoError(f"{label}: empty file") from None
    names = tuple(h.strip() for h in header)
    if not names or any(not n for n in names):
        raise IoError(f"{label}: malformed header row")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(names):
            raise IoError(f"{label}: line {lineno}: expected "
                          f"{len(names)} fields, got {len(row)}")
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            raise IoError(f"{label}: line {lineno}: non-numeric field") from None
    if not rows:
        raise IoError(f"{label}: no data rows")
    return validate_dataset(np.array(rows, dtype=float), names)
