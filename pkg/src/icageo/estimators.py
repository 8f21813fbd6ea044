"""Sample-based estimators: scalar entropy, negentropy, mutual information,
and nonparametric score functions.

Defaults favor tuning-light classical estimators: m-spacing entropy with
digamma bias reduction, k-nearest-neighbor mutual information in the
Chebyshev metric, and a kernel density score table with a smoothing-bias
correction.  All are deterministic functions of their inputs.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from .data import Dataset
from .errors import (DegenerateSample, DimensionMismatch, DimensionTooHigh,
                     EstimatorFailure, InvalidConfig, NonFinite,
                     TooFewSamples)
from .sources import GAUSSIAN_ENTROPY

ENTROPY_METHODS = ("vasicek_spacing", "histogram")
MI_METHODS = ("knn_kl", "histogram")

# raw mutual information above this fraction of the estimator's saturation
# value is reported as near-deterministic dependence
SATURATION_FRACTION = 0.9


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    method: str
    n: int
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NegentropyEstimate:
    value: float
    entropy_method: str
    n: int


@dataclass(frozen=True)
class MIEstimate:
    """Mutual-information estimate in nats.

    value is clamped at zero; raw keeps the uncorrected number so noise
    around zero stays visible.  near_deterministic_dependence is set when
    raw exceeds SATURATION_FRACTION of the method's saturation level
    (psi(T) - psi(k) for knn_kl, ln(bins) for histogram), at which point
    the number is a floor, not an estimate.
    """

    value: float
    raw: float
    method: str
    dimension: int
    n: int
    saturation: float
    near_deterministic_dependence: bool


def _check_vector(x, minimum: int) -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if v.size < minimum:
        raise TooFewSamples(f"need at least {minimum} samples, got {v.size}")
    if not np.isfinite(v).all():
        raise NonFinite(context="sample vector")
    if v.max() == v.min():
        raise DegenerateSample("all sample values are equal")
    return v


def _vasicek(x: np.ndarray, m: int) -> float:
    n = x.size
    xs = np.sort(x)
    padded = np.concatenate([np.full(m, xs[0]), xs, np.full(m, xs[-1])])
    gaps = padded[2 * m:] - padded[:n]
    gaps = np.maximum(gaps, 1e-300)
    base = float(np.mean(np.log(n / (2.0 * m) * gaps)))
    # digamma bias-reduction terms for the m-spacing estimator
    i = np.arange(1, m + 1)
    corr = (math.log(2.0 * m / n) - (1.0 - 2.0 * m / n) * digamma(2 * m)
            + digamma(n + 1) - (2.0 / n) * float(np.sum(digamma(i + m - 1))))
    return base + corr


def _hist_entropy(x: np.ndarray, bins: int) -> float:
    lo, hi = float(x.min()), float(x.max())
    counts, _ = np.histogram(x, bins=bins, range=(lo, hi))
    p = counts[counts > 0] / x.size
    width = (hi - lo) / bins
    return float(-(p * np.log(p)).sum() + math.log(width))


def entropy_scalar(x, method: str = "vasicek_spacing",
                   m: int | None = None, bins: int | None = None) -> EntropyEstimate:
    """Differential entropy of a scalar sample, in nats.

    vasicek_spacing: m-spacing estimate (default m = floor(sqrt(n))) with
    the standard digamma bias-reduction terms.  histogram: plug-in entropy
    of the binned density plus the log bin width.
    """
    v = _check_vector(x, 10)
    n = v.size
    if method == "vasicek_spacing":
        m = int(math.sqrt(n)) if m is None else int(m)
        if not (1 <= m < n / 2):
            raise TooFewSamples(f"spacing m={m} must satisfy 1 <= m < n/2")
        return EntropyEstimate(_vasicek(v, m), method, n, {"m": m})
    if method == "histogram":
        bins = max(2, math.isqrt(n)) if bins is None else int(bins)
        if bins < 2:
            raise TooFewSamples("histogram needs at least 2 bins")
        return EntropyEstimate(_hist_entropy(v, bins), method, n, {"bins": bins})
    raise InvalidConfig(f"unknown entropy method {method!r}")


def _negentropy_raw(v: np.ndarray) -> float:
    """Vasicek-based negentropy as a bare float, no plausibility gate.

    Used inside solver loops where transient estimates on partly separated
    data are monitoring signals, not reported results.
    """
    var = float(np.var(v))
    if var <= 0.0:
        raise DegenerateSample("zero variance")
    m = max(1, int(math.sqrt(v.size)))
    return GAUSSIAN_ENTROPY + 0.5 * math.log(var) - _vasicek(v, m)


def negentropy_scalar(x, method: str = "vasicek_spacing",
                      **kwargs) -> NegentropyEstimate:
    """Divergence of the sample law to the Gaussian of equal variance.

    Computed as (1/2)ln(2 pi e var(x)) minus the entropy estimate, which
    makes it invariant under affine maps of x up to estimator noise.
    Mildly negative values are honest noise and are reported as-is; values
    at or below -0.1 nats are implausible for any distribution and raise
    EstimatorFailure.
    """
    v = _check_vector(x, 10)
    var = float(np.var(v))
    if var <= 0.0:
        raise DegenerateSample("zero variance")
    ent = entropy_scalar(v, method, **kwargs)
    value = GAUSSIAN_ENTROPY + 0.5 * math.log(var) - ent.value
    if value <= -0.1:
        raise EstimatorFailure(f"negentropy estimate {value:.4f} below -0.1; "
                               "estimator assumptions violated")
    return NegentropyEstimate(value, ent.method, v.size)


def _marginal_digamma_counts(column: np.ndarray, eps: np.ndarray) -> float:
    # strict |xi - xj| < eps_i counts, excluding the point itself
    xs = np.sort(column)
    hi = np.searchsorted(xs, column + eps, side="left")
    lo = np.searchsorted(xs, column - eps, side="right")
    counts = np.maximum(hi - lo - 1, 1)
    return float(np.mean(digamma(counts + 1)))


def _knn_mi(Y: np.ndarray, k: int) -> tuple[float, float]:
    T, N = Y.shape
    dist, _ = cKDTree(Y).query(Y, k=k + 1, p=np.inf)
    eps = dist[:, -1]
    total = 0.0
    for j in range(N):
        total += _marginal_digamma_counts(Y[:, j], eps)
    raw = float(digamma(k) + (N - 1) * digamma(T) - total)
    saturation = float(digamma(T) - digamma(k))
    return raw, saturation


def _hist_mi(Y: np.ndarray, bins: int) -> tuple[float, float]:
    T, N = Y.shape
    edges = [np.linspace(Y[:, j].min(), Y[:, j].max(), bins + 1)
             for j in range(N)]
    counts, _ = np.histogramdd(Y, bins=edges)
    p = counts / T
    # joint entropy and marginal entropies of the binned law
    nz = p[p > 0]
    joint_h = float(-(nz * np.log(nz)).sum())
    marg_h = 0.0
    for j in range(N):
        pj = p.sum(axis=tuple(a for a in range(N) if a != j))
        pj = pj[pj > 0]
        marg_h += float(-(pj * np.log(pj)).sum())
    raw = marg_h - joint_h
    return raw, math.log(bins)


def mutual_information(data: Dataset, method: str = "knn_kl",
                       k: int = 5, bins: int | None = None,
                       seed: int = 0) -> MIEstimate:
    """Mutual information between the channels of a 2- or 3-column dataset.

    knn_kl: k-nearest-neighbor estimator in the Chebyshev metric (default
    k=5); exact duplicate values are deterministically jittered to keep
    neighbor counts well defined.  histogram: plug-in on a per-axis
    equal-width grid with ceil(T^(1/3)) bins by default.
    """
    if data.N < 2:
        raise DimensionMismatch("mutual information needs at least 2 channels")
    if data.N > 3:
        raise DimensionTooHigh("mutual information supports at most 3 channels")
    if data.T < 1000:
        raise TooFewSamples("mutual information needs T >= 1000")
    Y = np.array(data.samples, dtype=float)
    if method == "knn_kl":
        if not (1 <= k < data.T):
            raise TooFewSamples("neighbor count k out of range")
        for j in range(Y.shape[1]):
            col = Y[:, j]
            if np.unique(col).size < col.size:
                gen = np.random.Generator(np.random.Philox(
                    np.random.SeedSequence(seed, spawn_key=(j,))))
                scale = 1e-10 * max(float(col.std()), 1e-30)
                Y[:, j] = col + scale * gen.standard_normal(col.size)
        raw, saturation = _knn_mi(Y, k)
    elif method == "histogram":
        bins = int(math.ceil(data.T ** (1.0 / 3.0))) if bins is None else int(bins)
        if bins < 2:
            raise TooFewSamples("histogram needs at least 2 bins")
        raw, saturation = _hist_mi(Y, bins)
    else:
        raise InvalidConfig(f"unknown MI method {method!r}")
    flagged = raw > SATURATION_FRACTION * saturation
    return MIEstimate(max(raw, 0.0), raw, method, data.N, data.T,
                      saturation, flagged)


@dataclass(frozen=True)
class ScoreTable:
    """Piecewise-linear score function estimate on a fixed grid.

    Calling the table evaluates psi by linear interpolation between nodes;
    outside the grid the end values are held constant (clamped linear
    extrapolation).  density carries the kernel density estimate on the
    same grid for plotting.
    """

    grid: np.ndarray
    density: np.ndarray
    psi: np.ndarray
    bandwidth: float

    def __post_init__(self):
        for name in ("grid", "density", "psi"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return np.interp(s, self.grid, self.psi)


def score_table(x, bins: int = 256) -> ScoreTable:
    """Kernel-density score estimate psi-hat = -q'/q on a regular grid.

    The Gaussian-kernel bandwidth uses the robust sd/IQR scale at the
    n^(-1/7) rate appropriate for a density-derivative ratio, and the
    returned score is rescaled by (sd^2 + h^2)/sd^2 to undo the variance
    inflation the kernel smoothing introduces.
    """
    v = _check_vector(x, 1000)
    n = v.size
    sd = float(v.std())
    if sd == 0.0:
        raise DegenerateSample("zero variance")
    q75, q25 = np.percentile(v, [75.0, 25.0])
    scale = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    h = 1.5 * scale * n ** (-1.0 / 7.0)
    grid = np.linspace(v.min() - 3.0 * h, v.max() + 3.0 * h, int(bins))
    q = np.zeros(grid.size)
    dq = np.zeros(grid.size)
    step = max(1, 2_000_000 // grid.size)
    for start in range(0, n, step):
        u = (grid[None, :] - v[start:start + step, None]) / h
        kern = np.exp(-0.5 * u * u)
        q += kern.sum(axis=0)
        dq += (-u * kern).sum(axis=0)
    root = math.sqrt(2.0 * math.pi)
    q /= n * h * root
    dq /= n * h * h * root
    psi = -dq / np.maximum(q, 1e-300)
    psi *= (sd * sd + h * h) / (sd * sd)
    return ScoreTable(grid, q, psi, h)
