"""Separation quality and the information-geometric decomposition report.

The Amari index scores a gain matrix (demixing times mixing) against the
ideal of a scaled permutation.  diagnose assembles the estimable pieces of
the joint divergence identity for a dataset: mutual information (low
dimension only), correlation, and marginal negentropies, plus the
correlation-minus-negentropy objective proxy.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import DegenerateGain, DimensionTooHigh
from .estimators import (MIEstimate, NegentropyEstimate, mutual_information,
                         negentropy_scalar)
from .gaussian import correlation_C, sample_covariance


@dataclass(frozen=True)
class AmariIndex:
    """Normalized permutation/scale-invariant separation error in [0, 1].

    0 exactly when the gain is a permutation of a diagonal matrix; 1 for
    maximal mixing (all gain entries equal in magnitude).
    """

    value: float
    gain: np.ndarray

    def __post_init__(self):
        g = np.array(self.gain, dtype=float)
        g.flags.writeable = False
        object.__setattr__(self, "gain", g)


def amari_index(gain) -> AmariIndex:
    """Row/column-max deviation index of a gain matrix, normalized to [0,1].

    Sums (row sum / row max - 1) over rows and the same over columns, then
    divides by 2 N (N - 1), the value attained by an all-ones gain.
    """
    g = np.asarray(gain, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 2:
        raise DegenerateGain("gain must be square, at least 2 x 2")
    if not np.isfinite(g).all():
        raise DegenerateGain("gain has non-finite entries")
    p = np.abs(g)
    if (p.sum(axis=1) == 0).any() or (p.sum(axis=0) == 0).any():
        raise DegenerateGain("gain has an all-zero row or column")
    n = p.shape[0]
    rows = (p.sum(axis=1) / p.max(axis=1) - 1.0).sum()
    cols = (p.sum(axis=0) / p.max(axis=0) - 1.0).sum()
    return AmariIndex(float((rows + cols) / (2.0 * n * (n - 1))), g)


@dataclass(frozen=True)
class DecompositionReport:
    """Estimated pieces of I(Y) + sum G(Y_i) = C(Y) + G(Y).

    mi is only estimable for N <= 3 and is None otherwise.  The joint
    non-Gaussianity G(Y) needs joint density estimation and is never
    estimated from samples, so identity_residual stays None here; the
    oracle module produces it for analytic densities.  objective_proxy is
    correlation minus summed marginal negentropy, the quantity the
    linear-search objective minimizes.
    """

    correlation: float
    marginal_negentropies: tuple[NegentropyEstimate, ...]
    objective_proxy: float
    mi: MIEstimate | None = None
    identity_residual: float | None = None
    seed: int = 0

    def to_json(self) -> dict:
        out = {
            "correlation": self.correlation,
            "marginal_negentropies": [g.value for g in self.marginal_negentropies],
            "objective_proxy": self.objective_proxy,
        }
        if self.mi is not None:
            out["mi"] = self.mi.value
            out["mi_raw"] = self.mi.raw
            out["mi_method"] = self.mi.method
            out["near_deterministic_dependence"] = \
                self.mi.near_deterministic_dependence
        if self.identity_residual is not None:
            out["identity_residual"] = self.identity_residual
        return out


def diagnose(data: Dataset, seed: int = 0, center: bool = False) -> DecompositionReport:
    """Estimate the decomposition terms for a dataset.

    The seed only feeds deterministic tie-breaking inside the mutual
    information estimator; every term is otherwise a pure function of the
    data.
    """
    corr = correlation_C(sample_covariance(data, center=center))
    negs = tuple(negentropy_scalar(data.column(i)) for i in range(data.N))
    proxy = corr - sum(g.value for g in negs)
    mi = None
    if data.N <= 3:
        try:
            mi = mutual_information(data, seed=seed)
        except DimensionTooHigh:  # pragma: no cover - guarded by N check
            mi = None
    return DecompositionReport(corr, negs, proxy, mi, None, seed)
