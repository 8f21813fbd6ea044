"""Closed-form geometry of the zero-mean Gaussian family.

Covariances are the coordinates here: divergence between zero-mean
Gaussians, the scalar correlation measure (divergence from a covariance to
its diagonal), and whitening, all in exact linear-algebra form with no
sampling involved.
"""
import math
from dataclasses import dataclass

import numpy as np

from .data import EPS_DET, Dataset
from .errors import DimensionMismatch, SingularCovariance


@dataclass(frozen=True)
class Covariance:
    """Symmetric positive-definite N x N matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("covariance must be square")
        scale = np.abs(m).max()
        if scale == 0.0 or not np.isfinite(scale):
            raise SingularCovariance("covariance is zero or non-finite")
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise SingularCovariance("covariance is not symmetric")
        m = 0.5 * (m + m.T)
        eig = np.linalg.eigvalsh(m)
        if eig[0] <= EPS_DET * eig[-1]:
            raise SingularCovariance("covariance is not positive definite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class GaussianApprox:
    """Zero-mean Gaussian with the given covariance (the projection of a
    distribution onto the Gaussian family keeps only its covariance)."""

    cov: Covariance

    def logpdf(self, points: np.ndarray) -> np.ndarray:
        """Log-density at an M x N array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = self.cov.N
        if pts.shape[1] != n:
            raise DimensionMismatch("points do not match covariance dimension")
        sign, logdet = np.linalg.slogdet(self.cov.matrix)
        quad = np.einsum("ij,ij->i", pts,
                         np.linalg.solve(self.cov.matrix, pts.T).T)
        return -0.5 * (n * math.log(2.0 * math.pi) + logdet + quad)


@dataclass(frozen=True)
class WhiteningTransform:
    """Matrix W with W source_cov W^T = identity."""

    matrix: np.ndarray
    source_cov: Covariance

    def __post_init__(self):
        W = np.array(self.matrix, dtype=float)
        W.flags.writeable = False
        object.__setattr__(self, "matrix", W)
        n = self.source_cov.N
        resid = W @ self.source_cov.matrix @ W.T - np.eye(n)
        if np.linalg.norm(resid) > 1e-10 * math.sqrt(n):
            raise SingularCovariance("whitening residual exceeds tolerance")


def sample_covariance(data: Dataset, center: bool = False) -> Covariance:
    """Second-moment matrix (1/T) sum_t x_t x_t^T.

    The zero-mean convention is the default: no mean subtraction.  Pass
    center=True for real data whose mean is not structurally zero.
    Requires T > N so the estimate is almost surely positive definite.
    """
    X = data.samples
    if data.T <= data.N:
        raise SingularCovariance("need more observations than channels")
    if center:
        X = X - X.mean(axis=0)
    return Covariance(X.T @ X / data.T)


def _logdet(m: np.ndarray) -> float:
    sign, val = np.linalg.slogdet(m)
    if sign <= 0:
        raise SingularCovariance("non-positive determinant")
    return float(val)


def gaussian_kld(p: Covariance, q: Covariance) -> float:
    """KLD( N(0,p) || N(0,q) ) = (tr(q^-1 p) - N + ln det q - ln det p)/2."""
    if p.N != q.N:
        raise DimensionMismatch("covariance dimensions differ")
    tr = float(np.trace(np.linalg.solve(q.matrix, p.matrix)))
    return 0.5 * (tr - p.N + _logdet(q.matrix) - _logdet(p.matrix))


def correlation_C(cov: Covariance) -> float:
    """Correlation measure: divergence from N(0,cov) to its diagonal.

    Equals ln(det diag(cov) / det cov)/2; zero exactly when cov is
    diagonal, and invariant under diagonal rescaling of the channels.
    """
    logdiag = float(np.sum(np.log(np.diag(cov.matrix))))
    return 0.5 * (logdiag - _logdet(cov.matrix))


def whitener(cov: Covariance) -> WhiteningTransform:
    """Symmetric-decomposition whitener W = Lambda^(-1/2) V^T.

    Eigenvalues are sorted descending and each eigenvector's sign is fixed
    so its largest-magnitude entry is positive, making the result a unique
    deterministic function of the covariance.
    """
    lam, V = np.linalg.eigh(cov.matrix)
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    V = V[:, order]
    if lam[-1] <= EPS_DET * lam[0]:
        raise SingularCovariance("covariance is numerically singular")
    for j in range(V.shape[1]):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0.0:
            V[:, j] = -V[:, j]
    W = (V / np.sqrt(lam)).T
    return WhiteningTransform(W, cov)


def verify_gaussian_pythagoras(data_cov: Covariance, target: Covariance) -> float:
    """Residual of the Gaussian Pythagoras identity in closed form.

    For a Gaussian P with covariance S, KLD(P || N(T)) must equal the
    non-Gaussianity of P (zero, computed generically as the divergence to
    its own Gaussian projection) plus gaussian_kld(S, T).  The left side is
    evaluated by the independent cross-entropy-minus-entropy route so the
    comparison is not vacuous.
    """
    if data_cov.N != target.N:
        raise DimensionMismatch("covariance dimensions differ")
    n = data_cov.N
    entropy = 0.5 * (n * math.log(2.0 * math.pi * math.e)
                     + _logdet(data_cov.matrix))
    cross = 0.5 * (n * math.log(2.0 * math.pi) + _logdet(target.matrix)
                   + float(np.trace(np.linalg.solve(target.matrix,
                                                    data_cov.matrix))))
    lhs = cross - entropy
    non_gaussianity = gaussian_kld(data_cov, data_cov)
    rhs = non_gaussianity + gaussian_kld(data_cov, target)
    return abs(lhs - rhs)
