"""The two separation procedures.

relative_gradient_ica drives the maximum-likelihood stationarity
conditions E{psi_i(Y_i) Y_j} = 0 (i != j) with multiplicative updates
B <- (I - mu offdiag(F)) B, with fixed nonlinear scores or nonparametric
scores re-estimated from the current outputs.  orthogonal_ica whitens and
then rotates, maximizing the summed marginal non-Gaussianity pair by pair,
which enforces exact output decorrelation by construction.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import (Diverged, InvalidConfig, NonFinite, SingularCovariance,
                     TooFewSamples)
from .estimators import ScoreTable, _negentropy_raw, score_table
from .gaussian import Covariance, correlation_C, sample_covariance, whitener

SCORE_NAMES = ("tanh", "cube", "identity", "adaptive")

# entry magnitude beyond which the demixing iteration counts as diverged
DIVERGENCE_BOUND = 1e12
# objective increase (nats) tolerated as estimator noise before the step halves
OBJECTIVE_NOISE_MARGIN = 0.01
# cadence (iterations) for adaptive re-estimation and objective monitoring
OUTER_CADENCE = 10
# best single-rotation gain below this many nats means the data offered the
# rotation search nothing to work with (Gaussian-like input)
NO_IMPROVEMENT_FLOOR = 0.02
# hard cap on Jacobi sweeps
MAX_SWEEPS = 50
# golden-section angle resolution, radians
ANGLE_TOL = 1e-4


@dataclass(frozen=True)
class ScoreModel:
    """A score function psi = -q'/q for a working source density q."""

    name: str
    psi: object
    density_name: str

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return self.psi(s)


def make_score(name: str) -> ScoreModel:
    if name == "tanh":
        return ScoreModel("tanh", np.tanh, "1/cosh density (log-cosh model)")
    if name == "cube":
        return ScoreModel("cube", lambda s: s ** 3, "exp(-s^4/4) model")
    if name == "identity":
        return ScoreModel("identity", lambda s: s,
                          "gaussian (negative control)")
    if name == "adaptive":
        return ScoreModel("adaptive", None,
                          "nonparametric kernel score, refreshed from outputs")
    raise InvalidConfig(f"unknown score {name!r}; choose from "
                        f"{', '.join(SCORE_NAMES)}")


@dataclass(frozen=True)
class SolverConfig:
    """Step size, stopping rule, and score choice for the solvers."""

    step: float = 0.1
    max_iter: int = 2000
    tol: float = 1e-4
    score: object = "adaptive"
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.step <= 1.0):
            raise InvalidConfig("step must lie in (0, 1]")
        if not (self.tol > 0.0):
            raise InvalidConfig("tol must be positive")
        if self.max_iter < 1:
            raise InvalidConfig("max_iter must be at least 1")

    def score_models(self, n: int) -> list[ScoreModel]:
        sc = self.score
        if isinstance(sc, str):
            return [make_score(sc)] * n
        if isinstance(sc, ScoreModel):
            return [sc] * n
        models = [make_score(s) if isinstance(s, str) else s for s in sc]
        if len(models) != n:
            raise InvalidConfig(f"need one score per channel ({n})")
        return models


@dataclass(frozen=True)
class SeparationResult:
    """Demixing estimate with its convergence record.

    recovered is exactly data times demixing^T.  trajectory holds the
    per-iteration stationarity norm for the relative-gradient solver and
    the per-sweep best rotation gain for the orthogonal one.
    no_improvement marks runs where no rotation ever improved the
    non-Gaussianity objective beyond the noise floor (Gaussian-like data).
    """

    demixing: np.ndarray
    recovered: Dataset
    iterations: int
    converged: bool
    trajectory: np.ndarray
    no_improvement: bool = False
    score_tables: tuple | None = None


def stationarity_matrix(Y: Dataset, scores) -> np.ndarray:
    """F with F_ij = (1/T) sum_t psi_i(Y_ti) Y_tj.

    At a maximum-likelihood separation point the off-diagonal part
    vanishes; its Frobenius norm is the solver's convergence measure.
    """
    models = list(scores)
    if len(models) != Y.N:
        raise InvalidConfig(f"need one score per channel ({Y.N})")
    return _stationarity(Y.samples, [_psi_of(m) for m in models])


def _psi_of(model):
    if isinstance(model, ScoreModel):
        if model.psi is None:
            raise InvalidConfig("adaptive scores need fitted tables; "
                                "pass a ScoreTable or fixed score here")
        return model.psi
    return model


def _stationarity(Y: np.ndarray, psis) -> np.ndarray:
    T, n = Y.shape
    Psi = np.empty_like(Y)
    with np.errstate(over="raise", invalid="raise"):
        try:
            for i in range(n):
                Psi[:, i] = psis[i](Y[:, i])
        except FloatingPointError as exc:
            raise NonFinite(context="score evaluation") from exc
    F = Psi.T @ Y / T
    if not np.isfinite(F).all():
        raise NonFinite(context="stationarity matrix")
    return F


def _offdiag_norm(F: np.ndarray) -> float:
    off = F - np.diag(np.diag(F))
    return float(np.linalg.norm(off))


def _objective_value(Y: np.ndarray) -> float:
    # correlation-plus-negentropy proxy of the mutual information
    cov = Y.T @ Y / Y.shape[0]
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        return math.inf
    corr = 0.5 * (float(np.sum(np.log(np.diag(cov)))) - logdet)
    return corr - sum(_negentropy_raw(Y[:, i]) for i in range(Y.shape[1]))


def relative_gradient_ica(data: Dataset, config: SolverConfig) -> SeparationResult:
    """Multiplicative-update maximum-likelihood ICA.

    Starts from the whitener of the data and iterates
    B <- (I - mu offdiag F(Y)) B with Y recomputed each step.  Every
    OUTER_CADENCE iterations the objective proxy is monitored (halving mu
    if it rose beyond estimator noise) and adaptive score tables are
    refreshed.  Stops when the off-diagonal stationarity norm falls below
    tol.
    """
    X = data.samples
    n = data.N
    if data.T <= 10 * n:
        raise TooFewSamples("need T > 10 N for separation")
    models = config.score_models(n)
    adaptive = [m.name == "adaptive" for m in models]
    B = whitener(sample_covariance(data)).matrix.copy()
    mu = config.step
    psis = [None if a else _psi_of(m) for a, m in zip(adaptive, models)]
    tables: list[ScoreTable | None] = [None] * n
    trajectory = []
    converged = False
    prev_obj = None
    iterations = 0
    for it in range(config.max_iter):
        Y = X @ B.T
        if it % OUTER_CADENCE == 0:
            if any(adaptive):
                for i in range(n):
                    if adaptive[i]:
                        tables[i] = score_table(Y[:, i])
                        psis[i] = tables[i]
            obj = _objective_value(Y)
            if prev_obj is not None and obj > prev_obj + OBJECTIVE_NOISE_MARGIN:
                mu *= 0.5
            prev_obj = obj
        try:
            F = _stationarity(Y, psis)
        except NonFinite as exc:
            raise Diverged("score or stationarity overflow") from exc
        norm = _offdiag_norm(F)
        trajectory.append(norm)
        iterations = it + 1
        if norm < config.tol:
            converged = True
            break
        off = F - np.diag(np.diag(F))
        B = (np.eye(n) - mu * off) @ B
        if not np.isfinite(B).all() or np.abs(B).max() > DIVERGENCE_BOUND:
            raise Diverged("demixing matrix left the trust region")
    recovered = Dataset(X @ B.T)
    return SeparationResult(B, recovered, iterations, converged,
                            np.asarray(trajectory),
                            score_tables=tuple(tables) if any(adaptive) else None)


def _golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    # maximize f on [lo, hi]; returns (argmax, max)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def orthogonal_ica(data: Dataset, config: SolverConfig) -> SeparationResult:
    """Whiten, then rotate to maximize summed marginal non-Gaussianity.

    Jacobi sweeps over channel pairs in lexicographic order; each pair's
    Givens angle is located by a coarse scan over (-pi/4, pi/4] followed by
    golden-section refinement.  A rotation is kept when it improves the
    pair's negentropy sum by more than config.tol; sweeping stops when no
    pair improves by that much.  The returned demixing is the rotation
    times the whitener, so the recovered channels are exactly decorrelated.
    """
    X = data.samples
    n = data.N
    if data.T <= 10 * n:
        raise TooFewSamples("need T > 10 N for separation")
    W = whitener(sample_covariance(data)).matrix
    Y = X @ W.T
    U = np.eye(n)
    sweep_gains = []
    best_gain_ever = 0.0
    converged = False
    coarse = -0.25 * math.pi + 0.5 * math.pi * (np.arange(1, 17) / 16.0)
    for _ in range(MAX_SWEEPS):
        sweep_best = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                yi = Y[:, i].copy()
                yj = Y[:, j].copy()
                base = _negentropy_raw(yi) + _negentropy_raw(yj)

                def gain(theta):
                    c, s = math.cos(theta), math.sin(theta)
                    return (_negentropy_raw(c * yi - s * yj)
                            + _negentropy_raw(s * yi + c * yj) - base)

                values = [gain(t) for t in coarse]
                k = int(np.argmax(values))
                span = 0.5 * math.pi / 16.0
                theta, improvement = _golden_section(
                    gain, coarse[k] - span, coarse[k] + span, ANGLE_TOL)
                best_gain_ever = max(best_gain_ever, improvement,
                                     max(values))
                if improvement > config.tol:
                    sweep_best = max(sweep_best, improvement)
                    c, s = math.cos(theta), math.sin(theta)
                    Y[:, i] = c * yi - s * yj
                    Y[:, j] = s * yi + c * yj
                    rot = np.eye(n)
                    rot[i, i] = rot[j, j] = c
                    rot[i, j] = -s
                    rot[j, i] = s
                    U = rot @ U
        sweep_gains.append(sweep_best)
        if sweep_best <= config.tol:
            converged = True
            break
    B = U @ W
    recovered = Dataset(X @ B.T)
    return SeparationResult(
        B, recovered, len(sweep_gains), converged,
        np.asarray(sweep_gains, dtype=float),
        no_improvement=bool(best_gain_ever < NO_IMPROVEMENT_FLOOR))


def objective_trace(data: Dataset, B_sequence) -> list[float]:
    """Correlation-minus-negentropy proxy of the mutual information for
    each demixing matrix in a trajectory."""
    X = data.samples
    values = []
    for B in B_sequence:
        B = np.asarray(B, dtype=float)
        Y = X @ B.T
        cov = Covariance(Y.T @ Y / Y.shape[0])
        corr = correlation_C(cov)
        values.append(corr - sum(_negentropy_raw(Y[:, i])
                                 for i in range(Y.shape[1])))
    return values
