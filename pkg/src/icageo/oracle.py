"""Reference computations for the divergence identities.

Two worlds live here.  Discrete bivariate distributions give the product
Pythagoras and mutual-information identities exactly, to round-off.
Analytic 2-D densities are handled by midpoint quadrature on grids that
respect each density's natural frame: bounded supports get cell edges
aligned to the support boundary, and densities defined through a linear
frame (rotations, shears, Gaussian Cholesky factors) are integrated in
pulled-back base coordinates so the change of variables is exact.

The four projection targets of the joint identity (product of marginals,
Gaussian fit, independent Gaussian fit) are all built from the same grid
measure, so the identity residuals reflect the identity itself rather than
discretization error; the discretization error shows up in the individual
terms and shrinks at first order or better as the step is refined.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatch, InsufficientCoverage,
                     InvalidDistribution, IoError, SingularTransform)
from .sources import SourceSpec

# density values below this are treated as exact zeros in integrands
DENSITY_FLOOR = 1e-300
# allowed deviation of quadrature mass from 1
MASS_TOL = 1e-4


# -- discrete world -------------------------------------------------------

@dataclass(frozen=True)
class DiscreteJoint:
    """Bivariate probability table: K1 x K2, entries >= 0, total = 1."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidDistribution("joint table must be a 2-D matrix")
        if not np.isfinite(p).all() or (p < 0).any():
            raise InvalidDistribution("joint entries must be finite and >= 0")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise InvalidDistribution("joint entries must sum to 1")
        if (p.sum(axis=1) == 0).any() or (p.sum(axis=0) == 0).any():
            raise InvalidDistribution("joint table has an all-zero row or column")
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.probabilities
        return p.sum(axis=1), p.sum(axis=0)


@dataclass(frozen=True)
class IdentityReport:
    """Both sides of one identity plus every constituent divergence."""

    lhs: float
    rhs: float
    residual: float
    terms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
                "terms": {k: float(v) for k, v in self.terms.items()}}


def _xlogx_sum(p: np.ndarray, q: np.ndarray) -> float:
    # sum p*ln(p/q) with the 0*ln0 = 0 convention; q must be > 0 where p > 0
    mask = p > 0
    if (q[mask] <= 0).any():
        return math.inf
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def discrete_mi(joint: DiscreteJoint) -> float:
    """Exact mutual information of a bivariate table, in nats."""
    p = joint.probabilities
    px, py = joint.marginals()
    return _xlogx_sum(p, np.outer(px, py))


def verify_product_pythagoras(joint: DiscreteJoint,
                              target_marginals) -> IdentityReport:
    """Divergence to a product target vs. mutual information plus marginal
    divergences; the two sides agree to round-off for any valid inputs."""
    p = joint.probabilities
    tx = np.asarray(target_marginals[0], dtype=float)
    ty = np.asarray(target_marginals[1], dtype=float)
    if tx.shape != (p.shape[0],) or ty.shape != (p.shape[1],):
        raise DimensionMismatch("target marginals do not match the joint shape")
    for t in (tx, ty):
        if (t <= 0).any() or abs(float(t.sum()) - 1.0) > 1e-12:
            raise InvalidDistribution(
                "target marginals must be strictly positive and sum to 1")
    px, py = joint.marginals()
    mi = discrete_mi(joint)
    kx = _xlogx_sum(px, tx)
    ky = _xlogx_sum(py, ty)
    lhs = _xlogx_sum(p, np.outer(tx, ty))
    rhs = mi + kx + ky
    return IdentityReport(lhs, rhs, abs(lhs - rhs), {
        "mutual_information": mi,
        "marginal_kld_1": kx,
        "marginal_kld_2": ky,
    })


def random_discrete_joint(k1: int, k2: int,
                          gen: np.random.Generator) -> DiscreteJoint:
    """Random strictly positive joint table, for property sweeps."""
    p = gen.random((k1, k2)) + 1e-3
    total = p.sum()
    p /= total
    # push residual round-off into the largest entry so the total is exact
    i, j = np.unravel_index(np.argmax(p), p.shape)
    p[i, j] += 1.0 - p.sum()
    return DiscreteJoint(p)


# -- analytic densities ---------------------------------------------------

@dataclass(frozen=True)
class AnalyticDensity2D:
    """Closed-form 2-D density with a linear frame.

    pdf evaluates the density in observation coordinates y.  frame is a
    2x2 matrix L mapping base coordinates s to y = L s such that the
    density's support is an axis-aligned box (possibly unbounded) in s;
    quadrature runs over s, where the geometry is simple.  base_support
    gives the exact support interval per base axis, or None if unbounded.
    """

    form: str
    pdf: object
    frame: np.ndarray
    base_support: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        L = np.array(self.frame, dtype=float)
        if L.shape != (2, 2) or not np.isfinite(L).all():
            raise InvalidDistribution("frame must be a finite 2x2 matrix")
        if abs(np.linalg.det(L)) < 1e-12:
            raise SingularTransform("density frame is singular")
        L.flags.writeable = False
        object.__setattr__(self, "frame", L)

    def y_axis_support(self, axis: int):
        """Support interval along an observation axis, when it is exact.

        Only a diagonal frame maps base-axis boxes to observation-axis
        boxes; any other frame returns None and the axis is treated as
        unbounded by observation-aligned grids.
        """
        L = self.frame
        if abs(L[0, 1]) > 0 or abs(L[1, 0]) > 0:
            return None
        sup = self.base_support[axis]
        if sup is None:
            return None
        a = L[axis, axis]
        lo, hi = sup[0] * a, sup[1] * a
        return (min(lo, hi), max(lo, hi))


def _as_density(form, pdf, frame, base_support, params) -> AnalyticDensity2D:
    return AnalyticDensity2D(form, pdf, np.asarray(frame, dtype=float),
                             tuple(base_support), params)


def gaussian_density(cov) -> AnalyticDensity2D:
    """Zero-mean bivariate Gaussian; base coordinates are standard normal."""
    cov = np.array(cov, dtype=float)
    if cov.shape != (2, 2):
        raise DimensionMismatch("need a 2x2 covariance")
    chol = np.linalg.cholesky(0.5 * (cov + cov.T))
    prec = np.linalg.inv(cov)
    norm = 1.0 / (2.0 * math.pi * math.sqrt(np.linalg.det(cov)))

    def pdf(points):
        pts = np.asarray(points, dtype=float)
        quad = np.einsum("...i,ij,...j->...", pts, prec, pts)
        return norm * np.exp(-0.5 * quad)

    return _as_density("gaussian", pdf, chol, (None, None),
                       {"cov": cov.tolist()})


def gaussian_mixture_density(weights, means, covs) -> AnalyticDensity2D:
    """Mixture of bivariate Gaussians with overall mean zero."""
    w = np.asarray(weights, dtype=float)
    mu = np.asarray(means, dtype=float).reshape(len(w), 2)
    sig = [np.array(c, dtype=float) for c in covs]
    if len(sig) != len(w) or (w <= 0).any():
        raise InvalidDistribution("mixture needs one positive weight per part")
    if abs(w.sum() - 1.0) > 1e-12:
        raise InvalidDistribution("mixture weights must sum to 1")
    if np.abs(w @ mu).max() > 1e-12:
        raise InvalidDistribution("mixture must have overall mean zero")
    precs = [np.linalg.inv(c) for c in sig]
    norms = [1.0 / (2.0 * math.pi * math.sqrt(np.linalg.det(c))) for c in sig]

    def pdf(points):
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for wi, mi, pr, nm in zip(w, mu, precs, norms):
            d = pts - mi
            quad = np.einsum("...i,ij,...j->...", d, pr, d)
            out += wi * nm * np.exp(-0.5 * quad)
        return out

    return _as_density("gaussian_mixture", pdf, np.eye(2), (None, None),
                       {"weights": w.tolist(), "means": mu.tolist(),
                        "covs": [c.tolist() for c in sig]})


def product_density(s1: SourceSpec, s2: SourceSpec) -> AnalyticDensity2D:
    """Independent pair of unit-variance scalar sources."""

    def pdf(points):
        pts = np.asarray(points, dtype=float)
        return s1.pdf(pts[..., 0]) * s2.pdf(pts[..., 1])

    return _as_density("product_of_1d", pdf, np.eye(2),
                       (s1.support(), s2.support()),
                       {"sources": [s1.label(), s2.label()]})


def rotated_product_density(s1: SourceSpec, s2: SourceSpec,
                            angle_rad: float) -> AnalyticDensity2D:
    """Independent source pair rotated by the given angle."""
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    R = np.array([[c, -s], [s, c]])

    def pdf(points):
        pts = np.asarray(points, dtype=float)
        b0 = c * pts[..., 0] + s * pts[..., 1]
        b1 = -s * pts[..., 0] + c * pts[..., 1]
        return s1.pdf(b0) * s2.pdf(b1)

    return _as_density("rotated_product", pdf, R,
                       (s1.support(), s2.support()),
                       {"sources": [s1.label(), s2.label()],
                        "angle_rad": angle_rad})


def linear_image(p: AnalyticDensity2D, A) -> AnalyticDensity2D:
    """Pushforward of p through an invertible linear map y -> A y."""
    A = np.array(A, dtype=float)
    if A.shape != (2, 2) or not np.isfinite(A).all():
        raise SingularTransform("transform must be a finite 2x2 matrix")
    det = np.linalg.det(A)
    if abs(det) < 1e-12:
        raise SingularTransform("transform is singular")
    Ainv = np.linalg.inv(A)
    base = p.pdf

    def pdf(points):
        pts = np.asarray(points, dtype=float)
        return base(pts @ Ainv.T) / abs(det)

    return _as_density(p.form, pdf, A @ p.frame, p.base_support,
                       dict(p.params, transformed=True))


# -- quadrature grids -----------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Integration box (for unbounded directions) and midpoint step."""

    xlo: float = -8.0
    xhi: float = 8.0
    ylo: float = -8.0
    yhi: float = 8.0
    step: float = 0.01

    def __post_init__(self):
        if not (self.step > 0 and self.xhi > self.xlo and self.yhi > self.ylo):
            raise InvalidDistribution("grid box must be nonempty with step > 0")

    def axis_range(self, axis: int) -> tuple[float, float]:
        return (self.xlo, self.xhi) if axis == 0 else (self.ylo, self.yhi)

    def halved(self) -> "GridSpec":
        return GridSpec(self.xlo, self.xhi, self.ylo, self.yhi, 0.5 * self.step)


def _axis_cells(support, box: tuple[float, float], step: float,
                extend: tuple[float, float] | None = None):
    """Midpoint cell centers and width for one axis.

    Bounded axes adjust the width so support edges land exactly on cell
    boundaries (padded by one cell of zero density each side); unbounded
    axes tile the box, extended if a wider range must be covered.
    """
    if support is not None:
        lo_s, hi_s = support
        n = max(1, math.ceil((hi_s - lo_s) / step - 1e-9))
        h = (hi_s - lo_s) / n
        lo_edge, hi_edge = lo_s - h, hi_s + h
        if extend is not None:
            if extend[0] < lo_edge:
                lo_edge -= h * math.ceil((lo_edge - extend[0]) / h)
            if extend[1] > hi_edge:
                hi_edge += h * math.ceil((extend[1] - hi_edge) / h)
    else:
        lo_edge, hi_edge = box
        if extend is not None:
            lo_edge = min(lo_edge, extend[0])
            hi_edge = max(hi_edge, extend[1])
        h = step
    count = max(1, math.ceil((hi_edge - lo_edge) / h - 1e-9))
    centers = lo_edge + h * (np.arange(count) + 0.5)
    return centers, h


def _mass_ok(mass: float) -> bool:
    return (1.0 - MASS_TOL) <= mass <= (1.0 + MASS_TOL)


def _base_grid(p: AnalyticDensity2D, grid: GridSpec,
               extend: tuple | None = None):
    """Cell centers (in base coordinates), widths, and mapped y points."""
    sx, hx = _axis_cells(p.base_support[0], grid.axis_range(0), grid.step,
                         None if extend is None else extend[0])
    sy, hy = _axis_cells(p.base_support[1], grid.axis_range(1), grid.step,
                         None if extend is None else extend[1])
    S = np.stack(np.meshgrid(sx, sy, indexing="ij"), axis=-1)
    Y = S @ p.frame.T
    return sx, sy, hx, hy, Y


def quad_kld_2d(p: AnalyticDensity2D, q: AnalyticDensity2D,
                grid: GridSpec | None = None) -> float:
    """Midpoint-rule KLD(p || q) over a grid adapted to p's frame.

    The grid is laid out in p's base coordinates and extended so its image
    also covers q's mass region; the quadrature then checks that at least
    1 - 1e-4 of both masses is captured and raises InsufficientCoverage
    otherwise.
    """
    grid = GridSpec() if grid is None else grid
    # y-space box that q's mass lives in: exact support image if bounded,
    # else the grid box
    corners = []
    for cx in q.base_support[0] or grid.axis_range(0):
        for cy in q.base_support[1] or grid.axis_range(1):
            corners.append(q.frame @ np.array([cx, cy]))
    corners = np.array(corners)
    pulled = np.linalg.solve(p.frame, corners.T).T
    extend = ((float(pulled[:, 0].min()), float(pulled[:, 0].max())),
              (float(pulled[:, 1].min()), float(pulled[:, 1].max())))
    sx, sy, hx, hy, Y = _base_grid(p, grid, extend)
    cell = hx * hy * abs(np.linalg.det(p.frame))
    P = p.pdf(Y)
    Q = q.pdf(Y)
    mass_p = float(P.sum() * cell)
    mass_q = float(Q.sum() * cell)
    if not (_mass_ok(mass_p) and _mass_ok(mass_q)):
        raise InsufficientCoverage(
            f"grid captures mass p={mass_p:.6f}, q={mass_q:.6f}; "
            "enlarge the box")
    mask = P > DENSITY_FLOOR
    vals = P[mask] * np.log(P[mask] / np.maximum(Q[mask], DENSITY_FLOOR))
    return float(vals.sum() * cell)


# -- the joint-identity report -------------------------------------------

def _log_gauss_1d(x: np.ndarray, var: float) -> np.ndarray:
    return -0.5 * (x * x / var + math.log(2.0 * math.pi * var))


def _log_gauss_2d(xx, yy, m2: np.ndarray) -> np.ndarray:
    det = m2[0, 0] * m2[1, 1] - m2[0, 1] ** 2
    if det <= 0:
        raise InvalidDistribution("grid covariance is not positive definite")
    a = m2[1, 1] / det
    b = m2[0, 0] / det
    c = -m2[0, 1] / det
    quad = a * xx * xx + 2.0 * c * xx * yy + b * yy * yy
    return -0.5 * quad - math.log(2.0 * math.pi) - 0.5 * math.log(det)


def verify_four_point_identity(p: AnalyticDensity2D,
                               grid: GridSpec | None = None) -> IdentityReport:
    """Check the joint divergence identity on one density.

    All projection targets come from the same observation-aligned grid
    measure: marginals from row/column sums, Gaussian fits from the grid's
    second moments.  lhs = mutual information plus marginal
    non-Gaussianities; rhs = correlation plus joint non-Gaussianity; terms
    also carry the shared hypotenuse (divergence to the independent
    Gaussian fit) and the residual of each of its two decompositions.
    """
    grid = GridSpec() if grid is None else grid
    xs, hx = _axis_cells(p.y_axis_support(0), grid.axis_range(0), grid.step)
    ys, hy = _axis_cells(p.y_axis_support(1), grid.axis_range(1), grid.step)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    P = p.pdf(np.stack([xx, yy], axis=-1))
    w = hx * hy
    mass = float(P.sum() * w)
    if not _mass_ok(mass):
        raise InsufficientCoverage(f"grid captures mass {mass:.6f}; "
                                   "enlarge the box")
    pi = np.where(P > DENSITY_FLOOR, P * w, 0.0)
    pi /= pi.sum()
    px = pi.sum(axis=1)
    py = pi.sum(axis=0)
    # uncentered second moments of the grid measure (zero-mean convention)
    m2 = np.empty((2, 2))
    m2[0, 0] = float(np.sum(px * xs * xs))
    m2[1, 1] = float(np.sum(py * ys * ys))
    m2[0, 1] = m2[1, 0] = float(np.sum(pi * xx * yy))

    log_phi1 = _log_gauss_1d(xs, m2[0, 0]) + math.log(hx)
    log_phi2 = _log_gauss_1d(ys, m2[1, 1]) + math.log(hy)
    log_phi_joint = _log_gauss_2d(xx, yy, m2) + math.log(w)
    log_phi_indep = log_phi1[:, None] + log_phi2[None, :]

    mask = pi > 0
    log_pi = np.log(pi[mask])
    mx = px > 0
    my = py > 0

    log_pxpy = np.log((px[:, None] * py[None, :])[mask])
    mutual_info = float(np.sum(pi[mask] * (log_pi - log_pxpy)))
    g1 = float(np.sum(px[mx] * (np.log(px[mx]) - log_phi1[mx])))
    g2 = float(np.sum(py[my] * (np.log(py[my]) - log_phi2[my])))
    g_joint = float(np.sum(pi[mask] * (log_pi - log_phi_joint[mask])))
    hyp = float(np.sum(pi[mask] * (log_pi - log_phi_indep[mask])))
    corr = 0.5 * (math.log(m2[0, 0] * m2[1, 1])
                  - math.log(m2[0, 0] * m2[1, 1] - m2[0, 1] ** 2))

    lhs = mutual_info + g1 + g2
    rhs = corr + g_joint
    return IdentityReport(lhs, rhs, abs(lhs - rhs), {
        "mutual_information": mutual_info,
        "marginal_negentropy_1": g1,
        "marginal_negentropy_2": g2,
        "sum_marginal_negentropies": g1 + g2,
        "correlation": corr,
        "joint_negentropy": g_joint,
        "hypotenuse_kld": hyp,
        "residual_product_route": abs(hyp - lhs),
        "residual_gaussian_route": abs(hyp - rhs),
        "mass": mass,
    })


def _negentropy_quad(p: AnalyticDensity2D, grid: GridSpec) -> float:
    """Joint non-Gaussianity by pullback quadrature in base coordinates."""
    sx, sy, hx, hy, Y = _base_grid(p, grid)
    cell = hx * hy * abs(np.linalg.det(p.frame))
    P = p.pdf(Y)
    mass = float(P.sum() * cell)
    if not _mass_ok(mass):
        raise InsufficientCoverage(f"grid captures mass {mass:.6f}")
    pi = np.where(P > DENSITY_FLOOR, P * cell, 0.0)
    pi /= pi.sum()
    y1 = Y[..., 0]
    y2 = Y[..., 1]
    m2 = np.empty((2, 2))
    m2[0, 0] = float(np.sum(pi * y1 * y1))
    m2[1, 1] = float(np.sum(pi * y2 * y2))
    m2[0, 1] = m2[1, 0] = float(np.sum(pi * y1 * y2))
    log_phi = _log_gauss_2d(y1, y2, m2) + math.log(cell)
    mask = pi > 0
    return float(np.sum(pi[mask] * (np.log(pi[mask]) - log_phi[mask])))


def gaussianity_invariance_check(p: AnalyticDensity2D, transform,
                                 grid: GridSpec | None = None) -> float:
    """|G(p) - G(A p)| by quadrature; small for any invertible A because
    non-Gaussianity is a linear invariant."""
    grid = GridSpec() if grid is None else grid
    g_before = _negentropy_quad(p, grid)
    g_after = _negentropy_quad(linear_image(p, transform), grid)
    return abs(g_before - g_after)


# -- built-in verification suite ------------------------------------------

def _check(name, lhs, rhs, threshold, terms=None):
    residual = abs(lhs - rhs)
    return {"name": name, "lhs": float(lhs), "rhs": float(rhs),
            "residual": float(residual), "threshold": float(threshold),
            "passed": bool(residual < threshold),
            "terms": {k: float(v) for k, v in (terms or {}).items()}}


def _report_check(name, report: IdentityReport, threshold):
    entry = _check(name, report.lhs, report.rhs, threshold, report.terms)
    # the two route residuals must independently clear the threshold
    extra = max(report.terms.get("residual_product_route", 0.0),
                report.terms.get("residual_gaussian_route", 0.0))
    entry["passed"] = bool(entry["passed"] and extra < threshold)
    return entry


def builtin_suite(step: float = 0.01) -> list[dict]:
    """The default `verify` run: every identity at its documented tolerance."""
    from . import gaussian as gg  # deferred to avoid import cycles

    checks = []
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(20240901)))

    # exact discrete identities
    joint = DiscreteJoint([[0.4, 0.1], [0.1, 0.4]])
    exact_mi = 0.8 * math.log(1.6) + 0.2 * math.log(0.4)
    checks.append(_check("discrete_mi_symmetric_table",
                         discrete_mi(joint), exact_mi, 1e-12))
    checks.append(_check("discrete_mi_deterministic_coupling",
                         discrete_mi(DiscreteJoint([[0.5, 0.0], [0.0, 0.5]])),
                         math.log(2.0), 1e-12))
    checks.append(_report_check(
        "product_pythagoras_own_marginals",
        verify_product_pythagoras(joint, joint.marginals()), 1e-12))
    rnd = random_discrete_joint(4, 3, gen)
    t1 = np.full(4, 0.25)
    t2 = np.array([0.5, 0.3, 0.2])
    checks.append(_report_check(
        "product_pythagoras_random_targets",
        verify_product_pythagoras(rnd, (t1, t2)), 1e-12))

    # closed-form Gaussian geometry
    p_cov = gg.Covariance([[1.0, 0.3], [0.3, 1.0]])
    t_cov = gg.Covariance([[2.0, 0.0], [0.0, 2.0]])
    checks.append(_check("gaussian_pythagoras_closed_form",
                         gg.verify_gaussian_pythagoras(p_cov, t_cov), 0.0,
                         1e-10))
    d = np.diag([1.7, 0.4])
    c0 = gg.Covariance([[1.0, 0.5], [0.5, 1.0]])
    c1 = gg.Covariance(d @ c0.matrix @ d)
    checks.append(_check("correlation_diagonal_scaling_exact",
                         gg.correlation_C(c0), gg.correlation_C(c1), 1e-10))

    # quadrature vs closed forms
    grid = GridSpec(step=step)
    rho = gaussian_density([[1.0, 0.5], [0.5, 1.0]])
    iso = gaussian_density([[1.0, 0.0], [0.0, 1.0]])
    checks.append(_check("quad_kld_gaussian_rho_half",
                         quad_kld_2d(rho, iso, grid),
                         gg.gaussian_kld(gg.Covariance(rho.params["cov"]),
                                         gg.Covariance(iso.params["cov"])),
                         1e-4))
    checks.append(_check("quad_kld_self_zero",
                         quad_kld_2d(iso, iso, grid), 0.0, 1e-6))
    stretched = gaussian_density([[2.0, 0.0], [0.0, 1.0]])
    checks.append(_check("quad_kld_axis_stretch",
                         quad_kld_2d(stretched, iso, grid),
                         0.5 * (2.0 - 1.0 + math.log(0.5)) / 1.0, 1e-4))

    uniform = SourceSpec("uniform")
    laplace = SourceSpec("laplace")
    rot_unif = rotated_product_density(uniform, uniform, math.radians(45.0))
    g_pred = 2.0 * uniform.negentropy_nats()
    checks.append(_check("rotated_uniform_vs_gaussian_negentropy",
                         quad_kld_2d(rot_unif, iso, grid), g_pred, 1e-3))

    # joint identity on the three reference densities
    for name, dens in (
            ("four_point_gaussian_rho_half", rho),
            ("four_point_product_uniform_laplace",
             product_density(uniform, laplace)),
            ("four_point_rotated_laplace_30deg",
             rotated_product_density(laplace, laplace, math.radians(30.0)))):
        checks.append(_report_check(name, verify_four_point_identity(dens, grid),
                                    1e-3))

    # invariance under linear maps
    unif_prod = product_density(uniform, uniform)
    lap_prod = product_density(laplace, laplace)
    checks.append(_check("g_invariance_shear_on_uniform",
                         gaussianity_invariance_check(
                             unif_prod, [[2.0, 1.0], [0.0, 1.0]], grid),
                         0.0, 1e-3))
    th = math.radians(37.0)
    rot37 = [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]]
    checks.append(_check("g_invariance_rotation_on_laplace",
                         gaussianity_invariance_check(lap_prod, rot37, grid),
                         0.0, 1e-3))
    A = np.array([[1.1, 0.4], [-0.3, 0.9]])
    lhs = quad_kld_2d(rho, iso, grid)
    rhs = quad_kld_2d(linear_image(rho, A), linear_image(iso, A), grid)
    checks.append(_check("kld_invariance_linear_map", lhs, rhs, 1e-3))
    return checks


# -- user-supplied verify specs -------------------------------------------

def load_verify_spec(path) -> list[dict]:
    """Parse a JSON spec file into verification checks.

    Accepted shapes: {"joint": [[...]], "targets": [[...], [...]]} for a
    discrete table, or {"density": {"form": ..., ...}, "step": 0.01} for an
    analytic density fed to the joint-identity check.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidDistribution(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(spec, dict):
        raise InvalidDistribution(f"{path}: top level must be an object")
    checks = []
    if "joint" in spec:
        joint = DiscreteJoint(spec["joint"])
        if "targets" in spec:
            targets = spec["targets"]
            if (not isinstance(targets, list)) or len(targets) != 2:
                raise InvalidDistribution(
                    f"{path}: field 'targets' must hold two marginal vectors")
            tm = (np.asarray(targets[0], float), np.asarray(targets[1], float))
        else:
            tm = joint.marginals()
        checks.append(_report_check("user_product_pythagoras",
                                    verify_product_pythagoras(joint, tm), 1e-12))
    if "density" in spec:
        dens = _density_from_json(spec["density"], path)
        step = float(spec.get("step", 0.01))
        checks.append(_report_check("user_four_point_identity",
                                    verify_four_point_identity(
                                        dens, GridSpec(step=step)), 1e-3))
    if not checks:
        raise InvalidDistribution(
            f"{path}: spec needs a 'joint' or 'density' field")
    return checks


def _density_from_json(obj, path) -> AnalyticDensity2D:
    if not isinstance(obj, dict) or "form" not in obj:
        raise InvalidDistribution(f"{path}: density needs a 'form' field")
    form = obj["form"]
    try:
        if form == "gaussian":
            return gaussian_density(obj["cov"])
        if form == "gaussian_mixture":
            return gaussian_mixture_density(obj["weights"], obj["means"],
                                            obj["covs"])
        if form == "product_of_1d":
            from .sources import parse_source
            a, b = obj["sources"]
            return product_density(parse_source(a), parse_source(b))
        if form == "rotated_product":
            from .sources import parse_source
            a, b = obj["sources"]
            return rotated_product_density(parse_source(a), parse_source(b),
                                           math.radians(float(obj["angle_deg"])))
    except KeyError as exc:
        raise InvalidDistribution(
            f"{path}: density form {form!r} is missing field {exc}") from exc
    raise InvalidDistribution(f"{path}: unknown density form {form!r}")
