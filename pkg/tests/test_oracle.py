"""Tests for the exact reference distributions and identity checks."""
import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from icageo import (DimensionMismatch, DiscreteJoint, GridSpec, IdentityReport,
                    InsufficientCoverage, InvalidDistribution, IoError,
                    SingularTransform, SourceSpec, builtin_suite, discrete_mi,
                    gaussian_density, gaussian_mixture_density,
                    gaussianity_invariance_check, linear_image,
                    load_verify_spec, product_density, quad_kld_2d,
                    random_discrete_joint, rotated_product_density,
                    verify_four_point_identity, verify_product_pythagoras)

# hand-computed sum p ln(p/(px py)) for the 2x2 table below
TABLE = [[0.30, 0.10], [0.05, 0.55]]
TABLE_MI = 0.2504109913534126
KLD_RHO_HALF = 0.14384103622589045
UNIFORM_NEGENT = 0.1764852083106725
LAPLACE_NEGENT = 0.07236494292469997

# continuum mutual information of the 30-degree rotated Laplace pair,
# from 1-D convolution quadrature of the marginal density
ROT_LAP_MI_CONTINUUM = 0.080778593666615

COARSE = GridSpec(step=0.02)


# -- discrete tables ----------------------------------------------------------

def test_discrete_joint_validation():
    DiscreteJoint(TABLE)
    with pytest.raises(InvalidDistribution):
        DiscreteJoint([[0.5, -0.1], [0.3, 0.3]])
    with pytest.raises(InvalidDistribution):
        DiscreteJoint([[0.5, 0.4]])  # sums to 0.9
    with pytest.raises(InvalidDistribution):
        DiscreteJoint([[0.5, 0.5], [0.0, 0.0]])  # zero row
    with pytest.raises(InvalidDistribution):
        DiscreteJoint([0.5, 0.5])  # not 2-D


def test_discrete_mi_known_values():
    assert_allclose(discrete_mi(DiscreteJoint(TABLE)), TABLE_MI,
                    rtol=0, atol=1e-15)
    # perfectly coupled two-state table carries exactly ln 2
    coupled = DiscreteJoint([[0.5, 0.0], [0.0, 0.5]])
    assert_allclose(discrete_mi(coupled), math.log(2.0), rtol=0, atol=1e-15)
    # product table carries zero up to round-off
    px = np.array([0.3, 0.7])
    py = np.array([0.2, 0.5, 0.3])
    assert abs(discrete_mi(DiscreteJoint(np.outer(px, py)))) < 1e-15


def test_product_pythagoras_with_own_marginals():
    joint = DiscreteJoint(TABLE)
    rep = verify_product_pythagoras(joint, joint.marginals())
    assert isinstance(rep, IdentityReport)
    assert rep.residual < 1e-15
    # with the joint's own marginals the divergence is exactly the MI
    assert_allclose(rep.lhs, TABLE_MI, rtol=0, atol=1e-15)
    assert rep.terms["marginal_kld_1"] == 0.0


def test_product_pythagoras_random_sweep():
    gen = np.random.default_rng(100)
    for _ in range(50):
        k1 = int(gen.integers(2, 6))
        k2 = int(gen.integers(2, 6))
        joint = random_discrete_joint(k1, k2, gen)
        tx = gen.random(k1) + 0.05
        ty = gen.random(k2) + 0.05
        tx, ty = tx / tx.sum(), ty / ty.sum()
        tx[0] += 1.0 - tx.sum()
        ty[0] += 1.0 - ty.sum()
        rep = verify_product_pythagoras(joint, (tx, ty))
        assert rep.residual < 1e-12
        assert rep.terms["mutual_information"] >= 0.0


def test_product_pythagoras_rejects_bad_targets():
    joint = DiscreteJoint(TABLE)
    with pytest.raises(DimensionMismatch):
        verify_product_pythagoras(joint, (np.ones(3) / 3, np.ones(2) / 2))
    with pytest.raises(InvalidDistribution):
        verify_product_pythagoras(joint, (np.array([1.0, 0.0]),
                                          np.array([0.5, 0.5])))


def test_random_discrete_joint_is_exact_and_reproducible():
    a = random_discrete_joint(5, 4, np.random.default_rng(7))
    b = random_discrete_joint(5, 4, np.random.default_rng(7))
    assert a.probabilities.sum() == 1.0
    assert (a.probabilities > 0).all()
    assert_allclose(a.probabilities, b.probabilities, rtol=0, atol=0)


# -- analytic densities ----------------------------------------------------------

def test_gaussian_density_normalized_on_grid():
    p = gaussian_density([[1.0, 0.5], [0.5, 1.0]])
    xs = np.linspace(-8, 8, 801)
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    mass = p.pdf(np.stack([xx, yy], axis=-1)).sum() * (xs[1] - xs[0]) ** 2
    assert_allclose(mass, 1.0, atol=1e-6)


def test_product_density_support_is_exact():
    p = product_density(SourceSpec("uniform"), SourceSpec("laplace"))
    lo, hi = p.y_axis_support(0)
    assert_allclose([lo, hi], [-math.sqrt(3), math.sqrt(3)])
    assert p.y_axis_support(1) is None  # Laplace is unbounded
    # rotation destroys axis alignment, so no exact support either way
    r = rotated_product_density(SourceSpec("uniform"), SourceSpec("uniform"),
                                math.radians(30.0))
    assert r.y_axis_support(0) is None


def test_gaussian_mixture_validation():
    eye = [[1.0, 0.0], [0.0, 1.0]]
    gaussian_mixture_density([0.5, 0.5], [[1.0, 0.0], [-1.0, 0.0]], [eye, eye])
    with pytest.raises(InvalidDistribution):
        gaussian_mixture_density([0.6, 0.5], [[1.0, 0.0], [-1.0, 0.0]],
                                 [eye, eye])  # weights sum to 1.1
    with pytest.raises(InvalidDistribution):
        gaussian_mixture_density([0.5, 0.5], [[1.0, 0.0], [-0.5, 0.0]],
                                 [eye, eye])  # overall mean not zero


def test_linear_image_matches_transformed_gaussian():
    S = np.array([[1.0, 0.3], [0.3, 0.8]])
    A = np.array([[1.2, -0.4], [0.5, 0.9]])
    img = linear_image(gaussian_density(S), A)
    direct = gaussian_density(A @ S @ A.T)
    pts = np.random.default_rng(0).standard_normal((200, 2))
    assert_allclose(img.pdf(pts), direct.pdf(pts), rtol=1e-12)
    with pytest.raises(SingularTransform):
        linear_image(gaussian_density(S), [[1.0, 1.0], [1.0, 1.0]])


# -- quadrature KLD ----------------------------------------------------------------

def test_quad_kld_gaussian_closed_form():
    rho = gaussian_density([[1.0, 0.5], [0.5, 1.0]])
    iso = gaussian_density([[1.0, 0.0], [0.0, 1.0]])
    assert_allclose(quad_kld_2d(rho, iso, COARSE), KLD_RHO_HALF, atol=1e-6)
    assert abs(quad_kld_2d(iso, iso, COARSE)) < 1e-9


def test_quad_kld_rotated_uniform_negentropy():
    # a rotated uniform square keeps identity covariance, so its KLD to the
    # standard Gaussian equals twice the uniform negentropy
    rot = rotated_product_density(SourceSpec("uniform"), SourceSpec("uniform"),
                                  math.radians(45.0))
    iso = gaussian_density([[1.0, 0.0], [0.0, 1.0]])
    assert_allclose(quad_kld_2d(rot, iso, COARSE), 2 * UNIFORM_NEGENT,
                    atol=1e-3)


def test_quad_kld_raises_when_box_too_small():
    iso = gaussian_density([[1.0, 0.0], [0.0, 1.0]])
    small = GridSpec(xlo=-2, xhi=2, ylo=-2, yhi=2, step=0.02)
    with pytest.raises(InsufficientCoverage):
        quad_kld_2d(iso, iso, small)  # +-2 box keeps only ~91% of the mass


def test_grid_spec_validation_and_halving():
    with pytest.raises(InvalidDistribution):
        GridSpec(step=0.0)
    with pytest.raises(InvalidDistribution):
        GridSpec(xlo=1.0, xhi=-1.0)
    assert GridSpec(step=0.02).halved().step == 0.01


# -- the four-point identity ----------------------------------------------------------

def test_four_point_identity_exact_on_references():
    cases = [
        gaussian_density([[1.0, 0.5], [0.5, 1.0]]),
        product_density(SourceSpec("uniform"), SourceSpec("laplace")),
        rotated_product_density(SourceSpec("laplace"), SourceSpec("laplace"),
                                math.radians(30.0)),
    ]
    for dens in cases:
        rep = verify_four_point_identity(dens, COARSE)
        assert rep.residual < 1e-12
        assert rep.terms["residual_product_route"] < 1e-12
        assert rep.terms["residual_gaussian_route"] < 1e-12
        assert abs(rep.terms["mass"] - 1.0) < 1e-4
        assert rep.terms["mutual_information"] >= -1e-14  # round-off only


def test_four_point_terms_match_closed_forms():
    rep = verify_four_point_identity(
        gaussian_density([[1.0, 0.5], [0.5, 1.0]]), COARSE)
    # Gaussian joint: negentropies vanish, MI equals the correlation term
    assert abs(rep.terms["mutual_information"] - KLD_RHO_HALF) < 1e-3
    assert abs(rep.terms["correlation"] - KLD_RHO_HALF) < 1e-3
    assert abs(rep.terms["joint_negentropy"]) < 1e-3
    rep = verify_four_point_identity(
        product_density(SourceSpec("uniform"), SourceSpec("laplace")), COARSE)
    # independent pair: MI and correlation vanish, negentropies are analytic
    assert abs(rep.terms["mutual_information"]) < 1e-3
    assert abs(rep.terms["correlation"]) < 1e-3
    assert abs(rep.terms["marginal_negentropy_1"] - UNIFORM_NEGENT) < 1e-3
    assert abs(rep.terms["marginal_negentropy_2"] - LAPLACE_NEGENT) < 1e-3


def test_four_point_identity_on_gaussian_mixture():
    eye = [[0.5, 0.1], [0.1, 0.4]]
    dens = gaussian_mixture_density([0.4, 0.6],
                                    [[1.2, 0.6], [-0.8, -0.4]],
                                    [eye, [[0.6, -0.1], [-0.1, 0.5]]])
    rep = verify_four_point_identity(dens, COARSE)
    assert rep.residual < 1e-12
    assert rep.terms["joint_negentropy"] > 0.01  # visibly non-Gaussian


def test_four_point_terms_converge_to_continuum():
    lap = SourceSpec("laplace")
    dens = rotated_product_density(lap, lap, math.radians(30.0))
    mi_by_step = {}
    for step in (0.02, 0.01, 0.005):
        rep = verify_four_point_identity(dens, GridSpec(step=step))
        assert rep.residual < 1e-12  # identity holds at every resolution
        mi_by_step[step] = rep.terms["mutual_information"]
    # independent continuum oracle pins the limit (box truncation allows 5e-4)
    assert abs(mi_by_step[0.005] - ROT_LAP_MI_CONTINUUM) < 5e-4
    # term error vs the finest run shrinks by at least 2x per halving
    e_coarse = abs(mi_by_step[0.02] - mi_by_step[0.005])
    e_mid = abs(mi_by_step[0.01] - mi_by_step[0.005])
    assert e_mid < 0.5 * e_coarse


def test_identity_report_json_shape():
    rep = verify_four_point_identity(
        gaussian_density([[1.0, 0.2], [0.2, 1.0]]), COARSE)
    doc = rep.to_json()
    assert set(doc) == {"lhs", "rhs", "residual", "terms"}
    assert isinstance(doc["terms"]["correlation"], float)
    json.dumps(doc)  # serializable as-is


# -- invariance properties -------------------------------------------------------------

def test_negentropy_invariance_under_linear_maps():
    unif = product_density(SourceSpec("uniform"), SourceSpec("uniform"))
    shear = [[2.0, 1.0], [0.0, 1.0]]
    assert gaussianity_invariance_check(unif, shear, COARSE) < 1e-3
    lap = product_density(SourceSpec("laplace"), SourceSpec("laplace"))
    th = math.radians(37.0)
    rot = [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]]
    assert gaussianity_invariance_check(lap, rot, COARSE) < 1e-3


def test_kld_invariance_under_linear_maps():
    rho = gaussian_density([[1.0, 0.5], [0.5, 1.0]])
    iso = gaussian_density([[1.0, 0.0], [0.0, 1.0]])
    A = np.array([[1.1, 0.4], [-0.3, 0.9]])
    before = quad_kld_2d(rho, iso, COARSE)
    after = quad_kld_2d(linear_image(rho, A), linear_image(iso, A), COARSE)
    assert abs(before - after) < 1e-3


# -- the builtin suite and user specs ----------------------------------------------------

def test_builtin_suite_all_green():
    checks = builtin_suite(step=0.02)
    assert len(checks) >= 12
    assert all(c["passed"] for c in checks)
    names = [c["name"] for c in checks]
    assert len(names) == len(set(names))
    for c in checks:
        assert {"name", "lhs", "rhs", "residual", "threshold",
                "passed", "terms"} <= set(c)


def test_load_verify_spec_joint_and_density(tmp_path):
    spec = tmp_path / "user.json"
    spec.write_text(json.dumps({
        "joint": TABLE,
        "targets": [[0.4, 0.6], [0.3, 0.7]],
        "density": {"form": "rotated_product",
                    "sources": ["laplace", "cosh-reciprocal"],
                    "angle_deg": 20.0},
        "step": 0.02,
    }))
    checks = load_verify_spec(spec)
    assert [c["name"] for c in checks] == ["user_product_pythagoras",
                                           "user_four_point_identity"]
    assert all(c["passed"] for c in checks)


def test_load_verify_spec_diagnostics(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(IoError):
        load_verify_spec(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"joint\": [[0.5,\n}")
    with pytest.raises(InvalidDistribution) as exc:
        load_verify_spec(bad)
    assert "line" in str(exc.value)
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    with pytest.raises(InvalidDistribution):
        load_verify_spec(empty)
    noform = tmp_path / "noform.json"
    noform.write_text(json.dumps({"density": {"cov": [[1, 0], [0, 1]]}}))
    with pytest.raises(InvalidDistribution):
        load_verify_spec(noform)
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"density": {"form": "cauchy"}}))
    with pytest.raises(InvalidDistribution):
        load_verify_spec(unknown)
