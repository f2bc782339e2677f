import math

import numpy as np
import pytest

from radialgauss.distributions import sample_gaussian, sample_uniform_sphere, sample_x_distribution
from radialgauss.errors import ConfigError, DegenerateInputError, NearOriginError
from radialgauss.losses import (
    COMPONENTS,
    LossConfig,
    covariance_loss,
    e2mc_metric,
    invariance_loss,
    kl_to_chi,
    m_spacing_entropy,
    radial_ce_loss,
    radial_gaussianization_loss,
    total_loss,
    variance_loss,
    w1_radial_loss,
)
from radialgauss.special import ChiModel, chi_sample

from conftest import central_fd, rel_err, separated_radii_points

GAUSS_H = 0.5 * math.log(2 * math.pi * math.e)


# ---------------------------------------------------------------- variance

def test_variance_inactive_hinge():
    Z = np.array([[2.0, -2.0], [-2.0, 2.0], [2.0, -2.0], [-2.0, 2.0]])
    v, g = variance_loss(Z)
    assert v == 0.0
    assert not g.any()


def test_variance_all_zero():
    v, _ = variance_loss(np.zeros((6, 3)))
    assert v == pytest.approx(0.99, abs=1e-15)


def test_variance_gradient(rng):
    Z = 0.5 * rng.standard_normal((30, 3))
    v, g = variance_loss(Z)
    assert v > 0
    fd = central_fd(lambda X: variance_loss(X)[0], Z)
    assert rel_err(g, fd) < 1e-5


def test_variance_needs_two_rows():
    with pytest.raises(DegenerateInputError):
        variance_loss(np.ones((1, 2)))


# -------------------------------------------------------------- invariance

def test_invariance_values(rng):
    Z = rng.standard_normal((5, 2))
    assert invariance_loss(Z, Z)[0] == 0.0
    v, g, gp = invariance_loss([[0.0, 0.0]], [[1.0, 1.0]])
    assert v == 2.0
    np.testing.assert_array_equal(g, [[-2.0, -2.0]])
    np.testing.assert_array_equal(gp, [[2.0, 2.0]])


def test_invariance_gradient(rng):
    Z, Zp = rng.standard_normal((2, 12, 3))
    _, g, gp = invariance_loss(Z, Zp)
    assert rel_err(g, central_fd(lambda X: invariance_loss(X, Zp)[0], Z)) < 1e-6
    assert rel_err(gp, central_fd(lambda X: invariance_loss(Z, X)[0], Zp)) < 1e-6
    with pytest.raises(DegenerateInputError):
        invariance_loss(Z, Zp[:, :2])


# -------------------------------------------------------------- covariance

def test_covariance_examples():
    Z = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    assert covariance_loss(Z)[0] == pytest.approx(0.0, abs=1e-15)
    assert covariance_loss(np.array([[1.0, 1.0], [-1.0, -1.0]]))[0] == pytest.approx(4.0)


def test_covariance_gradient(rng):
    Z = rng.standard_normal((25, 4)) @ rng.standard_normal((4, 4))
    _, g = covariance_loss(Z)
    assert rel_err(g, central_fd(lambda X: covariance_loss(X)[0], Z)) < 1e-5


# --------------------------------------------------------------- radial CE

def test_radial_ce_examples():
    v, g = radial_ce_loss(np.array([[1.0, 0.0]]))
    assert v == 0.5
    np.testing.assert_allclose(g, 0.0, atol=1e-15)
    v, g = radial_ce_loss(np.array([[2.0, 0.0]]))
    assert v == pytest.approx(2 - math.log(2), rel=1e-14)
    np.testing.assert_allclose(g, [[1.5, 0.0]], rtol=1e-14)


def test_radial_ce_gradient(rng):
    Z = rng.standard_normal((20, 3))
    cfg = LossConfig(beta1=2.5)
    _, g = radial_ce_loss(Z, cfg)
    assert rel_err(g, central_fd(lambda X: radial_ce_loss(X, cfg)[0], Z)) < 1e-6


def test_radial_ce_near_origin():
    with pytest.raises(NearOriginError):
        radial_ce_loss(np.array([[0.0, 0.0], [1.0, 1.0]]))


# ----------------------------------------------------------------- entropy

def test_m_spacing_hand_value():
    v, g = m_spacing_entropy([1.0, 2.0, 4.0], m=1)
    assert v == pytest.approx(0.5 * math.log(32), rel=1e-14)
    # gradient in caller order: d/dr of 1/2 [ln 4(r2-r1) + ln 4(r3-r2)]
    np.testing.assert_allclose(g, [-0.5, 0.5 - 0.25, 0.25])


def test_m_spacing_unsorted_input_and_gradient(rng):
    r = rng.uniform(0, 5, 40) + 0.01 * np.arange(40)
    rng.shuffle(r)
    v, g = m_spacing_entropy(r, 4, beta2=1.7)
    v2, _ = m_spacing_entropy(np.sort(r), 4, beta2=1.7)
    assert v == v2
    assert rel_err(g, central_fd(lambda x: m_spacing_entropy(x, 4, 1.7)[0], r)) < 1e-6


def test_m_spacing_known_entropies():
    from radialgauss.rng import make_rng

    u = make_rng(0).random(100_000)
    n = make_rng(1).standard_normal(100_000)
    assert abs(m_spacing_entropy(u)[0]) < 0.02
    assert abs(m_spacing_entropy(n)[0] - GAUSS_H) < 0.02


def test_m_spacing_ties_clamped():
    v, g = m_spacing_entropy([1.0, 1.0, 1.0, 2.0], m=1)
    assert np.isfinite(v)
    assert np.all(np.isfinite(g))
    with pytest.raises(DegenerateInputError):
        m_spacing_entropy([1.0, 2.0], m=2)


# ---------------------------------------------------------- radial composite

def test_radial_composite_reductions(rng):
    Z = rng.standard_normal((50, 2))
    v, g = radial_gaussianization_loss(Z, LossConfig())
    assert v == 0.0 and not g.any()
    a = radial_gaussianization_loss(Z, LossConfig(beta1=1.3))
    b = radial_ce_loss(Z, LossConfig(beta1=1.3))
    assert a[0] == pytest.approx(b[0], rel=1e-14)
    np.testing.assert_allclose(a[1], b[1], rtol=1e-13)


def test_radial_composite_gradient(rng):
    Z = separated_radii_points(rng, 60, 3, 1e-3)
    cfg = LossConfig(beta1=0.7, beta2=1.3, m_spacing=3)
    _, g = radial_gaussianization_loss(Z, cfg)
    fd = central_fd(lambda X: radial_gaussianization_loss(X, cfg)[0], Z)
    assert rel_err(g, fd) < 1e-4


def test_radial_linearity_in_weights(rng):
    Z = rng.standard_normal((200, 3))
    base1 = radial_gaussianization_loss(Z, LossConfig(beta1=1.0))[0]
    base2 = radial_gaussianization_loss(Z, LossConfig(beta2=1.0))[0]
    v = radial_gaussianization_loss(Z, LossConfig(beta1=2.5, beta2=0.4))[0]
    assert v == pytest.approx(2.5 * base1 + 0.4 * base2, rel=1e-12)


# --------------------------------------------------------------------- KL

def test_kl_self_consistency():
    Z = sample_gaussian(100_000, 2, 0)
    assert abs(kl_to_chi(Z)) < 0.05


def test_kl_degenerate_sphere_is_large():
    Z = sample_uniform_sphere(10_000, 2, math.sqrt(2), 0)
    assert kl_to_chi(Z) > 1


def test_kl_rotation_invariant(rng):
    Z = sample_x_distribution(5000, 3)
    t = 0.7
    R = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    assert kl_to_chi(Z @ R.T) == pytest.approx(kl_to_chi(Z), abs=1e-10)


# --------------------------------------------------------------------- W1

def test_w1_matched_reference_is_zero(rng):
    n, d = 300, 3
    ref = chi_sample(ChiModel(d), n, 42)
    dirs = rng.standard_normal((n, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    Z = dirs * ref[:, None]
    v, _ = w1_radial_loss(Z, LossConfig(w1_weight=1.0), seed=42)
    assert v == pytest.approx(0.0, abs=1e-12)


def test_w1_forced_reference():
    v, g = w1_radial_loss(np.zeros((2, 2)), LossConfig(w1_weight=1.0), 0, reference=[1.0, 3.0])
    assert v == 2.0
    assert np.all(g == 0)


def test_w1_gradient(rng):
    Z = separated_radii_points(rng, 40, 2, 1e-3)
    cfg = LossConfig(w1_weight=2.0)
    ref = np.sort(rng.uniform(0.1, 3.0, 40) + 1e-2 * np.arange(40))
    _, g = w1_radial_loss(Z, cfg, 0, reference=ref)
    fd = central_fd(lambda X: w1_radial_loss(X, cfg, 0, reference=ref)[0], Z)
    assert rel_err(g, fd) < 1e-4


def test_w1_seeded_reference_deterministic(rng):
    Z = rng.standard_normal((100, 2))
    cfg = LossConfig(w1_weight=1.0)
    assert w1_radial_loss(Z, cfg, 5)[0] == w1_radial_loss(Z, cfg, 5)[0]
    assert w1_radial_loss(Z, cfg, 5)[0] != w1_radial_loss(Z, cfg, 6)[0]


# ------------------------------------------------------------------ total

def test_total_zero_weights(rng):
    Z = rng.standard_normal((30, 2))
    rep = total_loss(Z, cfg=LossConfig())
    assert rep.total == 0.0
    assert not rep.gradient.any()


def test_total_vc_composition(rng):
    Z, Zp = rng.standard_normal((2, 40, 3))
    cfg = LossConfig(lambda2=2.0, lambda3=3.0)
    rep = total_loss(Z, Zp, cfg)
    want = 2.0 * (variance_loss(Z)[0] + variance_loss(Zp)[0]) + 3.0 * (
        covariance_loss(Z)[0] + covariance_loss(Zp)[0]
    )
    assert rep.total == pytest.approx(want, rel=1e-12)


def test_total_component_identity_and_gradients(rng):
    Z = separated_radii_points(rng, 50, 2, 1e-3)
    Zp = separated_radii_points(rng, 50, 2, 1e-3)
    cfg = LossConfig(lambda1=0.5, lambda2=1.5, lambda3=2.0, beta1=0.8, beta2=0.3, w1_weight=0.6,
                     m_spacing=3)
    rep = total_loss(Z, Zp, cfg, seed=9)
    assert set(rep.components) == set(COMPONENTS)
    recomputed = (0.5 * rep.components["invariance"] + 1.5 * rep.components["variance"]
                  + 2.0 * rep.components["covariance"] + 0.8 * rep.components["radial_ce"]
                  - 0.3 * rep.components["radial_entropy"] + 0.6 * rep.components["radial_w1"])
    assert rep.total == pytest.approx(recomputed, rel=1e-10)
    fd = central_fd(lambda X: total_loss(X, Zp, cfg, seed=9, want_grad=False).total, Z)
    assert rel_err(rep.gradient, fd) < 1e-4
    fdp = central_fd(lambda X: total_loss(Z, X, cfg, seed=9, want_grad=False).total, Zp)
    assert rel_err(rep.gradient_p, fdp) < 1e-4


def test_total_requires_second_view(rng):
    with pytest.raises(ConfigError):
        total_loss(rng.standard_normal((5, 2)), None, LossConfig(lambda1=1.0))


def test_total_permutation_invariant(rng):
    Z = rng.standard_normal((80, 2))
    cfg = LossConfig(lambda2=1.0, lambda3=1.0, beta1=1.0, beta2=0.5)
    perm = rng.permutation(80)
    a = total_loss(Z, cfg=cfg)
    b = total_loss(Z[perm], cfg=cfg)
    assert a.total == pytest.approx(b.total, rel=1e-12)
    np.testing.assert_allclose(a.gradient[perm], b.gradient, rtol=1e-10, atol=1e-15)


def test_config_validation():
    with pytest.raises(ConfigError):
        LossConfig(beta1=-1.0)
    with pytest.raises(ConfigError):
        LossConfig(var_eps=0.0)
    with pytest.raises(DegenerateInputError):
        LossConfig(m_spacing=10).spacing_for(10)


# ------------------------------------------------------------------ E2MC

def test_e2mc_gaussian():
    Z = sample_gaussian(100_000, 2, 3)
    assert e2mc_metric(Z) == pytest.approx(-GAUSS_H, abs=0.03)


def test_e2mc_scaling_shift():
    Z = sample_gaussian(20_000, 2, 4)

    def entropy_term(X):
        return e2mc_metric(X) - covariance_loss(X)[0] - variance_loss(X)[0]

    s = 3.0
    assert entropy_term(Z * s) - entropy_term(Z) == pytest.approx(-math.log(s), abs=1e-9)
