import math

import numpy as np
import pytest

from radialgauss.distributions import (
    MixtureSpec,
    check_samples,
    sample_by_name,
    sample_gaussian,
    sample_mixture,
    sample_student_t_isotropic,
    sample_sunshine,
    sample_uniform_sphere,
    sample_x_distribution,
)
from radialgauss.errors import ConfigError, DegenerateInputError
from radialgauss.metrics import ks_radii_chi, ks_uniform_angles


def test_gaussian_deterministic():
    assert np.array_equal(sample_gaussian(100, 3, 4), sample_gaussian(100, 3, 4))
    assert not np.array_equal(sample_gaussian(100, 3, 4), sample_gaussian(100, 3, 5))


@pytest.mark.parametrize("profile", ["cone", "band"])
def test_x_distribution_identity_covariance(profile):
    Z = sample_x_distribution(200_000, 0, arm_profile=profile)
    np.testing.assert_allclose(np.cov(Z, rowvar=False), np.eye(2), atol=0.02)
    assert np.abs(Z.mean(axis=0)).max() < 0.01


def test_x_distribution_angles_clumped():
    Z = sample_x_distribution(100_000, 1)
    assert ks_uniform_angles(Z) > 0.1


def test_x_distribution_band_isotropic_limit():
    Z = sample_x_distribution(100_000, 2, along_var=1.0, perp_var=1.0, arm_profile="band")
    assert ks_uniform_angles(Z) < 0.01
    assert ks_radii_chi(Z) < 0.01


def test_x_distribution_rejects_bad_variances():
    with pytest.raises(ConfigError):
        sample_x_distribution(10, 0, along_var=3.0)
    with pytest.raises(ConfigError):
        sample_x_distribution(10, 0, arm_profile="blob")


def test_sunshine_properties():
    Z = sample_sunshine(100_000, 3)
    assert ks_radii_chi(Z) < 0.005
    np.testing.assert_allclose(np.cov(Z, rowvar=False), np.eye(2), atol=0.02)
    # 12 slices, odd ones doubled up: the angle CDF departs from uniform by 1/12
    assert ks_uniform_angles(Z) == pytest.approx(1 / 12, abs=0.006)


def test_sunshine_radii_unchanged():
    from radialgauss.rng import make_rng

    g = make_rng(11).standard_normal((500, 2))
    Z = sample_sunshine(500, 11)
    np.testing.assert_allclose(np.linalg.norm(Z, axis=1), np.linalg.norm(g, axis=1), rtol=1e-13)


def test_student_t_unit_covariance():
    Z = sample_student_t_isotropic(300_000, 2, 5.0, 0)
    np.testing.assert_allclose(np.cov(Z, rowvar=False), np.eye(2), atol=0.05)
    with pytest.raises(ConfigError):
        sample_student_t_isotropic(10, 2, 2.0, 0)


def test_uniform_sphere_radius():
    Z = sample_uniform_sphere(1000, 4, 2.0, 0)
    np.testing.assert_allclose(np.linalg.norm(Z, axis=1), 2.0, rtol=1e-13)


def test_mixture_limits_and_labels():
    g = sample_mixture(MixtureSpec(0.0), 1000, 5)
    x = sample_mixture(MixtureSpec(1.0), 1000, 5)
    kids = np.random.SeedSequence(5).spawn(3)
    assert np.array_equal(g, sample_gaussian(1000, 2, kids[0]))
    assert np.array_equal(x, sample_x_distribution(1000, kids[1]))
    Z, lab = sample_mixture(MixtureSpec(0.3), 20000, 1, return_labels=True)
    assert abs(lab.mean() - 0.3) < 0.02
    with pytest.raises(ConfigError):
        MixtureSpec(1.5)


def test_registry():
    Z = sample_by_name("mixture", 50, 0, alpha=0.5)
    assert Z.shape == (50, 2)
    with pytest.raises(ConfigError):
        sample_by_name("nope", 5, 0)


def test_check_samples():
    with pytest.raises(DegenerateInputError):
        check_samples(np.zeros(3))
    with pytest.raises(DegenerateInputError):
        check_samples(np.zeros((1, 2)))
    with pytest.raises(DegenerateInputError):
        check_samples([[0.0, math.nan], [1.0, 1.0]])
