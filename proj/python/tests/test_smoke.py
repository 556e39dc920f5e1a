import math

import numpy as np
import pytest

kls = pytest.importorskip("_kls_lab")


def test_sampling_determinism_and_shape():
    spec = kls.make_distribution("gaussian", 3)
    a = kls.sample(spec, 100, 7)
    b = kls.sample(spec, 100, 7)
    assert a.shape == (100, 3)
    assert np.array_equal(a, b)


def test_cube_support():
    spec = kls.make_distribution("cube", 2)
    s = kls.sample(spec, 10000, 1)
    assert np.abs(s).max() <= math.sqrt(3.0)


def test_unknown_family_raises():
    with pytest.raises(Exception):
        kls.make_distribution("triangle", 2)


def test_third_moment_gaussian_near_zero():
    spec = kls.make_distribution("gaussian", 4)
    est = kls.third_moment_inner(spec, spec, 50000, 3)
    assert abs(est.value) < 3 * est.std_error


def test_wasserstein_translation():
    a = [0.0, 1.0, 2.0]
    b = [1.0, 2.0, 3.0]
    assert kls.w_p(a, b, 2.0) == pytest.approx(1.0)
    assert kls.w_p_vs_normal([0.0] * 1000, 1.0, 2.0) == pytest.approx(1.0, rel=0.01)


def test_tv_disjoint_supports():
    a = list(np.linspace(-2.0, -1.0, 5000))
    b = list(np.linspace(1.0, 2.0, 5000))
    assert kls.tv_estimate(a, b) == pytest.approx(1.0, abs=0.01)


def test_matrix_inequalities():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((4, 4))
    a = g @ g.T / 4.0
    b = rng.standard_normal((4, 4))
    b = (b + b.T) / 2.0
    assert kls.check_matrix_holder(a, b, 2.0, 2.0)
    assert kls.check_lieb_thirring(a, a + np.eye(4), 2.0)
    assert kls.check_lieb(a, b, 0.5)


def test_tequ_identity_is_exact():
    spec = kls.make_distribution("shifted_exp_prod", 3)
    rng = np.random.default_rng(1)
    a = rng.standard_normal((3, 3))
    a = (a + a.T) / 2.0
    b = rng.standard_normal((3, 3))
    b = (b + b.T) / 2.0
    assert kls.tequ_rel_deviation(spec, a, b, 200, 5) < 1e-10


def test_cheeger_gaussian_calibration():
    spec = kls.make_distribution("gaussian", 2)
    value = kls.halfspace_cheeger(spec, 8, 100000, 9)
    assert value == pytest.approx(math.sqrt(2 * math.pi) / 2, rel=0.05)


def test_oracle_potential():
    assert kls.oracle_potential(8, 1.0, 2) == pytest.approx(2.0)


def test_config_hash_changes_with_content():
    assert kls.config_hash("") != kls.config_hash("pairs=3")
    assert kls.config_hash("pairs=3") == kls.config_hash("pairs=3")
