import numpy as np
import pytest

from loopbu import (
    DegenerateInput,
    GridMismatch,
    TfSphereParams,
    default_tf_params,
    embed_alpha,
    embed_beta,
    embed_gamma,
    equator_base,
    h_lambda,
    normalize,
    rotation_to_base,
    south_pole,
    tf_sphere_embed,
)


def random_equatorial(rng, n):
    v = rng.standard_normal(n + 1)
    v[-1] = 0.0
    return normalize(v)


class TestEmbedAlpha:
    def test_visits_poles_and_x(self):
        x = np.array([0.0, 1.0, 0.0])
        loop = embed_alpha(x, 64)
        assert np.array_equal(loop.samples[0], south_pole(2))
        assert np.allclose(loop.samples[16], x, atol=1e-15)
        assert np.allclose(loop.samples[32], -south_pole(2), atol=1e-15)

    def test_equivariance_is_sample_exact(self, rng):
        for n in (2, 3, 4):
            x = random_equatorial(rng, n)
            lhs = embed_alpha(-x, 128).samples
            rhs = embed_alpha(x, 128).star().samples
            assert np.array_equal(lhs, rhs)

    def test_rejects_non_equatorial_points(self):
        with pytest.raises(DegenerateInput):
            embed_alpha(np.array([0.0, 0.0, 1.0]), 64)
        with pytest.raises(DegenerateInput):
            embed_alpha(np.array([0.5, 0.0, 0.0]), 64)


class TestEmbedBeta:
    def test_starts_at_equator_base(self):
        x = np.array([0.0, 1.0, 0.0])
        loop = embed_beta(x, 64)
        assert np.array_equal(loop.base, equator_base(2))
        assert np.allclose(loop.samples[32], x, atol=1e-14)

    def test_rotate_moves_base_to_south_pole(self):
        x = np.array([0.0, 1.0, 0.0])
        loop = embed_beta(x, 64, rotate=True)
        assert np.array_equal(loop.base, south_pole(2))
        rot = rotation_to_base(equator_base(2))
        plain = embed_beta(x, 64)
        assert np.allclose(loop.samples, plain.samples @ rot.T, atol=1e-14)

    def test_rejects_circle_through_base_itself(self):
        with pytest.raises(Exception):
            embed_beta(equator_base(2), 64)


class TestHLambda:
    def test_endpoint_one_is_beta(self, rng):
        x = random_equatorial(rng, 2)
        direct = embed_beta(x, 64)
        staged = h_lambda(x, 1.0, 64)
        assert np.array_equal(staged.samples, direct.samples)

    def test_endpoint_zero_matches_alpha_family(self, rng):
        # lambda = 0 runs the great circle through the poles and x; the
        # general-position formula reproduces it to quadrature accuracy
        x = random_equatorial(rng, 2)
        staged = h_lambda(x, 0.0, 64)
        direct = embed_alpha(x, 64)
        assert np.max(np.abs(staged.samples - direct.samples)) < 1e-8

    def test_bases_slide_along_meridian(self):
        x = np.array([0.0, 1.0, 0.0])
        for lam in (0.0, 0.3, 0.7, 1.0):
            loop = h_lambda(x, lam, 32)
            # base interpolates from the south pole to the equator base
            assert np.linalg.norm(loop.base) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(h_lambda(x, 0.0, 32).base, south_pole(2), atol=1e-15)
        assert np.allclose(h_lambda(x, 1.0, 32).base, equator_base(2), atol=1e-15)

    def test_continuity_in_lambda(self, rng):
        x = random_equatorial(rng, 2)
        lams = np.linspace(0.0, 1.0, 65)
        prev = h_lambda(x, lams[0], 64)
        worst = 0.0
        for lam in lams[1:]:
            cur = h_lambda(x, lam, 64)
            worst = max(worst, float(np.max(np.linalg.norm(cur.samples - prev.samples, axis=1))))
            prev = cur
        assert worst < 0.2

    def test_rejects_out_of_range(self):
        x = np.array([0.0, 1.0, 0.0])
        with pytest.raises(DegenerateInput):
            h_lambda(x, -0.1, 32)
        with pytest.raises(DegenerateInput):
            h_lambda(x, 1.1, 32)


class TestTfSphereParams:
    def test_default_params_validate(self):
        for d in (0, 1, 2, 3):
            params = default_tf_params(d)
            assert params.d == d
            assert len(params.basis) == d + 1

    def test_rejects_nonvanishing_profile(self):
        with pytest.raises(DegenerateInput):
            TfSphereParams(0, 1.0, (lambda u: np.cos(np.pi * u),))

    def test_rejects_dependent_profiles(self):
        # two copies of the same profile: Gram matrix is rank 1
        basis = (lambda u: np.sin(np.pi * u), lambda u: 2.0 * np.sin(np.pi * u))
        with pytest.raises(DegenerateInput):
            TfSphereParams(1, 0.5, basis)

    def test_rejects_excessive_amplitude(self):
        basis = (lambda u: np.sin(np.pi * u),)
        with pytest.raises(DegenerateInput):
            TfSphereParams(0, np.pi, basis)

    def test_amplitude_near_limit_accepted(self):
        basis = (lambda u: np.sin(np.pi * u),)
        TfSphereParams(0, np.pi - 0.1, basis)


class TestTfSphereEmbed:
    def test_result_is_exactly_to_and_fro(self, rng):
        params = default_tf_params(2)
        c = normalize(rng.standard_normal(3))
        loop = tf_sphere_embed(c, params, 128)
        assert loop.tf_distance() == 0.0

    def test_lives_on_prime_meridian(self, rng):
        # every sample has zero components except the first and last
        params = default_tf_params(1)
        c = normalize(rng.standard_normal(2))
        loop = tf_sphere_embed(c, params, 64, n=3)
        assert np.max(np.abs(loop.samples[:, 1:-1])) == 0.0

    def test_injective_on_coefficients(self, rng):
        params = default_tf_params(1)
        c1 = np.array([1.0, 0.0])
        c2 = np.array([0.0, 1.0])
        l1 = tf_sphere_embed(c1, params, 64)
        l2 = tf_sphere_embed(c2, params, 64)
        assert np.max(np.abs(l1.samples - l2.samples)) > 0.1

    def test_rejects_non_unit_coefficients(self):
        params = default_tf_params(1)
        with pytest.raises(DegenerateInput):
            tf_sphere_embed(np.array([1.0, 1.0]), params, 64)

    def test_rejects_wrong_length(self):
        params = default_tf_params(1)
        with pytest.raises(DegenerateInput):
            tf_sphere_embed(np.array([1.0, 0.0, 0.0]), params, 64)


class TestEmbedGamma:
    def test_clears_tf_set(self, rng):
        params = default_tf_params(1)
        c = normalize(rng.standard_normal(2))
        omega = tf_sphere_embed(c, params, 128)
        x = random_equatorial(rng, 2)
        loop = embed_gamma(omega, x)
        assert loop.tf_distance() >= np.sqrt(2.0) - 1e-6

    def test_equivariance_within_tolerance(self, rng):
        params = default_tf_params(1)
        for _ in range(10):
            c = normalize(rng.standard_normal(2))
            omega = tf_sphere_embed(c, params, 128)
            x = random_equatorial(rng, 2)
            lhs = embed_gamma(omega, -x).samples
            rhs = embed_gamma(omega, x).star().samples
            assert np.max(np.abs(lhs - rhs)) < 1e-9

    def test_constant_loop_input(self):
        # the constant loop at the south pole is to-and-fro; its push-off
        # is pure spur travel
        m = 64
        pts = np.tile(south_pole(2), (m + 1, 1))
        from loopbu import Loop

        omega = Loop(pts, south_pole(2))
        x = np.array([1.0, 0.0, 0.0])
        loop = embed_gamma(omega, x)
        assert loop.tf_distance() == pytest.approx(2.0, abs=1e-12)
        # middle of the squeezed section is the constant value
        assert np.array_equal(loop.samples[m // 2], south_pole(2))

    def test_rejects_far_from_tf_loops(self, rng):
        from tests.conftest import random_sphere_loop

        loop = random_sphere_loop(rng, 2, 64)
        assert loop.tf_distance() > 1e-3
        with pytest.raises(DegenerateInput):
            embed_gamma(loop, np.array([1.0, 0.0, 0.0]))

    def test_rejects_dimension_mismatch(self, rng):
        params = default_tf_params(1)
        c = normalize(rng.standard_normal(2))
        omega = tf_sphere_embed(c, params, 64, n=2)
        with pytest.raises((DegenerateInput, GridMismatch)):
            embed_gamma(omega, np.array([0.0, 1.0, 0.0, 0.0]))
