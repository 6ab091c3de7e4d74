import json

import numpy as np
import pytest

from loopbu import (
    CoincidenceCertificate,
    DegenerateInput,
    FunctionalSpec,
    GridMismatch,
    NoConvergence,
    OddMapProblem,
    RegimeError,
    SolverConfig,
    SquaredDistanceToPath,
    WeightedCoordinate,
    certificate_from_dict,
    default_tf_params,
    family_demo,
    family_report,
    hemisphere_grid,
    load_certificate,
    normalize,
    odd_map_g,
    save_certificate,
    solve_bu,
    sphere_grid,
    tf_sphere_embed,
)


def grid(m):
    return np.arange(m + 1) / m


def weight_problem(n=2, m=256):
    """k = 1 problem with weight w(t) = t against the first coordinate."""
    spec = FunctionalSpec((WeightedCoordinate(0, grid(m)),))
    return OddMapProblem(spec, n, m)


class TestOddMap:
    def test_exact_oddness(self, rng):
        problem = weight_problem()
        for _ in range(20):
            v = rng.standard_normal(3)
            v[-1] = 0.0
            x = normalize(v)
            g_plus = odd_map_g(problem, x)
            g_minus = odd_map_g(problem, -x)
            assert np.linalg.norm(g_plus + g_minus) < 1e-12

    def test_analytic_value(self, rng):
        # for the great-circle embedding and w(t) = t the map reduces to
        # g(x) = -x_1 / pi plus quadrature error
        problem = weight_problem(m=1024)
        for phi in (0.0, 0.3, 1.1, 2.0):
            x = np.array([np.cos(phi), np.sin(phi), 0.0])
            got = odd_map_g(problem, x)[0]
            assert got == pytest.approx(-np.cos(phi) / np.pi, abs=2e-3)

    def test_requires_equatorial_input(self):
        problem = weight_problem()
        with pytest.raises(DegenerateInput):
            odd_map_g(problem, np.array([0.0, 0.0, 1.0]))


class TestGrids:
    def test_hemisphere_dim1_half_circle(self):
        pts = hemisphere_grid(1, 8)
        assert pts.shape == (8, 2)
        # all representatives in the upper half circle
        assert np.all(pts[:, 1] >= -1e-15)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_hemisphere_dim2_upper(self):
        pts = hemisphere_grid(2, 100)
        assert pts.shape == (100, 3)
        assert np.all(pts[:, 2] > 0.0)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_hemisphere_dim3_unit(self):
        pts = hemisphere_grid(3, 64)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_sphere_grid_dim0(self):
        assert np.array_equal(sphere_grid(0, 2), [[1.0], [-1.0]])

    def test_sphere_grid_dim1_full_circle(self):
        pts = sphere_grid(1, 64)
        assert pts.shape == (64, 2)
        # covers both half circles
        assert np.min(pts[:, 1]) < -0.9

    def test_sphere_grid_seed_stability(self):
        a = sphere_grid(3, 32, seed=5)
        b = sphere_grid(3, 32, seed=5)
        c = sphere_grid(3, 32, seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestSolveAnalytic:
    def test_weight_t_zero_set(self):
        # zeros of g(x) = -x_1/pi on the equator circle are x_1 = 0
        cert = solve_bu(weight_problem())
        assert abs(cert.x[0]) < 1e-6
        assert cert.residual < 1e-8
        assert cert.tf_dist > 1e-6
        cert.validate(weight_problem().spec)

    def test_bisection_path(self):
        # an odd grid count misses the exact zero, forcing refinement
        cert = solve_bu(weight_problem(), SolverConfig(grid_points=37))
        assert cert.method in ("bisection", "grid_only")
        assert abs(cert.x[0]) < 1e-6
        assert cert.residual < 1e-8

    def test_determinism(self):
        config = SolverConfig(grid_points=37)
        a = solve_bu(weight_problem(), config)
        b = solve_bu(weight_problem(), config)
        assert np.array_equal(a.x, b.x)
        assert a.residual == b.residual
        assert a.iterations == b.iterations

    def test_higher_sphere_bisection(self):
        # same functional on S^3: zero set is a great sphere, bisection
        # walks a great circle toward it
        cert = solve_bu(weight_problem(n=3, m=64), SolverConfig(grid_points=200))
        assert abs(cert.x[0]) < 1e-5
        assert cert.residual < 1e-8

    def test_symmetric_weight_solves_on_grid(self):
        # w(t) = t(1-t) is symmetric about 1/2, so g vanishes
        # identically and the first grid point already certifies
        m = 256
        t = grid(m)
        spec = FunctionalSpec((WeightedCoordinate(0, t * (1.0 - t)),))
        cert = solve_bu(OddMapProblem(spec, 2, m))
        assert cert.method == "grid_only"
        assert cert.iterations == 0
        assert cert.residual < 1e-14


class TestSolveGaussNewton:
    def test_two_functionals_on_s3(self):
        # w_1(t) = t on axis 0 and w_2(t) = t^2 on axis 1: both reduce
        # to multiples of x_i/pi, so the zero set on the S^2 equator is
        # the circle x_1 = x_2 = 0
        m = 64
        t = grid(m)
        spec = FunctionalSpec(
            (WeightedCoordinate(0, t.copy()), WeightedCoordinate(1, t * t))
        )
        cert = solve_bu(OddMapProblem(spec, 3, m), SolverConfig(grid_points=500))
        assert cert.residual < 1e-8
        assert abs(cert.x[0]) < 1e-5
        assert abs(cert.x[1]) < 1e-5

    def test_regime_guard(self):
        # two functionals on S^2 put k = n - 1 + 1 out of the guarantee
        m = 64
        t = grid(m)
        spec = FunctionalSpec(
            (WeightedCoordinate(0, t.copy()), WeightedCoordinate(1, t * t))
        )
        problem = OddMapProblem(spec, 2, m)
        with pytest.raises(RegimeError):
            solve_bu(problem)

    def test_best_effort_escape_hatch(self):
        # the same out-of-regime problem searched anyway: these two
        # functionals still share the zero x_1 = 0 on the circle, where
        # w_2 pairs with x_2 = +-1 and vanishes by the same cancellation
        m = 64
        t = grid(m)
        spec = FunctionalSpec(
            (WeightedCoordinate(0, t.copy()), WeightedCoordinate(1, t * t))
        )
        problem = OddMapProblem(spec, 2, m)
        config = SolverConfig(best_effort=True, grid_points=500)
        try:
            cert = solve_bu(problem, config)
            assert cert.residual < 1e-8
        except NoConvergence as exc:
            assert exc.certificate is not None
            assert exc.certificate.method == "grid_only"


class TestCertificates:
    def test_round_trip(self, tmp_path):
        cert = solve_bu(weight_problem(m=64))
        p = tmp_path / "cert.json"
        save_certificate(cert, p)
        back = load_certificate(p)
        assert np.array_equal(back.x, cert.x)
        assert back.residual == cert.residual
        assert back.method == cert.method
        back.validate(weight_problem(m=64).spec)

    def test_validate_catches_tampering(self):
        cert = solve_bu(weight_problem(m=64))
        obj = cert.to_dict()
        obj["residual"] = 0.5
        with pytest.raises(DegenerateInput):
            certificate_from_dict(obj).validate(weight_problem(m=64).spec)

    def test_rejects_tf_certificates(self):
        # a certificate whose loop sits on the to-and-fro set is vacuous
        cert = solve_bu(weight_problem(m=64))
        obj = cert.to_dict()
        obj["tf_distance"] = 0.0
        with pytest.raises(Exception):
            certificate_from_dict(obj)

    def test_missing_field_diagnostic(self):
        cert = solve_bu(weight_problem(m=64))
        obj = cert.to_dict()
        del obj["method"]
        with pytest.raises(Exception, match="method"):
            certificate_from_dict(obj)


class TestProblemValidation:
    def test_gamma_requires_omega(self):
        spec = FunctionalSpec((WeightedCoordinate(0, grid(64)),))
        with pytest.raises(DegenerateInput):
            OddMapProblem(spec, 2, 64, "gamma")

    def test_gamma_rejects_wandering_omega(self, rng):
        from tests.conftest import random_sphere_loop

        spec = FunctionalSpec((WeightedCoordinate(0, grid(64)),))
        omega = random_sphere_loop(rng, 2, 64)
        with pytest.raises(DegenerateInput):
            OddMapProblem(spec, 2, 64, "gamma", omega)

    def test_grid_mismatch(self):
        spec = FunctionalSpec((WeightedCoordinate(0, grid(64)),))
        with pytest.raises(GridMismatch):
            OddMapProblem(spec, 2, 128)

    def test_path_dimension_mismatch(self):
        m = 64
        beta = np.zeros((m + 1, 4))
        spec = FunctionalSpec((SquaredDistanceToPath(beta),))
        with pytest.raises(GridMismatch):
            OddMapProblem(spec, 2, m)


class TestFamily:
    @staticmethod
    def family_spec(m=64):
        t = grid(m)
        beta = np.column_stack(
            [0.3 * np.sin(2 * np.pi * t), 0.2 * np.cos(2 * np.pi * t), 0.1 * t]
        )
        return FunctionalSpec((SquaredDistanceToPath(beta),))

    def test_small_sweep_all_certified(self):
        spec = self.family_spec()
        params = default_tf_params(1)
        config = SolverConfig(tol=1e-6, grid_points=256)
        certs = family_demo(1, spec, params, config, fibers=6)
        assert len(certs) == 6
        report = family_report(certs, config.tol)
        assert report["fibers"] == 6
        assert report["certified"] == 6
        assert report["max_residual"] < 1e-6

    def test_d0_two_fibers(self):
        spec = self.family_spec()
        params = default_tf_params(0)
        certs = family_demo(0, spec, params, SolverConfig(tol=1e-6, grid_points=256))
        assert len(certs) == 2

    def test_thread_count_matches_serial(self):
        spec = self.family_spec()
        params = default_tf_params(1)
        config = SolverConfig(tol=1e-6, grid_points=128)
        serial = family_demo(1, spec, params, config, fibers=4, threads=1)
        threaded = family_demo(1, spec, params, config, fibers=4, threads=4)
        for a, b in zip(serial, threaded):
            assert np.array_equal(a.x, b.x)
            assert a.residual == b.residual

    def test_threads_env_must_be_integer(self, monkeypatch):
        monkeypatch.setenv("LOOPBU_THREADS", "many")
        spec = self.family_spec()
        params = default_tf_params(0)
        with pytest.raises(DegenerateInput):
            family_demo(0, spec, params, SolverConfig(tol=1e-6, grid_points=64))

    def test_report_empty(self):
        report = family_report([], 1e-6)
        assert report == {"fibers": 0, "certified": 0, "max_residual": 0.0}


class TestSolverConfig:
    def test_rejects_bad_tolerance(self):
        with pytest.raises(DegenerateInput):
            SolverConfig(tol=0.0)
        with pytest.raises(DegenerateInput):
            SolverConfig(tol=-1e-8)

    def test_rejects_bad_budgets(self):
        with pytest.raises(DegenerateInput):
            SolverConfig(iters=0)
        with pytest.raises(DegenerateInput):
            SolverConfig(grid_points=1)
