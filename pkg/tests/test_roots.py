import math
import unittest

import mock
import numpy as np
import pytest

from ptstar import *
from tests.helpers import slow_test


def nearest(values, target):
    return min(values, key=lambda v: abs(v - target))


class RootSearchRegionTestCase(unittest.TestCase):

    def test_region(self):
        region = RootSearchRegion(0.5, 2., -1., 0.5, grid_mu=8, grid_nu=4)
        self.assertEqual(region.width, 1.5)
        self.assertEqual(region.height, 1.5)
        self.assertFalse(region.is_conjugation_symmetric)
        self.assertTrue(region.contains_real_axis)
        self.assertTrue(region.contains(2. + 0.5j))
        self.assertFalse(region.contains(2.1))
        self.assertTrue(region.contains(2.1, margin=0.2))

        mu, nu = region.grid()
        self.assertEqual(mu.shape, (4, 8))
        self.assertEqual(nu.shape, (4, 8))

        path = region.boundary(10)
        self.assertEqual(len(path), 41)
        self.assertEqual(path[0], path[-1])
        self.assertEqual(path[10], 2. - 1j)

        self.assertEqual(region.refined(4).grid_mu, 32)
        inflated = region.inflate(0.1)
        self.assertAlmostEqual(inflated.mu_min, 0.4)
        self.assertAlmostEqual(inflated.mu_max, 2.1)
        self.assertAlmostEqual(inflated.nu_min, -1.1)
        # the rectangle is not inflated across the imaginary axis
        self.assertEqual(RootSearchRegion(0.05, 1., -1., 1.).inflate(0.1)
                         .mu_min, 0.025)
        self.assertEqual(region.to_dict()['grid_nu'], 4)

    def test_invalid(self):
        with pytest.raises(ValueError, match='Invalid region'):
            _ = RootSearchRegion(0., 1., 1., 1.)
        with pytest.raises(ValueError, match='Grid densities must be at '
                                             'least 2'):
            _ = RootSearchRegion(0., 1., 0., 1., grid_mu=1)
        with pytest.raises(ValueError, match='`tol_root` must be positive'):
            _ = RootSearchRegion(0., 1., 0., 1., tol_root=0.)
        with pytest.raises(ValueError, match='`mu_max` must be finite'):
            _ = RootSearchRegion(0., math.inf, 0., 1.)

    def test_config(self):
        cfg = validate_config(RegionConfig(mu_min='1', grid_mu=16))
        region = cfg.to_region()
        self.assertEqual(region.mu_min, 1.)
        self.assertEqual(region.grid_mu, 16)
        with pytest.raises(ConfigValidationError, match='Invalid region'):
            _ = validate_config(RegionConfig(mu_min=3.))


class RealSpectrumTestCase(unittest.TestCase):

    def test_square_well(self):
        model = StarGraphModel(q=2, alpha=1., length=1.)
        roots = real_spectrum(model, k_max=7.)
        ks = [k for k, _ in roots]
        expected = sorted([1.] + [n * math.pi / 2 for n in range(1, 5)])
        np.testing.assert_allclose(ks, expected, rtol=0, atol=1e-10)

        kinds = {round(k, 6): c.kind for k, c in roots}
        self.assertEqual(kinds[1.], RootKind.ANOMALOUS_REAL)
        self.assertEqual(kinds[round(math.pi / 2, 6)], RootKind.GENERIC_REAL)
        for _, c in roots:
            self.assertLess(c.residual, 1e-10)
            self.assertIsNone(c.flag)
            self.assertTrue(c.verified)

        # a root failing the determinant check is reported, not dropped
        with mock.patch('ptstar.roots.matching_determinant',
                        return_value=0.5):
            flagged = real_spectrum(model, k_max=7.)
        self.assertEqual([k for k, _ in flagged], ks)
        self.assertTrue(all(not c.verified for _, c in flagged))
        ret = SpectrumResult(model=model, real_roots=flagged, complex_roots=[])
        self.assertFalse(ret.to_dict()['real_roots'][0]['verified'])

    def test_degenerate_square_well(self):
        model = StarGraphModel(q=2, alpha=math.pi / 2)
        self.assertTrue(is_degenerate_square_well(model.alpha, model.length))
        roots = real_spectrum(model, k_max=2.)
        self.assertEqual(len(roots), 2)
        for k, c in roots:
            self.assertAlmostEqual(k, math.pi / 2, places=12)
            self.assertEqual(c.flag, 'cluster')

    def test_generic_only(self):
        for q in (3, 4, 5):
            model = StarGraphModel(q=q, alpha=1., length=2.)
            roots = real_spectrum(model, k_max=3.)
            np.testing.assert_allclose(
                [k for k, _ in roots], [n * math.pi / 4 for n in (1, 2, 3)])
            self.assertTrue(all(c.kind == RootKind.GENERIC_REAL
                                for _, c in roots))

    def test_anomalous_roots_included(self):
        model = StarGraphModel(q=6, alpha=0.5)
        roots = real_spectrum(model, k_max=math.pi / 2 - 1e-3)
        anomalous = [k for k, c in roots if c.kind == RootKind.ANOMALOUS_REAL]
        self.assertEqual(len(anomalous), 2)
        for k in anomalous:
            self.assertLess(polynomial_residual(k, 2, 0.5), 1e-10)

    def test_invalid(self):
        with pytest.raises(ValueError, match='`k_max` must be positive'):
            _ = real_spectrum(StarGraphModel(q=2, alpha=1.), k_max=0.)


class ComplexRootsTestCase(unittest.TestCase):

    def test_newton_polish(self):
        form = ClosedForm(StarGraphModel(q=4, alpha=1.))
        ret = newton_polish(form, 1.7 - 0.3j)
        self.assertTrue(ret.converged)
        self.assertLess(ret.indicator, 1e-12)
        self.assertLess(abs(ret.k - (1.7025 - 0.3165j)), 1e-3)
        self.assertGreaterEqual(ret.iterations, 1)

    def test_newton_quadratic(self):
        form = ClosedForm(StarGraphModel(q=4, alpha=1.))
        root = newton_polish(form, 1.7 - 0.3j).k
        seed = root + 1e-4 * (1 + 1j) / math.sqrt(2)
        ret = newton_polish(form, seed, max_iter=1)
        self.assertEqual(ret.iterations, 1)
        self.assertLess(ret.indicator, 1e-7)
        self.assertLess(abs(ret.k - root), 1e-6)
        ret = newton_polish(form, seed, max_iter=2)
        self.assertLess(abs(ret.k - root), 1e-10)

    def test_scale_covariance(self):
        # k -> k / c when L -> c * L and alpha -> alpha / c
        a = complex_roots(StarGraphModel(q=4, alpha=1., length=1.),
                          RootSearchRegion(1., 2.5, -1., -0.05))
        b = complex_roots(StarGraphModel(q=4, alpha=0.5, length=2.),
                          RootSearchRegion(0.5, 1.25, -0.5, -0.025))
        self.assertTrue(a)
        self.assertEqual(len(a), len(b))
        kbs = [k.value for k, _ in b]
        for ka, _ in a:
            self.assertLess(abs(nearest(kbs, ka.value / 2.) - ka.value / 2.),
                            1e-8)

    def test_four_edges(self):
        model = StarGraphModel(q=4, alpha=1.)
        region = RootSearchRegion(1., 2.5, -1., 0.)
        found = complex_roots(model, region)
        self.assertTrue(found)
        k = nearest([k.value for k, _ in found], 1.7025 - 0.3165j)
        self.assertLessEqual(abs(k.real - 1.7025), 5e-4)
        self.assertLessEqual(abs(k.imag + 0.3165), 5e-4)
        self.assertLess(max(triple_residual(k, model)), 1e-6)
        self.assertLess(abs(matching_determinant(k, model)), 1e-8)

        # sorted by mu, then nu
        values = [(k.mu, k.nu) for k, _ in found]
        self.assertEqual(values, sorted(values))

        # the eigenfunction exists at the root, and its PT image at the
        # conjugate root
        ef = assemble_eigenfunction(k, model)
        self.assertLess(ef.max_residual, 1e-8)
        image = pt_image(ef)
        self.assertEqual(image.root.value, k.conjugate())
        self.assertLess(image.kirchhoff_residual, 1e-8)

    def test_three_edges_displayed(self):
        model = StarGraphModel.from_coupling(q=3, coupling=1.)
        region = RootSearchRegion(0.5, 2., -1., 1.)
        found = [k.value for k, _ in complex_roots(
            model, region, convention=SecularConvention.DISPLAYED)]
        for target in (1.20484 + 0.3507j, 1.20484 - 0.3507j):
            k = nearest(found, target)
            self.assertLessEqual(abs(k.real - target.real), 5e-4)
            self.assertLessEqual(abs(k.imag - target.imag), 5e-4)
            # (k / alpha)^3 = tan kL
            self.assertLess(abs(k ** 3 - np.tan(k)), 1e-8)
        self.assertLess(
            max(triple_residual(nearest(found, 1.20484 + 0.3507j), model,
                                SecularConvention.DISPLAYED)), 1e-6)

    def test_three_edges_matching(self):
        model = StarGraphModel(q=3, alpha=1.)
        region = RootSearchRegion(0.3, 2., -1.5, 1.5)
        found = complex_roots(model, region)
        self.assertTrue(found)
        for k, residual in found:
            self.assertLess(residual, 1e-8)
            self.assertLess(abs(matching_determinant(k, model)), 1e-8)
            ef = assemble_eigenfunction(k, model)
            self.assertLess(ef.kirchhoff_residual, 1e-8)

        # the displayed root is not an eigenvalue of the matching conditions
        with pytest.raises(ConsistencyError):
            _ = assemble_eigenfunction(1.20484 + 0.3507j, model)

    def test_conjugation_closure(self):
        region = RootSearchRegion(0.5, 3., -1., 1.)
        for q, convention in [(4, SecularConvention.MATCHING),
                              (6, SecularConvention.MATCHING),
                              (3, SecularConvention.DISPLAYED),
                              (5, SecularConvention.DISPLAYED)]:
            model = StarGraphModel(q=q, alpha=1.)
            self.assertTrue(is_conjugation_closed(model, convention))
            found = [k.value for k, _ in complex_roots(model, region,
                                                       convention)]
            for k in found:
                self.assertLess(abs(nearest(found, k.conjugate()) -
                                    k.conjugate()), 1e-7)
        self.assertFalse(is_conjugation_closed(StarGraphModel(q=3, alpha=1.)))

    def test_parallel_deterministic(self):
        model = StarGraphModel(q=4, alpha=1.)
        region = RootSearchRegion(1., 2.5, -1., 1., grid_mu=32, grid_nu=32)
        self.assertEqual(complex_roots(model, region, n_jobs=1),
                         complex_roots(model, region, n_jobs=4))

    def test_triple_residual(self):
        with pytest.raises(ValueError, match='requires q >= 3'):
            _ = triple_residual(1., StarGraphModel(q=2, alpha=1.))
        # away from roots, at least one residual is large
        self.assertGreater(
            max(triple_residual(1. + 0.5j, StarGraphModel(q=4, alpha=1.))),
            1e-3)

    def test_residual_curves(self):
        model = StarGraphModel(q=3, alpha=1.)
        region = RootSearchRegion(0.5, 2., -1., 1., grid_mu=5, grid_nu=3)
        curves = residual_curves(model, region)
        self.assertEqual(curves.r_a.shape, (3, 5))
        rows = curves.to_rows()
        self.assertEqual(len(rows), 15)
        self.assertEqual(set(rows[0]), {'mu', 'nu', 'r_a', 'r_b', 'r_c'})
        self.assertEqual((rows[0]['mu'], rows[0]['nu']), (0.5, -1.))
        with pytest.raises(ValueError, match='requires q >= 3'):
            _ = residual_curves(StarGraphModel(q=2, alpha=1.), region)


class WindingCountTestCase(unittest.TestCase):

    def test_count(self):
        model = StarGraphModel(q=2, alpha=1.)
        # k = 1 and k = pi / 2
        self.assertEqual(
            count_roots_in_region(model, RootSearchRegion(0.5, 2., -0.5, 0.5)),
            2)
        # N has no zeros off the real axis for q = 2
        self.assertEqual(
            count_roots_in_region(model, RootSearchRegion(0.5, 2., 0.1, 1.)),
            0)

    def test_origin_excluded(self):
        # the zero of order q - 1 at the origin is not counted
        model = StarGraphModel(q=3, alpha=1.)
        count, region = winding_count(model,
                                      RootSearchRegion(-0.3, 0.3, -0.3, 0.3))
        self.assertEqual(count, 0)

    def test_certification_error(self):
        model = StarGraphModel(q=4, alpha=1.)
        region = RootSearchRegion(1., 2.5, -1., 1.)
        with mock.patch('ptstar.roots._winding', return_value=None):
            with pytest.raises(CertificationError,
                               match='The winding count is unavailable'):
                _ = winding_count(model, region, max_inflations=2)

            ret = solve_region(model, region)
            self.assertIsNone(ret.winding)
            self.assertIsNone(ret.count_certificate)
            self.assertTrue(ret.complex_roots)

    @slow_test
    def test_solve_region(self):
        model = StarGraphModel(q=4, alpha=1.)
        region = RootSearchRegion(1., 2.5, -1., 1.)
        ret = solve_region(model, region)
        self.assertIsNotNone(ret.count_certificate)
        self.assertEqual(ret.count_certificate, ret.located_count)
        self.assertEqual(ret.winding, ret.count_certificate)

        self.assertEqual([k for k, _ in ret.real_roots],
                         [math.pi / 2])
        ks = [k.value for k, _ in ret.complex_roots]
        self.assertLess(abs(nearest(ks, 1.7025 - 0.3165j) -
                            (1.7025 - 0.3165j)), 5e-4)
        self.assertLess(abs(nearest(ks, 1.7025 + 0.3165j) -
                            (1.7025 + 0.3165j)), 5e-4)

        rows = ret.to_rows()
        self.assertEqual(len(rows), len(ret.real_roots) +
                         len(ret.complex_roots))
        self.assertEqual(rows[0]['kind'], 'GenericReal')
        d = ret.to_dict()
        self.assertEqual(d['count_certificate'], ret.count_certificate)
        self.assertEqual(d['convention'], 'matching')
        self.assertEqual(len(ret.residuals), len(rows))

    @slow_test
    def test_solve_region_inflated(self):
        # the real root pi / 2 lies on the upper edge of the region
        model = StarGraphModel(q=4, alpha=1.)
        region = RootSearchRegion(1., 2.5, -1., 0.)
        ret = solve_region(model, region)
        self.assertEqual(ret.region, region)
        self.assertNotEqual(ret.effective_region, region)
        self.assertGreater(ret.effective_region.nu_max, 0.)
        self.assertLess(ret.effective_region.nu_max, 0.1)
        self.assertEqual(ret.winding, 2)
        self.assertEqual(ret.located_count, 2)
        self.assertEqual(ret.count_certificate, 2)
        ks = [k.value for k, _ in ret.complex_roots]
        self.assertLess(abs(nearest(ks, 1.7025 - 0.3165j) -
                            (1.7025 - 0.3165j)), 5e-4)
        self.assertIsNotNone(ret.to_dict()['effective_region'])

    @slow_test
    def test_solve_region_displayed(self):
        model = StarGraphModel(q=3, alpha=1.)
        ret = solve_region(model, RootSearchRegion(0.5, 2., -1., 1.),
                           convention='displayed')
        self.assertEqual(ret.convention, SecularConvention.DISPLAYED)
        ks = [k.value for k, _ in ret.complex_roots]
        self.assertLess(abs(nearest(ks, 1.20484 + 0.3507j) -
                            (1.20484 + 0.3507j)), 1e-3)
        self.assertEqual(ret.count_certificate, ret.located_count)
