import math
import unittest

import numpy as np
import pytest

from ptstar import *
from tests.helpers import slow_test


class AnomalousRootsTestCase(unittest.TestCase):

    def test_exponent(self):
        self.assertEqual(anomalous_exponent(1), 0.)
        self.assertAlmostEqual(anomalous_exponent(2), 2. / 3)
        self.assertAlmostEqual(anomalous_exponent(3), 0.8)
        for m in (0, 1.5, True):
            with pytest.raises(ValueError, match='`m` must be an integer'):
                _ = anomalous_exponent(m)

    def test_square_well_branch(self):
        branches = anomalous_branches(1, 2., 1., 10.)
        self.assertEqual(len(branches), 1)
        self.assertEqual(branches[0].roots, [2.])
        self.assertEqual(branches[0].q, 2)
        self.assertEqual(branches[0].branch_interval,
                         (math.pi / 2, math.pi))
        self.assertEqual(anomalous_branches(1, 2., 1., 1.), [])

    def test_first_branch(self):
        roots = anomalous_real_roots(2, 0.5, 1., math.pi / 2)
        self.assertEqual(len(roots), 2)
        self.assertLess(roots[0], roots[1])
        for k in roots:
            self.assertLess(0., k)
            self.assertLess(k, math.pi / 2)
            self.assertLess(polynomial_residual(k, 2, 0.5), 1e-10)
            self.assertLess(abs(float(fixed_point_form(k, 2, 0.5))), 1e-10)

        # above the critical coupling, the pair has left the real axis
        self.assertEqual(anomalous_real_roots(2, 0.9, 1., math.pi / 2), [])

    def test_both_signs_of_tan(self):
        branches = anomalous_branches(2, 0.5, 1., math.pi)
        self.assertEqual([len(b.roots) for b in branches], [2, 1])
        k = branches[1].roots[0]
        self.assertLess(math.pi / 2, k)
        self.assertLess(np.tan(k), 0.)
        self.assertLess(polynomial_residual(k, 2, 0.5), 1e-10)
        # the fixed-point form is only defined where tan kL >= 0
        self.assertTrue(math.isnan(float(fixed_point_form(k, 2, 0.5))))

    def test_tight_pair(self):
        # for small alpha the roots pair up around kL = (n + 1/2) * pi
        center = 5.5 * math.pi
        roots = anomalous_real_roots(2, 0.1, 1., 6. * math.pi)
        lower = max(k for k in roots if k < center)
        upper = min(k for k in roots if k > center)
        self.assertLess(upper - lower, 0.05)
        self.assertGreater(lower, 5. * math.pi)
        self.assertLess(upper, 6. * math.pi)
        self.assertLess(abs((upper - lower) - 8.8e-4), 1e-4)

    def test_roots_zero_matching_conditions(self):
        for m, alpha in ((1, 0.8), (2, 0.5), (3, 0.3)):
            model = StarGraphModel(q=4 * m - 2, alpha=alpha)
            form = ClosedForm(model)
            roots = anomalous_real_roots(m, alpha, 1., 6.)
            self.assertTrue(roots)
            for k in roots:
                self.assertLess(float(form.indicator(k)), 1e-8)
                self.assertLess(abs(matching_determinant(k, model)), 1e-8)

    def test_length_scaling(self):
        # roots scale as 1 / L at fixed alpha * L
        a = anomalous_real_roots(3, 0.4, 1., math.pi / 2)
        b = anomalous_real_roots(3, 0.2, 2., math.pi / 4)
        np.testing.assert_allclose(np.asarray(b) * 2., a, rtol=1e-9)

    def test_invalid(self):
        with pytest.raises(ValueError, match='`alpha` must be a finite '
                                             'positive number'):
            _ = anomalous_branches(2, 0., 1., 1.)
        with pytest.raises(ValueError, match='`k_max` must be a finite '
                                             'positive number'):
            _ = anomalous_branches(2, 1., 1., -1.)


class CriticalAlphaTestCase(unittest.TestCase):

    def test_m2(self):
        point = critical_alpha(2)
        self.assertLessEqual(abs(point.alpha_critical - 0.7863), 1e-3)
        self.assertLessEqual(abs(point.k_merge - 0.748), 1e-3)
        self.assertLess(point.residual, 1e-10)
        self.assertLess(point.derivative_residual, 1e-10)
        # the fold condition sin(2kL) = 2pkL
        self.assertLess(abs(math.sin(2 * point.k_merge) -
                            2 * anomalous_exponent(2) * point.k_merge), 1e-8)
        self.assertEqual(point.to_dict()['m'], 2)

        # just below the critical coupling two roots remain, just above none
        below = anomalous_real_roots(2, point.alpha_critical - 1e-4, 1.,
                                     math.pi / 2)
        above = anomalous_real_roots(2, point.alpha_critical + 1e-4, 1.,
                                     math.pi / 2)
        self.assertEqual(len(below), 2)
        self.assertEqual(above, [])

    def test_length(self):
        a = critical_alpha(2)
        b = critical_alpha(2, length=2.)
        self.assertAlmostEqual(b.alpha_critical, a.alpha_critical / 2.,
                               places=8)
        self.assertAlmostEqual(b.k_merge, a.k_merge / 2., places=8)
        self.assertLessEqual(abs(b.alpha_critical - 0.7863 / 2.), 5e-4)
        self.assertLessEqual(abs(b.k_merge - 0.748 / 2.), 5e-4)

    def test_m3(self):
        point = critical_alpha(3)
        self.assertLessEqual(abs(point.alpha_critical - 0.8136), 1e-3)
        self.assertLessEqual(abs(point.k_merge - 0.5656), 1e-3)
        self.assertLess(point.residual, 1e-8)
        self.assertLess(point.derivative_residual, 1e-8)
        self.assertLess(abs(math.sin(2 * point.k_merge) -
                            2 * anomalous_exponent(3) * point.k_merge), 1e-8)

    def test_plain_floats(self):
        point = critical_alpha(2, length=2.)
        for value in (point.alpha_critical, point.k_merge, point.length,
                      point.residual, point.derivative_residual):
            self.assertIs(type(value), float)
        self.assertNotIn("float64", repr(point))

    def test_errors(self):
        with pytest.raises(ValueError, match='`m` must be an integer >= 2'):
            _ = critical_alpha(1)
        with pytest.raises(NotFoundError, match='does not drop') as m:
            _ = critical_alpha(2, alpha_range=(0.05, 0.5), scan_points=8)
        self.assertEqual(m.value.details['counts'], [2] * 8)


class AlphaSweepTestCase(unittest.TestCase):

    def test_real_branch(self):
        table = alpha_sweep(2, 1., (0.3, 0.6), 4, k_max=1.5)
        self.assertEqual([row.alpha for row in table.rows],
                         pytest.approx([0.3, 0.4, 0.5, 0.6]))
        for row in table.rows:
            self.assertEqual(len(row.real_roots), 2)
            self.assertEqual(row.complex_roots, [])

        rows = table.to_rows()
        self.assertEqual(len(rows), 8)
        self.assertEqual([r['root_index'] for r in rows[:2]], [0, 1])
        self.assertEqual({r['branch'] for r in rows}, {0})
        self.assertEqual({r['k_imag'] for r in rows}, {0.})
        self.assertEqual(table.to_dict()['m'], 2)

    def test_root_count_parity(self):
        # the first-branch count is 2 below the critical coupling and 0 above
        table = alpha_sweep(2, 1., (0.1, 1.), 91, k_max=1.57)
        alphas = [row.alpha for row in table.rows]
        np.testing.assert_allclose(np.diff(alphas), 0.01, rtol=1e-9)
        counts = [len(row.real_roots) for row in table.rows]
        self.assertEqual(set(counts), {0, 2})
        changes = [i for i in range(1, len(counts))
                   if counts[i] != counts[i - 1]]
        self.assertEqual(len(changes), 1)
        i = changes[0]
        self.assertEqual((counts[i - 1], counts[i]), (2, 0))
        self.assertLess(alphas[i - 1], 0.7864)
        self.assertGreater(alphas[i], 0.7864)

    def test_parallel_deterministic(self):
        a = alpha_sweep(2, 1., (0.3, 0.6), 4, k_max=1.5, n_jobs=1)
        b = alpha_sweep(2, 1., (0.3, 0.6), 4, k_max=1.5, n_jobs=3)
        self.assertEqual(a.to_rows(), b.to_rows())

    @slow_test
    def test_complexified_pair(self):
        table = alpha_sweep(2, 1., (0.7, 0.9), 3, k_max=2.)
        rows = {round(r.alpha, 6): r for r in table.rows}
        self.assertTrue(any(k < math.pi / 2 for k in rows[0.7].real_roots))
        self.assertEqual(rows[0.7].complex_roots, [])

        pair = rows[0.9].complex_roots
        self.assertEqual(len(pair), 2)
        self.assertEqual(pair[0], pair[1].conjugate())
        self.assertGreater(pair[1].imag, 0.)
        self.assertLess(0., pair[1].real)
        self.assertLess(pair[1].real, math.pi / 2)

    def test_invalid(self):
        with pytest.raises(ValueError, match='`steps` must be at least 2'):
            _ = alpha_sweep(2, 1., (0.3, 0.6), 1, k_max=1.)
        with pytest.raises(ValueError, match='Invalid `alpha_range`'):
            _ = alpha_sweep(2, 1., (0.6, 0.3), 3, k_max=1.)
