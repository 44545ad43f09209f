import math
import unittest

import numpy as np
import pytest

from ptstar import *

# the first positive root of tan(x) = x
TAN_FIXED_POINT = 4.493409457909064


class StarGraphModelTestCase(unittest.TestCase):

    def test_construction(self):
        model = StarGraphModel(q=6, alpha=2, length=0.5)
        self.assertEqual(model.q, 6)
        self.assertIsInstance(model.alpha, float)
        self.assertAlmostEqual(model.phi, math.pi / 3)
        self.assertEqual(model.coupling, 1.)
        self.assertEqual(model.anomalous_m, 2)
        self.assertIsNone(StarGraphModel(q=4, alpha=1.).anomalous_m)
        self.assertEqual(model.to_dict(),
                         {'q': 6, 'alpha': 2.0, 'length': 0.5})

        model = StarGraphModel.from_coupling(q=7, coupling=1., length=2.)
        self.assertEqual(model.alpha, 0.5)
        self.assertEqual(model.coupling, 1.)

        for kwargs in [dict(q=1, alpha=1.), dict(q=2.5, alpha=1.),
                       dict(q=True, alpha=1.)]:
            with pytest.raises(ValueError, match='`q` must be an integer'):
                _ = StarGraphModel(**kwargs)
        for alpha in [0., -1., math.inf, math.nan]:
            with pytest.raises(ValueError, match='`alpha` must be a finite'):
                _ = StarGraphModel(q=3, alpha=alpha)
        with pytest.raises(ValueError, match='`length` must be a finite'):
            _ = StarGraphModel(q=3, alpha=1., length=0.)

    def test_complex_wave_number(self):
        k = ComplexWaveNumber.from_complex(1.5 - 0.5j)
        self.assertEqual((k.mu, k.nu), (1.5, -0.5))
        self.assertFalse(k.is_real)
        self.assertTrue(ComplexWaveNumber(2.).is_real)
        self.assertEqual(complex(k), 1.5 - 0.5j)
        self.assertEqual(k.energy, (1.5 - 0.5j) ** 2)
        self.assertEqual(to_complex(k), 1.5 - 0.5j)
        with pytest.raises(ValueError, match='must be finite'):
            _ = ComplexWaveNumber(math.nan, 0.)


class ModelConfigTestCase(unittest.TestCase):

    def test_alpha_and_lambda(self):
        cfg = validate_config(ModelConfig(q=3))
        self.assertEqual(cfg.alpha, 1.)

        cfg = validate_config(ModelConfig(q=7, lambda_=1., length=2.))
        self.assertEqual(cfg.to_model(),
                         StarGraphModel(q=7, alpha=0.5, length=2.))

        cfg = validate_config(ModelConfig(q=7, alpha=0.5, lambda_=1.,
                                          length=2.))
        self.assertEqual(cfg.alpha, 0.5)

        with pytest.raises(ConfigValidationError,
                           match='`alpha` and `lambda_` are both specified '
                                 'and do not agree'):
            _ = validate_config(ModelConfig(q=7, alpha=1., lambda_=2.))

    def test_invalid(self):
        with pytest.raises(ConfigValidationError,
                           match='`q` must be at least 2'):
            _ = validate_config(ModelConfig(q=1))
        with pytest.raises(ConfigValidationError,
                           match='`alpha` must be a finite positive number'):
            _ = validate_config(ModelConfig(alpha=-1.))
        with pytest.raises(ConfigValidationError,
                           match='tolerance `merge` must be positive'):
            _ = validate_config(ToleranceConfig(merge=0.))


class BoundaryCoefficientsTestCase(unittest.TestCase):

    def test_robin_phase(self):
        model = StarGraphModel(q=4, alpha=1.)
        self.assertAlmostEqual(robin_phase(1, model), 1j)
        self.assertAlmostEqual(robin_phase(2, model), -1.)
        for j in range(4):
            self.assertAlmostEqual(abs(robin_phase(j, model)), 1.)

        with pytest.raises(IndexError, match='edge index out of range'):
            _ = robin_phase(-1, model)
        with pytest.raises(IndexError, match='edge index out of range'):
            _ = robin_phase(1.5, model)

    def test_ck_coefficients(self):
        model = StarGraphModel(q=4, alpha=1.)
        c, k = ck_coefficients(0, 2., model)
        self.assertEqual((c, k), (-0.0, 0.5))
        c, k = ck_coefficients(2, 2., model)
        self.assertAlmostEqual(c, 0.)
        self.assertAlmostEqual(k, -0.5)

        # C + iK = i * alpha * exp(i*j*phi) / k
        for j in range(4):
            c, k = ck_coefficients(j, 3., model)
            self.assertAlmostEqual(
                complex(c, k), 1j * robin_phase(j, model) / 3.)

        with pytest.raises(ZeroDivisionError):
            _ = ck_coefficients(0, 0., model)
        with pytest.raises(ValueError, match='`k` must be real'):
            _ = ck_coefficients(0, 1. + 1j, model)


class EigenfunctionTestCase(unittest.TestCase):

    def test_square_well_root(self):
        model = StarGraphModel(q=2, alpha=1.)
        ef = assemble_eigenfunction(1., model)
        self.assertLess(ef.max_residual, 1e-12)
        self.assertEqual(ef.root, ComplexWaveNumber(1.))
        self.assertEqual(len(ef.coefficients), 2)

        # continuity at the center, Robin condition at the outer ends
        np.testing.assert_allclose(
            [ef.evaluate(j, 1.) for j in range(2)], [1., 1.], atol=1e-12)
        for j in range(2):
            self.assertAlmostEqual(
                ef.derivative(j, 0.),
                1j * model.alpha * robin_phase(j, model) * ef.evaluate(j, 0.))
        self.assertAlmostEqual(
            sum(ef.derivative(j, 1.) for j in range(2)), 0.)

        d = ef.to_dict()
        self.assertEqual(d['root'], 1.)
        self.assertEqual([c['edge'] for c in d['coefficients']], [0, 1])
        self.assertEqual(set(d['residuals']),
                         {'robin', 'continuity', 'kirchhoff'})

    def test_rho_scaling(self):
        model = StarGraphModel(q=2, alpha=0.7)
        ef1 = assemble_eigenfunction(0.7, model)
        ef2 = assemble_eigenfunction(0.7, model, rho=2. - 1j)
        for (a1, b1), (a2, b2) in zip(ef1.coefficients, ef2.coefficients):
            self.assertAlmostEqual(a2, (2. - 1j) * a1)
            self.assertAlmostEqual(b2, (2. - 1j) * b1)

    def test_errors(self):
        model = StarGraphModel(q=2, alpha=1.)
        with pytest.raises(ConsistencyError, match='is not a root') as m:
            _ = assemble_eigenfunction(0.3, model)
        self.assertGreater(m.value.residual, 1e-8)
        self.assertEqual(m.value.to_dict()['error'], 'ConsistencyError')

        with pytest.raises(ValueError, match='`k` must be nonzero'):
            _ = assemble_eigenfunction(0., model)
        with pytest.raises(ValueError, match='`rho` must be nonzero'):
            _ = assemble_eigenfunction(1., model, rho=0.)

        # the bracket of edge 1 is `k cos k - sin k` for q = 4
        model = StarGraphModel(q=4, alpha=1.)
        with pytest.raises(DegenerateConfigurationError,
                           match='The continuity bracket of edge 1 '
                                 'vanishes') as m:
            _ = assemble_eigenfunction(TAN_FIXED_POINT, model)
        self.assertEqual(m.value.details['edge'], 1)

    def test_pt_image(self):
        model = StarGraphModel(q=2, alpha=1.)
        ef = assemble_eigenfunction(1., model, rho=1. + 0.5j)
        image = pt_image(ef)
        self.assertEqual(image.root, ef.root.conjugate())
        self.assertEqual(image.rho, 1. - 0.5j)
        self.assertLess(image.max_residual, 1e-12)
        self.assertEqual(image.coefficients[0],
                         (ef.coefficients[1][0].conjugate(),
                          ef.coefficients[1][1].conjugate()))


class SymmetryTestCase(unittest.TestCase):

    def test_pt_symmetry(self):
        self.assertTrue(is_pt_symmetric(StarGraphModel(q=4, alpha=1.)))
        self.assertFalse(is_pt_symmetric(StarGraphModel(q=5, alpha=1.)))
        self.assertEqual(parity_permutation(StarGraphModel(q=4, alpha=1.)),
                         (2, 1, 0, 3))
        with pytest.raises(ValueError, match='is not PT-symmetric'):
            _ = parity_permutation(StarGraphModel(q=3, alpha=1.))

    def test_square_well(self):
        np.testing.assert_allclose(
            square_well_levels(0.5, 1., 2),
            [0.25, (math.pi / 2) ** 2, math.pi ** 2])
        self.assertTrue(is_degenerate_square_well(math.pi, 1.))
        self.assertFalse(is_degenerate_square_well(0.5, 1.))
        with pytest.raises(ValueError, match='`n_max` must be non-negative'):
            _ = square_well_levels(1., 1., -1)
