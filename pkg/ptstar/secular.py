"""
Three independent forms of the secular function of the star graph.

* The tangent sum ``F(k) = sum_j (t - c_j) / (1 + c_j t)``, with
  ``t = tan kL`` and ``c_j = i * alpha * exp(i*j*phi) / k``.
* The closed form ``F = N / D``, regularized into the entire pair::

      N(k) = q sin kL cos kL [k^q cos^{q-2} kL + S sin^{q-2} kL]
      D(k) = k^q cos^q kL - S sin^q kL

  where ``S = sigma * (i * alpha)^q``.  Summing the tangent series term by
  term gives ``S = (-i * alpha)^q``, i.e., ``sigma = (-1)^q``.
* The determinant of the ``2q x 2q`` matching system on ``(A_j, B_j)``.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from typing import *

import numpy as np

from .errors import FormDisagreementError
from .model import StarGraphModel, WaveNumberLike, robin_phase, to_complex
from .utils import parallel_map, sort_complex

if TYPE_CHECKING:
    from .roots import RootSearchRegion

__all__ = [
    'SecularForm', 'SecularConvention', 'SecularValue',
    'closed_form_sign', 'ClosedForm',
    'secular_sum', 'secular_closed_regularized', 'matching_determinant',
    'VerificationRecord', 'VerificationReport', 'cross_verify',
]

logger = getLogger(__name__)

_I_POWERS = (1. + 0j, 1j, -1. + 0j, -1j)


class SecularForm(str, Enum):
    TANGENT_SUM = 'TangentSum'
    CLOSED_REGULARIZED = 'ClosedRegularized'
    DETERMINANT = 'Determinant'


class SecularConvention(str, Enum):
    """Which coefficient `S` the closed form uses."""

    MATCHING = 'matching'
    """``S = sigma * (i * alpha)^q`` with the calibrated sign, whose roots are
    the eigenvalues of the matching conditions."""

    DISPLAYED = 'displayed'
    """For odd `q`, ``S = -alpha^q``, the real-coefficient reading of the
    coupled pair of real subequations (for ``q = 3``, exactly
    ``(k / alpha)^3 = tan kL``).  Identical to `MATCHING` for even `q`."""


@dataclass(frozen=True)
class SecularValue(object):
    value: complex
    form: SecularForm
    pole_flag: bool = False
    scale: float = 1.
    """Magnitude normalizer of `value`."""

    @property
    def indicator(self) -> float:
        return abs(self.value) / self.scale if self.scale > 0 else math.inf


def closed_form_sign(q: int) -> int:
    """
    The sign `sigma` relative to ``(i * alpha)^q`` which makes the closed
    form agree with the tangent sum.

    >>> [closed_form_sign(q) for q in (2, 3, 4, 5)]
    [1, -1, 1, -1]
    """
    return 1 if q % 2 == 0 else -1


class ClosedForm(object):
    """
    The regularized closed form ``(N, D)`` of a model, evaluated on scalars
    or numpy arrays of complex wave numbers.

    >>> form = ClosedForm(StarGraphModel(q=2, alpha=1.))
    >>> form.coefficient
    (-1+0j)
    >>> abs(form.numerator(1.)) < 1e-15
    True
    """

    def __init__(self,
                 model: StarGraphModel,
                 convention: SecularConvention = SecularConvention.MATCHING,
                 sigma: Optional[int] = None):
        convention = SecularConvention(convention)
        if sigma is None:
            sigma = closed_form_sign(model.q)
        if sigma not in (1, -1):
            raise ValueError(f'`sigma` must be +1 or -1: got {sigma!r}')
        self.model = model
        self.convention = convention
        self.sigma = sigma

        q = model.q
        if convention == SecularConvention.DISPLAYED and q % 2 == 1:
            self.coefficient = complex(-model.alpha ** q)
        else:
            self.coefficient = sigma * _I_POWERS[q % 4] * model.alpha ** q

    def __repr__(self):
        return (f'ClosedForm(model={self.model!r}, '
                f'convention={self.convention.value!r}, sigma={self.sigma})')

    def _trig(self, k):
        k = np.asarray(k, dtype=np.complex128)
        kl = k * self.model.length
        return k, np.sin(kl), np.cos(kl)

    def factor_terms(self, k) -> Tuple[np.ndarray, np.ndarray]:
        """
        The two terms ``k^q cos^{q-2} kL`` and ``S sin^{q-2} kL`` of the
        coupling dependent factor of `N`.
        """
        q = self.model.q
        k, s, c = self._trig(k)
        return k ** q * c ** (q - 2), self.coefficient * s ** (q - 2)

    def pair(self, k) -> Tuple[np.ndarray, np.ndarray]:
        """Evaluate ``(N(k), D(k))``."""
        q = self.model.q
        k, s, c = self._trig(k)
        kq = k ** q
        factor = kq * c ** (q - 2) + self.coefficient * s ** (q - 2)
        numerator = q * s * c * factor
        denominator = kq * c ** q - self.coefficient * s ** q
        return numerator, denominator

    def numerator(self, k) -> np.ndarray:
        return self.pair(k)[0]

    def derivative(self, k) -> np.ndarray:
        """Evaluate ``dN / dk`` analytically."""
        q, L, S = self.model.q, self.model.length, self.coefficient
        k, s, c = self._trig(k)
        kq = k ** q
        factor = kq * c ** (q - 2) + S * s ** (q - 2)
        factor_d = q * k ** (q - 1) * c ** (q - 2)
        if q > 2:
            factor_d = (factor_d
                        - (q - 2) * L * kq * c ** (q - 3) * s
                        + S * (q - 2) * L * s ** (q - 3) * c)
        return q * (L * (c * c - s * s) * factor + s * c * factor_d)

    def scale(self, k) -> np.ndarray:
        """Magnitude normalizer of `N`, which bounds ``|N|`` from above."""
        q = self.model.q
        k, s, c = self._trig(k)
        return q * (np.abs(s) + np.abs(c)) ** q * \
            (np.abs(k) ** q + self.model.alpha ** q)

    def indicator(self, k) -> np.ndarray:
        """The root indicator ``|N| / scale``."""
        return np.abs(self.numerator(k)) / self.scale(k)

    def denominator_indicator(self, k) -> np.ndarray:
        """``|D|`` normalized by the same magnitude as :meth:`indicator`."""
        return np.abs(self.pair(k)[1]) * self.model.q / self.scale(k)

    def value(self, k) -> np.ndarray:
        """The unregularized closed form ``N / D``."""
        numerator, denominator = self.pair(k)
        return numerator / denominator


def _check_nonzero(k: complex, pole_guard: float) -> complex:
    if abs(k) < pole_guard:
        raise ValueError(f'`k` must be nonzero: got {k!r}')
    return k


def secular_sum(k: WaveNumberLike,
                model: StarGraphModel,
                pole_guard: float = 1e-6) -> SecularValue:
    """
    Evaluate the tangent sum at `k`.

    >>> model = StarGraphModel(q=2, alpha=1.)
    >>> secular_sum(1., model).indicator < 1e-15
    True
    >>> secular_sum(math.pi / 2, model).pole_flag
    True

    Args:
        k: The (complex) wave number.
        model: The star graph model.
        pole_guard: Relative distance to a pole of ``tan kL`` or of a term
            denominator, below which `pole_flag` is set.

    Returns:
        The secular value, with ``scale = sum_j |term_j|``.
    """
    k = _check_nonzero(to_complex(k), pole_guard)
    kl = k * model.length
    cos_kl = np.cos(kl)
    pole_flag = bool(abs(cos_kl) < pole_guard)
    t = np.sin(kl) / cos_kl if not pole_flag else complex(math.inf)

    total, scale = 0j, 0.
    if not pole_flag:
        for j in range(model.q):
            cj = 1j * model.alpha * robin_phase(j, model) / k
            denominator = 1. + cj * t
            if abs(denominator) < pole_guard * (1. + abs(cj * t)):
                pole_flag = True
                break
            term = (t - cj) / denominator
            total += term
            scale += abs(term)
    if pole_flag:
        return SecularValue(value=complex(math.nan, math.nan),
                            form=SecularForm.TANGENT_SUM, pole_flag=True,
                            scale=math.inf)
    return SecularValue(value=complex(total), form=SecularForm.TANGENT_SUM,
                        pole_flag=False, scale=max(scale, 1e-300))


def secular_closed_regularized(
        k: WaveNumberLike,
        model: StarGraphModel,
        convention: SecularConvention = SecularConvention.MATCHING,
        sigma: Optional[int] = None) -> Tuple[complex, complex]:
    """
    Evaluate the regularized closed form ``(N(k), D(k))``.

    >>> n, d = secular_closed_regularized(
    ...     1., StarGraphModel(q=2, alpha=1.))
    >>> abs(n) < 1e-15, abs(d) > 0.1
    (True, True)
    """
    numerator, denominator = ClosedForm(model, convention, sigma).pair(
        to_complex(k))
    return complex(numerator), complex(denominator)


def matching_matrix(k: complex, model: StarGraphModel) -> np.ndarray:
    """
    Build the row-normalized ``2q x 2q`` matching system on
    ``(A_0, B_0, A_1, B_1, ...)``: `q` Robin rows, ``q - 1`` continuity rows
    and one Kirchhoff row.
    """
    q, L = model.q, model.length
    s, c = np.sin(k * L), np.cos(k * L)
    m = np.zeros([2 * q, 2 * q], dtype=np.complex128)
    for j in range(q):
        m[j, 2 * j] = k
        m[j, 2 * j + 1] = -1j * model.alpha * robin_phase(j, model)
    for j in range(1, q):
        row = q + j - 1
        m[row, 2 * j], m[row, 2 * j + 1] = s, c
        m[row, 0], m[row, 1] = -s, -c
    m[2 * q - 1, 0::2] = k * c
    m[2 * q - 1, 1::2] = -k * s
    m /= np.max(np.abs(m), axis=1, keepdims=True)
    return m


def matching_determinant(k: WaveNumberLike, model: StarGraphModel) -> complex:
    """
    Determinant of the row-normalized matching system at `k`.  It vanishes
    exactly at the eigenvalues.

    >>> model = StarGraphModel(q=2, alpha=1.)
    >>> abs(matching_determinant(math.pi / 2, model)) < 1e-10
    True
    >>> abs(matching_determinant(2., model)) > 1e-3
    True
    """
    k = to_complex(k)
    if k == 0:
        raise ValueError('`k` must be nonzero.')
    return complex(np.linalg.det(matching_matrix(k, model)))


# ---- cross verification ----
@dataclass(frozen=True)
class VerificationRecord(object):
    k: complex
    sum_value: complex
    closed_value: complex
    sum_indicator: float
    closed_indicator: float
    agree: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'sum_value': self.sum_value,
            'closed_value': self.closed_value,
            'sum_indicator': self.sum_indicator,
            'closed_indicator': self.closed_indicator,
            'agree': self.agree,
        }


@dataclass
class VerificationReport(object):
    q: int
    alpha: float
    length: float
    sigma: int
    samples: int
    records: List[VerificationRecord] = field(default_factory=list)

    @property
    def disagreements(self) -> List[VerificationRecord]:
        return [r for r in self.records if not r.agree]

    @property
    def passed(self) -> bool:
        return not self.disagreements

    def to_dict(self, include_records: bool = False) -> Dict[str, Any]:
        ret = {
            'q': self.q,
            'alpha': self.alpha,
            'length': self.length,
            'sigma': self.sigma,
            'samples': self.samples,
            'disagreements': [r.to_dict() for r in self.disagreements],
        }
        if include_records:
            ret['records'] = [r.to_dict() for r in self.records]
        return ret


def _draw_samples(model: StarGraphModel,
                  region: 'RootSearchRegion',
                  samples: int,
                  seed: int,
                  pole_guard: float) -> List[complex]:
    rng = np.random.default_rng(seed)
    form = ClosedForm(model)
    ret = []
    attempts = 0
    while len(ret) < samples:
        attempts += 1
        if attempts > 100 * samples:
            raise ValueError('Cannot draw pole-guarded samples from the '
                             'region: too many rejections.')
        k = complex(rng.uniform(region.mu_min, region.mu_max),
                    rng.uniform(region.nu_min, region.nu_max))
        if abs(k) < pole_guard or \
                secular_sum(k, model, pole_guard).pole_flag or \
                form.denominator_indicator(k) < pole_guard:
            continue
        ret.append(k)
    return ret


def _compare_forms(k: complex,
                   model: StarGraphModel,
                   form: ClosedForm,
                   pole_guard: float,
                   value_tol: float,
                   indicator_tol: float) -> VerificationRecord:
    sv = secular_sum(k, model, pole_guard)
    closed_value = complex(form.value(k))
    closed_indicator = float(form.indicator(k))
    sum_fires = sv.indicator <= indicator_tol
    closed_fires = closed_indicator <= indicator_tol
    if sum_fires and closed_fires:
        agree = True
    else:
        diff = abs(sv.value - closed_value)
        agree = (sum_fires == closed_fires) and \
            diff <= value_tol * (sv.scale + abs(closed_value))
    return VerificationRecord(
        k=k,
        sum_value=sv.value,
        closed_value=closed_value,
        sum_indicator=float(sv.indicator),
        closed_indicator=closed_indicator,
        agree=bool(agree),
    )


def cross_verify(model: StarGraphModel,
                 region: 'RootSearchRegion',
                 samples: int = 200,
                 seed: int = 0,
                 extra_points: Iterable[WaveNumberLike] = (),
                 pole_guard: float = 1e-6,
                 value_tol: float = 1e-8,
                 indicator_tol: float = 1e-8,
                 n_jobs: Optional[int] = None,
                 raise_on_disagreement: bool = True) -> VerificationReport:
    """
    Certify the equivalence of the tangent sum and the closed form on
    random pole-guarded samples drawn from `region`.

    Both signs ``sigma = +1, -1`` are tried; the sign which makes the two
    forms agree is reported.  Every sample then has to agree on the root
    indicators, and, away from roots, on the values of ``F`` and ``N / D``.

    Args:
        model: The star graph model.
        region: The sampling rectangle (``mu_min``, ``mu_max``, ``nu_min``,
            ``nu_max`` are used).
        samples: Number of random samples.
        seed: Seed of the random generator.
        extra_points: Additional sample points, e.g., known roots.
        pole_guard: See :func:`secular_sum`.
        value_tol: Relative tolerance of the value comparison.
        indicator_tol: Threshold of the root indicators.
        n_jobs: Number of worker threads.
        raise_on_disagreement: Whether or not to raise
            :class:`FormDisagreementError` if any sample disagrees?

    Returns:
        The verification report, with records sorted by sample point.
    """
    points = _draw_samples(model, region, samples, seed, pole_guard)
    points.extend(to_complex(k) for k in extra_points)
    points = sort_complex(points)

    reports = {}
    for sigma in (closed_form_sign(model.q), -closed_form_sign(model.q)):
        form = ClosedForm(model, sigma=sigma)
        records = parallel_map(
            lambda k: _compare_forms(
                k, model, form, pole_guard, value_tol, indicator_tol),
            points, n_jobs=n_jobs
        )
        reports[sigma] = VerificationReport(
            q=model.q, alpha=model.alpha, length=model.length, sigma=sigma,
            samples=len(points), records=records,
        )
        logger.debug('sigma=%+d: %d of %d samples disagree.', sigma,
                     len(reports[sigma].disagreements), len(points))
        if reports[sigma].passed:
            break

    report = min(reports.values(), key=lambda r: len(r.disagreements))
    if report.passed:
        logger.info('Forms agree on %d samples for q=%d with sigma=%+d.',
                    report.samples, model.q, report.sigma)
    elif raise_on_disagreement:
        raise FormDisagreementError(
            f'The tangent sum and the closed form disagree on '
            f'{len(report.disagreements)} of {report.samples} samples '
            f'for q={model.q}.',
            **report.to_dict()
        )
    return report
