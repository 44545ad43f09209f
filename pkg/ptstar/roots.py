import math
from dataclasses import dataclass, field, replace
from logging import getLogger
from typing import *

import numpy as np
from scipy.optimize import brentq
from scipy.ndimage import minimum_filter

from .config import Config, root_checker
from .errors import CertificationError
from .model import (ComplexWaveNumber, RootClassification, RootKind,
                    StarGraphModel, WaveNumberLike, to_complex)
from .secular import ClosedForm, SecularConvention, matching_determinant
from .utils import merge_close_values, parallel_map, sort_complex

__all__ = [
    'RootSearchRegion', 'RegionConfig', 'SpectrumResult', 'NewtonResult',
    'ResidualCurves', 'is_conjugation_closed', 'is_real_root_value',
    'newton_polish', 'real_spectrum', 'complex_roots',
    'count_roots_in_region', 'winding_count', 'triple_residual',
    'residual_curves', 'solve_region',
]

logger = getLogger(__name__)

# roots with |k| below this are the zero of N at the origin, not eigenvalues
ORIGIN_RADIUS = 1e-8

# max number of step halvings in the damped Newton iteration
MAX_HALVINGS = 60


@dataclass(frozen=True)
class RootSearchRegion(object):
    """
    A rectangle in the ``(mu, nu)`` plane, plus the seed grid density and
    the tolerances of a root search.

    >>> region = RootSearchRegion(0.5, 2., -1., 1.)
    >>> region.contains(1.2 + 0.35j)
    True
    >>> region.is_conjugation_symmetric
    True
    >>> RootSearchRegion(1., 1., 0., 1.)
    Traceback (most recent call last):
        ...
    ValueError: Invalid region: require mu_min < mu_max and nu_min < nu_max, got mu=[1.0, 1.0], nu=[0.0, 1.0]
    """

    mu_min: float
    mu_max: float
    nu_min: float
    nu_max: float
    grid_mu: int = 64
    grid_nu: int = 64
    tol_root: float = 1e-8
    max_iter: int = 60

    def __post_init__(self):
        for name in ('mu_min', 'mu_max', 'nu_min', 'nu_max', 'tol_root'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f'`{name}` must be finite: got {value!r}')
            object.__setattr__(self, name, value)
        if not (self.mu_min < self.mu_max and self.nu_min < self.nu_max):
            raise ValueError(
                f'Invalid region: require mu_min < mu_max and '
                f'nu_min < nu_max, got mu=[{self.mu_min!r}, {self.mu_max!r}], '
                f'nu=[{self.nu_min!r}, {self.nu_max!r}]')
        if self.grid_mu < 2 or self.grid_nu < 2:
            raise ValueError(f'Grid densities must be at least 2: got '
                             f'grid_mu={self.grid_mu!r}, '
                             f'grid_nu={self.grid_nu!r}')
        if not self.tol_root > 0:
            raise ValueError(f'`tol_root` must be positive: '
                             f'got {self.tol_root!r}')
        if self.max_iter < 1:
            raise ValueError(f'`max_iter` must be at least 1: '
                             f'got {self.max_iter!r}')

    @property
    def width(self) -> float:
        return self.mu_max - self.mu_min

    @property
    def height(self) -> float:
        return self.nu_max - self.nu_min

    @property
    def is_conjugation_symmetric(self) -> bool:
        return self.nu_min == -self.nu_max

    @property
    def contains_real_axis(self) -> bool:
        return self.nu_min <= 0. <= self.nu_max

    def contains(self, k: WaveNumberLike, margin: float = 0.) -> bool:
        k = to_complex(k)
        return (self.mu_min - margin <= k.real <= self.mu_max + margin and
                self.nu_min - margin <= k.imag <= self.nu_max + margin)

    def inflate(self, margin: float) -> 'RootSearchRegion':
        """Enlarge the rectangle by `margin` on every side."""
        mu_min = self.mu_min - margin
        if self.mu_min > 0. >= mu_min:
            mu_min = self.mu_min / 2.
        return replace(self, mu_min=mu_min, mu_max=self.mu_max + margin,
                       nu_min=self.nu_min - margin,
                       nu_max=self.nu_max + margin)

    def refined(self, factor: int) -> 'RootSearchRegion':
        """Multiply the seed grid densities by `factor`."""
        return replace(self, grid_mu=self.grid_mu * factor,
                       grid_nu=self.grid_nu * factor)

    def grid(self) -> Tuple[np.ndarray, np.ndarray]:
        """The seed grid ``(mu, nu)``, both of shape ``[grid_nu, grid_mu]``."""
        return np.meshgrid(
            np.linspace(self.mu_min, self.mu_max, self.grid_mu),
            np.linspace(self.nu_min, self.nu_max, self.grid_nu),
        )

    def boundary(self, points_per_side: int) -> np.ndarray:
        """Counter-clockwise boundary path, closed (last point = first)."""
        corners = [complex(self.mu_min, self.nu_min),
                   complex(self.mu_max, self.nu_min),
                   complex(self.mu_max, self.nu_max),
                   complex(self.mu_min, self.nu_max)]
        t = np.linspace(0., 1., points_per_side, endpoint=False)
        sides = [a + (b - a) * t
                 for a, b in zip(corners, corners[1:] + corners[:1])]
        return np.concatenate(sides + [np.array([corners[0]])])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mu_min': self.mu_min, 'mu_max': self.mu_max,
            'nu_min': self.nu_min, 'nu_max': self.nu_max,
            'grid_mu': self.grid_mu, 'grid_nu': self.grid_nu,
            'tol_root': self.tol_root, 'max_iter': self.max_iter,
        }


class RegionConfig(Config):
    mu_min: float = 0.5
    mu_max: float = 2.
    nu_min: float = -1.
    nu_max: float = 1.
    grid_mu: int = 64
    grid_nu: int = 64
    tol_root: float = 1e-8
    max_iter: int = 60

    @root_checker()
    def _check_region(cls, values):
        RootSearchRegion(**values)

    def to_region(self) -> RootSearchRegion:
        return RootSearchRegion(
            mu_min=self.mu_min, mu_max=self.mu_max,
            nu_min=self.nu_min, nu_max=self.nu_max,
            grid_mu=self.grid_mu, grid_nu=self.grid_nu,
            tol_root=self.tol_root, max_iter=self.max_iter,
        )


@dataclass
class SpectrumResult(object):
    """Classified roots located in a region."""

    model: StarGraphModel
    real_roots: List[Tuple[float, RootClassification]]
    complex_roots: List[Tuple[ComplexWaveNumber, float]]
    region: Optional[RootSearchRegion] = None
    count_certificate: Optional[int] = None
    effective_region: Optional[RootSearchRegion] = None
    """The (possibly inflated) region over which the certificate holds."""
    winding: Optional[int] = None
    """The raw winding count, reported even if it does not certify."""
    multiplicities: Dict[complex, int] = field(default_factory=dict)
    convention: SecularConvention = SecularConvention.MATCHING

    @property
    def located_count(self) -> int:
        """Number of located roots, counted with multiplicity."""
        keys = [complex(k) for k, _ in self.real_roots] + \
            [k.value for k, _ in self.complex_roots]
        return sum(self.multiplicities.get(k, 1) for k in keys)

    @property
    def residuals(self) -> List[float]:
        return [c.residual for _, c in self.real_roots] + \
            [r for _, r in self.complex_roots]

    def to_rows(self) -> List[Dict[str, Any]]:
        """One row per root: ``mu, nu, kind, residual``."""
        rows = [{'mu': k, 'nu': 0., 'kind': c.kind.value,
                 'residual': c.residual}
                for k, c in self.real_roots]
        rows.extend({'mu': k.mu, 'nu': k.nu,
                     'kind': RootKind.COMPLEX_PAIR.value, 'residual': r}
                    for k, r in self.complex_roots)
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            'real_roots': [
                {'k': k, 'kind': c.kind.value, 'residual': c.residual,
                 'flag': c.flag, 'verified': c.verified}
                for k, c in self.real_roots
            ],
            'complex_roots': [
                {'mu': k.mu, 'nu': k.nu, 'residual': r}
                for k, r in self.complex_roots
            ],
            'region': self.region.to_dict() if self.region else None,
            'effective_region': (self.effective_region.to_dict()
                                 if self.effective_region else None),
            'count_certificate': self.count_certificate,
            'winding': self.winding,
            'convention': self.convention.value,
        }


@dataclass(frozen=True)
class NewtonResult(object):
    k: complex
    indicator: float
    iterations: int
    converged: bool


def is_conjugation_closed(model: StarGraphModel,
                          convention: SecularConvention =
                          SecularConvention.MATCHING) -> bool:
    """
    Whether the roots of `N` are closed under complex conjugation, which
    holds iff the closed form coefficient `S` is real.
    """
    return model.q % 2 == 0 or \
        SecularConvention(convention) == SecularConvention.DISPLAYED


def is_real_root_value(k: complex) -> bool:
    """Whether `k` lies on the real axis, within ``1e-8 * max(1, |k|)``."""
    return abs(k.imag) <= 1e-8 * max(1., abs(k))


def newton_polish(form: ClosedForm,
                  k0: complex,
                  tol: float = 1e-8,
                  max_iter: int = 60) -> NewtonResult:
    """
    Polish a root of `N` from the seed `k0` by damped Newton iteration.

    The step is halved while the root indicator ``|N| / scale`` increases.
    The iteration stops when the step falls below double precision
    resolution, and the result is regarded as converged if the indicator
    is below `tol`.

    >>> form = ClosedForm(StarGraphModel(q=2, alpha=1.))
    >>> ret = newton_polish(form, 1.1 + 0.01j)
    >>> ret.converged, abs(ret.k - 1.) < 1e-12
    (True, True)
    """
    k = complex(k0)
    indicator = float(form.indicator(k))
    for it in range(1, max_iter + 1):
        derivative = complex(form.derivative(k))
        if derivative == 0 or not math.isfinite(abs(derivative)):
            break
        step = complex(form.numerator(k)) / derivative
        for _ in range(MAX_HALVINGS):
            candidate = k - step
            cand_indicator = float(form.indicator(candidate))
            if cand_indicator <= indicator or indicator == 0.:
                break
            step /= 2.
        else:
            break
        if not math.isfinite(cand_indicator):
            break
        k, indicator = candidate, cand_indicator
        if abs(step) <= 4. * np.finfo(np.float64).eps * max(1., abs(k)):
            break
    return NewtonResult(k=k, indicator=indicator, iterations=it,
                        converged=bool(indicator <= tol))


def _classify_real_roots(roots: List[Tuple[float, RootKind, Optional[str]]],
                         form: ClosedForm,
                         merge_radius: float
                         ) -> List[Tuple[float, RootClassification]]:
    roots = sorted(roots, key=lambda r: r[0])
    ret = []
    for i, (k, kind, flag) in enumerate(roots):
        close = (i > 0 and k - roots[i - 1][0] <= merge_radius) or \
            (i + 1 < len(roots) and roots[i + 1][0] - k <= merge_radius)
        if close and flag is None:
            flag = 'cluster'
        ret.append((k, RootClassification(
            kind=kind, residual=float(form.indicator(k)), flag=flag)))
    return ret


def _generic_real_roots(model: StarGraphModel,
                        k_min: float,
                        k_max: float) -> List[float]:
    step = math.pi / (2. * model.length)
    n_start = max(1, math.ceil(k_min / step - 1e-12))
    ret = []
    n = n_start
    while n * step <= k_max * (1. + 1e-12):
        ret.append(n * step)
        n += 1
    return ret


def real_spectrum(model: StarGraphModel,
                  k_max: float,
                  tol: float = 1e-10,
                  determinant_threshold: float = 1e-8,
                  merge: float = 1e-6
                  ) -> List[Tuple[float, RootClassification]]:
    """
    All real roots in ``(0, k_max]``.

    These are the generic roots ``kL = n * pi / 2``, together with the
    anomalous roots of the coupling dependent factor when ``q = 4m - 2``
    (``k = alpha`` for ``q = 2``).

    >>> roots = real_spectrum(StarGraphModel(q=3, alpha=1.), k_max=4.)
    >>> [round(k, 6) for k, _ in roots]
    [1.570796, 3.141593]

    Args:
        model: The star graph model.
        k_max: The upper end of the search interval.
        tol: Tolerance of the root indicator ``|N| / scale``.
        determinant_threshold: Threshold of the matching determinant.
        merge: Roots closer than ``merge * pi / L`` are flagged.

    Returns:
        List of ``(k, classification)``, sorted ascending.  A root failing
        the residual or determinant check has ``verified=False``.
    """
    from .anomalous import anomalous_branches

    if not k_max > 0:
        raise ValueError(f'`k_max` must be positive: got {k_max!r}')
    form = ClosedForm(model)
    roots = [(k, RootKind.GENERIC_REAL, None)
             for k in _generic_real_roots(model, 0., k_max)]
    m = model.anomalous_m
    if m is not None:
        for branch in anomalous_branches(m, model.alpha, model.length,
                                         k_max, merge=merge):
            roots.extend((k, RootKind.ANOMALOUS_REAL,
                          'double-root' if branch.double_root else None)
                         for k in branch.roots)

    merge_radius = merge * math.pi / model.length
    ret = []
    for k, classification in _classify_real_roots(roots, form, merge_radius):
        verified = True
        if classification.residual > tol:
            verified = False
            logger.warning('Real root k=%r has residual %.3g above the '
                           'tolerance %.3g.', k, classification.residual, tol)
        det = abs(matching_determinant(k, model))
        if det > determinant_threshold:
            verified = False
            logger.warning('The matching determinant at the real root k=%r '
                           'is %.3g, above the threshold %.3g.',
                           k, det, determinant_threshold)
        ret.append((k, replace(classification, verified=verified)))
    logger.info('Found %d real roots in (0, %g] for q=%d, alpha=%g.',
                len(ret), k_max, model.q, model.alpha)
    return ret


def _grid_seeds(form: ClosedForm, region: RootSearchRegion) -> List[complex]:
    mu, nu = region.grid()
    k = mu + 1j * nu
    with np.errstate(all='ignore'):
        values = form.indicator(k)
    values = np.where(np.isfinite(values), values, np.inf)
    is_minimum = np.isfinite(values) & \
        (values <= minimum_filter(values, size=3, mode='nearest'))
    seeds = [complex(s) for s in k[is_minimum] if abs(s) > ORIGIN_RADIUS]
    logger.debug('%d seeds from a %dx%d grid.', len(seeds), region.grid_mu,
                 region.grid_nu)
    return seeds


def _check_triple(form: ClosedForm, k: complex, tol: float) -> bool:
    if form.model.q < 3:
        return True
    return max(_triple_residual(form, k)) <= tol


def complex_roots(model: StarGraphModel,
                  region: RootSearchRegion,
                  convention: SecularConvention = SecularConvention.MATCHING,
                  triple_tol: float = 1e-6,
                  determinant_threshold: float = 1e-8,
                  n_jobs: Optional[int] = None
                  ) -> List[Tuple[ComplexWaveNumber, float]]:
    """
    Locate the roots of `N` off the real axis inside `region`.

    Seeds are the local minima of ``|N| / scale`` on the region grid, each
    polished by :func:`newton_polish`.  Converged roots are validated by
    :func:`triple_residual` and, under the matching convention, by the
    matching determinant; duplicates within ``10 * tol_root / L`` are
    merged.  If the roots are closed under conjugation, the partner of
    every root inside the region is polished as well.

    Args:
        model: The star graph model.
        region: The search region.
        convention: The closed form convention.
        triple_tol: Tolerance of the triple residual.
        determinant_threshold: Threshold of the matching determinant.
        n_jobs: Number of worker threads.

    Returns:
        List of ``(k, residual)``, sorted by `mu`, then by `nu`.
    """
    convention = SecularConvention(convention)
    form = ClosedForm(model, convention)
    tol = region.tol_root
    margin = 1e-9 * max(1., abs(region.mu_max), abs(region.nu_max))

    def polish(seed):
        return newton_polish(form, seed, tol=tol, max_iter=region.max_iter)

    def accept(ret: NewtonResult) -> bool:
        k = ret.k
        if not ret.converged or abs(k) <= ORIGIN_RADIUS or \
                is_real_root_value(k) or not region.contains(k, margin):
            return False
        if not _check_triple(form, k, triple_tol):
            logger.warning('Discarded k=%r: triple residual above %.3g.',
                           k, triple_tol)
            return False
        if convention == SecularConvention.MATCHING or model.q % 2 == 0:
            det = abs(matching_determinant(k, model))
            if det > determinant_threshold:
                logger.warning('Discarded k=%r: matching determinant %.3g '
                               'above %.3g.', k, det, determinant_threshold)
                return False
        return True

    results = parallel_map(polish, _grid_seeds(form, region), n_jobs=n_jobs)
    discarded = sum(not r.converged for r in results)
    if discarded:
        logger.debug('%d seeds did not converge and were discarded.',
                     discarded)
    found = [r.k for r in results if accept(r)]
    radius = 10. * tol / model.length
    found = merge_close_values(sort_complex(found), radius)

    if is_conjugation_closed(model, convention):
        partners = [k.conjugate() for k in found
                    if region.contains(k.conjugate(), margin) and
                    all(abs(k.conjugate() - w) > radius for w in found)]
        for r in parallel_map(polish, partners, n_jobs=n_jobs):
            if accept(r):
                found.append(r.k)
        found = merge_close_values(sort_complex(found), radius)

    ret = [(ComplexWaveNumber.from_complex(k), float(form.indicator(k)))
           for k in sort_complex(found)]
    for k, r in ret:
        logger.info('Complex root k=%.10g%+.10gi (residual %.3g).',
                    k.mu, k.nu, r)
    return ret


def _winding(form: ClosedForm,
             path: np.ndarray,
             max_depth: int = 40) -> Optional[float]:
    """
    Total change of ``arg N`` along `path`, divided by ``2 * pi``.

    A segment is bisected while the phase step across it exceeds ``pi / 4``.
    Returns :obj:`None` if `N` vanishes on the path or the bisection depth
    is exhausted.
    """
    values = np.asarray(form.numerator(path), dtype=np.complex128)
    total = 0.
    for i in range(len(path) - 1):
        stack = [(path[i], path[i + 1], values[i], values[i + 1], max_depth)]
        while stack:
            a, b, fa, fb, depth = stack.pop()
            if fa == 0 or fb == 0 or not (np.isfinite(fa) and np.isfinite(fb)):
                return None
            delta = float(np.angle(fb / fa))
            if abs(delta) <= math.pi / 4:
                total += delta
                continue
            if depth == 0:
                return None
            mid = (a + b) / 2.
            fm = complex(form.numerator(mid))
            stack.append((mid, b, fm, fb, depth - 1))
            stack.append((a, mid, fa, fm, depth - 1))
    return total / (2. * math.pi)


def _origin_order(model: StarGraphModel) -> int:
    # N ~ q * S * L^(q-1) * k^(q-1) near k = 0
    return model.q - 1


def winding_count(model: StarGraphModel,
                  region: RootSearchRegion,
                  convention: SecularConvention = SecularConvention.MATCHING,
                  boundary_tol: float = 1e-6,
                  max_inflations: int = 4
                  ) -> Tuple[int, RootSearchRegion]:
    """
    Count the zeros of `N` inside `region` by the argument principle.

    If `N` nearly vanishes on the boundary, or the winding number cannot be
    resolved, the region is inflated by a small margin and the count is
    retried.  The zero of `N` at the origin, if enclosed, is not counted.

    Returns:
        The count, and the (possibly inflated) region it holds for.

    Raises:
        CertificationError: If the count is still unavailable after
            `max_inflations` inflations.
    """
    form = ClosedForm(model, convention)
    points = 4 * max(region.grid_mu, region.grid_nu, 16)
    current = region
    margin = 1e-2 * max(region.width, region.height)
    for attempt in range(max_inflations + 1):
        path = current.boundary(points)
        with np.errstate(all='ignore'):
            boundary_min = float(np.nanmin(form.indicator(path)))
        turns = None
        if boundary_min >= boundary_tol:
            turns = _winding(form, path)
        if turns is not None and abs(turns - round(turns)) < 0.1:
            count = int(round(turns))
            if current.contains(0.) and not (
                    current.mu_min == 0. or current.nu_min == 0. or
                    current.nu_max == 0. or current.mu_max == 0.):
                count -= _origin_order(model)
            if attempt:
                logger.warning('Region inflated %d time(s) to certify the '
                               'root count: %r.', attempt, current)
            logger.info('Winding count %d for q=%d.', count, model.q)
            return count, current
        logger.debug('Winding count unavailable (boundary min %.3g, turns '
                     '%r); inflating the region.', boundary_min, turns)
        current = current.inflate(margin)
        margin *= 2.
    raise CertificationError(
        f'The winding count is unavailable after {max_inflations} '
        f'inflations of the region.',
        q=model.q, alpha=model.alpha, length=model.length,
        region=region.to_dict())


def count_roots_in_region(model: StarGraphModel,
                          region: RootSearchRegion,
                          convention: SecularConvention =
                          SecularConvention.MATCHING) -> int:
    """
    Number of zeros of `N` inside `region`, counted with multiplicity.

    >>> count_roots_in_region(StarGraphModel(q=2, alpha=1.),
    ...                       RootSearchRegion(0.5, 2., -0.5, 0.5))
    2
    """
    return winding_count(model, region, convention)[0]


def _multiplicity(form: ClosedForm, k: complex, radius: float) -> int:
    r = radius / 2.
    square = RootSearchRegion(k.real - r, k.real + r, k.imag - r, k.imag + r,
                              grid_mu=4, grid_nu=4)
    turns = _winding(form, square.boundary(16))
    if turns is None or abs(turns - round(turns)) >= 0.1 or round(turns) < 1:
        return 1
    return int(round(turns))


def _triple_residual(form: ClosedForm, k) -> Tuple[Any, Any, Any]:
    left, right = form.factor_terms(k)
    factor = left + right
    scale = np.abs(left) + np.abs(right)
    scale = np.where(scale > 0, scale, np.finfo(np.float64).tiny)
    return (np.abs(factor.real) / scale,
            np.abs(factor.imag) / scale,
            np.abs(np.abs(left) - np.abs(right)) / scale)


def triple_residual(k: WaveNumberLike,
                    model: StarGraphModel,
                    convention: SecularConvention =
                    SecularConvention.MATCHING
                    ) -> Tuple[float, float, float]:
    """
    Three residuals of the coupling dependent factor
    ``k^q cos^{q-2} kL + S sin^{q-2} kL`` at `k`: the real part, the
    imaginary part and the balance of the moduli of its two terms, each
    relative to the sum of the moduli.  All three vanish iff `k` is a
    complex root.

    Raises:
        ValueError: If ``q < 3``.
    """
    if model.q < 3:
        raise ValueError(f'The triple residual requires q >= 3: '
                         f'got q={model.q}')
    form = ClosedForm(model, convention)
    r_a, r_b, r_c = _triple_residual(form, to_complex(k))
    return float(r_a), float(r_b), float(r_c)


@dataclass(frozen=True)
class ResidualCurves(object):
    """The triple residual sampled on a grid of shape ``[grid_nu, grid_mu]``;
    the zero level sets of `r_a`, `r_b`, `r_c` intersect at the roots."""

    mu: np.ndarray
    nu: np.ndarray
    r_a: np.ndarray
    r_b: np.ndarray
    r_c: np.ndarray

    def to_rows(self) -> List[Dict[str, float]]:
        return [
            {'mu': float(m), 'nu': float(n), 'r_a': float(a),
             'r_b': float(b), 'r_c': float(c)}
            for m, n, a, b, c in zip(self.mu.ravel(), self.nu.ravel(),
                                     self.r_a.ravel(), self.r_b.ravel(),
                                     self.r_c.ravel())
        ]


def residual_curves(model: StarGraphModel,
                    region: RootSearchRegion,
                    convention: SecularConvention =
                    SecularConvention.MATCHING) -> ResidualCurves:
    if model.q < 3:
        raise ValueError(f'The triple residual requires q >= 3: '
                         f'got q={model.q}')
    form = ClosedForm(model, convention)
    mu, nu = region.grid()
    with np.errstate(all='ignore'):
        r_a, r_b, r_c = _triple_residual(form, mu + 1j * nu)
    return ResidualCurves(mu=mu, nu=nu, r_a=r_a, r_b=r_b, r_c=r_c)


def _factor_real_roots(form: ClosedForm,
                       k_min: float,
                       k_max: float,
                       samples_per_unit: int = 256) -> List[float]:
    # zeros of a real-valued coupling dependent factor on the real axis
    num = max(16, int(samples_per_unit * (k_max - k_min) *
                      form.model.length) + 1)
    x = np.linspace(k_min, k_max, num)

    def factor(k):
        left, right = form.factor_terms(k)
        return np.real(left + right)

    y = factor(x)
    ret = []
    for i in range(num - 1):
        if y[i] == 0.:
            ret.append(float(x[i]))
        elif y[i] * y[i + 1] < 0.:
            ret.append(float(brentq(factor, x[i], x[i + 1], xtol=1e-15,
                                    rtol=4 * np.finfo(np.float64).eps)))
    return [k for k in ret if k > ORIGIN_RADIUS]


def _real_roots_in_region(model: StarGraphModel,
                          region: RootSearchRegion,
                          convention: SecularConvention,
                          merge: float
                          ) -> List[Tuple[float, RootClassification]]:
    if not region.contains_real_axis or region.mu_max <= 0.:
        return []
    k_min = max(region.mu_min, 0.)
    form = ClosedForm(model, convention)
    if convention == SecularConvention.DISPLAYED and model.q % 2 == 1:
        roots = [(k, RootKind.GENERIC_REAL, None)
                 for k in _generic_real_roots(model, k_min, region.mu_max)]
        roots.extend((k, RootKind.ANOMALOUS_REAL, None)
                     for k in _factor_real_roots(form, k_min, region.mu_max))
        merge_radius = merge * math.pi / model.length
        found = _classify_real_roots(roots, form, merge_radius)
    else:
        found = real_spectrum(model, region.mu_max, merge=merge)
    return [(k, c) for k, c in found if region.contains(k)]


def solve_region(model: StarGraphModel,
                 region: RootSearchRegion,
                 convention: SecularConvention = SecularConvention.MATCHING,
                 certify: bool = True,
                 merge: float = 1e-6,
                 n_jobs: Optional[int] = None) -> SpectrumResult:
    """
    Locate all roots in `region` and certify the count by the argument
    principle.

    If the certified count exceeds the number of located roots, the search
    is repeated once with a four times denser seed grid, and multiplicities
    are then measured by winding counts around small squares centered at
    the located roots.  If the counts still differ, the result carries the
    raw winding count, but no certificate.
    """
    convention = SecularConvention(convention)
    form = ClosedForm(model, convention)
    effective = region
    winding = None
    if certify:
        try:
            winding, effective = winding_count(model, region, convention)
        except CertificationError as ex:
            logger.warning('Certification unavailable: %s', ex)

    real = _real_roots_in_region(model, effective, convention, merge)
    found = complex_roots(model, effective, convention, n_jobs=n_jobs)
    result = SpectrumResult(
        model=model, real_roots=real, complex_roots=found, region=region,
        effective_region=effective, winding=winding, convention=convention,
    )

    if winding is not None and winding > result.located_count:
        logger.info('Winding count %d exceeds the %d located roots; '
                    'refining the seed grid.', winding, result.located_count)
        result.complex_roots = complex_roots(
            model, effective.refined(4), convention, n_jobs=n_jobs)
        if winding > result.located_count:
            keys = [complex(k) for k, _ in result.real_roots] + \
                [k.value for k, _ in result.complex_roots]
            for k in keys:
                others = [abs(k - w) for w in keys if w != k]
                radius = min([1e-3 / model.length] +
                             [d / 2. for d in others])
                result.multiplicities[k] = _multiplicity(form, k, radius)

    if winding is not None:
        if winding == result.located_count:
            result.count_certificate = winding
        else:
            logger.warning('Winding count %d does not match the %d located '
                           'roots; the search is not certified.',
                           winding, result.located_count)
    return result
