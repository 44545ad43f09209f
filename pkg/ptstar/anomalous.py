"""
Anomalous real roots of the star graphs with ``q = 4m - 2`` edges.

For these `q` the coupling dependent factor of the secular function has a
real coefficient of negative sign, and its real zeros satisfy the
polynomial form::

    k^(4m-2) = alpha^(4m-2) * tan^(4m-4) kL

The exponent ``4m - 4`` is even, so this is equivalent to the fixed-point
form ``k = alpha * |tan kL|^p`` with ``p = 1 - 1 / (2m - 1)``, and real roots
exist on both signs of ``tan kL``.  On the first branch ``(0, pi / 2L)`` two
roots exist for small `alpha`; they merge at a critical coupling and move
into the complex plane.

All computations are carried out in the dimensionless variables ``kL`` and
``alpha * L``, and rescaled on output.
"""
import math
from dataclasses import dataclass, field
from logging import getLogger
from typing import *

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NotFoundError
from .model import StarGraphModel
from .roots import RootSearchRegion, complex_roots
from .utils import geometric_grid, parallel_map

__all__ = [
    'AnomalousBranch', 'BifurcationPoint', 'SweepRow', 'SweepTable',
    'anomalous_exponent', 'polynomial_residual', 'fixed_point_form',
    'anomalous_branches', 'anomalous_real_roots', 'critical_alpha',
    'alpha_sweep',
]

logger = getLogger(__name__)

# interior samples per half-period branch
BRANCH_SAMPLES = 256


def _check_m(m: int, minimum: int = 1) -> int:
    if isinstance(m, bool) or int(m) != m or m < minimum:
        raise ValueError(f'`m` must be an integer >= {minimum}: got {m!r}')
    return int(m)


def _check_positive(name: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f'`{name}` must be a finite positive number: '
                         f'got {value!r}')
    return float(value)


def anomalous_exponent(m: int) -> float:
    """
    The exponent ``p = 1 - 1 / (2m - 1)`` of the fixed-point form.

    >>> anomalous_exponent(1), round(anomalous_exponent(2), 12)
    (0.0, 0.666666666667)
    """
    m = _check_m(m)
    return 1. - 1. / (2 * m - 1)


def polynomial_residual(k, m: int, alpha: float, length: float = 1.):
    """
    Relative residual of ``k^(4m-2) - alpha^(4m-2) * tan^(4m-4) kL``,
    normalized by the sum of the moduli of its two terms.
    """
    q = 4 * _check_m(m) - 2
    k = np.asarray(k, dtype=np.float64)
    t = np.tan(k * length)
    left = k ** q
    right = alpha ** q * t ** (q - 2)
    return np.abs(left - right) / (np.abs(left) + np.abs(right))


def fixed_point_form(k, m: int, alpha: float, length: float = 1.):
    """
    Evaluate ``g(k) = k - alpha * tan^p kL`` where ``tan kL >= 0``.  The
    value is NaN where ``tan kL < 0``.

    >>> float(fixed_point_form(0.8, 1, 0.8))
    0.0
    """
    p = anomalous_exponent(m)
    k = np.asarray(k, dtype=np.float64)
    t = np.tan(k * length)
    with np.errstate(invalid='ignore'):
        return np.where(t >= 0., k - alpha * np.abs(t) ** p, np.nan)


def _branch_function(p: float, alpha: float) -> Callable:
    # dimensionless: k - alpha * |tan k|^p
    def h(k):
        return k - alpha * np.abs(np.tan(k)) ** p
    return h


@dataclass(frozen=True)
class AnomalousBranch(object):
    """Anomalous real roots on one half-period branch ``branch_interval``."""

    m: int
    alpha: float
    branch_interval: Tuple[float, float]
    roots: List[float] = field(default_factory=list)
    double_root: bool = False

    @property
    def q(self) -> int:
        return 4 * self.m - 2


@dataclass(frozen=True)
class BifurcationPoint(object):
    """The coupling at which two anomalous real roots merge."""

    alpha_critical: float
    k_merge: float
    m: int
    length: float = 1.
    residual: float = 0.
    """``|g|`` at the merge point."""
    derivative_residual: float = 0.
    """``|dg/dk|`` at the merge point (dimensionless)."""

    def to_dict(self) -> Dict[str, Any]:
        return {
            'alpha_critical': self.alpha_critical,
            'k_merge': self.k_merge,
            'm': self.m,
            'length': self.length,
            'residual': self.residual,
            'derivative_residual': self.derivative_residual,
        }


def _refine_extrema(h: Callable, x: np.ndarray, y: np.ndarray
                    ) -> Tuple[np.ndarray, np.ndarray]:
    # a local maximum below zero (or a local minimum above zero) between
    # samples may hide a close pair of roots
    extra = []
    for i in range(1, len(x) - 1):
        is_max = y[i] >= y[i - 1] and y[i] >= y[i + 1] and y[i] < 0.
        is_min = y[i] <= y[i - 1] and y[i] <= y[i + 1] and y[i] > 0.
        if not (is_max or is_min):
            continue
        sign = -1. if is_max else 1.
        ret = minimize_scalar(lambda v: sign * float(h(v)),
                              bounds=(x[i - 1], x[i + 1]), method='bounded',
                              options={'xatol': 1e-15})
        extra.append(float(ret.x))
    if not extra:
        return x, y
    x = np.sort(np.concatenate([x, extra]))
    return x, h(x)


def _branch_roots(h: Callable,
                  a: float,
                  b: float,
                  k_max: float,
                  merge_radius: float,
                  double_tol: float = 1e-12) -> Tuple[List[float], bool]:
    # roots of h on the open half-period branch (a, b), truncated at k_max
    delta = 1e-10 * (b - a)
    stop = min(b - delta, k_max)
    if stop <= a + delta:
        return [], False
    x = np.concatenate([[a + delta],
                        np.linspace(a, b, BRANCH_SAMPLES + 2)[1:-1],
                        [stop]])
    x = x[x <= stop]
    y = h(x)
    x, y = _refine_extrema(h, x, y)

    roots, double_root = [], False
    for i in range(len(x) - 1):
        if y[i] == 0.:
            roots.append(float(x[i]))
        elif y[i] * y[i + 1] < 0.:
            roots.append(float(brentq(h, x[i], x[i + 1], xtol=1e-15,
                                      rtol=4 * np.finfo(np.float64).eps)))
    if y[-1] == 0.:
        roots.append(float(x[-1]))

    # extrema touching zero without a sign change
    for i in range(1, len(x) - 1):
        if abs(y[i]) <= double_tol * max(1., abs(x[i])) and \
                y[i - 1] * y[i + 1] > 0. and \
                all(abs(x[i] - r) > merge_radius for r in roots):
            roots.append(float(x[i]))
            double_root = True

    roots.sort()
    merged = []
    for r in roots:
        if merged and r - merged[-1] <= merge_radius:
            merged[-1] = (merged[-1] + r) / 2.
            double_root = True
        else:
            merged.append(r)
    return merged, double_root


def anomalous_branches(m: int,
                       alpha: float,
                       length: float,
                       k_max: float,
                       merge: float = 1e-6,
                       tol: float = 1e-8) -> List[AnomalousBranch]:
    """
    Anomalous real roots in ``(0, k_max]``, grouped by half-period branch
    ``(b * pi / 2L, (b + 1) * pi / 2L)``.

    Args:
        m: The branch parameter, ``q = 4m - 2``.
        alpha: The coupling strength.
        length: The edge length.
        k_max: The upper end of the search interval.
        merge: Roots closer than ``merge * pi / L`` are reported as one
            numerical double root.
        tol: Tolerance of the polynomial-form residual.

    Returns:
        The non-empty branches, in ascending order.
    """
    m = _check_m(m)
    alpha = _check_positive('alpha', alpha)
    length = _check_positive('length', length)
    k_max = _check_positive('k_max', k_max)

    if m == 1:
        if alpha <= k_max:
            b = math.floor(alpha * length / (math.pi / 2))
            interval = (b * math.pi / (2 * length),
                        (b + 1) * math.pi / (2 * length))
            return [AnomalousBranch(m=1, alpha=alpha, branch_interval=interval,
                                    roots=[alpha])]
        return []

    lam, x_max = alpha * length, k_max * length
    h = _branch_function(anomalous_exponent(m), lam)
    half = math.pi / 2.
    ret = []
    b = 0
    while b * half < x_max:
        roots, double_root = _branch_roots(
            h, b * half, (b + 1) * half, x_max, merge_radius=merge * math.pi)
        if roots:
            roots = [r / length for r in roots]
            for r in roots:
                residual = float(polynomial_residual(r, m, alpha, length))
                if residual > tol:
                    logger.warning('Anomalous root k=%r has polynomial '
                                   'residual %.3g above %.3g.',
                                   r, residual, tol)
            if double_root:
                logger.warning('Near-double anomalous root on branch %d for '
                               'm=%d, alpha=%g: %r.', b, m, alpha, roots)
            ret.append(AnomalousBranch(
                m=m, alpha=alpha,
                branch_interval=(b * half / length, (b + 1) * half / length),
                roots=roots, double_root=double_root,
            ))
        b += 1
    return ret


def anomalous_real_roots(m: int,
                         alpha: float,
                         length: float,
                         k_max: float,
                         merge: float = 1e-6) -> List[float]:
    """
    All anomalous real roots in ``(0, k_max]``, sorted ascending.

    >>> anomalous_real_roots(1, 0.8, 1., 10.)
    [0.8]
    >>> len(anomalous_real_roots(2, 0.5, 1., math.pi / 2))
    2
    >>> anomalous_real_roots(2, 0.9, 1., math.pi / 2)
    []
    """
    return [r for branch in anomalous_branches(m, alpha, length, k_max,
                                               merge=merge)
            for r in branch.roots]


def _count_on_interval(m: int, lam: float, interval: Tuple[float, float]
                       ) -> Tuple[int, List[float]]:
    h = _branch_function(anomalous_exponent(m), lam)
    roots, double_root = _branch_roots(h, interval[0], interval[1],
                                       interval[1], merge_radius=1e-6 * math.pi)
    if double_root:
        # a numerical double root counts as two merging roots
        return 2 * len(roots), roots
    return len(roots), roots


def _fold_system(k: float, lam: float, p: float, sgn: float):
    # g = k - lam * u^p with u = |tan k|, and its partial derivatives
    t = math.tan(k)
    sec2 = 1. + t * t
    u = abs(t)
    du = sgn * sec2
    ddu = sgn * 2. * sec2 * t
    g = k - lam * u ** p
    g_k = 1. - lam * p * u ** (p - 1.) * du
    g_kk = -lam * p * ((p - 1.) * u ** (p - 2.) * du * du +
                       u ** (p - 1.) * ddu)
    g_a = -u ** p
    g_ka = -p * u ** (p - 1.) * du
    return np.array([g, g_k]), np.array([[g_k, g_a], [g_kk, g_ka]])


def _fold_newton(k: float, lam: float, p: float, sgn: float,
                 interval: Tuple[float, float],
                 tol: float = 1e-13,
                 max_iter: int = 100) -> Tuple[float, float, np.ndarray]:
    f, jac = _fold_system(k, lam, p, sgn)
    for it in range(max_iter):
        norm = float(np.max(np.abs(f)))
        if norm <= tol:
            break
        step = np.linalg.solve(jac, -f)
        for _ in range(60):
            k_new, lam_new = k + step[0], lam + step[1]
            if interval[0] < k_new < interval[1] and lam_new > 0.:
                f_new, jac_new = _fold_system(k_new, lam_new, p, sgn)
                if float(np.max(np.abs(f_new))) < norm:
                    break
            step = step / 2.
        else:
            break
        k, lam, f, jac = k_new, lam_new, f_new, jac_new
    logger.debug('Fold Newton stopped after %d iterations: k=%r, alpha=%r, '
                 'residuals=%r.', it, k, lam, f)
    return k, lam, f


def critical_alpha(m: int,
                   length: float = 1.,
                   branch_interval: Optional[Tuple[float, float]] = None,
                   alpha_range: Tuple[float, float] = (0.05, 2.),
                   scan_points: int = 64,
                   bisection_steps: int = 40) -> BifurcationPoint:
    """
    Find the coupling at which two anomalous real roots on a branch merge.

    The root count on the branch is scanned over a geometric grid of
    ``alpha * L`` in `alpha_range`; the first drop of the count is bisected,
    and the fold system ``g = 0, dg/dk = 0`` is then solved by damped Newton
    iteration, seeded from the bisection.

    Args:
        m: The branch parameter, ``q = 4m - 2``, at least 2.
        length: The edge length.
        branch_interval: The half-period branch, in `k` units.  Defaults to
            the first branch ``(0, pi / 2L)``.
        alpha_range: Scan range of the dimensionless coupling ``alpha * L``.
        scan_points: Number of scanned couplings.
        bisection_steps: Number of bisection steps on the root count.

    Returns:
        The bifurcation point.

    Raises:
        NotFoundError: If the root count does not drop over the scan range.
    """
    m = _check_m(m, minimum=2)
    length = _check_positive('length', length)
    if branch_interval is None:
        interval = (0., math.pi / 2.)
    else:
        interval = (branch_interval[0] * length, branch_interval[1] * length)
    # tan k keeps its sign on a half-period branch
    sgn = 1. if math.tan(sum(interval) / 2.) > 0. else -1.
    p = anomalous_exponent(m)

    lams = geometric_grid(alpha_range[0], alpha_range[1], scan_points)
    counts = [_count_on_interval(m, lam, interval)[0] for lam in lams]
    transition = None
    for i in range(1, len(lams)):
        if counts[i] < counts[i - 1]:
            transition = i
            break
    if transition is None:
        raise NotFoundError(
            f'The anomalous root count on {branch_interval or interval!r} '
            f'does not drop over the scanned couplings for m={m}.',
            m=m, length=length, alphas=[float(a) / length for a in lams],
            counts=counts)

    lo, hi = float(lams[transition - 1]), float(lams[transition])
    high_count = counts[transition - 1]
    for _ in range(bisection_steps):
        mid = (lo + hi) / 2.
        if _count_on_interval(m, mid, interval)[0] >= high_count:
            lo = mid
        else:
            hi = mid
    roots = _count_on_interval(m, lo, interval)[1]
    k_seed = (roots[0] + roots[-1]) / 2. if roots else sum(interval) / 2.
    logger.debug('Root count on the branch drops from %d between '
                 'alpha*L=%r and %r; Newton seed k*L=%r.',
                 high_count, lo, hi, k_seed)

    k, lam, f = _fold_newton(k_seed, (lo + hi) / 2., p, sgn, interval)
    point = BifurcationPoint(
        alpha_critical=float(lam) / length,
        k_merge=float(k) / length,
        m=m,
        length=float(length),
        residual=abs(float(f[0])) / length,
        derivative_residual=abs(float(f[1])),
    )
    logger.info('Critical coupling for m=%d, L=%g: alpha=%.10g, k=%.10g.',
                m, length, point.alpha_critical, point.k_merge)
    return point


# ---- coupling sweep ----
@dataclass(frozen=True)
class SweepRow(object):
    alpha: float
    real_roots: List[float]
    complex_roots: List[complex] = field(default_factory=list)


@dataclass
class SweepTable(object):
    m: int
    length: float
    rows: List[SweepRow]

    def to_rows(self) -> List[Dict[str, Any]]:
        """Plot-ready rows ``alpha, branch, root_index, k_real, k_imag``."""
        half = math.pi / (2. * self.length)
        ret = []
        for row in self.rows:
            roots = sorted([complex(r) for r in row.real_roots] +
                           list(row.complex_roots),
                           key=lambda v: (v.real, v.imag))
            counters = {}
            for k in roots:
                branch = int(math.floor(k.real / half))
                index = counters.get(branch, 0)
                counters[branch] = index + 1
                ret.append({'alpha': row.alpha, 'branch': branch,
                            'root_index': index, 'k_real': k.real,
                            'k_imag': k.imag})
        return ret

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'length': self.length,
            'rows': [{'alpha': r.alpha, 'real_roots': r.real_roots,
                      'complex_roots': r.complex_roots}
                     for r in self.rows],
        }


def _complexified_pair(m: int, alpha: float, length: float,
                       k_merge: float) -> List[complex]:
    model = StarGraphModel(q=4 * m - 2, alpha=alpha, length=length)
    half = math.pi / (2. * length)
    region = RootSearchRegion(mu_min=0.05 / length, mu_max=half,
                              nu_min=-half, nu_max=half)
    found = [k.value for k, _ in complex_roots(model, region, n_jobs=1)]
    upper = [k for k in found if k.imag > 0.]
    if not upper:
        logger.warning('No complexified pair found for m=%d, alpha=%g.',
                       m, alpha)
        return []
    k = min(upper, key=lambda v: abs(v - k_merge))
    return [k.conjugate(), k]


def alpha_sweep(m: int,
                length: float,
                alpha_range: Tuple[float, float],
                steps: int,
                k_max: float,
                n_jobs: Optional[int] = None) -> SweepTable:
    """
    Trace the anomalous real roots over a range of couplings.

    Rows are evaluated in parallel and ordered by ascending `alpha`.  For
    ``m >= 2``, rows without real roots on the first branch also record
    the complexified pair next to the merge point.

    Args:
        m: The branch parameter, ``q = 4m - 2``.
        length: The edge length.
        alpha_range: ``(alpha_min, alpha_max)``.
        steps: Number of couplings, at least 2.
        k_max: The upper end of the real search interval.
        n_jobs: Number of worker threads.

    Returns:
        The trajectory table.
    """
    m = _check_m(m)
    length = _check_positive('length', length)
    if steps < 2:
        raise ValueError(f'`steps` must be at least 2: got {steps!r}')
    alpha_min = _check_positive('alpha_min', alpha_range[0])
    alpha_max = _check_positive('alpha_max', alpha_range[1])
    if alpha_max < alpha_min:
        raise ValueError(f'Invalid `alpha_range`: {alpha_range!r}')
    alphas = [float(a) for a in np.linspace(alpha_min, alpha_max, steps)]
    first_branch = math.pi / (2. * length)
    merge_point: List[Optional[float]] = []

    def k_merge() -> float:
        if not merge_point:
            try:
                merge_point.append(critical_alpha(m, length).k_merge)
            except NotFoundError:
                merge_point.append(first_branch / 2.)
        return merge_point[0]

    rows = parallel_map(
        lambda a: SweepRow(alpha=a, real_roots=anomalous_real_roots(
            m, a, length, k_max)),
        alphas, n_jobs=n_jobs
    )
    if m >= 2 and k_max >= first_branch:
        pending = [r for r in rows
                   if not any(k < first_branch for k in r.real_roots)]
        if pending:
            k0 = k_merge()
            pairs = parallel_map(
                lambda r: _complexified_pair(m, r.alpha, length, k0),
                pending, n_jobs=n_jobs
            )
            replaced = {id(r): SweepRow(alpha=r.alpha,
                                        real_roots=r.real_roots,
                                        complex_roots=pair)
                        for r, pair in zip(pending, pairs)}
            rows = [replaced.get(id(r), r) for r in rows]
    return SweepTable(m=m, length=length, rows=rows)
