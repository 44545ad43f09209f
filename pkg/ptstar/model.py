import math
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from typing import *

import numpy as np

from .config import Config, config_field, field_checker, root_checker
from .errors import ConsistencyError, DegenerateConfigurationError

__all__ = [
    # data types
    'StarGraphModel', 'ComplexWaveNumber', 'WaveNumberLike', 'to_complex',
    'RootKind', 'RootClassification', 'EdgeEigenfunction',

    # configs
    'ModelConfig', 'ToleranceConfig',

    # operations
    'robin_phase', 'ck_coefficients', 'assemble_eigenfunction',
    'square_well_levels', 'is_degenerate_square_well',
    'is_pt_symmetric', 'parity_permutation', 'pt_image',
]

logger = getLogger(__name__)


@dataclass(frozen=True)
class StarGraphModel(object):
    """
    A star graph with `q` edges of equal `length`, complex Robin conditions
    ``psi_j'(0) = i * alpha * exp(i * j * phi) * psi_j(0)`` at the outer ends
    and Kirchhoff matching at the central vertex.

    Every edge is parameterized by the inward coordinate ``y in [0, L]``,
    with the central vertex at ``y = L``.

    >>> model = StarGraphModel(q=4, alpha=0.5, length=2.)
    >>> model.phi == math.pi / 2
    True
    >>> model.coupling
    1.0
    >>> StarGraphModel.from_coupling(q=3, coupling=1.)
    StarGraphModel(q=3, alpha=1.0, length=1.0)
    """

    q: int
    alpha: float
    length: float = 1.

    def __post_init__(self):
        if isinstance(self.q, bool) or int(self.q) != self.q or self.q < 2:
            raise ValueError(f'`q` must be an integer >= 2: got {self.q!r}')
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f'`alpha` must be a finite positive number: '
                             f'got {self.alpha!r}')
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f'`length` must be a finite positive number: '
                             f'got {self.length!r}')
        object.__setattr__(self, 'q', int(self.q))
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'length', float(self.length))

    @classmethod
    def from_coupling(cls, q: int, coupling: float,
                      length: float = 1.) -> 'StarGraphModel':
        """Construct a model from the dimensionless coupling ``alpha * L``."""
        return cls(q=q, alpha=coupling / length, length=length)

    @property
    def phi(self) -> float:
        """The rotation angle ``2 * pi / q`` between neighboring edges."""
        return 2. * math.pi / self.q

    @property
    def coupling(self) -> float:
        """The dimensionless coupling ``alpha * L``."""
        return self.alpha * self.length

    @property
    def anomalous_m(self) -> Optional[int]:
        """`m` if ``q = 4m - 2``, otherwise :obj:`None`."""
        if self.q % 4 == 2:
            return (self.q + 2) // 4
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {'q': self.q, 'alpha': self.alpha, 'length': self.length}


@dataclass(frozen=True)
class ComplexWaveNumber(object):
    """
    A point ``k = mu + i * nu`` of the complex wave number plane.

    >>> k = ComplexWaveNumber(1., 2.)
    >>> k.value
    (1+2j)
    >>> k.energy
    (-3+4j)
    >>> k.conjugate()
    ComplexWaveNumber(mu=1.0, nu=-2.0)
    """

    mu: float
    nu: float = 0.

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.nu)):
            raise ValueError(f'Wave number components must be finite: '
                             f'got mu={self.mu!r}, nu={self.nu!r}')
        object.__setattr__(self, 'mu', float(self.mu))
        object.__setattr__(self, 'nu', float(self.nu))

    @classmethod
    def from_complex(cls, k: complex) -> 'ComplexWaveNumber':
        k = complex(k)
        return cls(k.real, k.imag)

    @property
    def value(self) -> complex:
        return complex(self.mu, self.nu)

    @property
    def energy(self) -> complex:
        """The energy ``E = k ** 2``."""
        return self.value ** 2

    @property
    def is_real(self) -> bool:
        return self.nu == 0.

    def conjugate(self) -> 'ComplexWaveNumber':
        return ComplexWaveNumber(self.mu, -self.nu)

    def __complex__(self):
        return self.value


WaveNumberLike = Union[ComplexWaveNumber, complex, float, int]


def to_complex(k: WaveNumberLike) -> complex:
    """
    Convert a wave number into a Python complex number.

    >>> to_complex(ComplexWaveNumber(1., -1.))
    (1-1j)
    >>> to_complex(2)
    (2+0j)
    """
    if isinstance(k, ComplexWaveNumber):
        return k.value
    return complex(k)


class RootKind(str, Enum):
    """Kinds of roots of the secular function."""

    GENERIC_REAL = 'GenericReal'
    """``sin(2kL) = 0``, independent of the coupling."""

    ANOMALOUS_REAL = 'AnomalousReal'
    """A real root of the coupling dependent factor."""

    COMPLEX_PAIR = 'ComplexPair'
    """A root off the real axis."""


@dataclass(frozen=True)
class RootClassification(object):
    kind: RootKind
    residual: float
    flag: Optional[str] = None
    """Set to ``"double-root"`` or ``"cluster"`` for near-degenerate roots."""
    verified: bool = True
    """False if the root failed the residual or matching determinant check."""


# ---- configs ----
class ModelConfig(Config):
    """
    Configuration of a :class:`StarGraphModel`.

    The coupling may be given either as `alpha`, or as the dimensionless
    `lambda_`, in which case ``alpha = lambda_ / length``.

    >>> from ptstar.config import validate_config
    >>> validate_config(ModelConfig(q=3, lambda_=2., length=4.)).to_model()
    StarGraphModel(q=3, alpha=0.5, length=4.0)
    """

    q: int = 2
    alpha: Optional[float]
    length: float = 1.
    lambda_: Optional[float] = config_field(
        default=None, description='Dimensionless coupling alpha * length.')

    @field_checker('q')
    def _check_q(cls, v):
        if v < 2:
            raise ValueError(f'`q` must be at least 2: got {v!r}')
        return v

    @field_checker('alpha', 'length', 'lambda_')
    def _check_positive(cls, v, field):
        if v is not None and not (math.isfinite(v) and v > 0):
            raise ValueError(f'`{field}` must be a finite positive number: '
                             f'got {v!r}')
        return v

    @root_checker()
    def _resolve_alpha(cls, values):
        alpha, lambda_ = values.get('alpha'), values.get('lambda_')
        if lambda_ is not None:
            from_lambda = lambda_ / values['length']
            if alpha is not None and \
                    abs(alpha - from_lambda) > 1e-12 * from_lambda:
                raise ValueError('`alpha` and `lambda_` are both specified '
                                 'and do not agree.')
            values['alpha'] = from_lambda
        elif alpha is None:
            values['alpha'] = 1.
        return values

    def to_model(self) -> StarGraphModel:
        return StarGraphModel(q=self.q, alpha=self.alpha, length=self.length)


class ToleranceConfig(Config):
    """Numerical tolerances shared by the solvers."""

    real_root: float = 1e-10
    complex_root: float = 1e-8
    eigenfunction: float = 1e-8
    pole_guard: float = 1e-6
    determinant: float = 1e-8
    merge: float = config_field(
        default=1e-6,
        description='Roots closer than ``merge * pi / L`` are reported as '
                    'a numerical double root.')

    @field_checker('real_root', 'complex_root', 'eigenfunction',
                   'pole_guard', 'determinant', 'merge')
    def _check_positive(cls, v, field):
        if not v > 0:
            raise ValueError(f'tolerance `{field}` must be positive: '
                             f'got {v!r}')
        return v


# ---- operations ----
def _check_edge_index(j: int, model: StarGraphModel) -> int:
    if isinstance(j, bool) or int(j) != j or not (0 <= j < model.q):
        raise IndexError(f'Invalid value for argument `j`: edge index out '
                         f'of range [0, {model.q}): got {j!r}')
    return int(j)


def robin_phase(j: int, model: StarGraphModel) -> complex:
    """
    Get the Robin phase factor ``exp(i * j * phi)`` of the `j`-th edge.

    >>> robin_phase(0, StarGraphModel(q=5, alpha=1.))
    (1+0j)
    >>> robin_phase(5, StarGraphModel(q=5, alpha=1.))
    Traceback (most recent call last):
        ...
    IndexError: Invalid value for argument `j`: edge index out of range [0, 5): got 5
    """
    j = _check_edge_index(j, model)
    angle = j * model.phi
    return complex(math.cos(angle), math.sin(angle))


def ck_coefficients(j: int,
                    k: WaveNumberLike,
                    model: StarGraphModel) -> Tuple[float, float]:
    """
    Get the real pair ``(C, K)`` with ``C + iK = i * alpha * exp(i*j*phi) / k``
    at a real wave number `k`.

    >>> ck_coefficients(0, 1., StarGraphModel(q=3, alpha=1.))
    (-0.0, 1.0)

    Raises:
        ZeroDivisionError: If ``k == 0``.
        ValueError: If `k` is not real.
    """
    j = _check_edge_index(j, model)
    k = to_complex(k)
    if k.imag != 0.:
        raise ValueError(f'`k` must be real: got {k!r}')
    if k.real == 0.:
        raise ZeroDivisionError('`k` must be nonzero.')
    ratio = model.alpha / k.real
    angle = j * model.phi
    return -ratio * math.sin(angle), ratio * math.cos(angle)


@dataclass(frozen=True)
class EdgeEigenfunction(object):
    """
    The edge coefficients ``psi_j(y) = A_j sin(ky) + B_j cos(ky)`` of an
    eigenfunction, together with its relative residuals.
    """

    model: StarGraphModel
    root: ComplexWaveNumber
    rho: complex
    coefficients: Tuple[Tuple[complex, complex], ...]
    robin_residual: float = 0.
    continuity_residual: float = 0.
    kirchhoff_residual: float = 0.

    @property
    def max_residual(self) -> float:
        return max(self.robin_residual, self.continuity_residual,
                   self.kirchhoff_residual)

    def evaluate(self, j: int, y):
        """Evaluate ``psi_j`` at the inward coordinate(s) `y`."""
        a, b = self.coefficients[_check_edge_index(j, self.model)]
        ky = self.root.value * np.asarray(y, dtype=np.float64)
        return a * np.sin(ky) + b * np.cos(ky)

    def derivative(self, j: int, y):
        """Evaluate ``d psi_j / dy`` at the inward coordinate(s) `y`."""
        a, b = self.coefficients[_check_edge_index(j, self.model)]
        k = self.root.value
        ky = k * np.asarray(y, dtype=np.float64)
        return k * (a * np.cos(ky) - b * np.sin(ky))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'root': self.root.value,
            'rho': self.rho,
            'coefficients': [{'edge': j, 'a': a, 'b': b}
                             for j, (a, b) in enumerate(self.coefficients)],
            'residuals': {
                'robin': self.robin_residual,
                'continuity': self.continuity_residual,
                'kirchhoff': self.kirchhoff_residual,
            },
        }


def _eigenfunction_residuals(model: StarGraphModel,
                             k: complex,
                             coefficients: Sequence[Tuple[complex, complex]]
                             ) -> Tuple[float, float, float]:
    kl = k * model.length
    s, c = np.sin(kl), np.cos(kl)
    tiny = np.finfo(np.float64).tiny

    robin, values, derivs, deriv_scale = 0., [], [], 0.
    for j, (a, b) in enumerate(coefficients):
        rb = 1j * model.alpha * robin_phase(j, model) * b
        robin = max(robin, abs(k * a - rb) / max(abs(k * a) + abs(rb), tiny))
        values.append(a * s + b * c)
        derivs.append(k * (a * c - b * s))
        deriv_scale += abs(k) * (abs(a * c) + abs(b * s))

    value_scale = max(max(abs(v) for v in values), tiny)
    continuity = max(abs(v - values[0]) for v in values) / value_scale
    kirchhoff = abs(sum(derivs)) / max(deriv_scale, tiny)
    return float(robin), float(continuity), float(kirchhoff)


def assemble_eigenfunction(k: WaveNumberLike,
                           model: StarGraphModel,
                           rho: complex = 1.,
                           tol: float = 1e-8,
                           bracket_guard: float = 1e-6) -> EdgeEigenfunction:
    """
    Assemble the eigenfunction at the root `k`.

    The continuity condition ``psi_j(L) = rho`` fixes
    ``B_j = k * rho / (i * alpha * exp(i*j*phi) * sin kL + k * cos kL)``,
    and the Robin condition gives ``A_j = i * alpha * exp(i*j*phi) * B_j / k``.
    The Kirchhoff law is then satisfied only if `k` is a root.

    >>> ef = assemble_eigenfunction(1., StarGraphModel(q=2, alpha=1.))
    >>> ef.kirchhoff_residual < 1e-12
    True

    Args:
        k: The root.
        model: The star graph model.
        rho: Common vertex value of the edge wave functions.
        tol: Tolerance of the relative residuals.
        bracket_guard: Relative threshold below which a continuity bracket
            is regarded as vanishing.

    Returns:
        The assembled eigenfunction.

    Raises:
        DegenerateConfigurationError: If the continuity bracket of some edge
            vanishes.
        ConsistencyError: If `k` is not a root.
    """
    k_val = to_complex(k)
    if k_val == 0:
        raise ValueError('`k` must be nonzero.')
    rho = complex(rho)
    if rho == 0:
        raise ValueError('`rho` must be nonzero.')

    kl = k_val * model.length
    s, c = np.sin(kl), np.cos(kl)
    coefficients = []
    for j in range(model.q):
        rp = 1j * model.alpha * robin_phase(j, model)
        bracket = rp * s + k_val * c
        scale = abs(rp * s) + abs(k_val * c)
        if abs(bracket) <= bracket_guard * scale:
            raise DegenerateConfigurationError(
                f'The continuity bracket of edge {j} vanishes at k={k_val!r}.',
                edge=j, k=k_val, q=model.q)
        unit_b = k_val / bracket
        coefficients.append((complex(rho * (rp * unit_b / k_val)),
                             complex(rho * unit_b)))

    robin, continuity, kirchhoff = \
        _eigenfunction_residuals(model, k_val, coefficients)
    if kirchhoff > tol:
        raise ConsistencyError(
            f'k={k_val!r} is not a root: the Kirchhoff residual is '
            f'{kirchhoff:.3g}.',
            residual=kirchhoff, k=k_val, q=model.q)
    logger.debug('Assembled eigenfunction at k=%r: residuals robin=%.3g, '
                 'continuity=%.3g, kirchhoff=%.3g',
                 k_val, robin, continuity, kirchhoff)
    return EdgeEigenfunction(
        model=model,
        root=ComplexWaveNumber.from_complex(k_val),
        rho=rho,
        coefficients=tuple(coefficients),
        robin_residual=robin,
        continuity_residual=continuity,
        kirchhoff_residual=kirchhoff,
    )


def square_well_levels(alpha: float, length: float, n_max: int) -> np.ndarray:
    """
    Energies of the two-edge graph (a PT-symmetric square well of width 2L).

    >>> square_well_levels(1., math.pi / 2, 3)
    array([1., 1., 4., 9.])

    Args:
        alpha: The coupling strength.
        length: The edge length.
        n_max: The number of coupling-independent levels.

    Returns:
        ``alpha ** 2`` together with ``(n * pi / 2L) ** 2``, n = 1..n_max,
        sorted ascending.
    """
    if n_max < 0:
        raise ValueError(f'`n_max` must be non-negative: got {n_max!r}')
    n = np.arange(1, n_max + 1, dtype=np.float64)
    levels = np.concatenate([[alpha ** 2], (n * np.pi / (2. * length)) ** 2])
    return np.sort(levels)


def is_degenerate_square_well(alpha: float, length: float,
                              tol: float = 1e-12) -> bool:
    """
    Whether ``2 * L * alpha / pi`` is a positive integer, in which case
    ``alpha ** 2`` coincides with one of the coupling-independent levels.

    >>> is_degenerate_square_well(1., math.pi / 2)
    True
    >>> is_degenerate_square_well(1., 1.)
    False
    """
    x = 2. * length * alpha / math.pi
    n = round(x)
    return n >= 1 and abs(x - n) <= tol * max(1., x)


def is_pt_symmetric(model: StarGraphModel) -> bool:
    """
    Whether the graph is PT-symmetric, i.e., the Robin phases are mapped
    onto themselves by complex conjugation combined with an edge
    permutation.  This holds iff `q` is even.
    """
    return model.q % 2 == 0


def parity_permutation(model: StarGraphModel) -> Tuple[int, ...]:
    """
    Get the edge permutation ``j -> (q/2 - j) mod q`` of the parity operator.

    >>> parity_permutation(StarGraphModel(q=2, alpha=1.))
    (1, 0)
    >>> parity_permutation(StarGraphModel(q=6, alpha=1.))
    (3, 2, 1, 0, 5, 4)
    """
    if not is_pt_symmetric(model):
        raise ValueError(f'The star graph with q={model.q} edges is not '
                         f'PT-symmetric.')
    half = model.q // 2
    return tuple((half - j) % model.q for j in range(model.q))


def pt_image(eigenfunction: EdgeEigenfunction) -> EdgeEigenfunction:
    """
    Apply the PT operator to an eigenfunction.

    The image is an eigenfunction at the conjugate wave number, with the
    coefficients ``(conj(A_p(j)), conj(B_p(j)))``, where `p` is the
    :func:`parity_permutation`.
    """
    model = eigenfunction.model
    perm = parity_permutation(model)
    coefficients = tuple(
        (eigenfunction.coefficients[p][0].conjugate(),
         eigenfunction.coefficients[p][1].conjugate())
        for p in perm
    )
    root = eigenfunction.root.conjugate()
    robin, continuity, kirchhoff = \
        _eigenfunction_residuals(model, root.value, coefficients)
    return EdgeEigenfunction(
        model=model,
        root=root,
        rho=eigenfunction.rho.conjugate(),
        coefficients=coefficients,
        robin_residual=robin,
        continuity_residual=continuity,
        kirchhoff_residual=kirchhoff,
    )
