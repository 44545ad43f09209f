from typing import *

import numpy as np

__all__ = [
    'Singleton', 'NOT_SET',
    'format_duration', 'validate_enum_arg',
    'geometric_grid', 'merge_close_values', 'sort_complex', 'parse_complex',
]


class Singleton(object):
    """
    Base class for singleton classes.

    >>> class Parent(Singleton):
    ...     pass

    >>> Parent() is Parent()
    True
    """

    __instances_dict = {}

    def __new__(cls, *args, **kwargs):
        if cls not in Singleton.__instances_dict:
            Singleton.__instances_dict[cls] = \
                object.__new__(cls, *args, **kwargs)
        return Singleton.__instances_dict[cls]


class NotSet(Singleton):
    """
    Class of the `NOT_SET` constant.

    >>> NOT_SET is not None
    True
    >>> NOT_SET
    NOT_SET
    """

    def __repr__(self):
        return 'NOT_SET'


NOT_SET = NotSet()


def format_duration(seconds: Union[float, int]) -> str:
    """
    Format the elapsed time of a computation as short human readable text.

    >>> format_duration(0)
    '0s'
    >>> format_duration(0.25)
    '0.25s'
    >>> format_duration(61)
    '1m 1s'
    >>> format_duration(3600 + 120)
    '1h 2m'

    Args:
        seconds: Number of seconds.

    Returns:
        The formatted duration.
    """
    pieces = []
    for unit_value, unit_name in ((3600, 'h'), (60, 'm')):
        if seconds >= unit_value:
            pieces.append(f'{int(seconds // unit_value):d}{unit_name}')
            seconds %= unit_value
    if seconds > np.finfo(np.float64).eps:
        pieces.append(f'{seconds:.4g}s')
    elif not pieces:
        pieces.append('0s')
    return ' '.join(pieces)


TArgValue = TypeVar('TArgValue')


def validate_enum_arg(arg_name: str,
                      arg_value: Optional[TArgValue],
                      choices: Iterable[TArgValue],
                      nullable: bool = False) -> Optional[TArgValue]:
    """
    Validate the value of an enumeration argument.

    >>> validate_enum_arg('form', 'sum', ['sum', 'closed'])
    'sum'
    >>> validate_enum_arg('form', 'other', ['sum', 'closed'])
    Traceback (most recent call last):
        ...
    ValueError: Invalid value for argument `form`: expected to be one of ('sum', 'closed'), but got 'other'.

    Args:
        arg_name: Name of the argument.
        arg_value: Value of the argument.
        choices: Valid choices of the argument value.
        nullable: Whether or not the argument can be None?

    Returns:
        The validated argument value.
    """
    choices = tuple(choices)

    if not (nullable and arg_value is None) and (arg_value not in choices):
        raise ValueError('Invalid value for argument `{}`: expected to be one '
                         'of {!r}, but got {!r}.'.
                         format(arg_name, choices, arg_value))

    return arg_value


def geometric_grid(start: float, stop: float, num: int) -> np.ndarray:
    """
    Geometrically spaced points from `start` to `stop` (both included).

    >>> geometric_grid(1., 100., 3)
    array([  1.,  10., 100.])
    """
    if start <= 0 or stop <= start:
        raise ValueError(f'Invalid geometric grid bounds: '
                         f'start={start!r}, stop={stop!r}')
    if num < 2:
        raise ValueError(f'`num` must be at least 2: got {num!r}')
    return np.exp(np.linspace(np.log(start), np.log(stop), num))


def merge_close_values(values: Iterable[complex],
                       radius: float) -> List[complex]:
    """
    Merge values that lie within `radius` of an already kept value.

    The first occurrence in the input order is kept, so the result is
    deterministic for a deterministic input order.

    >>> merge_close_values([1.0, 1.0 + 1e-12, 2.0], radius=1e-9)
    [1.0, 2.0]

    Args:
        values: The values, real or complex.
        radius: The merge radius.

    Returns:
        The kept values, in input order.
    """
    kept = []
    for v in values:
        if all(abs(v - w) > radius for w in kept):
            kept.append(v)
    return kept


def sort_complex(values: Iterable[complex]) -> List[complex]:
    """
    Sort complex values by real part, then by imaginary part.

    >>> sort_complex([1 + 1j, 1 - 1j, 0.5 + 0j])
    [(0.5+0j), (1-1j), (1+1j)]
    """
    return sorted((complex(v) for v in values),
                  key=lambda v: (v.real, v.imag))


def parse_complex(value: Union[str, complex, float, int]) -> complex:
    """
    Parse a complex number, accepting ``i`` as well as ``j`` for the
    imaginary unit.

    >>> parse_complex('1-0.5i')
    (1-0.5j)
    >>> parse_complex(' 2 + 1j ')
    (2+1j)
    >>> parse_complex(3)
    (3+0j)
    >>> parse_complex('x')
    Traceback (most recent call last):
        ...
    ValueError: value is not a complex number: 'x'
    """
    if isinstance(value, bool):
        raise ValueError(f'value is not a complex number: {value!r}')
    if isinstance(value, str):
        text = value.replace(' ', '').replace('i', 'j')
        try:
            return complex(text)
        except ValueError:
            raise ValueError(f'value is not a complex number: {value!r}')
    return complex(value)
