from typing import *

from terminaltables import AsciiTable

from .config import Config, config_to_dict

__all__ = ['format_key_values', 'format_table', 'format_complex']

KeyValuesType = Union[Dict, Config, Iterable[Tuple[str, Any]]]


def _plain_table(data: List[List[str]]) -> List[str]:
    table = AsciiTable(data)
    table.padding_left = 0
    table.padding_right = 3
    table.inner_column_border = False
    table.inner_footing_row_border = False
    table.inner_heading_row_border = False
    table.inner_row_border = False
    table.outer_border = False
    return [line.rstrip() for line in table.table.split('\n')]


def format_key_values(key_values: KeyValuesType,
                      title: Optional[str] = None,
                      formatter: Callable[[Any], str] = str,
                      delimiter_char: str = '=') -> str:
    """
    Format key value sequence into str.

    >>> print(format_key_values({'q': 3, 'alpha': 1.0}, title='model'))
    model
    ===========
    q       3
    alpha   1.0

    A :class:`Config` is flattened into dotted keys:

    >>> from ptstar.model import ModelConfig
    >>> print(format_key_values(ModelConfig(q=4, alpha=1.)))
    q         4
    alpha     1.0
    length    1.0
    lambda_   None

    Args:
        key_values: A :class:`Config`, a dict, or a list of (key, value)
            pairs.
        title: If specified, prepend a title and a delimiter line.
        formatter: The function to format values.
        delimiter_char: The character of the delimiter line.

    Returns:
        The formatted str.
    """
    if len(delimiter_char) != 1:
        raise ValueError(f'`delimiter_char` must be one character: '
                         f'got {delimiter_char!r}')

    if isinstance(key_values, Config):
        key_values = config_to_dict(key_values, flatten=True)

    if hasattr(key_values, 'items'):
        data = [[key, formatter(value)] for key, value in key_values.items()]
    else:
        data = [[key, formatter(value)] for key, value in key_values]

    lines = _plain_table(data)
    if title is not None:
        max_length = max(max(map(len, lines)), len(title))
        lines = [title, delimiter_char * max_length] + lines
    return '\n'.join(lines)


def format_complex(k: complex, digits: int = 6) -> str:
    """
    Format a complex wave number compactly.

    >>> format_complex(1.2048412 + 0.3507j)
    '1.20484+0.3507i'
    >>> format_complex(2.0)
    '2'
    """
    k = complex(k)
    if k.imag == 0.:
        return f'{k.real:.{digits}g}'
    return f'{k.real:.{digits}g}{k.imag:+.{digits}g}i'


def format_table(rows: Sequence[Mapping[str, Any]],
                 columns: Sequence[str],
                 formatter: Callable[[Any], str] = str) -> str:
    """
    Format rows of dicts into an aligned text table with a heading.

    >>> print(format_table([{'check': 'mu', 'ok': True}], ['check', 'ok']))
    check   ok
    ------------
    mu      True
    """
    data = [list(columns)]
    data.extend([formatter(row.get(c, '')) for c in columns] for row in rows)
    lines = _plain_table(data)
    lines.insert(1, '-' * max(map(len, lines)))
    return '\n'.join(lines)
