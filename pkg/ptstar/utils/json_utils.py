from typing import Any, Tuple

import numpy as np
from bson import SON
from bson.json_util import JSONOptions, JSONMode, dumps, loads

__all__ = ['json_dumps', 'json_loads']

JSON_OPTIONS = JSONOptions(json_mode=JSONMode.RELAXED)


def _json_convert(o: Any) -> Any:
    if isinstance(o, bool):
        # bool is a subclass of int, keep it as it is
        return o
    elif hasattr(o, 'items'):
        return SON((k, _json_convert(o[k])) for k in sorted(o))
    elif isinstance(o, (complex, np.complexfloating)):
        return SON([('imag', float(o.imag)), ('real', float(o.real))])
    elif isinstance(o, np.ndarray):
        return [_json_convert(v) for v in o.tolist()]
    elif hasattr(o, '__iter__') and not isinstance(o, (str, bytes)):
        return list(_json_convert(v) for v in o)
    elif isinstance(o, np.integer):
        return int(o)
    elif isinstance(o, np.floating):
        return float(o)
    else:
        return o


def json_dumps(o: Any, *, separators: Tuple[str, str] = (',', ':'),
               allow_nan: bool = False, **kwargs) -> str:
    """
    Serialize the specified object `o` into JSON text.

    NumPy scalars and arrays are converted into Python numbers and lists,
    complex numbers into ``{"imag": ..., "real": ...}`` objects, and dict
    keys are sorted, so that identical results always produce identical
    text.  The remaining work is done by :func:`bson.json_util.dumps`.

    >>> json_dumps([True, False])
    '[true,false]'
    >>> json_dumps({'b': np.float64(0.1), 'a': np.int64(2)})
    '{"a":2,"b":0.1}'
    >>> json_dumps(1.5 - 2j)
    '{"imag":-2.0,"real":1.5}'
    >>> json_dumps(np.array([np.nan]))
    '[{"$numberDouble":"NaN"}]'

    Args:
        o: The object to be serialized.
        separators: The JSON separators, passed to :func:`bson.json_util.dumps`.
        allow_nan: Whether or not to allow `NaN`, `Infinity` in the serialized
            JSON?  Passed to :func:`bson.json_util.dumps`.
        \\**kwargs: Additional named arguments passed to
            :func:`bson.json_util.dumps`.

    Returns:
        The JSON text.
    """
    return dumps(
        _json_convert(o), json_options=JSON_OPTIONS, separators=separators,
        allow_nan=allow_nan, **kwargs
    )


def json_loads(s: str, **kwargs) -> Any:
    """
    Deserialize the specified JSON text `s` into object.

    >>> json_loads('{"a":2,"b":0.1}')
    {'a': 2, 'b': 0.1}
    >>> json_loads('[{"$numberDouble":"NaN"}]')
    [nan]

    Args:
        s: The JSON text to be deserialized.
        \\**kwargs: Additional named arguments passed to
            :func:`bson.json_util.loads`.

    Returns:
        The deserialized object.
    """
    return loads(s, json_options=JSON_OPTIONS, **kwargs)
