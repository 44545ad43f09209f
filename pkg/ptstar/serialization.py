import csv
import io
from typing import *

from .model import StarGraphModel
from .utils import json_dumps, validate_enum_arg

__all__ = [
    'SCHEMA_VERSION', 'CSV_COLUMNS',
    'result_document', 'dump_json', 'dump_csv',
]

SCHEMA_VERSION = 1

# fixed CSV headers of each kind of output
CSV_COLUMNS: Dict[str, Tuple[str, ...]] = {
    'roots': ('mu', 'nu', 'kind', 'residual'),
    'sweep': ('alpha', 'branch', 'root_index', 'k_real', 'k_imag'),
    'verify': ('mu', 'nu', 'sum_value_re', 'sum_value_im',
               'closed_value_re', 'closed_value_im', 'agree'),
    'curves': ('mu', 'nu', 'r_a', 'r_b', 'r_c'),
    'eigenfunction': ('edge', 'a_re', 'a_im', 'b_re', 'b_im'),
}


def result_document(command: str,
                    model: Optional[StarGraphModel],
                    results: Any,
                    diagnostics: Optional[Mapping[str, Any]] = None
                    ) -> Dict[str, Any]:
    """
    Build the versioned result object.

    >>> doc = result_document('spectrum', StarGraphModel(q=2, alpha=1.), [])
    >>> doc['schema_version'], doc['model']
    (1, {'q': 2, 'alpha': 1.0, 'length': 1.0})
    """
    return {
        'schema_version': SCHEMA_VERSION,
        'command': command,
        'model': model.to_dict() if model is not None else None,
        'results': results,
        'diagnostics': dict(diagnostics or {}),
    }


def dump_json(document: Mapping[str, Any]) -> str:
    """
    Serialize a result object into JSON text, with sorted keys.

    >>> dump_json(result_document('verify', None, []))
    '{"command":"verify","diagnostics":{},"model":null,"results":[],"schema_version":1}'
    """
    return json_dumps(document)


def _csv_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_csv(rows: Iterable[Mapping[str, Any]], kind: str) -> str:
    """
    Serialize rows into CSV text with the fixed header of `kind`.

    >>> print(dump_csv([{'mu': 1.5, 'nu': 0.0, 'kind': 'GenericReal',
    ...                  'residual': 1e-16}], 'roots'), end='')
    mu,nu,kind,residual
    1.5,0.0,GenericReal,1e-16
    """
    columns = CSV_COLUMNS[validate_enum_arg('kind', kind, CSV_COLUMNS)]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_value(row[c]) for c in columns])
    return buf.getvalue()
