import codecs
import inspect
import json
import os
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import *

import yaml

from .utils import NOT_SET, parse_complex

__all__ = [
    'ConfigValidationError',
    'field_checker', 'root_checker', 'config_field', 'ConfigField',
    'ConfigMeta', 'Config', 'validate_config', 'config_to_dict',
    'config_defaults', 'ConfigLoader',
]

TConfig = TypeVar('TConfig')

# special attributes of a Config class
_FIELDS = '__ptstar_config_fields__'
_CHECKERS = '__ptstar_config_checkers__'

# special attribute of a checker classmethod
_CHECKER_PARAMS = '__ptstar_config_checker_params__'


class ConfigValidationError(ValueError):
    """Represent a config validation error."""

    def __init__(self,
                 path: str,
                 message: str,
                 causes: Optional[Sequence[Exception]] = None):
        """
        Construct a new :class:`ConfigValidationError`.

        Args:
            path: Dotted path of the field from the root config.
            message: Message of the error.
            causes: Underlying causes of this error.
        """
        super().__init__(path, message, tuple(causes or ()))

    @property
    def path(self) -> str:
        return self.args[0]

    @property
    def message(self) -> str:
        return self.args[1]

    @property
    def causes(self) -> Tuple[Exception, ...]:
        return self.args[2]

    def __str__(self):
        buf = []
        if self.message:
            buf.append(self.message)
        if self.causes:
            buf.append('caused by:\n* ' + '\n* '.join(
                f'{c.__class__.__qualname__}: {c}' for c in self.causes))
        err_msg = '\n'.join(buf)
        if self.path:
            err_msg = f'at {self.path}: {err_msg}' if err_msg \
                else f'at {self.path}'
        return err_msg


@dataclass
class ConfigField(object):
    """Definition of a :class:`Config` field."""

    name: Optional[str] = None
    type: Any = Any
    default: Any = NOT_SET
    default_factory: Any = NOT_SET
    description: Optional[str] = None
    choices: Optional[List[Any]] = None
    required: bool = True
    envvar: Optional[str] = None

    def copy(self, **kwargs) -> 'ConfigField':
        values = dict(self.__dict__)
        values.update(kwargs)
        return ConfigField(**values)

    def get_default(self) -> Any:
        if self.envvar is not None:
            env_value = os.environ.get(self.envvar, '')
            if env_value:
                return env_value
        if self.default_factory is not NOT_SET:
            return self.default_factory()
        return self.default


@dataclass
class _CheckerParams(object):
    fields: Optional[Tuple[str, ...]]  # None for root checkers
    method: classmethod
    pre: bool = False


def _register_checker(method, params_factory):
    if not isinstance(method, classmethod):
        method = classmethod(method)
    if not hasattr(method, _CHECKER_PARAMS):
        setattr(method, _CHECKER_PARAMS, [])
    getattr(method, _CHECKER_PARAMS).append(params_factory(method))
    return method


def field_checker(*fields, pre: bool = False):
    """
    Decorator to register a class method as a field checker in :class:`Config`.

    The checker receives `cls`, the field value, and optionally `values`
    (a dict of all field values) and `field` (the field name) as named
    arguments.  It returns the (possibly converted) field value.

    >>> class RangeConfig(Config):
    ...     low: float = 0.
    ...     high: float = 1.
    ...
    ...     @field_checker('high')
    ...     def _check_high(cls, v, values):
    ...         if v <= values['low']:
    ...             raise ValueError('high must be greater than low')
    ...         return v

    >>> validate_config(RangeConfig(high='2'))
    RangeConfig(high=2.0, low=0.0)
    >>> validate_config(RangeConfig(high=-1))
    Traceback (most recent call last):
       ...
    ptstar.config.ConfigValidationError: at high: caused by:
    * ValueError: high must be greater than low

    Args:
        *fields: The fields to be checked.
        pre: Whether or not this checker should run before the field values
            are converted into their declared types?
    """
    def wrapper(method):
        return _register_checker(
            method, lambda m: _CheckerParams(fields=fields, method=m, pre=pre))
    return wrapper


def root_checker(pre: bool = False):
    """
    Decorator to register a class method as a root checker in :class:`Config`.

    The checker receives `cls` and a dict of all field values, and returns
    the (possibly modified) dict, or :obj:`None` to keep it unchanged.

    Args:
        pre: Whether or not this checker should run before the field values
            are converted into their declared types?
    """
    def wrapper(method):
        return _register_checker(
            method, lambda m: _CheckerParams(fields=None, method=m, pre=pre))
    return wrapper


def config_field(type: Optional[Type] = None,
                 default: Any = NOT_SET,
                 default_factory: Callable[[], Any] = NOT_SET,
                 description: Optional[str] = None,
                 choices: Optional[Sequence[Any]] = None,
                 required: bool = True,
                 envvar: Optional[str] = None) -> ConfigField:
    """
    Define a :class:`Config` field.

    Args:
        type: Type of the field.  Ignored if the field has a type annotation.
        default: The default value of this field.
        default_factory: A function ``() -> Any``, which returns the
            default value of this field.
        description: Description of this field.
        choices: Valid values for this field to take.
        required: Whether or not this field must have a value?
        envvar: The environmental variable to read the default value from.

    Returns:
        The config field object.
    """
    if default is not NOT_SET and default_factory is not NOT_SET:
        raise ValueError('`default` and `default_factory` cannot be both '
                         'specified.')
    return ConfigField(
        type=Any if type is None else type,
        default=default,
        default_factory=default_factory,
        description=description,
        choices=list(choices) if choices is not None else None,
        required=required,
        envvar=envvar,
    )


def _is_optional(type_) -> bool:
    return getattr(type_, '__origin__', None) is Union and \
        type(None) in type_.__args__


class ConfigMeta(type):
    """
    Meta class for :class:`Config`.

    Collects the field definitions and the checkers of a :class:`Config`
    subclass, including the ones inherited from its parents.
    """

    def __new__(mcs, name, parents, dct):
        fields: Dict[str, ConfigField] = {}
        checkers: List[_CheckerParams] = []

        for parent in parents:
            for key, val in getattr(parent, _FIELDS, {}).items():
                fields.setdefault(key, val)
            for cp in getattr(parent, _CHECKERS, ()):
                if cp not in checkers:
                    checkers.append(cp)

        annotations = dct.get('__annotations__', {})
        for key in list(dct):
            val = dct[key]
            if isinstance(val, classmethod):
                checkers.extend(getattr(val, _CHECKER_PARAMS, ()))
            elif isinstance(val, type) and issubclass(val, Config):
                # nested config class
                fields[key] = ConfigField(name=key, type=val,
                                          default_factory=val)
            elif not isinstance(val, (property, staticmethod, type)) and \
                    not inspect.isfunction(val) and not key.startswith('_'):
                if isinstance(val, ConfigField):
                    fi = val.copy(name=key)
                else:
                    fi = ConfigField(name=key, default=val)
                if key in annotations:
                    fi.type = annotations[key]
                fields[key] = fi
                if fi.default is NOT_SET:
                    del dct[key]
                else:
                    dct[key] = fi.default

        for key, type_ in annotations.items():
            if not key.startswith('_') and key not in dct and \
                    (key not in fields or fields[key].name is None):
                fields[key] = ConfigField(name=key, type=type_)

        # `Optional[T]` fields default to None
        for key, fi in list(fields.items()):
            if _is_optional(fi.type) and fi.default is NOT_SET and \
                    fi.default_factory is NOT_SET:
                fields[key] = fi.copy(default=None)

        dct[_FIELDS] = fields
        dct[_CHECKERS] = checkers
        return super().__new__(mcs, name, parents, dct)


class Config(metaclass=ConfigMeta):
    """
    Base class for config classes with type checking.

    >>> class GridConfig(Config):
    ...     size: int = 64
    ...     tol: Optional[float]

    >>> cfg = GridConfig(size='128')
    >>> cfg
    GridConfig(size='128', tol=None)
    >>> validate_config(cfg)
    GridConfig(size=128, tol=None)
    >>> GridConfig(other=1)
    Traceback (most recent call last):
        ...
    ValueError: Field 'other' is not defined for config class: GridConfig
    """

    def __init__(self, **kwargs):
        fields = getattr(self.__class__, _FIELDS)
        for key, value in kwargs.items():
            if key not in fields:
                raise ValueError(f'Field {key!r} is not defined for config '
                                 f'class: {self.__class__.__qualname__}')
            setattr(self, key, value)

        for key, fi in fields.items():
            if key not in self.__dict__:
                default_val = fi.get_default()
                if default_val is not NOT_SET:
                    setattr(self, key, default_val)

    def __getitem__(self, key: str) -> Any:
        return getattr(self, key)

    def __setitem__(self, key, value):
        setattr(self, key, value)

    def __iter__(self) -> Iterator[str]:
        return iter(self.__dict__)

    def __len__(self) -> int:
        return len(self.__dict__)

    def __contains__(self, item):
        return item in self.__dict__

    def __eq__(self, other):
        return isinstance(other, self.__class__) and \
            self.__dict__ == other.__dict__

    def __repr__(self):
        name = self.__class__.__qualname__
        attributes = ', '.join(f'{key}={self[key]!r}' for key in sorted(self))
        return f'{name}({attributes})'


def _check_value(type_, value, path: str):
    if type_ is Any or type_ is None:
        return value

    origin = getattr(type_, '__origin__', None)
    if origin is Union:
        args = [t for t in type_.__args__ if t is not type(None)]
        if value is None:
            if len(args) < len(type_.__args__):
                return None
            raise ValueError('null value is not allowed')
        errors = []
        for t in args:
            try:
                return _check_value(t, value, path)
            except Exception as ex:
                errors.append(ex)
        raise ConfigValidationError(path, 'no type in the union matches',
                                    errors)
    if origin in (list, List, tuple, Tuple):
        if isinstance(value, (str, bytes)) or \
                not hasattr(value, '__iter__'):
            raise TypeError(f'value is not a sequence: {value!r}')
        args = getattr(type_, '__args__', None) or (Any,)
        return list(_check_value(args[0], v, f'{path}[{i}]')
                    for i, v in enumerate(value))

    if isinstance(type_, type):
        if issubclass(type_, Config):
            if isinstance(value, Mapping):
                value = type_(**value)
            return validate_config(value, _path=path)
        if isinstance(value, type_) and not (
                type_ in (int, float) and isinstance(value, bool)):
            return value
        if value is None:
            raise ValueError('null value is not allowed')
        if issubclass(type_, Enum):
            try:
                return type_(value)
            except ValueError:
                return type_[str(value)]
        if issubclass(type_, bool):
            if isinstance(value, str):
                lowered = value.strip().lower()
                if lowered in ('1', 'true', 'on', 'yes'):
                    return True
                if lowered in ('0', 'false', 'off', 'no'):
                    return False
            elif isinstance(value, (int, float)) and value in (0, 1):
                return bool(value)
            raise TypeError(f'value is not a boolean: {value!r}')
        if issubclass(type_, int):
            float_value = float(value)
            if not float_value.is_integer():
                raise TypeError(f'value is not an integer: {value!r}')
            return int(float_value)
        if issubclass(type_, float):
            return float(value)
        if issubclass(type_, complex):
            return parse_complex(value)
        if issubclass(type_, str):
            return str(value)
        raise TypeError(f'value is not an instance of '
                        f'{type_.__qualname__}: {value!r}')
    return value


def _call_checker(cp: _CheckerParams, cls, value, values, field_name):
    method = cp.method.__get__(cls, cls)
    if cp.fields is None:
        ret = method(values)
        return values if ret is None else ret
    params = inspect.signature(method).parameters
    kwargs = {}
    if 'values' in params:
        kwargs['values'] = values
    if 'field' in params:
        kwargs['field'] = field_name
    return method(value, **kwargs)


def validate_config(config: TConfig, _path: str = '') -> TConfig:
    """
    Check and convert the field values of a :class:`Config` object.

    Args:
        config: The config object.

    Returns:
        A new config object with validated field values.

    Raises:
        ConfigValidationError: If any field value is invalid.
    """
    cls = config.__class__
    fields: Dict[str, ConfigField] = getattr(cls, _FIELDS)
    checkers: List[_CheckerParams] = getattr(cls, _CHECKERS)
    prefix = f'{_path}.' if _path else ''

    def run_checkers(values, pre):
        for cp in checkers:
            if cp.pre != pre:
                continue
            if cp.fields is None:
                try:
                    values = _call_checker(cp, cls, None, values, None)
                except ConfigValidationError:
                    raise
                except Exception as ex:
                    raise ConfigValidationError(_path, '', [ex])
            else:
                for name in cp.fields:
                    if name in values:
                        try:
                            values[name] = _call_checker(
                                cp, cls, values[name], values, name)
                        except ConfigValidationError:
                            raise
                        except Exception as ex:
                            raise ConfigValidationError(
                                prefix + name, '', [ex])
        return values

    values = run_checkers(dict(config.__dict__), pre=True)

    for name, fi in fields.items():
        path = prefix + name
        if name not in values:
            if fi.required:
                raise ConfigValidationError(
                    path, f'field {name!r} is required, but its value is '
                          f'not specified')
            continue
        try:
            values[name] = _check_value(fi.type, values[name], path)
        except ConfigValidationError:
            raise
        except Exception as ex:
            raise ConfigValidationError(path, '', [ex])
        if fi.choices is not None and values[name] not in fi.choices:
            raise ConfigValidationError(
                path, f'invalid value for field {name!r}: not one of '
                      f'{fi.choices!r}')

    values = run_checkers(values, pre=False)

    ret = object.__new__(cls)
    ret.__dict__.update(values)
    return ret


def config_to_dict(o: 'Config', flatten: bool = False) -> Dict[str, Any]:
    """
    Cast a :class:`Config` instance into a dict.

    >>> cfg = Config()
    >>> cfg.a = 1
    >>> config_to_dict(cfg)
    {'a': 1}

    Args:
        o: The config object.
        flatten: Whether or not to flatten nested config objects into
            dotted keys?

    Returns:
        The dict.
    """
    if not isinstance(o, Config):
        raise TypeError(f'`o` is not a Config object: {o!r}')
    dct = {}
    for key in o:
        val = o[key]
        if isinstance(val, Config):
            sub = config_to_dict(val, flatten=flatten)
            if flatten:
                for sub_key, sub_val in sub.items():
                    dct[f'{key}.{sub_key}'] = sub_val
            else:
                dct[key] = sub
        elif isinstance(val, Enum):
            dct[key] = val.value
        else:
            dct[key] = val
    return dct


def config_defaults(config: Union[TConfig, Type[TConfig]]) -> TConfig:
    """Get an instance of the config class with all fields at defaults."""
    config_cls = config if isinstance(config, type) else config.__class__
    if not issubclass(config_cls, Config):
        raise TypeError(f'`config` is neither an instance of Config, nor a '
                        f'subclass of Config: got {config!r}')
    return config_cls()


class ConfigLoader(Generic[TConfig]):
    """
    A class to help load config values from multiple sources.

    Values loaded later override values loaded earlier.  Dotted keys address
    the fields of nested configs:

    >>> class Inner(Config):
    ...     value: int = 1

    >>> class Outer(Config):
    ...     name: str = 'x'
    ...     inner = Inner

    >>> loader = ConfigLoader(Outer)
    >>> loader.load_object({'inner.value': '3'})
    >>> loader.load_object({'name': 'y'})
    >>> loader.get()
    Outer(inner=Inner(value=3), name='y')
    """

    def __init__(self, config_or_cls: Union[Type[TConfig], TConfig]):
        if isinstance(config_or_cls, type):
            config_cls = config_or_cls
            config = config_or_cls()
        else:
            config_cls = config_or_cls.__class__
            config = config_or_cls
        if not issubclass(config_cls, Config):
            raise TypeError(f'`config_or_cls` is neither a Config class, '
                            f'nor a Config instance: {config_or_cls!r}')
        self._config_cls = config_cls
        self._config = config

    @property
    def config_cls(self) -> Type[TConfig]:
        return self._config_cls

    def get(self) -> TConfig:
        """Get the validated config object."""
        return validate_config(self._config)

    def load_object(self, key_values: Mapping[str, Any]):
        """
        Load config values from a (possibly nested) dict.

        Args:
            key_values: The dict.  Keys may contain "." to address nested
                config fields.
        """
        if not isinstance(key_values, Mapping):
            raise TypeError(f'`key_values` must be a dict: got {key_values!r}')

        for key, value in key_values.items():
            parts = key.split('.')
            target = self._config
            for part in parts[:-1]:
                child = getattr(target, part, None)
                if not isinstance(child, Config):
                    raise ValueError(f'at .{key}: {part!r} is not a nested '
                                     f'config')
                target = child
            part = parts[-1]
            current = getattr(target, part, None)
            if isinstance(current, Config) and isinstance(value, Mapping):
                sub_loader = ConfigLoader(current)
                sub_loader.load_object(value)
            else:
                setattr(target, part, value)

    def load_json(self, path: Union[str, bytes, os.PathLike]):
        """Load config values from a JSON file."""
        with codecs.open(path, 'rb', 'utf-8') as f:
            self.load_object(json.load(f))

    def load_yaml(self, path: Union[str, bytes, os.PathLike]):
        """Load config values from a YAML file."""
        with codecs.open(path, 'rb', 'utf-8') as f:
            obj = yaml.load(f, Loader=yaml.SafeLoader)
            if obj is not None:
                self.load_object(obj)

    def load_file(self, path: Union[str, bytes, os.PathLike]):
        """
        Load config values from a file, according to its extension.
        Supported extensions are ``*.yml, *.yaml, *.json``.
        """
        ext = os.path.splitext(path)[1].lower()
        if ext in ('.yml', '.yaml'):
            self.load_yaml(path)
        elif ext in ('.json',):
            self.load_json(path)
        else:
            raise IOError(f'Unsupported config file extension: {ext}')
