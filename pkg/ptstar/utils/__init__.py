from . import json_utils, misc, parallel

from .json_utils import *
from .misc import *
from .parallel import *


__all__ = list(
    sum([json_utils.__all__, misc.__all__, parallel.__all__],
        [])
)
