__version__ = '0.1.0'


from . import (anomalous, cli, config, diagnostics, errors, formatting, model,
               roots, secular, serialization, utils)

from .anomalous import *
from .config import *
from .diagnostics import *
from .errors import *
from .formatting import *
from .model import *
from .roots import *
from .secular import *
from .serialization import *
from .settings_ import *
