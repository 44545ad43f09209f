import time
from typing import *

import numpy as np

__all__ = ['ResidualCollector', 'Stopwatch']

# residuals below this floor are collected as the floor itself
RESIDUAL_FLOOR = 1e-20


class ResidualCollector(object):
    """
    Collect the statistics of root residuals, on the log10 scale.

    >>> collector = ResidualCollector()
    >>> collector.collect([1e-12, 1e-14])
    >>> collector.collect(1e-16)
    >>> collector.counter, collector.max
    (3, 1e-12)
    >>> round(float(collector.mean), 6), round(float(collector.stddev), 6)
    (-14.0, 1.632993)
    >>> collector.format()
    'residual: max 1e-12; log10 mean -14 (±1.6)'
    >>> ResidualCollector().format()
    'residual: none'
    """

    def __init__(self):
        self._mean = 0.      # E[log10 r]
        self._square = 0.    # E[(log10 r)^2]
        self._counter = 0
        self._max = 0.

    def reset(self):
        """Reset the collector to initial state."""
        self.__init__()

    @property
    def counter(self) -> int:
        return self._counter

    @property
    def has_value(self) -> bool:
        return self._counter > 0

    @property
    def max(self) -> float:
        return self._max

    @property
    def mean(self) -> float:
        """Mean of ``log10(residual)``."""
        return self._mean

    @property
    def var(self) -> float:
        return max(self._square - self._mean ** 2, 0.)

    @property
    def stddev(self) -> float:
        return float(np.sqrt(self.var))

    def collect(self, residuals: Union[float, Iterable[float]]):
        """Update the statistics from a batch of residuals."""
        values = np.asarray(residuals, dtype=np.float64).ravel()
        values = values[np.isfinite(values)]
        if not values.size:
            return
        self._max = max(self._max, float(np.max(values)))
        logs = np.log10(np.maximum(values, RESIDUAL_FLOOR))

        self._counter += values.size
        discount = values.size / self._counter
        self._mean += discount * (float(np.mean(logs)) - self._mean)
        self._square += discount * (float(np.mean(logs ** 2)) - self._square)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'count': self._counter,
            'max': self._max if self.has_value else None,
            'log10_mean': self._mean if self.has_value else None,
            'log10_std': self.stddev if self.has_value else None,
        }

    def format(self) -> str:
        if not self.has_value:
            return 'residual: none'
        return (f'residual: max {self._max:.2g}; '
                f'log10 mean {self._mean:.3g} (±{self.stddev:.2g})')


class Stopwatch(object):
    """Measure the elapsed time of a computation."""

    def __init__(self):
        self._start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._start
