import threading
import time
import unittest

import mock

from ptstar.settings_ import settings
from ptstar.utils import parallel_map


class ParallelMapTestCase(unittest.TestCase):

    def test_order(self):
        def f(x):
            # the later items complete first
            time.sleep(0.01 * (5 - x))
            return x * 10

        for n_jobs in (1, 2, 4):
            self.assertEqual(parallel_map(f, range(5), n_jobs=n_jobs),
                             [0, 10, 20, 30, 40])
        self.assertEqual(parallel_map(f, [], n_jobs=4), [])

    def test_threads(self):
        thread_ids = set()

        def f(x):
            thread_ids.add(threading.get_ident())
            time.sleep(0.05)
            return x

        self.assertEqual(parallel_map(f, range(4), n_jobs=1), [0, 1, 2, 3])
        self.assertEqual(thread_ids, {threading.get_ident()})

    def test_default_workers(self):
        with mock.patch.object(settings, 'num_workers', 1):
            thread_ids = set()
            _ = parallel_map(
                lambda x: thread_ids.add(threading.get_ident()), range(3))
            self.assertEqual(thread_ids, {threading.get_ident()})
