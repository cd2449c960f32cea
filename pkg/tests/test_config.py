import logging
import os
import unittest
from unittest.mock import patch

from dpgraph.config import Config


class TestConfig(unittest.TestCase):
    def test_log_level_from_environment(self):
        with patch.dict(os.environ, {'DPGRAPH_LOG_LEVEL': 'debug'}):
            self.assertEqual(Config.log_level(), logging.DEBUG)

    def test_unknown_log_level_falls_back_to_info(self):
        with patch.dict(os.environ, {'DPGRAPH_LOG_LEVEL': 'chatty'}):
            self.assertEqual(Config.log_level(), logging.INFO)

    def test_output_dir_override(self):
        with patch.dict(os.environ, {'DPGRAPH_OUTPUT_DIR': '/tmp/dp'}):
            self.assertEqual(Config.output_dir_override(), '/tmp/dp')
        with patch.dict(os.environ, {'DPGRAPH_OUTPUT_DIR': ''}):
            self.assertIsNone(Config.output_dir_override())

    def test_defaults(self):
        self.assertEqual(Config.BRUTE_FORCE_FVS_MAX_N, 20)
        self.assertGreaterEqual(Config.WORKERS, 1)
        self.assertEqual(Config.LOG_FORMAT, '%(asctime)s - %(levelname)s - %(message)s')


if __name__ == '__main__':
    unittest.main()
