import sys
import os
import tempfile
import unittest
import logging

import numpy as np
import pandas as pd

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.config import RunConfig
from app.reports import build_document, input_hash, load_result, write_result, write_tsv

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)


class TestReports(unittest.TestCase):
    """
    JSON result documents and TSV tables
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = RunConfig(command="betti", scale=1.0, output_dir=self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_input_hash(self):
        self.assertEqual(input_hash({"a": 1, "b": [1, 2]}), input_hash({"b": [1, 2], "a": 1}))
        self.assertNotEqual(input_hash({"a": 1}), input_hash({"a": 2}))
        self.assertEqual(len(input_hash([])), 64)

    def test_document_is_reproducible(self):
        payload = {"groups": [1, 0]}
        a = build_document(payload, self.config, {"x": 1}, created_at="t0")
        b = build_document(payload, self.config, {"x": 1}, created_at="t0")
        self.assertEqual(a, b)
        self.assertEqual(sorted(a), ["config", "created_at", "input_hash", "result"])
        self.assertEqual(a["config"]["command"], "betti")

    def test_write_and_load(self):
        payload = {"rank": np.int64(3), "values": np.array([1.5, 2.0]), "ids": {2, 1}}
        path = write_result("betti", payload, self.config, {"space": "square"})
        self.assertEqual(path, os.path.join(self.tmp.name, "betti.json"))
        document = load_result(path)
        self.assertEqual(document["result"], {"rank": 3, "values": [1.5, 2.0], "ids": [1, 2]})
        self.assertEqual(document["input_hash"], input_hash({"space": "square"}))

    def test_tsv(self):
        rows = [{"r": 1.0, "degree": 0, "betti": 1, "persistent_rank": 1, "extra": "x"}]
        path = write_tsv("tower", rows, ["r", "degree", "betti", "persistent_rank"], self.tmp.name)
        frame = pd.read_csv(path, sep="\t")
        self.assertEqual(list(frame.columns), ["r", "degree", "betti", "persistent_rank"])
        self.assertEqual(frame.iloc[0]["betti"], 1)


if __name__ == "__main__":
    unittest.main()
