import sys
import os
import tempfile
import unittest
import logging

import pandas as pd

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.reports import load_result
from main import main

# Configure logging
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
logger = logging.getLogger(__name__)

SQUARE_CSV = """0,1,1.4142135623730951,1
1,0,1,1.4142135623730951
1.4142135623730951,1,0,1
1,1.4142135623730951,1,0
"""


class TestCommandLine(unittest.TestCase):
    """
    End-to-end runs of the command line
    """

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmp.name, "results")
        self.square = os.path.join(self.tmp.name, "square.csv")
        with open(self.square, "w", encoding="utf-8") as f:
            f.write(SQUARE_CSV)

    def tearDown(self):
        self.tmp.cleanup()

    def run_cli(self, *argv):
        return main(["--output-dir", self.out, "--threads", "2", *argv])

    def result(self, stem):
        return load_result(os.path.join(self.out, f"{stem}.json"))

    def test_betti_of_a_square(self):
        self.assertEqual(self.run_cli("betti", "--input", self.square, "--scale", "1.0"), 0)
        document = self.result("betti")
        ranks = [g["free_rank"] for g in document["result"]["groups"]]
        self.assertEqual(ranks, [1, 1, 0])
        self.assertEqual(document["config"]["scale"], 1.0)
        self.assertEqual(len(document["input_hash"]), 64)

    def test_rips(self):
        self.assertEqual(self.run_cli("rips", "--input", self.square, "--scale", "1.5", "--max-dim", "3"), 0)
        self.assertEqual(self.result("rips")["result"]["counts"], [4, 6, 4, 1])

    def test_generated_space_reloads(self):
        self.assertEqual(self.run_cli("gen", "--space", "grid", "--dim", "1", "--half-extent", "3"), 0)
        path = os.path.join(self.out, "space_grid1d.json")
        self.assertTrue(os.path.exists(path))
        self.assertEqual(self.run_cli("betti", "--input", path, "--scale", "1.5", "--max-dim", "1"), 0)
        ranks = [g["free_rank"] for g in self.result("betti")["result"]["groups"]]
        self.assertEqual(ranks, [1, 0])

    def test_coarse_line_writes_a_table(self):
        code = self.run_cli("coarse", "--space", "grid", "--dim", "1", "--half-extent", "12",
                            "--scale", "1.5", "--max-dim", "2")
        self.assertEqual(code, 0)
        degrees = self.result("coarse")["result"]["degrees"]
        self.assertEqual([d["rank"] for d in degrees], [0, 1, 0])
        self.assertEqual(degrees[1]["verdict"], "STABILIZED(1)")
        frame = pd.read_csv(os.path.join(self.out, "coarse_tower.tsv"), sep="\t")
        self.assertEqual(list(frame.columns), ["r", "degree", "betti", "persistent_rank"])
        self.assertEqual(len(frame), 12 * 2)

    def test_full_cochain(self):
        self.assertEqual(self.run_cli("--ring", "z", "full-cochain", "--input", self.square, "--max-degree", "2"), 0)
        ranks = [g["free_rank"] for g in self.result("full-cochain")["result"]["groups"]]
        self.assertEqual(ranks, [1, 0, 0])

    def test_verify_homotopy(self):
        code = self.run_cli("--ring", "q", "verify-homotopy", "--space", "grid", "--dim", "1",
                            "--half-extent", "4", "--count", "2", "--max-degree", "2", "--seed", "3")
        self.assertEqual(code, 0)
        self.assertEqual(self.result("verify-homotopy")["result"]["verdict"], "PASS")
        self.assertEqual(self.result("verify-homotopy")["config"]["seed"], 3)

    def test_usage_errors(self):
        self.assertEqual(main([]), 2)
        self.assertEqual(main(["--bogus"]), 2)
        self.assertEqual(main(["-v", "-q", "betti"]), 2)
        self.assertEqual(self.run_cli("betti"), 2)
        self.assertEqual(self.run_cli("betti", "--space", "grid", "--input", self.square), 2)
        self.assertEqual(self.run_cli("check-acyclic", "--space", "grid"), 2)
        self.assertEqual(self.run_cli("--ring", "z", "fill", "--space", "grid", "--half-extent", "3"), 2)
        self.assertEqual(self.run_cli("tower", "--space", "grid", "--r-grid", "3,2"), 2)
        self.assertEqual(self.run_cli("tower", "--space", "grid", "--subset", "nowhere"), 2)
        self.assertFalse(os.path.exists(self.out))

    def test_computation_errors(self):
        self.assertEqual(self.run_cli("betti", "--input", os.path.join(self.tmp.name, "missing.csv")), 1)
        code = self.run_cli("complement", "--space", "grid", "--half-extent", "3", "--subset", "base",
                            "--r-grid", "1,5", "--max-dim", "1")
        self.assertEqual(code, 1)


if __name__ == "__main__":
    unittest.main()
