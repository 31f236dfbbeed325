# SPDX-License-Identifier: MIT

import io
import os
import tempfile
import unittest
from contextlib import redirect_stdout

from nets import RUNNING_EXAMPLE_PNML, RUNNING_EXAMPLE_TREE_TEXT, build_net, deadlock, irreducible_sound
from wf2pt.cli import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK, main
from wf2pt.pnml import read_pnml_file, write_pnml


class CliTest(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config = self.path("empty.ini")
        self.write(self.config, "")

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, path, content):
        with open(path, "wb" if isinstance(content, bytes) else "w") as f:
            f.write(content)
        return path

    def read(self, path):
        with open(path) as f:
            return f.read()

    def run_main(self, *argv):
        out = io.StringIO()
        with redirect_stdout(out):
            code = main(["--config", self.config] + list(argv))
        return code, out.getvalue()

    def test_convert(self):
        net = self.write(self.path("w1.pnml"), RUNNING_EXAMPLE_PNML)
        code, out = self.run_main("convert", "--input", net, "--output", self.path("w1.tree"),
                                  "--log-steps", self.path("w1.steps"))
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(RUNNING_EXAMPLE_TREE_TEXT, out.strip())
        self.assertEqual(RUNNING_EXAMPLE_TREE_TEXT + "\n", self.read(self.path("w1.tree")))
        steps = self.read(self.path("w1.steps")).splitlines()
        self.assertEqual(7, len(steps))
        self.assertEqual("X members=[t2,t3] new=r1 label=X(b,c)", steps[0])

    def test_convert_irreducible(self):
        net = self.write(self.path("n.pnml"), write_pnml(irreducible_sound()))
        code, out = self.run_main("convert", "--input", net)
        self.assertEqual(EXIT_NEGATIVE, code)
        self.assertIn("irreducible after 0 steps: 5 places, 3 transitions", out)

    def test_convert_strict_and(self):
        net = self.write(self.path("w1.pnml"), RUNNING_EXAMPLE_PNML)
        code, out = self.run_main("convert", "--input", net, "--strict-and")
        self.assertEqual(EXIT_NEGATIVE, code)
        self.assertIn("irreducible after 2 steps", out)

    def test_convert_errors(self):
        code, _ = self.run_main("convert", "--input", self.path("missing.pnml"))
        self.assertEqual(EXIT_ERROR, code)
        net = self.write(self.path("bad.pnml"), b"<pnml><net>")
        code, _ = self.run_main("convert", "--input", net)
        self.assertEqual(EXIT_ERROR, code)

    def test_check(self):
        net = self.write(self.path("w1.pnml"), RUNNING_EXAMPLE_PNML)
        code, out = self.run_main("check", "--input", net)
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(["valid workflow net", "sound"], out.splitlines())

        code, out = self.run_main("check", "--input", net, "--max-states", "2")
        self.assertEqual(EXIT_INCONCLUSIVE, code)
        self.assertIn("inconclusive", out)

        net = self.write(self.path("deadlock.pnml"), write_pnml(deadlock()))
        code, out = self.run_main("check", "--input", net)
        self.assertEqual(EXIT_NEGATIVE, code)
        self.assertIn("cannot complete", out)

    def test_check_invalid_net(self):
        wfnet = build_net(["p_i", "p_x", "p_o"], [("t", "a", ["p_i", "p_x"], ["p_o"])])
        net = self.write(self.path("two-sources.pnml"), write_pnml(wfnet))
        code, out = self.run_main("check", "--input", net)
        self.assertEqual(EXIT_NEGATIVE, code)
        self.assertIn("p_i, p_x", out)

    def test_lang(self):
        tree = self.write(self.path("t.tree"), "X(a,->(b,c))\n")
        code, out = self.run_main("lang", "--input", tree, "--kind", "tree", "--max-length", "2")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(["a", "b,c"], out.splitlines())

        tree = self.write(self.path("loop.tree"), "*(tau,a)")
        code, out = self.run_main("lang", "--input", tree, "--kind", "tree", "--max-length", "2")
        self.assertEqual(["<>", "a", "a,a"], out.splitlines())

        net = self.write(self.path("w1.pnml"), RUNNING_EXAMPLE_PNML)
        code, out = self.run_main("lang", "--input", net, "--kind", "net", "--max-length", "5")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(8, len(out.splitlines()))
        self.assertEqual("a,b,d,e,g", out.splitlines()[0])

    def test_tree2net(self):
        tree = self.write(self.path("t.tree"), RUNNING_EXAMPLE_TREE_TEXT)
        output = self.path("t.pnml")
        code, _ = self.run_main("tree2net", "--input", tree, "--variant", "tau-bounded", "--output", output)
        self.assertEqual(EXIT_OK, code)
        self.assertIn("t0:start", read_pnml_file(output).net.transitions)

        code, out = self.run_main("convert", "--input", output)
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(RUNNING_EXAMPLE_TREE_TEXT, out.strip())

    def test_tree2net_parse_error(self):
        tree = self.write(self.path("t.tree"), "*(a,b,c)")
        code, _ = self.run_main("tree2net", "--input", tree, "--output", self.path("t.pnml"))
        self.assertEqual(EXIT_ERROR, code)

    def test_rediscover(self):
        code, out = self.run_main("rediscover", "--count", "3", "--seed", "5", "--activities", "3,5,8",
                                  "--variant", "both", "--state-file", self.path("state.bin"))
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(["6/6 match"], out.splitlines())
        self.assertTrue(os.path.exists(self.path("state.bin")))

    def test_bench(self):
        csv = self.path("bench.csv")
        code, out = self.run_main("bench", "--count", "0", "--csv", csv)
        self.assertEqual(EXIT_OK, code)
        self.assertEqual("size,micros,outcome\n", self.read(csv))
        self.assertIn("0 nets timed", out)

        code, out = self.run_main("bench", "--count", "4", "--activities", "3,5,8", "--probs", "seq=0.5,xor=0.5",
                                  "--csv", csv)
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(5, len(self.read(csv).splitlines()))

    def test_bench_bad_probabilities(self):
        code, _ = self.run_main("bench", "--count", "1", "--probs", "seq=0.5", "--csv", self.path("b.csv"))
        self.assertEqual(EXIT_ERROR, code)

    def test_verify(self):
        net = self.write(self.path("w1.pnml"), RUNNING_EXAMPLE_PNML)
        steps = self.path("w1.steps")
        self.run_main("convert", "--input", net, "--log-steps", steps)
        code, out = self.run_main("verify", "--input", net, "--steps", steps, "--max-length", "6")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual("verified", out.strip())

        tampered = self.read(steps).replace("label=X(b,c)", "label=+(b,c)", 1)
        self.write(steps, tampered)
        code, out = self.run_main("verify", "--input", net, "--steps", steps, "--max-length", "6")
        self.assertEqual(EXIT_NEGATIVE, code)
        self.assertTrue(out.startswith("violation at step 1"))


if __name__ == '__main__':
    unittest.main()
