# SPDX-License-Identifier: MIT

import unittest

from nets import running_example
from wf2pt.process_tree import Operator, activity, xor
from wf2pt.reduction import reduce_to_tree
from wf2pt.serialization import BenchRow, StepLogParseError, format_step, read_bench_csv, read_step_log, \
    write_bench_csv, write_step_log


class SerializationTest(unittest.TestCase):

    def test_empty_bench_csv(self):
        self.assertEqual(b"size,micros,outcome\n", write_bench_csv([]))

    def test_bench_csv(self):
        rows = [BenchRow(12, 340, "match"), BenchRow(30, 2100, "match"), BenchRow(7, 90, "irreducible")]
        data = write_bench_csv(rows)
        self.assertEqual(4, len(data.decode("utf-8").splitlines()))
        self.assertTrue(data.endswith(b"7,90,irreducible\n"))
        self.assertEqual(rows, read_bench_csv(data))

    def test_step_line(self):
        step = reduce_to_tree(running_example()).steps[0]
        self.assertEqual("X members=[t2,t3] new=r1 label=X(b,c)", format_step(step))

    def test_step_log(self):
        steps = reduce_to_tree(running_example()).steps
        text = write_step_log(steps)
        self.assertEqual(7, len(text.splitlines()))
        self.assertEqual([step.logged() for step in steps], read_step_log(text))

    def test_blank_lines_are_skipped(self):
        steps = read_step_log("\nX members=[t2,t3] new=r1 label=X(b,c)\n\n")
        self.assertEqual(1, len(steps))
        self.assertEqual(Operator.XOR, steps[0].kind)
        self.assertEqual(xor(activity("b"), activity("c")), steps[0].new_label)

    def test_bad_lines(self):
        with self.assertRaises(StepLogParseError) as context:
            read_step_log("X members=[t2,t3] new=r1 label=X(b,c)\nmerge t2 t3\n")
        self.assertEqual(2, context.exception.line_number)
        with self.assertRaises(StepLogParseError):
            read_step_log("& members=[t2,t3] new=r1 label=X(b,c)")
        with self.assertRaises(StepLogParseError):
            read_step_log("X members=[t2,t3] new=r1 label=X(b,")


if __name__ == '__main__':
    unittest.main()
