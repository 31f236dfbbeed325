# SPDX-License-Identifier: MIT

import unittest

from wf2pt.profiler import NullProfiler, SectionProfiler


class FakeClock:
    def __init__(self) -> None:
        self.now = 0.0

    def __call__(self) -> float:
        return self.now


class ProfilerTest(unittest.TestCase):

    def test_nested_sections(self):
        clock = FakeClock()
        reports = []
        profiler = SectionProfiler(clock=clock, printer=reports.append)
        with profiler.section("reduce"):
            for _ in range(3):
                with profiler.section("detect"):
                    clock.now += 1.0
                with profiler.section("rewrite"):
                    clock.now += 0.5
        self.assertEqual(4.5, profiler.total_seconds("reduce"))
        self.assertEqual(3, profiler.sections["detect"].samples)
        self.assertEqual(1.5, profiler.total_seconds("rewrite"))
        self.assertEqual(0.0, profiler.total_seconds("generate"))

        profiler.report(0)
        lines = reports[0].splitlines()
        self.assertEqual(["reduce", "detect", "rewrite"], [line.split(":")[0].strip() for line in lines])
        self.assertIn("( 66.67%)", lines[1])

    def test_report_period(self):
        clock = FakeClock()
        reports = []
        profiler = SectionProfiler(clock=clock, printer=reports.append)
        profiler.start_section("reduce")
        profiler.end_section()
        profiler.report(30)
        self.assertEqual([], reports)
        clock.now = 31
        profiler.report(30)
        self.assertEqual(1, len(reports))

    def test_misuse(self):
        profiler = SectionProfiler(clock=FakeClock())
        with self.assertRaises(ValueError):
            profiler.start_section("")
        with self.assertRaises(ValueError):
            profiler.end_section("detect")
        with self.assertRaises(ValueError):
            profiler.end_section()
        profiler.start_section("detect")
        with self.assertRaises(ValueError):
            profiler.start_section("detect")

    def test_null_profiler(self):
        profiler = NullProfiler()
        with profiler.section("reduce"):
            pass
        profiler.report(0)


if __name__ == '__main__':
    unittest.main()
