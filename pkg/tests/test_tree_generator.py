# SPDX-License-Identifier: MIT

import logging
import os
import sys
import tempfile
import unittest

import numpy as np

from wf2pt.process_tree import Leaf, Operator, OperatorNode, activities, leaves
from wf2pt.tree_generator import GeneratorConfig, TreeGenerator, parse_probabilities_text, sample_activity_count, \
    sample_tree


def operator_nodes(tree):
    if isinstance(tree, OperatorNode):
        yield tree
        for child in tree.children:
            yield from operator_nodes(child)


class TreeGeneratorTest(unittest.TestCase):
    logging.basicConfig(stream=sys.stdout, level=logging.INFO, format='%(message)s')

    def test_same_seed_same_tree(self):
        config = GeneratorConfig(seed=42)
        self.assertEqual(sample_tree(config), sample_tree(config))
        self.assertEqual(str(sample_tree(config)), str(sample_tree(GeneratorConfig(seed=42))))

    def test_activity_count_bounds_and_mean(self):
        rng = np.random.default_rng(7)
        counts = [sample_activity_count(rng, 10, 20, 30) for _ in range(1000)]
        self.assertGreaterEqual(min(counts), 10)
        self.assertLessEqual(max(counts), 30)
        self.assertAlmostEqual(20, sum(counts) / len(counts), delta=1.5)
        self.assertEqual(5, sample_activity_count(rng, 5, 5, 5))

    def test_activities_are_unique_and_numbered(self):
        for seed in range(20):
            tree = sample_tree(GeneratorConfig(seed=seed))
            names = activities(tree)
            self.assertEqual([f"a{i}" for i in range(1, len(names) + 1)], sorted(names, key=lambda n: int(n[1:])))
            self.assertEqual(len(names), sum(1 for _ in leaves(tree)))
            self.assertTrue(10 <= len(names) <= 30)

    def test_operator_shape(self):
        for seed in range(20):
            for node in operator_nodes(sample_tree(GeneratorConfig(seed=seed))):
                if node.operator is Operator.LOOP:
                    self.assertEqual(2, len(node.children))
                else:
                    self.assertTrue(2 <= len(node.children) <= 4)

    def test_single_operator(self):
        config = GeneratorConfig(3, 5, 8, {Operator.XOR: 1.0}, seed=3)
        for node in operator_nodes(sample_tree(config)):
            self.assertEqual(Operator.XOR, node.operator)

    def test_one_numpy_generator_per_seed(self):
        first, second = TreeGenerator(GeneratorConfig(seed=5)), TreeGenerator(GeneratorConfig(seed=5))
        self.assertIsInstance(first.rng, np.random.Generator)
        self.assertEqual([first.sample() for _ in range(3)], [second.sample() for _ in range(3)])

    def test_single_activity(self):
        tree = TreeGenerator(GeneratorConfig(1, 1, 1)).sample()
        self.assertIsInstance(tree, Leaf)
        self.assertEqual("a1", str(tree))

    def test_invalid_configs(self):
        with self.assertRaises(ValueError):
            GeneratorConfig(10, 5, 30)
        with self.assertRaises(ValueError):
            GeneratorConfig(0, 1, 2)
        with self.assertRaises(ValueError):
            GeneratorConfig(operator_probabilities={Operator.SEQ: 0.5, Operator.XOR: 0.2})
        with self.assertRaises(ValueError):
            GeneratorConfig(operator_probabilities={Operator.SEQ: 1.5, Operator.XOR: -0.5})
        with self.assertRaises(ValueError):
            GeneratorConfig(seed=-1)

    def test_parse_probabilities(self):
        probabilities = parse_probabilities_text("seq=0.4,X=0.2,and=0.2,*=0.2")
        self.assertEqual({Operator.SEQ: 0.4, Operator.XOR: 0.2, Operator.AND: 0.2, Operator.LOOP: 0.2},
                         probabilities)
        self.assertEqual(0.0, parse_probabilities_text("seq=1")[Operator.LOOP])
        with self.assertRaises(ValueError):
            parse_probabilities_text("seq")

    def test_load(self):
        fd, filename = tempfile.mkstemp(suffix=".cfg")
        with os.fdopen(fd, "w") as f:
            f.write('activities = 4,6,9\n'
                    'probabilities = {"seq": 0.5, "xor": 0.5}\n'
                    'seed = 11\n'
                    'colour = red\n')
        try:
            with self.assertLogs("wf2pt.tree_generator", level="WARNING") as logs:
                config = GeneratorConfig.load(filename)
        finally:
            os.remove(filename)
        self.assertEqual((4, 6, 9), (config.low, config.mode, config.high))
        self.assertEqual(0.5, config.probabilities[Operator.SEQ])
        self.assertEqual(0.0, config.probabilities[Operator.AND])
        self.assertEqual(11, config.seed)
        self.assertIn("colour", logs.output[0])
        self.assertEqual(12, config.with_seed(12).seed)


if __name__ == '__main__':
    unittest.main()
