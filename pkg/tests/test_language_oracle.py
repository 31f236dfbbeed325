# SPDX-License-Identifier: MIT

import unittest

from hypothesis import given, settings, strategies as st

from nets import RUNNING_EXAMPLE_TREE, build_net, running_example
from wf2pt.language_oracle import LanguageStatus, StepLogStatus, bounded_language_equal, verify_step_log
from wf2pt.petri_net import StateSpaceCaps
from wf2pt.process_tree import TAU, Operator, activity, loop, par, seq, xor
from wf2pt.reduction import LoggedStep, ReducedTree, reduce_to_tree
from wf2pt.tree_generator import GeneratorConfig, sample_tree
from wf2pt.tree_to_net import TranslationVariant, tree_to_wfnet

a, b = activity("a"), activity("b")


class LanguageOracleTest(unittest.TestCase):

    def test_running_example_net_and_tree(self):
        verdict = bounded_language_equal(running_example(), RUNNING_EXAMPLE_TREE, 7)
        self.assertEqual(LanguageStatus.EQUAL, verdict.status)
        self.assertEqual("equal", str(verdict))

    def test_choice_is_not_sequence(self):
        verdict = bounded_language_equal(xor(a, b), seq(a, b), 2)
        self.assertEqual(LanguageStatus.UNEQUAL, verdict.status)
        self.assertEqual(("a",), verdict.witness)
        self.assertEqual("first", verdict.side)
        self.assertEqual("unequal: <a> only in the first language", str(verdict))

    def test_loop_unrolling(self):
        verdict = bounded_language_equal(loop(a, TAU), a, 4)
        self.assertEqual(("a", "a"), verdict.witness)
        self.assertEqual("first", verdict.side)

    def test_symmetric_and_reflexive(self):
        forward = bounded_language_equal(seq(a, b), par(a, b), 3)
        backward = bounded_language_equal(par(a, b), seq(a, b), 3)
        self.assertEqual(forward.witness, backward.witness)
        self.assertEqual(("b", "a"), forward.witness)
        self.assertEqual("second", forward.side)
        self.assertEqual("first", backward.side)
        self.assertTrue(bounded_language_equal(running_example(), running_example(), 6).equal)

    def test_inconclusive_on_caps(self):
        verdict = bounded_language_equal(running_example(), RUNNING_EXAMPLE_TREE, 7, StateSpaceCaps(max_states=5))
        self.assertEqual(LanguageStatus.INCONCLUSIVE, verdict.status)
        self.assertFalse(verdict.equal)

    def test_negative_length(self):
        with self.assertRaises(ValueError):
            bounded_language_equal(a, b, -1)

    def test_verify_running_example_log(self):
        outcome = reduce_to_tree(running_example())
        verdict = verify_step_log(running_example(), outcome.steps, 6)
        self.assertTrue(verdict.verified, str(verdict))

    def test_verify_detects_tampered_label(self):
        steps = [step.logged() for step in reduce_to_tree(running_example()).steps]
        steps[0] = LoggedStep(Operator.XOR, steps[0].members, steps[0].new_transition,
                              par(activity("b"), activity("c")))
        verdict = verify_step_log(running_example(), steps, 6)
        self.assertEqual(StepLogStatus.VIOLATION, verdict.status)
        self.assertEqual(0, verdict.step_index)

    def test_verify_detects_wrong_members(self):
        steps = [LoggedStep(Operator.SEQ, ("t1", "t2"), "r1", seq(activity("a"), activity("b")))]
        verdict = verify_step_log(running_example(), steps, 4)
        self.assertEqual(StepLogStatus.VIOLATION, verdict.status)
        self.assertEqual(0, verdict.step_index)

    def test_verify_empty_log(self):
        wfnet = build_net(["p_i", "p_o"], [("t", "a", ["p_i"], ["p_o"])])
        self.assertTrue(verify_step_log(wfnet, [], 6).verified)

    def test_verify_inconclusive(self):
        outcome = reduce_to_tree(running_example())
        verdict = verify_step_log(running_example(), outcome.steps, 6, StateSpaceCaps(max_states=3))
        self.assertEqual(StepLogStatus.INCONCLUSIVE, verdict.status)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 32))
    def test_every_step_preserves_language_and_soundness(self, seed):
        tree = sample_tree(GeneratorConfig(2, 4, 6, seed=seed))
        wfnet = tree_to_wfnet(tree, TranslationVariant.MINIMAL)
        outcome = reduce_to_tree(wfnet)
        self.assertIsInstance(outcome, ReducedTree)
        verdict = verify_step_log(wfnet, outcome.steps, 4)
        self.assertTrue(verdict.verified, str(verdict))


if __name__ == '__main__':
    unittest.main()
