# SPDX-License-Identifier: MIT

import unittest

from hypothesis import given, settings, strategies as st

from nets import RUNNING_EXAMPLE_TREE, RUNNING_EXAMPLE_TREE_TEXT, process_trees
from wf2pt.petri_net import ResultSetCapExceededError
from wf2pt.process_tree import TAU, Operator, OperatorNode, TreeLanguage, activities, activity, canonicalize, \
    enumerate_tree_language, loop, par, seq, shuffle, tree_depth, tree_size, trees_language_equal_canonical, xor

a, b, c, d = activity("a"), activity("b"), activity("c"), activity("d")

trace_sets = st.frozensets(st.lists(st.sampled_from("abc"), max_size=3).map(tuple), max_size=3)


def unrolled_loop_language(do, redo, k):
    """Do-part, then up to k + 2 rounds of redo-part and do-part, keeping traces of length at most k."""
    do_traces = enumerate_tree_language(do, k)
    redo_traces = enumerate_tree_language(redo, k)
    round_traces = set(do_traces)
    result = set(round_traces)
    for _ in range(k + 2):
        round_traces = {first + back + again for first in round_traces for back in redo_traces for again in do_traces
                        if len(first) + len(back) + len(again) <= k}
        result |= round_traces
    return result


class ProcessTreeTest(unittest.TestCase):

    def test_text_form(self):
        self.assertEqual(RUNNING_EXAMPLE_TREE_TEXT, str(RUNNING_EXAMPLE_TREE))
        self.assertEqual("tau", str(TAU))
        self.assertEqual("X('my act',b)", str(xor(activity("my act"), b)))
        self.assertEqual("'it''s'", str(activity("it's")))

    def test_operator_symbols(self):
        self.assertEqual(Operator.LOOP, Operator.from_symbol("*"))
        self.assertEqual("->", Operator.SEQ.symbol)
        with self.assertRaises(ValueError):
            Operator.from_symbol("&")

    def test_loop_arity(self):
        with self.assertRaises(ValueError):
            OperatorNode(Operator.LOOP, (a, b, c))
        with self.assertRaises(ValueError):
            OperatorNode(Operator.SEQ, ())

    def test_statistics(self):
        self.assertEqual(["a", "b", "c", "d", "e", "f", "g", "h"], activities(RUNNING_EXAMPLE_TREE))
        self.assertEqual(14, tree_size(RUNNING_EXAMPLE_TREE))
        self.assertEqual(5, tree_depth(RUNNING_EXAMPLE_TREE))
        self.assertEqual(0, tree_depth(a))

    def test_canonical_flattening(self):
        self.assertEqual(seq(a, b, c), canonicalize(seq(seq(a, b), c)))
        self.assertEqual(xor(a, b, c), canonicalize(xor(c, xor(b, a))))
        self.assertEqual(par(a, b), canonicalize(par(b, par(a))))

    def test_canonical_silent_children(self):
        self.assertEqual(a, canonicalize(seq(TAU, a, TAU)))
        self.assertEqual(TAU, canonicalize(par(TAU, TAU)))
        self.assertEqual(xor(a, TAU), canonicalize(xor(TAU, a)))
        self.assertEqual(loop(a, TAU), canonicalize(loop(seq(a, TAU), TAU)))

    def test_canonical_sorting_uses_text(self):
        # '-' and 'X' sort before lower case letters
        self.assertEqual("+(->(b,c),a)", str(canonicalize(par(a, seq(b, c)))))
        self.assertEqual("+(X(b,c),d)", str(canonicalize(par(d, xor(c, b)))))

    def test_canonical_equality(self):
        self.assertTrue(trees_language_equal_canonical(xor(a, seq(b, TAU)), xor(b, a)))
        self.assertFalse(trees_language_equal_canonical(seq(a, b), seq(b, a)))

    def test_canonical_is_idempotent(self):
        tree = seq(seq(TAU, xor(d, c)), par(b, par(a, TAU)), loop(seq(a), b))
        once = canonicalize(tree)
        self.assertEqual(once, canonicalize(once))
        self.assertEqual("->(X(c,d),+(a,b),*(a,b))", str(once))

    def test_shuffle(self):
        self.assertEqual({("a", "b", "c"), ("a", "c", "b"), ("c", "a", "b")},
                         shuffle([{("a", "b")}, {("c",)}]))
        self.assertEqual({()}, shuffle([]))
        self.assertEqual({("a", "c"), ("c", "a")}, shuffle([{("a",), ("a", "b")}, {("c",)}], max_length=2))

    def test_language_of_operators(self):
        self.assertEqual({("a",), ("b",)}, enumerate_tree_language(xor(a, b), 1))
        self.assertEqual({("a", "b")}, enumerate_tree_language(seq(a, b), 2))
        self.assertEqual(frozenset(), enumerate_tree_language(seq(a, b), 1))
        self.assertEqual({("a", "b"), ("b", "a")}, enumerate_tree_language(par(a, b), 2))
        self.assertEqual({()}, enumerate_tree_language(TAU, 0))

    def test_language_of_loops(self):
        self.assertEqual({("a",), ("a", "a"), ("a", "a", "a"), ("a", "a", "a", "a")},
                         enumerate_tree_language(loop(a, TAU), 4))
        self.assertEqual({("a",), ("a", "b", "a")}, enumerate_tree_language(loop(a, b), 4))
        self.assertEqual({(), ("a",), ("a", "a")}, enumerate_tree_language(loop(TAU, a), 2))

    def test_language_of_running_example(self):
        traces = enumerate_tree_language(RUNNING_EXAMPLE_TREE, 5)
        self.assertEqual(8, len(traces))
        self.assertIn(("a", "d", "b", "e", "g"), traces)
        self.assertIn(("a", "b", "d", "e", "f", "c", "d", "e", "h"), enumerate_tree_language(RUNNING_EXAMPLE_TREE, 9))

    def test_language_cache(self):
        language = TreeLanguage(cache_capacity=16)
        first = language.language(RUNNING_EXAMPLE_TREE, 6)
        self.assertIs(first, language.language(RUNNING_EXAMPLE_TREE, 6))
        self.assertGreater(len(language.cache), 1)

    def test_language_cap(self):
        wide = par(*[activity(f"a{i}") for i in range(6)])
        with self.assertRaises(ResultSetCapExceededError):
            TreeLanguage(trace_cap=100).language(wide, 6)

    def test_canonical_loop_in_do_part(self):
        self.assertEqual(loop(a, xor(b, c)), canonicalize(loop(loop(a, b), c)))
        self.assertEqual("*(a,X(->(c,*(d,b)),b))", str(canonicalize(loop(loop(a, b), seq(c, loop(d, b))))))
        self.assertEqual("*(a,X(b,c,d))", str(canonicalize(loop(loop(loop(a, d), c), b))))
        self.assertEqual(enumerate_tree_language(loop(a, xor(b, c)), 7),
                         enumerate_tree_language(loop(loop(a, b), c), 7))
        self.assertTrue(trees_language_equal_canonical(loop(loop(a, c), b), loop(a, xor(b, c))))

    @settings(max_examples=200, deadline=None)
    @given(process_trees(max_leaves=8))
    def test_canonical_form_keeps_the_language(self, tree):
        canonical = canonicalize(tree)
        self.assertEqual(canonical, canonicalize(canonical))
        self.assertEqual(enumerate_tree_language(tree, 5), enumerate_tree_language(canonical, 5))

    @settings(max_examples=100, deadline=None)
    @given(trace_sets, trace_sets, trace_sets)
    def test_shuffle_is_commutative_and_associative(self, x, y, z):
        self.assertEqual(shuffle([x, y]), shuffle([y, x]))
        self.assertEqual(shuffle([shuffle([x, y]), z]), shuffle([x, shuffle([y, z])]))
        self.assertEqual(shuffle([x, y, z]), shuffle([x, shuffle([y, z])]))

    @settings(max_examples=100, deadline=None)
    @given(process_trees(max_leaves=4), process_trees(max_leaves=4), st.integers(min_value=0, max_value=5))
    def test_loop_language_is_complete(self, do, redo, k):
        self.assertEqual(unrolled_loop_language(do, redo, k), enumerate_tree_language(loop(do, redo), k))


if __name__ == '__main__':
    unittest.main()
