import dataclasses
import itertools
from fractions import Fraction

from django.test import SimpleTestCase, override_settings

from netbound import corpus
from netbound.bounds import BoundDirection
from netbound.exceptions import (
    AlphabetMismatch, BudgetExceeded, FunctionDemandPresent, InvalidCode, OverlappingSets,
)
from netbound.netcore import split_sinks, wants
from netbound.oracles import (
    check_code, cutset_check, exhaustive_search, max_flow_min_cut, routing_check, verify_direction,
)
from netbound.transforms import merge_nodes

XNOR_OR_RATES = {"M1": 1, "M2": 2}


class TestMaxFlow(SimpleTestCase):
    def test_butterfly(self):
        cut = max_flow_min_cut(corpus.butterfly(), {"s1", "s2"}, {"t1"})
        self.assertEqual(cut.value, 2)
        self.assertEqual(sum((cut.flow[i] for i in ("s1-t1", "q-t1")), Fraction(0)), 2)

    def test_y_network_cut_is_closest_to_the_sink(self):
        cut = max_flow_min_cut(corpus.y_network(1, 1, 3), {"x1", "x2"}, {"y"})
        self.assertEqual(cut.value, 2)
        self.assertEqual(cut.forward_links, ("r1", "r2"))
        self.assertEqual(cut.source_side, frozenset({"x1", "x2"}))

    def test_overlapping_sets(self):
        with self.assertRaises(OverlappingSets):
            max_flow_min_cut(corpus.butterfly(), {"s1", "r"}, {"r"})


class TestCutsetAndRouting(SimpleTestCase):
    def test_cutset(self):
        self.assertTrue(cutset_check(corpus.butterfly(), {"M1": 1, "M2": 1}).passed)
        report = cutset_check(corpus.butterfly(), {"M1": 2, "M2": 2})
        self.assertFalse(report.passed)
        self.assertEqual((report.sink, report.messages), ("t1", ("M2",)))
        self.assertEqual((report.rate_sum, report.cut_value), (2, 1))

    def test_routing_needs_coding_at_unit_rates(self):
        self.assertFalse(routing_check(corpus.butterfly(), {"M1": 1, "M2": 1}).feasible)
        half = Fraction(1, 2)
        report = routing_check(corpus.butterfly(), {"M1": half, "M2": half})
        self.assertTrue(report.feasible)
        self.assertEqual(report.flows["M2", "t1"]["r-q"], half)

    def test_function_demands_refused(self):
        net = corpus.y_network(demands=[corpus.counterexample_demand()])
        with self.assertRaises(FunctionDemandPresent):
            cutset_check(net, XNOR_OR_RATES)
        with self.assertRaises(FunctionDemandPresent):
            routing_check(net, XNOR_OR_RATES)


@override_settings(NETBOUND={"SEARCH_BUDGET": 10**6})
class TestExhaustiveSearch(SimpleTestCase):
    def test_butterfly_needs_coding(self):
        outcome = exhaustive_search(corpus.butterfly(), 1, rates={"M1": 1, "M2": 1})
        self.assertTrue(outcome.found)
        self.assertEqual(outcome.space, 65536)
        self.assertEqual(check_code(corpus.butterfly(), outcome.code), [])

    def test_function_on_y_network(self):
        net = corpus.y_network(1, 2, 1)
        outcome = exhaustive_search(net, 1, [corpus.counterexample_demand()], XNOR_OR_RATES)
        self.assertTrue(outcome.found)
        self.assertEqual(outcome.space, 4 * 256 * 256)
        self.assertEqual(check_code(net, outcome.code, [corpus.counterexample_demand()]), [])

    def test_function_on_two_relays_without_d(self):
        outcome = exhaustive_search(corpus.two_relay(d=0), 1, [corpus.counterexample_demand()], XNOR_OR_RATES)
        self.assertFalse(outcome.found)
        self.assertEqual(outcome.count, 16384)
        self.assertEqual(outcome.space, 16384)

    def test_affine_function_on_two_relays_without_d(self):
        outcome = exhaustive_search(corpus.two_relay(d=0), 1, [corpus.affine_demand()], XNOR_OR_RATES)
        self.assertTrue(outcome.found)

    def test_budget(self):
        with self.assertRaises(BudgetExceeded) as cm:
            exhaustive_search(corpus.y_network(1, 2, 1), 1, [corpus.counterexample_demand()], XNOR_OR_RATES,
                              budget=1000)
        self.assertEqual(cm.exception.count, 262144)

    def test_budget_from_settings(self):
        with self.settings(NETBOUND={"SEARCH_BUDGET": 10}):
            with self.assertRaises(BudgetExceeded):
                exhaustive_search(corpus.butterfly(), 1, rates={"M1": 1, "M2": 1})

    def test_alphabet_mismatch(self):
        with self.assertRaises(AlphabetMismatch):
            exhaustive_search(corpus.y_network(1, 2, 1), 1, [corpus.counterexample_demand()], {"M1": 1, "M2": 1})

    def test_zero_rate_message(self):
        outcome = exhaustive_search(corpus.y_network(), 1, [wants("y", "M1")], {"M1": 1, "M2": 0})
        self.assertTrue(outcome.found)
        self.assertEqual(outcome.code.message_alphabets["M2"], 1)

    def test_achievability_is_monotone_in_the_rates(self):
        cases = (
            ("butterfly", corpus.butterfly(), {"M1": 1, "M2": 1}),
            ("y-1-1-2", corpus.y_network(1, 1, 2), {"M1": 1, "M2": 1}),
            ("single-path", corpus.single_path(2, 2), {"M": 2}),
            ("triangle", corpus.triangle(), {"M": 2}),
        )
        for name, net, top in cases:
            self.assertTrue(exhaustive_search(net, 1, rates=top).found)
            ids = sorted(top)
            for point in itertools.product(*(range(top[m] + 1) for m in ids)):
                with self.subTest(network=name, rates=point):
                    self.assertTrue(exhaustive_search(net, 1, rates=dict(zip(ids, point))).found)

    def test_split_sinks_keeps_achievability(self):
        cases = (
            ("y-1-1-1", corpus.y_network(1, 1, 1)),
            ("y-1-1-2", corpus.y_network(1, 1, 2)),
            ("butterfly", corpus.butterfly()),
        )
        for name, net in cases:
            split = split_sinks(net)
            for rates in ({"M1": 1, "M2": 1}, {"M1": 1, "M2": 0}, {"M1": 2, "M2": 1}):
                with self.subTest(network=name, rates=rates):
                    whole = exhaustive_search(net, 1, rates=rates)
                    parts = exhaustive_search(split, 1, rates=rates)
                    self.assertEqual(whole.found, parts.found)
                    if parts.found:
                        self.assertEqual(check_code(split, parts.code), [])

class TestCheckCode(SimpleTestCase):
    def test_forwarding_code(self):
        net, code = corpus.t1_instance()
        self.assertEqual(check_code(net, code), [])

    def test_wrong_table(self):
        net, code = corpus.t1_instance()
        tables = dict(code.link_tables, **{"A-t1": (0, 1, 0, 1)})
        unmet = check_code(net, dataclasses.replace(code, link_tables=tables))
        self.assertEqual(unmet, [wants("t1", "M1")])

    def test_malformed_codes(self):
        net, code = corpus.t1_instance()
        tables = {k: v for k, v in code.link_tables.items() if k != "A-t2"}
        with self.assertRaises(InvalidCode):
            check_code(net, dataclasses.replace(code, link_tables=tables))
        alphabets = dict(code.link_alphabets, **{"A-t1": 4})
        with self.assertRaises(InvalidCode):
            check_code(net, dataclasses.replace(code, link_alphabets=alphabets))

    def test_copies_share_a_table(self):
        split = split_sinks(corpus.y_network(1, 1, 2))
        code = exhaustive_search(split, 1, rates={"M1": 1, "M2": 1}).code
        self.assertEqual(code.link_tables["r3.M1"], code.link_tables["r3.M2"])
        tables = dict(code.link_tables, **{"r3.M2": (0,) * len(code.link_tables["r3.M2"])})
        with self.assertRaises(InvalidCode):
            check_code(split, dataclasses.replace(code, link_tables=tables))


@override_settings(NETBOUND={"SEARCH_BUDGET": 10**6})
class TestVerifyDirection(SimpleTestCase):
    def test_merge_is_a_strict_upper_bound(self):
        original = corpus.two_relay(d=0)
        merged = merge_nodes(original, ["r1", "r2"]).network
        targets = corpus.two_source_targets()[:1]

        upper = verify_direction(original, merged, BoundDirection.UPPER, targets)
        self.assertTrue(upper.consistent)
        self.assertEqual((upper.rows[0].original, upper.rows[0].transformed), (False, True))

        equivalent = verify_direction(original, merged, "equivalent", targets)
        self.assertFalse(equivalent.consistent)
        self.assertEqual(len(equivalent.violations), 1)
