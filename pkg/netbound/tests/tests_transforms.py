from fractions import Fraction

import factory.random
from django.test import SimpleTestCase, override_settings

from netbound import corpus
from netbound.bounds import (
    DIFFERENCE_FACTOR, UNIFORM_SCALING, BoundDirection, GapCertificate, compose_gap,
)
from netbound.exceptions import (
    ConditionFails, ConditionNotApplicable, MixesSourceAndSink, NegativeCapacity, NoResidualPath,
    NonProportional, NotARelay, NotDominating, PatternMismatch, TopologyMismatch, WouldCreateCycle,
    ZeroCapacity,
)
from netbound.netcore import Role
from netbound.oracles import verify_direction
from netbound.patterns import find_all, match, match_chain, match_multi_source, match_parallel_y, match_two_relay
from netbound.tests.factories import ParallelYFactory, RationalFuzz, TwoRelayFactory, YNetworkFactory
from netbound.transforms import (
    absorb_node, best_bounding_pair, cutset_replace, delta_scaled_lower, difference_factor, fig7_pair,
    lemma1_merge, lemma2_bound, lemma2_condition, lemma2_merge, lemma3_conditions, lemma3_merge, lemma4_bound,
    lemma4_condition, lemma4_merge, merge_nodes, proportional_y_split, remove_and_scale, set_capacity,
    split_link, worst_case_gap,
)


def capacities(net):
    return {e.id: e.capacity for e in net.links}


class TestPatterns(SimpleTestCase):
    def test_find_all_two_relay(self):
        found = find_all(corpus.two_relay())
        self.assertEqual([p.kind for p in found], ["multi-source", "two-relay"])
        self.assertEqual(found[1].relays, ("r1", "r2"))

    def test_find_all_parallel_y(self):
        found = find_all(ParallelYFactory())
        self.assertEqual([(p.kind, p.relays) for p in found], [("parallel-y", ("m1", "m2"))])

    def test_zero_capacity_does_not_match(self):
        with self.assertRaises(PatternMismatch):
            match_two_relay(corpus.two_relay(d=0), "r1", "r2")

    def test_wrong_roles(self):
        with self.assertRaises(PatternMismatch):
            match(corpus.two_relay(), "two-relay", "x1", "r2")
        with self.assertRaises(PatternMismatch):
            match(corpus.two_relay(), "no-such-shape", "r1", "r2")

    def test_parallel_y_alpha(self):
        half = Fraction(1, 2)
        p = match_parallel_y(ParallelYFactory(a_tilde=half, b_tilde=half, c_tilde=half), "m2", "m1")
        self.assertEqual(p.relays, ("m1", "m2"))
        self.assertEqual(p.alpha, half)
        self.assertIsNone(match_parallel_y(ParallelYFactory(a_tilde=half), "m1", "m2").alpha)


class TestGenericRewrites(SimpleTestCase):
    def test_merge_nodes(self):
        result = merge_nodes(corpus.two_relay(), ["r2", "r1"])
        self.assertEqual(result.direction, BoundDirection.UPPER)
        self.assertFalse(result.gap.known)
        self.assertTrue(result.network.has_node("r1+r2"))
        self.assertNotIn("d", result.network.link_ids)

    def test_merge_nodes_refusals(self):
        with self.assertRaises(MixesSourceAndSink):
            merge_nodes(corpus.two_relay(), ["x1", "y"])
        # x2 -> r2 -> r1 leaves the group and comes back
        with self.assertRaises(WouldCreateCycle):
            merge_nodes(corpus.two_relay(), ["x2", "r1"])

    def test_absorb_node(self):
        result = absorb_node(YNetworkFactory(c=2), "m")
        self.assertEqual(result.direction, BoundDirection.EQUIVALENT)
        self.assertEqual(result.gap.factor, 1)
        self.assertEqual(capacities(result.network), {"r1": 1, "r2": 1})
        self.assertEqual(result.network.link("r2").head, "y")

    def test_absorb_node_refusals(self):
        with self.assertRaises(ConditionFails) as cm:
            absorb_node(YNetworkFactory(), "m")
        self.assertEqual((cm.exception.lhs, cm.exception.rhs), (2, 1))
        with self.assertRaises(NotARelay):
            absorb_node(YNetworkFactory(), "x1")
        dead_end = corpus.single_path().without_links(["vt"])
        with self.assertRaises(ConditionNotApplicable):
            absorb_node(dead_end, "v")

    def test_set_capacity(self):
        net = YNetworkFactory(b=2)
        lowered = set_capacity(net, "r2", 1)
        self.assertEqual(lowered.direction, BoundDirection.LOWER)
        self.assertEqual(lowered.gap, GapCertificate(2, DIFFERENCE_FACTOR))
        deleted = set_capacity(net, "r2", 0)
        self.assertEqual(deleted.direction, BoundDirection.LOWER)
        self.assertFalse(deleted.gap.known)
        self.assertEqual(set_capacity(net, "r2", "3").direction, BoundDirection.UPPER)
        with self.assertRaises(NegativeCapacity):
            set_capacity(net, "r2", -1)

    def test_split_link(self):
        result = split_link(YNetworkFactory(b=2), "r2", "1/2")
        self.assertEqual(result.network.link_ids, ("r1", "r2", "r2.eps", "r3"))
        self.assertEqual(result.network.link("r2").capacity, Fraction(3, 2))
        self.assertEqual(result.network.link("r2.eps").capacity, Fraction(1, 2))
        with self.assertRaises(ConditionFails):
            split_link(YNetworkFactory(), "r2", 2)

    def test_cutset_replace(self):
        unchanged = cutset_replace(YNetworkFactory(), "y")
        self.assertEqual(unchanged.direction, BoundDirection.EQUIVALENT)
        self.assertEqual(capacities(unchanged.network), {"r1": 1, "r2": 1, "r3": 1})

        wired = cutset_replace(YNetworkFactory(c=3), "y")
        self.assertEqual(wired.direction, BoundDirection.EQUIVALENT)
        self.assertEqual(capacities(wired.network), {"r1": 1, "r2": 1})
        self.assertEqual(wired.network.node_ids, ("x1", "x2", "y"))

    def test_remove_and_scale_parallel_pair(self):
        pair = remove_and_scale(corpus.parallel_pair(), ["e1"])
        self.assertEqual(pair.gap, GapCertificate(2, UNIFORM_SCALING))
        self.assertEqual(capacities(pair.lower.network), {"e2": 1})
        self.assertEqual(capacities(pair.upper.network), {"e2": 2})
        self.assertEqual(pair.lower.direction, BoundDirection.LOWER)
        self.assertEqual(pair.upper.direction, BoundDirection.UPPER)

    def test_remove_and_scale_triangle(self):
        pair = remove_and_scale(corpus.triangle(), ["uv"])
        self.assertEqual(pair.gap.factor, 2)
        self.assertEqual(capacities(pair.upper.network), {"uw": 2, "wv": 2})

    def test_remove_and_scale_needs_a_path(self):
        with self.assertRaises(NoResidualPath):
            remove_and_scale(corpus.single_path(), ["sv"])

    def test_remove_and_scale_on_a_wide_twin_path(self):
        pair = remove_and_scale(corpus.parallel_pair(1, 10), ["e1"])
        self.assertEqual(pair.gap.factor, Fraction(11, 10))
        self.assertEqual(capacities(pair.upper.network), {"e2": 11})

    @override_settings(NETBOUND={"SEARCH_BUDGET": 10**6})
    def test_remove_and_scale_directions_hold(self):
        cases = (
            ("parallel-pair", corpus.parallel_pair(), ["e1"]),
            ("triangle", corpus.triangle(), ["uv"]),
            ("twin-path", corpus.parallel_pair(1, 2), ["e1"]),
        )
        for name, net, removed in cases:
            pair = remove_and_scale(net, removed)
            for side in (pair.lower, pair.upper):
                with self.subTest(network=name, direction=side.direction.value):
                    report = verify_direction(net, side.network, side.direction, corpus.single_message_targets())
                    self.assertEqual(report.violations, ())
                    self.assertEqual(len(report.rows), 2)


class TestComponentMerges(SimpleTestCase):
    def test_lemma1_parallel_y(self):
        net = ParallelYFactory()
        result = lemma1_merge(net, match_parallel_y(net, "m1", "m2"))
        self.assertEqual(result.direction, BoundDirection.EQUIVALENT)
        self.assertEqual(capacities(result.network), {"a+at": 2, "b+bt": 2, "c+ct": 2})
        self.assertEqual(result.network.node("m1+m2").role, Role.RELAY)
        self.assertEqual(result.trace.parameters["time_sharing_multiple"], 2)

    def test_lemma1_fractional_ratio(self):
        half = Fraction(1, 2)
        net = ParallelYFactory(a_tilde=half, b_tilde=half, c_tilde=half)
        result = lemma1_merge(net, match_parallel_y(net, "m1", "m2"))
        self.assertEqual(result.network.link("a+at").capacity, Fraction(3, 2))
        self.assertEqual(result.trace.parameters["time_sharing_multiple"], 3)

    def test_lemma1_non_proportional(self):
        net = ParallelYFactory(a_tilde=2)
        with self.assertRaises(NonProportional):
            lemma1_merge(net, match_parallel_y(net, "m1", "m2"))

    def test_lemma2_boundary(self):
        net = TwoRelayFactory(d=1)
        result = lemma2_merge(net, match_two_relay(net, "r1", "r2"))
        self.assertEqual(capacities(result.network), {"a": 1, "b+bp": 2, "c": 1})
        self.assertEqual(result.gap.factor, 1)

        net = TwoRelayFactory(d=1 - Fraction(1, 10**9))
        with self.assertRaises(ConditionFails) as cm:
            lemma2_merge(net, match_two_relay(net, "r1", "r2"))
        self.assertEqual(cm.exception.lhs, 1)

    def test_chain_and_multi_source_reduce_to_two_relay(self):
        factory.random.reseed_random("netbound")
        for _ in range(1000):
            net = TwoRelayFactory(random=True)
            two = lemma2_condition(match_two_relay(net, "r1", "r2"))
            (chain,) = lemma3_conditions(match_chain(net, "r1", "r2"))
            multi = lemma4_condition(match_multi_source(net, "r1", "r2"), strict=False)
            self.assertEqual(two.lhs, chain.lhs)
            self.assertEqual(two.lhs, multi.lhs)
            self.assertEqual(two.holds, chain.holds)
            self.assertEqual(two.holds, multi.holds)

    def test_lemma3_chain(self):
        net = corpus.chain(bs=(1, 1, 1), ds=(1, 1))
        result = lemma3_merge(net, match_chain(net, "r0", "r1", "r2"))
        self.assertEqual(capacities(result.network), {"a": 1, "b0+b1+b2": 3, "c": 1})

        net = corpus.chain(bs=(1, 1, 1), ds=(1, Fraction(1, 2)))
        with self.assertRaises(ConditionFails) as cm:
            lemma3_merge(net, match_chain(net, "r0", "r1", "r2"))
        self.assertEqual(cm.exception.index, 2)

    def test_lemma4_several_sources(self):
        net = corpus.multi_source(bs=(1, 1), b_primes=(1, 1), d=2)
        result = lemma4_merge(net, match_multi_source(net, "r1", "r2"), strict=False)
        self.assertEqual(result.network.link("b1+bp1").capacity, 2)
        net = corpus.multi_source(bs=(1, 1), b_primes=(1, 1), d=1)
        with self.assertRaises(ConditionFails):
            lemma4_merge(net, match_multi_source(net, "r1", "r2"), strict=False)

    def test_lemma4_literal_ratio(self):
        self.assertEqual(lemma4_bound(2, [2], [1], 1, strict=False), Fraction(4, 3))
        self.assertEqual(lemma4_bound(2, [2], [1], 1, strict=True), 3)

    def test_proportional_y_split(self):
        result = proportional_y_split(ParallelYFactory(), ["a", "at"], ["b", "bt"], ["c", "ct"], "m1", "m2")
        self.assertEqual(result.trace.parameters["alpha"], "1/2")
        self.assertEqual(capacities(result.network), {"a+at": 2, "b+bt": 2, "c+ct": 2})
        self.assertEqual(result.direction, BoundDirection.EQUIVALENT)


class TestBoundingPairs(SimpleTestCase):
    def test_best_pair_when_merge_holds(self):
        net = TwoRelayFactory(d=1)
        pair = best_bounding_pair(net, match_two_relay(net, "r1", "r2"))
        self.assertEqual(pair.operation, "lemma2_merge")
        self.assertTrue(pair.equivalent)

    def test_best_pair_below_condition(self):
        net = TwoRelayFactory(d=Fraction(1, 2))
        p = match_two_relay(net, "r1", "r2")
        self.assertEqual(fig7_pair(net, p).gap.factor, 4)
        pair = best_bounding_pair(net, p)
        self.assertEqual(pair.operation, "delta_scaled_lower")
        self.assertEqual(pair.gap, GapCertificate(2, DIFFERENCE_FACTOR))
        self.assertEqual(capacities(pair.lower.network), {"a": Fraction(1, 2), "b+bp": 2, "c": Fraction(1, 2)})
        self.assertEqual(capacities(pair.upper.network), {"a": 1, "b+bp": 2, "c": 1})
        self.assertEqual(difference_factor(pair.lower.network, pair.upper.network), 2)

    def test_pairs_not_applicable(self):
        net = TwoRelayFactory(d=1)
        p = match_two_relay(net, "r1", "r2")
        with self.assertRaises(ConditionNotApplicable):
            delta_scaled_lower(net, p)
        with self.assertRaises(ConditionNotApplicable):
            fig7_pair(net, p)

    def test_worst_case_gap(self):
        self.assertEqual(worst_case_gap(1, 1, 1, 1), (Fraction(1, 2), Fraction(1, 2)))

    def test_worst_case_gap_balances_both_branches(self):
        factory.random.reseed_random("netbound")
        draw = RationalFuzz()
        for _ in range(500):
            a, b, b_prime, c = (draw.fuzz() for _ in range(4))
            x = lemma2_bound(a, b, b_prime, c)
            d, value = worst_case_gap(a, b, b_prime, c)
            self.assertTrue(0 < d < c)
            self.assertEqual(d / x, 1 - d / c)
            self.assertEqual(value, d / x)
            for off in (d * Fraction(6, 7), d * Fraction(8, 7)):
                self.assertGreater(max(off / x, 1 - off / c), value)

    def test_worst_case_gap_refuses_empty_links(self):
        with self.assertRaises(ValueError):
            worst_case_gap(1, 0, 1, 1)


class TestCertificates(SimpleTestCase):
    def test_difference_factor(self):
        half = Fraction(1, 2)
        self.assertEqual(difference_factor(YNetworkFactory(a=half, b=2, c=half), YNetworkFactory(b=2)), 2)
        self.assertEqual(difference_factor(YNetworkFactory(), YNetworkFactory()), 1)

    def test_difference_factor_refusals(self):
        with self.assertRaises(NotDominating):
            difference_factor(YNetworkFactory(b=2), YNetworkFactory(a=Fraction(1, 2), b=2, c=Fraction(1, 2)))
        with self.assertRaises(TopologyMismatch):
            difference_factor(YNetworkFactory(), corpus.two_relay())
        with self.assertRaises(ZeroCapacity):
            difference_factor(YNetworkFactory(a=0), YNetworkFactory())

    def test_compose_gap(self):
        net = TwoRelayFactory(d=Fraction(1, 2))
        p = match_two_relay(net, "r1", "r2")
        scaled = delta_scaled_lower(net, p)
        self.assertEqual(compose_gap([scaled, scaled]), 4)
        self.assertIsNone(compose_gap([scaled, fig7_pair(net, p)]))
        self.assertEqual(compose_gap([]), 1)
