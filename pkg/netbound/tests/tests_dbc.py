import dataclasses
import itertools
from fractions import Fraction

from django.test import SimpleTestCase

from netbound import corpus
from netbound.dbc import (
    BinPartition, DBChannel, Distribution, EpsilonRemoval, NetworkClass, bin_by_link, classify, dbc_region_check,
    entropy, largest_bin, multicast_epsilon_check, output_distribution, theorem1_verify,
)
from netbound.exceptions import EmptySupport, InvalidCode, NotApplicable
from netbound.netcore import Demand, FunctionDemand, Link, wants

PAIRS = tuple(itertools.product(range(2), repeat=2))


def two_bit_channel():
    return DBChannel.from_functions(PAIRS, lambda x: x[0], lambda x: x[1])


def unicast_butterfly():
    return corpus.butterfly().replace(demands=(wants("t1", "M1"), wants("t2", "M2")))


class TestEntropy(SimpleTestCase):
    def test_uniform_bit(self):
        self.assertAlmostEqual(entropy(Distribution.uniform((0, 1))), 1.0, places=12)

    def test_point_mass(self):
        self.assertEqual(entropy(Distribution((5,), (1.0,))), 0.0)

    def test_projection(self):
        dist = Distribution.uniform(PAIRS)
        self.assertAlmostEqual(entropy(dist, [1]), 1.0, places=12)
        self.assertAlmostEqual(entropy(dist), 2.0, places=12)
        self.assertEqual(entropy(dist, []), 0.0)

    def test_skewed(self):
        dist = Distribution((0, 1, 2), (0.5, 0.25, 0.25))
        self.assertAlmostEqual(entropy(dist), 1.5, places=12)

    def test_errors(self):
        with self.assertRaises(EmptySupport):
            entropy(Distribution((), ()))
        with self.assertRaises(ValueError):
            Distribution((0, 1), (0.5, 0.6))
        with self.assertRaises(ValueError):
            Distribution((0, 1), (1.5, -0.5))


class TestRegionCheck(SimpleTestCase):
    def test_independent_bits(self):
        ch = two_bit_channel()
        p = Distribution.uniform(PAIRS)
        check = dbc_region_check(ch, p, [1, 1])
        self.assertTrue(check.passed)
        self.assertAlmostEqual(check.rows[-1].entropy, 2.0, places=12)
        self.assertEqual([r.subset for r in check.rows], [(0,), (1,), (0, 1)])

    def test_second_output_overloaded(self):
        check = dbc_region_check(two_bit_channel(), Distribution.uniform(PAIRS), [1, 1.5])
        self.assertFalse(check.passed)
        self.assertEqual(check.violated, (1,))

    def test_zero_rates_and_monotonicity(self):
        ch, p = two_bit_channel(), Distribution.uniform(PAIRS)
        self.assertTrue(dbc_region_check(ch, p, [0, 0]).passed)
        self.assertTrue(dbc_region_check(ch, p, [Fraction(1, 2), 1]).passed)

    def test_shared_output(self):
        ch = DBChannel.from_functions(PAIRS, lambda x: x[0] ^ x[1], lambda x: x[0] ^ x[1])
        p = Distribution.uniform(PAIRS)
        self.assertEqual(output_distribution(ch, p).support, ((0, 0), (1, 1)))
        self.assertEqual(dbc_region_check(ch, p, [1, 1]).violated, (0, 1))

    def test_bad_arguments(self):
        ch, p = two_bit_channel(), Distribution.uniform(PAIRS)
        with self.assertRaises(ValueError):
            dbc_region_check(ch, p, [1])
        with self.assertRaises(ValueError):
            dbc_region_check(ch, p, [1, -1])
        with self.assertRaises(ValueError):
            DBChannel((0, 0), ((0, 1),))


class TestBins(SimpleTestCase):
    def setUp(self):
        self.net, self.code = corpus.t1_instance()

    def test_bin_by_link(self):
        forwarded = bin_by_link(self.net, self.code, "A-t1")
        self.assertEqual(forwarded.sizes(), {0: 2, 1: 2})
        self.assertEqual(forwarded.bins[1], frozenset({(1, 0), (1, 1)}))
        everything = bin_by_link(self.net, self.code, "S-A")
        self.assertEqual(everything.sizes(), {0: 1, 1: 1, 2: 1, 3: 1})
        self.assertEqual(everything.total, 4)
        with self.assertRaises(InvalidCode):
            bin_by_link(self.net, self.code, "ghost")

    def test_largest_bin(self):
        bins = bin_by_link(self.net, self.code, "A-t1")
        m0 = largest_bin(bins, {"M1": 1, "M2": 1}, 1)
        self.assertEqual(m0, frozenset({(0, 0), (0, 1)}))

    def test_uneven_and_single_bins(self):
        vectors = list(PAIRS)
        uneven = BinPartition({0: frozenset(vectors[:3]), 1: frozenset(vectors[3:])}, "e", 1, 2)
        self.assertEqual(len(largest_bin(uneven)), 3)
        single = BinPartition({0: frozenset(vectors)}, "e", 1, 2)
        self.assertEqual(largest_bin(single), frozenset(vectors))

    def test_pigeonhole_is_asserted(self):
        scattered = BinPartition({i: frozenset([v]) for i, v in enumerate(PAIRS)}, "e", 1, 4)
        with self.assertRaises(AssertionError):
            largest_bin(scattered, epsilon=1)

    def test_removal_needs_positive_capacity(self):
        with self.assertRaises(ValueError):
            EpsilonRemoval("e", Fraction(0), NetworkClass.MULTICAST)


class TestClassify(SimpleTestCase):
    def test_classes(self):
        self.assertEqual(classify(corpus.butterfly(super_source=True)), NetworkClass.SUPER_SOURCE)
        self.assertEqual(classify(corpus.butterfly()), NetworkClass.MULTICAST)
        self.assertEqual(classify(unicast_butterfly()), NetworkClass.GENERAL)
        self.assertEqual(classify(corpus.t1_instance()[0]), NetworkClass.SUPER_SOURCE)


class TestEpsilonRemoval(SimpleTestCase):
    def test_forwarding_instance(self):
        net, code = corpus.t1_instance()
        report = theorem1_verify(net, code, "A-t1")
        self.assertTrue(report.passed)
        self.assertEqual(report.removal.epsilon, 1)
        self.assertEqual((report.m0_symbol, report.m0_size, report.space), (0, 2, 4))
        self.assertEqual(report.shifted, {"M1": 0.0, "M2": 0.0})
        self.assertEqual([r.messages for r in report.rows], [("M1",), ("M2",), ("M1", "M2")])
        for row in report.rows:
            self.assertGreaterEqual(row.slack, -1e-9)
            self.assertGreaterEqual(row.entropy, row.chain_bound - 1e-9)
        self.assertIn("PASS", report.describe())

    def test_constant_link(self):
        net, code = corpus.t1_instance()
        net = net.replace(links=net.links + (Link("S-t1", "S", "t1", 1),))
        code = dataclasses.replace(
            code,
            link_tables=dict(code.link_tables, **{"S-t1": (0, 0, 0, 0)}),
            link_inputs=dict(code.link_inputs, **{"S-t1": ("M1", "M2")}),
            link_alphabets=dict(code.link_alphabets, **{"S-t1": 2}),
        )
        report = theorem1_verify(net, code, "S-t1")
        self.assertTrue(report.passed)
        self.assertEqual(report.m0_size, 4)
        self.assertGreaterEqual(report.rows[-1].slack, 1 - 1e-9)

    def test_code_with_errors(self):
        net, code = corpus.t1_instance()
        broken = dataclasses.replace(code, link_tables=dict(code.link_tables, **{"A-t1": (0, 1, 0, 1)}))
        with self.assertRaises(InvalidCode):
            theorem1_verify(net, broken, "A-t1")
        with self.assertRaises(InvalidCode):
            theorem1_verify(net, code, "ghost")

    def test_general_network(self):
        _, code = corpus.t1_instance()
        with self.assertRaises(NotApplicable):
            theorem1_verify(unicast_butterfly(), code, "r-q")

    def test_function_demand_is_not_decodable(self):
        net, code = corpus.t1_instance()
        first_bit = Demand("t1", FunctionDemand(("M1",), (2,), 2, (0, 1)))
        net = net.replace(demands=(first_bit, wants("t2", "M2")))
        self.assertEqual(classify(net), NetworkClass.SUPER_SOURCE)
        with self.assertRaises(NotApplicable) as cm:
            theorem1_verify(net, code, "A-t1")
        self.assertIn("t1", str(cm.exception))


class TestMulticastCuts(SimpleTestCase):
    def test_butterfly_edge(self):
        report = multicast_epsilon_check(corpus.butterfly(), "s1-t1")
        self.assertTrue(report.passed)
        drops = {(r.sink, r.sources): r.drop for r in report.rows}
        self.assertEqual(drops["t1", ("s1",)], 1)
        self.assertEqual(drops["t1", ("s1", "s2")], 1)
        self.assertEqual(drops["t2", ("s1", "s2")], 0)

    def test_not_multicast(self):
        with self.assertRaises(NotApplicable):
            multicast_epsilon_check(unicast_butterfly(), "s1-t1")
