import itertools

from django.test import SimpleTestCase, override_settings, tag

from netbound import corpus
from netbound.bounds import BoundDirection
from netbound.exceptions import (
    BudgetExceeded, ConditionFails, ConditionNotApplicable, FunctionDemandPresent, MixesSourceAndSink,
    NonProportional, NoSplitFound, WouldCreateCycle,
)
from netbound.netcore import validate
from netbound.oracles import cutset_check, exhaustive_search, routing_check, verify_direction
from netbound.patterns import ChainPattern, MultiSourcePattern, ParallelYPattern, TwoRelayPattern, find_all
from netbound.transforms import (
    absorb_node, best_bounding_pair, cutset_replace, delta_scaled_lower, fig7_pair, lemma1_merge, lemma2_merge,
    lemma3_merge, lemma4_merge, merge_nodes, proportional_y_split,
)

MERGES = {
    ParallelYPattern.kind: lemma1_merge,
    TwoRelayPattern.kind: lemma2_merge,
    ChainPattern.kind: lemma3_merge,
    MultiSourcePattern.kind: lemma4_merge,
}
PAIRS = (best_bounding_pair, delta_scaled_lower, fig7_pair)
REFUSALS = (ConditionFails, ConditionNotApplicable, NonProportional, NoSplitFound, FunctionDemandPresent,
            WouldCreateCycle)


def targeted(entry, target):
    net = entry.network
    if target.demands is not None:
        net = net.replace(demands=target.demands)
    return net, {m: target.rates[m] for m in net.message_ids}


def sides(pair):
    return [pair.lower, pair.upper]


def catalog(net):
    """Every transform that applies to `net`, as (label, thunk) pairs."""
    for p in find_all(net):
        label = f"{p.kind}{p.relays}"
        yield f"merge {label}", lambda p=p: [MERGES[p.kind](net, p)]
        if p.kind == TwoRelayPattern.kind:
            for pair in PAIRS:
                yield f"{pair.__name__} {label}", lambda p=p, pair=pair: sides(pair(net, p))
        if p.kind == ParallelYPattern.kind:
            yield f"split {label}", lambda p=p: [proportional_y_split(
                net, [p.a.id, p.a_tilde.id], [p.b.id, p.b_tilde.id], [p.c.id, p.c_tilde.id], p.m1, p.m2)]
    for v in net.relays:
        yield f"absorb {v}", lambda v=v: [absorb_node(net, v)]
    for t in net.sinks:
        yield f"cutset {t}", lambda t=t: [cutset_replace(net, t)]


@tag('canary')
@override_settings(NETBOUND={"SEARCH_BUDGET": 10**6})
class TestCorpusSweep(SimpleTestCase):
    """Slow sweeps over the whole corpus, run with run_canary_tests.py."""

    def test_codes_respect_the_cutset_bound(self):
        for entry in corpus.CORPUS:
            for target in entry.targets:
                net, rates = targeted(entry, target)
                if net.has_function_demands:
                    continue
                with self.subTest(entry=entry.name, target=target.label):
                    try:
                        found = exhaustive_search(net, target.blocklength, rates=rates).found
                    except BudgetExceeded:
                        continue
                    if found:
                        self.assertTrue(cutset_check(net, rates).passed)

    def test_routing_implies_cutset(self):
        for entry in corpus.CORPUS:
            for target in entry.targets:
                net, rates = targeted(entry, target)
                if net.has_function_demands:
                    continue
                with self.subTest(entry=entry.name, target=target.label):
                    if routing_check(net, rates).feasible:
                        self.assertTrue(cutset_check(net, rates).passed)

    def test_relay_merges_are_upper_bounds(self):
        for entry in corpus.CORPUS:
            for pair in itertools.combinations(entry.network.relays, 2):
                try:
                    merged = merge_nodes(entry.network, pair).network
                except (WouldCreateCycle, MixesSourceAndSink):
                    continue
                with self.subTest(entry=entry.name, merged=pair):
                    try:
                        report = verify_direction(entry.network, merged, BoundDirection.UPPER, entry.targets)
                    except BudgetExceeded:
                        continue
                    self.assertEqual(report.violations, ())

    def test_catalog_keeps_its_claims(self):
        applied = set()
        for entry in corpus.CORPUS:
            for label, apply in catalog(entry.network):
                try:
                    results = apply()
                except REFUSALS:
                    continue
                applied.add(label.split()[0])
                for result in results:
                    with self.subTest(entry=entry.name, transform=label, direction=result.direction.value):
                        self.assertEqual(validate(result.network), [])
                        try:
                            report = verify_direction(entry.network, result.network, result.direction,
                                                      entry.targets)
                        except BudgetExceeded:
                            continue
                        self.assertEqual(report.violations, ())
        self.assertLessEqual(
            {"merge", "best_bounding_pair", "delta_scaled_lower", "fig7_pair", "split", "absorb", "cutset"}, applied)

    def test_parallel_y_fits_the_budget(self):
        entry = corpus.entry("parallel-y")
        for target in entry.targets:
            net, rates = targeted(entry, target)
            with self.subTest(target=target.label):
                exhaustive_search(net, target.blocklength, target.demands, rates)
