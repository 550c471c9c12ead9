from fractions import Fraction

from django.test import SimpleTestCase

from netbound import corpus
from netbound.bounds import BoundDirection
from netbound.exceptions import NotARelay, PipelineError, SemanticError
from netbound.pipeline import Trace, parse_script, parse_trace, replay_trace, run_pipeline
from netbound.tests.factories import ParallelYFactory, TwoRelayFactory

HALF = Fraction(1, 2)


def capacities(net):
    return {e.id: e.capacity for e in net.links}


class TestAutoMode(SimpleTestCase):
    def test_parallel_y_merges_in_one_step(self):
        result = run_pipeline(ParallelYFactory())
        self.assertEqual([s.op for s in result.trace.steps], ["lemma1_merge"])
        self.assertEqual(result.trace.cumulative_gap, 1)
        self.assertEqual(result.trace.direction, BoundDirection.EQUIVALENT)
        self.assertEqual(capacities(result.network), {"a+at": 2, "b+bt": 2, "c+ct": 2})
        self.assertFalse(result.forked)

    def test_two_relays_merge_at_d_one(self):
        result = run_pipeline(TwoRelayFactory(d=1))
        self.assertEqual([s.op for s in result.trace.steps], ["lemma2_merge"])
        self.assertEqual(result.trace.steps[0].matched, ("r1", "r2"))
        self.assertEqual(capacities(result.network), {"a": 1, "b+bp": 2, "c": 1})

    def test_no_merge_without_bounding(self):
        net = TwoRelayFactory(d=HALF)
        result = run_pipeline(net)
        self.assertEqual(result.trace.steps, ())
        self.assertEqual(result.network, net)

    def test_bounding_forks_two_tracks(self):
        result = run_pipeline(TwoRelayFactory(d=HALF), allow_bounding=True)
        self.assertTrue(result.forked)
        self.assertEqual(result.upper.trace.cumulative_gap, 2)
        self.assertEqual(result.lower.trace.cumulative_gap, 2)
        self.assertEqual(result.upper.trace.direction, BoundDirection.UPPER)
        self.assertEqual(result.lower.trace.direction, BoundDirection.LOWER)
        self.assertEqual(result.upper.trace.steps[0].details["chosen"], "delta_scaled_lower")
        self.assertEqual(capacities(result.upper.network), {"a": 1, "b+bp": 2, "c": 1})
        self.assertEqual(capacities(result.lower.network), {"a": HALF, "b+bp": 2, "c": HALF})

    def test_deterministic(self):
        first = run_pipeline(TwoRelayFactory(d=HALF), allow_bounding=True)
        second = run_pipeline(TwoRelayFactory(d=HALF), allow_bounding=True)
        self.assertEqual(first, second)
        self.assertEqual(first.upper.trace.to_json(), second.upper.trace.to_json())

    def test_absorbs_a_forwarding_relay(self):
        result = run_pipeline(corpus.single_path(1, 2))
        self.assertEqual([s.op for s in result.trace.steps], ["absorb_node"])
        self.assertEqual(result.network.node_ids, ("s", "t"))

    def test_max_steps(self):
        net = ParallelYFactory()
        self.assertEqual(run_pipeline(net, max_steps=0).network, net)


class TestScripts(SimpleTestCase):
    def test_script_chooses_the_lower_side(self):
        script = [{"op": "best_bounding_pair", "params": {"relays": ["r1", "r2"], "bound": "lower"}}]
        result = run_pipeline(TwoRelayFactory(d=HALF), script)
        self.assertEqual(result.trace.direction, BoundDirection.LOWER)
        self.assertEqual(capacities(result.network), {"a": HALF, "b+bp": 2, "c": HALF})

    def test_failing_step_is_named(self):
        script = [
            {"op": "lemma2_merge", "params": {"relays": ["r1", "r2"]}},
            {"op": "absorb_node", "params": {"node": "x1"}},
        ]
        with self.assertRaises(PipelineError) as cm:
            run_pipeline(TwoRelayFactory(d=1), script)
        self.assertEqual((cm.exception.step, cm.exception.op), (1, "absorb_node"))
        self.assertIsInstance(cm.exception.cause, NotARelay)

    def test_unknown_operation(self):
        with self.assertRaises(SemanticError) as cm:
            parse_script('[{"op": "teleport", "params": {}}]')
        self.assertEqual(cm.exception.violations[0].kind, "UnknownOperation")
        with self.assertRaises(PipelineError):
            run_pipeline(ParallelYFactory(), [{"op": "teleport", "params": {}}])


class TestTraces(SimpleTestCase):
    def test_trace_document(self):
        doc = run_pipeline(ParallelYFactory()).trace.as_doc()
        self.assertEqual(doc[-1], {"cumulativeGap": "1"})
        self.assertEqual(doc[0]["op"], "lemma1_merge")
        self.assertEqual(doc[0]["gapFactor"], "1")
        self.assertEqual(doc[0]["matchedIds"], ["m1", "m2"])

    def test_trace_file_replays(self):
        original = TwoRelayFactory(d=HALF)
        result = run_pipeline(original, allow_bounding=True)
        for track in (result.upper, result.lower):
            trace = parse_trace(track.trace.to_json())
            self.assertEqual(trace, track.trace)
            self.assertEqual(replay_trace(original, trace), track.network)

    def test_empty_trace(self):
        self.assertEqual(Trace().cumulative_gap, 1)
        self.assertEqual(Trace().as_doc(), [{"cumulativeGap": "1"}])
