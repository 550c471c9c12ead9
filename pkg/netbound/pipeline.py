# Copyright (c) 2025 netbound developers
#
# This file is part of netbound
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Apply rewrites in sequence and record what was done.

A script is a list of steps ``{"op": <name>, "params": {...}}``; the names
are the keys of `OPERATIONS`. Steps producing a bounding pair take a
``"bound"`` parameter ("lower" or "upper", default "upper") choosing which
network the pipeline continues with.

In auto mode the driver repeatedly applies the first rewrite that succeeds,
in this order:

1. absorb_node on relays outside any matched component,
2. lemma1_merge, lemma2_merge, lemma3_merge, lemma4_merge on matched components,
3. absorb_node on the remaining relays,
4. cutset_replace on a sink, when the result is equivalent and differs.

With `allow_bounding`, a two-relay component that merges in neither way is
replaced by `best_bounding_pair`, and the driver keeps two tracks (one per
bound), each with its own trace.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from netbound import conf, transforms
from netbound.bounds import BoundDirection, BoundingPair, GapCertificate, TransformResult, compose_gap
from netbound.exceptions import NetworkBoundError, NetworkSyntaxError, PipelineError, SemanticError
from netbound.fileformats import dump_json, load_json, rational_text
from netbound.netcore import Network, Violation
from netbound.patterns import (
    ChainPattern, MultiSourcePattern, ParallelYPattern, TwoRelayPattern, find_all,
    match_chain, match_multi_source, match_parallel_y, match_two_relay,
)

logger = logging.getLogger(__name__)

Step = Union[TransformResult, BoundingPair]


#
# Operations
#

def _pair_relays(params: Mapping[str, Any]) -> Tuple[str, str]:
    r1, r2 = params["relays"]
    return r1, r2


OPERATIONS: Dict[str, Callable[[Network, Mapping[str, Any]], Step]] = {
    "merge_nodes": lambda net, p: transforms.merge_nodes(net, p["group"]),
    "absorb_node": lambda net, p: transforms.absorb_node(net, p["node"]),
    "set_capacity": lambda net, p: transforms.set_capacity(net, p["link"], p["capacity"]),
    "split_link": lambda net, p: transforms.split_link(net, p["link"], p["part"]),
    "cutset_replace": lambda net, p: transforms.cutset_replace(net, p["sink"], p.get("keep_backward", True)),
    "remove_and_scale": lambda net, p: transforms.remove_and_scale(net, p["links"]),
    "lemma1_merge": lambda net, p: transforms.lemma1_merge(net, match_parallel_y(net, *_pair_relays(p))),
    "lemma2_merge": lambda net, p: transforms.lemma2_merge(net, match_two_relay(net, *_pair_relays(p))),
    "lemma3_merge": lambda net, p: transforms.lemma3_merge(net, match_chain(net, *p["relays"])),
    "lemma4_merge": lambda net, p: transforms.lemma4_merge(net, match_multi_source(net, *_pair_relays(p)),
                                                           p.get("strict")),
    "delta_scaled_lower": lambda net, p: transforms.delta_scaled_lower(net, match_two_relay(net, *_pair_relays(p))),
    "fig7_pair": lambda net, p: transforms.fig7_pair(net, match_two_relay(net, *_pair_relays(p))),
    "best_bounding_pair": lambda net, p: transforms.best_bounding_pair(net, match_two_relay(net, *_pair_relays(p))),
    "proportional_y_split": lambda net, p: transforms.proportional_y_split(
        net, p["inputs_a"], p["inputs_b"], p["outputs"], p["hub1"], p["hub2"]),
}

_LEMMAS = (
    (ParallelYPattern.kind, "lemma1_merge"),
    (TwoRelayPattern.kind, "lemma2_merge"),
    (ChainPattern.kind, "lemma3_merge"),
    (MultiSourcePattern.kind, "lemma4_merge"),
)


#
# Traces
#

@dataclass(frozen=True)
class TraceStep:
    op: str
    params: Dict[str, Any]
    direction: BoundDirection
    gap: GapCertificate
    matched: Tuple[str, ...] = ()
    details: Dict[str, Any] = field(default_factory=dict)

    def as_doc(self) -> Dict[str, Any]:
        return {
            "op": self.op,
            "params": self.params,
            "direction": self.direction.value,
            "gapFactor": rational_text(self.gap.factor) if self.gap.known else "unknown",
            "gapBasis": self.gap.basis,
            "matchedIds": list(self.matched),
            "details": self.details,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "TraceStep":
        factor = doc.get("gapFactor", "unknown")
        return cls(
            op=doc["op"],
            params=dict(doc.get("params", {})),
            direction=BoundDirection(doc.get("direction", "equivalent")),
            gap=GapCertificate(None if factor == "unknown" else Fraction(factor), doc.get("gapBasis", "unknown")),
            matched=tuple(doc.get("matchedIds", ())),
            details=dict(doc.get("details", {})),
        )


@dataclass(frozen=True)
class Trace:
    steps: Tuple[TraceStep, ...] = ()

    @property
    def cumulative_gap(self) -> Optional[Fraction]:
        return compose_gap(self.steps)

    @property
    def direction(self) -> BoundDirection:
        """The direction of the whole sequence: Equivalent unless some step bounds."""
        kinds = {s.direction for s in self.steps} - {BoundDirection.EQUIVALENT}
        if not kinds:
            return BoundDirection.EQUIVALENT
        if len(kinds) == 1:
            return kinds.pop()
        raise ValueError("trace mixes lower and upper steps")

    def as_doc(self) -> List[Dict[str, Any]]:
        gap = self.cumulative_gap
        return [s.as_doc() for s in self.steps] + [
            {"cumulativeGap": rational_text(gap) if gap is not None else "unknown"}
        ]

    def to_json(self) -> str:
        return dump_json(self.as_doc())


def parse_trace(text: str) -> Trace:
    """Parse a trace file, or a script (a list of ``{"op", "params"}`` steps)."""
    doc = load_json(text)
    if isinstance(doc, dict) and "steps" in doc:
        doc = doc["steps"]
    if not isinstance(doc, list):
        raise SemanticError([Violation("BadType", "trace", "expected a list of steps")])
    steps, problems = [], []
    for i, item in enumerate(doc):
        if isinstance(item, dict) and set(item) == {"cumulativeGap"}:
            continue
        if not isinstance(item, dict) or "op" not in item:
            problems.append(Violation("MissingKey", f"steps[{i}]", "op"))
            continue
        if item["op"] not in OPERATIONS:
            problems.append(Violation("UnknownOperation", f"steps[{i}]", item["op"]))
            continue
        steps.append(TraceStep.from_doc(item))
    if problems:
        raise SemanticError(problems)
    return Trace(tuple(steps))


parse_script = parse_trace


#
# Running
#

@dataclass(frozen=True)
class Track:
    network: Network
    trace: Trace


@dataclass(frozen=True)
class PipelineResult:
    """The simplified network and its trace; `lower` differs only when bounding steps forked the run."""

    upper: Track
    lower: Track

    @property
    def network(self) -> Network:
        return self.upper.network

    @property
    def trace(self) -> Trace:
        return self.upper.trace

    @property
    def forked(self) -> bool:
        return self.upper != self.lower


def _apply(net: Network, op: str, params: Mapping[str, Any], index: int) -> Tuple[Network, TraceStep]:
    try:
        step = OPERATIONS[op](net, params)
    except KeyError as e:
        if op not in OPERATIONS:
            raise PipelineError(index, op, NetworkSyntaxError(f"unknown operation '{op}'")) from e
        raise PipelineError(index, op, e) from e
    except (NetworkBoundError, ValueError, TypeError) as e:
        raise PipelineError(index, op, e) from e
    if isinstance(step, BoundingPair):
        side = step.lower if BoundDirection.parse(params.get("bound", "upper")) == BoundDirection.LOWER else step.upper
        record = TraceStep(op, dict(params), side.direction, step.gap, side.trace.matched,
                           dict(side.trace.parameters, chosen=step.operation))
        return side.network, record
    record = TraceStep(op, dict(params), step.direction, step.gap, step.trace.matched, dict(step.trace.parameters))
    return step.network, record


def _auto_candidates(net: Network, allow_bounding: bool, side: str):
    """Yield (op, params) in priority order."""
    patterns = find_all(net)
    in_component = {v for p in patterns for v in p.relays}
    for v in sorted(net.relays):
        if v not in in_component:
            yield "absorb_node", {"node": v}
    for kind, op in _LEMMAS:
        for p in patterns:
            if p.kind == kind:
                yield op, {"relays": list(p.relays)}
    for v in sorted(in_component):
        if net.has_node(v):
            yield "absorb_node", {"node": v}
    for t in sorted(net.sinks):
        yield "cutset_replace", {"sink": t}
    if allow_bounding:
        for p in patterns:
            if p.kind == TwoRelayPattern.kind:
                yield "best_bounding_pair", {"relays": list(p.relays), "bound": side}


def _auto_step(net: Network, allow_bounding: bool, side: str, index: int) -> Optional[Tuple[Network, TraceStep]]:
    for op, params in _auto_candidates(net, allow_bounding, side):
        try:
            out, record = _apply(net, op, params, index)
        except PipelineError as e:
            logger.debug(f"pipeline.auto: {op} {params} not applicable ({e.cause})")
            continue
        if out == net:
            continue
        if op == "cutset_replace" and record.direction != BoundDirection.EQUIVALENT:
            continue
        return out, record
    return None


def _run_track(net: Network, script: Optional[Sequence[Mapping[str, Any]]], max_steps: int,
               allow_bounding: bool, side: str) -> Track:
    header = "pipeline.run_pipeline"
    steps: List[TraceStep] = []
    if script is not None:
        for index, item in enumerate(script):
            if index >= max_steps:
                logger.warning(f"{header}: stopping at max_steps={max_steps}")
                break
            net, record = _apply(net, item["op"], item.get("params", {}), index)
            steps.append(record)
        return Track(net, Trace(tuple(steps)))
    for index in range(max_steps):
        found = _auto_step(net, allow_bounding, side, index)
        if found is None:
            logger.info(f"{header}: fixpoint after {index} steps ({side})")
            break
        net, record = found
        logger.info(f"{header}: step {index} {record.op} {record.params} -> {record.direction.value}")
        steps.append(record)
    else:
        logger.warning(f"{header}: stopping at max_steps={max_steps}")
    return Track(net, Trace(tuple(steps)))


def _script_items(script) -> List[Mapping[str, Any]]:
    if isinstance(script, Trace):
        return [{"op": s.op, "params": s.params} for s in script.steps]
    return [s if isinstance(s, Mapping) else {"op": s.op, "params": s.params} for s in script]


def run_pipeline(net: Network, script=None, max_steps: Optional[int] = None,
                 allow_bounding: bool = False) -> PipelineResult:
    """Simplify `net` by a script (a `Trace` or a list of steps), or automatically when `script` is None.

    :raises PipelineError: naming the step index and operation that failed
    """
    max_steps = conf.get_option("MAX_STEPS") if max_steps is None else max_steps
    if script is not None:
        track = _run_track(net, _script_items(script), max_steps, allow_bounding, "upper")
        return PipelineResult(track, track)
    upper = _run_track(net, None, max_steps, allow_bounding, "upper")
    if not allow_bounding:
        return PipelineResult(upper, upper)
    lower = _run_track(net, None, max_steps, allow_bounding, "lower")
    return PipelineResult(upper, lower)


def replay_trace(original: Network, trace: Trace) -> Network:
    """Re-apply the steps of `trace` to `original`."""
    return run_pipeline(original, trace, max_steps=len(trace.steps)).network
