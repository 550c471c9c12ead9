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
"""Bounding rewrites of capacitated networks.

Each rewrite takes a `Network` and returns a `TransformResult` (or, when it
produces a lower and an upper network at once, a `BoundingPair`) recording
the direction of the bound and a gap certificate.

Generic rewrites:
    * merge_nodes, absorb_node, set_capacity, split_link, cutset_replace,
      remove_and_scale

Component rewrites (see `netbound.patterns`):
    * lemma1_merge (parallel Y-networks), lemma2_merge (two relays),
      lemma3_merge (relay chain), lemma4_merge (several sources)
    * delta_scaled_lower, fig7_pair, best_bounding_pair, worst_case_gap
    * proportional_y_split

Certificates:
    * difference_factor, compose_gap
"""
import dataclasses
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from netbound import conf
from netbound.bounds import (
    DIFFERENCE_FACTOR, UNIFORM_SCALING, BoundDirection, BoundingPair, GapCertificate,
    TraceRecord, TransformResult, compose_gap,
)
from netbound.exceptions import (
    ConditionFails, ConditionNotApplicable, FunctionDemandPresent, LpInfeasible, MixesSourceAndSink,
    NegativeCapacity, NoResidualPath, NoSplitFound, NonProportional, NotARelay, NotDominating,
    PatternMismatch, TopologyMismatch, WouldCreateCycle, ZeroCapacity,
)
from netbound.netcore import Link, Network, Node, Role, as_rational, canonicalize, find_cycle, prune
from netbound.oracles import max_flow_min_cut
from netbound.patterns import ChainPattern, MultiSourcePattern, ParallelYPattern, TwoRelayPattern
from netbound.ratlp import ProgramBuilder, Relation

logger = logging.getLogger(__name__)

__all__ = [
    "BoundDirection", "BoundingPair", "GapCertificate", "TraceRecord", "TransformResult", "Condition",
    "merge_nodes", "absorb_node", "set_capacity", "split_link", "cutset_replace", "remove_and_scale",
    "lemma1_merge", "lemma2_merge", "lemma3_merge", "lemma4_merge",
    "lemma2_bound", "lemma3_bounds", "lemma4_bound",
    "lemma2_condition", "lemma3_conditions", "lemma4_condition",
    "delta_scaled_lower", "fig7_pair", "best_bounding_pair", "worst_case_gap",
    "proportional_y_split", "difference_factor", "compose_gap",
]


@dataclass(frozen=True)
class Condition:
    """One inequality ``lhs <= rhs`` of a rewrite's sufficient condition."""

    lhs: Fraction
    rhs: Fraction
    index: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def _result(net: Network, direction: BoundDirection, gap: GapCertificate, op: str,
            params: Optional[Dict] = None, matched: Iterable[str] = ()) -> TransformResult:
    result = TransformResult(net, direction, gap, TraceRecord(op, dict(params or {}), tuple(matched)))
    logger.info(f"transforms.{op}: {direction.value}, gap {gap.describe()}, matched {list(matched)}")
    return result


#
# Generic rewrites
#

def _contract(net: Network, group: Sequence[str], merged: str) -> Network:
    """Contract `group` into one node `merged`, dropping links inside the group."""
    inside = set(group)
    roles = {net.node(v).role for v in group}
    role = Role.SOURCE if Role.SOURCE in roles else Role.SINK if Role.SINK in roles else Role.RELAY
    nodes, placed = [], False
    for node in net.nodes:
        if node.id not in inside:
            nodes.append(node)
        elif not placed:
            nodes.append(Node(merged, role))
            placed = True

    def anchor(v):
        return merged if v in inside else v

    links = [
        dataclasses.replace(e, tail=anchor(e.tail), head=anchor(e.head))
        for e in net.links if not (e.tail in inside and e.head in inside)
    ]
    messages = [dataclasses.replace(m, source=anchor(m.source)) for m in net.messages]
    demands = [dataclasses.replace(d, sink=anchor(d.sink)) for d in net.demands]
    return net.replace(nodes=nodes, links=links, messages=messages, demands=demands)


def _sum_parallel(net: Network, node: str) -> Network:
    """Replace parallel links into or out of `node` by one link of summed capacity.

    The merged link is named by joining the original ids with '+'.
    """
    groups: Dict[Tuple[str, str], List[Link]] = {}
    for e in net.links:
        if node in (e.tail, e.head):
            groups.setdefault((e.tail, e.head), []).append(e)
    links, done = [], set()
    for e in net.links:
        key = (e.tail, e.head)
        if key not in groups or len(groups[key]) == 1:
            links.append(e)
        elif key not in done:
            done.add(key)
            group = groups[key]
            links.append(Link(
                "+".join(x.id for x in group), e.tail, e.head, sum((x.capacity for x in group), Fraction(0))
            ))
    return net.replace(links=links)


def merge_nodes(net: Network, group: Iterable[str]) -> TransformResult:
    """Contract a set of nodes into one node.

    Equivalent to joining the group by links of unbounded capacity, so the
    result is an upper bound with no gap certificate. The merged node is named
    by joining the sorted ids with '+'.

    :raises WouldCreateCycle: when a path leaves the group and comes back
    :raises MixesSourceAndSink: when the group holds a source and a sink
    """
    group = sorted(set(group))
    if not group:
        raise PatternMismatch("cannot merge an empty group")
    for v in group:
        if not net.has_node(v):
            raise PatternMismatch(f"node '{v}' does not exist")
    roles = {net.node(v).role for v in group}
    if Role.SOURCE in roles and Role.SINK in roles:
        raise MixesSourceAndSink(group)
    if len(group) == 1:
        return _result(net, BoundDirection.UPPER, GapCertificate.unknown("merge"), "merge_nodes",
                       {"group": group}, group)
    merged = "+".join(group)
    contracted = _contract(net, group, merged)
    if find_cycle(contracted):
        raise WouldCreateCycle(group)
    return _result(canonicalize(contracted), BoundDirection.UPPER, GapCertificate.unknown("merge"),
                   "merge_nodes", {"group": group}, group)


def absorb_node(net: Network, v: str) -> TransformResult:
    """Absorb relay `v` into the heads of its out-links.

    Allowed when every out-link of v can carry everything v receives (the
    sum of v's in-capacities is at most each out-capacity). Each successor
    then gets its own copy of v's in-links, so nothing is lost either way.

    :raises ConditionFails: when some out-link is smaller than v's total input
    :raises ConditionNotApplicable: when v has no out-links
    """
    if not net.has_node(v) or net.node(v).role != Role.RELAY:
        raise NotARelay(v)
    ins, outs = net.in_links(v), net.out_links(v)
    if not outs:
        raise ConditionNotApplicable(f"relay '{v}' has no out-links to absorb into")
    total = sum((e.capacity for e in ins), Fraction(0))
    smallest = min(e.capacity for e in outs)
    if total > smallest:
        raise ConditionFails(
            f"in-capacity {total} of '{v}' exceeds its out-link capacity {smallest}", lhs=total, rhs=smallest
        )
    links = []
    for e in net.links:
        if e.head == v:
            continue
        if e.tail != v:
            links.append(e)
            continue
        for i in ins:
            link_id = i.id if len(outs) == 1 else f"{i.id}>{e.id}"
            links.append(Link(link_id, i.tail, e.head, i.capacity))
    absorbed = net.replace(nodes=[n for n in net.nodes if n.id != v], links=links)
    if find_cycle(absorbed):
        raise WouldCreateCycle([v])
    return _result(prune(absorbed), BoundDirection.EQUIVALENT, GapCertificate.exact(), "absorb_node",
                   {"node": v, "in_capacity": str(total)}, [v] + [e.head for e in outs])


def set_capacity(net: Network, link: str, capacity) -> TransformResult:
    """Change one link's capacity; capacity 0 is deletion.

    :raises NegativeCapacity: for a negative new capacity
    """
    new = as_rational(capacity)
    if new < 0:
        raise NegativeCapacity(link, new)
    old = net.link(link).capacity
    if new < old:
        direction = BoundDirection.LOWER
    elif new > old:
        direction = BoundDirection.UPPER
    else:
        direction = BoundDirection.EQUIVALENT
    if old > 0 and new > 0:
        gap = GapCertificate(max(old, new) / min(old, new), DIFFERENCE_FACTOR)
    elif old == new:
        gap = GapCertificate.exact()
    else:
        gap = GapCertificate.unknown("deletion")
    return _result(net.with_capacity(link, new), direction, gap, "set_capacity",
                   {"link": link, "old": str(old), "new": str(new)}, [link])


def split_link(net: Network, link: str, part) -> TransformResult:
    """Split a link of capacity C into parallel links of capacities C - part and part.

    The part gets the id ``<link>.eps``.
    """
    part = as_rational(part)
    e = net.link(link)
    if part < 0 or part > e.capacity:
        raise ConditionFails(f"part {part} must lie in [0, {e.capacity}]", lhs=part, rhs=e.capacity)
    links = []
    for x in net.links:
        if x.id != link:
            links.append(x)
            continue
        links.append(dataclasses.replace(x, capacity=x.capacity - part))
        links.append(Link(f"{link}.eps", x.tail, x.head, part))
    return _result(net.replace(links=links), BoundDirection.EQUIVALENT, GapCertificate.exact(), "split_link",
                   {"link": link, "part": str(part)}, [link])


def cutset_replace(net: Network, t: str, keep_backward: bool = True) -> TransformResult:
    """Wire the forward links of a minimum cut straight into sink `t`.

    The cut separates every source and every other sink from t. Everything on
    t's side of the cut is contracted into t. Backward links are kept (t then
    relays them and hands its demands to a fresh sink, an upper bound) or
    deleted (a lower bound). Without backward links the result is equivalent.

    :raises FunctionDemandPresent: when t has a function demand
    """
    header = "transforms.cutset_replace"
    if not net.has_node(t) or net.node(t).role != Role.SINK:
        raise PatternMismatch(f"'{t}' is not a sink")
    for d in net.demands_at(t):
        if d.is_function:
            raise FunctionDemandPresent(t)
    others = set(net.sources) | (set(net.sinks) - {t})
    cut = max_flow_min_cut(net, others, {t})
    if cut.value == 0:
        logger.warning(f"{header}: sink '{t}' is disconnected from the sources")
    far = set(net.node_ids) - cut.source_side
    contracted = _contract(net, sorted(far), t) if len(far) > 1 else net
    backward = set(cut.backward_links)
    if backward and not keep_backward:
        contracted = contracted.without_links(backward)
    result = prune(canonicalize(contracted))
    if not backward:
        direction, gap = BoundDirection.EQUIVALENT, GapCertificate.exact()
    elif keep_backward:
        direction, gap = BoundDirection.UPPER, GapCertificate.unknown("cutset")
    else:
        direction, gap = BoundDirection.LOWER, GapCertificate.unknown("cutset")
    return _result(result, direction, gap, "cutset_replace",
                   {"sink": t, "keep_backward": keep_backward, "cut_value": str(cut.value),
                    "forward": list(cut.forward_links), "backward": list(cut.backward_links)},
                   [t] + list(cut.forward_links))


def remove_and_scale(net: Network, removed: Iterable[str]) -> BoundingPair:
    """Delete links and find how much the rest must grow to carry their traffic.

    The scale k* is the optimum of an LP routing, for each removed link, its
    capacity from tail to head through the remaining links, on top of the
    traffic those links already carry: ``C_l + sum of rerouted flow <= k C_l``.
    The lower network is the deletion; the upper network scales every
    remaining capacity by k*.

    :raises NoResidualPath: when a removed link's endpoints are not connected
        by positive-capacity links of the rest
    """
    header = "transforms.remove_and_scale"
    removed = list(dict.fromkeys(removed))
    for link_id in removed:
        net.link(link_id)
    residual = net.without_links(removed)
    positive = [e for e in residual.links if e.capacity > 0]
    usable = nx.MultiDiGraph()
    usable.add_nodes_from(net.node_ids)
    usable.add_edges_from((e.tail, e.head) for e in positive)
    for link_id in removed:
        e = net.link(link_id)
        if e.capacity > 0 and not nx.has_path(usable, e.tail, e.head):
            raise NoResidualPath(link_id)

    lp = ProgramBuilder()
    k = lp.variable("k")
    reroutes = [net.link(i) for i in removed if net.link(i).capacity > 0]
    f = {(r.id, e.id): lp.variable(f"f[{r.id},{e.id}]") for r in reroutes for e in positive}
    for e in positive:
        terms = {f[r.id, e.id]: 1 for r in reroutes}
        terms[k] = -e.capacity
        lp.constrain(terms, Relation.LE, -e.capacity)
    for r in reroutes:
        for v in net.node_ids:
            terms: Dict[str, int] = {}
            for e in positive:
                if e.head == v:
                    terms[f[r.id, e.id]] = terms.get(f[r.id, e.id], 0) + 1
                if e.tail == v:
                    terms[f[r.id, e.id]] = terms.get(f[r.id, e.id], 0) - 1
            supply = r.capacity if v == r.head else -r.capacity if v == r.tail else 0
            if terms or supply:
                lp.constrain(terms, Relation.EQ, supply)
    lp.minimize({k: 1})
    result, values = lp.solve()
    if not result.optimal:
        raise LpInfeasible(f"rerouting LP for {removed} is {result.status.value}")
    scale = max(values[k], Fraction(1))
    logger.info(f"{header}: removing {removed} needs scale {scale}")

    lower = prune(residual)
    upper = prune(residual.replace(links=[dataclasses.replace(e, capacity=e.capacity * scale)
                                          for e in residual.links]))
    gap = GapCertificate(scale, UNIFORM_SCALING)
    params = {"removed": removed, "k": str(scale)}
    return BoundingPair(
        lower=_result(lower, BoundDirection.LOWER, gap, "remove_and_scale", params, removed),
        upper=_result(upper, BoundDirection.UPPER, gap, "remove_and_scale", params, removed),
        gap=gap,
        operation="remove_and_scale",
    )


#
# Component merges
#

def _merge_component(net: Network, relays: Sequence[str]) -> Tuple[Network, str]:
    merged = "+".join(sorted(relays))
    contracted = _contract(net, relays, merged)
    return _sum_parallel(contracted, merged), merged


def lemma1_merge(net: Network, p: ParallelYPattern) -> TransformResult:
    """Merge two proportional parallel Y-networks into Y((1+alpha)a, (1+alpha)b, (1+alpha)c).

    Equivalent: the merged Y is emulated on the original by time-sharing
    over a number of network uses that is a multiple of the numerator plus
    the denominator of alpha.

    :raises NonProportional: when the three capacity ratios differ
    """
    alpha = p.alpha
    if alpha is None:
        raise NonProportional(
            f"ratios {p.a_tilde.capacity}/{p.a.capacity}, {p.b_tilde.capacity}/{p.b.capacity}, "
            f"{p.c_tilde.capacity}/{p.c.capacity} differ"
        )
    merged, _ = _merge_component(net, p.relays)
    return _result(merged, BoundDirection.EQUIVALENT, GapCertificate.exact(), "lemma1_merge",
                   {"alpha": str(alpha), "time_sharing_multiple": alpha.numerator + alpha.denominator},
                   p.relays)


def lemma2_bound(a, b, b_prime, c) -> Fraction:
    """beta a + (1 - beta) c with beta = b' / (b + b')."""
    a, b, b_prime, c = (as_rational(x) for x in (a, b, b_prime, c))
    beta = b_prime / (b + b_prime)
    return beta * a + (1 - beta) * c


def lemma3_bounds(a, bs: Sequence, c) -> List[Fraction]:
    """Left-hand sides of the chain condition for i = 1..k.

    With alpha_j = b_j / b_0, a1 = a / sum(alpha) and c1 = c / sum(alpha), the
    i-th side is ``sum_{j<i} alpha_j c1 + sum_{j>=i} alpha_j a1``.
    """
    a, c = as_rational(a), as_rational(c)
    bs = [as_rational(b) for b in bs]
    alphas = [b / bs[0] for b in bs]
    total = sum(alphas, Fraction(0))
    a1, c1 = a / total, c / total
    return [sum(alphas[:i], Fraction(0)) * c1 + sum(alphas[i:], Fraction(0)) * a1 for i in range(1, len(bs))]


def lemma4_bound(a, bs: Sequence, b_primes: Sequence, c, strict: Optional[bool] = None) -> Fraction:
    """``sum beta_i a + sum (1 - beta_i) c``.

    beta_i is b'_i / (b_i + b'_i); with `strict` the literal b_i / b'_i is
    used instead (the two disagree even for a single source). `strict`
    defaults to the STRICT_LEMMA4 option.
    """
    if strict is None:
        strict = conf.get_option("STRICT_LEMMA4")
    a, c = as_rational(a), as_rational(c)
    pairs = [(as_rational(b), as_rational(bp)) for b, bp in zip(bs, b_primes)]
    betas = [b / bp if strict else bp / (b + bp) for b, bp in pairs]
    return sum((beta * a + (1 - beta) * c for beta in betas), Fraction(0))


def lemma2_condition(p: TwoRelayPattern) -> Condition:
    return Condition(lemma2_bound(p.a.capacity, p.b.capacity, p.b_prime.capacity, p.c.capacity), p.d.capacity)


def lemma3_conditions(p: ChainPattern) -> List[Condition]:
    sides = lemma3_bounds(p.a.capacity, [b.capacity for b in p.bs], p.c.capacity)
    return [Condition(lhs, d.capacity, i) for i, (lhs, d) in enumerate(zip(sides, p.ds), start=1)]


def lemma4_condition(p: MultiSourcePattern, strict: Optional[bool] = None) -> Condition:
    return Condition(
        lemma4_bound(p.a.capacity, [b.capacity for b in p.bs], [b.capacity for b in p.b_primes],
                     p.c.capacity, strict),
        p.d.capacity,
    )


def lemma2_merge(net: Network, p: TwoRelayPattern) -> TransformResult:
    """Merge the two relays of a two-relay component into Y(a, b + b', c).

    :raises ConditionFails: unless ``beta a + (1 - beta) c <= d``
    """
    cond = lemma2_condition(p)
    if not cond.holds:
        raise ConditionFails(f"beta*a + (1-beta)*c = {cond.lhs} exceeds d = {cond.rhs}", lhs=cond.lhs, rhs=cond.rhs)
    merged, _ = _merge_component(net, p.relays)
    return _result(merged, BoundDirection.EQUIVALENT, GapCertificate.exact(), "lemma2_merge",
                   {"beta": str(p.beta), "bound": str(cond.lhs), "d": str(cond.rhs)}, p.relays)


def lemma3_merge(net: Network, p: ChainPattern) -> TransformResult:
    """Merge a relay chain into Y(a, sum b_i, c).

    :raises ConditionFails: with `index` set to the first violated chain index
    """
    for cond in lemma3_conditions(p):
        if not cond.holds:
            raise ConditionFails(f"chain condition {cond.index}: {cond.lhs} exceeds d{cond.index} = {cond.rhs}",
                                 index=cond.index, lhs=cond.lhs, rhs=cond.rhs)
    merged, _ = _merge_component(net, p.relays)
    return _result(merged, BoundDirection.EQUIVALENT, GapCertificate.exact(), "lemma3_merge",
                   {"a1": str(p.a1), "c1": str(p.c1), "k": len(p.chain) - 1}, p.relays)


def lemma4_merge(net: Network, p: MultiSourcePattern, strict: Optional[bool] = None) -> TransformResult:
    """Merge the two relays of a several-source component.

    :raises ConditionFails: unless ``d >= sum beta_i a + sum (1 - beta_i) c``
    """
    cond = lemma4_condition(p, strict)
    if not cond.holds:
        raise ConditionFails(f"sum condition {cond.lhs} exceeds d = {cond.rhs}", lhs=cond.lhs, rhs=cond.rhs)
    merged, _ = _merge_component(net, p.relays)
    return _result(merged, BoundDirection.EQUIVALENT, GapCertificate.exact(), "lemma4_merge",
                   {"betas": [str(b) for b in p.betas], "bound": str(cond.lhs)}, p.relays)


#
# Bounding pairs for the two-relay component
#

def delta_scaled_lower(net: Network, p: TwoRelayPattern) -> BoundingPair:
    """Lower Y(delta a, b + b', delta c) and upper Y(a, b + b', c), gap 1/delta.

    delta = d / (beta a + (1 - beta) c).

    :raises ConditionNotApplicable: when d already satisfies the merge condition
    """
    cond = lemma2_condition(p)
    if cond.holds:
        raise ConditionNotApplicable(f"d = {cond.rhs} >= {cond.lhs}: the relays merge exactly")
    delta = cond.rhs / cond.lhs
    upper, _ = _merge_component(net, p.relays)
    lower = upper.replace(links=[
        dataclasses.replace(e, capacity=e.capacity * delta) if e.id in (p.a.id, p.c.id) else e
        for e in upper.links
    ])
    gap = GapCertificate(1 / delta, DIFFERENCE_FACTOR)
    params = {"delta": str(delta), "beta": str(p.beta)}
    return BoundingPair(
        lower=_result(lower, BoundDirection.LOWER, gap, "delta_scaled_lower", params, p.relays),
        upper=_result(upper, BoundDirection.UPPER, gap, "delta_scaled_lower", params, p.relays),
        gap=gap,
        operation="delta_scaled_lower",
    )


def fig7_pair(net: Network, p: TwoRelayPattern) -> BoundingPair:
    """Bounding networks that route r2's contribution straight to y.

    Upper: direct links x1 -> y (a), x2 -> y (b) and x2 -> y (min(b', c)).
    Lower: r1 keeps a and b and codes them on what remains of c (c - d),
    while x2 gets a direct link min(b', d) standing for the bits r1 forwards
    from r2. Scaling the lower network by
    ``max(1, (a + b) / (c - d), min(b', c) / min(b', d))`` routes every upper
    link, which is the reported gap.

    :raises ConditionNotApplicable: unless d < c
    """
    a, b, bp, d, c = p.a.capacity, p.b.capacity, p.b_prime.capacity, p.d.capacity, p.c.capacity
    if d >= c:
        raise ConditionNotApplicable(f"d = {d} is not below c = {c}")
    keep = [n for n in net.nodes if n.id != p.r2]
    others = [e for e in net.links if e.id not in {p.a.id, p.b.id, p.b_prime.id, p.d.id, p.c.id}]

    upper = net.replace(
        nodes=[n for n in keep if n.id != p.r1],
        links=others + [
            Link(p.a.id, p.x1, p.y, a),
            Link(p.b.id, p.x2, p.y, b),
            Link(p.b_prime.id, p.x2, p.y, min(bp, c)),
        ],
    )
    forwarded = min(bp, d)
    lower = net.replace(
        nodes=keep,
        links=others + [
            p.a, p.b,
            dataclasses.replace(p.c, capacity=c - d),
            Link(p.b_prime.id, p.x2, p.y, forwarded),
        ],
    )
    factor = max(Fraction(1), (a + b) / (c - d), min(bp, c) / forwarded)
    gap = GapCertificate(factor, "routing")
    params = {"upper_direct": str(min(bp, c)), "lower_direct": str(forwarded), "lower_coded": str(c - d)}
    return BoundingPair(
        lower=_result(prune(lower), BoundDirection.LOWER, gap, "fig7_pair", params, p.relays),
        upper=_result(prune(upper), BoundDirection.UPPER, gap, "fig7_pair", params, p.relays),
        gap=gap,
        operation="fig7_pair",
    )


def best_bounding_pair(net: Network, p: TwoRelayPattern) -> BoundingPair:
    """The tighter of the available bounding pairs for a two-relay component.

    When the merge condition holds the merged network bounds both ways (gap
    1). Otherwise the delta-scaled pair and the direct-link pair compete on
    their gap; a tie goes to the delta-scaled pair, whose two networks share
    a topology.
    """
    if lemma2_condition(p).holds:
        exact = lemma2_merge(net, p)
        return BoundingPair(
            lower=dataclasses.replace(exact, direction=BoundDirection.LOWER),
            upper=dataclasses.replace(exact, direction=BoundDirection.UPPER),
            gap=exact.gap,
            operation="lemma2_merge",
        )
    best = delta_scaled_lower(net, p)
    try:
        alternative = fig7_pair(net, p)
    except ConditionNotApplicable:
        return best
    if alternative.gap.factor < best.gap.factor:
        best = alternative
    logger.info(f"transforms.best_bounding_pair: {best.operation} with gap {best.gap.factor}")
    return best


def worst_case_gap(a, b, b_prime, c) -> Tuple[Fraction, Fraction]:
    """The d minimising ``max(d / X, 1 - d / c)`` with X = beta a + (1 - beta) c, and the value there.

    Returns ``(d*, c / (X + c))``; both branches are equal at d*.
    """
    a, b, b_prime, c = (as_rational(x) for x in (a, b, b_prime, c))
    if min(a, b, b_prime, c) <= 0:
        raise ValueError("all capacities must be positive")
    x = lemma2_bound(a, b, b_prime, c)
    return x * c / (x + c), c / (x + c)


#
# Two-input component split
#

def proportional_y_split(net: Network, inputs_a: Iterable[str], inputs_b: Iterable[str], outputs: Iterable[str],
                         hub1: str, hub2: str) -> TransformResult:
    """Replace a two-input component by Y(sum a, sum b, sum c).

    Solves for a split alpha in [0, 1] under which hub1 can collect
    alpha of both inputs and deliver alpha of the output while hub2 does the
    same for the rest, all flows sharing the component's links. Each hub then
    does the relay coding of one Y-network, and time-sharing merges the two.

    :raises NoSplitFound: when no alpha routes both systems
    """
    inputs_a, inputs_b, outputs = list(inputs_a), list(inputs_b), list(outputs)
    if not inputs_a or not inputs_b or not outputs:
        raise PatternMismatch("each link group must be nonempty")
    tails_a = {net.link(i).tail for i in inputs_a}
    tails_b = {net.link(i).tail for i in inputs_b}
    heads = {net.link(i).head for i in outputs}
    if len(tails_a) != 1 or len(tails_b) != 1 or len(heads) != 1:
        raise PatternMismatch("inputs must share a tail per group and outputs a head")
    (x1,), (x2,), (y,) = tails_a, tails_b, heads
    for h in (hub1, hub2):
        if not net.has_node(h) or net.node(h).role != Role.RELAY:
            raise NotARelay(h)

    graph = net.graph
    inner = {
        v for v in net.relays
        if (nx.has_path(graph, x1, v) or nx.has_path(graph, x2, v)) and nx.has_path(graph, v, y)
    }
    boundary = inner | {x1, x2, y}
    for v in sorted(inner):
        for e in net.in_links(v) + net.out_links(v):
            if e.tail not in boundary or e.head not in boundary:
                raise PatternMismatch(f"relay '{v}' has a link leaving the component ({e.id})")
    comp = [e for e in net.links if e.tail in boundary and e.head in boundary
            and not (e.tail in {x1, x2} and e.head == y)]
    sum_a = sum((net.link(i).capacity for i in inputs_a), Fraction(0))
    sum_b = sum((net.link(i).capacity for i in inputs_b), Fraction(0))
    sum_c = sum((net.link(i).capacity for i in outputs), Fraction(0))

    lp = ProgramBuilder()
    alpha = lp.variable("alpha", upper=1)
    # (name, from, to, constant part, alpha part) of each commodity's amount
    commodities = []
    for n, hub, const, slope in (("1", hub1, 0, 1), ("2", hub2, 1, -1)):
        commodities += [
            (f"a{n}", x1, hub, const * sum_a, slope * sum_a),
            (f"b{n}", x2, hub, const * sum_b, slope * sum_b),
            (f"c{n}", hub, y, const * sum_c, slope * sum_c),
        ]
    f = {(k[0], e.id): lp.variable(f"f[{k[0]},{e.id}]") for k in commodities for e in comp}
    for e in comp:
        lp.constrain({f[k[0], e.id]: 1 for k in commodities}, Relation.LE, e.capacity)
    for name, src, dst, const, slope in commodities:
        if src == dst:
            continue
        for v in sorted(boundary):
            terms: Dict[str, Fraction] = {}
            for e in comp:
                if e.head == v:
                    terms[f[name, e.id]] = terms.get(f[name, e.id], 0) + 1
                if e.tail == v:
                    terms[f[name, e.id]] = terms.get(f[name, e.id], 0) - 1
            sign = 1 if v == dst else -1 if v == src else 0
            if sign:
                terms[alpha] = terms.get(alpha, 0) - sign * slope
            if terms:
                lp.constrain(terms, Relation.EQ, sign * const)
    lp.minimize({alpha: 1})
    result, values = lp.solve()
    if not result.optimal:
        raise NoSplitFound(f"no split of the component between hubs '{hub1}' and '{hub2}'")

    hub = "+".join(sorted({hub1, hub2}))
    nodes, placed = [], False
    for n in net.nodes:
        if n.id not in inner:
            nodes.append(n)
        elif not placed:
            nodes.append(Node(hub, Role.RELAY))
            placed = True
    links = [e for e in net.links if e.tail not in inner and e.head not in inner] + [
        Link("+".join(inputs_a), x1, hub, sum_a),
        Link("+".join(inputs_b), x2, hub, sum_b),
        Link("+".join(outputs), hub, y, sum_c),
    ]
    return _result(net.replace(nodes=nodes, links=links), BoundDirection.EQUIVALENT, GapCertificate.exact(),
                   "proportional_y_split", {"alpha": str(values[alpha]), "hubs": [hub1, hub2]},
                   sorted(inner))


#
# Certificates
#

def difference_factor(lower: Network, upper: Network) -> Fraction:
    """Largest per-link capacity ratio upper / lower of two same-shaped networks.

    :raises TopologyMismatch: when the nodes or link endpoints differ
    :raises ZeroCapacity: when a link has zero capacity in either network
    :raises NotDominating: when some link is smaller in `upper`
    """
    shape_l = {e.id: (e.tail, e.head) for e in lower.links}
    shape_u = {e.id: (e.tail, e.head) for e in upper.links}
    if shape_l != shape_u or set(lower.node_ids) != set(upper.node_ids):
        raise TopologyMismatch("the two networks do not have identical graphs")
    factor = Fraction(1)
    for e in lower.links:
        cl, cu = e.capacity, upper.link(e.id).capacity
        if cl == 0 or cu == 0:
            raise ZeroCapacity(e.id)
        ratio = cu / cl
        if ratio < 1:
            raise NotDominating(e.id, ratio)
        factor = max(factor, ratio)
    return factor
