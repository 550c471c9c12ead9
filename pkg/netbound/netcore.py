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
"""Exact data model for capacitated acyclic networks with general demands.

A `Network` is an immutable value: nodes typed as source, relay or sink,
links with exact rational capacities (parallel links allowed), messages held
by source nodes and per-sink demands (a set of wanted messages, or a finite
function of messages given as a truth table).

All scalars are `fractions.Fraction`; floats are rejected at construction.
"""
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx

from netbound.exceptions import (
    CyclicInput, FunctionDemandPresent, MissingRate, NotARelay, RateVectorMismatch,
)

logger = logging.getLogger(__name__)

Rational = Fraction


def as_rational(value) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction.

    Floats are refused: every capacity and rate in netbound is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an int, Fraction or 'p/q' string, got {type(value).__name__}: {value!r}")


def alphabet_size(x, n: int = 1) -> int:
    """Return floor(2**(n*x)) exactly, for rational x >= 0 and blocklength n.

    This is the size of the symbol alphabet of a link of capacity x (or of a
    message of rate x) at blocklength n.
    """
    e = as_rational(x) * n
    if e < 0:
        raise ValueError(f"exponent must be non-negative, got {e}")
    p, q = e.numerator, e.denominator
    target = 1 << p
    if q == 1:
        return target
    # largest k with k**q <= 2**p
    lo, hi = 1, 1 << (p // q + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** q <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo


class Role(str, Enum):
    SOURCE = "source"
    RELAY = "relay"
    SINK = "sink"


@dataclass(frozen=True)
class Node:
    id: str
    role: Role = Role.RELAY

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))


@dataclass(frozen=True)
class Link:
    id: str
    tail: str
    head: str
    capacity: Fraction = Fraction(1)
    # id of a link from the same tail whose symbol this link repeats
    copy_of: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "capacity", as_rational(self.capacity))


@dataclass(frozen=True)
class Message:
    id: str
    source: str
    rate: Optional[Fraction] = None

    def __post_init__(self):
        if self.rate is not None:
            object.__setattr__(self, "rate", as_rational(self.rate))


@dataclass(frozen=True)
class MessageDemand:
    wanted: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "wanted", frozenset(self.wanted))


@dataclass(frozen=True)
class FunctionDemand:
    """A finite function of messages, tabulated row-major over `input_alphabets`."""

    inputs: Tuple[str, ...]
    input_alphabets: Tuple[int, ...]
    output_alphabet: int
    table: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "input_alphabets", tuple(int(a) for a in self.input_alphabets))
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))

    def row(self, values: Iterable[int]) -> int:
        index = 0
        for value, size in zip(values, self.input_alphabets):
            index = index * size + value
        return index

    def evaluate(self, values: Iterable[int]) -> int:
        return self.table[self.row(values)]

    def problems(self) -> List[str]:
        out = []
        if len(self.inputs) != len(self.input_alphabets):
            out.append("inputs and inputAlphabets differ in length")
        if any(a < 1 for a in self.input_alphabets) or self.output_alphabet < 1:
            out.append("alphabet sizes must be positive")
        if len(self.table) != math.prod(self.input_alphabets):
            out.append(f"table has {len(self.table)} entries, expected {math.prod(self.input_alphabets)}")
        if any(v < 0 or v >= self.output_alphabet for v in self.table):
            out.append("table entry outside the output alphabet")
        return out


@dataclass(frozen=True)
class Demand:
    sink: str
    kind: Union[MessageDemand, FunctionDemand]

    @property
    def is_function(self) -> bool:
        return isinstance(self.kind, FunctionDemand)

    @property
    def messages(self) -> FrozenSet[str]:
        if self.is_function:
            return frozenset(self.kind.inputs)
        return self.kind.wanted


def wants(sink: str, *message_ids: str) -> Demand:
    """Shorthand for a message demand."""
    return Demand(sink, MessageDemand(frozenset(message_ids)))


@dataclass(frozen=True)
class Violation:
    kind: str
    element: str
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.element}){': ' + self.detail if self.detail else ''}"


@dataclass(frozen=True)
class Network:
    nodes: Tuple[Node, ...] = ()
    links: Tuple[Link, ...] = ()
    messages: Tuple[Message, ...] = ()
    demands: Tuple[Demand, ...] = ()

    def __post_init__(self):
        for name in ("nodes", "links", "messages", "demands"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    #
    # lookups
    #

    @cached_property
    def _nodes_by_id(self) -> Dict[str, Node]:
        index: Dict[str, Node] = {}
        for node in self.nodes:
            index.setdefault(node.id, node)
        return index

    @cached_property
    def _links_by_id(self) -> Dict[str, Link]:
        index: Dict[str, Link] = {}
        for link in self.links:
            index.setdefault(link.id, link)
        return index

    @cached_property
    def _incidence(self) -> Tuple[Dict[str, List[Link]], Dict[str, List[Link]]]:
        ins: Dict[str, List[Link]] = {}
        outs: Dict[str, List[Link]] = {}
        for link in self.links:
            outs.setdefault(link.tail, []).append(link)
            ins.setdefault(link.head, []).append(link)
        return ins, outs

    def node(self, node_id: str) -> Node:
        return self._nodes_by_id[node_id]

    def link(self, link_id: str) -> Link:
        return self._links_by_id[link_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes_by_id

    def has_link(self, link_id: str) -> bool:
        return link_id in self._links_by_id

    @property
    def node_ids(self) -> Tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    @property
    def link_ids(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.links)

    @property
    def message_ids(self) -> Tuple[str, ...]:
        return tuple(m.id for m in self.messages)

    def in_links(self, node_id: str) -> Tuple[Link, ...]:
        return tuple(self._incidence[0].get(node_id, ()))

    def out_links(self, node_id: str) -> Tuple[Link, ...]:
        return tuple(self._incidence[1].get(node_id, ()))

    def messages_at(self, node_id: str) -> Tuple[Message, ...]:
        return tuple(m for m in self.messages if m.source == node_id)

    def message(self, message_id: str) -> Message:
        for m in self.messages:
            if m.id == message_id:
                return m
        raise KeyError(message_id)

    def demands_at(self, node_id: str) -> Tuple[Demand, ...]:
        return tuple(d for d in self.demands if d.sink == node_id)

    def wanted(self, sink: str) -> FrozenSet[str]:
        """beta(t): the messages a sink asks for through message demands."""
        out: FrozenSet[str] = frozenset()
        for d in self.demands_at(sink):
            if not d.is_function:
                out |= d.kind.wanted
        return out

    def ids_with_role(self, role: Role) -> Tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.role == role)

    @property
    def sources(self) -> Tuple[str, ...]:
        return self.ids_with_role(Role.SOURCE)

    @property
    def relays(self) -> Tuple[str, ...]:
        return self.ids_with_role(Role.RELAY)

    @property
    def sinks(self) -> Tuple[str, ...]:
        return self.ids_with_role(Role.SINK)

    @property
    def has_function_demands(self) -> bool:
        return any(d.is_function for d in self.demands)

    @cached_property
    def graph(self) -> nx.MultiDiGraph:
        """networkx view; edge keys are link ids and carry a ``capacity`` attribute."""
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.node_ids)
        for link in self.links:
            g.add_edge(link.tail, link.head, key=link.id, capacity=link.capacity)
        return g

    #
    # derived networks
    #

    def replace(self, **changes) -> "Network":
        return dataclasses.replace(self, **changes)

    def with_capacity(self, link_id: str, capacity) -> "Network":
        cap = as_rational(capacity)
        return self.replace(links=[
            dataclasses.replace(e, capacity=cap) if e.id == link_id else e for e in self.links
        ])

    def without_links(self, link_ids: Iterable[str]) -> "Network":
        drop = set(link_ids)
        return self.replace(links=[e for e in self.links if e.id not in drop])

    def capacities(self) -> Dict[str, Fraction]:
        return {e.id: e.capacity for e in self.links}


@dataclass(frozen=True)
class RateVector:
    entries: Tuple[Tuple[str, Fraction], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((k, as_rational(v)) for k, v in self.entries))

    def __getitem__(self, message_id: str) -> Fraction:
        for key, value in self.entries:
            if key == message_id:
                return value
        raise KeyError(message_id)

    def keys(self) -> Tuple[str, ...]:
        return tuple(k for k, _ in self.entries)

    def items(self) -> Tuple[Tuple[str, Fraction], ...]:
        return self.entries

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.entries)

    @classmethod
    def of(cls, net: Network, mapping: Mapping[str, object]) -> "RateVector":
        """Rate vector over exactly the network's messages, in network order."""
        keys = set(mapping)
        expected = set(net.message_ids)
        if keys != expected:
            raise RateVectorMismatch(
                f"rate vector keys {sorted(keys)} differ from the network messages {sorted(expected)}"
            )
        rates = [(m, as_rational(mapping[m])) for m in net.message_ids]
        for m, r in rates:
            if r < 0:
                raise RateVectorMismatch(f"rate of '{m}' is negative ({r})")
        return cls(tuple(rates))

    @classmethod
    def from_network(cls, net: Network, overrides: Optional[Mapping[str, object]] = None) -> "RateVector":
        overrides = dict(overrides or {})
        mapping = {}
        for m in net.messages:
            if m.id in overrides:
                mapping[m.id] = overrides.pop(m.id)
            elif m.rate is not None:
                mapping[m.id] = m.rate
            else:
                raise MissingRate(m.id)
        if overrides:
            raise RateVectorMismatch(f"unknown message ids {sorted(overrides)}")
        return cls.of(net, mapping)


#
# Validation
#

def find_cycle(net: Network) -> List[str]:
    """Return the node ids of one directed cycle, or [] for an acyclic network."""
    try:
        edges = nx.find_cycle(net.graph, orientation="original")
    except nx.NetworkXNoCycle:
        return []
    return [edges[0][0]] + [e[1] for e in edges]


def _copy_problem(net: Network, link: Link) -> str:
    if not net.has_link(link.copy_of):
        return f"copies unknown link '{link.copy_of}'"
    origin = net.link(link.copy_of)
    if origin.copy_of is not None:
        return f"copies '{origin.id}', which is itself a copy"
    if origin.tail != link.tail or origin.capacity != link.capacity:
        return f"copies '{origin.id}' but differs in tail or capacity"
    return ""


def validate(net: Network) -> List[Violation]:
    """Return every structural violation of `net` (empty list means valid)."""
    out: List[Violation] = []

    seen = set()
    for node in net.nodes:
        if node.id in seen:
            out.append(Violation("DuplicateNodeId", node.id))
        seen.add(node.id)
    seen = set()
    for link in net.links:
        if link.id in seen:
            out.append(Violation("DuplicateLinkId", link.id))
        seen.add(link.id)
        for end in (link.tail, link.head):
            if not net.has_node(end):
                out.append(Violation("UnknownNode", link.id, f"endpoint '{end}' does not exist"))
        if link.tail == link.head:
            out.append(Violation("SelfLoop", link.id))
        if link.capacity < 0:
            out.append(Violation("NegativeCapacity", link.id, str(link.capacity)))
        if link.copy_of is not None:
            problem = _copy_problem(net, link)
            if problem:
                out.append(Violation("BadCopy", link.id, problem))

    cycle = find_cycle(net)
    if cycle:
        out.append(Violation("CycleDetected", cycle[0], " -> ".join(cycle)))

    for node in net.nodes:
        n_in, n_out = len(net.in_links(node.id)), len(net.out_links(node.id))
        if node.role == Role.SOURCE and n_in:
            out.append(Violation("SourceHasInLink", node.id))
        elif node.role == Role.SINK and n_out:
            out.append(Violation("SinkHasOutLink", node.id))
        elif node.role == Role.RELAY:
            if not n_in:
                out.append(Violation("RelayMissingInLink", node.id))
            if not n_out:
                out.append(Violation("RelayMissingOutLink", node.id))

    seen = set()
    for message in net.messages:
        if message.id in seen:
            out.append(Violation("DuplicateMessageId", message.id))
        seen.add(message.id)
        if not net.has_node(message.source):
            out.append(Violation("UnknownNode", message.id, f"source '{message.source}' does not exist"))
        elif net.node(message.source).role != Role.SOURCE:
            out.append(Violation("MessageAtNonSource", message.id, f"held by '{message.source}'"))
        if message.rate is not None and message.rate < 0:
            out.append(Violation("NegativeRate", message.id, str(message.rate)))

    known = set(net.message_ids)
    for demand in net.demands:
        if not net.has_node(demand.sink):
            out.append(Violation("UnknownNode", demand.sink, "demand names a missing sink"))
        elif net.node(demand.sink).role != Role.SINK:
            out.append(Violation("DemandAtNonSink", demand.sink))
        for m in sorted(demand.messages - known):
            out.append(Violation("UnknownMessage", demand.sink, f"message '{m}'"))
        if demand.is_function:
            for problem in demand.kind.problems():
                out.append(Violation("BadFunctionTable", demand.sink, problem))
        elif not demand.kind.wanted:
            out.append(Violation("EmptyDemand", demand.sink))
    return out


def topological_order(net: Network) -> List[str]:
    """Node ids with every link's tail before its head; ties follow network order."""
    position = {node_id: i for i, node_id in enumerate(net.graph.nodes)}
    try:
        return list(nx.lexicographical_topological_sort(net.graph, key=position.__getitem__))
    except nx.NetworkXUnfeasible:
        raise CyclicInput(find_cycle(net))


def link_order(net: Network) -> List[Link]:
    """Links sorted by the topological position of their tail, then network order.

    Copies follow the other links of their tail.
    """
    rank = {v: i for i, v in enumerate(topological_order(net))}
    return sorted(net.links, key=lambda e: (rank[e.tail], e.copy_of is not None))


def _fresh_id(taken: set, base: str) -> str:
    candidate, i = base, 1
    while candidate in taken:
        i += 1
        candidate = f"{base}.{i}"
    taken.add(candidate)
    return candidate


#
# Rewrites of the model itself
#

def prune(net: Network, drop_zero: bool = False) -> Network:
    """Drop relays without in-links or without out-links, repeatedly.

    Such a relay either reaches nobody or only emits constants, so removing
    it (with its links) does not change what the sinks can recover. With
    `drop_zero`, zero-capacity links are removed first.
    """
    if drop_zero:
        net = net.replace(links=[e for e in net.links if e.capacity > 0])
    while True:
        dead = {
            v for v in net.relays
            if not net.in_links(v) or not net.out_links(v)
        }
        if not dead:
            return net
        logger.debug(f"prune: dropping dangling relays {sorted(dead)}")
        net = net.replace(
            nodes=[n for n in net.nodes if n.id not in dead],
            links=[e for e in net.links if e.tail not in dead and e.head not in dead],
        )


def canonicalize(net: Network) -> Network:
    """Bring a network to the source/relay/sink form.

    A node that observes messages but also has in-links (or demands) hands
    each message to a fresh pure source node linked to it with capacity equal
    to the node's total outgoing capacity. A node that demands messages but
    has out-links hands its demands to a fresh sink fed with the node's total
    incoming capacity. Dangling relays are pruned. The result validates and
    the operation is idempotent.
    """
    if find_cycle(net):
        raise CyclicInput(find_cycle(net))
    taken = set(net.node_ids) | set(net.link_ids)
    roles = {n.id: n.role for n in net.nodes}
    links = list(net.links)
    nodes = list(net.nodes)
    messages = list(net.messages)
    demands = list(net.demands)

    for node in net.nodes:
        held = [m for m in messages if m.source == node.id]
        if not held:
            continue
        if not net.in_links(node.id) and not net.demands_at(node.id):
            roles[node.id] = Role.SOURCE
            continue
        feed = sum((e.capacity for e in net.out_links(node.id)), Fraction(0))
        for m in held:
            src = _fresh_id(taken, f"s_{m.id}")
            nodes.append(Node(src, Role.SOURCE))
            links.append(Link(_fresh_id(taken, f"{src}>{node.id}"), src, node.id, feed))
            messages[messages.index(m)] = dataclasses.replace(m, source=src)
        roles[node.id] = Role.RELAY

    moved = net.replace(links=links, nodes=nodes, messages=messages)
    for node_id in net.node_ids:
        asked = [d for d in demands if d.sink == node_id]
        if not asked:
            continue
        if not moved.out_links(node_id) and not moved.messages_at(node_id):
            roles[node_id] = Role.SINK
            continue
        feed = sum((e.capacity for e in moved.in_links(node_id)), Fraction(0))
        sink = _fresh_id(taken, f"t_{node_id}")
        nodes.append(Node(sink, Role.SINK))
        links.append(Link(_fresh_id(taken, f"{node_id}>{sink}"), node_id, sink, feed))
        demands = [dataclasses.replace(d, sink=sink) if d.sink == node_id else d for d in demands]
        roles[node_id] = Role.RELAY

    result = net.replace(links=links, nodes=nodes, messages=messages, demands=demands)
    for node in result.nodes:
        role = roles.get(node.id, node.role)
        if role == Role.SOURCE and result.in_links(node.id):
            role = Role.RELAY
        if role == Role.SINK and result.out_links(node.id):
            role = Role.RELAY
        roles[node.id] = role
    result = result.replace(nodes=[dataclasses.replace(n, role=roles[n.id]) for n in result.nodes])
    return prune(result)


def subnetwork(net: Network, relay_subset: Iterable[str], bypass: bool = True) -> Network:
    """Extract the component induced by a set of relay nodes.

    Sources of the component are the outside nodes with a link into the
    subset, sinks the outside nodes with a link out of it. With `bypass`,
    links between those outside nodes are kept too (except links that would
    enter a component source or leave a component sink); without it only
    links incident to the subset are kept. An outside node that both feeds
    and receives from the subset keeps its feeding links and has its
    receiving links redirected to a fresh sink ``<id>.in``. Messages and
    demands are not carried over: the component's inputs and outputs are
    abstract.
    """
    inner = list(dict.fromkeys(relay_subset))
    for v in inner:
        if not net.has_node(v) or net.node(v).role != Role.RELAY:
            raise NotARelay(v)
    inside = set(inner)
    feeders = {e.tail for e in net.links if e.head in inside and e.tail not in inside}
    receivers = {e.head for e in net.links if e.tail in inside and e.head not in inside}
    both = feeders & receivers
    taken = set(net.node_ids)
    renamed = {v: _fresh_id(taken, f"{v}.in") for v in sorted(both)}

    nodes = []
    for node in net.nodes:
        if node.id in inside:
            nodes.append(Node(node.id, Role.RELAY))
        elif node.id in feeders:
            nodes.append(Node(node.id, Role.SOURCE))
        elif node.id in receivers:
            nodes.append(Node(node.id, Role.SINK))
    for v in sorted(both):
        nodes.append(Node(renamed[v], Role.SINK))

    links = []
    for e in net.links:
        if e.tail in inside and e.head in inside:
            links.append(e)
        elif e.head in inside and e.tail in feeders:
            links.append(e)
        elif e.tail in inside and e.head in receivers:
            links.append(dataclasses.replace(e, head=renamed.get(e.head, e.head)))
        elif bypass and e.tail in feeders and e.head in receivers:
            links.append(dataclasses.replace(e, head=renamed.get(e.head, e.head)))
    return Network(nodes=nodes, links=links)


def split_sinks(net: Network) -> Network:
    """Replace every sink wanting several messages by one sink per message.

    Each new sink ``<t>.<message>`` receives a copy of every in-link of t;
    the copies of one link repeat its symbol, so the sinks observe exactly
    what t observed.
    """
    for d in net.demands:
        if d.is_function:
            raise FunctionDemandPresent(d.sink)
    order = {m: i for i, m in enumerate(net.message_ids)}
    split = {t: sorted(net.wanted(t), key=order.get) for t in net.sinks if len(net.wanted(t)) > 1}
    if not split:
        return net
    taken = set(net.node_ids) | set(net.link_ids)
    nodes, links, demands = [], [], []
    copies: Dict[str, List[Tuple[str, str]]] = {}
    for node in net.nodes:
        if node.id not in split:
            nodes.append(node)
            continue
        copies[node.id] = []
        for m in split[node.id]:
            sink = _fresh_id(taken, f"{node.id}.{m}")
            nodes.append(Node(sink, Role.SINK))
            copies[node.id].append((sink, m))
    first: Dict[str, str] = {}
    for e in net.links:
        if e.head in split:
            first[e.id] = _fresh_id(taken, f"{e.id}.{copies[e.head][0][1]}")
    for e in net.links:
        if e.head not in split:
            links.append(dataclasses.replace(e, copy_of=first[e.copy_of]) if e.copy_of in first else e)
            continue
        origin = first.get(e.copy_of, e.copy_of) if e.copy_of else first[e.id]
        for i, (sink, m) in enumerate(copies[e.head]):
            link_id = first[e.id] if i == 0 else _fresh_id(taken, f"{e.id}.{m}")
            links.append(dataclasses.replace(e, id=link_id, head=sink, copy_of=None if link_id == origin else origin))
    for d in net.demands:
        if d.sink not in split:
            demands.append(d)
    for t, pairs in copies.items():
        for sink, m in pairs:
            demands.append(wants(sink, m))
    return net.replace(nodes=nodes, links=links, demands=demands)
