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
"""Committed desk-scale networks and the targets used to sweep them.

Builders return fresh `Network` values with stable ids so that traces,
DOT exports and search witnesses are reproducible.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from netbound.netcore import (
    Demand, FunctionDemand, Link, Message, Network, Node, Role, as_rational, wants,
)
from netbound.oracles import CodeAssignment, SearchTarget

logger = logging.getLogger(__name__)

SOURCE, RELAY, SINK = Role.SOURCE, Role.RELAY, Role.SINK


def _rate(rates, i):
    return None if rates is None else rates[i]


#
# Function demands at a two-source sink
#

def _two_source_table(rule) -> Tuple[int, ...]:
    # inputs: M1 = b1 (2 symbols), M2 = 2*b2 + b3 (4 symbols); row m1*4 + m2
    return tuple(int(rule(m1, m2 >> 1, m2 & 1)) for m1 in range(2) for m2 in range(4))


def xnor_or_table() -> Tuple[int, ...]:
    """(b1 XNOR b2) OR b3: x2 must tell three classes of (b2, b3) apart."""
    return _two_source_table(lambda b1, b2, b3: (b1 == b2) or b3)


def affine_table() -> Tuple[int, ...]:
    """1 + b1 + b2 + b3 over GF(2): x2 only needs to send b2 + b3."""
    return _two_source_table(lambda b1, b2, b3: 1 ^ b1 ^ b2 ^ b3)


def function_demand(table: Sequence[int], sink: str = "y") -> Demand:
    return Demand(sink, FunctionDemand(("M1", "M2"), (2, 4), 2, tuple(table)))


def counterexample_demand(sink: str = "y") -> Demand:
    return function_demand(xnor_or_table(), sink)


def affine_demand(sink: str = "y") -> Demand:
    return function_demand(affine_table(), sink)


#
# Builders
#

def y_network(a=1, b=1, c=1, rates: Optional[Sequence] = None, demands: Optional[Sequence[Demand]] = None) -> Network:
    """x1 -r1-> m <-r2- x2, m -r3-> y."""
    return Network(
        nodes=(Node("x1", SOURCE), Node("x2", SOURCE), Node("m", RELAY), Node("y", SINK)),
        links=(Link("r1", "x1", "m", a), Link("r2", "x2", "m", b), Link("r3", "m", "y", c)),
        messages=(Message("M1", "x1", _rate(rates, 0)), Message("M2", "x2", _rate(rates, 1))),
        demands=tuple(demands) if demands is not None else (wants("y", "M1", "M2"),),
    )


def two_relay(a=1, b=1, b_prime=1, c=1, d=1, rates: Optional[Sequence] = None,
              demands: Optional[Sequence[Demand]] = None) -> Network:
    """Two relays: x1 -a-> r1, x2 -b-> r1, x2 -bp-> r2, r2 -d-> r1, r1 -c-> y."""
    return Network(
        nodes=(Node("x1", SOURCE), Node("x2", SOURCE), Node("r1", RELAY), Node("r2", RELAY), Node("y", SINK)),
        links=(Link("a", "x1", "r1", a), Link("b", "x2", "r1", b), Link("bp", "x2", "r2", b_prime),
               Link("d", "r2", "r1", d), Link("c", "r1", "y", c)),
        messages=(Message("M1", "x1", _rate(rates, 0)), Message("M2", "x2", _rate(rates, 1))),
        demands=tuple(demands) if demands is not None else (wants("y", "M1", "M2"),),
    )


def parallel_y(a=1, b=1, c=1, a_tilde=1, b_tilde=1, c_tilde=1, rates: Optional[Sequence] = None,
               demands: Optional[Sequence[Demand]] = None) -> Network:
    """Two Y-networks sharing their sources and sink, through relays m1 and m2."""
    return Network(
        nodes=(Node("x1", SOURCE), Node("x2", SOURCE), Node("m1", RELAY), Node("m2", RELAY), Node("y", SINK)),
        links=(Link("a", "x1", "m1", a), Link("b", "x2", "m1", b), Link("c", "m1", "y", c),
               Link("at", "x1", "m2", a_tilde), Link("bt", "x2", "m2", b_tilde), Link("ct", "m2", "y", c_tilde)),
        messages=(Message("M1", "x1", _rate(rates, 0)), Message("M2", "x2", _rate(rates, 1))),
        demands=tuple(demands) if demands is not None else (wants("y", "M1", "M2"),),
    )


def chain(a=1, bs: Sequence = (1, 1), ds: Sequence = (1,), c=1, rates: Optional[Sequence] = None,
          demands: Optional[Sequence[Demand]] = None) -> Network:
    """A chain of relays r0 <- r1 <- ... <- rk, each fed by x2; x1 feeds r0, r0 feeds y.

    ``bs[i]`` is the capacity x2 -> ri, ``ds[i-1]`` the capacity ri -> r(i-1).
    """
    k = len(bs) - 1
    if len(ds) != k:
        raise ValueError(f"a chain of {k + 1} relays needs {k} chain links, got {len(ds)}")
    relays = [Node(f"r{i}", RELAY) for i in range(k + 1)]
    links = [Link("a", "x1", "r0", a)]
    links += [Link(f"b{i}", "x2", f"r{i}", bs[i]) for i in range(k + 1)]
    links += [Link(f"d{i}", f"r{i}", f"r{i - 1}", ds[i - 1]) for i in range(k, 0, -1)]
    links.append(Link("c", "r0", "y", c))
    return Network(
        nodes=(Node("x1", SOURCE), Node("x2", SOURCE), *relays, Node("y", SINK)),
        links=links,
        messages=(Message("M1", "x1", _rate(rates, 0)), Message("M2", "x2", _rate(rates, 1))),
        demands=tuple(demands) if demands is not None else (wants("y", "M1", "M2"),),
    )


def multi_source(a=1, bs: Sequence = (1, 1), b_primes: Sequence = (1, 1), d=2, c=1,
                 rates: Optional[Sequence] = None) -> Network:
    """Sources x1..xk feeding both r1 and r2, x0 feeding r1 only; r2 -d-> r1 -c-> y."""
    k = len(bs)
    if len(b_primes) != k:
        raise ValueError("bs and b_primes differ in length")
    sources = [Node(f"x{i}", SOURCE) for i in range(k + 1)]
    links = [Link("a", "x0", "r1", a)]
    for i in range(1, k + 1):
        links.append(Link(f"b{i}", f"x{i}", "r1", bs[i - 1]))
        links.append(Link(f"bp{i}", f"x{i}", "r2", b_primes[i - 1]))
    links += [Link("d", "r2", "r1", d), Link("c", "r1", "y", c)]
    messages = tuple(Message(f"M{i}", f"x{i}", _rate(rates, i)) for i in range(k + 1))
    return Network(
        nodes=(*sources, Node("r1", RELAY), Node("r2", RELAY), Node("y", SINK)),
        links=links,
        messages=messages,
        demands=(wants("y", *(m.id for m in messages)),),
    )


def butterfly(capacity=1, rates: Optional[Sequence] = None, super_source: bool = False) -> Network:
    """The butterfly: both sinks want both messages through one shared bottleneck.

    With ``super_source`` the two sources are fed by a single node S holding
    both messages (the nine-link form).
    """
    if super_source:
        nodes = (Node("S", SOURCE), Node("s1", RELAY), Node("s2", RELAY), Node("r", RELAY), Node("q", RELAY),
                 Node("t1", SINK), Node("t2", SINK))
        holder1 = holder2 = "S"
        links = [Link("S-s1", "S", "s1", capacity), Link("S-s2", "S", "s2", capacity)]
    else:
        nodes = (Node("s1", SOURCE), Node("s2", SOURCE), Node("r", RELAY), Node("q", RELAY),
                 Node("t1", SINK), Node("t2", SINK))
        holder1, holder2 = "s1", "s2"
        links = []
    links += [Link("s1-t1", "s1", "t1", capacity), Link("s1-r", "s1", "r", capacity),
              Link("s2-r", "s2", "r", capacity), Link("s2-t2", "s2", "t2", capacity),
              Link("r-q", "r", "q", capacity), Link("q-t1", "q", "t1", capacity), Link("q-t2", "q", "t2", capacity)]
    return Network(
        nodes=nodes,
        links=links,
        messages=(Message("M1", holder1, _rate(rates, 0)), Message("M2", holder2, _rate(rates, 1))),
        demands=(wants("t1", "M1", "M2"), wants("t2", "M1", "M2")),
    )


def parallel_pair(c1=1, c2=1, rate=None) -> Network:
    return Network(
        nodes=(Node("u", SOURCE), Node("v", SINK)),
        links=(Link("e1", "u", "v", c1), Link("e2", "u", "v", c2)),
        messages=(Message("M", "u", rate),),
        demands=(wants("v", "M"),),
    )


def triangle(uv=1, uw=1, wv=1, rate=None) -> Network:
    return Network(
        nodes=(Node("u", SOURCE), Node("w", RELAY), Node("v", SINK)),
        links=(Link("uv", "u", "v", uv), Link("uw", "u", "w", uw), Link("wv", "w", "v", wv)),
        messages=(Message("M", "u", rate),),
        demands=(wants("v", "M"),),
    )


def single_path(first=1, second=1, rate=None) -> Network:
    return Network(
        nodes=(Node("s", SOURCE), Node("v", RELAY), Node("t", SINK)),
        links=(Link("sv", "s", "v", first), Link("vt", "v", "t", second)),
        messages=(Message("M", "s", rate),),
        demands=(wants("t", "M"),),
    )


def t1_instance() -> Tuple[Network, CodeAssignment]:
    """Super-source S with two unit messages; A forwards M1 to t1 and M2 to t2.

    The code sends (M1, M2) verbatim on S->A and splits it at A.
    """
    net = Network(
        nodes=(Node("S", SOURCE), Node("A", RELAY), Node("t1", SINK), Node("t2", SINK)),
        links=(Link("S-A", "S", "A", 2), Link("A-t1", "A", "t1", 1), Link("A-t2", "A", "t2", 1)),
        messages=(Message("M1", "S", 1), Message("M2", "S", 1)),
        demands=(wants("t1", "M1"), wants("t2", "M2")),
    )
    code = CodeAssignment(
        blocklength=1,
        message_alphabets={"M1": 2, "M2": 2},
        link_tables={"S-A": (0, 1, 2, 3), "A-t1": (0, 0, 1, 1), "A-t2": (0, 1, 0, 1)},
        link_inputs={"S-A": ("M1", "M2"), "A-t1": ("S-A",), "A-t2": ("S-A",)},
        link_alphabets={"S-A": 4, "A-t1": 2, "A-t2": 2},
    )
    return net, code


#
# Sweep corpus
#

@dataclass(frozen=True)
class CorpusEntry:
    name: str
    network: Network
    targets: Tuple[SearchTarget, ...]


def _rates(**rates) -> dict:
    return {m: as_rational(r) for m, r in rates.items()}


def two_source_targets(sink: str = "y") -> Tuple[SearchTarget, ...]:
    """Blocklength-1 targets for networks with sources x1, x2 and a sink wanting both."""
    return (
        SearchTarget(1, _rates(M1=1, M2=2), (counterexample_demand(sink),), "xnor-or"),
        SearchTarget(1, _rates(M1=1, M2=2), (affine_demand(sink),), "affine"),
        SearchTarget(1, _rates(M1=1, M2=1), (wants(sink, "M1", "M2"),), "both-messages"),
        SearchTarget(1, _rates(M1=1, M2=0), (wants(sink, "M1"),), "first-message"),
        SearchTarget(1, _rates(M1=0, M2=1), (wants(sink, "M2"),), "second-message"),
    )


def single_message_targets(rates: Sequence = (1, 2)) -> Tuple[SearchTarget, ...]:
    return tuple(SearchTarget(1, _rates(M=r), None, f"rate-{r}") for r in rates)


def build_corpus() -> Tuple[CorpusEntry, ...]:
    pair_targets = (
        SearchTarget(1, _rates(M1=1, M2=1), None, "unit-rates"),
        SearchTarget(1, _rates(M1=1, M2=0), None, "first-only"),
    )
    return (
        CorpusEntry("y-1-1-1", y_network(1, 1, 1), two_source_targets()),
        CorpusEntry("y-1-2-1", y_network(1, 2, 1), two_source_targets()),
        CorpusEntry("two-relay-d0", two_relay(d=0), two_source_targets()),
        CorpusEntry("two-relay-d1/2", two_relay(d=Fraction(1, 2)), two_source_targets()),
        CorpusEntry("two-relay-d1", two_relay(d=1), two_source_targets()),
        # with unit capacities on both halves the merged sink link alone has 4**16 tables
        CorpusEntry("parallel-y", parallel_y(c=2, a_tilde=Fraction(1, 2), b_tilde=Fraction(1, 2), c_tilde=1),
                    two_source_targets()),
        CorpusEntry("parallel-y-half", parallel_y(a_tilde=Fraction(1, 2), b_tilde=Fraction(1, 2),
                                                  c_tilde=Fraction(1, 2)), two_source_targets()),
        CorpusEntry("chain-2", chain(bs=(1, 1), ds=(1,)), two_source_targets()),
        CorpusEntry("butterfly", butterfly(), pair_targets),
        CorpusEntry("parallel-pair", parallel_pair(), single_message_targets()),
        CorpusEntry("triangle", triangle(), single_message_targets()),
        CorpusEntry("single-path", single_path(), single_message_targets()),
        CorpusEntry("super-source-t1", t1_instance()[0], (
            SearchTarget(1, _rates(M1=1, M2=1), None, "unit-rates"),
        )),
    )


CORPUS = build_corpus()


def entry(name: str) -> CorpusEntry:
    for e in CORPUS:
        if e.name == name:
            return e
    raise KeyError(name)
