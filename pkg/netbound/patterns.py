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
"""Fixed-shape components the merge rewrites apply to.

Matching is exact: the named relays must have precisely the listed links and
no others. Every `match_*` function raises `PatternMismatch` with the reason
when the shape is not there.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from netbound.exceptions import PatternMismatch
from netbound.netcore import Link, Network, Role

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParallelYPattern:
    """Two Y-networks sharing sources and sink: x1,x2 -> m1 -> y and x1,x2 -> m2 -> y."""

    x1: str
    x2: str
    y: str
    m1: str
    m2: str
    a: Link
    b: Link
    c: Link
    a_tilde: Link
    b_tilde: Link
    c_tilde: Link

    kind = "parallel-y"

    @property
    def relays(self) -> Tuple[str, ...]:
        return (self.m1, self.m2)

    @property
    def alpha(self) -> Optional[Fraction]:
        """The common ratio of the second Y to the first, or None when the ratios differ."""
        ratios = {t.capacity / o.capacity if o.capacity else None
                  for o, t in ((self.a, self.a_tilde), (self.b, self.b_tilde), (self.c, self.c_tilde))}
        if len(ratios) != 1 or None in ratios:
            return None
        alpha = ratios.pop()
        return alpha if alpha > 0 else None


@dataclass(frozen=True)
class TwoRelayPattern:
    """x1 -a-> r1, x2 -b-> r1, x2 -b'-> r2, r2 -d-> r1, r1 -c-> y."""

    x1: str
    x2: str
    r1: str
    r2: str
    y: str
    a: Link
    b: Link
    b_prime: Link
    d: Link
    c: Link

    kind = "two-relay"

    @property
    def relays(self) -> Tuple[str, ...]:
        return (self.r1, self.r2)

    @property
    def beta(self) -> Fraction:
        return self.b_prime.capacity / (self.b.capacity + self.b_prime.capacity)


@dataclass(frozen=True)
class ChainPattern:
    """A chain of relays r0 <- r1 <- ... <- rk fed by x2, with x1 -a-> r0 -c-> y.

    ``bs[i]`` is the link x2 -> ri and ``ds[i-1]`` the link ri -> r(i-1).
    """

    x1: str
    x2: str
    y: str
    chain: Tuple[str, ...]
    a: Link
    bs: Tuple[Link, ...]
    ds: Tuple[Link, ...]
    c: Link

    kind = "chain"

    @property
    def relays(self) -> Tuple[str, ...]:
        return self.chain

    @property
    def alphas(self) -> Tuple[Fraction, ...]:
        b0 = self.bs[0].capacity
        return tuple(b.capacity / b0 for b in self.bs)

    @property
    def a1(self) -> Fraction:
        return self.a.capacity / sum(self.alphas)

    @property
    def c1(self) -> Fraction:
        return self.c.capacity / sum(self.alphas)


@dataclass(frozen=True)
class MultiSourcePattern:
    """x0 -a-> r1; each xi -bi-> r1 and -b'i-> r2; r2 -d-> r1 -c-> y."""

    x0: str
    sources: Tuple[str, ...]
    r1: str
    r2: str
    y: str
    a: Link
    bs: Tuple[Link, ...]
    b_primes: Tuple[Link, ...]
    d: Link
    c: Link

    kind = "multi-source"

    @property
    def relays(self) -> Tuple[str, ...]:
        return (self.r1, self.r2)

    @property
    def betas(self) -> Tuple[Fraction, ...]:
        return tuple(bp.capacity / (b.capacity + bp.capacity) for b, bp in zip(self.bs, self.b_primes))

    @property
    def literal_betas(self) -> Tuple[Fraction, ...]:
        """b_i / b'_i, the ratio as literally written for this rewrite."""
        return tuple(b.capacity / bp.capacity for b, bp in zip(self.bs, self.b_primes))


Pattern = Union[ParallelYPattern, TwoRelayPattern, ChainPattern, MultiSourcePattern]


def _relay(net: Network, v: str) -> None:
    if not net.has_node(v):
        raise PatternMismatch(f"node '{v}' does not exist")
    if net.node(v).role != Role.RELAY:
        raise PatternMismatch(f"node '{v}' is not a relay")


def _single(links, what: str) -> Link:
    if len(links) != 1:
        raise PatternMismatch(f"expected exactly one {what}, found {len(links)}")
    return links[0]


def _positive(*links: Link) -> None:
    for e in links:
        if e.capacity <= 0:
            raise PatternMismatch(f"link '{e.id}' has zero capacity")


def match_parallel_y(net: Network, m1: str, m2: str) -> ParallelYPattern:
    for v in (m1, m2):
        _relay(net, v)
    if m1 == m2:
        raise PatternMismatch("the two relays must differ")
    m1, m2 = sorted((m1, m2))
    shapes = []
    for m in (m1, m2):
        ins = net.in_links(m)
        if len(ins) != 2 or ins[0].tail == ins[1].tail:
            raise PatternMismatch(f"relay '{m}' must have two in-links from distinct nodes")
        out = _single(net.out_links(m), f"out-link of '{m}'")
        shapes.append(({e.tail: e for e in ins}, out))
    (ins1, c), (ins2, c_tilde) = shapes
    if set(ins1) != set(ins2):
        raise PatternMismatch("the relays are fed by different nodes")
    if c.head != c_tilde.head:
        raise PatternMismatch("the relays feed different nodes")
    x1, x2 = sorted(ins1)
    if {x1, x2} & {m1, m2} or c.head in (x1, x2, m1, m2):
        raise PatternMismatch("relays may not link to each other")
    pattern = ParallelYPattern(x1, x2, c.head, m1, m2, ins1[x1], ins1[x2], c, ins2[x1], ins2[x2], c_tilde)
    _positive(pattern.a, pattern.b, pattern.c, pattern.a_tilde, pattern.b_tilde, pattern.c_tilde)
    return pattern


def match_two_relay(net: Network, r1: str, r2: str) -> TwoRelayPattern:
    for v in (r1, r2):
        _relay(net, v)
    if r1 == r2:
        raise PatternMismatch("the two relays must differ")
    b_prime = _single(net.in_links(r2), f"in-link of '{r2}'")
    d = _single(net.out_links(r2), f"out-link of '{r2}'")
    if d.head != r1:
        raise PatternMismatch(f"'{r2}' does not feed '{r1}'")
    c = _single(net.out_links(r1), f"out-link of '{r1}'")
    x2 = b_prime.tail
    ins = [e for e in net.in_links(r1) if e.id != d.id]
    if len(ins) != 2:
        raise PatternMismatch(f"'{r1}' must have exactly three in-links")
    from_x2 = [e for e in ins if e.tail == x2]
    b = _single(from_x2, f"link from '{x2}' to '{r1}'")
    a = next(e for e in ins if e.id != b.id)
    if a.tail in (x2, r1, r2) or c.head in (a.tail, x2, r2):
        raise PatternMismatch("component nodes overlap")
    _positive(a, b, b_prime, d, c)
    return TwoRelayPattern(a.tail, x2, r1, r2, c.head, a, b, b_prime, d, c)


def match_chain(net: Network, *chain: str) -> ChainPattern:
    """Match relays ``r0, r1, ..., rk`` (k >= 1), r0 being the one feeding y."""
    if len(chain) < 2 or len(set(chain)) != len(chain):
        raise PatternMismatch("a chain needs at least two distinct relays")
    for v in chain:
        _relay(net, v)
    k = len(chain) - 1
    c = _single(net.out_links(chain[0]), f"out-link of '{chain[0]}'")
    ds = []
    for i in range(1, k + 1):
        d = _single(net.out_links(chain[i]), f"out-link of '{chain[i]}'")
        if d.head != chain[i - 1]:
            raise PatternMismatch(f"'{chain[i]}' does not feed '{chain[i - 1]}'")
        ds.append(d)
    last = _single(net.in_links(chain[k]), f"in-link of '{chain[k]}'")
    x2 = last.tail
    bs, a = [], None
    for i, r in enumerate(chain):
        internal = {ds[i].id} if i < k else set()
        ins = [e for e in net.in_links(r) if e.id not in internal]
        b = _single([e for e in ins if e.tail == x2], f"link from '{x2}' to '{r}'")
        bs.append(b)
        rest = [e for e in ins if e.id != b.id]
        if i == 0:
            a = _single(rest, f"second source link into '{r}'")
        elif rest:
            raise PatternMismatch(f"relay '{r}' has extra in-links")
    nodes = set(chain)
    if a.tail in nodes | {x2} or c.head in nodes | {x2, a.tail}:
        raise PatternMismatch("component nodes overlap")
    _positive(a, c, *bs, *ds)
    return ChainPattern(a.tail, x2, c.head, tuple(chain), a, tuple(bs), tuple(ds), c)


def match_multi_source(net: Network, r1: str, r2: str) -> MultiSourcePattern:
    for v in (r1, r2):
        _relay(net, v)
    if r1 == r2:
        raise PatternMismatch("the two relays must differ")
    d = _single(net.out_links(r2), f"out-link of '{r2}'")
    if d.head != r1:
        raise PatternMismatch(f"'{r2}' does not feed '{r1}'")
    c = _single(net.out_links(r1), f"out-link of '{r1}'")
    b_prime_by_tail: Dict[str, Link] = {}
    for e in net.in_links(r2):
        if e.tail in b_prime_by_tail:
            raise PatternMismatch(f"parallel links from '{e.tail}' into '{r2}'")
        b_prime_by_tail[e.tail] = e
    sources = tuple(sorted(b_prime_by_tail))
    if not sources:
        raise PatternMismatch(f"'{r2}' has no in-links")
    ins = [e for e in net.in_links(r1) if e.id != d.id]
    bs = []
    for x in sources:
        bs.append(_single([e for e in ins if e.tail == x], f"link from '{x}' to '{r1}'"))
    used = {e.id for e in bs}
    a = _single([e for e in ins if e.id not in used], f"link from the extra source into '{r1}'")
    if a.tail in sources or {a.tail, c.head} & {r1, r2} or c.head in sources or c.head == a.tail:
        raise PatternMismatch("component nodes overlap")
    b_primes = tuple(b_prime_by_tail[x] for x in sources)
    _positive(a, c, d, *bs, *b_primes)
    return MultiSourcePattern(a.tail, sources, r1, r2, c.head, a, tuple(bs), b_primes, d, c)


MATCHERS: Dict[str, Callable[..., Pattern]] = {
    ParallelYPattern.kind: match_parallel_y,
    TwoRelayPattern.kind: match_two_relay,
    ChainPattern.kind: match_chain,
    MultiSourcePattern.kind: match_multi_source,
}


def match(net: Network, kind: str, *relays: str) -> Pattern:
    """Match the pattern `kind` on the given relay ids."""
    try:
        matcher = MATCHERS[kind]
    except KeyError:
        raise PatternMismatch(f"unknown pattern '{kind}'; expected one of {sorted(MATCHERS)}")
    return matcher(net, *relays)


def _chain_from(net: Network, r0: str) -> List[str]:
    chain = [r0]
    while True:
        feeders = [
            e.tail for e in net.in_links(chain[-1])
            if net.node(e.tail).role == Role.RELAY and e.tail not in chain
            and len(net.out_links(e.tail)) == 1
        ]
        if len(feeders) != 1:
            return chain
        chain.append(feeders[0])


def find_all(net: Network, kinds: Optional[List[str]] = None) -> List[Pattern]:
    """Every match of the fixed patterns, ordered by (pattern kind, relay ids)."""
    kinds = sorted(kinds or MATCHERS)
    relays = sorted(net.relays)
    found: List[Pattern] = []
    for kind in kinds:
        if kind == ParallelYPattern.kind:
            candidates = itertools.combinations(relays, 2)
        elif kind == ChainPattern.kind:
            candidates = (tuple(_chain_from(net, r)) for r in relays)
            candidates = (c for c in candidates if len(c) >= 3)
        else:
            candidates = itertools.permutations(relays, 2)
        for ids in candidates:
            try:
                found.append(match(net, kind, *ids))
            except PatternMismatch:
                continue
    logger.debug(f"patterns.find_all: {[(p.kind, p.relays) for p in found]}")
    return sorted(found, key=lambda p: (p.kind, p.relays))
