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
"""Deterministic broadcast channels and the epsilon-removal verifier.

Removing a link of capacity epsilon from a super-source or multicast network
shrinks its capacity region by at most epsilon per message. `theorem1_verify`
replays that argument on an explicit zero-error code:

1. bin the message vectors by the symbol the code sends on the link,
2. keep the largest bin M0 (pigeonhole),
3. view the network without the link, restricted to M0, as a deterministic
   broadcast channel from M0 to one decoder per message,
4. check that the shifted rate point n(R - epsilon) lies in that channel's
   region, inequality by inequality.

Entropies are floats compared with the ``ENTROPY_TOLERANCE`` option; every
other quantity is exact.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from netbound import conf
from netbound.exceptions import EmptySupport, FunctionDemandPresent, InvalidCode, NotApplicable
from netbound.netcore import Network, alphabet_size, split_sinks
from netbound.oracles import CodeAssignment, check_code, max_flow_min_cut, simulate

logger = logging.getLogger(__name__)

Symbol = Hashable
MessageVector = Tuple[int, ...]


#
# Channels and distributions
#

@dataclass(frozen=True)
class DBChannel:
    """A broadcast channel whose k outputs are deterministic functions of the input.

    ``outputs[i][j]`` is the value of output i on ``input_alphabet[j]``.
    """

    input_alphabet: Tuple[Symbol, ...]
    outputs: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "outputs", tuple(tuple(int(y) for y in f) for f in self.outputs))
        if len(set(self.input_alphabet)) != len(self.input_alphabet):
            raise ValueError("input alphabet has repeated symbols")
        for i, f in enumerate(self.outputs):
            if len(f) != len(self.input_alphabet):
                raise ValueError(f"output {i} is defined on {len(f)} of {len(self.input_alphabet)} inputs")

    @classmethod
    def from_functions(cls, alphabet: Iterable[Symbol], *functions: Callable[[Symbol], int]) -> "DBChannel":
        alphabet = tuple(alphabet)
        return cls(alphabet, tuple(tuple(f(x) for x in alphabet) for f in functions))

    @property
    def k(self) -> int:
        return len(self.outputs)

    def apply(self, x: Symbol) -> Tuple[int, ...]:
        j = self.input_alphabet.index(x)
        return tuple(f[j] for f in self.outputs)


@dataclass(frozen=True)
class Distribution:
    """A probability mass function over a finite support of symbols or tuples."""

    support: Tuple[Symbol, ...]
    probabilities: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if len(self.support) != len(self.probabilities):
            raise ValueError("support and probabilities differ in length")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("negative probability mass")
        if self.support and abs(math.fsum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(self.probabilities)}, not 1")

    @classmethod
    def uniform(cls, support: Iterable[Symbol]) -> "Distribution":
        support = tuple(support)
        return cls(support, (1.0 / len(support),) * len(support) if support else ())

    def as_array(self) -> np.ndarray:
        rows = [s if isinstance(s, tuple) else (s,) for s in self.support]
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), -1)


def entropy(dist: Distribution, projection: Optional[Sequence[int]] = None) -> float:
    """Shannon entropy in bits of the marginal of `dist` on the coordinates `projection`.

    Support symbols are integers or tuples of integers; a bare integer is a
    one-coordinate tuple. ``projection=None`` keeps every coordinate.

    :raises EmptySupport: for a distribution without support
    """
    if not dist.support:
        raise EmptySupport("entropy of a distribution with empty support")
    points = dist.as_array()
    if projection is not None:
        columns = list(projection)
        if any(c < 0 or c >= points.shape[1] for c in columns):
            raise IndexError(f"projection {columns} outside {points.shape[1]} coordinates")
        points = points[:, columns]
    weights = np.asarray(dist.probabilities, dtype=np.float64)
    if points.shape[1] == 0:
        return 0.0
    _, inverse = np.unique(points, axis=0, return_inverse=True)
    marginal = np.bincount(inverse.reshape(-1), weights=weights)
    marginal = marginal[marginal > 0]
    return float(max(0.0, -np.sum(marginal * np.log2(marginal))))


def output_distribution(ch: DBChannel, p: Distribution) -> Distribution:
    """The distribution of the joint output tuple when the input follows `p`."""
    mass: Dict[Tuple[int, ...], float] = {}
    for x, px in zip(p.support, p.probabilities):
        y = ch.apply(x)
        mass[y] = mass.get(y, 0.0) + px
    support = sorted(mass)
    return Distribution(tuple(support), tuple(mass[y] for y in support))


@dataclass(frozen=True)
class RegionRow:
    subset: Tuple[int, ...]
    rate_sum: float
    entropy: float

    @property
    def slack(self) -> float:
        return self.entropy - self.rate_sum


@dataclass(frozen=True)
class RegionCheck:
    passed: bool
    violated: Optional[Tuple[int, ...]]
    rows: Tuple[RegionRow, ...]


def _subsets(k: int) -> Iterable[Tuple[int, ...]]:
    for size in range(1, k + 1):
        yield from itertools.combinations(range(k), size)


def dbc_region_check(ch: DBChannel, p: Distribution, rates: Sequence, tol: Optional[float] = None) -> RegionCheck:
    """Test sum(rates[i] for i in A) <= H(Y_A) + tol for every nonempty output subset A.

    Subsets are 0-based output indices, visited by size and then
    lexicographically; `violated` is the first failing one.
    """
    tol = conf.get_option("ENTROPY_TOLERANCE") if tol is None else tol
    rates = [float(r) for r in rates]
    if len(rates) != ch.k:
        raise ValueError(f"{len(rates)} rates for a channel with {ch.k} outputs")
    if any(r < 0 for r in rates):
        raise ValueError("rates must be non-negative")
    joint_out = output_distribution(ch, p)
    rows, violated = [], None
    for subset in _subsets(ch.k):
        row = RegionRow(subset, math.fsum(rates[i] for i in subset), entropy(joint_out, subset))
        rows.append(row)
        if violated is None and row.slack < -tol:
            violated = subset
    return RegionCheck(violated is None, violated, tuple(rows))


#
# Binning
#

class NetworkClass(str, Enum):
    MULTICAST = "multicast"
    SUPER_SOURCE = "superSource"
    GENERAL = "general"


@dataclass(frozen=True)
class BinPartition:
    bins: Dict[int, FrozenSet[MessageVector]]
    source_link: str
    blocklength: int
    alphabet: int = 0

    @property
    def total(self) -> int:
        return sum(len(b) for b in self.bins.values())

    def sizes(self) -> Dict[int, int]:
        return {s: len(b) for s, b in sorted(self.bins.items())}


@dataclass(frozen=True)
class EpsilonRemoval:
    link: str
    epsilon: Fraction
    network_class: NetworkClass

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"removed link '{self.link}' has capacity {self.epsilon}")


def bin_by_link(net: Network, code: CodeAssignment, e: str) -> BinPartition:
    """Group every message vector by the symbol `code` sends on link `e`.

    :raises InvalidCode: when the code does not fit the network or `e` is not a link
    """
    if not net.has_link(e):
        raise InvalidCode(f"no link '{e}' in the network")
    vectors, symbols = simulate(net, code)
    grouped: Dict[int, List[MessageVector]] = {}
    for row, s in zip(vectors.tolist(), symbols[e].tolist()):
        grouped.setdefault(int(s), []).append(tuple(row))
    bins = {s: frozenset(rows) for s, rows in sorted(grouped.items())}
    assert sum(len(b) for b in bins.values()) == len(vectors), "a message vector fell in two bins"
    alphabet = alphabet_size(net.link(e).capacity, code.blocklength)
    assert len(bins) <= alphabet, f"{len(bins)} bins on a link with {alphabet} symbols"
    return BinPartition(bins, e, code.blocklength, alphabet)


def largest_bin(b: BinPartition, rates=None, epsilon=None) -> FrozenSet[MessageVector]:
    """Return a largest bin (ties broken by the smallest link symbol).

    The pigeonhole guarantee |M0| * floor(2**(n*epsilon)) >= |space| is
    asserted. `rates`, a `RateVector` or a mapping of message rates, fixes
    the expected size of the message space when given.
    """
    if not b.bins:
        return frozenset()
    symbol = max(b.bins, key=lambda s: (len(b.bins[s]), -s))
    m0 = b.bins[symbol]
    slots = alphabet_size(epsilon, b.blocklength) if epsilon is not None else b.alphabet
    space = b.total
    if rates is not None:
        space = math.prod(alphabet_size(r, b.blocklength) for _, r in dict(rates).items())
        assert space == b.total, f"bins cover {b.total} vectors, the rates give {space}"
    assert len(m0) * max(slots, 1) >= space, f"largest bin {len(m0)} breaks the pigeonhole bound {space}/{slots}"
    return m0


def classify(net: Network) -> NetworkClass:
    holders = {m.source for m in net.messages}
    if net.messages and len(holders) == 1:
        return NetworkClass.SUPER_SOURCE
    everything = frozenset(net.message_ids)
    if (net.messages and net.sinks and not net.has_function_demands
            and all(net.wanted(t) == everything for t in net.sinks)):
        return NetworkClass.MULTICAST
    return NetworkClass.GENERAL


#
# Epsilon removal
#

@dataclass(frozen=True)
class InequalityRow:
    """One region inequality for a set of messages, with the bounds derived for it."""

    messages: Tuple[str, ...]
    shifted_sum: float
    entropy: float
    chain_bound: float
    subadditive: bool

    @property
    def slack(self) -> float:
        return self.entropy - self.shifted_sum


@dataclass(frozen=True)
class Theorem1Report:
    removal: EpsilonRemoval
    bin_sizes: Dict[int, int]
    m0_symbol: int
    m0_size: int
    space: int
    decoders: Dict[str, str]
    shifted: Dict[str, float]
    rows: Tuple[InequalityRow, ...]
    m0_zero_error: bool
    tolerance: float = 0.0

    @property
    def region_passed(self) -> bool:
        return all(r.slack >= -self.tolerance for r in self.rows)

    @property
    def passed(self) -> bool:
        return (self.m0_zero_error and self.region_passed
                and all(r.subadditive and r.entropy >= r.chain_bound - self.tolerance for r in self.rows))

    def describe(self) -> str:
        lines = [f"removed '{self.removal.link}' (epsilon {self.removal.epsilon}, {self.removal.network_class.value})",
                 f"bins {self.bin_sizes}; M0 = bin {self.m0_symbol} with {self.m0_size} of {self.space} vectors",
                 f"decoders {self.decoders}; shifted rates {self.shifted}"]
        for r in self.rows:
            lines.append(f"  {{{', '.join(r.messages)}}}: sum r = {r.shifted_sum:.6g} <= H = {r.entropy:.6g} "
                         f"(slack {r.slack:.6g}, chain bound {r.chain_bound:.6g})")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _decoder_sinks(net: Network) -> Dict[str, Tuple[str, str]]:
    """Pick one single-message sink per message: message -> (split sink id, original sink)."""
    try:
        split = split_sinks(net)
    except FunctionDemandPresent as e:
        raise NotApplicable(f"sink '{e.sink}' decodes a function, not a message") from e
    order = {m: i for i, m in enumerate(net.message_ids)}
    split_ids = iter(split.sinks)
    pairs = []
    for t in net.sinks:
        wanted = sorted(net.wanted(t), key=order.get)
        if len(wanted) > 1:
            pairs.extend((next(split_ids), t, m) for m in wanted)
        else:
            sid = next(split_ids)
            pairs.extend((sid, t, m) for m in wanted)
    chosen: Dict[str, Tuple[str, str]] = {}
    for m in net.message_ids:
        for sid, t, wanted in pairs:
            if wanted == m:
                chosen[m] = (sid, t)
                break
        else:
            raise NotApplicable(f"no sink decodes message '{m}'")
    return chosen


def _received(net: Network, symbols: Dict[str, np.ndarray], t: str) -> List[Tuple[int, ...]]:
    columns = [symbols[e.id] for e in net.in_links(t)]
    if not columns:
        return [()] * len(next(iter(symbols.values()), []))
    return [tuple(int(c) for c in row) for row in np.stack(columns, axis=1)]


def theorem1_verify(net: Network, code: CodeAssignment, e: str, tol: Optional[float] = None) -> Theorem1Report:
    """Check the epsilon-removal argument on `code` with link `e` removed.

    :raises NotApplicable: for a network that is neither super-source nor multicast
    :raises InvalidCode: when `code` is not zero-error on `net`
    """
    header = "dbc.theorem1_verify"
    tol = conf.get_option("ENTROPY_TOLERANCE") if tol is None else tol
    cls = classify(net)
    if cls == NetworkClass.GENERAL:
        raise NotApplicable("epsilon removal is only certified for super-source and multicast networks")
    if not net.has_link(e):
        raise InvalidCode(f"no link '{e}' in the network")
    unmet = check_code(net, code)
    if unmet:
        raise InvalidCode(f"code misses the demands at {[d.sink for d in unmet]}")
    removal = EpsilonRemoval(e, net.link(e).capacity, cls)
    n = code.blocklength
    messages = list(net.message_ids)
    alphabets = [code.message_alphabets[m] for m in messages]

    bins = bin_by_link(net, code, e)
    m0 = largest_bin(bins)
    m0_symbol = max(bins.bins, key=lambda s: (len(bins.bins[s]), -s))
    logger.info(f"{header}: link '{e}' splits {bins.total} vectors into {bins.sizes()}, M0 = bin {m0_symbol}")

    # the network without e: e's head reads the M0 symbol as a constant
    vectors, full = simulate(net, code)
    fixed = dict(code.link_tables)
    fixed[e] = (m0_symbol,) * len(code.link_tables[e])
    _, cut = simulate(net, CodeAssignment(n, code.message_alphabets, fixed, code.link_inputs, code.link_alphabets))

    m0_rows = sorted(int(i) for i in np.ravel_multi_index(np.asarray(sorted(m0)).T, alphabets))
    decoders = _decoder_sinks(net)
    outputs: List[List[int]] = []
    zero_error = True
    for col, m in enumerate(messages):
        _, t = decoders[m]
        table = dict(zip(_received(net, full, t), vectors[:, col].tolist()))
        received = _received(net, cut, t)
        decoded = [table.get(received[i], -1) for i in m0_rows]
        if decoded != [int(vectors[i, col]) for i in m0_rows]:
            zero_error = False
        outputs.append(decoded)

    inputs = tuple(tuple(int(v) for v in vectors[i]) for i in m0_rows)
    channel = DBChannel(inputs, tuple(tuple(o) for o in outputs))
    uniform = Distribution.uniform(inputs)
    joint_out = output_distribution(channel, uniform)

    n_rates = []
    for m, size in zip(messages, alphabets):
        rate = net.message(m).rate
        n_rates.append(float(rate * n) if rate is not None else math.log2(size))
    n_eps = float(removal.epsilon * n)
    shifted = [max(0.0, r - n_eps) for r in n_rates]
    region = dbc_region_check(channel, uniform, shifted, tol)

    h_all = entropy(joint_out)
    log_m0 = math.log2(len(m0))
    rows = []
    for region_row in region.rows:
        subset = region_row.subset
        rest = [i for i in range(len(messages)) if i not in subset]
        chain = log_m0 - math.fsum(math.log2(alphabets[i]) for i in rest)
        h_rest = entropy(joint_out, rest) if rest else 0.0
        rows.append(InequalityRow(
            messages=tuple(messages[i] for i in subset),
            shifted_sum=region_row.rate_sum,
            entropy=region_row.entropy,
            chain_bound=chain,
            subadditive=h_all <= region_row.entropy + h_rest + tol,
        ))
    report = Theorem1Report(
        removal=removal,
        bin_sizes=bins.sizes(),
        m0_symbol=m0_symbol,
        m0_size=len(m0),
        space=bins.total,
        decoders={m: sid for m, (sid, _) in decoders.items()},
        shifted=dict(zip(messages, shifted)),
        rows=tuple(rows),
        m0_zero_error=zero_error,
        tolerance=tol,
    )
    if not report.passed:
        logger.warning(f"{header}: verification failed for link '{e}'")
    return report


@dataclass(frozen=True)
class CutDrop:
    sink: str
    sources: Tuple[str, ...]
    before: Fraction
    after: Fraction

    @property
    def drop(self) -> Fraction:
        return self.before - self.after


@dataclass(frozen=True)
class MulticastReport:
    link: str
    epsilon: Fraction
    rows: Tuple[CutDrop, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(r.drop <= self.epsilon for r in self.rows)


def multicast_epsilon_check(net: Network, link: str) -> MulticastReport:
    """Compare every source-set-to-sink min cut with and without `link`.

    For multicast demands the cut values fix the capacity region, so each cut
    dropping by at most the link capacity bounds the loss.

    :raises NotApplicable: unless every sink wants every message
    """
    everything = frozenset(net.message_ids)
    if net.has_function_demands or not net.messages or any(net.wanted(t) != everything for t in net.sinks):
        raise NotApplicable("cut values determine the region only for multicast demands")
    eps = net.link(link).capacity
    reduced = net.without_links([link])
    holders = sorted({m.source for m in net.messages}, key=net.node_ids.index)
    rows = []
    for t in net.sinks:
        for size in range(1, len(holders) + 1):
            for group in itertools.combinations(holders, size):
                before = max_flow_min_cut(net, group, [t]).value
                after = max_flow_min_cut(reduced, group, [t]).value
                rows.append(CutDrop(t, group, before, after))
    report = MulticastReport(link, eps, tuple(rows))
    logger.debug(f"dbc.multicast_epsilon_check: '{link}' worst drop "
                 f"{max((r.drop for r in rows), default=Fraction(0))} against epsilon {eps}")
    return report
