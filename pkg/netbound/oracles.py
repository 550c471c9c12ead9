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
"""Ground-truth checks for small networks.

* `max_flow_min_cut`: exact max flow through `netbound.ratlp`, with a
  minimum cut read off the residual network.
* `cutset_check`: the cut-set outer bound on a rate vector.
* `routing_check`: the multi-commodity routing inner bound.
* `exhaustive_search`: enumerate every blocklength-n zero-error code, link
  table by link table, and return the lexicographically first one meeting
  the demands.
* `verify_direction`: compare two networks on a list of search targets.
"""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from netbound import conf
from netbound.bounds import BoundDirection
from netbound.exceptions import (
    AlphabetMismatch, BudgetExceeded, FunctionDemandPresent, InvalidCode, OverlappingSets,
)
from netbound.netcore import Demand, Network, RateVector, alphabet_size, link_order
from netbound.ratlp import ProgramBuilder, Relation

logger = logging.getLogger(__name__)


#
# Max flow / min cut
#

@dataclass(frozen=True)
class CutResult:
    value: Fraction
    source_side: frozenset
    forward_links: Tuple[str, ...]
    backward_links: Tuple[str, ...]
    flow: Dict[str, Fraction] = field(default_factory=dict, compare=False)


def max_flow_min_cut(net: Network, from_nodes: Iterable[str], to_nodes: Iterable[str]) -> CutResult:
    """Maximum flow from one node set to another, and a minimum cut.

    The flow value is asserted equal to the capacity of the forward links of
    the returned cut. Of all minimum cuts the one with the smallest sink side
    is returned.

    :raises OverlappingSets: when the two node sets share a node
    """
    header = "oracles.max_flow_min_cut"
    sources = set(from_nodes)
    targets = set(to_nodes)
    common = sources & targets
    if common:
        raise OverlappingSets(common)

    lp = ProgramBuilder()
    f = {e.id: lp.variable(f"f[{e.id}]", upper=e.capacity) for e in net.links}
    for v in net.node_ids:
        if v in sources or v in targets:
            continue
        terms: Dict[str, int] = {}
        for e in net.in_links(v):
            terms[f[e.id]] = terms.get(f[e.id], 0) + 1
        for e in net.out_links(v):
            terms[f[e.id]] = terms.get(f[e.id], 0) - 1
        if terms:
            lp.constrain(terms, Relation.EQ, 0)
    objective: Dict[str, int] = {}
    for e in net.links:
        if e.tail in sources and e.head not in sources:
            objective[f[e.id]] = objective.get(f[e.id], 0) + 1
        if e.head in sources and e.tail not in sources:
            objective[f[e.id]] = objective.get(f[e.id], 0) - 1
    lp.maximize(objective)
    result, values = lp.solve()
    flow = {e.id: values.get(f[e.id], Fraction(0)) for e in net.links}

    residual = nx.DiGraph()
    residual.add_nodes_from(net.node_ids)
    residual.add_nodes_from(sources | targets)
    for e in net.links:
        if flow[e.id] < e.capacity:
            residual.add_edge(e.tail, e.head)
        if flow[e.id] > 0:
            residual.add_edge(e.head, e.tail)
    # the min cut closest to the targets: everything that cannot reach them
    far = set(targets)
    for t in targets:
        far |= nx.ancestors(residual, t)
    assert not far & sources, "augmenting path left after an optimal flow"
    side = set(residual.nodes) - far

    forward = tuple(e.id for e in net.links if e.tail in side and e.head not in side)
    backward = tuple(e.id for e in net.links if e.head in side and e.tail not in side)
    value = result.value if result.optimal else Fraction(0)
    cut = sum((net.link(i).capacity for i in forward), Fraction(0))
    assert value == cut, f"flow value {value} differs from cut capacity {cut}"
    logger.debug(f"{header}: {sorted(sources)} -> {sorted(targets)} value {value}, forward {forward}")
    return CutResult(value, frozenset(side), forward, backward, flow)


#
# Cut-set and routing bounds
#

@dataclass(frozen=True)
class CutsetReport:
    passed: bool
    sink: Optional[str] = None
    messages: Tuple[str, ...] = ()
    rate_sum: Optional[Fraction] = None
    cut_value: Optional[Fraction] = None

    def describe(self) -> str:
        if self.passed:
            return "cut-set bound: pass"
        return (f"cut-set bound: fail at sink {self.sink}, messages {list(self.messages)}: "
                f"rate sum {self.rate_sum} > min cut {self.cut_value}")


def _rates(net: Network, rates) -> RateVector:
    if isinstance(rates, RateVector):
        return rates
    return RateVector.from_network(net, rates)


def _message_demands_only(net: Network) -> None:
    for d in net.demands:
        if d.is_function:
            raise FunctionDemandPresent(d.sink)


def cutset_check(net: Network, rates=None) -> CutsetReport:
    """Check every cut-set inequality of the demands of `net` at `rates`.

    For each sink t and each nonempty subset S of the messages t wants, the
    sum of their rates must not exceed the min cut from their sources to t.
    Returns the first violated inequality.
    """
    _message_demands_only(net)
    r = _rates(net, rates)
    order = net.message_ids
    for t in net.sinks:
        wanted = [m for m in order if m in net.wanted(t)]
        for size in range(1, len(wanted) + 1):
            for subset in itertools.combinations(wanted, size):
                total = sum((r[m] for m in subset), Fraction(0))
                if total == 0:
                    continue
                cut = max_flow_min_cut(net, {net.message(m).source for m in subset}, {t})
                if total > cut.value:
                    report = CutsetReport(False, t, subset, total, cut.value)
                    logger.info(f"oracles.cutset_check: {report.describe()}")
                    return report
    return CutsetReport(True)


@dataclass(frozen=True)
class RoutingReport:
    feasible: bool
    flows: Dict[Tuple[str, str], Dict[str, Fraction]] = field(default_factory=dict, compare=False)


def routing_check(net: Network, rates=None) -> RoutingReport:
    """Fractional routing with one commodity per (message, demanding sink) pair.

    Feasibility means the rate vector is achievable without coding.
    """
    _message_demands_only(net)
    r = _rates(net, rates)
    commodities = [
        (m, t) for t in net.sinks for m in net.message_ids
        if m in net.wanted(t) and r[m] > 0
    ]
    lp = ProgramBuilder()
    f = {(k, e.id): lp.variable(f"f[{k[0]},{k[1]},{e.id}]") for k in commodities for e in net.links}
    for e in net.links:
        lp.constrain({f[k, e.id]: 1 for k in commodities}, Relation.LE, e.capacity)
    for k in commodities:
        m, t = k
        src = net.message(m).source
        for v in net.node_ids:
            terms: Dict[str, int] = {}
            for e in net.in_links(v):
                terms[f[k, e.id]] = terms.get(f[k, e.id], 0) + 1
            for e in net.out_links(v):
                terms[f[k, e.id]] = terms.get(f[k, e.id], 0) - 1
            demand = r[m] if v == t else -r[m] if v == src else 0
            if terms or demand:
                lp.constrain(terms, Relation.EQ, demand)
    lp.maximize({})
    result, values = lp.solve()
    if not result.optimal:
        logger.info(f"oracles.routing_check: infeasible at {r.as_dict()}")
        return RoutingReport(False)
    flows = {k: {e.id: values[f[k, e.id]] for e in net.links} for k in commodities}
    return RoutingReport(True, flows)


#
# Codes
#

@dataclass(frozen=True)
class CodeAssignment:
    """A blocklength-n deterministic code: one lookup table per link.

    ``link_inputs[e]`` names the table's inputs (messages of the tail node,
    then symbols of the tail's in-links); the table is indexed row-major over
    their alphabets.
    """

    blocklength: int
    message_alphabets: Dict[str, int]
    link_tables: Dict[str, Tuple[int, ...]]
    link_inputs: Dict[str, Tuple[str, ...]]
    link_alphabets: Dict[str, int]


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    count: int
    code: Optional[CodeAssignment] = None
    space: int = 0


def message_vectors(alphabets: Sequence[int]) -> np.ndarray:
    """All message vectors, row-major, as an array of shape (prod, len)."""
    if not alphabets:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(tuple(alphabets)).reshape(len(alphabets), -1)
    return grids.T.astype(np.int64)


def joint(columns: Sequence[np.ndarray], length: int) -> np.ndarray:
    """Label each row by the tuple of its values in `columns`."""
    code = np.zeros(length, dtype=np.int64)
    for col in columns:
        _, code = np.unique(code * (int(col.max()) + 1) + col, return_inverse=True)
        code = code.reshape(-1)
    return code


def determined(key: np.ndarray, value: np.ndarray) -> bool:
    """True when `value` is a function of `key`."""
    pairs = key * (int(value.max()) + 1) + value
    return len(np.unique(pairs)) == len(np.unique(key))


def _demand_values(demand: Demand, vectors: np.ndarray, column: Mapping[str, int],
                   alphabets: Mapping[str, int]) -> np.ndarray:
    if demand.is_function:
        fn = demand.kind
        for m, size in zip(fn.inputs, fn.input_alphabets):
            if alphabets[m] != size:
                raise AlphabetMismatch(
                    f"function demand at '{demand.sink}' expects alphabet {size} for '{m}', "
                    f"the rate gives {alphabets[m]}"
                )
        rows = np.zeros(len(vectors), dtype=np.int64)
        for m, size in zip(fn.inputs, fn.input_alphabets):
            rows = rows * size + vectors[:, column[m]]
        return np.asarray(fn.table, dtype=np.int64)[rows]
    wanted = [m for m in column if m in demand.kind.wanted]
    return joint([vectors[:, column[m]] for m in wanted], len(vectors))


def simulate(net: Network, code: CodeAssignment) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """Run `code` on every message vector.

    Returns the message vectors (row-major over the code's message alphabets,
    in network message order) and, for each link, the symbol it carries.

    :raises InvalidCode: when the code does not fit the network
    """
    order = list(net.message_ids)
    missing = [m for m in order if m not in code.message_alphabets]
    if missing:
        raise InvalidCode(f"code gives no alphabet for messages {missing}")
    vectors = message_vectors([code.message_alphabets[m] for m in order])
    column = {m: i for i, m in enumerate(order)}
    symbols: Dict[str, np.ndarray] = {}
    for e in link_order(net):
        if e.id not in code.link_tables:
            raise InvalidCode(f"no table for link '{e.id}'")
        inputs = code.link_inputs.get(e.id, ())
        expected = {m.id for m in net.messages_at(e.tail)} | {i.id for i in net.in_links(e.tail)}
        if set(inputs) != expected or len(inputs) != len(expected):
            raise InvalidCode(f"link '{e.id}' reads {list(inputs)}, its tail offers {sorted(expected)}")
        sizes = [code.message_alphabets[i] if i in column else code.link_alphabets[i] for i in inputs]
        table = np.asarray(code.link_tables[e.id], dtype=np.int64)
        if len(table) != math.prod(sizes):
            raise InvalidCode(f"table of '{e.id}' has {len(table)} rows, expected {math.prod(sizes)}")
        size = code.link_alphabets.get(e.id, 0)
        if size > alphabet_size(e.capacity, code.blocklength):
            raise InvalidCode(f"link '{e.id}' uses {size} symbols, capacity allows "
                              f"{alphabet_size(e.capacity, code.blocklength)}")
        if len(table) and (table.min() < 0 or table.max() >= size):
            raise InvalidCode(f"table of '{e.id}' leaves its alphabet of size {size}")
        if e.copy_of is not None and tuple(code.link_tables[e.id]) != tuple(code.link_tables.get(e.copy_of, ())):
            raise InvalidCode(f"link '{e.id}' copies '{e.copy_of}' but has a different table")
        rows = np.zeros(len(vectors), dtype=np.int64)
        for i, s in zip(inputs, sizes):
            rows = rows * s + (vectors[:, column[i]] if i in column else symbols[i])
        symbols[e.id] = table[rows]
    return vectors, symbols


def check_code(net: Network, code: CodeAssignment, demands: Optional[Sequence[Demand]] = None) -> List[Demand]:
    """Return the demands `code` does not meet with zero error."""
    vectors, symbols = simulate(net, code)
    column = {m: i for i, m in enumerate(net.message_ids)}
    unmet = []
    for d in (net.demands if demands is None else demands):
        received = joint([symbols[e.id] for e in net.in_links(d.sink)], len(vectors))
        if not determined(received, _demand_values(d, vectors, column, code.message_alphabets)):
            unmet.append(d)
    return unmet


@dataclass
class _SearchProblem:
    """Everything a search worker needs, in picklable form."""

    link_ids: List[str]
    link_inputs: List[List[Tuple[bool, int]]]   # (is_message, column or link position)
    input_sizes: List[List[int]]
    link_alphabets: List[int]
    vectors: np.ndarray
    demand_values: List[np.ndarray]
    # per depth, per demand: (link positions, message columns) making up what the sink can still learn
    info: List[List[Tuple[List[int], List[int]]]]
    tables_per_link: List[int]
    # position of the link each copy repeats, None for ordinary links
    copy_source: List[Optional[int]]

    def tables(self, depth: int) -> Iterable[np.ndarray]:
        size, width = self.link_alphabets[depth], math.prod(self.input_sizes[depth])
        for table in itertools.product(range(size), repeat=width):
            yield np.asarray(table, dtype=np.int64)

    def candidates(self, depth: int, chosen: List[np.ndarray]) -> Iterable[np.ndarray]:
        source = self.copy_source[depth]
        return self.tables(depth) if source is None else [chosen[source]]

    def table_at(self, depth: int, index: int) -> np.ndarray:
        size, width = self.link_alphabets[depth], math.prod(self.input_sizes[depth])
        digits = []
        for _ in range(width):
            index, d = divmod(index, size)
            digits.append(d)
        return np.asarray(digits[::-1], dtype=np.int64)

    def below(self, depth: int) -> int:
        return math.prod(self.tables_per_link[depth + 1:])

    def apply(self, depth: int, table: np.ndarray, symbols: List[np.ndarray]) -> np.ndarray:
        rows = np.zeros(len(self.vectors), dtype=np.int64)
        for (is_message, ref), size in zip(self.link_inputs[depth], self.input_sizes[depth]):
            rows = rows * size + (self.vectors[:, ref] if is_message else symbols[ref])
        return table[rows]

    def promising(self, depth: int, symbols: List[np.ndarray]) -> bool:
        length = len(self.vectors)
        for values, (links, messages) in zip(self.demand_values, self.info[depth]):
            key = joint([symbols[p] for p in links] + [self.vectors[:, c] for c in messages], length)
            if not determined(key, values):
                return False
        return True


def _search(problem: _SearchProblem, first: range) -> Tuple[Optional[List[np.ndarray]], int]:
    """Depth-first search with the first link's tables restricted to `first`.

    Returns the first satisfying list of tables (or None) and the number of
    complete assignments covered, pruned subtrees included.
    """
    depth_count = len(problem.link_ids)
    if depth_count == 0:
        return ([] if problem.promising(-1, []) else None), 1
    count = 0
    tables: List[np.ndarray] = []
    symbols: List[np.ndarray] = []

    def descend(depth: int, candidates: Iterable[np.ndarray]):
        nonlocal count
        for table in candidates:
            tables.append(table)
            symbols.append(problem.apply(depth, table, symbols))
            if not problem.promising(depth, symbols):
                count += problem.below(depth)
            elif depth + 1 == depth_count:
                count += 1
                return True
            elif descend(depth + 1, problem.candidates(depth + 1, tables)):
                return True
            tables.pop()
            symbols.pop()
        return False

    start = (problem.table_at(0, i) for i in first)
    if descend(0, start):
        return list(tables), count
    return None, count


def _prepare(net: Network, blocklength: int, demands: Sequence[Demand], rates: RateVector) -> _SearchProblem:
    order = list(net.message_ids)
    column = {m: i for i, m in enumerate(order)}
    alphabets = {m: alphabet_size(rates[m], blocklength) for m in order}
    vectors = message_vectors([alphabets[m] for m in order])
    links = link_order(net)
    position = {e.id: i for i, e in enumerate(links)}

    link_inputs, input_sizes, link_alphabets = [], [], []
    for e in links:
        ins = [(True, column[m.id]) for m in net.messages_at(e.tail)]
        sizes = [alphabets[m.id] for m in net.messages_at(e.tail)]
        for i in sorted(net.in_links(e.tail), key=lambda x: position[x.id]):
            ins.append((False, position[i.id]))
            sizes.append(alphabet_size(i.capacity, blocklength))
        link_inputs.append(ins)
        input_sizes.append(sizes)
        link_alphabets.append(alphabet_size(e.capacity, blocklength))

    ancestors = {d.sink: nx.ancestors(net.graph, d.sink) if net.has_node(d.sink) else set() for d in demands}
    info = []
    for depth in range(-1, len(links)):
        assigned = links[:depth + 1]
        open_nodes = {e.tail for e in links[depth + 1:]}
        row = []
        for d in demands:
            up = ancestors[d.sink] & open_nodes
            ls = [position[e.id] for e in assigned if e.head == d.sink or e.head in up]
            ms = [column[m.id] for m in net.messages if m.source in up]
            row.append((ls, ms))
        info.append(row)

    return _SearchProblem(
        link_ids=[e.id for e in links],
        link_inputs=link_inputs,
        input_sizes=input_sizes,
        link_alphabets=link_alphabets,
        vectors=vectors,
        demand_values=[_demand_values(d, vectors, column, alphabets) for d in demands],
        info=info[1:] + [info[0]],   # index -1 is the empty assignment
        tables_per_link=[1 if e.copy_of in position else k ** math.prod(s)
                         for e, k, s in zip(links, link_alphabets, input_sizes)],
        copy_source=[position.get(e.copy_of) for e in links],
    )


def exhaustive_search(net: Network, blocklength: int = 1, demands: Optional[Sequence[Demand]] = None,
                      rates=None, budget: Optional[int] = None, workers: Optional[int] = None) -> SearchOutcome:
    """Search every blocklength-n code on `net` for one meeting `demands` with zero error.

    Message alphabets are floor(2**(n*R)), link alphabets floor(2**(n*C)).
    Tables are enumerated lexicographically, link by link in topological
    order; a partial assignment is pruned as soon as some sink can no longer
    learn its demand from what is still available upstream of it. The
    reported count includes the assignments of pruned subtrees, so an
    unsuccessful search reports the full size of the space.

    :raises BudgetExceeded: when the space is larger than `budget`
    :raises AlphabetMismatch: when a function demand's input alphabets do not
        match the message alphabets at this rate and blocklength
    """
    header = "oracles.exhaustive_search"
    budget = conf.get_option("SEARCH_BUDGET") if budget is None else budget
    workers = conf.get_option("SEARCH_WORKERS") if workers is None else workers
    demands = list(net.demands if demands is None else demands)
    r = _rates(net, rates)
    problem = _prepare(net, blocklength, demands, r)
    space = math.prod(problem.tables_per_link)
    if space > budget:
        raise BudgetExceeded(space, budget)
    logger.info(f"{header}: n={blocklength}, {len(problem.link_ids)} links, space {space}, workers {workers}")

    first = problem.tables_per_link[0] if problem.link_ids else 1
    if workers > 1 and problem.link_ids and first > 1:
        step = -(-first // workers)
        chunks = [range(i, min(i + step, first)) for i in range(0, first, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_search, [problem] * len(chunks), chunks))
        witness, count = None, 0
        for tables, chunk_count in results:
            count += chunk_count
            if tables is not None:
                witness = tables
                break
    else:
        witness, count = _search(problem, range(first))

    if witness is None:
        logger.info(f"{header}: not found after {count} assignments")
        return SearchOutcome(False, count, None, space)

    order = list(net.message_ids)
    code = CodeAssignment(
        blocklength=blocklength,
        message_alphabets={m: alphabet_size(r[m], blocklength) for m in order},
        link_tables={e: tuple(int(v) for v in t) for e, t in zip(problem.link_ids, witness)},
        link_inputs={
            e: tuple(order[ref] if is_message else problem.link_ids[ref] for is_message, ref in ins)
            for e, ins in zip(problem.link_ids, problem.link_inputs)
        },
        link_alphabets=dict(zip(problem.link_ids, problem.link_alphabets)),
    )
    assert not check_code(net, code, demands), "search returned a code that misses a demand"
    logger.info(f"{header}: found after {count} assignments")
    return SearchOutcome(True, count, code, space)


#
# Direction checks
#

@dataclass(frozen=True)
class SearchTarget:
    blocklength: int
    rates: Dict[str, Fraction]
    demands: Optional[Tuple[Demand, ...]] = None
    label: str = ""


@dataclass(frozen=True)
class DirectionRow:
    target: SearchTarget
    original: bool
    transformed: bool


@dataclass(frozen=True)
class DirectionReport:
    claimed: BoundDirection
    rows: Tuple[DirectionRow, ...]
    violations: Tuple[DirectionRow, ...]

    @property
    def consistent(self) -> bool:
        return not self.violations


def verify_direction(original: Network, transformed: Network, claimed: BoundDirection,
                     corpus: Sequence[SearchTarget], budget: Optional[int] = None) -> DirectionReport:
    """Test a claimed bound direction on a list of search targets.

    Upper claims that everything the original achieves the transformed
    network achieves too, Lower the converse and Equivalent both. A
    consistent report is evidence at the tested blocklengths, not a proof.
    """
    claimed = BoundDirection(claimed)
    rows, violations = [], []
    for target in corpus:
        found = []
        for net in (original, transformed):
            rates = {m: target.rates[m] for m in net.message_ids}
            found.append(exhaustive_search(net, target.blocklength, target.demands, rates, budget).found)
        row = DirectionRow(target, found[0], found[1])
        rows.append(row)
        up_broken = found[0] and not found[1]
        down_broken = found[1] and not found[0]
        if (claimed in (BoundDirection.UPPER, BoundDirection.EQUIVALENT) and up_broken) or \
                (claimed in (BoundDirection.LOWER, BoundDirection.EQUIVALENT) and down_broken):
            logger.warning(f"oracles.verify_direction: {claimed.value} claim broken at {target.label or target}")
            violations.append(row)
    return DirectionReport(claimed, tuple(rows), tuple(violations))
