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
"""Exceptions raised by netbound.

Every failure of a netbound operation is a subclass of `NetworkBoundError`,
so callers (and the management commands) can catch a single type.
"""


class NetworkBoundError(Exception):
    """Base class for all netbound domain errors"""


#
# Model
#

class CyclicInput(NetworkBoundError):
    def __init__(self, cycle=None):
        self.cycle = list(cycle or [])
        msg = "network contains a directed cycle"
        if self.cycle:
            msg += f": {' -> '.join(self.cycle)}"
        super().__init__(msg)


class NotARelay(NetworkBoundError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"node '{node_id}' is not a relay node")


class FunctionDemandPresent(NetworkBoundError):
    def __init__(self, sink):
        self.sink = sink
        super().__init__(f"sink '{sink}' carries a function demand, which this operation does not support")


class MissingRate(NetworkBoundError):
    def __init__(self, message_id):
        self.message_id = message_id
        super().__init__(f"message '{message_id}' has no rate and none was supplied")


class RateVectorMismatch(NetworkBoundError):
    pass


class NegativeCapacity(NetworkBoundError):
    def __init__(self, link_id, value):
        self.link_id = link_id
        self.value = value
        super().__init__(f"capacity of link '{link_id}' must be non-negative, got {value}")


#
# Transforms
#

class PatternMismatch(NetworkBoundError):
    pass


class WouldCreateCycle(NetworkBoundError):
    def __init__(self, group):
        self.group = sorted(group)
        super().__init__(f"contracting {self.group} would create a directed cycle")


class MixesSourceAndSink(NetworkBoundError):
    def __init__(self, group):
        self.group = sorted(group)
        super().__init__(f"group {self.group} contains both a source and a sink")


class ConditionFails(NetworkBoundError):
    """The sufficient condition of a rewrite does not hold.

    `index` is the first violated chain index for chain merges, None otherwise.
    """

    def __init__(self, msg, index=None, lhs=None, rhs=None):
        self.index = index
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(msg)


class ConditionNotApplicable(NetworkBoundError):
    pass


class NonProportional(NetworkBoundError):
    pass


class NoResidualPath(NetworkBoundError):
    def __init__(self, link_id):
        self.link_id = link_id
        super().__init__(f"no residual path replaces removed link '{link_id}'")


class LpInfeasible(NetworkBoundError):
    pass


class NoSplitFound(NetworkBoundError):
    pass


class TopologyMismatch(NetworkBoundError):
    pass


class ZeroCapacity(NetworkBoundError):
    def __init__(self, link_id):
        self.link_id = link_id
        super().__init__(f"link '{link_id}' has zero capacity; the difference factor needs positive capacities")


class NotDominating(NetworkBoundError):
    def __init__(self, link_id, ratio):
        self.link_id = link_id
        self.ratio = ratio
        super().__init__(f"upper network does not dominate on link '{link_id}' (ratio {ratio})")


#
# Solvers and oracles
#

class DimensionMismatch(NetworkBoundError):
    pass


class OverlappingSets(NetworkBoundError):
    def __init__(self, common):
        self.common = sorted(common)
        super().__init__(f"cut terminal sets overlap on {self.common}")


class BudgetExceeded(NetworkBoundError):
    def __init__(self, count, budget):
        self.count = count
        self.budget = budget
        super().__init__(f"search space has {count} assignments, budget is {budget}")


class AlphabetMismatch(NetworkBoundError):
    pass


class InvalidCode(NetworkBoundError):
    pass


class NotApplicable(NetworkBoundError):
    pass


class EmptySupport(NetworkBoundError):
    pass


#
# Files and pipeline
#

class NetworkSyntaxError(NetworkBoundError):
    def __init__(self, msg, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{msg}{where}")


class SemanticError(NetworkBoundError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"network is not valid: {lines}")


class PipelineError(NetworkBoundError):
    def __init__(self, step, op, cause):
        self.step = step
        self.op = op
        self.cause = cause
        super().__init__(f"step {step} ({op}) failed: {cause}")
