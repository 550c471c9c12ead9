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
"""Bound directions, gap certificates and transform results.

A rewrite of a network produces a `TransformResult`: the new network, whether
its capacity region contains the original's (Upper), is contained in it
(Lower) or equals it (Equivalent), and a `GapCertificate` bounding how far
apart the two regions can be. Gap factors follow the Delta >= 1 convention:
``R_upper`` is contained in ``factor * R_lower``.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, Optional, Tuple, Union

from netbound.netcore import Network

logger = logging.getLogger(__name__)

# gap bases that certify a uniform capacity scaling; products of these compose
EQUIVALENCE = "equivalence"
UNIFORM_SCALING = "uniform-scaling"
DIFFERENCE_FACTOR = "difference-factor"
COMPOSABLE_BASES = frozenset({EQUIVALENCE, UNIFORM_SCALING, DIFFERENCE_FACTOR})


class BoundDirection(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    EQUIVALENT = "equivalent"

    @classmethod
    def parse(cls, text: str) -> "BoundDirection":
        key = text.strip().lower()
        if key in ("equiv", "eq"):
            key = "equivalent"
        return cls(key)


@dataclass(frozen=True)
class GapCertificate:
    factor: Optional[Fraction]
    basis: str

    def __post_init__(self):
        if self.factor is not None:
            object.__setattr__(self, "factor", Fraction(self.factor))
            if self.factor < 1:
                raise ValueError(f"gap factor must be >= 1, got {self.factor}")

    @classmethod
    def exact(cls) -> "GapCertificate":
        return cls(Fraction(1), EQUIVALENCE)

    @classmethod
    def unknown(cls, basis: str) -> "GapCertificate":
        return cls(None, basis)

    @property
    def known(self) -> bool:
        return self.factor is not None

    @property
    def composable(self) -> bool:
        return self.known and self.basis in COMPOSABLE_BASES

    def describe(self) -> str:
        return f"{self.factor if self.known else 'unknown'} ({self.basis})"


@dataclass(frozen=True)
class TraceRecord:
    operation: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    matched: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TransformResult:
    network: Network
    direction: BoundDirection
    gap: GapCertificate
    trace: TraceRecord


@dataclass(frozen=True)
class BoundingPair:
    """A lower and an upper bounding network for the same original.

    `equivalent` is set when both coincide in capacity (gap 1).
    """

    lower: TransformResult
    upper: TransformResult
    gap: GapCertificate
    operation: str = ""

    @property
    def equivalent(self) -> bool:
        return self.gap.known and self.gap.factor == 1


Step = Union[TransformResult, BoundingPair]


def compose_gap(steps: Iterable[Step]) -> Optional[Fraction]:
    """Multiply the gap factors of a sequence of rewrites.

    Returns None (unknown) as soon as one step's certificate is not a uniform
    scaling certificate; an empty sequence composes to 1.
    """
    total = Fraction(1)
    for step in steps:
        if not step.gap.composable:
            return None
        total *= step.gap.factor
    return total
