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
"""Text formats: network, demand, rate, code and corpus files, and DOT export.

A network file is JSON::

    {
      "nodes": [{"id": "x1", "role": "source"}, ...],
      "links": [{"id": "r1", "from": "x1", "to": "m", "capacity": "3/2"}, ...],
      "messages": [{"id": "M1", "source": "x1", "rate": "1"}, ...],
      "demands": [{"sink": "y", "messages": ["M1", "M2"]},
                  {"sink": "y", "function": {"inputs": [...], "inputAlphabets": [...],
                                             "outputAlphabet": 2, "table": [...]}}]
    }

Capacities and rates are integers or "p/q" strings; JSON floats are refused.
Unknown keys are rejected.
"""
import json
import logging
import re
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from netbound.exceptions import NetworkSyntaxError, SemanticError
from netbound.netcore import (
    Demand, FunctionDemand, Link, Message, MessageDemand, Network, Node, Role, Violation, validate,
)
from netbound.oracles import CodeAssignment, SearchTarget

logger = logging.getLogger(__name__)

_RATIONAL = re.compile(r"^\s*-?\d+\s*(/\s*\d+\s*)?$")


class _FloatLiteral(str):
    """A JSON number written with a fraction or exponent part."""


def load_json(text: str) -> Any:
    """Parse JSON text, keeping float literals recognisable.

    :raises NetworkSyntaxError: with the line and column of the first error
    """
    try:
        return json.loads(text, parse_float=_FloatLiteral)
    except json.JSONDecodeError as e:
        raise NetworkSyntaxError(e.msg, e.lineno, e.colno) from e


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def rational_text(value: Fraction) -> str:
    return str(Fraction(value))


class _Reader:
    """Collects schema violations while walking a parsed document."""

    def __init__(self):
        self.violations: List[Violation] = []

    def fail(self, kind: str, element: str, detail: str = "") -> None:
        self.violations.append(Violation(kind, element, detail))

    def record(self, doc: Any, where: str, required: Sequence[str], optional: Sequence[str] = ()) -> bool:
        if not isinstance(doc, dict):
            self.fail("BadType", where, "expected an object")
            return False
        unknown = sorted(set(doc) - set(required) - set(optional))
        for key in unknown:
            self.fail("UnknownKey", where, key)
        missing = [k for k in required if k not in doc]
        for key in missing:
            self.fail("MissingKey", where, key)
        return not unknown and not missing

    def items(self, doc: Any, where: str) -> List[Any]:
        if doc is None:
            return []
        if not isinstance(doc, list):
            self.fail("BadType", where, "expected a list")
            return []
        return doc

    def text(self, value: Any, where: str) -> Optional[str]:
        if not isinstance(value, str) or isinstance(value, _FloatLiteral):
            self.fail("BadType", where, f"expected a string, got {value!r}")
            return None
        return value

    def integer(self, value: Any, where: str) -> Optional[int]:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail("BadType", where, f"expected an integer, got {value!r}")
            return None
        return value

    def rational(self, value: Any, where: str) -> Optional[Fraction]:
        if isinstance(value, _FloatLiteral):
            self.fail("BadNumber", where, f"{value} is a float; write an integer or a 'p/q' string")
            return None
        if isinstance(value, bool):
            self.fail("BadNumber", where, f"{value!r} is not a number")
            return None
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str) and _RATIONAL.match(value):
            try:
                return Fraction(value.replace(" ", ""))
            except ZeroDivisionError:
                self.fail("BadNumber", where, f"{value!r} divides by zero")
                return None
        self.fail("BadNumber", where, f"{value!r} is not an integer or 'p/q' string")
        return None

    def done(self) -> None:
        if self.violations:
            raise SemanticError(self.violations)


def _read_demand(r: _Reader, doc: Any, where: str) -> Optional[Demand]:
    if not r.record(doc, where, ("sink",), ("messages", "function")):
        return None
    sink = r.text(doc["sink"], f"{where}.sink")
    if ("messages" in doc) == ("function" in doc):
        r.fail("BadDemand", where, "give exactly one of 'messages' and 'function'")
        return None
    if "messages" in doc:
        wanted = [r.text(m, f"{where}.messages") for m in r.items(doc["messages"], f"{where}.messages")]
        if sink is None or None in wanted:
            return None
        return Demand(sink, MessageDemand(frozenset(wanted)))
    fn = doc["function"]
    fwhere = f"{where}.function"
    if not r.record(fn, fwhere, ("inputs", "inputAlphabets", "outputAlphabet", "table")):
        return None
    inputs = [r.text(m, f"{fwhere}.inputs") for m in r.items(fn["inputs"], f"{fwhere}.inputs")]
    sizes = [r.integer(a, f"{fwhere}.inputAlphabets")
             for a in r.items(fn["inputAlphabets"], f"{fwhere}.inputAlphabets")]
    out = r.integer(fn["outputAlphabet"], f"{fwhere}.outputAlphabet")
    table = [r.integer(v, f"{fwhere}.table") for v in r.items(fn["table"], f"{fwhere}.table")]
    if sink is None or out is None or None in inputs or None in sizes or None in table:
        return None
    return Demand(sink, FunctionDemand(tuple(inputs), tuple(sizes), out, tuple(table)))


def _read_network(r: _Reader, doc: Any) -> Optional[Network]:
    if not r.record(doc, "network", (), ("nodes", "links", "messages", "demands")):
        return None
    nodes, links, messages, demands = [], [], [], []
    for i, item in enumerate(r.items(doc.get("nodes"), "nodes")):
        where = f"nodes[{i}]"
        if r.record(item, where, ("id", "role")):
            node_id = r.text(item["id"], f"{where}.id")
            role = item["role"]
            if role not in {x.value for x in Role}:
                r.fail("BadRole", node_id or where, f"{role!r}")
            elif node_id is not None:
                nodes.append(Node(node_id, Role(role)))
    for i, item in enumerate(r.items(doc.get("links"), "links")):
        where = f"links[{i}]"
        if r.record(item, where, ("id", "from", "to", "capacity"), ("copyOf",)):
            fields = [r.text(item[k], f"{where}.{k}") for k in ("id", "from", "to")]
            capacity = r.rational(item["capacity"], item["id"] if isinstance(item["id"], str) else where)
            copy_of = r.text(item["copyOf"], f"{where}.copyOf") if "copyOf" in item else None
            if None not in fields and capacity is not None and (copy_of is not None or "copyOf" not in item):
                links.append(Link(*fields, capacity, copy_of))
    for i, item in enumerate(r.items(doc.get("messages"), "messages")):
        where = f"messages[{i}]"
        if r.record(item, where, ("id", "source"), ("rate",)):
            message_id, source = r.text(item["id"], f"{where}.id"), r.text(item["source"], f"{where}.source")
            rate = None
            if item.get("rate") is not None:
                rate = r.rational(item["rate"], message_id or where)
                if rate is None:
                    continue
            if message_id is not None and source is not None:
                messages.append(Message(message_id, source, rate))
    for i, item in enumerate(r.items(doc.get("demands"), "demands")):
        demand = _read_demand(r, item, f"demands[{i}]")
        if demand is not None:
            demands.append(demand)
    return Network(nodes=nodes, links=links, messages=messages, demands=demands)


def parse_network(text: str, check: bool = True) -> Network:
    """Parse a network file.

    :raises NetworkSyntaxError: on malformed JSON
    :raises SemanticError: on schema violations, and (with `check`) on
        any violation reported by `netbound.netcore.validate`
    """
    r = _Reader()
    net = _read_network(r, load_json(text))
    r.done()
    if check:
        violations = validate(net)
        if violations:
            raise SemanticError(violations)
    return net


def _demand_doc(d: Demand) -> Dict[str, Any]:
    if d.is_function:
        fn = d.kind
        return {"sink": d.sink, "function": {
            "inputs": list(fn.inputs),
            "inputAlphabets": list(fn.input_alphabets),
            "outputAlphabet": fn.output_alphabet,
            "table": list(fn.table),
        }}
    return {"sink": d.sink, "messages": sorted(d.kind.wanted)}


def _link_doc(e: Link) -> Dict[str, Any]:
    doc = {"id": e.id, "from": e.tail, "to": e.head, "capacity": rational_text(e.capacity)}
    if e.copy_of is not None:
        doc["copyOf"] = e.copy_of
    return doc


def network_doc(net: Network) -> Dict[str, Any]:
    messages = []
    for m in net.messages:
        item = {"id": m.id, "source": m.source}
        if m.rate is not None:
            item["rate"] = rational_text(m.rate)
        messages.append(item)
    return {
        "nodes": [{"id": n.id, "role": n.role.value} for n in net.nodes],
        "links": [_link_doc(e) for e in net.links],
        "messages": messages,
        "demands": [_demand_doc(d) for d in net.demands],
    }


def serialize_network(net: Network) -> str:
    return dump_json(network_doc(net))


def parse_demands(text: str) -> Tuple[Demand, ...]:
    """Parse a JSON list of demands (the ``demands`` schema of a network file)."""
    r = _Reader()
    doc = load_json(text)
    if isinstance(doc, dict) and set(doc) == {"demands"}:
        doc = doc["demands"]
    demands = [_read_demand(r, item, f"demands[{i}]") for i, item in enumerate(r.items(doc, "demands"))]
    r.done()
    return tuple(demands)


def parse_rates(text: str) -> Dict[str, Fraction]:
    """Parse ``M1=1,M2=3/2`` or a JSON object of rates."""
    r = _Reader()
    stripped = text.strip()
    if stripped.startswith(("{", "[")):
        doc = load_json(stripped)
        if not isinstance(doc, dict):
            raise NetworkSyntaxError(f"rates must be a JSON object of id: rate, got a {type(doc).__name__}")
        pairs = list(doc.items())
    else:
        pairs = []
        for part in filter(None, (p.strip() for p in stripped.split(","))):
            key, sep, value = part.partition("=")
            if not sep or not key.strip():
                raise NetworkSyntaxError(f"rate '{part}' is not of the form id=value")
            pairs.append((key.strip(), value.strip()))
    rates = {}
    for key, value in pairs:
        rate = r.rational(value, key)
        if rate is not None:
            rates[key] = rate
    r.done()
    return rates


def parse_code(text: str) -> CodeAssignment:
    """Parse a code file::

        {"blocklength": 1, "messageAlphabets": {"M1": 2},
         "links": {"e": {"inputs": ["M1"], "alphabet": 2, "table": [0, 1]}}}
    """
    r = _Reader()
    doc = load_json(text)
    if not r.record(doc, "code", ("blocklength", "messageAlphabets", "links")):
        r.done()
    n = r.integer(doc["blocklength"], "blocklength")
    alphabets = {}
    if isinstance(doc["messageAlphabets"], dict):
        for m, size in doc["messageAlphabets"].items():
            alphabets[m] = r.integer(size, f"messageAlphabets.{m}")
    else:
        r.fail("BadType", "messageAlphabets", "expected an object")
    tables, inputs, link_alphabets = {}, {}, {}
    links = doc["links"] if isinstance(doc["links"], dict) else {}
    if not isinstance(doc["links"], dict):
        r.fail("BadType", "links", "expected an object")
    for e, item in links.items():
        if not r.record(item, f"links.{e}", ("inputs", "alphabet", "table")):
            continue
        inputs[e] = tuple(r.text(i, f"links.{e}.inputs") for i in r.items(item["inputs"], f"links.{e}.inputs"))
        link_alphabets[e] = r.integer(item["alphabet"], f"links.{e}.alphabet")
        tables[e] = tuple(r.integer(v, f"links.{e}.table") for v in r.items(item["table"], f"links.{e}.table"))
    r.done()
    return CodeAssignment(n, alphabets, tables, inputs, link_alphabets)


def serialize_code(code: CodeAssignment) -> str:
    return dump_json({
        "blocklength": code.blocklength,
        "messageAlphabets": dict(code.message_alphabets),
        "links": {
            e: {"inputs": list(code.link_inputs.get(e, ())), "alphabet": code.link_alphabets[e],
                "table": list(table)}
            for e, table in code.link_tables.items()
        },
    })


def parse_corpus(text: str) -> Tuple[SearchTarget, ...]:
    """Parse a list of search targets: ``[{"label", "blocklength", "rates", "demands"?}]``."""
    r = _Reader()
    targets = []
    for i, item in enumerate(r.items(load_json(text), "targets")):
        where = f"targets[{i}]"
        if not r.record(item, where, ("rates",), ("label", "blocklength", "demands")):
            continue
        rates = {}
        if isinstance(item["rates"], dict):
            for m, value in item["rates"].items():
                rates[m] = r.rational(value, f"{where}.rates.{m}")
        else:
            r.fail("BadType", f"{where}.rates", "expected an object")
        demands = None
        if item.get("demands") is not None:
            demands = tuple(_read_demand(r, d, f"{where}.demands[{j}]")
                            for j, d in enumerate(r.items(item["demands"], f"{where}.demands")))
        n = r.integer(item.get("blocklength", 1), f"{where}.blocklength")
        targets.append(SearchTarget(n, rates, demands, item.get("label", f"target-{i}")))
    r.done()
    return tuple(targets)


def corpus_doc(targets: Sequence[SearchTarget]) -> List[Dict[str, Any]]:
    out = []
    for t in targets:
        item: Dict[str, Any] = {"label": t.label, "blocklength": t.blocklength,
                                "rates": {m: rational_text(v) for m, v in t.rates.items()}}
        if t.demands is not None:
            item["demands"] = [_demand_doc(d) for d in t.demands]
        out.append(item)
    return out


#
# DOT
#

_NODE_STYLE: Mapping[Role, str] = {
    Role.SOURCE: 'shape=box, style=filled, fillcolor="lightblue"',
    Role.RELAY: "shape=ellipse",
    Role.SINK: 'shape=doublecircle, style=filled, fillcolor="lightgrey"',
}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(net: Network) -> str:
    """Graphviz text for `net`: nodes styled by role, links labelled ``id:capacity``."""
    lines = ["digraph network {", "  rankdir=LR;"]
    for n in net.nodes:
        lines.append(f"  {_quote(n.id)} [{_NODE_STYLE[n.role]}];")
    for e in net.links:
        label = _quote(f"{e.id}:{rational_text(e.capacity)}")
        style = ", style=dashed" if e.copy_of is not None else ""
        lines.append(f"  {_quote(e.tail)} -> {_quote(e.head)} [label={label}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
