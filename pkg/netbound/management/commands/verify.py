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
from netbound.bounds import BoundDirection
from netbound.fileformats import corpus_doc, parse_corpus
from netbound.management.commands._base import NetboundCommand
from netbound.oracles import verify_direction


class Command(NetboundCommand):
    help = "Test a claimed bound direction between two networks by exhaustive search on a target list."

    def add_command_arguments(self, parser):
        parser.add_argument("original", help="original network file")
        parser.add_argument("transformed", help="transformed network file")
        parser.add_argument("--direction", required=True, choices=["lower", "upper", "equiv", "equivalent"])
        parser.add_argument("--corpus", required=True, help="search target list (JSON)")
        parser.add_argument("--budget", type=int, default=None)

    def run(self, original, transformed, **options):
        first, second = self.load_network(original), self.load_network(transformed)
        targets = self.parse(options["corpus"], parse_corpus)
        report = verify_direction(first, transformed=second, claimed=BoundDirection.parse(options["direction"]),
                                  corpus=targets, budget=options.get("budget"))
        rows = []
        for row, target in zip(report.rows, corpus_doc([r.target for r in report.rows])):
            rows.append({"target": target, "original": row.original, "transformed": row.transformed,
                         "violation": row in report.violations})
        doc = {"direction": report.claimed.value, "consistent": report.consistent, "rows": rows}
        lines = [f"{r['target']['label']}: original {'found' if r['original'] else 'not found'}, "
                 f"transformed {'found' if r['transformed'] else 'not found'}"
                 f"{'  <- violates ' + report.claimed.value if r['violation'] else ''}" for r in rows]
        lines.append("consistent" if report.consistent else f"{len(report.violations)} violation(s)")
        self.report(options, doc, "\n".join(lines))
        if not report.consistent:
            self.fail(f"claimed {report.claimed.value} bound is violated")
