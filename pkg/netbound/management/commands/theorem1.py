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
from netbound.dbc import theorem1_verify
from netbound.fileformats import parse_code, rational_text
from netbound.management.commands._base import NetboundCommand


class Command(NetboundCommand):
    help = "Replay the epsilon-removal argument on an explicit zero-error code."

    def add_command_arguments(self, parser):
        parser.add_argument("file", help="network file (JSON)")
        parser.add_argument("--code", required=True, help="code file (JSON)")
        parser.add_argument("--link", required=True, help="id of the link to remove")
        parser.add_argument("--tolerance", type=float, default=None, help="entropy comparison tolerance")

    def run(self, file, **options):
        net = self.load_network(file)
        code = self.parse(options["code"], parse_code)
        report = theorem1_verify(net, code, options["link"], options.get("tolerance"))
        doc = {
            "link": report.removal.link,
            "epsilon": rational_text(report.removal.epsilon),
            "networkClass": report.removal.network_class.value,
            "bins": {str(s): n for s, n in report.bin_sizes.items()},
            "m0Size": report.m0_size,
            "space": report.space,
            "decoders": report.decoders,
            "shiftedRates": report.shifted,
            "inequalities": [
                {"messages": list(r.messages), "shiftedSum": r.shifted_sum, "entropy": r.entropy,
                 "slack": r.slack, "chainBound": r.chain_bound, "subadditive": r.subadditive}
                for r in report.rows
            ],
            "passed": report.passed,
        }
        self.report(options, doc, report.describe())
        if not report.passed:
            self.fail("the shifted rate point is outside the broadcast channel region")
