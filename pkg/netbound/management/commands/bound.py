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
from netbound.fileformats import parse_demands, parse_rates, rational_text, serialize_code
from netbound.management.commands._base import NetboundCommand
from netbound.oracles import cutset_check, exhaustive_search, routing_check


class Command(NetboundCommand):
    help = "Check a rate vector against the cut-set bound, fractional routing or exhaustive code search."

    def add_command_arguments(self, parser):
        parser.add_argument("file", help="network file (JSON)")
        parser.add_argument("--method", required=True, choices=["cutset", "routing", "exhaustive"])
        parser.add_argument("--blocklength", type=int, default=1)
        parser.add_argument("--rates", help="rates overriding the file, e.g. M1=1,M2=3/2")
        parser.add_argument("--budget", type=int, default=None, help="largest code space to search")
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--demands", help="demands file replacing the network's demands")
        parser.add_argument("--code-out", help="where to write the code found by an exhaustive search")

    def run(self, file, **options):
        net = self.load_network(file)
        rates = self.convert("--rates", parse_rates, options["rates"]) if options.get("rates") else None
        method = options["method"]

        if method == "cutset":
            report = cutset_check(net, rates)
            doc = {"method": method, "passed": report.passed, "sink": report.sink,
                   "messages": list(report.messages),
                   "rateSum": rational_text(report.rate_sum) if report.rate_sum is not None else None,
                   "cutValue": rational_text(report.cut_value) if report.cut_value is not None else None}
            self.report(options, doc, report.describe())
            if not report.passed:
                self.fail("cut-set bound violated")
            return

        if method == "routing":
            report = routing_check(net, rates)
            doc = {"method": method, "feasible": report.feasible}
            self.report(options, doc, "routing: feasible" if report.feasible else "routing: infeasible")
            if not report.feasible:
                self.fail("no fractional routing carries these rates")
            return

        demands = self.parse(options["demands"], parse_demands) if options.get("demands") else None
        outcome = exhaustive_search(net, options["blocklength"], demands, rates, options.get("budget"),
                                    options.get("workers"))
        doc = {"method": method, "blocklength": options["blocklength"], "found": outcome.found,
               "count": outcome.count, "space": outcome.space}
        if outcome.found:
            text = f"exhaustive: found a zero-error code after {outcome.count} assignments"
            if options.get("code_out"):
                self.write_text(options["code_out"], serialize_code(outcome.code))
        else:
            text = f"exhaustive: NotFound after {outcome.count} assignments"
        self.report(options, doc, text)
        if not outcome.found:
            self.fail(f"no zero-error code at blocklength {options['blocklength']}")
