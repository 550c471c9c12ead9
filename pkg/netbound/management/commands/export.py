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
from netbound.fileformats import export_dot, serialize_network
from netbound.management.commands._base import NetboundCommand


class Command(NetboundCommand):
    help = "Write a network as Graphviz DOT (or canonical JSON)."
    json_reports = False

    def add_command_arguments(self, parser):
        parser.add_argument("file", help="network file (JSON)")
        parser.add_argument("--format", dest="export_format", choices=["dot", "json"], default="dot")
        parser.add_argument("--out", help="output file (default: standard output)")

    def run(self, file, **options):
        net = self.load_network(file)
        text = export_dot(net) if options["export_format"] == "dot" else serialize_network(net)
        if options.get("out"):
            self.write_text(options["out"], text)
        else:
            self.stdout.write(text, ending="")
