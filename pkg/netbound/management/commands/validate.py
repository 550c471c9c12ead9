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
from django.core.management.base import CommandError

from netbound.exceptions import NetworkSyntaxError, SemanticError
from netbound.fileformats import parse_network
from netbound.management.commands._base import DOMAIN_FAILURE, USAGE_ERROR, NetboundCommand
from netbound.netcore import validate


class Command(NetboundCommand):
    help = "Check a network file against the data model."

    def add_command_arguments(self, parser):
        parser.add_argument("file", help="network file (JSON)")

    def run(self, file, **options):
        text = self.read_text(file)
        try:
            violations = validate(parse_network(text, check=False))
        except SemanticError as e:
            violations = e.violations
        except NetworkSyntaxError as e:
            raise CommandError(f"{file}: {e}", returncode=USAGE_ERROR)
        doc = {
            "file": file,
            "valid": not violations,
            "violations": [{"kind": v.kind, "element": v.element, "detail": v.detail} for v in violations],
        }
        text = "valid" if not violations else "\n".join(str(v) for v in violations)
        self.report(options, doc, text)
        if violations:
            raise CommandError(f"{file}: {len(violations)} violation(s)", returncode=DOMAIN_FAILURE)
