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
"""Shared plumbing for the netbound management commands.

Exit codes: 0 success, 1 domain failure (violation, not found, failed
check), 2 usage or I/O error.
"""
import logging
import traceback
from pathlib import Path
from typing import Any, Dict

from django.core.management.base import BaseCommand, CommandError

from netbound.exceptions import NetworkBoundError, NetworkSyntaxError, SemanticError
from netbound.fileformats import dump_json, parse_network
from netbound.netcore import Network

logger = logging.getLogger(__name__)

DOMAIN_FAILURE = 1
USAGE_ERROR = 2


class NetboundCommand(BaseCommand):
    requires_system_checks = []
    json_reports = True

    def add_arguments(self, parser):
        if self.json_reports:
            parser.add_argument("--format", dest="report_format", choices=["text", "json"], default="text",
                                help="report format (default: text)")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def read_text(self, path: str) -> str:
        try:
            return Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise CommandError(f"cannot read {path}: {e}", returncode=USAGE_ERROR)

    def write_text(self, path: str, text: str) -> None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as e:
            raise CommandError(f"cannot write {path}: {e}", returncode=USAGE_ERROR)
        logger.info(f"wrote {path}")

    def convert(self, where: str, parser, text: str, *args):
        """Parse `text`, mapping format errors to exit codes."""
        try:
            return parser(text, *args)
        except NetworkSyntaxError as e:
            raise CommandError(f"{where}: {e}", returncode=USAGE_ERROR)
        except SemanticError as e:
            raise CommandError(f"{where}: {e}", returncode=DOMAIN_FAILURE)

    def parse(self, path: str, parser, *args):
        return self.convert(path, parser, self.read_text(path), *args)

    def load_network(self, path: str, check: bool = True) -> Network:
        return self.parse(path, parse_network, check)

    def report(self, options: Dict[str, Any], doc: Dict[str, Any], text: str) -> None:
        if options.get("report_format") == "json":
            self.stdout.write(dump_json(doc), ending="")
        else:
            self.stdout.write(text)

    def fail(self, message: str):
        raise CommandError(message, returncode=DOMAIN_FAILURE)

    def handle(self, *args, **options):
        try:
            self.run(*args, **options)
        except NetworkBoundError as e:
            logger.error(f"{self.__module__.rsplit('.', 1)[-1]}: {type(e).__name__}: {e}")
            raise CommandError(f"{type(e).__name__}: {e}", returncode=DOMAIN_FAILURE)
        except CommandError:
            raise
        except Exception as e:
            logger.error(f"{self.__module__.rsplit('.', 1)[-1]}: unexpected {type(e).__name__}: {e}")
            logger.error(traceback.format_exc())
            raise CommandError(f"internal error: {type(e).__name__}: {e}", returncode=DOMAIN_FAILURE)

    def run(self, *args, **options):
        raise NotImplementedError
