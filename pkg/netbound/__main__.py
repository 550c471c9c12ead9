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
"""The ``netbound`` command: a stand-alone front end to the management commands.

Outside a Django project, settings are configured here from the environment
(``NETBOUND_SEARCH_BUDGET``, ``NETBOUND_SEARCH_WORKERS``,
``NETBOUND_ENTROPY_TOLERANCE``, ``NETBOUND_MAX_STEPS``,
``NETBOUND_STRICT_LEMMA4`` and ``NETBOUND_LOG_LEVEL``).
"""
import os
import sys
from typing import List, Optional

import django
from django.conf import settings
from django.core.management import ManagementUtility

from netbound.conf import DEFAULTS

COMMANDS = ("validate", "simplify", "bound", "verify", "theorem1", "export")

USAGE = f"""usage: netbound <command> [options]

commands: {', '.join(COMMANDS)}
run 'netbound <command> --help' for the options of one command
"""


def _env_options() -> dict:
    options = {}
    for key, default in DEFAULTS.items():
        raw = os.getenv(f"NETBOUND_{key}")
        if raw is None:
            continue
        if isinstance(default, bool):
            options[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        else:
            options[key] = type(default)(raw)
    return options


def configure() -> None:
    if settings.configured:
        return
    settings.configure(
        INSTALLED_APPS=["netbound"],
        NETBOUND=_env_options(),
        LOGGING={
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
            },
            "handlers": {
                "console": {"class": "logging.StreamHandler", "formatter": "plain"},
            },
            "loggers": {
                "netbound": {
                    "handlers": ["console"],
                    "level": os.getenv("NETBOUND_LOG_LEVEL", "WARNING"),
                    "propagate": False,
                },
            },
        },
    )
    django.setup()


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ("-h", "--help", "help"):
        sys.stdout.write(USAGE)
        return 0
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(USAGE)
        return 2
    configure()
    try:
        ManagementUtility(["netbound"] + argv).execute()
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
