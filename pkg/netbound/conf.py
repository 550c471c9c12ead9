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
"""Runtime options, read from the ``NETBOUND`` Django setting.

Example ``settings.py`` block::

    NETBOUND = {
        'SEARCH_BUDGET': int(os.getenv('NETBOUND_SEARCH_BUDGET', 10**8)),
        'SEARCH_WORKERS': int(os.getenv('NETBOUND_SEARCH_WORKERS', 1)),
    }

Outside a configured Django project the defaults below are used.
"""
import logging
from typing import Any, Dict

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

logger = logging.getLogger(__name__)

DEFAULTS: Dict[str, Any] = {
    "SEARCH_BUDGET": 10**8,
    "SEARCH_WORKERS": 1,
    "ENTROPY_TOLERANCE": 1e-9,
    "MAX_STEPS": 100,
    "STRICT_LEMMA4": False,
}

allowed_keys = list(DEFAULTS)


def options() -> Dict[str, Any]:
    """Return the effective option dict (defaults overlaid with ``settings.NETBOUND``)."""
    merged = dict(DEFAULTS)
    if not settings.configured:
        return merged
    user = getattr(settings, "NETBOUND", None) or {}
    unknown = sorted(set(user) - set(allowed_keys))
    if unknown:
        raise ImproperlyConfigured(f"NETBOUND: unknown option(s) {unknown}; allowed keys are {allowed_keys}")
    merged.update(user)
    return merged


def get_option(key: str) -> Any:
    if key not in DEFAULTS:
        raise KeyError(key)
    return options()[key]
