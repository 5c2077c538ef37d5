# Copyright (C) 2026 StarHuntingGames
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
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

from __future__ import annotations

from typing import Any


class BellkitError(Exception):
    """Base class for every error raised by bellkit."""

    exit_code = 1

    def to_response(self) -> dict[str, Any]:
        return {"ok": False, "error": str(self), "kind": type(self).__name__}


class ValidationError(BellkitError):
    """Malformed input: bad parameters, non-unit settings, dimension mismatch."""

    exit_code = 2


class GuardError(BellkitError):
    """A configured size guard would be exceeded."""

    exit_code = 3


class DimensionOverflowError(GuardError):
    """The state or tensor does not fit the configured memory budget."""


class ConstructionError(BellkitError):
    """A closed-form construction failed its residual check."""
