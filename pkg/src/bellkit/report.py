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

import csv
import io
import json
from typing import Any, Mapping, Optional, Sequence

import numpy as np

SCHEMA = "bellkit/1"
SIGNIFICANT_DIGITS = 12


def round_float(value: float) -> float:
    rounded = float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    # Avoid "-0.0" in reports.
    return 0.0 if rounded == 0 else rounded


def to_jsonable(value: Any) -> Any:
    """Convert numpy values, complex numbers and tuples into JSON-ready data."""
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [round_float(float(value.real)), round_float(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        return round_float(float(value))
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


def json_report(command: str, seed: int, params: Mapping[str, Any], result: Any) -> str:
    payload = {
        "schema": SCHEMA,
        "command": command,
        "seed": seed,
        "params": to_jsonable(params),
        "result": to_jsonable(result),
    }
    return json.dumps(payload, indent=2) + "\n"


def csv_report(
    columns: Sequence[str],
    rows: Sequence[Mapping[str, Any]],
    annotations: Optional[Mapping[str, Any]] = None,
) -> str:
    buffer = io.StringIO()
    for key, value in (annotations or {}).items():
        buffer.write(f"# {key}={to_jsonable(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([to_jsonable(row[column]) for column in columns])
    return buffer.getvalue()
