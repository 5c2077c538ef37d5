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

"""Command-line reports. Angles are given in degrees."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Literal, Optional, Sequence

import numpy as np
import pydantic
from pydantic import BaseModel, Field

from . import ccp, freedom, leggett, protocols, qudit, violation
from .bellgen import msetting_bound
from .config import OptimizerConfig, get_settings
from .errors import BellkitError, ValidationError
from .qstate import NAMED_KINDS, NamedStateSpec, pure_qubit
from .report import csv_report, json_report

LOGGER = logging.getLogger("bellkit.cli")

Command = Literal[
    "bounds",
    "violation",
    "leggett-sweep",
    "freedom",
    "leak-sweep",
    "qudit-eigen",
    "ccp-tables",
    "protocols",
    "all",
]


class ReportRequest(BaseModel):
    command: Command
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default_factory=lambda: get_settings().seed, ge=0, lt=2**64)
    format: Literal["json", "csv"] = "json"
    out: Optional[str] = None
    restarts: Optional[int] = Field(default=None, gt=0)
    samples: Optional[int] = Field(default=None, gt=0)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind, "message": self.message}


@dataclass
class Report:
    result: Any
    columns: Sequence[str] = ()
    rows: list[dict[str, Any]] = field(default_factory=list)
    annotations: dict[str, Any] = field(default_factory=dict)


Handler = Callable[[dict[str, Any], ReportRequest], Report]


@dataclass(frozen=True)
class CommandSpec:
    help: str
    defaults: dict[str, Any]
    handler: Handler
    formats: tuple[str, ...] = ("json",)


# Inclusive ranges; None leaves a side open.
RANGES: dict[str, tuple[Optional[float], Optional[float]]] = {
    "n": (2, None),
    "m": (2, None),
    "visibility": (0.0, 1.0),
    "alpha_deg": (0.0, 45.0),
    "phi_deg": (0.0, 90.0),
    "phi_min": (0.0, 180.0),
    "phi_max": (0.0, 180.0),
    "step": (1e-9, None),
    "q_min": (0.125, 1.0),
    "q_max": (0.125, 1.0),
    "d": (2, qudit.MAX_DIMENSION),
    "k": (0, None),
    "l": (0, None),
    "d1": (0, None),
    "d0": (0, None),
    "n_max": (2, None),
    "d_min": (3, 8),
    "d_max": (3, 8),
}
STATE_ALIASES = {"ghz": "ghz_plus"}


def _optimizer(request: ReportRequest) -> OptimizerConfig:
    return get_settings().optimizer(restarts=request.restarts, seed=request.seed)


def _state_spec(params: dict[str, Any]) -> NamedStateSpec:
    kind = STATE_ALIASES.get(params["state"], params["state"])
    spec = NamedStateSpec(kind=kind, parties=params["n"], alpha=float(np.radians(params["alpha_deg"])))
    if params["visibility"] < 1.0:
        spec = NamedStateSpec.noisy(spec, params["visibility"])
    return spec


def _run_bounds(params: dict[str, Any], request: ReportRequest) -> Report:
    n, m = params["n"], params["m"]
    return Report(
        {
            "B_LR": msetting_bound(n, m),
            "quantum_max": m**n / 2,
            "violation_factor": violation.ghz_violation_factor(n, m),
        }
    )


def _conditions_for(parties: int, requested: str) -> list[str]:
    if requested != "all":
        return [requested]
    chosen = ["horodecki"] if parties == 2 else []
    chosen.append("wwzb")
    if parties <= violation.MAX_CN_PARTIES:
        chosen.append("cn")
    chosen.append("msetting")
    return chosen


def _run_violation(params: dict[str, Any], request: ReportRequest) -> Report:
    spec = _state_spec(params)
    tensor = violation.as_tensor(spec)
    config = _optimizer(request)
    results = []
    for condition in _conditions_for(tensor.parties, params["condition"]):
        result = violation.evaluate_condition(tensor, condition, params["m"], config, state=spec.kind)
        payload = result.to_dict()
        payload["critical_visibility"] = violation.visibility_from_result(result)
        results.append(payload)
    return Report({"state": spec.model_dump(exclude_none=True), "conditions": results})


def _run_leggett_sweep(params: dict[str, Any], request: ReportRequest) -> Report:
    rows = leggett.sweep(params["phi_min"], params["phi_max"], params["step"], params["visibility"])
    thresholds = leggett.nlhv_visibility_thresholds()
    ri_angle = leggett.optimal_ri_free_angle()
    ri_free = leggett.ri_free_inequality(ri_angle)
    result: dict[str, Any] = {
        "rows": rows,
        "thresholds": thresholds.to_dict(),
        "measured": leggett.measured_evaluation().to_dict(),
        "ri_free": {
            "phi_deg": float(np.degrees(ri_angle)),
            "value": ri_free.value,
            "bound": ri_free.bound,
            "critical_visibility": ri_free.bound / ri_free.value,
        },
    }
    if request.samples:
        # u perpendicular to the measurement plane, settings 60 degrees apart.
        b = np.array([np.cos(np.pi / 3), 0.0, np.sin(np.pi / 3)])
        stats = leggett.simulate_correlations([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], b, request.samples, request.seed)
        result["sampling"] = stats.to_dict()
    annotations = {
        "phi_star_deg": float(np.degrees(thresholds.phi)),
        "v_nlhv": thresholds.v_nlhv,
        "v_chsh": thresholds.v_chsh,
    }
    columns = ("phi_deg", "s_nlhv", "nlhv_bound", "s_chsh", "chsh_bound")
    return Report(result, columns, rows, annotations)


def _run_freedom(params: dict[str, Any], request: ReportRequest) -> Report:
    lr_table = freedom.local_realistic_table()
    return Report(
        {
            "quantum": freedom.delta_measures(freedom.quantum_chsh_table(), lr_table).to_dict(),
            "source_knows_settings": freedom.delta_measures(freedom.source_knows_settings_table(), lr_table).to_dict(),
            "no_freedom_chsh": freedom.no_freedom_strategy().chsh_value(),
            "mermin": freedom.mermin_freedom(params["n"]).to_dict(),
            "eve": freedom.eve_attack_curves(float(np.radians(params["phi_deg"]))).to_dict(),
            "leak_thresholds": freedom.leak_thresholds().to_dict(),
        }
    )


def _run_leak_sweep(params: dict[str, Any], request: ReportRequest) -> Report:
    rows = freedom.leak_sweep(params["q_min"], params["q_max"], params["step"])
    thresholds = freedom.leak_thresholds()
    return Report(
        {"thresholds": thresholds.to_dict(), "rows": rows},
        freedom.LEAK_COLUMNS,
        rows,
        thresholds.to_dict(),
    )


def _run_qudit_eigen(params: dict[str, Any], request: ReportRequest) -> Report:
    d, k, l = params["d"], params["k"], params["l"]
    system = qudit.eigensystem(d, k, l)
    result: dict[str, Any] = {
        "eigensystem": system.to_dict(),
        "fourier_mub": qudit.mub_check(np.eye(d), qudit.fourier_basis(d)),
    }
    if (d, k, l) == (6, 4, 3):
        overlaps = np.abs(qudit.printed_s43_basis().conj().T @ system.vectors)
        result["printed_basis_match"] = bool(np.allclose(overlaps.max(axis=1), 1.0, atol=1e-9))
    if params["d1"] and params["d0"]:
        result["plan"] = qudit.composite_plan(params["d1"], params["d0"]).to_dict()
    return Report(result)


def _run_ccp_tables(params: dict[str, Any], request: ReportRequest) -> Report:
    m_values = _int_list(params["m_values"])
    qubit = ccp.advantage_table(range(2, params["n_max"] + 1), m_values)
    config = get_settings().optimizer(restarts=request.restarts or 2, seed=request.seed)
    qudit_rows = ccp.qudit_table(range(params["d_min"], params["d_max"] + 1), config)
    return Report({"qubit": qubit, "qudit": qudit_rows})


def _run_protocols(params: dict[str, Any], request: ReportRequest) -> Report:
    bits = [(0, 0), (1, 0), (0, 1), (1, 1)]
    gram = protocols.dense_coding_gram()
    unknown = pure_qubit(1.1, 0.4)
    return Report(
        {
            "dense_coding": {f"{b0}{b1}": list(protocols.dense_coding_roundtrip((b0, b1))) for b0, b1 in bits},
            "dense_coding_orthogonal": bool(np.allclose(gram, np.eye(4), atol=1e-12)),
            "teleport": [branch.to_dict() for branch in protocols.teleport_all(unknown)],
            "ghz": protocols.ghz_paradox_check().to_dict(),
        }
    )


def _run_all(params: dict[str, Any], request: ReportRequest) -> Report:
    result = {}
    for name, spec in COMMANDS.items():
        if name == "all":
            continue
        result[name] = spec.handler(dict(spec.defaults), request).result
    return Report(result)


COMMANDS: dict[str, CommandSpec] = {
    "bounds": CommandSpec(
        "Local-realistic bound, quantum maximum and GHZ violation factor of the M-setting inequality.",
        {"n": 3, "m": 2},
        _run_bounds,
    ),
    "violation": CommandSpec(
        "Violation conditions and critical visibilities for a named state (conditions table).",
        {"state": "ghz", "n": 3, "m": 2, "alpha_deg": 22.5, "visibility": 1.0, "condition": "all"},
        _run_violation,
    ),
    "leggett-sweep": CommandSpec(
        "Nonlocal hidden-variable inequality and CHSH versus the angle phi (nonlocal-model results).",
        {"phi_min": 0.0, "phi_max": 40.0, "step": 2.0, "visibility": 0.99},
        _run_leggett_sweep,
        ("json", "csv"),
    ),
    "freedom": CommandSpec(
        "Lack-of-freedom measures, Mermin scaling and Eve's attack curves.",
        {"n": 3, "phi_deg": 30.0},
        _run_freedom,
    ),
    "leak-sweep": CommandSpec(
        "Leaking-laboratory key distribution quantities versus Q with thresholds.",
        {"q_min": 0.125, "q_max": 1.0, "step": 0.025},
        _run_leak_sweep,
        ("json", "csv"),
    ),
    "qudit-eigen": CommandSpec(
        "Closed-form S_kl eigensystem, Fourier unbiasedness and a composite measurement plan.",
        {"d": 6, "k": 4, "l": 3, "d1": 0, "d0": 0},
        _run_qudit_eigen,
    ),
    "ccp-tables": CommandSpec(
        "Qubit advantage table and qudit CGLMP / Delta table for communication complexity.",
        {"n_max": 5, "m_values": "2,3,4,5", "d_min": 3, "d_max": 8},
        _run_ccp_tables,
    ),
    "protocols": CommandSpec(
        "Dense coding, teleportation and GHZ-argument checks.",
        {},
        _run_protocols,
    ),
    "all": CommandSpec("Every report above with default parameters.", {}, _run_all),
}


def _int_list(value: Any) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(item) for item in value]
    return [int(item) for item in str(value).split(",") if item.strip()]


def _resolved_params(request: ReportRequest) -> dict[str, Any]:
    params = dict(COMMANDS[request.command].defaults)
    params.update({key: value for key, value in request.params.items() if key in params})
    return params


def validate(request: ReportRequest) -> list[Diagnostic]:
    """Check parameters and project size guards without computing anything."""
    spec = COMMANDS[request.command]
    diagnostics = [
        Diagnostic("unknown_key", f"{request.command} does not take parameter {key!r}")
        for key in request.params
        if key not in spec.defaults
    ]
    if request.format not in spec.formats:
        diagnostics.append(Diagnostic("range", f"{request.command} does not support format {request.format!r}"))
    params = _resolved_params(request)
    for key, value in params.items():
        if key not in RANGES or isinstance(value, str):
            continue
        low, high = RANGES[key]
        if (low is not None and value < low) or (high is not None and value > high):
            diagnostics.append(Diagnostic("range", f"{key}={value} outside [{low}, {high}]"))
    if "k" in params and not (params["k"] < params["d"] and params["l"] < params["d"]):
        diagnostics.append(Diagnostic("range", "k and l must be smaller than d"))
    if "state" in params:
        kind = STATE_ALIASES.get(params["state"], params["state"])
        if kind not in NAMED_KINDS or kind == "noisy":
            diagnostics.append(Diagnostic("range", f"unknown state {params['state']!r}"))
        if params["condition"] != "all" and params["condition"] not in violation.CONDITIONS:
            diagnostics.append(Diagnostic("range", f"unknown condition {params['condition']!r}"))
    if "m_values" in params:
        try:
            if any(m < 2 for m in _int_list(params["m_values"])):
                diagnostics.append(Diagnostic("range", "every M must be at least 2"))
        except ValueError:
            diagnostics.append(Diagnostic("range", f"malformed m_values {params['m_values']!r}"))
    settings = get_settings()
    if request.command == "violation":
        parties = params["n"]
        if parties > settings.max_qubits or 4**parties > settings.memory_budget:
            diagnostics.append(
                Diagnostic(
                    "guard",
                    f"{parties} qubits need a 4^{parties} tensor; cap is {settings.max_qubits} qubits "
                    f"and {settings.memory_budget} entries",
                )
            )
    if request.command == "ccp-tables":
        try:
            largest = max(_int_list(params["m_values"]), default=2) ** params["n_max"]
        except ValueError:
            largest = 0
        if largest > ccp.MAX_WEIGHT_TERMS:
            diagnostics.append(Diagnostic("guard", f"M^N = {largest} weight terms exceed {ccp.MAX_WEIGHT_TERMS}"))
    return diagnostics


def _exit_code(diagnostics: Sequence[Diagnostic]) -> int:
    if any(item.kind == "guard" for item in diagnostics):
        return 3
    return 2 if diagnostics else 0


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as error:
        raise ValidationError(f"cannot write report to {out}: {error}") from error


def run(request: ReportRequest, dry_run: bool = False) -> int:
    """Validate and execute ``request``; returns the process exit code."""
    diagnostics = validate(request)
    if dry_run or diagnostics:
        payload = {"ok": not diagnostics, "diagnostics": [item.to_dict() for item in diagnostics]}
        stream = sys.stdout if dry_run else sys.stderr
        stream.write(json.dumps(payload, indent=2) + "\n")
        return _exit_code(diagnostics)
    params = _resolved_params(request)
    try:
        report = COMMANDS[request.command].handler(params, request)
        if request.format == "csv":
            text = csv_report(report.columns, report.rows, report.annotations)
        else:
            text = json_report(request.command, request.seed, params, report.result)
        _emit(text, request.out)
    except BellkitError as error:
        LOGGER.error("%s failed: %s", request.command, error)
        sys.stderr.write(json.dumps(error.to_response()) + "\n")
        return error.exit_code
    return 0


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None)
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--dry-run", action="store_true")

    parser = argparse.ArgumentParser(prog="bellkit", description="Bell-inequality calculators and reports")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        sub = commands.add_parser(name, help=spec.help, description=spec.help, parents=[common])
        for key, default in spec.defaults.items():
            sub.add_argument(_flag(key), dest=key, type=type(default), default=None)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=logging.WARNING if args.quiet else getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    params = {
        key: getattr(args, key)
        for key in COMMANDS[args.command].defaults
        if getattr(args, key, None) is not None
    }
    try:
        request = ReportRequest(
            command=args.command,
            params=params,
            seed=args.seed if args.seed is not None else settings.seed,
            format=args.format,
            out=args.out,
            restarts=args.restarts,
            samples=args.samples,
        )
    except pydantic.ValidationError as error:
        sys.stderr.write(json.dumps({"ok": False, "error": str(error), "kind": "ValidationError"}) + "\n")
        return 2
    return run(request, dry_run=args.dry_run)


if __name__ == "__main__":
    raise SystemExit(main())
