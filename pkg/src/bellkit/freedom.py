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

"""Lack-of-freedom measures and the leaking-lab key distribution analysis."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Mapping

import numpy as np
from scipy.optimize import bisect
from scipy.special import entr

from .bellgen import BellInequality, lr_bound_bruteforce
from .config import ALGEBRAIC_TOL
from .errors import ValidationError
from .qstate import StateVector, ghz_vector, partial_trace
from .violation import horodecki_value

LOGGER = logging.getLogger("bellkit.freedom")

CHSH_KEYS = ((1, 1), (1, 2), (2, 1), (2, 2))
CHSH_SIGNS = {(1, 1): 1.0, (1, 2): 1.0, (2, 1): 1.0, (2, 2): -1.0}
COS2_PI8 = float(np.cos(np.pi / 8) ** 2)
SIN2_PI8 = float(np.sin(np.pi / 8) ** 2)
BER_THRESHOLD = 0.5 * (1 - 1 / np.sqrt(2))
Q_MIN = 1 / 8
THRESHOLD_XTOL = 1e-6
MERMIN_BRUTEFORCE_PARTIES = 10


@dataclass(frozen=True)
class ProbabilityTable:
    """P(X_k = Y_l), or P(product of outcomes = +1) for more parties."""

    values: Mapping[tuple[int, ...], float]

    def __post_init__(self) -> None:
        clean = {}
        for key, value in self.values.items():
            value = float(value)
            if not -ALGEBRAIC_TOL <= value <= 1 + ALGEBRAIC_TOL:
                raise ValidationError(f"probability {value} for settings {key} outside [0, 1]")
            clean[tuple(int(k) for k in key)] = value
        object.__setattr__(self, "values", clean)

    @classmethod
    def chsh(cls, p11: float, p12: float, p21: float, p22: float) -> "ProbabilityTable":
        return cls(dict(zip(CHSH_KEYS, (p11, p12, p21, p22))))

    def require_chsh(self) -> None:
        if set(self.values) != set(CHSH_KEYS):
            raise ValidationError(f"expected CHSH-shaped keys {list(CHSH_KEYS)}, got {sorted(self.values)}")

    def chsh_value(self) -> float:
        """P11 + P12 + P21 - P22, bounded by 2 under local realism."""
        self.require_chsh()
        return sum(CHSH_SIGNS[key] * self.values[key] for key in CHSH_KEYS)


def quantum_chsh_table() -> ProbabilityTable:
    return ProbabilityTable.chsh(COS2_PI8, COS2_PI8, COS2_PI8, SIN2_PI8)


def local_realistic_table() -> ProbabilityTable:
    return ProbabilityTable.chsh(1.0, 1.0, 1.0, 1.0)


def source_knows_settings_table() -> ProbabilityTable:
    """Perfect (anti)correlation chosen with knowledge of the settings."""
    return ProbabilityTable.chsh(1.0, 1.0, 1.0, 0.0)


@dataclass(frozen=True)
class DeterministicStrategy:
    outcomes: Mapping[tuple[int, int], tuple[int, int]]

    def correlations(self) -> dict[tuple[int, int], int]:
        return {key: a * b for key, (a, b) in self.outcomes.items()}

    def chsh_value(self) -> float:
        e = self.correlations()
        return float(sum(CHSH_SIGNS[key] * e[key] for key in CHSH_KEYS))

    def probability_table(self) -> ProbabilityTable:
        return ProbabilityTable({key: 1.0 if value > 0 else 0.0 for key, value in self.correlations().items()})


def no_freedom_strategy() -> DeterministicStrategy:
    """Outcomes fixed per setting pair, reaching the algebraic CHSH limit of four."""
    return DeterministicStrategy({key: (1, 1 if key != (2, 2) else -1) for key in CHSH_KEYS})


@dataclass(frozen=True)
class FreedomReport:
    delta_chsh: float
    delta_uniform_signed: float
    delta_uniform_positive: float
    deltas: dict[tuple[int, int], float] = field(default_factory=dict)
    s_measured: float = 0.0
    s_model: float = 0.0

    @property
    def adapted_bound(self) -> float:
        return 2 + self.delta_chsh

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta_chsh": self.delta_chsh,
            "delta_uniform_signed": self.delta_uniform_signed,
            "delta_uniform_positive": self.delta_uniform_positive,
            "deltas": {f"{k}{l}": value for (k, l), value in sorted(self.deltas.items())},
            "s_measured": self.s_measured,
            "s_model": self.s_model,
            "adapted_bound": self.adapted_bound,
        }


def delta_measures(measured: ProbabilityTable, model: ProbabilityTable) -> FreedomReport:
    """Lack of freedom needed for ``model`` to reproduce ``measured``.

    If every Delta_kl has the same size and the sign pattern of the CHSH
    combination the minimum is Delta_CHSH / 4; if all are positive it is
    Delta_CHSH / 2.
    """
    measured.require_chsh()
    model.require_chsh()
    deltas = {key: measured.values[key] - model.values[key] for key in CHSH_KEYS}
    delta_chsh = sum(CHSH_SIGNS[key] * deltas[key] for key in CHSH_KEYS)
    return FreedomReport(
        delta_chsh=delta_chsh,
        delta_uniform_signed=delta_chsh / 4,
        delta_uniform_positive=delta_chsh / 2,
        deltas=deltas,
        s_measured=measured.chsh_value(),
        s_model=model.chsh_value(),
    )


def mermin_coefficients(parties: int) -> dict[tuple[int, ...], float]:
    """S(k) = sin[(k_1 + ... + k_N) pi / 2] over k in {0, 1}^N."""
    return {
        key: float(np.round(np.sin(sum(key) * np.pi / 2)))
        for key in product((0, 1), repeat=parties)
    }


def mermin_correlation_bound(parties: int) -> float:
    if parties <= MERMIN_BRUTEFORCE_PARTIES:
        coefficients = {
            tuple(k + 1 for k in key): value
            for key, value in mermin_coefficients(parties).items()
            if value != 0
        }
        ineq = BellInequality(parties, (2,) * parties, coefficients, 1.0, label=f"mermin-sin[{parties}]")
        return lr_bound_bruteforce(ineq)
    return float(2 ** (parties // 2))


def mermin_probability_bound(parties: int) -> float:
    """Bound on sum_k S(k) P(prod = +1 | k): half the coefficient sum plus half the correlation bound."""
    total = sum(mermin_coefficients(parties).values())
    return 0.5 * total + 0.5 * mermin_correlation_bound(parties)


@dataclass(frozen=True)
class MerminFreedom:
    parties: int
    bound: float
    quantum_value: float
    delta_merm_min: float
    delta_n: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "parties": self.parties,
            "B": self.bound,
            "M_qm": self.quantum_value,
            "delta_merm_min": self.delta_merm_min,
            "delta_N": self.delta_n,
        }


def mermin_freedom(parties: int) -> MerminFreedom:
    if parties < 2:
        raise ValidationError("the Mermin expression needs at least two parties")
    bound = mermin_probability_bound(parties)
    quantum = 0.5 * (2 ** (parties - 1) + 2 ** (parties / 2) * np.sin(parties * np.pi / 4))
    delta_merm = quantum - bound
    delta_n = 0.5 - 2.0 ** (-((parties + 1) // 2))
    expected = 2 ** (parties - 2) - 2 ** ((parties - 2) // 2)
    if abs(delta_merm - expected) > 1e-9:
        LOGGER.warning("Mermin freedom for N=%d: %.12g differs from closed form %.12g", parties, delta_merm, expected)
    return MerminFreedom(parties, bound, float(quantum), float(delta_merm), float(delta_n))


def eve_unitary(phi: float) -> np.ndarray:
    """Eve's interaction on Bob's photon and her ancilla, in the |z+>, |z-> basis.

    |z+ z+> and |z- z-> are left alone; |z- z+> turns towards |z+ z-> by ``phi``.
    """
    c, s = np.cos(phi), np.sin(phi)
    unitary = np.eye(4, dtype=complex)
    # basis order |BE>: 00, 01, 10, 11
    unitary[2, 2], unitary[1, 2] = c, s
    unitary[2, 1], unitary[1, 1] = -s, c
    return unitary


def eve_attack_state(phi: float) -> StateVector:
    """(I_A x U_BE) |phi+>_AB |z+>_E, i.e. (|000> + cos(phi)|110> + sin(phi)|101>) / sqrt(2)."""
    initial = np.kron(ghz_vector(2).amplitudes, np.array([1, 0], dtype=complex))
    return StateVector(np.kron(np.eye(2), eve_unitary(phi)) @ initial, (2, 2, 2))


@dataclass(frozen=True)
class EveCurves:
    phi: float
    s_ab: float
    s_ae: float
    s_be: float

    def to_dict(self) -> dict[str, Any]:
        return {"phi": self.phi, "S_AB": self.s_ab, "S_AE": self.s_ae, "S_BE": self.s_be}


def _max_chsh(rho) -> float:
    return float(2 * np.sqrt(horodecki_value(rho)))


def eve_attack_curves(phi: float) -> EveCurves:
    if not -ALGEBRAIC_TOL <= phi <= np.pi / 2 + ALGEBRAIC_TOL:
        raise ValidationError("attack angle must lie in [0, pi/2]")
    psi = eve_attack_state(phi)
    return EveCurves(
        phi=phi,
        s_ab=_max_chsh(partial_trace(psi, [0, 1])),
        s_ae=_max_chsh(partial_trace(psi, [0, 2])),
        s_be=_max_chsh(partial_trace(psi, [1, 2])),
    )


def binary_entropy(p: float) -> float:
    """H(p) in bits with H(0) = H(1) = 0."""
    if not -ALGEBRAIC_TOL <= p <= 1 + ALGEBRAIC_TOL:
        raise ValidationError(f"probability {p} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    return float((entr(p) + entr(1 - p)) / np.log(2))


def leak_chsh(q: float) -> float:
    return 3 * q + (1 - q) / 7 * (5 + 4 * COS2_PI8)


def leak_error_rate(q: float) -> float:
    return (1 - q) / 7 * (2.5 + 2 * SIN2_PI8)


@dataclass(frozen=True)
class LeakReport:
    q: float
    s: float
    d: float
    i_ab: float
    i_ae: float
    i_be: float
    i_be_tilde: float

    @property
    def chsh_violated(self) -> bool:
        return self.s > 2

    @property
    def looks_secure(self) -> bool:
        return self.d < BER_THRESHOLD

    @property
    def actually_secure(self) -> bool:
        return self.i_ab > min(self.i_ae, self.i_be)

    def to_dict(self) -> dict[str, Any]:
        return {
            "Q": self.q,
            "S": self.s,
            "D": self.d,
            "I_AB": self.i_ab,
            "I_AE": self.i_ae,
            "I_BE": self.i_be,
            "I_BE_tilde": self.i_be_tilde,
            "chsh_violated": self.chsh_violated,
            "looks_secure": self.looks_secure,
            "actually_secure": self.actually_secure,
        }


def leak_analysis(q: float) -> LeakReport:
    """Key-distribution figures when Eve learns the settings with probability Q."""
    if not Q_MIN - ALGEBRAIC_TOL <= q <= 1 + ALGEBRAIC_TOL:
        raise ValidationError(f"Q must lie in [1/8, 1], got {q}")
    d = max(leak_error_rate(q), 0.0)
    return LeakReport(
        q=q,
        s=leak_chsh(q),
        d=d,
        i_ab=1 - binary_entropy(d),
        i_ae=3 / 7 + 4 * q / 7,
        i_be=1 - (1 - q) / 7 * (2 + 4 * binary_entropy(COS2_PI8)),
        i_be_tilde=1 - binary_entropy(0.5 + np.sqrt(max(d - d * d, 0.0))),
    )


@dataclass(frozen=True)
class LeakThresholds:
    q_cl: float
    q_0: float
    q_qm: float

    def to_dict(self) -> dict[str, Any]:
        return {"q_cl": self.q_cl, "q_0": self.q_0, "q_qm": self.q_qm}


def leak_thresholds() -> LeakThresholds:
    """Settings knowledge at which S reaches 2, D drops to D0 and S reaches 1 + sqrt(2)."""
    return LeakThresholds(
        q_cl=float(bisect(lambda q: leak_chsh(q) - 2, Q_MIN, 1.0, xtol=THRESHOLD_XTOL)),
        q_0=float(bisect(lambda q: leak_error_rate(q) - BER_THRESHOLD, Q_MIN, 1.0, xtol=THRESHOLD_XTOL)),
        q_qm=float(bisect(lambda q: leak_chsh(q) - (1 + np.sqrt(2)), Q_MIN, 1.0, xtol=THRESHOLD_XTOL)),
    )


LEAK_COLUMNS = (
    "Q",
    "S",
    "D",
    "I_AB",
    "I_AE",
    "I_BE",
    "I_BE_tilde",
    "chsh_violated",
    "looks_secure",
    "actually_secure",
)


def leak_sweep(q_min: float = Q_MIN, q_max: float = 1.0, step: float = 0.025) -> list[dict[str, Any]]:
    if step <= 0 or q_max < q_min:
        raise ValidationError("leak sweep needs step > 0 and q_max >= q_min")
    grid = np.arange(q_min, q_max + step / 2, step)
    return [leak_analysis(float(min(q, 1.0))).to_dict() for q in grid]
