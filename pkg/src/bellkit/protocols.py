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

"""Dense coding, teleportation and the GHZ argument as state-algebra checks."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any

import numpy as np

from .bellgen import BellInequality, lr_bound_bruteforce
from .config import ALGEBRAIC_TOL
from .errors import ValidationError
from .qstate import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityMatrix,
    StateVector,
    expectation,
    fidelity,
    ghz_vector,
)

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")
# Unitaries on the first qubit of phi+, and Bob's corrections per Bell outcome.
ENCODINGS = (IDENTITY, SIGMA_Z, SIGMA_X, SIGMA_X @ SIGMA_Z)
CORRECTIONS = ENCODINGS


def bell_state(index: int) -> StateVector:
    """Bell states in the order phi+, phi-, psi+, psi-."""
    if index not in range(4):
        raise ValidationError(f"Bell state index must be 0..3, got {index}")
    amplitudes = np.zeros(4, dtype=complex)
    sign = 1 if index % 2 == 0 else -1
    if index < 2:
        amplitudes[0b00], amplitudes[0b11] = 1, sign
    else:
        amplitudes[0b01], amplitudes[0b10] = 1, sign
    return StateVector(amplitudes / np.sqrt(2), (2, 2))


def _bits_index(bits: tuple[int, int]) -> int:
    if len(bits) != 2 or any(bit not in (0, 1) for bit in bits):
        raise ValidationError(f"expected two bits, got {bits}")
    return bits[0] + 2 * bits[1]


def encoding_unitary(bits: tuple[int, int]) -> np.ndarray:
    return ENCODINGS[_bits_index(bits)]


def encode(bits: tuple[int, int]) -> StateVector:
    operator = np.kron(encoding_unitary(bits), IDENTITY)
    return StateVector(operator @ bell_state(0).amplitudes, (2, 2))


def bell_measurement(state: StateVector) -> np.ndarray:
    """Outcome probabilities of a Bell-basis projection, in the fixed order."""
    return np.array([fidelity(bell_state(index), state) for index in range(4)])


def dense_coding_roundtrip(bits: tuple[int, int]) -> tuple[int, int]:
    probabilities = bell_measurement(encode(bits))
    index = int(np.argmax(probabilities))
    if abs(probabilities[index] - 1) > ALGEBRAIC_TOL:
        raise ValidationError(f"encoded state is not a Bell state: {probabilities}")
    return index % 2, index // 2


def dense_coding_gram() -> np.ndarray:
    """Inner products between the four encoded states."""
    states = [encode(bits).amplitudes for bits in ((0, 0), (1, 0), (0, 1), (1, 1))]
    return np.array([[np.vdot(left, right) for right in states] for left in states])


@dataclass(frozen=True)
class TeleportBranch:
    outcome: int
    probability: float
    fidelity: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "outcome": BELL_LABELS[self.outcome],
            "probability": self.probability,
            "fidelity": self.fidelity,
        }


def _bob_conditional(psi: StateVector, outcome: int) -> np.ndarray:
    """Bob's unnormalized qubit after the sender projects onto Bell state ``outcome``."""
    joint = np.kron(psi.amplitudes, bell_state(0).amplitudes).reshape(4, 2)
    return bell_state(outcome).amplitudes.conj() @ joint


def teleport(psi: StateVector, outcome: int) -> TeleportBranch:
    if psi.dims != (2,):
        raise ValidationError("teleport expects a single qubit")
    if outcome not in range(4):
        raise ValidationError(f"Bell outcome must be 0..3, got {outcome}")
    bob = _bob_conditional(psi, outcome)
    probability = float(np.vdot(bob, bob).real)
    corrected = StateVector.normalized(CORRECTIONS[outcome] @ bob, (2,))
    return TeleportBranch(outcome, probability, fidelity(psi, corrected))


def teleport_all(psi: StateVector) -> list[TeleportBranch]:
    return [teleport(psi, outcome) for outcome in range(4)]


def sender_marginal(psi: StateVector) -> DensityMatrix:
    """Sender's pair after a measurement whose result is not recorded."""
    entries = sum(
        branch.probability * bell_state(branch.outcome).density().entries for branch in teleport_all(psi)
    )
    return DensityMatrix(entries, (2, 2))


def bob_unconditional_state(psi: StateVector) -> DensityMatrix:
    """Bob's qubit before he learns the outcome; maximally mixed for any input."""
    entries = sum(np.outer(bob, bob.conj()) for bob in (_bob_conditional(psi, i) for i in range(4)))
    return DensityMatrix(entries, (2,))


# Operators of the GHZ argument and the eigenvalue each one has on the state.
GHZ_RELATIONS = (("yxx", 1), ("xyx", 1), ("xxy", 1), ("yyy", -1))
_LOCAL = {"x": SIGMA_X, "y": SIGMA_Y}


@dataclass(frozen=True)
class GhzParadoxReport:
    eigen_relations: tuple[bool, ...]
    mermin_value: float
    lr_bound: float
    lr_models: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "eigen_relations": {label: ok for (label, _), ok in zip(GHZ_RELATIONS, self.eigen_relations)},
            "mermin_value": self.mermin_value,
            "lr_bound": self.lr_bound,
            "lr_models": self.lr_models,
        }


def _operator(label: str) -> np.ndarray:
    result = np.array([[1.0 + 0j]])
    for ch in label:
        result = np.kron(result, _LOCAL[ch])
    return result


def ghz_lr_search() -> int:
    """Count predetermined x/y outcomes for three parties that satisfy all four relations."""
    satisfying = 0
    for values in product((1, -1), repeat=6):
        outcome = {"x": values[0::2], "y": values[1::2]}
        if all(
            np.prod([outcome[ch][party] for party, ch in enumerate(label)]) == sign
            for label, sign in GHZ_RELATIONS
        ):
            satisfying += 1
    return satisfying


def ghz_paradox_check() -> GhzParadoxReport:
    # (|000> + i|111>) / sqrt(2)
    psi = ghz_vector(3, np.pi / 2)
    vector = psi.amplitudes
    relations = tuple(
        bool(np.allclose(_operator(label) @ vector, sign * vector, atol=ALGEBRAIC_TOL))
        for label, sign in GHZ_RELATIONS
    )
    mermin_value = sum(sign * expectation(psi, _operator(label)) for label, sign in GHZ_RELATIONS)
    # Settings 1 = x, 2 = y for every party.
    ineq = BellInequality(
        3,
        (2, 2, 2),
        {(2, 1, 1): 1.0, (1, 2, 1): 1.0, (1, 1, 2): 1.0, (2, 2, 2): -1.0},
        2.0,
        label="ghz-mermin",
    )
    return GhzParadoxReport(relations, float(mermin_value), lr_bound_bruteforce(ineq), ghz_lr_search())
