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

"""Generalized Pauli operators S_kl = S_x^k S_z^l on a d-level system.

Eigenvectors are built in closed form: each one lives on the orbit
{a, a + k, a + 2k, ...} of S_z basis states, so the basis splits into
f = gcd(k, d) groups of n = d / f vectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .config import ALGEBRAIC_TOL, COEFFICIENT_TOL
from .errors import ConstructionError, ValidationError
from .qstate import DensityMatrix, StateVector

LOGGER = logging.getLogger("bellkit.qudit")

MAX_DIMENSION = 64


def alpha(d: int) -> complex:
    """Primitive d-th root of unity exp(2 pi i / d)."""
    return complex(np.exp(2j * np.pi / d))


def _check_indices(d: int, k: int, l: int) -> None:
    if not 2 <= d <= MAX_DIMENSION:
        raise ValidationError(f"dimension must lie in [2, {MAX_DIMENSION}], got {d}")
    if not (0 <= k < d and 0 <= l < d):
        raise ValidationError(f"indices (k, l) = ({k}, {l}) must lie in [0, {d})")


def s_operator(d: int, k: int, l: int) -> np.ndarray:
    """[S_kl]_{rm} = delta_{r-k, m} alpha_d^{ml}, indices mod d."""
    _check_indices(d, k, l)
    matrix = np.zeros((d, d), dtype=complex)
    for m in range(d):
        matrix[(m + k) % d, m] = alpha(d) ** ((m * l) % d)
    return matrix


@dataclass(frozen=True)
class GenPauli:
    d: int
    k: int
    l: int

    def __post_init__(self) -> None:
        _check_indices(self.d, self.k, self.l)

    @property
    def matrix(self) -> np.ndarray:
        return s_operator(self.d, self.k, self.l)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    d: int
    k: int
    l: int
    vectors: np.ndarray
    values: np.ndarray
    f: int
    phase: complex

    @property
    def residual(self) -> float:
        operator = s_operator(self.d, self.k, self.l)
        return float(np.max(np.abs(operator @ self.vectors - self.vectors * self.values)))

    def column(self, group: int, offset: int) -> int:
        """Column of |j_{g,a}>: groups of d/f vectors per offset a."""
        return offset * (self.d // self.f) + group

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "k": self.k,
            "l": self.l,
            "f": self.f,
            "phase": self.phase,
            "values": self.values,
            "vectors": self.vectors.T,
            "residual": self.residual,
        }


def eigensystem(d: int, k: int, l: int) -> EigenSystem:
    """Closed-form eigenvectors |j_{g,a}> and eigenvalues of S_kl.

    The common phase is the principal n-th root of
    alpha_d^{n(n-1)kl/2}; the other eigenvalues follow as
    lambda_{g,a} = phase * alpha_n^g * alpha_d^{al}.
    """
    _check_indices(d, k, l)
    f = gcd(k, d)
    n = d // f
    exponent = (n * (n - 1) * k * l // 2) % d
    phase = complex(np.exp(2j * np.pi * exponent / (d * n)))
    vectors = np.zeros((d, d), dtype=complex)
    values = np.zeros(d, dtype=complex)
    eta = np.arange(n)
    twist = alpha(d) ** ((eta * (eta - 1) // 2 * k * l) % d)
    for a in range(f):
        positions = (a + eta * k) % d
        for g in range(n):
            base = phase * alpha(n) ** g
            column = a * n + g
            vectors[positions, column] = base ** (-eta) * twist / np.sqrt(n)
            values[column] = base * alpha(d) ** ((a * l) % d)
    system = EigenSystem(d, k, l, vectors, values, f, phase)
    residual = system.residual
    if residual > ALGEBRAIC_TOL:
        raise ConstructionError(f"eigensystem of S_{k}{l} for d={d} has residual {residual:.3e}")
    unitarity = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(d))))
    if unitarity > ALGEBRAIC_TOL:
        raise ConstructionError(f"eigenvectors of S_{k}{l} for d={d} are not orthonormal ({unitarity:.3e})")
    return system


def fourier_basis(d: int) -> np.ndarray:
    """|j>_x = (1/sqrt d) sum_kappa alpha_d^{-kappa j} |kappa>_z as columns."""
    kappa = np.arange(d)
    return alpha(d) ** (-np.outer(kappa, kappa) % d) / np.sqrt(d)


def _require_unitary(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"{name} must be a square matrix")
    if np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))) > COEFFICIENT_TOL:
        raise ValidationError(f"{name} is not unitary")
    return matrix


def mub_check(first: np.ndarray, second: np.ndarray) -> bool:
    """True iff every overlap between the two bases has modulus 1/sqrt(d)."""
    first = _require_unitary(first, "first basis")
    second = _require_unitary(second, "second basis")
    if first.shape != second.shape:
        raise ValidationError("bases have different dimensions")
    d = first.shape[0]
    overlaps = np.abs(first.conj().T @ second)
    return bool(np.all(np.abs(overlaps - 1 / np.sqrt(d)) <= COEFFICIENT_TOL))


@dataclass(frozen=True, eq=False)
class MeasurementPlan:
    """Feed-forward measurement of |j>_x on |kappa> = |kappa_1>|kappa_0>, kappa = d0 kappa_1 + kappa_0.

    Stage one measures the first subsystem and yields j1; stage two measures
    the second subsystem in the basis selected by j1 and yields j0. The
    combined outcome is j = j1 + d1 j0.
    """

    d1: int
    d0: int
    stage1_basis: np.ndarray
    stage2_bases: tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return self.d1 * self.d0

    def outcome(self, j1: int, j0: int) -> int:
        return j1 + self.d1 * j0

    def to_dict(self) -> dict[str, Any]:
        return {
            "d1": self.d1,
            "d0": self.d0,
            "stage1_basis": self.stage1_basis.T,
            "stage2_bases": {str(j1): basis.T for j1, basis in enumerate(self.stage2_bases)},
        }


def composite_plan(d1: int, d0: int) -> MeasurementPlan:
    if d1 < 2 or d0 < 2:
        raise ValidationError("both subsystem dimensions must be at least 2")
    d = d1 * d0
    kappa0 = np.arange(d0)
    stage2 = []
    for j1 in range(d1):
        outcomes = j1 + d1 * np.arange(d0)
        stage2.append(alpha(d) ** (-np.outer(kappa0, outcomes) % d) / np.sqrt(d0))
    return MeasurementPlan(d1, d0, fourier_basis(d1), tuple(stage2))


def simulate_plan(plan: MeasurementPlan, psi: StateVector) -> np.ndarray:
    """Outcome distribution over j produced by running the plan on ``psi``."""
    if psi.dim != plan.d:
        raise ValidationError(f"state of dimension {psi.dim} does not match the plan dimension {plan.d}")
    amplitudes = np.asarray(psi.amplitudes).reshape(plan.d1, plan.d0)
    conditioned = plan.stage1_basis.conj().T @ amplitudes
    probabilities = np.zeros(plan.d)
    for j1 in range(plan.d1):
        second = plan.stage2_bases[j1].conj().T @ conditioned[j1]
        for j0, amplitude in enumerate(second):
            probabilities[plan.outcome(j1, j0)] = abs(amplitude) ** 2
    return probabilities


def direct_distribution(psi: StateVector, k: int = 1, l: int = 0) -> np.ndarray:
    system = eigensystem(psi.dim, k, l)
    return np.abs(system.vectors.conj().T @ np.asarray(psi.amplitudes)) ** 2


Distributions = Mapping[tuple[int, int], Sequence[float]]


def _as_density(rho: Union[DensityMatrix, StateVector]) -> DensityMatrix:
    return rho.density() if isinstance(rho, StateVector) else rho


def measurement_probabilities(rho: Union[DensityMatrix, StateVector]) -> dict[tuple[int, int], np.ndarray]:
    """Outcome distribution of every S_kl eigenbasis measurement, (k, l) != (0, 0)."""
    rho = _as_density(rho)
    d = rho.dim
    distributions = {}
    for k in range(d):
        for l in range(d):
            if k == 0 and l == 0:
                continue
            vectors = eigensystem(d, k, l).vectors
            distributions[k, l] = np.real(np.einsum("ij,ik,kj->j", vectors.conj(), rho.entries, vectors))
    return distributions


def generalized_bloch(rho: Union[DensityMatrix, StateVector]) -> dict[tuple[int, int], complex]:
    """s_kl = Tr(S_kl^dagger rho) for every (k, l)."""
    rho = _as_density(rho)
    d = rho.dim
    return {
        (k, l): complex(np.trace(s_operator(d, k, l).conj().T @ rho.entries))
        for k in range(d)
        for l in range(d)
    }


def bloch_from_probabilities(probabilities: Distributions) -> dict[tuple[int, int], complex]:
    """s_kl = sum_j lambda_j^* p_j; s_00 = 1."""
    if not probabilities:
        raise ValidationError("no measurement distributions given")
    d = len(next(iter(probabilities.values())))
    missing = [(k, l) for k in range(d) for l in range(d) if (k, l) != (0, 0) and (k, l) not in probabilities]
    if missing:
        raise ValidationError(f"missing distributions for {missing[:4]}{'...' if len(missing) > 4 else ''}")
    coefficients: dict[tuple[int, int], complex] = {(0, 0): 1.0 + 0j}
    for (k, l), distribution in probabilities.items():
        distribution = np.asarray(distribution, dtype=float)
        if distribution.shape != (d,):
            raise ValidationError(f"distribution for ({k}, {l}) has {distribution.size} outcomes, expected {d}")
        values = eigensystem(d, k, l).values
        coefficients[k, l] = complex(np.sum(values.conj() * distribution))
    return coefficients


def tomography_coefficients(probabilities: Distributions) -> DensityMatrix:
    """Reconstruct rho = (1/d) sum_kl s_kl S_kl from the S_kl measurement statistics."""
    coefficients = bloch_from_probabilities(probabilities)
    d = len(next(iter(probabilities.values())))
    entries = sum(value * s_operator(d, k, l) for (k, l), value in coefficients.items()) / d
    # Clean the anti-Hermitian rounding left by the sum.
    entries = 0.5 * (entries + entries.conj().T)
    return DensityMatrix(entries, (d,))


def printed_s43_basis() -> np.ndarray:
    """The six d = 6 eigenvectors of S_43 in their conventional listing, as columns |0>..|5>."""
    w = alpha(3)
    columns = [
        [1, 0, 1, 0, 1, 0],
        [0, 1, 0, w**2, 0, w],
        [1, 0, w, 0, w**2, 0],
        [0, 1, 0, 1, 0, 1],
        [1, 0, w**2, 0, w, 0],
        [0, 1, 0, w, 0, w**2],
    ]
    return np.array(columns, dtype=complex).T / np.sqrt(3)
