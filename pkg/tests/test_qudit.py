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

import os
import sys

import numpy as np
import pytest

SRC_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

from bellkit import qudit  # noqa: E402
from bellkit.errors import ValidationError  # noqa: E402
from bellkit.qstate import DensityMatrix, StateVector  # noqa: E402


def _random_state(d: int, rng: np.random.Generator) -> StateVector:
    return StateVector.normalized(rng.normal(size=d) + 1j * rng.normal(size=d))


def _random_density(d: int, rng: np.random.Generator) -> DensityMatrix:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, (d,))


def test_qubit_operators_are_paulis() -> None:
    assert np.allclose(qudit.s_operator(2, 1, 0), [[0, 1], [1, 0]])
    assert np.allclose(qudit.s_operator(2, 0, 1), [[1, 0], [0, -1]])
    assert np.allclose(qudit.s_operator(2, 1, 1), [[0, -1], [1, 0]])


@pytest.mark.parametrize("d", [3, 4, 6])
def test_operators_unitary_and_traceless(d: int) -> None:
    for k in range(d):
        for l in range(d):
            matrix = qudit.GenPauli(d, k, l).matrix
            assert np.allclose(matrix.conj().T @ matrix, np.eye(d))
            if (k, l) != (0, 0):
                assert abs(np.trace(matrix)) < 1e-12


def test_invalid_indices() -> None:
    with pytest.raises(ValidationError):
        qudit.s_operator(3, 3, 0)
    with pytest.raises(ValidationError):
        qudit.s_operator(1, 0, 0)
    with pytest.raises(ValidationError):
        qudit.GenPauli(qudit.MAX_DIMENSION + 1, 0, 0)


def test_closed_form_eigensystems() -> None:
    for d in range(2, 13):
        for k in range(d):
            for l in range(d):
                system = qudit.eigensystem(d, k, l)
                assert system.residual < 1e-10
                gram = system.vectors.conj().T @ system.vectors
                assert np.max(np.abs(gram - np.eye(d))) < 1e-10


def test_s43_matches_listed_basis() -> None:
    system = qudit.eigensystem(6, 4, 3)
    assert system.f == 2
    overlaps = np.abs(qudit.printed_s43_basis().conj().T @ system.vectors)
    assert np.allclose(np.sort(overlaps, axis=1)[:, -1], 1.0)
    assert np.allclose(np.sort(overlaps, axis=0)[-1, :], 1.0)
    assert system.column(1, 1) == 4


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_shift_eigenbasis_is_fourier(d: int) -> None:
    system = qudit.eigensystem(d, 1, 0)
    overlaps = np.abs(np.sum(qudit.fourier_basis(d).conj() * system.vectors, axis=0))
    assert np.allclose(overlaps, 1.0)


def test_degenerate_spectrum() -> None:
    system = qudit.eigensystem(4, 2, 0)
    assert system.f == 2
    assert len(np.unique(np.round(system.values, 9))) == 2


def test_mutually_unbiased_bases() -> None:
    for d in (2, 3, 6):
        z = np.eye(d)
        x = qudit.fourier_basis(d)
        assert qudit.mub_check(z, x)
        assert not qudit.mub_check(x, x)
    assert qudit.mub_check(np.eye(2), qudit.eigensystem(2, 1, 1).vectors)
    with pytest.raises(ValidationError):
        qudit.mub_check(np.ones((2, 2)), np.eye(2))
    with pytest.raises(ValidationError):
        qudit.mub_check(np.eye(2), np.eye(3))


@pytest.mark.parametrize("d1, d0", [(2, 2), (3, 2), (2, 3), (4, 2)])
def test_composite_plan_matches_direct_measurement(d1: int, d0: int) -> None:
    plan = qudit.composite_plan(d1, d0)
    rng = np.random.default_rng(d1 * 10 + d0)
    for _ in range(50):
        psi = _random_state(plan.d, rng)
        assert np.allclose(qudit.simulate_plan(plan, psi), qudit.direct_distribution(psi), atol=1e-12)


def test_plan_on_basis_states() -> None:
    plan = qudit.composite_plan(3, 2)
    eigen = StateVector(qudit.fourier_basis(6)[:, 4], (6,))
    distribution = qudit.simulate_plan(plan, eigen)
    assert distribution[4] == pytest.approx(1.0)
    assert plan.outcome(1, 1) == 4
    ground = StateVector(np.eye(6)[0], (6,))
    assert np.allclose(qudit.simulate_plan(plan, ground), np.full(6, 1 / 6))


def test_plan_validation() -> None:
    with pytest.raises(ValidationError):
        qudit.composite_plan(1, 4)
    with pytest.raises(ValidationError):
        qudit.simulate_plan(qudit.composite_plan(2, 2), StateVector(np.eye(6)[0], (6,)))


def test_maximally_mixed_bloch_vector() -> None:
    d = 4
    bloch = qudit.generalized_bloch(DensityMatrix(np.eye(d) / d, (d,)))
    assert bloch[0, 0] == pytest.approx(1.0)
    assert all(abs(value) < 1e-12 for key, value in bloch.items() if key != (0, 0))


def test_ground_state_bloch_vector() -> None:
    bloch = qudit.generalized_bloch(StateVector(np.eye(3)[0], (3,)))
    for l in range(3):
        assert bloch[0, l] == pytest.approx(1.0)
    assert abs(bloch[1, 0]) < 1e-12


def test_probabilities_reproduce_bloch_vector() -> None:
    rho = _random_density(3, np.random.default_rng(11))
    direct = qudit.generalized_bloch(rho)
    measured = qudit.bloch_from_probabilities(qudit.measurement_probabilities(rho))
    for key, value in direct.items():
        assert measured[key] == pytest.approx(value, abs=1e-10)


def test_tomography_round_trip() -> None:
    rng = np.random.default_rng(5)
    for _ in range(5):
        rho = _random_density(4, rng)
        rebuilt = qudit.tomography_coefficients(qudit.measurement_probabilities(rho))
        assert np.max(np.abs(rebuilt.entries - rho.entries)) < 1e-9


def test_tomography_needs_every_measurement() -> None:
    probabilities = qudit.measurement_probabilities(DensityMatrix(np.eye(3) / 3, (3,)))
    del probabilities[2, 1]
    with pytest.raises(ValidationError):
        qudit.tomography_coefficients(probabilities)
    with pytest.raises(ValidationError):
        qudit.tomography_coefficients({})
