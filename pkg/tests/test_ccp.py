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

from bellkit import ccp  # noqa: E402
from bellkit.config import OptimizerConfig  # noqa: E402
from bellkit.errors import GuardError, ValidationError  # noqa: E402

CGLMP_CONFIG = OptimizerConfig(restarts=2, seed=11)


@pytest.fixture(scope="module")
def cglmp3() -> ccp.CglmpResult:
    return ccp.cglmp_optimize(3, CGLMP_CONFIG)


@pytest.mark.parametrize(
    "parties, settings, ratio",
    [(2, 2, 1.1381), (3, 2, 1.3333), (4, 3, 1.4395), (5, 2, 1.6000)],
)
def test_qubit_advantage_ratios(parties: int, settings: int, ratio: float) -> None:
    quantum = ccp.qubit_ccp_success(parties, settings, "quantum_ghz")
    classical = ccp.qubit_ccp_success(parties, settings, "classical_optimal")
    assert quantum / classical == pytest.approx(ratio, abs=5e-4)


def test_two_party_classical_success() -> None:
    assert ccp.qubit_ccp_success(2, 2, "classical_optimal") == pytest.approx(0.75)
    assert ccp.qubit_ccp_success(2, 2, "quantum_ghz") == pytest.approx(0.5 + np.sqrt(2) / 4)


@pytest.mark.parametrize("parties, settings, factor", [(2, 2, np.sqrt(2)), (3, 2, 2.0), (4, 2, 2 * np.sqrt(2))])
def test_success_margin_tracks_violation_factor(parties: int, settings: int, factor: float) -> None:
    quantum = 2 * ccp.qubit_ccp_success(parties, settings) - 1
    classical = 2 * ccp.qubit_ccp_success(parties, settings, "classical_optimal") - 1
    assert quantum / classical == pytest.approx(factor, abs=1e-9)


def test_success_probabilities_in_range() -> None:
    for row in ccp.advantage_table([2, 3, 4], [2, 3]):
        assert 0.5 <= row["p_classical"] <= row["p_quantum"] <= 1.0 + 1e-12
        assert row["ratio"] >= 1.0
    assert ccp.weight_normalization(3, 2) == pytest.approx(4.0)


def test_qubit_guards() -> None:
    with pytest.raises(GuardError):
        ccp.qubit_ccp_success(2, 1001)
    with pytest.raises(ValidationError):
        ccp.QubitCcpInstance(1, 2)
    with pytest.raises(ValidationError):
        ccp.qubit_ccp_success(2, 2, "oracle")


@pytest.mark.parametrize("d", range(3, 9))
def test_intuitive_classical_protocol(d: int) -> None:
    assert ccp.qudit_ccp_delta(ccp.intuitive_classical_strategy(d)) == pytest.approx(0.5)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_classical_protocols_bounded(d: int) -> None:
    assert ccp.classical_delta_max(d) == pytest.approx(ccp.CLASSICAL_DELTA_BOUND)
    rng = np.random.default_rng(d)
    worst = max(ccp.qudit_ccp_delta(ccp.random_classical_strategy(d, rng, 4)) for _ in range(3000))
    assert worst <= ccp.CLASSICAL_DELTA_BOUND + 1e-12


def test_delta_is_a_quarter_of_cglmp_value() -> None:
    rng = np.random.default_rng(2)
    for d in (3, 4, 6):
        for _ in range(20):
            table = ccp.random_classical_strategy(d, rng).table()
            delta = ccp.qudit_ccp_delta_from_table(table)
            assert delta == pytest.approx(ccp.cglmp_value(ccp.to_cglmp_labels(table)) / 4, abs=1e-12)


def test_cglmp_local_bound_of_deterministic_tables() -> None:
    table = ccp.intuitive_classical_strategy(3).table()
    assert ccp.cglmp_value(ccp.to_cglmp_labels(table)) == pytest.approx(2.0)


def test_cglmp_optimum_three_outcomes(cglmp3: ccp.CglmpResult) -> None:
    assert cglmp3.value == pytest.approx(2.9149, abs=2e-3)
    assert ccp.cglmp_value(cglmp3.table()) == pytest.approx(cglmp3.value, abs=1e-9)
    schmidt = cglmp3.schmidt_coefficients
    assert np.max(schmidt) - np.min(schmidt) > 0.05


def test_cglmp_maximally_entangled(cglmp3: ccp.CglmpResult) -> None:
    result = ccp.cglmp_optimize(3, CGLMP_CONFIG, maximally_entangled_only=True)
    assert result.value == pytest.approx(2.8729, abs=2e-3)
    assert result.value < cglmp3.value
    assert np.allclose(result.schmidt_coefficients, 1 / np.sqrt(3))


def test_quantum_protocol_delta(cglmp3: ccp.CglmpResult) -> None:
    strategy = ccp.strategy_from_cglmp(cglmp3)
    delta = ccp.qudit_ccp_delta(strategy)
    assert delta == pytest.approx(cglmp3.value / 4, abs=1e-9)
    assert delta == pytest.approx(0.7287, abs=1e-3)
    assert np.allclose(ccp.to_cglmp_labels(strategy.table()), cglmp3.table(), atol=1e-12)


def test_canonical_bell_operator_is_hermitian() -> None:
    operator = ccp.cglmp_bell_operator(4, ccp.cglmp_bases(ccp.canonical_phases(4)))
    assert np.allclose(operator, operator.conj().T)
    for basis in ccp.cglmp_bases(ccp.canonical_phases(4)):
        assert np.allclose(basis.conj().T @ basis, np.eye(4))


def test_qudit_validation() -> None:
    with pytest.raises(ValidationError):
        ccp.cglmp_optimize(9)
    with pytest.raises(ValidationError):
        ccp.cglmp_coefficients(1)
    with pytest.raises(ValidationError):
        ccp.cglmp_value(np.ones((2, 2, 3, 3)))
    with pytest.raises(ValidationError):
        ccp.QuditCcpStrategy("classical", 3, np.zeros((1, 2)), np.zeros((1, 2)), np.array([0.5]))
    with pytest.raises(ValidationError):
        ccp.QuditCcpStrategy("oracle", 3)
    with pytest.raises(ValidationError):
        ccp.cglmp_bell_operator(3, ())
