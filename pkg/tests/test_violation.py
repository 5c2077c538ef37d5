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

from bellkit import violation  # noqa: E402
from bellkit.config import OptimizerConfig  # noqa: E402
from bellkit.errors import ValidationError  # noqa: E402
from bellkit.qstate import (  # noqa: E402
    CorrelationTensor,
    NamedStateSpec,
    StateVector,
    correlation_tensor,
    ghz_vector,
    make_state,
    rotate_tensor,
)

FAST = OptimizerConfig(restarts=1)
SEARCH = OptimizerConfig(restarts=8, seed=7)
THOROUGH = OptimizerConfig(restarts=16, seed=5, value_tol=1e-10)
PARTY_FRAMES = ([0.3, 1.1, -0.4], [2.0, 0.2, 0.9], [-1.3, 2.4, 0.6])


def tensor_of(spec: NamedStateSpec) -> CorrelationTensor:
    return correlation_tensor(make_state(spec), spec.n_parties)


def white_noise(parties: int) -> CorrelationTensor:
    values = np.zeros((4,) * parties)
    values[(0,) * parties] = 1.0
    return CorrelationTensor(values)


def test_horodecki_singlet() -> None:
    result = violation.horodecki_result(NamedStateSpec.singlet())
    assert result.value == pytest.approx(2.0, abs=1e-10)
    assert result.extras["max_chsh"] == pytest.approx(2 * np.sqrt(2), abs=1e-10)
    assert result.violated
    for frame in result.frames.frames:
        assert np.linalg.det(frame.rotation) == pytest.approx(1.0)


def test_horodecki_product_state() -> None:
    product = StateVector(np.array([1, 0, 0, 0]), (2, 2))
    assert violation.horodecki_value(product) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 0.4, np.pi / 4])
def test_horodecki_generalized_ghz(alpha: float) -> None:
    value = violation.horodecki_value(NamedStateSpec.generalized_ghz(2, alpha))
    assert value == pytest.approx(1 + np.sin(2 * alpha) ** 2, abs=1e-10)
    assert 2 * np.sqrt(value) == pytest.approx(violation.gisin_chsh(alpha), abs=1e-10)


def test_horodecki_needs_two_parties() -> None:
    with pytest.raises(ValidationError):
        violation.horodecki_value(NamedStateSpec.ghz(3))


def test_horodecki_frame_invariance() -> None:
    T = tensor_of(NamedStateSpec.noisy(NamedStateSpec.generalized_ghz(2, 0.3), 0.8))
    first = violation.LocalFrame.from_euler([0.3, 1.1, -0.4]).rotation
    second = violation.LocalFrame.from_euler([2.0, 0.2, 0.9]).rotation
    rotated = rotate_tensor(T, [first, second])
    assert violation.horodecki_value(rotated) == pytest.approx(violation.horodecki_value(T), abs=1e-10)


def test_conditions_scale_quadratically_with_visibility() -> None:
    T = tensor_of(NamedStateSpec.singlet())
    for visibility in (0.3, 0.7, 1.0):
        assert violation.horodecki_value(T.scaled(visibility)) == pytest.approx(2 * visibility**2, abs=1e-10)


def rotated(T: CorrelationTensor) -> CorrelationTensor:
    frames = [violation.LocalFrame.from_euler(angles).rotation for angles in PARTY_FRAMES[: T.parties]]
    return rotate_tensor(T, frames)


@pytest.mark.parametrize(
    "spec",
    [NamedStateSpec.w(3), NamedStateSpec.noisy(NamedStateSpec.generalized_ghz(3, 0.4), 0.8)],
    ids=["w3", "noisy-generalized-ghz3"],
)
@pytest.mark.parametrize("condition", ["wwzb", "cn", "msetting"])
def test_conditions_are_frame_invariant(spec: NamedStateSpec, condition: str) -> None:
    T = tensor_of(spec)
    plain = violation.evaluate_condition(T, condition, 2, THOROUGH)
    turned = violation.evaluate_condition(rotated(T), condition, 2, THOROUGH)
    assert turned.value == pytest.approx(plain.value, abs=1e-6)


def test_wwzb_reaches_every_plane_of_a_rotated_w_state() -> None:
    T = rotated(tensor_of(NamedStateSpec.w(3)))
    assert violation.wwzb_sufficient(T, THOROUGH).value == pytest.approx(7 / 3, abs=1e-6)
    # 0.49 * 7/3 > 1, so a rotated noisy W state at V = 0.7 is not certified local
    noisy = violation.wwzb_sufficient(T.scaled(0.7), THOROUGH)
    assert noisy.value == pytest.approx(0.49 * 7 / 3, abs=1e-6)
    assert noisy.violated


@pytest.mark.parametrize("visibility", [0.3, 0.7, 1.0])
@pytest.mark.parametrize(
    "condition, spec, power",
    [
        ("horodecki", NamedStateSpec.noisy(NamedStateSpec.generalized_ghz(2, 0.3), 0.9), 2),
        ("wwzb", NamedStateSpec.w(3), 2),
        ("cn", NamedStateSpec.w(3), 2),
        ("msetting", NamedStateSpec.ghz(3), 1),
    ],
)
def test_every_condition_is_homogeneous_in_visibility(
    condition: str, spec: NamedStateSpec, power: int, visibility: float
) -> None:
    T = tensor_of(spec)
    full = violation.evaluate_condition(T, condition, 2, THOROUGH).value
    scaled = violation.evaluate_condition(T.scaled(visibility), condition, 2, THOROUGH).value
    assert scaled == pytest.approx(visibility**power * full, abs=1e-6)


@pytest.mark.parametrize(
    "spec",
    [
        NamedStateSpec.ghz(3),
        NamedStateSpec.generalized_ghz(3, 0.3),
        NamedStateSpec.noisy(NamedStateSpec.w(3), 0.8),
    ],
    ids=["ghz3", "generalized-ghz3", "noisy-w3"],
)
def test_cn_is_never_below_wwzb(spec: NamedStateSpec) -> None:
    T = tensor_of(spec)
    cn = violation.cn_condition(T, THOROUGH)
    wwzb = violation.wwzb_sufficient(T, THOROUGH)
    assert cn.value >= wwzb.value - 1e-6


def test_wwzb_ghz_three_qubits() -> None:
    result = violation.wwzb_sufficient(NamedStateSpec.ghz(3), FAST)
    assert result.value == pytest.approx(4.0, abs=1e-9)
    assert violation.visibility_from_result(result) == pytest.approx(0.5, abs=1e-9)


def test_wwzb_white_noise() -> None:
    assert violation.wwzb_sufficient(white_noise(3), FAST).value == pytest.approx(0.0, abs=1e-12)


def test_generalized_ghz_separates_the_two_conditions() -> None:
    alpha = 0.5 * np.arcsin(0.3)
    spec = NamedStateSpec.generalized_ghz(3, alpha)
    wwzb = violation.wwzb_sufficient(spec, SEARCH)
    assert wwzb.value <= 1 + 1e-6
    cn = violation.cn_condition(spec, SEARCH)
    assert cn.value == pytest.approx(2 * 0.3**2 + (1 - 0.3**2), abs=1e-5)
    assert cn.violated


def test_cn_two_parties_is_the_two_qubit_criterion() -> None:
    result = violation.cn_condition(NamedStateSpec.singlet())
    assert result.condition == "cn"
    assert result.value == pytest.approx(2.0, abs=1e-10)


def test_cn_frame_count() -> None:
    assert [violation.cn_frame_count(n) for n in (2, 3, 4, 5)] == [0, 1, 3, 7]


def test_cn_wz_state() -> None:
    result = violation.cn_condition(NamedStateSpec.wz_four_qubit(), OptimizerConfig(restarts=16, seed=3))
    assert result.value == pytest.approx(4.0, abs=1e-5)
    assert result.violation_factor == pytest.approx(2.0, abs=1e-5)
    assert violation.visibility_from_result(result) == pytest.approx(0.5, abs=1e-5)
    assert len(result.frames.frames) == 1
    assert len(result.frames.primed) == 2


def test_cn_w_state_and_threshold() -> None:
    spec = NamedStateSpec.w(3)
    cn = violation.cn_condition(spec, SEARCH)
    assert cn.value >= 7 / 3 - 1e-5
    assert violation.visibility_from_result(cn) == pytest.approx(1 / np.sqrt(7 / 3), abs=1e-3)
    wwzb = violation.wwzb_sufficient(spec, SEARCH)
    assert cn.value >= wwzb.value - 1e-5


def test_cn_party_limit() -> None:
    with pytest.raises(ValidationError):
        violation.cn_condition(white_noise(7))


@pytest.mark.parametrize("parties", [2, 3, 4, 5])
def test_ms_violation_ghz_two_settings(parties: int) -> None:
    result = violation.ms_violation(NamedStateSpec.ghz(parties), 2, FAST)
    assert result.violation_factor == pytest.approx(2 ** ((parties - 1) / 2), abs=1e-4)


@pytest.mark.parametrize("parties", [2, 3, 4, 5])
def test_ms_violation_ghz_three_settings(parties: int) -> None:
    result = violation.ms_violation(NamedStateSpec.ghz(parties), 3, FAST)
    assert result.violation_factor == pytest.approx(1.5**parties / np.sqrt(3), abs=1e-4)


@pytest.mark.parametrize("parties, settings", [(2, 4), (3, 5), (4, 4)])
def test_ms_violation_matches_closed_form(parties: int, settings: int) -> None:
    result = violation.ms_violation(NamedStateSpec.ghz(parties), settings, FAST)
    assert result.violation_factor == pytest.approx(violation.ghz_violation_factor(parties, settings), abs=1e-4)
    assert result.extras["lhs"] == pytest.approx(settings**parties / 2, abs=1e-6)


def test_ms_violation_at_fixed_frames() -> None:
    result = violation.ms_violation(NamedStateSpec.ghz(3), 2, optimize_frames=False)
    assert result.value == pytest.approx(4.0, abs=1e-10)
    assert result.bound == pytest.approx(2.0, abs=1e-10)


def test_violation_factor_trend_in_settings() -> None:
    for parties in (2, 3):
        factors = [violation.ghz_violation_factor(parties, m) for m in range(2, 7)]
        assert all(later < earlier for earlier, later in zip(factors, factors[1:]))
    for parties in (4, 5):
        factors = [violation.ghz_violation_factor(parties, m) for m in range(2, 7)]
        assert all(later > earlier for earlier, later in zip(factors, factors[1:]))


def test_generalized_ghz_factor_reduces_to_ghz() -> None:
    assert violation.generalized_ghz_violation_factor(4, 3, np.pi / 4) == pytest.approx(
        violation.ghz_violation_factor(4, 3)
    )


def test_dur_thresholds() -> None:
    assert violation.dur_violation_factor(6, 5, tuned=True) == pytest.approx(1.022, abs=1e-3)
    assert violation.dur_violation_factor(6, 4, tuned=True) == pytest.approx(0.9946, abs=1e-3)
    assert violation.dur_violation_factor(6, 4, tuned=True) < 1
    assert violation.dur_violation_factor(8, 2, tuned=True) == pytest.approx(1.257, abs=1e-3)


def test_dur_state_reaches_the_closed_form() -> None:
    result = violation.ms_violation(NamedStateSpec.dur(4), 2, FAST)
    assert result.violation_factor >= violation.dur_violation_factor(4, 2) - 1e-9


@pytest.mark.parametrize("parties, settings", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_bell_operator_identities(parties: int, settings: int) -> None:
    B = violation.msetting_bell_operator(parties, settings)
    B_ghz = violation.ghz_bell_operator(parties, settings)
    expected = settings ** (2 * parties) / 2
    assert np.trace(B_ghz @ B).real == pytest.approx(expected, rel=1e-6)
    assert np.trace(B @ B).real == pytest.approx(expected, rel=1e-6)
    assert np.trace(B_ghz @ B_ghz).real == pytest.approx(expected, rel=1e-6)
    plus = ghz_vector(parties).amplitudes
    minus = ghz_vector(parties, np.pi).amplitudes
    assert np.vdot(plus, B_ghz @ plus).real == pytest.approx(settings**parties / 2)
    assert np.vdot(minus, B_ghz @ minus).real == pytest.approx(-(settings**parties) / 2)


def test_critical_visibility_methods_agree() -> None:
    spec = NamedStateSpec.singlet()
    assert violation.critical_visibility(spec, "horodecki") == pytest.approx(1 / np.sqrt(2), abs=1e-9)
    assert violation.critical_visibility(spec, "horodecki", method="bisection") == pytest.approx(
        1 / np.sqrt(2), abs=1e-6
    )
    ghz = NamedStateSpec.ghz(3)
    assert violation.critical_visibility(ghz, "msetting", settings=2, config=FAST) == pytest.approx(0.5, abs=1e-6)
    assert violation.critical_visibility(white_noise(2), "horodecki", method="bisection") == float("inf")


def test_wwzb_exact_ghz_and_product_state() -> None:
    ghz = violation.wwzb_exact(NamedStateSpec.ghz(3), FAST)
    assert ghz.value >= np.sqrt(2) - 1e-9
    assert ghz.violated
    product = violation.wwzb_exact(StateVector(np.array([1, 0, 0, 0]), (2, 2)), SEARCH)
    assert product.value <= 1 + 1e-6


def test_optimization_is_reproducible() -> None:
    spec = NamedStateSpec.w(3)
    first = violation.cn_condition(spec, OptimizerConfig(restarts=3, seed=99))
    second = violation.cn_condition(spec, OptimizerConfig(restarts=3, seed=99))
    assert first.value == second.value
    for left, right in zip(first.frames.frames + first.frames.primed, second.frames.frames + second.frames.primed):
        assert np.array_equal(left.rotation, right.rotation)


def test_evaluate_condition_dispatch() -> None:
    result = violation.evaluate_condition(NamedStateSpec.ghz(3), "msetting", settings=2, config=FAST, state="ghz")
    assert result.condition == "msetting"
    assert result.to_dict()["state"] == "ghz"
    with pytest.raises(ValidationError):
        violation.evaluate_condition(NamedStateSpec.ghz(3), "msetting")
    with pytest.raises(ValidationError):
        violation.evaluate_condition(NamedStateSpec.ghz(3), "chained")


def test_local_frame_rejects_reflections() -> None:
    with pytest.raises(ValidationError):
        violation.LocalFrame(np.diag([1.0, 1.0, -1.0]))
    assert np.allclose(violation.LocalFrame.identity().axis(2), [0, 0, 1])


def test_ms_value_at_identity_frames() -> None:
    ghz = correlation_tensor(make_state(NamedStateSpec.ghz(3)), 3)
    assert violation.ms_value_at_frames(ghz, 2) == pytest.approx(4.0)
    assert violation.ms_value_at_frames(ghz.scaled(0.5), 2) == pytest.approx(2.0)
