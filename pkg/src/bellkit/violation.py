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

"""Violation conditions maximized over local coordinate frames.

A frame is a rotation whose columns are the party's new x, y, z axes, built
from intrinsic ZYZ Euler angles. Every optimizing condition is a heuristic maximum
found by seeded coordinate search with random restarts (restart 0 starts
from the identity frames).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy.optimize import bisect
from scipy.spatial.transform import Rotation

from .bellgen import msetting_angles, msetting_bound, msetting_inequality
from .config import ALGEBRAIC_TOL, OptimizerConfig
from .errors import ValidationError
from .optimize import maximize
from .qstate import (
    PAULI,
    CorrelationTensor,
    DensityMatrix,
    NamedStateSpec,
    StateVector,
    correlation_tensor,
    ghz_vector,
    make_state,
)

LOGGER = logging.getLogger("bellkit.violation")

CONDITIONS = ("horodecki", "wwzb", "wwzb_exact", "cn", "msetting")
# Degree of homogeneity of each condition value in the visibility.
_HOMOGENEITY = {"horodecki": 2, "wwzb": 2, "cn": 2, "wwzb_exact": 1, "msetting": 1}
MAX_CN_PARTIES = 6

StateLike = Union[CorrelationTensor, DensityMatrix, StateVector, NamedStateSpec]


@dataclass(frozen=True, eq=False)
class LocalFrame:
    rotation: np.ndarray

    def __post_init__(self) -> None:
        rotation = np.asarray(self.rotation, dtype=float)
        if rotation.shape != (3, 3):
            raise ValidationError("a local frame is a 3x3 rotation")
        if np.max(np.abs(rotation.T @ rotation - np.eye(3))) > 1e-9 or np.linalg.det(rotation) < 0:
            raise ValidationError("local frame is not a proper rotation")
        object.__setattr__(self, "rotation", rotation)

    @classmethod
    def from_euler(cls, angles: Sequence[float]) -> "LocalFrame":
        return cls(Rotation.from_euler("ZYZ", list(angles)).as_matrix())

    @classmethod
    def identity(cls) -> "LocalFrame":
        return cls(np.eye(3))

    def axis(self, index: int) -> np.ndarray:
        return self.rotation[:, index]


@dataclass(frozen=True)
class FrameSet:
    frames: tuple[LocalFrame, ...]
    primed: tuple[LocalFrame, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"frames": [frame.rotation for frame in self.frames]}
        if self.primed:
            payload["primed"] = [frame.rotation for frame in self.primed]
        return payload


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    value: float
    bound: float
    violation_factor: float
    frames: FrameSet
    seed: Optional[int] = None
    restarts: int = 0
    converged: bool = True
    state: str = ""
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.value > self.bound + ALGEBRAIC_TOL

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "condition": self.condition,
            "state": self.state,
            "value": self.value,
            "bound": self.bound,
            "violation_factor": self.violation_factor,
            "frames": self.frames.to_dict(),
            "seed": self.seed,
            "restarts": self.restarts,
            "converged": self.converged,
        }
        payload.update(self.extras)
        return payload


def as_tensor(state: StateLike) -> CorrelationTensor:
    if isinstance(state, CorrelationTensor):
        return state
    if isinstance(state, NamedStateSpec):
        return correlation_tensor(make_state(state), state.n_parties)
    return correlation_tensor(state, len(state.dims))


def _frame_matrix(angles: np.ndarray) -> np.ndarray:
    return Rotation.from_euler("ZYZ", angles).as_matrix()


def _frames(params: np.ndarray, count: int, per_frame: int = 3) -> list[np.ndarray]:
    matrices = []
    for index in range(count):
        angles = np.zeros(3)
        angles[:per_frame] = params[index * per_frame : (index + 1) * per_frame]
        matrices.append(_frame_matrix(angles))
    return matrices


def _frame_set(matrices: Sequence[np.ndarray], primed: Sequence[np.ndarray] = ()) -> FrameSet:
    return FrameSet(tuple(LocalFrame(m) for m in matrices), tuple(LocalFrame(m) for m in primed))


def _contract(block: np.ndarray, operators: Sequence[np.ndarray]) -> np.ndarray:
    """Apply one (rows x 3) operator per party axis."""
    for axis, operator in enumerate(operators):
        block = np.moveaxis(np.tensordot(operator, block, axes=(1, axis)), 0, axis)
    return block


def _top_two(blocks: np.ndarray) -> float:
    singular = np.linalg.svd(blocks, compute_uv=False)
    return float(np.sum(singular[..., 0] ** 2 + singular[..., 1] ** 2))


def horodecki_value(T: StateLike) -> float:
    """Sum of the two largest eigenvalues of T^T T over the 3x3 correlation block."""
    tensor = as_tensor(T)
    if tensor.parties != 2:
        raise ValidationError("the two-qubit criterion needs exactly two parties")
    return _top_two(tensor.full)


def horodecki_result(T: StateLike, state: str = "") -> ConditionResult:
    tensor = as_tensor(T)
    value = horodecki_value(tensor)
    u, _, vh = np.linalg.svd(tensor.full)
    frames = [_proper(u), _proper(vh.T)]
    return ConditionResult(
        condition="horodecki",
        value=value,
        bound=1.0,
        violation_factor=float(np.sqrt(value)),
        frames=_frame_set(frames),
        state=state,
        extras={"max_chsh": 2 * float(np.sqrt(value))},
    )


def _proper(matrix: np.ndarray) -> np.ndarray:
    if np.linalg.det(matrix) < 0:
        matrix = matrix.copy()
        matrix[:, 2] *= -1
    return matrix


def wwzb_sufficient(T: StateLike, config: Optional[OptimizerConfig] = None, state: str = "") -> ConditionResult:
    """max over frames of sum_{x in {1,2}^N} T_x^2; at most 1 certifies a local-realistic model."""
    tensor = as_tensor(T)
    parties = tensor.parties
    if parties < 2:
        raise ValidationError("conditions need at least two parties")
    config = config or OptimizerConfig()
    block = tensor.full

    def objective(params: np.ndarray) -> float:
        # two angles place the normal anywhere on the sphere; the third only spins the plane
        planes = [m[:, :2].T for m in _frames(params, parties, per_frame=2)]
        return float(np.sum(_contract(block, planes) ** 2))

    found = maximize(objective, 2 * parties, config, label="wwzb")
    return ConditionResult(
        condition="wwzb",
        value=found.value,
        bound=1.0,
        violation_factor=float(np.sqrt(found.value)),
        frames=_frame_set(_frames(found.params, parties, per_frame=2)),
        seed=config.seed,
        restarts=found.restarts,
        converged=found.converged,
        state=state,
    )


def wwzb_exact(T: StateLike, config: Optional[OptimizerConfig] = None, state: str = "") -> ConditionResult:
    """max over frames and angles theta_n of sum_x |prod_n alpha^(n)_{x_n} T_x|, alpha = (cos, sin)."""
    tensor = as_tensor(T)
    parties = tensor.parties
    config = config or OptimizerConfig()
    block = tensor.full

    def objective(params: np.ndarray) -> float:
        frames = _frames(params[: 3 * parties], parties)
        weights = [
            np.abs(np.array([np.cos(theta), np.sin(theta)])) for theta in params[3 * parties :]
        ]
        rotated = np.abs(_contract(block, [m[:, :2].T for m in frames]))
        return float(_contract(rotated, [w[np.newaxis, :] for w in weights]).sum())

    initial = [np.concatenate([np.zeros(3 * parties), np.full(parties, np.pi / 4)])]
    found = maximize(objective, 4 * parties, config, initial=initial, label="wwzb_exact")
    return ConditionResult(
        condition="wwzb_exact",
        value=found.value,
        bound=1.0,
        violation_factor=found.value,
        frames=_frame_set(_frames(found.params[: 3 * parties], parties)),
        seed=config.seed,
        restarts=found.restarts,
        converged=found.converged,
        state=state,
        extras={"theta": [float(t) for t in found.params[3 * parties :]]},
    )


def cn_frame_count(parties: int) -> int:
    """Frames in the branching structure: one for the last party, doubling per level."""
    return 2 ** (parties - 2) - 1


def _cn_leaves(block: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    blocks = [block]
    cursor = 0
    while blocks[0].ndim > 2:
        split = []
        for current in blocks:
            rotation = matrices[cursor]
            cursor += 1
            # Second axis first: the [.]_{+2} term, then the primed [.]_{+1} term.
            for axis in (1, 0):
                split.append(np.tensordot(current, rotation[:, axis], axes=(-1, 0)))
        blocks = split
    return np.array(blocks)


def cn_condition(T: StateLike, config: Optional[OptimizerConfig] = None, state: str = "") -> ConditionResult:
    """Recursive condition C_N = [C_{N-1}]_{+2} + [C_{N-1}]'_{+1} with C_2 the two-qubit criterion."""
    tensor = as_tensor(T)
    parties = tensor.parties
    if not 2 <= parties <= MAX_CN_PARTIES:
        raise ValidationError(f"cn_condition supports 2..{MAX_CN_PARTIES} parties, got {parties}")
    config = config or OptimizerConfig()
    block = tensor.full
    count = cn_frame_count(parties)
    if count == 0:
        result = horodecki_result(tensor, state)
        return ConditionResult("cn", result.value, 1.0, result.violation_factor, result.frames, state=state)

    def objective(params: np.ndarray) -> float:
        return _top_two(_cn_leaves(block, _frames(params, count)))

    found = maximize(objective, 3 * count, config, label="cn")
    matrices = _frames(found.params, count)
    return ConditionResult(
        condition="cn",
        value=found.value,
        bound=1.0,
        violation_factor=float(np.sqrt(max(found.value, 0.0))),
        frames=_frame_set(matrices[:1], matrices[1:]),
        seed=config.seed,
        restarts=found.restarts,
        converged=found.converged,
        state=state,
    )


def _ms_raw(block: np.ndarray, matrices: Sequence[np.ndarray]) -> float:
    # e1 + i e2 per party picks the components with 2k y-indices and sign (-1)^k.
    vectors = [(m[:, 0] + 1j * m[:, 1])[np.newaxis, :] for m in matrices]
    return float(np.real(_contract(block.astype(complex), vectors)).sum())


def ms_value_at_frames(T: StateLike, settings: int, frames: Optional[Sequence[LocalFrame]] = None) -> float:
    """Bell-operator expectation (M/2)^N Re[T . (e1 + i e2)^{(x)N}] at fixed frames."""
    tensor = as_tensor(T)
    parties = tensor.parties
    matrices = [f.rotation for f in frames] if frames is not None else [np.eye(3)] * parties
    return (settings / 2) ** parties * _ms_raw(tensor.full, matrices)


def ms_violation(
    T: StateLike,
    settings: int,
    config: Optional[OptimizerConfig] = None,
    optimize_frames: bool = True,
    state: str = "",
) -> ConditionResult:
    """M-setting condition: lhs, the local-realistic bound and their ratio."""
    tensor = as_tensor(T)
    parties = tensor.parties
    if parties < 2 or settings < 2:
        raise ValidationError("ms_violation needs N >= 2 and M >= 2")
    bound = msetting_bound(parties, settings)
    scale = (settings / 2) ** parties
    block = tensor.full
    if not optimize_frames:
        lhs = ms_value_at_frames(tensor, settings)
        return ConditionResult(
            condition="msetting",
            value=lhs,
            bound=bound,
            violation_factor=lhs / bound,
            frames=_frame_set([np.eye(3)] * parties),
            state=state,
            extras={"settings": settings, "lhs": lhs},
        )
    config = config or OptimizerConfig()
    found = maximize(lambda p: _ms_raw(block, _frames(p, parties)), 3 * parties, config, label="msetting")
    lhs = scale * found.value
    return ConditionResult(
        condition="msetting",
        value=lhs,
        bound=bound,
        violation_factor=lhs / bound,
        frames=_frame_set(_frames(found.params, parties)),
        seed=config.seed,
        restarts=found.restarts,
        converged=found.converged,
        state=state,
        extras={"settings": settings, "lhs": lhs},
    )


def evaluate_condition(
    T: StateLike,
    condition: str,
    settings: Optional[int] = None,
    config: Optional[OptimizerConfig] = None,
    state: str = "",
) -> ConditionResult:
    if condition == "horodecki":
        return horodecki_result(T, state)
    if condition == "wwzb":
        return wwzb_sufficient(T, config, state)
    if condition == "wwzb_exact":
        return wwzb_exact(T, config, state)
    if condition == "cn":
        return cn_condition(T, config, state)
    if condition == "msetting":
        if settings is None:
            raise ValidationError("the msetting condition needs a settings count")
        return ms_violation(T, settings, config, state=state)
    raise ValidationError(f"unknown condition {condition!r}; expected one of {', '.join(CONDITIONS)}")


def visibility_from_result(result: ConditionResult) -> float:
    """Visibility at which the condition value, homogeneous in V, drops to its bound."""
    ratio = result.value / result.bound
    if ratio <= 0:
        return float("inf")
    return float(ratio ** (-1.0 / _HOMOGENEITY[result.condition]))


def critical_visibility(
    spec: Union[NamedStateSpec, CorrelationTensor],
    condition: str,
    settings: Optional[int] = None,
    config: Optional[OptimizerConfig] = None,
    method: str = "scaling",
) -> float:
    """Smallest white-noise visibility at which ``condition`` reaches its bound.

    ``scaling`` uses the homogeneity of the condition in V; ``bisection``
    solves condition((1-V) noise + V rho) = bound on (0, 1] directly.
    """
    tensor = as_tensor(spec)
    if condition not in _HOMOGENEITY:
        raise ValidationError(f"unknown condition {condition!r}")
    if method == "scaling":
        return visibility_from_result(evaluate_condition(tensor, condition, settings, config))
    if method != "bisection":
        raise ValidationError(f"unknown method {method!r}")

    def excess(visibility: float) -> float:
        result = evaluate_condition(tensor.scaled(visibility), condition, settings, config)
        return result.value - result.bound

    if excess(1.0) <= 0:
        LOGGER.warning("condition %s is not reached at visibility 1", condition)
        return float("inf")
    return float(bisect(excess, 1e-6, 1.0, xtol=1e-9))


def ghz_violation_factor(parties: int, settings: int) -> float:
    half = np.pi / (2 * settings)
    return float(settings**parties * np.sin(half) ** parties / (2 * np.cos(half)))


def generalized_ghz_violation_factor(parties: int, settings: int, alpha: float) -> float:
    return float(settings**parties * np.sin(2 * alpha) / (2 * msetting_bound(parties, settings)))


def dur_violation_factor(parties: int, settings: int, alpha: float = 0.0, tuned: bool = False) -> float:
    """Violation factor of the bound entangled state; ``tuned`` rotates the operator onto its GHZ part."""
    phase = 1.0 if tuned else float(np.cos(alpha))
    return float(settings**parties * phase / (2 * (parties + 1) * msetting_bound(parties, settings)))


def gisin_chsh(alpha: float) -> float:
    """Maximal CHSH value of cos(a)|00> + sin(a)|11>."""
    return float(2 * np.sqrt(1 + np.sin(2 * alpha) ** 2))


def msetting_bell_operator(parties: int, settings: int) -> np.ndarray:
    """sum_m c_m (x)_n (cos phi sigma_x + sin phi sigma_y) with the cosine coefficients."""
    ineq = msetting_inequality(parties, settings)
    angles = msetting_angles(parties, settings)
    local = [np.cos(phi) * PAULI[1] + np.sin(phi) * PAULI[2] for phi in angles]
    operator = np.zeros((2**parties, 2**parties), dtype=complex)
    for key in product(range(settings), repeat=parties):
        coefficient = ineq.coefficients.get(tuple(k + 1 for k in key), 0.0)
        if coefficient == 0.0:
            continue
        term = np.array([[1.0 + 0j]])
        for k in key:
            term = np.kron(term, local[k])
        operator += coefficient * term
    return operator


def ghz_bell_operator(parties: int, settings: int) -> np.ndarray:
    """(M^N / 2)(|psi+><psi+| - |psi-><psi-|) for the two GHZ states."""
    plus = ghz_vector(parties).amplitudes
    minus = ghz_vector(parties, np.pi).amplitudes
    return 0.5 * settings**parties * (np.outer(plus, plus.conj()) - np.outer(minus, minus.conj()))
