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

"""States, density matrices and correlation tensors.

Correlation tensors are stored as arrays of shape ``(4,) * N`` indexed by
``(mu_1, ..., mu_N)`` with party 1 slowest and ``mu = 0, 1, 2, 3`` for
``I, X, Y, Z``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import ALGEBRAIC_TOL, get_settings
from .errors import DimensionOverflowError, ValidationError

LOGGER = logging.getLogger("bellkit.qstate")

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z])

AXIS_INDEX = {"0": 0, "x": 1, "y": 2, "z": 3}

NAMED_KINDS = {
    "singlet",
    "psi_minus",
    "phi_plus",
    "ghz_plus",
    "ghz_minus",
    "ghz_mermin",
    "generalized_ghz",
    "w",
    "dur",
    "wz_four_qubit",
    "noisy",
}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over the product of ``dims``."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dims = tuple(self.dims) or (amplitudes.size,)
        if int(np.prod(dims)) != amplitudes.size:
            raise ValidationError(f"amplitudes of length {amplitudes.size} do not match dims {dims}")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > ALGEBRAIC_TOL:
            raise ValidationError(f"state vector is not normalized (norm^2={norm:.12g})")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex], dims: Sequence[int] = ()) -> "StateVector":
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(vector / norm, tuple(dims))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix over ``dims``."""

    entries: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {entries.shape}")
        dims = tuple(self.dims) or (entries.shape[0],)
        if int(np.prod(dims)) != entries.shape[0]:
            raise ValidationError(f"matrix of size {entries.shape[0]} does not match dims {dims}")
        if np.max(np.abs(entries - entries.conj().T), initial=0.0) > ALGEBRAIC_TOL:
            raise ValidationError("density matrix is not Hermitian")
        trace = complex(np.trace(entries))
        if abs(trace - 1.0) > ALGEBRAIC_TOL:
            raise ValidationError(f"density matrix trace is {trace.real:.12g}, expected 1")
        if np.min(np.linalg.eigvalsh(entries)) < -ALGEBRAIC_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(entries))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def parties(self) -> int:
        return len(self.dims)


@dataclass(frozen=True, eq=False)
class BlochVector:
    components: np.ndarray

    def __post_init__(self) -> None:
        components = np.asarray(self.components, dtype=float).reshape(-1)
        if components.size != 3:
            raise ValidationError("Bloch vectors have three components")
        if np.linalg.norm(components) > 1.0 + ALGEBRAIC_TOL:
            raise ValidationError("Bloch vector longer than 1")
        object.__setattr__(self, "components", _frozen(components))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        return cls(np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]))

    @classmethod
    def equatorial(cls, phi: float) -> "BlochVector":
        return cls(np.array([np.cos(phi), np.sin(phi), 0.0]))

    @property
    def is_unit(self) -> bool:
        return abs(float(np.linalg.norm(self.components)) - 1.0) <= ALGEBRAIC_TOL

    def require_unit(self) -> np.ndarray:
        if not self.is_unit:
            raise ValidationError("measurement settings must be unit Bloch vectors")
        return self.components


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    """Pauli decomposition ``T[mu_1, ..., mu_N]`` of an N-qubit state."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim < 1 or any(size != 4 for size in values.shape):
            raise ValidationError(f"correlation tensor must have shape (4,)*N, got {values.shape}")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def parties(self) -> int:
        return self.values.ndim

    @property
    def full(self) -> np.ndarray:
        """The full-correlation block, indices restricted to x, y, z."""
        return self.values[(slice(1, None),) * self.parties]

    def component(self, label: str) -> float:
        """Look up a component by label, e.g. ``"xxz"`` or ``"zz0"``."""
        if len(label) != self.parties:
            raise ValidationError(f"label {label!r} does not address {self.parties} parties")
        try:
            index = tuple(AXIS_INDEX[ch] for ch in label.lower())
        except KeyError as error:
            raise ValidationError(f"unknown axis in label {label!r}") from error
        return float(self.values[index])

    def scaled(self, visibility: float) -> "CorrelationTensor":
        """Mix with white noise: every component except ``T_0...0`` scales by ``visibility``."""
        values = np.array(self.values) * visibility
        values[(0,) * self.parties] = 1.0
        return CorrelationTensor(values)

    def squared_norm(self) -> float:
        return float(np.sum(self.values**2))


class NamedStateSpec(BaseModel):
    """Description of a named state understood by :func:`make_state`."""

    model_config = ConfigDict(frozen=True)

    kind: str
    parties: Optional[int] = Field(default=None, ge=1)
    alpha: float = 0.0
    visibility: float = 1.0
    inner: Optional["NamedStateSpec"] = None

    @model_validator(mode="after")
    def _check(self) -> "NamedStateSpec":
        if self.kind not in NAMED_KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}")
        if self.kind == "generalized_ghz" and not (0.0 <= self.alpha <= np.pi / 4 + ALGEBRAIC_TOL):
            raise ValueError("generalized_ghz requires alpha in [0, pi/4]")
        if self.kind == "noisy":
            if self.inner is None:
                raise ValueError("noisy state requires an inner state")
            if not (0.0 <= self.visibility <= 1.0):
                raise ValueError("visibility must lie in [0, 1]")
        if self.kind in {"ghz_plus", "ghz_minus", "generalized_ghz", "w", "dur"}:
            if self.parties is not None and self.parties < 2:
                raise ValueError(f"{self.kind} requires at least two parties")
        return self

    @property
    def n_parties(self) -> int:
        if self.kind in {"singlet", "psi_minus", "phi_plus"}:
            return 2
        if self.kind == "ghz_mermin":
            return 3
        if self.kind == "wz_four_qubit":
            return 4
        if self.kind == "noisy":
            assert self.inner is not None
            return self.inner.n_parties
        return self.parties if self.parties is not None else 3

    @classmethod
    def singlet(cls) -> "NamedStateSpec":
        return cls(kind="singlet")

    @classmethod
    def phi_plus(cls) -> "NamedStateSpec":
        return cls(kind="phi_plus")

    @classmethod
    def ghz(cls, parties: int, sign: int = 1) -> "NamedStateSpec":
        return cls(kind="ghz_plus" if sign >= 0 else "ghz_minus", parties=parties)

    @classmethod
    def generalized_ghz(cls, parties: int, alpha: float) -> "NamedStateSpec":
        return cls(kind="generalized_ghz", parties=parties, alpha=alpha)

    @classmethod
    def w(cls, parties: int) -> "NamedStateSpec":
        return cls(kind="w", parties=parties)

    @classmethod
    def dur(cls, parties: int, alpha: float = 0.0) -> "NamedStateSpec":
        return cls(kind="dur", parties=parties, alpha=alpha)

    @classmethod
    def wz_four_qubit(cls) -> "NamedStateSpec":
        return cls(kind="wz_four_qubit")

    @classmethod
    def noisy(cls, inner: "NamedStateSpec", visibility: float) -> "NamedStateSpec":
        return cls(kind="noisy", inner=inner, visibility=visibility)


NamedStateSpec.model_rebuild()


def ghz_vector(parties: int, phase: float = 0.0) -> StateVector:
    amplitudes = np.zeros(2**parties, dtype=complex)
    amplitudes[0] = 1 / np.sqrt(2)
    amplitudes[-1] = np.exp(1j * phase) / np.sqrt(2)
    return StateVector(amplitudes, (2,) * parties)


def generalized_ghz_vector(parties: int, alpha: float) -> StateVector:
    amplitudes = np.zeros(2**parties, dtype=complex)
    amplitudes[0] = np.cos(alpha)
    amplitudes[-1] = np.sin(alpha)
    return StateVector(amplitudes, (2,) * parties)


def w_vector(parties: int) -> StateVector:
    amplitudes = np.zeros(2**parties, dtype=complex)
    for k in range(parties):
        amplitudes[1 << (parties - 1 - k)] = 1 / np.sqrt(parties)
    return StateVector(amplitudes, (2,) * parties)


def wz_vector() -> StateVector:
    amplitudes = np.zeros(16, dtype=complex)
    amplitudes[0b0000] = amplitudes[0b1111] = np.sqrt(1 / 3)
    for bits in (0b0101, 0b1010, 0b0110, 0b1001):
        amplitudes[bits] = np.sqrt(1 / 3) / 2
    return StateVector(amplitudes, (2,) * 4)


def dur_matrix(parties: int, alpha: float = 0.0) -> np.ndarray:
    phi = ghz_vector(parties, alpha).amplitudes
    rho = np.outer(phi, phi.conj())
    full = 2**parties - 1
    for k in range(parties):
        flipped = 1 << (parties - 1 - k)
        rho[flipped, flipped] += 0.5
        rho[full ^ flipped, full ^ flipped] += 0.5
    return rho / (parties + 1)


def _check_budget(parties: int) -> None:
    settings = get_settings()
    if parties > settings.max_qubits:
        raise DimensionOverflowError(
            f"{parties} qubits exceed the configured cap of {settings.max_qubits}"
        )
    if 4**parties > settings.memory_budget:
        raise DimensionOverflowError(
            f"correlation tensor of 4^{parties} entries exceeds the memory budget {settings.memory_budget}"
        )


def make_state(spec: NamedStateSpec) -> DensityMatrix:
    parties = spec.n_parties
    _check_budget(parties)
    dims = (2,) * parties
    kind = spec.kind
    if kind in {"singlet", "psi_minus"}:
        return StateVector(np.array([0, 1, -1, 0]) / np.sqrt(2), dims).density()
    if kind == "phi_plus":
        return ghz_vector(2).density()
    if kind == "ghz_plus":
        return ghz_vector(parties).density()
    if kind == "ghz_minus":
        return ghz_vector(parties, np.pi).density()
    if kind == "ghz_mermin":
        return ghz_vector(3, np.pi / 2).density()
    if kind == "generalized_ghz":
        return generalized_ghz_vector(parties, spec.alpha).density()
    if kind == "w":
        return w_vector(parties).density()
    if kind == "wz_four_qubit":
        return wz_vector().density()
    if kind == "dur":
        return DensityMatrix(dur_matrix(parties, spec.alpha), dims)
    assert spec.inner is not None
    inner = make_state(spec.inner)
    noise = np.eye(inner.dim) / inner.dim
    return DensityMatrix((1 - spec.visibility) * noise + spec.visibility * inner.entries, inner.dims)


def correlation_tensor(rho: Union[DensityMatrix, StateVector], parties: int) -> CorrelationTensor:
    if isinstance(rho, StateVector):
        rho = rho.density()
    if rho.dim != 2**parties:
        raise ValidationError(f"state of dimension {rho.dim} is not a {parties}-qubit state")
    _check_budget(parties)
    shaped = rho.entries.reshape((2,) * (2 * parties))
    # Interleave (row_n, col_n) so each party's pair sits at the front in turn.
    order = [axis for n in range(parties) for axis in (n, parties + n)]
    work = shaped.transpose(order)
    for _ in range(parties):
        # Tr(rho sigma) pairs rho[r, c] with sigma[c, r].
        work = np.tensordot(work, PAULI, axes=([0, 1], [2, 1]))
    return CorrelationTensor(work.real)


def quantum_correlation(T: CorrelationTensor, settings: Sequence[BlochVector]) -> float:
    """E = T . m_1 (x) ... (x) m_N over the full-correlation block."""
    if len(settings) != T.parties:
        raise ValidationError(f"expected {T.parties} settings, got {len(settings)}")
    block = T.full
    for vector in settings:
        block = np.tensordot(vector.require_unit(), block, axes=(0, 0))
    return float(block)


def rotate_tensor(T: CorrelationTensor, rotations: Sequence[np.ndarray]) -> CorrelationTensor:
    """Express ``T`` in local frames; row i of each rotation is the new i-th axis."""
    if len(rotations) != T.parties:
        raise ValidationError("one rotation per party is required")
    values = np.array(T.values)
    for axis, rotation in enumerate(rotations):
        embedded = np.eye(4)
        embedded[1:, 1:] = np.asarray(rotation, dtype=float)
        values = np.moveaxis(np.tensordot(embedded, values, axes=(1, axis)), 0, axis)
    return CorrelationTensor(values)


def tensor_product(*states: Union[StateVector, DensityMatrix]) -> Union[StateVector, DensityMatrix]:
    if not states:
        raise ValidationError("tensor_product needs at least one state")
    dims = tuple(d for state in states for d in state.dims)
    if all(isinstance(state, StateVector) for state in states):
        amplitudes = reduce(np.kron, [state.amplitudes for state in states])
        return StateVector(amplitudes, dims)
    matrices = [state.density().entries if isinstance(state, StateVector) else state.entries for state in states]
    return DensityMatrix(reduce(np.kron, matrices), dims)


def partial_trace(rho: Union[DensityMatrix, StateVector], keep: Sequence[int]) -> DensityMatrix:
    """Reduce to the subsystems listed in ``keep`` (0-based, kept in ascending order)."""
    if isinstance(rho, StateVector):
        rho = rho.density()
    count = rho.parties
    kept = sorted(set(keep))
    if any(index < 0 or index >= count for index in kept):
        raise ValidationError(f"subsystem index out of range for {count} subsystems: {list(keep)}")
    tensor = rho.entries.reshape(rho.dims + rho.dims)
    remaining = count
    for index in sorted(set(range(count)) - set(kept), reverse=True):
        tensor = np.trace(tensor, axis1=index, axis2=index + remaining)
        remaining -= 1
    dims = tuple(rho.dims[index] for index in kept)
    size = int(np.prod(dims)) if dims else 1
    return DensityMatrix(tensor.reshape(size, size), dims)


def pure_qubit(theta: float, phi: float) -> StateVector:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, Bloch vector at (theta, phi)."""
    return StateVector(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]), (2,))


def pauli_operator(indices: Sequence[int]) -> np.ndarray:
    return reduce(np.kron, [PAULI[index] for index in indices])


def expectation(rho: Union[DensityMatrix, StateVector], operator: np.ndarray) -> float:
    if isinstance(rho, StateVector):
        return float(np.vdot(rho.amplitudes, operator @ rho.amplitudes).real)
    return float(np.trace(rho.entries @ operator).real)


def bloch_vector(rho: Union[DensityMatrix, StateVector]) -> BlochVector:
    if isinstance(rho, StateVector):
        rho = rho.density()
    if rho.dim != 2:
        raise ValidationError("bloch_vector expects a single qubit")
    return BlochVector(np.array([expectation(rho, PAULI[i]) for i in (1, 2, 3)]))


def purity(rho: DensityMatrix) -> float:
    return float(np.trace(rho.entries @ rho.entries).real)


def fidelity(psi: StateVector, rho: Union[DensityMatrix, StateVector]) -> float:
    """Overlap <psi|rho|psi> of a pure reference state with ``rho``."""
    if isinstance(rho, StateVector):
        return float(abs(np.vdot(psi.amplitudes, rho.amplitudes)) ** 2)
    return float(np.vdot(psi.amplitudes, rho.entries @ psi.amplitudes).real)
