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

"""Correlation Bell inequalities and their local-realistic bounds.

Setting indices in coefficient keys are 1-based, matching the usual
``E_{k1...kN}`` labels. Sign-function inputs are enumerated in
``itertools.product((1, -1), repeat=N)`` order; bit ``i`` of a sign-function
table is set when the function takes the value -1 on input ``i``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import product
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence

import numpy as np

from .config import COEFFICIENT_TOL
from .errors import GuardError, ValidationError
from .optimize import run_parallel
from .qstate import BlochVector, CorrelationTensor, quantum_correlation

LOGGER = logging.getLogger("bellkit.bellgen")

MAX_BRUTEFORCE_SETTINGS = 20
MAX_TIGHTNESS_DIMENSION = 64
MAX_SIGN_FUNCTION_PARTIES = 4

# Rows map s=+1 and s=-1 onto the factors s^{k-1} for k = 1, 2.
_SIGN_FACTORS = np.array([[1.0, 1.0], [1.0, -1.0]])

Key = tuple[int, ...]


@lru_cache(maxsize=None)
def _sign_vectors(size: int) -> np.ndarray:
    return np.array(list(product((1.0, -1.0), repeat=size)))


@dataclass(frozen=True, eq=False)
class BellInequality:
    """``sum_k c_k E_k <= lr_bound`` over full correlation functions."""

    parties: int
    settings: tuple[int, ...]
    coefficients: dict[Key, float]
    lr_bound: float
    label: str = ""
    trivial: bool = False

    def __post_init__(self) -> None:
        settings = tuple(int(m) for m in self.settings)
        if len(settings) != self.parties or any(m < 1 for m in settings):
            raise ValidationError(f"settings {settings} do not describe {self.parties} parties")
        if not self.lr_bound > 0:
            raise ValidationError("local-realistic bound must be positive")
        clean: dict[Key, float] = {}
        for key, value in self.coefficients.items():
            key = tuple(int(k) for k in key)
            if len(key) != self.parties or any(not 1 <= k <= m for k, m in zip(key, settings)):
                raise ValidationError(f"coefficient key {key} outside settings {settings}")
            clean[key] = float(value)
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "coefficients", clean)

    @classmethod
    def from_dense(
        cls,
        array: np.ndarray,
        lr_bound: float,
        label: str = "",
        trivial: bool = False,
    ) -> "BellInequality":
        array = np.asarray(array, dtype=float)
        coefficients = {
            tuple(int(i) + 1 for i in index): float(value)
            for index, value in np.ndenumerate(array)
            if abs(value) > COEFFICIENT_TOL
        }
        return cls(array.ndim, array.shape, coefficients, lr_bound, label, trivial)

    def dense(self) -> np.ndarray:
        array = np.zeros(self.settings)
        for key, value in self.coefficients.items():
            array[tuple(k - 1 for k in key)] = value
        return array

    def scaled(self, factor: float, label: Optional[str] = None) -> "BellInequality":
        return BellInequality(
            self.parties,
            self.settings,
            {key: value * factor for key, value in self.coefficients.items()},
            self.lr_bound * factor,
            self.label if label is None else label,
            self.trivial,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "parties": self.parties,
            "settings": list(self.settings),
            "coefficients": [[list(key), value] for key, value in sorted(self.coefficients.items())],
            "lr_bound": self.lr_bound,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "BellInequality":
        try:
            return cls(
                int(payload["parties"]),
                tuple(payload["settings"]),
                {tuple(key): float(value) for key, value in payload["coefficients"]},
                float(payload["lr_bound"]),
                str(payload.get("label", "")),
            )
        except (KeyError, TypeError, ValueError) as error:
            raise ValidationError(f"malformed inequality payload: {error}") from error


@dataclass(frozen=True)
class SignFunction:
    parties: int
    table: int

    def __post_init__(self) -> None:
        if self.parties < 1:
            raise ValidationError("sign functions need at least one argument")
        if not 0 <= self.table < 2 ** (2**self.parties):
            raise ValidationError("sign-function table does not fit the input count")

    @classmethod
    def from_callable(cls, parties: int, fn: Callable[..., float]) -> "SignFunction":
        table = 0
        for index, signs in enumerate(product((1, -1), repeat=parties)):
            value = fn(*signs)
            if abs(abs(value) - 1.0) > COEFFICIENT_TOL:
                raise ValidationError(f"sign function returned {value} on {signs}")
            if value < 0:
                table |= 1 << index
        return cls(parties, table)

    def values(self) -> np.ndarray:
        """Function values as an array of shape ``(2,) * N``; axis index 0 is s=+1."""
        flat = [(-1.0 if (self.table >> index) & 1 else 1.0) for index in range(2**self.parties)]
        return np.array(flat).reshape((2,) * self.parties)

    def __call__(self, *signs: int) -> int:
        index = int("".join("0" if s > 0 else "1" for s in signs), 2)
        return -1 if (self.table >> index) & 1 else 1


def enumerate_sign_functions(parties: int) -> Iterator[SignFunction]:
    if parties > MAX_SIGN_FUNCTION_PARTIES:
        raise GuardError(
            f"exhaustive sign-function enumeration is limited to {MAX_SIGN_FUNCTION_PARTIES} parties"
        )
    return (SignFunction(parties, table) for table in range(2 ** (2**parties)))


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    values: dict[Key, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {tuple(int(k) for k in key): float(v) for key, v in self.values.items()}
        for key, value in clean.items():
            if abs(value) > 1.0 + COEFFICIENT_TOL:
                raise ValidationError(f"correlation {key} = {value} is outside [-1, 1]")
        object.__setattr__(self, "values", clean)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "CorrelationTable":
        return cls({tuple(i + 1 for i in index): float(v) for index, v in np.ndenumerate(np.asarray(array))})

    def as_array(self, settings: Sequence[int]) -> np.ndarray:
        array = np.zeros(tuple(settings))
        for index in np.ndindex(*settings):
            key = tuple(i + 1 for i in index)
            if key not in self.values:
                raise ValidationError(f"correlation table is missing entry {key}")
            array[index] = self.values[key]
        return array


def _contract_sign_factors(array: np.ndarray) -> np.ndarray:
    for axis in range(array.ndim):
        array = np.moveaxis(np.tensordot(_SIGN_FACTORS, array, axes=(1, axis)), 0, axis)
    return array


def wwzb_lhs(E: CorrelationTable, parties: Optional[int] = None) -> float:
    """sum_s |sum_k prod_j s_j^{k_j - 1} E_k|; local realism requires <= 2^N."""
    if parties is None:
        if not E.values:
            raise ValidationError("empty correlation table")
        parties = len(next(iter(E.values)))
    array = E.as_array((2,) * parties)
    return float(np.sum(np.abs(_contract_sign_factors(array))))


def sign_function_inequality(S: SignFunction) -> BellInequality:
    coefficients = _contract_sign_factors(S.values())
    nonzero = int(np.count_nonzero(np.abs(coefficients) > COEFFICIENT_TOL))
    return BellInequality.from_dense(
        coefficients,
        lr_bound=float(2**S.parties),
        label=f"sign-function[{S.table:#x}]",
        trivial=nonzero == 1,
    )


def mermin_sign_function(parties: int) -> SignFunction:
    return SignFunction.from_callable(
        parties,
        lambda *s: round(np.sqrt(2) * np.cos((sum(s) - parties + 1) * np.pi / 4)),
    )


def chsh() -> BellInequality:
    return BellInequality(2, (2, 2), {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): -1}, 2.0, "chsh")


def mermin(parties: int) -> BellInequality:
    """Mermin-type inequality from the sign-function identity, unit coefficients."""
    generated = sign_function_inequality(mermin_sign_function(parties))
    largest = max(abs(v) for v in generated.coefficients.values())
    return generated.scaled(1.0 / largest, label=f"mermin[{parties}]")


def _family_structure(parties: int) -> list[int]:
    return [2 ** (parties - 1), 2 ** (parties - 1)] + [2 ** (parties - j) for j in range(2, parties)]


def _generate(parties: int, signs: Iterator[bool]) -> np.ndarray:
    """Dense coefficients of the recursive family for ``parties`` parties."""
    if parties == 2:
        base = np.array([[1.0, 1.0], [1.0, -1.0]])
        return base[::-1] if next(signs, False) else base
    first = _generate(parties - 1, signs)
    second = _generate(parties - 1, signs)
    # The newest party always carries two settings; earlier parties double.
    shape = tuple(2 * m for m in first.shape) + (2,)
    array = np.zeros(shape)
    lower = tuple(slice(0, m) for m in first.shape)
    upper = tuple(slice(m, 2 * m) for m in first.shape)
    plus, minus = (np.array([1.0, 1.0]), np.array([1.0, -1.0]))
    if next(signs, False):
        plus, minus = minus, plus
    array[lower] += np.multiply.outer(first, plus)
    array[upper] += np.multiply.outer(second, minus)
    return array


def identify_settings(ineq: BellInequality, party: int, keep: int, merge: int) -> BellInequality:
    """Set measurement ``merge`` of ``party`` equal to ``keep`` (all 1-based)."""
    if not 1 <= party <= ineq.parties:
        raise ValidationError(f"party {party} out of range")
    count = ineq.settings[party - 1]
    if not (1 <= keep <= count and 1 <= merge <= count) or keep == merge:
        raise ValidationError(f"cannot identify settings {keep} and {merge} of party {party}")
    array = np.moveaxis(ineq.dense(), party - 1, 0)
    array[keep - 1] += array[merge - 1]
    array = np.delete(array, merge - 1, axis=0)
    array = np.moveaxis(array, 0, party - 1)
    return BellInequality.from_dense(array, ineq.lr_bound, ineq.label)


def multisetting_generate(structure: Sequence[int], sign_choices: Optional[Sequence[bool]] = None) -> BellInequality:
    """Recursive two-setting-per-branch family and its setting-identified reductions.

    ``structure`` lists settings per party, e.g. ``[4, 4, 2]``; reductions such
    as ``[3, 3, 2]`` are obtained by identifying settings pairwise (1 with 2,
    3 with 4, ...). ``sign_choices`` flips, node by node in depth-first order,
    which branch carries the minus sign (children before parent).
    """
    structure = [int(m) for m in structure]
    parties = len(structure)
    if parties < 2:
        raise ValidationError("the multisetting family needs at least two parties")
    family = _family_structure(parties)
    reductions = [f - m for f, m in zip(family, structure)]
    if any(r < 0 or r > f // 2 for r, f in zip(reductions, family)):
        raise ValidationError(f"unsupported structure {structure}; the family shape is {family}")
    array = _generate(parties, iter(sign_choices or ()))
    ineq = BellInequality.from_dense(array, float(2 ** (parties - 1)), label=f"multisetting{structure}")
    for party, count in enumerate(reductions, start=1):
        for pair in reversed(range(count)):
            ineq = identify_settings(ineq, party, keep=2 * pair + 1, merge=2 * pair + 2)
    return ineq


def msetting_eta(parties: int, settings: int) -> int:
    return ((settings + 1) % 2) * (parties % 2) + 1


def msetting_angles(parties: int, settings: int) -> np.ndarray:
    """Angles phi_m = pi m / M + pi eta / (2 M N) for m = 1..M."""
    eta = msetting_eta(parties, settings)
    m = np.arange(1, settings + 1)
    return np.pi * m / settings + np.pi * eta / (2 * settings * parties)


def msetting_bound(parties: int, settings: int) -> float:
    half = np.pi / (2 * settings)
    return float(np.sin(half) ** (-parties) * np.cos(half))


def msetting_inequality(parties: int, settings: int) -> BellInequality:
    if parties < 2 or settings < 2:
        raise ValidationError("the cosine inequality needs N >= 2 and M >= 2")
    angles = msetting_angles(parties, settings)
    total = reduce(np.add.outer, [angles] * parties)
    return BellInequality.from_dense(
        np.cos(total),
        msetting_bound(parties, settings),
        label=f"msetting[{parties},{settings}]",
    )


def _strategy_max(coefficients: np.ndarray, first_party: np.ndarray) -> float:
    work = np.einsum("am,m...->a...", first_party, coefficients)
    for axis_size in coefficients.shape[1:-1]:
        vectors = _sign_vectors(axis_size)
        work = np.einsum("am,sm...->sa...", vectors, work)
        work = work.reshape((-1,) + work.shape[2:])
    # The last party answers each row optimally.
    return float(np.max(np.sum(np.abs(work.reshape(work.shape[0], -1)), axis=1)))


def lr_bound_bruteforce(ineq: BellInequality, threads: Optional[int] = None) -> float:
    """Maximum of sum_k c_k prod_j I^j_{k_j} over deterministic +-1 assignments."""
    if sum(ineq.settings) > MAX_BRUTEFORCE_SETTINGS:
        raise GuardError(
            f"brute force over {sum(ineq.settings)} settings exceeds the limit of {MAX_BRUTEFORCE_SETTINGS}"
        )
    coefficients = ineq.dense()
    if ineq.parties == 1:
        return float(np.sum(np.abs(coefficients)))
    first = _sign_vectors(ineq.settings[0])
    chunks = np.array_split(first, max(1, min(len(first), 8)))
    maxima = run_parallel(lambda chunk: _strategy_max(coefficients, chunk), chunks, threads)
    return max(maxima)


@dataclass(frozen=True)
class TightnessReport:
    is_tight: bool
    saturating_rank: int
    vertex_count: int
    saturating_plus: int
    saturating_minus: int
    dimension: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "is_tight": self.is_tight,
            "saturating_rank": self.saturating_rank,
            "vertex_count": self.vertex_count,
            "saturating_plus": self.saturating_plus,
            "saturating_minus": self.saturating_minus,
            "dimension": self.dimension,
        }


def correlation_vertices(settings: Sequence[int]) -> np.ndarray:
    """Distinct deterministic correlation vectors, one row each."""
    blocks = []
    for position, count in enumerate(settings):
        vectors = _sign_vectors(count)
        if position < len(settings) - 1:
            # Flipping two parties together gives the same vertex.
            vectors = vectors[vectors[:, 0] > 0]
        blocks.append(vectors)
    return reduce(lambda left, right: np.einsum("ia,jb->ijab", left, right).reshape(
        left.shape[0] * right.shape[0], -1), blocks)


def tightness_check(ineq: BellInequality) -> TightnessReport:
    dimension = int(np.prod(ineq.settings))
    if dimension > MAX_TIGHTNESS_DIMENSION or sum(ineq.settings) > MAX_BRUTEFORCE_SETTINGS:
        raise GuardError(
            f"correlation space of dimension {dimension} exceeds the tightness limit {MAX_TIGHTNESS_DIMENSION}"
        )
    vertices = correlation_vertices(ineq.settings)
    values = vertices @ ineq.dense().reshape(-1)
    plus = np.abs(values - ineq.lr_bound) <= COEFFICIENT_TOL
    minus = np.abs(values + ineq.lr_bound) <= COEFFICIENT_TOL
    exceeds = bool(np.any(np.abs(values) > ineq.lr_bound + COEFFICIENT_TOL))
    rank = int(np.linalg.matrix_rank(vertices[plus], tol=COEFFICIENT_TOL)) if plus.any() else 0
    if exceeds:
        LOGGER.warning("inequality %s is violated by a deterministic vertex", ineq.label)
    return TightnessReport(
        is_tight=(rank == dimension) and not exceeds,
        saturating_rank=rank,
        vertex_count=int(vertices.shape[0]),
        saturating_plus=int(plus.sum()),
        saturating_minus=int(minus.sum()),
        dimension=dimension,
    )


def quantum_value(
    ineq: BellInequality,
    T: CorrelationTensor,
    settings: Sequence[Sequence[BlochVector]],
) -> float:
    """Evaluate the inequality on the quantum correlations of ``T``."""
    if len(settings) != ineq.parties:
        raise ValidationError("one list of settings per party is required")
    for party, (given, needed) in enumerate(zip(settings, ineq.settings), start=1):
        if len(given) < needed:
            raise ValidationError(f"party {party} needs {needed} settings, got {len(given)}")
    total = 0.0
    for key, value in ineq.coefficients.items():
        vectors = [settings[party][k - 1] for party, k in enumerate(key)]
        total += value * quantum_correlation(T, vectors)
    return total
