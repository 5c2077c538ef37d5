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

"""Explicit nonlocal hidden-variable model and the inequalities that rule it out.

Polarizations and measurement directions are unit vectors on the Poincare
sphere. Angles are radians throughout; the CLI converts from degrees.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .config import ALGEBRAIC_TOL, MC_SIGMAS, get_settings
from .errors import ValidationError
from .optimize import counter_rng, run_parallel

LOGGER = logging.getLogger("bellkit.leggett")

SOURCES = ("mixed_antipodal",)
SAMPLE_CHUNK = 1 << 16

# Measured correlations and their standard errors, keyed by (Alice, Bob) setting.
MEASURED_CORRELATIONS = {
    (1, 1): (-0.9298, 0.0105),
    (2, 2): (-0.942, 0.0112),
    (2, 3): (-0.9902, 0.0118),
    (1, 2): (0.0374, 0.0091),
    (2, 1): (0.3436, 0.0088),
}
RI_FREE_TERMS = (
    ((1, 1), (2, 2), (1, 5), (2, 6)),
    ((2, 3), (3, 4), (2, 6), (3, 7)),
)


def _unit(vector: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(vector, dtype=float)
    if array.shape != (3,):
        raise ValidationError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(array) - 1.0) > ALGEBRAIC_TOL:
        raise ValidationError(f"{name} must have unit length, got norm {np.linalg.norm(array):.12g}")
    return array


@dataclass(frozen=True, eq=False)
class PolarizationPair:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _unit(self.u, "u"))
        object.__setattr__(self, "v", _unit(self.v, "v"))

    @classmethod
    def antipodal(cls, u: Sequence[float]) -> "PolarizationPair":
        return cls(np.asarray(u, dtype=float), -np.asarray(u, dtype=float))

    def swapped(self) -> "PolarizationPair":
        return PolarizationPair(self.v, self.u)


@dataclass(frozen=True, eq=False)
class LeggettSettings:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _unit(self.a, "a"))
        object.__setattr__(self, "b", _unit(self.b, "b"))


@dataclass(frozen=True)
class ModelOutcome:
    a: int
    b: int
    valid: bool


@dataclass(frozen=True)
class Thresholds:
    """Where Alice and Bob switch to +1 as the hidden variable runs over [0, 1]."""

    lambda_a: float
    x1: float
    x2: float


def model_thresholds(pair: PolarizationPair, settings: LeggettSettings) -> Thresholds:
    ua = float(pair.u @ settings.a)
    vb = float(pair.v @ settings.b)
    ab = float(settings.a @ settings.b)
    return Thresholds(
        lambda_a=0.5 * (1 + ua),
        x1=0.25 * (1 + ua - vb + ab),
        x2=0.25 * (3 + ua + vb + ab),
    )


def model_valid(u: Sequence[float], v: Sequence[float], a: Sequence[float], b: Sequence[float]) -> bool:
    """|a.b + u.a| <= 1 - v.b and |a.b - u.a| <= 1 + v.b."""
    pair = PolarizationPair(u, v)
    settings = LeggettSettings(a, b)
    ua = pair.u @ settings.a
    vb = pair.v @ settings.b
    ab = settings.a @ settings.b
    return bool(abs(ab + ua) <= 1 - vb + ALGEBRAIC_TOL and abs(ab - ua) <= 1 + vb + ALGEBRAIC_TOL)


def correlation_limits(
    u: Sequence[float], v: Sequence[float], a: Sequence[float], b: Sequence[float]
) -> tuple[float, float]:
    """Range of <AB> open to any +-1 outcomes whose averages follow Malus' law on (u, v).

    -1 + |u.a + v.b| <= <AB> <= 1 - |u.a - v.b|
    """
    pair = PolarizationPair(u, v)
    settings = LeggettSettings(a, b)
    ua = float(pair.u @ settings.a)
    vb = float(pair.v @ settings.b)
    return -1 + abs(ua + vb), 1 - abs(ua - vb)


def model_outcomes(
    u: Sequence[float],
    v: Sequence[float],
    a: Sequence[float],
    b: Sequence[float],
    lam: float,
) -> ModelOutcome:
    """Deterministic outcomes for one value of the hidden variable.

    A = +1 iff lam <= lambda_A. Bob answers +1 on the half-open interval
    (x1, x2], so lam = lambda_A never lands in both regions when x1 = lambda_A.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"hidden variable must lie in [0, 1], got {lam}")
    thresholds = model_thresholds(PolarizationPair(u, v), LeggettSettings(a, b))
    alice = 1 if lam <= thresholds.lambda_a else -1
    bob = 1 if thresholds.x1 < lam <= thresholds.x2 else -1
    return ModelOutcome(alice, bob, model_valid(u, v, a, b))


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean_a: float
    mean_b: float
    mean_ab: float
    stderr_a: float
    stderr_b: float
    stderr_ab: float
    valid_subensembles: tuple[bool, ...] = (True, True)

    def agrees(self, expected_a: float, expected_b: float, expected_ab: float, sigmas: float = MC_SIGMAS) -> bool:
        """True when every mean lies within ``sigmas`` binomial errors of the expectation."""
        checks = (
            (self.mean_a, expected_a, self.stderr_a),
            (self.mean_b, expected_b, self.stderr_b),
            (self.mean_ab, expected_ab, self.stderr_ab),
        )
        return all(abs(mean - target) <= sigmas * err + ALGEBRAIC_TOL for mean, target, err in checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "mean_ab": self.mean_ab,
            "stderr_a": self.stderr_a,
            "stderr_b": self.stderr_b,
            "stderr_ab": self.stderr_ab,
            "valid_subensembles": list(self.valid_subensembles),
        }


def _stderr(mean: float, n: int) -> float:
    return float(np.sqrt(max(1.0 - mean**2, 0.0) / n))


def simulate_correlations(
    u: Sequence[float],
    a: Sequence[float],
    b: Sequence[float],
    n: int,
    seed: Optional[int] = None,
    source: str = "mixed_antipodal",
    threads: Optional[int] = None,
) -> SampleStats:
    """Sample the model with a source sending (u, -u) or (-u, u) on a fair bit.

    Samples are drawn in fixed-size chunks, each from its own counter block,
    so the statistics do not depend on the number of workers.
    """
    if source not in SOURCES:
        raise ValidationError(f"unknown source {source!r}; expected one of {', '.join(SOURCES)}")
    if n < 1:
        raise ValidationError("sample count must be positive")
    settings = LeggettSettings(a, b)
    pairs = (PolarizationPair.antipodal(u), PolarizationPair.antipodal(u).swapped())
    valid = tuple(model_valid(p.u, p.v, settings.a, settings.b) for p in pairs)
    for index, ok in enumerate(valid):
        if not ok:
            LOGGER.warning("subensemble %d violates the model validity condition", index)
    thresholds = [model_thresholds(pair, settings) for pair in pairs]
    lambda_a = np.array([t.lambda_a for t in thresholds])
    x1 = np.array([t.x1 for t in thresholds])
    x2 = np.array([t.x2 for t in thresholds])
    root = get_settings().seed if seed is None else seed

    def run_chunk(chunk: int) -> tuple[int, int, int, int]:
        size = min(SAMPLE_CHUNK, n - chunk * SAMPLE_CHUNK)
        rng = counter_rng(root, chunk)
        lam = rng.random(size)
        which = rng.integers(0, 2, size)
        alice = np.where(lam <= lambda_a[which], 1, -1)
        bob = np.where((lam > x1[which]) & (lam <= x2[which]), 1, -1)
        return size, int(alice.sum()), int(bob.sum()), int((alice * bob).sum())

    chunks = range((n + SAMPLE_CHUNK - 1) // SAMPLE_CHUNK)
    totals = np.sum(np.array(run_parallel(run_chunk, chunks, threads), dtype=np.int64), axis=0)
    count = int(totals[0])
    mean_a, mean_b, mean_ab = (float(total) / count for total in totals[1:])
    LOGGER.info("sampled %d events: <A>=%.6f <B>=%.6f <AB>=%.6f", count, mean_a, mean_b, mean_ab)
    return SampleStats(
        n=count,
        mean_a=mean_a,
        mean_b=mean_b,
        mean_ab=mean_ab,
        stderr_a=_stderr(mean_a, count),
        stderr_b=_stderr(mean_b, count),
        stderr_ab=_stderr(mean_ab, count),
        valid_subensembles=valid,
    )


def quantum_correlation_singlet(a: Sequence[float], b: Sequence[float], visibility: float = 1.0) -> float:
    return float(-visibility * (_unit(a, "a") @ _unit(b, "b")))


@dataclass(frozen=True)
class InequalityValue:
    value: float
    bound: float

    @property
    def violated(self) -> bool:
        return self.value > self.bound + ALGEBRAIC_TOL

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "bound": self.bound, "violated": self.violated}


def nlhv_bound(phi: float) -> float:
    return float(4 - (4 / np.pi) * abs(np.sin(phi / 2)))


def nlhv_quantum_value(phi: float, visibility: float = 1.0) -> float:
    return float(2 * visibility * (1 + np.cos(phi)))


def s_nlhv(correlations: Sequence[float], phi: float) -> InequalityValue:
    """|E(phi) + E(0)| + |E'(phi) + E'(0)| for the two orthogonal-plane pairs."""
    if len(correlations) != 4:
        raise ValidationError("s_nlhv takes four averaged correlations")
    e_z, e_zz, e_y, e_yy = (float(c) for c in correlations)
    return InequalityValue(abs(e_z + e_zz) + abs(e_y + e_yy), nlhv_bound(phi))


def chsh_settings(phi: float) -> dict[str, np.ndarray]:
    """The five directions used with the inequality: a1, a2 and b1, b2, b3."""
    return {
        "a1": np.array([1.0, 0.0, 0.0]),
        "a2": np.array([0.0, 0.0, 1.0]),
        "b1": np.array([np.cos(phi), 0.0, -np.sin(phi)]),
        "b2": np.array([0.0, np.sin(phi), np.cos(phi)]),
        "b3": np.array([0.0, 0.0, 1.0]),
    }


def chsh_at_settings(phi: float, visibility: float = 1.0) -> float:
    """|E11 + E12 - E21 + E22| for singlet correlations at the five fixed settings."""
    s = chsh_settings(phi)
    e = {
        (i, j): quantum_correlation_singlet(s[f"a{i}"], s[f"b{j}"], visibility)
        for i in (1, 2)
        for j in (1, 2)
    }
    return abs(e[1, 1] + e[1, 2] - e[2, 1] + e[2, 2])


def optimal_nlhv_angle() -> float:
    """Angle maximizing quantum value over bound, located by golden-section search."""
    found = minimize_scalar(
        lambda phi: -nlhv_quantum_value(phi) / nlhv_bound(phi),
        bracket=(0.0, 0.3, np.pi / 2),
        method="golden",
        tol=1e-8,
    )
    return float(found.x)


@dataclass(frozen=True)
class NlhvThresholds:
    phi: float
    bound: float
    quantum_value: float
    v_nlhv: float
    chsh_value: float
    v_chsh: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "phi_deg": float(np.degrees(self.phi)),
            "bound": self.bound,
            "quantum_value": self.quantum_value,
            "v_nlhv": self.v_nlhv,
            "chsh_value": self.chsh_value,
            "v_chsh": self.v_chsh,
        }


def nlhv_visibility_thresholds() -> NlhvThresholds:
    phi = optimal_nlhv_angle()
    bound = nlhv_bound(phi)
    quantum = nlhv_quantum_value(phi)
    chsh = chsh_at_settings(phi)
    return NlhvThresholds(
        phi=phi,
        bound=bound,
        quantum_value=quantum,
        v_nlhv=bound / quantum,
        chsh_value=chsh,
        v_chsh=2 / chsh,
    )


@dataclass(frozen=True)
class MeasuredEvaluation:
    s_nlhv: float
    s_nlhv_error: float
    nlhv_bound: float
    s_chsh: float
    s_chsh_error: float

    @property
    def nlhv_sigmas(self) -> float:
        return (self.s_nlhv - self.nlhv_bound) / self.s_nlhv_error

    @property
    def chsh_sigmas(self) -> float:
        return (self.s_chsh - 2) / self.s_chsh_error

    def to_dict(self) -> dict[str, Any]:
        return {
            "s_nlhv": self.s_nlhv,
            "s_nlhv_error": self.s_nlhv_error,
            "nlhv_bound": self.nlhv_bound,
            "nlhv_sigmas": self.nlhv_sigmas,
            "s_chsh": self.s_chsh,
            "s_chsh_error": self.s_chsh_error,
            "chsh_sigmas": self.chsh_sigmas,
        }


def measured_evaluation(phi: float = np.radians(18.8)) -> MeasuredEvaluation:
    """Evaluate both inequalities on the measured correlation table.

    The shared E23 term enters the error budget with weight two.
    """
    e = {key: value for key, (value, _) in MEASURED_CORRELATIONS.items()}
    err = {key: error for key, (_, error) in MEASURED_CORRELATIONS.items()}
    nlhv = abs(e[1, 1] + e[2, 3]) + abs(e[2, 2] + e[2, 3])
    nlhv_error = np.sqrt(err[1, 1] ** 2 + err[2, 2] ** 2 + 2 * err[2, 3] ** 2)
    chsh = abs(e[1, 1] + e[1, 2] - e[2, 1] + e[2, 2])
    chsh_error = np.sqrt(sum(err[key] ** 2 for key in ((1, 1), (1, 2), (2, 1), (2, 2))))
    return MeasuredEvaluation(
        s_nlhv=float(nlhv),
        s_nlhv_error=float(nlhv_error),
        nlhv_bound=nlhv_bound(phi),
        s_chsh=float(chsh),
        s_chsh_error=float(chsh_error),
    )


@dataclass(frozen=True, eq=False)
class RiFreeResult:
    value: float
    bound: float
    alice: tuple[np.ndarray, ...]
    bob: tuple[np.ndarray, ...]
    terms: tuple[tuple[tuple[int, int], ...], ...] = RI_FREE_TERMS

    @property
    def violated(self) -> bool:
        return self.value > self.bound + ALGEBRAIC_TOL

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "bound": self.bound,
            "violated": self.violated,
            "alice": list(self.alice),
            "bob": list(self.bob),
            "terms": [[list(pair) for pair in group] for group in self.terms],
        }


def ri_free_settings(phi: float) -> tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]:
    c, s = np.cos(phi), np.sin(phi)
    alice = tuple(np.eye(3))
    bob = (
        np.array([c, s, 0.0]),
        np.array([-s, c, 0.0]),
        np.array([0.0, c, -s]),
        np.array([0.0, s, c]),
    ) + alice
    return alice, bob


def ri_free_bound(phi: float) -> float:
    return float(8 - 2 * abs(np.sin(phi / 2)))


def ri_free_inequality(phi: float, visibility: float = 1.0) -> RiFreeResult:
    """Inequality free of the rotational-invariance assumption, on singlet correlations."""
    if not 0.0 < phi < np.pi + ALGEBRAIC_TOL:
        raise ValidationError("phi must lie in (0, pi]")
    alice, bob = ri_free_settings(phi)

    def correlation(pair: tuple[int, int]) -> float:
        return quantum_correlation_singlet(alice[pair[0] - 1], bob[pair[1] - 1], visibility)

    value = sum(abs(sum(correlation(pair) for pair in group)) for group in RI_FREE_TERMS)
    return RiFreeResult(value=float(value), bound=ri_free_bound(phi), alice=alice, bob=bob)


def optimal_ri_free_angle() -> float:
    found = minimize_scalar(
        lambda phi: -4 * (1 + np.cos(phi)) / ri_free_bound(phi),
        bracket=(0.0, 0.3, np.pi / 2),
        method="golden",
        tol=1e-8,
    )
    return float(found.x)


def orthogonal_plane_chsh(theta: float, phi: float) -> float:
    """CHSH value when a2 lies in the xz plane and b2 in the xy plane; never above 2."""
    return float(2 * abs(1 + np.sin(phi / 2) ** 2 * (np.sin(theta) - 1)))


def sweep(phi_min: float, phi_max: float, step: float, visibility: float = 1.0) -> list[dict[str, float]]:
    """Rows (phi_deg, s_nlhv, nlhv_bound, s_chsh, chsh_bound) with angles in degrees."""
    if step <= 0 or phi_max < phi_min:
        raise ValidationError("sweep needs step > 0 and phi_max >= phi_min")
    rows = []
    for phi_deg in np.arange(phi_min, phi_max + step / 2, step):
        phi = np.radians(phi_deg)
        rows.append(
            {
                "phi_deg": float(phi_deg),
                "s_nlhv": nlhv_quantum_value(phi, visibility),
                "nlhv_bound": nlhv_bound(phi),
                "s_chsh": chsh_at_settings(phi, visibility),
                "chsh_bound": 2.0,
            }
        )
    return rows
