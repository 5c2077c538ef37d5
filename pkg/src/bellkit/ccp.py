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

"""Communication-complexity tasks backed by Bell inequalities.

Qubit task: N partners answer a weighted function of their setting
angles; the best classical protocol is limited by the local-realistic bound
of the M-setting inequality, while a shared GHZ state reaches M^N/2.

Qudit task: two partners with one bit and one dit each. Outcome tables are
indexed ``P[x, y, a, b]`` by the input bits and the output dits. The
uniformly random dits multiply answer and target alike and are integrated
out, so only the four bit combinations are enumerated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import Any, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .bellgen import MAX_BRUTEFORCE_SETTINGS, lr_bound_bruteforce, msetting_angles, msetting_inequality, quantum_value
from .config import ALGEBRAIC_TOL, OptimizerConfig
from .errors import GuardError, ValidationError
from .optimize import counter_rng, run_parallel
from .qstate import BlochVector, NamedStateSpec, correlation_tensor, make_state

LOGGER = logging.getLogger("bellkit.ccp")

MAX_WEIGHT_TERMS = 10**6
CGLMP_DIMENSIONS = range(3, 9)
CLASSICAL_DELTA_BOUND = 0.5


@dataclass(frozen=True)
class QubitCcpInstance:
    parties: int
    settings: int

    def __post_init__(self) -> None:
        if self.parties < 2 or self.settings < 2:
            raise ValidationError("the qubit task needs N >= 2 and M >= 2")
        if self.settings**self.parties > MAX_WEIGHT_TERMS:
            raise GuardError(f"M^N = {self.settings ** self.parties} weight terms exceed {MAX_WEIGHT_TERMS}")

    @property
    def normalization(self) -> float:
        """Sum of |cos(phi_m1 + ... + phi_mN)| over all setting tuples."""
        return weight_normalization(self.parties, self.settings)


def weight_normalization(parties: int, settings: int) -> float:
    if settings**parties > MAX_WEIGHT_TERMS:
        raise GuardError(f"M^N = {settings ** parties} weight terms exceed {MAX_WEIGHT_TERMS}")
    return float(np.sum(np.abs(msetting_inequality(parties, settings).dense())))


def classical_average_success(parties: int, settings: int) -> float:
    """(F, A) of the best classical protocol: the local-realistic bound over the normalization."""
    ineq = msetting_inequality(parties, settings)
    if parties * settings <= MAX_BRUTEFORCE_SETTINGS:
        bound = lr_bound_bruteforce(ineq)
    else:
        bound = ineq.lr_bound
    return bound / weight_normalization(parties, settings)


def quantum_average_success(parties: int, settings: int) -> float:
    """(F, A) when the partners share a GHZ state and measure at the inequality angles."""
    ineq = msetting_inequality(parties, settings)
    tensor = correlation_tensor(make_state(NamedStateSpec.ghz(parties)), parties)
    angles = msetting_angles(parties, settings)
    local = [BlochVector.equatorial(phi) for phi in angles]
    value = quantum_value(ineq, tensor, [local] * parties)
    return value / weight_normalization(parties, settings)


def qubit_ccp_success(parties: int, settings: int, strategy: str = "quantum_ghz") -> float:
    """P_correct = (1 + (F, A)) / 2."""
    QubitCcpInstance(parties, settings)
    if strategy == "classical_optimal":
        average = classical_average_success(parties, settings)
    elif strategy == "quantum_ghz":
        average = quantum_average_success(parties, settings)
    else:
        raise ValidationError(f"unknown strategy {strategy!r}; expected classical_optimal or quantum_ghz")
    return 0.5 * (1 + average)


def advantage_table(parties: Sequence[int], settings: Sequence[int]) -> list[dict[str, Any]]:
    rows = []
    for n, m in product(parties, settings):
        classical = qubit_ccp_success(n, m, "classical_optimal")
        quantum = qubit_ccp_success(n, m, "quantum_ghz")
        rows.append(
            {
                "N": n,
                "M": m,
                "p_classical": classical,
                "p_quantum": quantum,
                "ratio": quantum / classical,
            }
        )
    return rows


def cglmp_coefficients(d: int) -> np.ndarray:
    """Coefficients C[xa, xb, A, B] with I_d = sum C * P(A, B | xa, xb)."""
    if d < 2:
        raise ValidationError("CGLMP needs at least two outcomes")
    coefficients = np.zeros((2, 2, d, d))
    outcomes = np.arange(d)
    for k in range(d // 2):
        weight = 1 - 2 * k / (d - 1)
        # P(A1 = B1 + k) - P(A1 = B1 - k - 1)
        coefficients[0, 0, (outcomes + k) % d, outcomes] += weight
        coefficients[0, 0, (outcomes - k - 1) % d, outcomes] -= weight
        # P(B1 = A2 + k + 1) - P(B1 = A2 - k)
        coefficients[1, 0, outcomes, (outcomes + k + 1) % d] += weight
        coefficients[1, 0, outcomes, (outcomes - k) % d] -= weight
        # P(A2 = B2 + k) - P(A2 = B2 - k - 1)
        coefficients[1, 1, (outcomes + k) % d, outcomes] += weight
        coefficients[1, 1, (outcomes - k - 1) % d, outcomes] -= weight
        # P(B2 = A1 + k) - P(B2 = A1 - k - 1)
        coefficients[0, 1, outcomes, (outcomes + k) % d] += weight
        coefficients[0, 1, outcomes, (outcomes - k - 1) % d] -= weight
    return coefficients


def _require_table(table: np.ndarray) -> np.ndarray:
    table = np.asarray(table, dtype=float)
    if table.ndim != 4 or table.shape[:2] != (2, 2) or table.shape[2] != table.shape[3]:
        raise ValidationError(f"outcome table must have shape (2, 2, d, d), got {table.shape}")
    if np.any(table < -ALGEBRAIC_TOL) or np.max(np.abs(table.sum(axis=(2, 3)) - 1)) > 1e-9:
        raise ValidationError("outcome table rows are not probability distributions")
    return table


def cglmp_value(table: np.ndarray) -> float:
    """I_d of a joint table in CGLMP labels ``P[xa, xb, A, B]``."""
    table = _require_table(table)
    return float(np.sum(cglmp_coefficients(table.shape[2]) * table))


def to_cglmp_labels(table: np.ndarray) -> np.ndarray:
    """Relabel a task table: P[x, y, a, b] = P_cglmp[y, 1 - x, -b, a]."""
    table = _require_table(table)
    d = table.shape[2]
    relabeled = np.zeros_like(table)
    for x, y, a, b in product(range(2), range(2), range(d), range(d)):
        relabeled[y, 1 - x, (-b) % d, a] = table[x, y, a, b]
    return relabeled


def _sum_distribution(table: np.ndarray) -> np.ndarray:
    """P_xy(n) = P(a + b = n mod d | x, y)."""
    d = table.shape[2]
    totals = np.add.outer(np.arange(d), np.arange(d)) % d
    return np.stack([np.bincount(totals.ravel(), weights=table[x, y].ravel(), minlength=d)
                     for x, y in product(range(2), range(2))]).reshape(2, 2, d)


def qudit_ccp_delta_from_table(table: np.ndarray) -> float:
    """Delta = sum_k (1 - 2k/(d-1)) (P(f_k^+) - P(f_k^-)) over the four equally likely bit pairs."""
    table = _require_table(table)
    d = table.shape[2]
    p = _sum_distribution(table)
    delta = 0.0
    for k in range(d // 2):
        weight = 1 - 2 * k / (d - 1)
        plus = p[0, 1, (-k) % d] + p[1, 1, (k + 1) % d] + p[1, 0, (-k) % d] + p[0, 0, k % d]
        minus = p[0, 1, (k + 1) % d] + p[1, 1, (-k) % d] + p[1, 0, (k + 1) % d] + p[0, 0, (-(k + 1)) % d]
        delta += weight * (plus - minus) / 4
    return float(delta)


@dataclass(frozen=True, eq=False)
class QuditCcpStrategy:
    """A classical protocol (answer tables over shared lambda) or a quantum one.

    Classical: ``a_table[lam, x]`` and ``b_table[lam, y]`` are output dits,
    ``weights[lam]`` the shared-randomness distribution. Quantum: ``state``
    is the d x d amplitude matrix and each basis holds outcome vectors as
    columns, one basis per input bit.
    """

    kind: str
    d: int
    a_table: Optional[np.ndarray] = None
    b_table: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    state: Optional[np.ndarray] = None
    alice_bases: tuple[np.ndarray, ...] = ()
    bob_bases: tuple[np.ndarray, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "classical":
            if self.a_table is None or self.b_table is None or self.weights is None:
                raise ValidationError("a classical strategy needs answer tables and weights")
            a_table = np.asarray(self.a_table, dtype=int) % self.d
            b_table = np.asarray(self.b_table, dtype=int) % self.d
            weights = np.asarray(self.weights, dtype=float)
            if a_table.shape != (weights.size, 2) or b_table.shape != (weights.size, 2):
                raise ValidationError("answer tables must have shape (len(weights), 2)")
            if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-9:
                raise ValidationError("shared-randomness weights must form a distribution")
            object.__setattr__(self, "a_table", a_table)
            object.__setattr__(self, "b_table", b_table)
            object.__setattr__(self, "weights", weights)
        elif self.kind == "quantum":
            if self.state is None or len(self.alice_bases) != 2 or len(self.bob_bases) != 2:
                raise ValidationError("a quantum strategy needs a state and two bases per partner")
            state = np.asarray(self.state, dtype=complex).reshape(self.d, self.d)
            if abs(np.linalg.norm(state) - 1) > ALGEBRAIC_TOL:
                raise ValidationError("quantum strategy state is not normalized")
            for basis in self.alice_bases + self.bob_bases:
                basis = np.asarray(basis)
                if basis.shape != (self.d, self.d) or np.max(np.abs(basis.conj().T @ basis - np.eye(self.d))) > 1e-9:
                    raise ValidationError("measurement bases must be d x d unitaries")
            object.__setattr__(self, "state", state)
        else:
            raise ValidationError(f"unknown strategy kind {self.kind!r}")

    def table(self) -> np.ndarray:
        d = self.d
        table = np.zeros((2, 2, d, d))
        if self.kind == "classical":
            for lam, weight in enumerate(self.weights):
                for x, y in product(range(2), range(2)):
                    table[x, y, self.a_table[lam, x], self.b_table[lam, y]] += weight
            return table
        for x, y in product(range(2), range(2)):
            amplitudes = self.alice_bases[x].conj().T @ self.state @ self.bob_bases[y].conj()
            table[x, y] = np.abs(amplitudes) ** 2
        return table


def qudit_ccp_delta(strategy: QuditCcpStrategy) -> float:
    return qudit_ccp_delta_from_table(strategy.table())


def intuitive_classical_strategy(d: int) -> QuditCcpStrategy:
    """Both partners always answer the zero dit."""
    return QuditCcpStrategy("classical", d, np.zeros((1, 2)), np.zeros((1, 2)), np.ones(1))


def random_classical_strategy(d: int, rng: np.random.Generator, outcomes: int = 8) -> QuditCcpStrategy:
    return QuditCcpStrategy(
        "classical",
        d,
        rng.integers(0, d, size=(outcomes, 2)),
        rng.integers(0, d, size=(outcomes, 2)),
        rng.dirichlet(np.ones(outcomes)),
    )


def classical_delta(a_table: np.ndarray, b_table: np.ndarray, weights: np.ndarray, d: int) -> float:
    return qudit_ccp_delta(QuditCcpStrategy("classical", d, a_table, b_table, weights))


def classical_delta_max(d: int) -> float:
    """Best Delta over every deterministic answer pair; mixtures cannot exceed it."""
    best = -np.inf
    answers = list(product(range(d), repeat=2))
    for alice in answers:
        for bob in answers:
            value = classical_delta(np.array([alice]), np.array([bob]), np.ones(1), d)
            best = max(best, value)
    return float(best)


def canonical_phases(d: int) -> np.ndarray:
    """Phase offsets of the standard settings: Alice 0 and 1/2, Bob 1/4 and -1/4."""
    j = np.arange(d)
    shifts = (0.0, 0.5, -0.25, 0.25)
    # Bob's bases carry the conjugate Fourier sign, so his offsets enter negated.
    return np.array([2 * np.pi / d * j * shift for shift in shifts])


def cglmp_bases(phases: np.ndarray) -> tuple[np.ndarray, ...]:
    """Fourier-type bases |k> = d^{-1/2} sum_j exp(+-i 2 pi jk/d + i phi_j) |j> for A1, A2, B1, B2."""
    phases = np.asarray(phases, dtype=float)
    d = phases.shape[1]
    j = np.arange(d)
    grid = 2 * np.pi / d * np.outer(j, j)
    bases = []
    for index, row in enumerate(phases):
        sign = 1 if index < 2 else -1
        bases.append(np.exp(1j * (sign * grid + row[:, np.newaxis])) / np.sqrt(d))
    return tuple(bases)


def cglmp_bell_operator(d: int, bases: Sequence[np.ndarray]) -> np.ndarray:
    """sum_{xa, xb, A, B} C[xa, xb, A, B] |A><A|_xa (x) |B><B|_xb."""
    if len(bases) != 4:
        raise ValidationError("expected bases A1, A2, B1, B2")
    coefficients = cglmp_coefficients(d)
    operator = np.zeros((d * d, d * d), dtype=complex)
    for xa, xb in product(range(2), range(2)):
        joint = np.kron(bases[xa], bases[2 + xb])
        operator += (joint * coefficients[xa, xb].reshape(-1)) @ joint.conj().T
    return 0.5 * (operator + operator.conj().T)


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d).reshape(-1) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class CglmpResult:
    d: int
    value: float
    state: np.ndarray
    bases: tuple[np.ndarray, ...]
    converged: bool = True
    restarts: int = 1
    maximally_entangled: bool = False

    @property
    def schmidt_coefficients(self) -> np.ndarray:
        return np.linalg.svd(self.state.reshape(self.d, self.d), compute_uv=False)

    def table(self) -> np.ndarray:
        """Joint outcome table in CGLMP labels."""
        psi = self.state.reshape(self.d, self.d)
        table = np.zeros((2, 2, self.d, self.d))
        for xa, xb in product(range(2), range(2)):
            table[xa, xb] = np.abs(self.bases[xa].conj().T @ psi @ self.bases[2 + xb].conj()) ** 2
        return table

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "I_d": self.value,
            "schmidt_coefficients": self.schmidt_coefficients,
            "converged": self.converged,
            "restarts": self.restarts,
            "maximally_entangled": self.maximally_entangled,
        }


def _cglmp_objective(d: int, fixed_state: Optional[np.ndarray]):
    def evaluate(flat: np.ndarray) -> tuple[float, np.ndarray]:
        phases = np.concatenate([np.zeros((4, 1)), flat.reshape(4, d - 1)], axis=1)
        operator = cglmp_bell_operator(d, cglmp_bases(phases))
        if fixed_state is not None:
            return float(np.real(np.vdot(fixed_state, operator @ fixed_state))), fixed_state
        values, vectors = np.linalg.eigh(operator)
        return float(values[-1]), vectors[:, -1]

    return evaluate


def cglmp_optimize(
    d: int,
    config: Optional[OptimizerConfig] = None,
    maximally_entangled_only: bool = False,
) -> CglmpResult:
    """Maximize I_d over Fourier-type measurement phases and the shared state.

    For fixed measurements the best state is the top eigenvector of the
    Bell operator. Restart 0 starts from the standard settings, the others
    from seeded random phases; each is refined by Nelder-Mead.
    """
    if d not in CGLMP_DIMENSIONS:
        raise ValidationError(f"CGLMP optimization supports d in 3..8, got {d}")
    config = config or OptimizerConfig(restarts=4)
    fixed = maximally_entangled(d) if maximally_entangled_only else None
    evaluate = _cglmp_objective(d, fixed)
    start0 = canonical_phases(d)[:, 1:].reshape(-1)
    starts = [start0]
    for block in range(1, config.restarts):
        starts.append(counter_rng(config.seed, block).uniform(-np.pi, np.pi, size=start0.size))

    def refine(start: np.ndarray) -> tuple[float, np.ndarray, bool]:
        found = minimize(
            lambda flat: -evaluate(flat)[0],
            start,
            method="Nelder-Mead",
            options={"xatol": config.step_tol, "fatol": config.value_tol * 1e-3, "maxiter": config.max_iters * start.size},
        )
        return -float(found.fun), np.asarray(found.x), bool(found.success)

    outcomes = run_parallel(refine, starts)
    best = 0
    for index, outcome in enumerate(outcomes):
        if outcome[0] > outcomes[best][0]:
            best = index
    value, flat, converged = outcomes[best]
    if not converged:
        LOGGER.warning("CGLMP optimization for d=%d did not converge; best value %.12g", d, value)
    value, state = evaluate(flat)
    phases = np.concatenate([np.zeros((4, 1)), flat.reshape(4, d - 1)], axis=1)
    LOGGER.info("CGLMP d=%d maximum %.12g (restart %d of %d)", d, value, best, len(starts))
    return CglmpResult(
        d=d,
        value=value,
        state=state,
        bases=cglmp_bases(phases),
        converged=converged,
        restarts=len(starts),
        maximally_entangled=maximally_entangled_only,
    )


def strategy_from_cglmp(result: CglmpResult) -> QuditCcpStrategy:
    """Quantum protocol whose task table is the relabeled CGLMP table.

    The task's Alice holds the CGLMP second system and measures its setting
    1 - x; the task's Bob measures the CGLMP first-system setting y and
    reports the negated outcome.
    """
    d = result.d
    psi = result.state.reshape(d, d).T
    negate = (-np.arange(d)) % d
    alice = (result.bases[3], result.bases[2])
    bob = (result.bases[0][:, negate], result.bases[1][:, negate])
    return QuditCcpStrategy("quantum", d, state=psi, alice_bases=alice, bob_bases=bob)


def qudit_table(dimensions: Sequence[int], config: Optional[OptimizerConfig] = None) -> list[dict[str, Any]]:
    """Rows (d, I_d max, Delta_Q, Delta_Q - Delta_C)."""
    rows = []
    for d in dimensions:
        result = cglmp_optimize(d, config)
        delta_q = qudit_ccp_delta(strategy_from_cglmp(result))
        delta_c = classical_delta_max(d)
        rows.append(
            {
                "d": d,
                "I_d": result.value,
                "delta_quantum": delta_q,
                "delta_classical": delta_c,
                "advantage": delta_q - delta_c,
            }
        )
    return rows
