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

"""Seeded derivative-free maximization and the shared worker pool."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np
from scipy.optimize import minimize_scalar

from .config import OptimizerConfig, get_settings

LOGGER = logging.getLogger("bellkit.optimize")

T = TypeVar("T")
R = TypeVar("R")

# Counter blocks reserved per restart or sampling chunk.
COUNTER_STRIDE = 1 << 32


def counter_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based generator for the given block; independent of worker identity."""
    bit_generator = np.random.Philox(key=seed)
    return np.random.Generator(bit_generator.advance(block * COUNTER_STRIDE))


def run_parallel(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> list[R]:
    """Apply ``fn`` to every item, returning results in submission order."""
    jobs = list(items)
    workers = threads if threads is not None else get_settings().threads
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


@dataclass(frozen=True)
class SearchResult:
    value: float
    params: np.ndarray
    converged: bool
    restarts: int
    best_restart: int


def _coordinate_ascent(
    objective: Callable[[np.ndarray], float],
    start: np.ndarray,
    config: OptimizerConfig,
) -> tuple[float, np.ndarray, bool]:
    params = np.array(start, dtype=float)
    value = float(objective(params))
    for _ in range(config.max_iters):
        previous = value
        for index in range(params.size):
            center = params[index]

            def along(x: float, index: int = index) -> float:
                trial = params.copy()
                trial[index] = x
                return -float(objective(trial))

            found = minimize_scalar(
                along,
                bounds=(center - np.pi, center + np.pi),
                method="bounded",
                options={"xatol": config.step_tol},
            )
            candidate = -float(found.fun)
            if candidate > value:
                params[index] = float(found.x)
                value = candidate
        if value - previous < config.value_tol:
            return value, params, True
    return value, params, False


def maximize(
    objective: Callable[[np.ndarray], float],
    n_params: int,
    config: OptimizerConfig,
    initial: Optional[Sequence[np.ndarray]] = None,
    label: str = "objective",
) -> SearchResult:
    """Maximize over angle parameters with seeded random restarts.

    Restarts begin with the supplied ``initial`` points (identity frames when
    none are given) followed by uniform random angles. The reduction keeps
    the first restart reaching the maximum value.
    """
    starts: list[np.ndarray] = [np.asarray(p, dtype=float) for p in (initial or [np.zeros(n_params)])]
    for block in range(len(starts), config.restarts):
        rng = counter_rng(config.seed, block)
        starts.append(rng.uniform(-np.pi, np.pi, size=n_params))
    starts = starts[: max(config.restarts, 1)]

    def run(indexed: tuple[int, np.ndarray]) -> tuple[float, np.ndarray, bool]:
        index, start = indexed
        outcome = _coordinate_ascent(objective, start, config)
        LOGGER.debug("%s restart=%d value=%.12g converged=%s", label, index, outcome[0], outcome[2])
        return outcome

    outcomes = run_parallel(run, list(enumerate(starts)))
    best_index = 0
    for index, outcome in enumerate(outcomes):
        if outcome[0] > outcomes[best_index][0]:
            best_index = index
    value, params, converged = outcomes[best_index]
    if not converged:
        LOGGER.warning(
            "%s did not converge within %d sweeps; best value %.12g",
            label,
            config.max_iters,
            value,
        )
    else:
        LOGGER.info("%s maximum %.12g (restart %d of %d)", label, value, best_index, len(starts))
    return SearchResult(
        value=value,
        params=params,
        converged=converged,
        restarts=len(starts),
        best_restart=best_index,
    )
