"""Brute-force verification machinery, independent of the solver.

Exhaustively enumerates paths, searches every distinct cell by uniform
sampling plus coordinate pattern search, and generates random feasible
instances by planting a solution.  Intended for desk-scale cross-checks
of solver output, not for production optimization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PathSpaceTooLargeError
from .expr import evaluate_many
from .fre import (
    Instance,
    compute_candidate_sets,
    compute_max_solution,
    path_space_size,
)
from .problems import Problem

DEFAULT_PATH_CAP = 10**6
DEFAULT_SAMPLES_PER_CELL = 200
DEFAULT_REFINE_STEPS = 20

#: Pattern-search passes allowed per step size before forcing a halving.
MAX_PASSES_PER_LEVEL = 200


@dataclass(frozen=True)
class OracleReport:
    problem: str
    path_count: int
    best_value: float
    best_point: np.ndarray
    cells_examined: int
    samples_per_cell: int

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "path_count": self.path_count,
            "best_value": self.best_value,
            "best_point": [float(v) for v in self.best_point],
            "cells_examined": self.cells_examined,
            "samples_per_cell": self.samples_per_cell,
        }


def enumerate_paths(sets: list[np.ndarray], cap: int = DEFAULT_PATH_CAP) -> np.ndarray:
    """All paths in lexicographic order as an (|E|, m) int array.

    Raises :class:`PathSpaceTooLargeError` (carrying the exact count)
    when the product of candidate-set sizes exceeds ``cap``.
    """
    size = path_space_size(sets)
    if size > cap:
        raise PathSpaceTooLargeError(size, cap)
    grids = np.meshgrid(*sets, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1).astype(np.int64)


def _cell_lower_bounds(paths: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Lower corners for every path row, vectorized ((N, m) -> (N, n))."""
    N, m = paths.shape
    lows = np.zeros((N, n))
    rows = np.arange(N)
    for i in range(m):
        np.maximum.at(lows, (rows, paths[:, i]), b[i])
    return lows


def _pattern_search(
    problem: Problem, lows: np.ndarray, upper: np.ndarray, start: np.ndarray,
    values: np.ndarray, refine_steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate pattern search inside each cell, run on all cells at once.

    Starts from ``start`` (one point per cell, objective ``values``),
    with an initial step of half the largest cell edge.  At each step
    size, coordinate passes repeat until none improves, then the step
    halves; ``refine_steps`` halvings total.  Iterates never leave their
    cell, so every visited point stays feasible.
    """
    n = lows.shape[1]
    x = start.copy()
    fx = values.copy()
    step = 0.5 * (upper - lows).max(axis=1)
    step = np.maximum(step, 1e-16)  # degenerate cells: harmless no-op moves
    for _ in range(refine_steps):
        for _ in range(MAX_PASSES_PER_LEVEL):
            improved = False
            for j in range(n):
                for sign in (-1.0, 1.0):
                    cand = x.copy()
                    cand[:, j] = np.clip(x[:, j] + sign * step, lows[:, j], upper[j])
                    moved = cand[:, j] != x[:, j]
                    if not moved.any():
                        continue
                    fc = np.full_like(fx, np.inf)
                    fc[moved] = evaluate_many(problem.objective, cand[moved])
                    better = fc < fx
                    if better.any():
                        x[better] = cand[better]
                        fx[better] = fc[better]
                        improved = True
            if not improved:
                break
        step *= 0.5
    return x, fx


def reference_optimum(
    problem: Problem,
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
    refine_steps: int = DEFAULT_REFINE_STEPS,
    rng: np.random.Generator | None = None,
    cap: int = DEFAULT_PATH_CAP,
) -> OracleReport:
    """Dense search of the whole feasible region, cell by cell.

    Enumerates every path (within ``cap``), deduplicates the cells they
    span, draws ``samples_per_cell`` uniform points per cell (plus both
    corners) and refines each cell's best sample by clamped coordinate
    pattern search.  The returned best is the minimum over cells; on
    exact ties the cell with the lexicographically smallest lower corner
    wins.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    inst = problem.instance
    xbar = compute_max_solution(inst)
    sets = compute_candidate_sets(inst, xbar)
    paths = enumerate_paths(sets, cap)
    lows = np.unique(_cell_lower_bounds(paths, inst.b, inst.n), axis=0)
    K, n = lows.shape

    best_x = np.empty((K, n))
    best_f = np.full(K, np.inf)
    for k in range(K):
        span = xbar - lows[k]
        X = lows[k] + rng.random((samples_per_cell, n)) * span
        X = np.vstack([lows[k][None, :], xbar[None, :], X])
        vals = evaluate_many(problem.objective, X)
        i = int(np.argmin(vals))
        best_x[k] = X[i]
        best_f[k] = vals[i]

    best_x, best_f = _pattern_search(problem, lows, xbar, best_x, best_f, refine_steps)
    winner = int(np.argmin(best_f))  # first minimum = lexicographically least cell
    return OracleReport(
        problem=problem.name,
        path_count=int(paths.shape[0]),
        best_value=float(best_f[winner]),
        best_point=best_x[winner].copy(),
        cells_examined=K,
        samples_per_cell=samples_per_cell,
    )


def random_feasible_instance(
    m: int, n: int, density: float = 1.0, rng: np.random.Generator | None = None
) -> Instance:
    """Instance that is feasible by construction.

    Plants a uniform point, draws A uniformly (dropping entries to zero
    with probability 1 - density) and sets b to the composition of A
    with the planted point.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if rng is None:
        rng = np.random.default_rng()
    planted = rng.random(n)
    A = rng.random((m, n))
    if density < 1.0:
        A[rng.random((m, n)) >= density] = 0.0
    b = np.minimum(A, planted).max(axis=1)
    return Instance(A, b)
