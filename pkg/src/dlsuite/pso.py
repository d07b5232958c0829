"""Swarm re-fit of resource-table values for wickets 0..3.

Fitness is the number of snapshots whose par-score prediction matches the
actual result under a candidate table. Two search modes are provided: an
independent one-dimensional swarm per grid cell (default) with the
decreasing-overs condition restored afterwards by a running-minimum
repair, and a 50-dimensional swarm per wicket column with the repair
applied to every particle position at every step.

Guarantees, regardless of mode:

* one particle starts at the base table, so the search never loses ground;
* a final no-regression check falls back to the base table outright if the
  repairs ever cost more correctness than the search gained;
* edited values are quantized to the table file's one-decimal format before
  the final fitness is measured, so written artifacts reproduce it exactly.

Cross-wicket monotonicity is not imposed on the search itself; the final
grid is nudged back into validity (columns are processed left to right when
``enforce_cross_wicket`` is set, otherwise a single lift pass at the end).
With ``constrained=False`` no monotone condition is applied at all and the
resulting table skips validation; it exists to measure how much accuracy
the decreasing condition costs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import Dataset, Winner
from .dls import N_OVERS, ResourceTable

EDITED_WICKETS = range(0, 4)

_FLOOR_EPS = 1e-9


class Mode(Enum):
    PER_CELL = "per-cell"
    PER_COLUMN = "per-column"


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 10
    c1: float = 2.0
    c2: float = 2.5
    generations: int = 50
    inertia: float = 0.7
    v_max: float = 0.2
    seed: int = 0
    mode: Mode = Mode.PER_CELL
    init_window: float = 15.0
    constrained: bool = True
    enforce_cross_wicket: bool = False

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0.0 < self.v_max <= 1.0:
            raise ValueError("v_max must be in (0, 1]")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be >= 0")
        if self.init_window <= 0:
            raise ValueError("init_window must be > 0")


@dataclass(frozen=True)
class OptimizationResult:
    optimized_table: ResourceTable
    baseline_fitness: int
    optimized_fitness: int
    fitness_trace: tuple[int, ...]


class _CellData:
    """Snapshots that read one grid cell, as flat arrays."""

    __slots__ = ("runs1", "runs2", "team1_won")

    def __init__(self, runs1, runs2, team1_won):
        self.runs1 = np.asarray(runs1, dtype=float)
        self.runs2 = np.asarray(runs2, dtype=float)
        self.team1_won = np.asarray(team1_won, dtype=bool)

    def correct_count(self, value: float) -> int:
        par = np.floor(self.runs1 * (100.0 - value) / 100.0 + _FLOOR_EPS)
        return int(np.count_nonzero((self.runs2 < par) == self.team1_won))


def index_cells(dataset: Dataset) -> dict:
    """Group snapshots by the (overs_left, wickets) cell they read.

    Snapshots at over 50 read no cell and are skipped.
    """
    acc: dict[tuple[int, int], list] = {}
    for match in dataset.matches:
        won1 = match.actual_winner is Winner.TEAM1
        for snap in dataset.snapshots_for(match.match_id):
            if snap.overs_bowled == N_OVERS:
                continue
            cell = (N_OVERS - snap.overs_bowled, snap.team2_wickets)
            acc.setdefault(cell, []).append((match.team1_runs, snap.team2_runs, won1))
    return {
        cell: _CellData(*zip(*rows))
        for cell, rows in acc.items()
    }


def edited_scope() -> tuple:
    """All cells the optimizer may touch: every over row, wickets 0..3."""
    return tuple(
        (overs_left, w) for w in EDITED_WICKETS for overs_left in range(N_OVERS, 0, -1)
    )


def fitness(candidate_values, dataset: Dataset, base_table: ResourceTable, scope) -> int:
    """Correctly classified snapshots in ``scope`` with candidates substituted.

    Values outside [0, 100] are clamped back in rather than rejected.
    """
    scope = list(scope)
    values = [min(100.0, max(0.0, float(v))) for v in candidate_values]
    if len(values) != len(scope):
        raise ValueError(
            f"{len(values)} candidate values for {len(scope)} scope cells"
        )
    cells = index_cells(dataset)
    return _fitness_indexed(values, scope, cells)


def _fitness_indexed(values, scope, cells) -> int:
    total = 0
    for value, cell in zip(values, scope):
        data = cells.get(cell)
        if data is not None:
            total += data.correct_count(value)
    return total


def repair_monotone(column) -> np.ndarray:
    """Running minimum from overs_left=50 downwards (index 0 first)."""
    col = np.asarray(column, dtype=float)
    return np.minimum.accumulate(col)


def _cell_seed(seed: int, overs_left: int, wickets: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((seed, overs_left, wickets))


def _pso_1d(count_fn, base_value, config: PsoConfig, rng, lo=0.0, hi=100.0):
    """One-dimensional swarm maximizing an integer count; returns
    (best_value, best_count, per-generation best counts)."""
    mu = config.swarm_size
    v_cap = config.v_max * 100.0
    x = np.empty(mu)
    x[0] = min(max(base_value, lo), hi)
    x[1:] = rng.uniform(
        max(lo, base_value - config.init_window),
        min(hi, base_value + config.init_window),
        size=mu - 1,
    )
    v = np.zeros(mu)
    pbest = x.copy()
    pbest_f = np.array([count_fn(xi) for xi in x])
    g = int(np.argmax(pbest_f))
    gbest, gbest_f = pbest[g], int(pbest_f[g])

    trace = []
    for _ in range(config.generations):
        for i in range(mu):
            r1, r2 = rng.random(2)
            v[i] = (
                config.inertia * v[i]
                + config.c1 * r1 * (pbest[i] - x[i])
                + config.c2 * r2 * (gbest - x[i])
            )
            v[i] = min(max(v[i], -v_cap), v_cap)
            x[i] = min(max(x[i] + v[i], lo), hi)
            f = count_fn(x[i])
            if f > pbest_f[i]:
                pbest[i], pbest_f[i] = x[i], f
                if f > gbest_f:
                    gbest, gbest_f = x[i], int(f)
        trace.append(gbest_f)
    return float(gbest), gbest_f, trace


def _pso_column(count_col_fn, base_col, config: PsoConfig, rng, lo_col, hi_col):
    """50-dimensional swarm over one wicket column; index 0 (overs_left=50)
    stays pinned to the base value and every position is kept feasible."""
    mu = config.swarm_size
    dim = N_OVERS
    v_cap = config.v_max * 100.0

    def feasible(pos):
        pos = np.clip(pos, lo_col, hi_col)
        pos[0] = base_col[0]
        if config.constrained:
            pos = repair_monotone(pos)
        return pos

    x = np.empty((mu, dim))
    x[0] = feasible(base_col.copy())
    for i in range(1, mu):
        x[i] = feasible(
            base_col + rng.uniform(-config.init_window, config.init_window, size=dim)
        )
    v = np.zeros((mu, dim))
    pbest = x.copy()
    pbest_f = np.array([count_col_fn(xi) for xi in x])
    g = int(np.argmax(pbest_f))
    gbest, gbest_f = pbest[g].copy(), int(pbest_f[g])

    trace = []
    for _ in range(config.generations):
        for i in range(mu):
            r1 = rng.random(dim)
            r2 = rng.random(dim)
            v[i] = (
                config.inertia * v[i]
                + config.c1 * r1 * (pbest[i] - x[i])
                + config.c2 * r2 * (gbest - x[i])
            )
            np.clip(v[i], -v_cap, v_cap, out=v[i])
            x[i] = feasible(x[i] + v[i])
            f = count_col_fn(x[i])
            if f > pbest_f[i]:
                pbest[i], pbest_f[i] = x[i].copy(), f
                if f > gbest_f:
                    gbest, gbest_f = x[i].copy(), int(f)
        trace.append(gbest_f)
    return gbest, gbest_f, trace


def optimize(
    dataset: Dataset, base_table: ResourceTable, config: PsoConfig, jobs: int = 1
) -> OptimizationResult:
    """Re-fit wickets 0..3; never returns a table that scores below the base."""
    cells = index_cells(dataset)
    scope = edited_scope()
    data_cells = [c for c in scope if c in cells]
    if not data_cells:
        raise ValueError("no dataset snapshots fall within wickets 0..3")

    base_values = [base_table.value(x, y) for (x, y) in scope]
    baseline_fitness = _fitness_indexed(base_values, scope, cells)

    grid = base_table.values.copy()
    gens = config.generations
    trace = np.zeros(gens, dtype=int)

    if config.mode is Mode.PER_CELL:
        def run_cell(cell):
            overs_left, w = cell
            rng = np.random.default_rng(_cell_seed(config.seed, overs_left, w))
            return cell, _pso_1d(
                cells[cell].correct_count, base_table.value(overs_left, w), config, rng
            )

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(run_cell, data_cells))
        else:
            results = [run_cell(cell) for cell in data_cells]
        for (overs_left, w), (value, _count, cell_trace) in results:
            grid[N_OVERS - overs_left, w] = value
            trace += np.asarray(cell_trace, dtype=int)
    else:
        hundred = np.full(N_OVERS, 100.0)
        for w in EDITED_WICKETS:
            col_cells = [
                (N_OVERS - overs_left, cells[(overs_left, w)])
                for overs_left in range(N_OVERS, 0, -1)
                if (overs_left, w) in cells
            ]
            if not col_cells:
                continue

            def count_col(position, col_cells=col_cells):
                return sum(d.correct_count(position[i]) for i, d in col_cells)

            if config.enforce_cross_wicket:
                hi_col = grid[:, w - 1] if w > 0 else hundred
                lo_col = base_table.values[:, w + 1]
            else:
                hi_col, lo_col = hundred, np.zeros(N_OVERS)
            rng = np.random.default_rng(_cell_seed(config.seed, 0, w))
            best_col, _f, col_trace = _pso_column(
                count_col, base_table.values[:, w].copy(), config, rng, lo_col, hi_col
            )
            grid[:, w] = best_col
            trace += np.asarray(col_trace, dtype=int)

    edited = list(EDITED_WICKETS)
    if config.constrained:
        for w in edited:
            grid[:, w] = repair_monotone(grid[:, w])
    grid[:, edited] = np.round(grid[:, edited], 1)
    if config.constrained:
        if config.enforce_cross_wicket and config.mode is Mode.PER_CELL:
            # sequential band clamp: each column fits under its left neighbour
            # and over its untouched right neighbour
            for w in edited:
                hi = grid[:, w - 1] if w > 0 else np.full(N_OVERS, 100.0)
                lo = base_table.values[:, w + 1]
                grid[:, w] = np.minimum(np.maximum(grid[:, w], lo), hi)
        else:
            for w in reversed(edited):
                grid[:, w] = np.maximum(grid[:, w], grid[:, w + 1])

    optimized_values = [grid[N_OVERS - x, y] for (x, y) in scope]
    optimized_fitness = _fitness_indexed(optimized_values, scope, cells)
    if optimized_fitness < baseline_fitness:
        grid = base_table.values.copy()
        optimized_fitness = baseline_fitness

    table = ResourceTable.from_grid(grid, validate=config.constrained)
    return OptimizationResult(
        optimized_table=table,
        baseline_fitness=baseline_fitness,
        optimized_fitness=optimized_fitness,
        fitness_trace=tuple(int(t) for t in trace),
    )
