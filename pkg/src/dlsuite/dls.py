"""Resource-table model, par scores, winner prediction and accuracy evaluation.

The table is a 50x10 grid of remaining-resource percentages indexed by
overs left (50 down to 1) and wickets lost (0..9). A chasing side that has
scored strictly less than the par score at the point of evaluation loses;
scoring the par or more wins.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .data import Dataset, ValidationError, Winner

N_OVERS = 50
N_WICKETS = 10

TABLE_COLUMNS = ["overs_left"] + [f"w{w}" for w in range(N_WICKETS)]

# Par rounding is floor; the epsilon keeps exact integer products from
# landing a hair below the integer in binary floating point.
_FLOOR_EPS = 1e-9


def validate_grid(values: np.ndarray) -> None:
    """Check shape, bounds, both monotonicity axes and the full-resource anchor."""
    if values.shape != (N_OVERS, N_WICKETS):
        raise ValidationError(
            f"resource grid must be {N_OVERS}x{N_WICKETS}, got {values.shape}"
        )
    if np.any(~np.isfinite(values)) or np.any(values < 0.0) or np.any(values > 100.0):
        raise ValidationError("resource values must be finite and within [0, 100]")
    if values[0, 0] != 100.0:
        raise ValidationError(
            f"value at (overs_left=50, wickets=0) must be 100.0, got {values[0, 0]}"
        )
    for w in range(N_WICKETS):
        col = values[:, w]
        bad = np.nonzero(np.diff(col) > 0)[0]
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"column wickets={w}: value rises from overs_left={N_OVERS - i} "
                f"({col[i]}) to overs_left={N_OVERS - i - 1} ({col[i + 1]})"
            )
    for i in range(N_OVERS):
        row = values[i, :]
        bad = np.nonzero(np.diff(row) > 0)[0]
        if bad.size:
            w = int(bad[0])
            raise ValidationError(
                f"row overs_left={N_OVERS - i}: value rises from wickets={w} "
                f"({row[w]}) to wickets={w + 1} ({row[w + 1]})"
            )


@dataclass(frozen=True)
class ResourceTable:
    """Immutable remaining-resource grid; row 0 is overs_left=50."""

    values: np.ndarray

    @staticmethod
    def from_grid(values, validate: bool = True) -> "ResourceTable":
        arr = np.asarray(values, dtype=float).copy()
        if validate:
            validate_grid(arr)
        elif arr.shape != (N_OVERS, N_WICKETS):
            raise ValidationError(
                f"resource grid must be {N_OVERS}x{N_WICKETS}, got {arr.shape}"
            )
        arr.flags.writeable = False
        return ResourceTable(values=arr)

    def value(self, overs_left: int, wickets_lost: int) -> float:
        if not 1 <= overs_left <= N_OVERS:
            raise ValueError(f"overs_left={overs_left} outside 1..{N_OVERS}")
        if not 0 <= wickets_lost <= N_WICKETS - 1:
            raise ValueError(f"wickets_lost={wickets_lost} outside 0..{N_WICKETS - 1}")
        return float(self.values[N_OVERS - overs_left, wickets_lost])

    def with_cells(self, cells: dict, validate: bool = True) -> "ResourceTable":
        """New table with ``{(overs_left, wickets): value}`` substituted."""
        arr = self.values.copy()
        for (overs_left, wickets), value in cells.items():
            arr[N_OVERS - overs_left, wickets] = value
        return ResourceTable.from_grid(arr, validate=validate)

    def __eq__(self, other):
        return isinstance(other, ResourceTable) and np.array_equal(
            self.values, other.values
        )

    def __hash__(self):
        return hash(self.values.tobytes())


def resource_value(table: ResourceTable, overs_left: int, wickets_lost: int) -> float:
    return table.value(overs_left, wickets_lost)


def par_score(
    team1_runs: int, table: ResourceTable, overs_left: int, wickets_lost: int
) -> int:
    """floor(team1_runs * (1 - resource/100)); the chase must reach this to be safe."""
    if team1_runs < 0:
        raise ValueError("team1_runs must be >= 0")
    rv = table.value(overs_left, wickets_lost)
    return int(math.floor(team1_runs * (100.0 - rv) / 100.0 + _FLOOR_EPS))


@dataclass(frozen=True)
class WinnerPrediction:
    predicted: Winner
    par_score: int


def predict_winner(par: int, team2_runs: int) -> WinnerPrediction:
    """Bowling side wins when the chase is short of par; par or better wins it."""
    predicted = Winner.TEAM1 if team2_runs < par else Winner.TEAM2
    return WinnerPrediction(predicted=predicted, par_score=par)


@dataclass(frozen=True)
class OverFilter:
    """Snapshot selector: a single checkpoint over or a half-open over range."""

    lo: int
    hi: int
    label: str

    @staticmethod
    def checkpoint(over: int) -> "OverFilter":
        if not 1 <= over <= N_OVERS:
            raise ValueError(f"checkpoint over {over} outside 1..{N_OVERS}")
        return OverFilter(lo=over, hi=over + 1, label=f"over {over}")

    @staticmethod
    def span(lo: int, hi: int) -> "OverFilter":
        if lo >= hi:
            raise ValueError(f"range [{lo}, {hi}) is empty")
        return OverFilter(lo=lo, hi=hi, label=f"overs {lo}-{hi}")

    @staticmethod
    def parse(text: str) -> "OverFilter":
        text = text.strip()
        if "-" in text:
            lo, hi = text.split("-", 1)
            return OverFilter.span(int(lo), int(hi))
        return OverFilter.checkpoint(int(text))

    def contains(self, overs_bowled: int) -> bool:
        return self.lo <= overs_bowled < self.hi


@dataclass(frozen=True)
class AccuracyReport:
    n_samples: int
    n_correct: int
    accuracy: float
    selection: str


def evaluate(dataset: Dataset, table: ResourceTable, selection: OverFilter) -> AccuracyReport:
    """Prediction accuracy over the selected snapshots.

    Snapshots at over 50 are skipped: with no overs left the chase is decided
    by direct comparison, not by a par score.
    """
    n = 0
    correct = 0
    for match in dataset.matches:
        for snap in dataset.snapshots_for(match.match_id):
            if snap.overs_bowled == N_OVERS:
                continue
            if not selection.contains(snap.overs_bowled):
                continue
            par = par_score(
                match.team1_runs, table, N_OVERS - snap.overs_bowled, snap.team2_wickets
            )
            n += 1
            if predict_winner(par, snap.team2_runs).predicted is match.actual_winner:
                correct += 1
    if n == 0:
        raise ValueError(f"no snapshots match selection {selection.label!r}")
    return AccuracyReport(
        n_samples=n, n_correct=correct, accuracy=correct / n, selection=selection.label
    )


def load_table(path) -> ResourceTable:
    """Read a resource table CSV (rows overs_left 50..1, columns w0..w9)."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TABLE_COLUMNS:
            raise ValidationError(f"{path}: bad table header {header}")
        rows = list(reader)
    if len(rows) != N_OVERS:
        raise ValidationError(f"{path}: expected {N_OVERS} data rows, got {len(rows)}")
    grid = np.empty((N_OVERS, N_WICKETS), dtype=float)
    for i, row in enumerate(rows):
        expected_overs = N_OVERS - i
        if len(row) != N_WICKETS + 1 or int(row[0]) != expected_overs:
            raise ValidationError(
                f"{path}: row {i + 2} must start with overs_left={expected_overs}"
            )
        grid[i, :] = [float(v) for v in row[1:]]
    return ResourceTable.from_grid(grid)


def save_table(path, table: ResourceTable) -> None:
    """Write in the bundled format: one fractional digit per value."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        for i in range(N_OVERS):
            writer.writerow(
                [N_OVERS - i] + [f"{v:.1f}" for v in table.values[i, :]]
            )


@lru_cache(maxsize=1)
def default_table() -> ResourceTable:
    """The table bundled with the package."""
    ref = resources.files("dlsuite").joinpath("tables/resource_table.csv")
    with resources.as_file(ref) as path:
        return load_table(path)
