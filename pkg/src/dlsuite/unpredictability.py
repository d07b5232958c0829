"""Per-team par-prediction failure rates at the 40th over, and team rankings.

For each team and role (chasing or defending) a 2x2 matrix counts actual
results against the 40th-over par-score prediction. A scenario's failing
percentage divides the mispredicted count by that actual-outcome row total,
e.g. "won while chasing" is the share of the team's chasing wins that the
prediction called for the other side. Teams with fewer than ``min_matches``
qualifying matches in the role are left out of rankings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .data import Dataset, Winner, canonical_key
from .dls import N_OVERS, ResourceTable, par_score, predict_winner

INDEX_OVER = 40


class Role(Enum):
    CHASING = "chasing"
    DEFENDING = "defending"


class Scenario(Enum):
    WON_CHASING = "won_chasing"
    LOST_CHASING = "lost_chasing"
    WON_DEFENDING = "won_defending"
    LOST_DEFENDING = "lost_defending"

    @property
    def role(self) -> Role:
        return Role.CHASING if self in (Scenario.WON_CHASING, Scenario.LOST_CHASING) else Role.DEFENDING


@dataclass(frozen=True)
class ConfusionMatrix2:
    """Counts indexed (actual result, predicted result)."""

    t1_pred_t1: int = 0
    t1_pred_t2: int = 0
    t2_pred_t1: int = 0
    t2_pred_t2: int = 0

    def count(self, actual: Winner, predicted: Winner) -> int:
        grid = {
            (Winner.TEAM1, Winner.TEAM1): self.t1_pred_t1,
            (Winner.TEAM1, Winner.TEAM2): self.t1_pred_t2,
            (Winner.TEAM2, Winner.TEAM1): self.t2_pred_t1,
            (Winner.TEAM2, Winner.TEAM2): self.t2_pred_t2,
        }
        return grid[(actual, predicted)]

    def row_total(self, actual: Winner) -> int:
        if actual is Winner.TEAM1:
            return self.t1_pred_t1 + self.t1_pred_t2
        return self.t2_pred_t1 + self.t2_pred_t2

    @property
    def total(self) -> int:
        return self.t1_pred_t1 + self.t1_pred_t2 + self.t2_pred_t1 + self.t2_pred_t2

    def __add__(self, other: "ConfusionMatrix2") -> "ConfusionMatrix2":
        return ConfusionMatrix2(
            self.t1_pred_t1 + other.t1_pred_t1,
            self.t1_pred_t2 + other.t1_pred_t2,
            self.t2_pred_t1 + other.t2_pred_t1,
            self.t2_pred_t2 + other.t2_pred_t2,
        )


@dataclass(frozen=True)
class ScenarioScore:
    team: str
    scenario: Scenario
    failing_count: int
    scenario_total: int
    percentage: float  # fraction in [0, 1]
    n_matches: int


@dataclass(frozen=True)
class Ranking:
    scenario: Scenario
    scores: tuple[ScenarioScore, ...]  # descending percentage, rank = position + 1


def team_confusion_at_40(
    dataset: Dataset, table: ResourceTable, team: str, role: Role
) -> ConfusionMatrix2:
    """Actual-vs-predicted counts over the team's matches in the role that
    still had a live chase after the 40th over."""
    key = canonical_key(team)
    counts = {
        (Winner.TEAM1, Winner.TEAM1): 0,
        (Winner.TEAM1, Winner.TEAM2): 0,
        (Winner.TEAM2, Winner.TEAM1): 0,
        (Winner.TEAM2, Winner.TEAM2): 0,
    }
    for match in dataset.matches:
        side = match.team2 if role is Role.CHASING else match.team1
        if canonical_key(side) != key:
            continue
        snap = next(
            (
                s
                for s in dataset.snapshots_for(match.match_id)
                if s.overs_bowled == INDEX_OVER
            ),
            None,
        )
        if snap is None:
            continue
        par = par_score(
            match.team1_runs, table, N_OVERS - INDEX_OVER, snap.team2_wickets
        )
        predicted = predict_winner(par, snap.team2_runs).predicted
        counts[(match.actual_winner, predicted)] += 1
    return ConfusionMatrix2(
        t1_pred_t1=counts[(Winner.TEAM1, Winner.TEAM1)],
        t1_pred_t2=counts[(Winner.TEAM1, Winner.TEAM2)],
        t2_pred_t1=counts[(Winner.TEAM2, Winner.TEAM1)],
        t2_pred_t2=counts[(Winner.TEAM2, Winner.TEAM2)],
    )


# (actual row giving the denominator, predicted value that counts as a miss)
_SCENARIO_CELLS = {
    Scenario.WON_CHASING: (Winner.TEAM2, Winner.TEAM1),
    Scenario.LOST_CHASING: (Winner.TEAM1, Winner.TEAM2),
    Scenario.WON_DEFENDING: (Winner.TEAM1, Winner.TEAM2),
    Scenario.LOST_DEFENDING: (Winner.TEAM2, Winner.TEAM1),
}


def failing_percentage(
    matrix: ConfusionMatrix2, scenario: Scenario, team: str = ""
) -> tuple[int, int, float]:
    """(failing count, scenario total, fraction) for one matrix and scenario."""
    actual, missed_as = _SCENARIO_CELLS[scenario]
    total = matrix.row_total(actual)
    if total == 0:
        who = f" for {team}" if team else ""
        raise ValueError(f"{scenario.value}{who}: no matches in the scenario row")
    failing = matrix.count(actual, missed_as)
    return failing, total, failing / total


def scenario_score(
    dataset: Dataset,
    table: ResourceTable,
    team: str,
    scenario: Scenario,
) -> ScenarioScore:
    matrix = team_confusion_at_40(dataset, table, team, scenario.role)
    failing, total, fraction = failing_percentage(matrix, scenario, team=team)
    return ScenarioScore(
        team=team,
        scenario=scenario,
        failing_count=failing,
        scenario_total=total,
        percentage=fraction,
        n_matches=matrix.total,
    )


def rank_teams(
    dataset: Dataset,
    table: ResourceTable,
    scenario: Scenario,
    min_matches: int = 40,
) -> Ranking:
    """Qualifying teams ordered by failing percentage, ties by name."""
    scores = []
    for team in dataset.team_names():
        matrix = team_confusion_at_40(dataset, table, team, scenario.role)
        if matrix.total < min_matches:
            continue
        actual, missed_as = _SCENARIO_CELLS[scenario]
        if matrix.row_total(actual) == 0:
            continue  # qualified but never in this scenario; nothing to rate
        failing, total, fraction = failing_percentage(matrix, scenario, team=team)
        scores.append(
            ScenarioScore(
                team=team,
                scenario=scenario,
                failing_count=failing,
                scenario_total=total,
                percentage=fraction,
                n_matches=matrix.total,
            )
        )
    if not scores:
        raise ValueError(
            f"no team has {min_matches}+ qualifying matches for {scenario.value}"
        )
    scores.sort(key=lambda s: (-s.percentage, s.team))
    return Ranking(scenario=scenario, scores=tuple(scores))
