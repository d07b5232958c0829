"""Match and over-by-over data model: CSV ingestion, validation, round-trips.

Input files are plain UTF-8 CSV with mandatory headers:

* matches.csv: match_id, date, team1, team2, toss_winner, team1_runs,
  team1_wickets, actual_winner, result_status
* snapshots.csv: match_id, overs_bowled, team2_runs, team2_wickets

``result_status`` is one of completed/tied/no_result; tied and no-result
rows are dropped at parse time, so a :class:`Dataset` only ever contains
decided matches.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from datetime import date as Date
from enum import Enum
from pathlib import Path

logger = logging.getLogger(__name__)

MATCH_COLUMNS = [
    "match_id",
    "date",
    "team1",
    "team2",
    "toss_winner",
    "team1_runs",
    "team1_wickets",
    "actual_winner",
    "result_status",
]
SNAPSHOT_COLUMNS = ["match_id", "overs_bowled", "team2_runs", "team2_wickets"]

RESULT_STATUSES = {"completed", "tied", "no_result"}


class ParseError(ValueError):
    """A row or header that cannot be read; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ValueError):
    """Structurally readable data that violates a domain invariant."""


class Winner(Enum):
    TEAM1 = "team1"
    TEAM2 = "team2"

    def other(self) -> "Winner":
        return Winner.TEAM2 if self is Winner.TEAM1 else Winner.TEAM1


def canonical_key(name: str) -> str:
    """Case- and whitespace-insensitive team key ("Sri Lanka" == "SriLanka")."""
    return "".join(name.split()).lower()


@dataclass(frozen=True)
class MatchRecord:
    """One completed ODI: sides, toss, first-innings close, final result."""

    match_id: str
    date: Date
    team1: str
    team2: str
    toss_winner: str
    team1_runs: int
    team1_wickets: int
    actual_winner: Winner

    def __post_init__(self):
        if not self.match_id:
            raise ValidationError("match_id must be non-empty")
        if canonical_key(self.team1) == canonical_key(self.team2):
            raise ValidationError(
                f"match {self.match_id}: team1 and team2 are the same team"
            )
        if canonical_key(self.toss_winner) not in (
            canonical_key(self.team1),
            canonical_key(self.team2),
        ):
            raise ValidationError(
                f"match {self.match_id}: toss_winner {self.toss_winner!r} is neither side"
            )
        if self.team1_runs < 0:
            raise ValidationError(f"match {self.match_id}: team1_runs must be >= 0")
        if not 0 <= self.team1_wickets <= 10:
            raise ValidationError(
                f"match {self.match_id}: team1_wickets={self.team1_wickets} outside 0..10"
            )

    @property
    def winner_name(self) -> str:
        return self.team1 if self.actual_winner is Winner.TEAM1 else self.team2


@dataclass(frozen=True)
class OverSnapshot:
    """Second-innings state after a completed over."""

    match_id: str
    overs_bowled: int
    team2_runs: int
    team2_wickets: int

    def __post_init__(self):
        if not 1 <= self.overs_bowled <= 50:
            raise ValidationError(
                f"match {self.match_id}: overs_bowled={self.overs_bowled} outside 1..50"
            )
        if self.team2_runs < 0:
            raise ValidationError(
                f"match {self.match_id} over {self.overs_bowled}: team2_runs must be >= 0"
            )
        if not 0 <= self.team2_wickets <= 10:
            raise ValidationError(
                f"match {self.match_id} over {self.overs_bowled}: "
                f"team2_wickets={self.team2_wickets} outside 0..10"
            )


@dataclass(frozen=True)
class Dataset:
    """Joined matches and snapshots; immutable and safe to share once built."""

    matches: tuple[MatchRecord, ...]
    snapshots: tuple[OverSnapshot, ...]
    _by_match: dict = field(repr=False, compare=False, default_factory=dict)

    @staticmethod
    def build(matches, snapshots) -> "Dataset":
        """Validate the join and per-match invariants, dropping snapshot-less matches."""
        by_id: dict[str, MatchRecord] = {}
        for m in matches:
            if m.match_id in by_id:
                raise ValidationError(f"duplicate match_id {m.match_id!r}")
            by_id[m.match_id] = m

        per_match: dict[str, list[OverSnapshot]] = {}
        for s in snapshots:
            if s.match_id not in by_id:
                raise ValidationError(
                    f"snapshot references unknown match_id {s.match_id!r}"
                )
            per_match.setdefault(s.match_id, []).append(s)

        for match_id, snaps in per_match.items():
            snaps.sort(key=lambda s: s.overs_bowled)
            match = by_id[match_id]
            prev = None
            for s in snaps:
                if prev is not None:
                    if s.overs_bowled == prev.overs_bowled:
                        raise ValidationError(
                            f"match {match_id}: duplicate snapshot at over {s.overs_bowled}"
                        )
                    if s.team2_runs < prev.team2_runs:
                        raise ValidationError(
                            f"match {match_id} over {s.overs_bowled}: "
                            f"team2_runs decreased ({prev.team2_runs} -> {s.team2_runs})"
                        )
                    if s.team2_wickets < prev.team2_wickets:
                        raise ValidationError(
                            f"match {match_id} over {s.overs_bowled}: "
                            f"team2_wickets decreased ({prev.team2_wickets} -> {s.team2_wickets})"
                        )
                    if prev.team2_runs > match.team1_runs:
                        raise ValidationError(
                            f"match {match_id} over {s.overs_bowled}: snapshot after the "
                            f"target was passed at over {prev.overs_bowled}"
                        )
                if s.team2_wickets >= 10:
                    raise ValidationError(
                        f"match {match_id} over {s.overs_bowled}: innings is over "
                        "after 10 wickets, snapshot cannot exist"
                    )
                prev = s

        kept = tuple(m for m in matches if m.match_id in per_match)
        dropped = len(by_id) - len(kept)
        if dropped:
            logger.info("dropped %d match(es) with no snapshots", dropped)
        ordered = tuple(
            s for m in kept for s in per_match[m.match_id]
        )
        ds = Dataset(matches=kept, snapshots=ordered)
        for m in kept:
            ds._by_match[m.match_id] = tuple(per_match[m.match_id])
        return ds

    def snapshots_for(self, match_id: str) -> tuple[OverSnapshot, ...]:
        return self._by_match[match_id]

    def match(self, match_id: str) -> MatchRecord:
        for m in self.matches:
            if m.match_id == match_id:
                return m
        raise KeyError(match_id)

    def team_names(self) -> list[str]:
        """Distinct display names, first spelling wins, canonically de-duplicated."""
        seen: dict[str, str] = {}
        for m in self.matches:
            for name in (m.team1, m.team2):
                seen.setdefault(canonical_key(name), name.strip())
        return sorted(seen.values())


def _check_header(fieldnames, expected, path) -> None:
    if fieldnames is None:
        raise ParseError(f"{path}: file has no header row")
    got = list(fieldnames)
    missing = [c for c in expected if c not in got]
    extra = [c for c in got if c not in expected]
    if missing or extra:
        raise ParseError(
            f"{path}: header mismatch (missing {missing or 'none'}, unexpected {extra or 'none'})"
        )


def _int_field(row, key, line) -> int:
    raw = row[key]
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ParseError(f"field {key}={raw!r} is not an integer", line=line) from None


def parse_matches(path) -> list[MatchRecord]:
    """Read matches.csv, dropping tied/no-result rows with a logged count."""
    path = Path(path)
    records: list[MatchRecord] = []
    seen_ids: set[str] = set()
    dropped = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, MATCH_COLUMNS, path)
        for row in reader:
            line = reader.line_num
            if None in row.values() or None in row:
                raise ParseError("wrong number of fields", line=line)
            status = row["result_status"].strip()
            if status not in RESULT_STATUSES:
                raise ParseError(f"unknown result_status {status!r}", line=line)
            if status != "completed":
                dropped += 1
                continue
            try:
                when = Date.fromisoformat(row["date"].strip())
            except ValueError:
                raise ParseError(
                    f"date {row['date']!r} is not ISO-8601", line=line
                ) from None
            team1 = " ".join(row["team1"].split())
            team2 = " ".join(row["team2"].split())
            winner_raw = row["actual_winner"].strip()
            if canonical_key(winner_raw) == canonical_key(team1):
                winner = Winner.TEAM1
            elif canonical_key(winner_raw) == canonical_key(team2):
                winner = Winner.TEAM2
            else:
                raise ValidationError(
                    f"line {line}: actual_winner {winner_raw!r} is neither team1 nor team2"
                )
            record = MatchRecord(
                match_id=row["match_id"].strip(),
                date=when,
                team1=team1,
                team2=team2,
                toss_winner=" ".join(row["toss_winner"].split()),
                team1_runs=_int_field(row, "team1_runs", line),
                team1_wickets=_int_field(row, "team1_wickets", line),
                actual_winner=winner,
            )
            if record.match_id in seen_ids:
                raise ValidationError(
                    f"line {line}: duplicate match_id {record.match_id!r}"
                )
            seen_ids.add(record.match_id)
            records.append(record)
    if dropped:
        logger.info("parse_matches: dropped %d tied/no-result row(s)", dropped)
    return records


def parse_snapshots(path, matches) -> Dataset:
    """Read snapshots.csv and join against already-parsed matches."""
    path = Path(path)
    snapshots: list[OverSnapshot] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, SNAPSHOT_COLUMNS, path)
        for row in reader:
            line = reader.line_num
            if None in row.values() or None in row:
                raise ParseError("wrong number of fields", line=line)
            snapshots.append(
                OverSnapshot(
                    match_id=row["match_id"].strip(),
                    overs_bowled=_int_field(row, "overs_bowled", line),
                    team2_runs=_int_field(row, "team2_runs", line),
                    team2_wickets=_int_field(row, "team2_wickets", line),
                )
            )
    return Dataset.build(matches, snapshots)


def load_dataset(matches_path, snapshots_path) -> Dataset:
    return parse_snapshots(snapshots_path, parse_matches(matches_path))


def write_matches(path, matches) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MATCH_COLUMNS)
        for m in matches:
            writer.writerow(
                [
                    m.match_id,
                    m.date.isoformat(),
                    m.team1,
                    m.team2,
                    m.toss_winner,
                    m.team1_runs,
                    m.team1_wickets,
                    m.winner_name,
                    "completed",
                ]
            )


def write_snapshots(path, snapshots) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SNAPSHOT_COLUMNS)
        for s in snapshots:
            writer.writerow([s.match_id, s.overs_bowled, s.team2_runs, s.team2_wickets])
