from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlsuite.data import (
    Dataset,
    MatchRecord,
    OverSnapshot,
    ParseError,
    ValidationError,
    Winner,
    canonical_key,
    parse_matches,
    parse_snapshots,
    write_matches,
    write_snapshots,
)
from dlsuite.synth import synth_corpus

MATCH_HEADER = "match_id,date,team1,team2,toss_winner,team1_runs,team1_wickets,actual_winner,result_status"
SNAP_HEADER = "match_id,overs_bowled,team2_runs,team2_wickets"


def matches_file(tmp_path, rows, name="matches.csv"):
    path = tmp_path / name
    path.write_text("\n".join([MATCH_HEADER] + rows) + "\n", encoding="utf-8")
    return path


def snapshots_file(tmp_path, rows, name="snapshots.csv"):
    path = tmp_path / name
    path.write_text("\n".join([SNAP_HEADER] + rows) + "\n", encoding="utf-8")
    return path


def row(match_id="M1", team1="India", team2="Pakistan", winner="India", status="completed",
        runs=250, wickets=7):
    return f"{match_id},2010-05-01,{team1},{team2},{team1},{runs},{wickets},{winner},{status}"


def test_parse_matches_drops_tied_rows(tmp_path):
    path = matches_file(
        tmp_path,
        [row("M1"), row("M2", status="tied"), row("M3", team1="England", winner="Pakistan")],
    )
    records = parse_matches(path)
    assert [m.match_id for m in records] == ["M1", "M3"]
    assert records[1].actual_winner is Winner.TEAM2


def test_parse_matches_header_only_file(tmp_path):
    assert parse_matches(matches_file(tmp_path, [])) == []


def test_parse_matches_wicket_bound(tmp_path):
    path = matches_file(tmp_path, [row(wickets=11)])
    with pytest.raises(ValidationError, match="team1_wickets"):
        parse_matches(path)


def test_parse_matches_malformed_row_carries_line(tmp_path):
    path = matches_file(tmp_path, [row("M1"), row("M2", runs="abc")])
    with pytest.raises(ParseError, match="line 3"):
        parse_matches(path)


def test_parse_matches_bad_date(tmp_path):
    path = matches_file(tmp_path, ["M1,01/05/2010,India,Pakistan,India,250,7,India,completed"])
    with pytest.raises(ParseError, match="ISO-8601"):
        parse_matches(path)


def test_parse_matches_duplicate_id(tmp_path):
    path = matches_file(tmp_path, [row("M1"), row("M1")])
    with pytest.raises(ValidationError, match="duplicate match_id"):
        parse_matches(path)


def test_parse_matches_header_mismatch(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("match_id,stuff\nM1,2\n", encoding="utf-8")
    with pytest.raises(ParseError, match="header"):
        parse_matches(path)


def test_parse_matches_unknown_winner(tmp_path):
    path = matches_file(tmp_path, [row(winner="Kenya")])
    with pytest.raises(ValidationError, match="actual_winner"):
        parse_matches(path)


def test_parse_matches_same_team_twice(tmp_path):
    path = matches_file(tmp_path, [row(team1="India", team2="india")])
    with pytest.raises(ValidationError, match="same team"):
        parse_matches(path)


def test_team_name_normalization():
    assert canonical_key("Sri Lanka") == canonical_key("SriLanka")
    assert canonical_key("  sri  lanka ") == "srilanka"


def test_winner_matching_is_canonical(tmp_path):
    path = matches_file(tmp_path, [row(team1="Sri Lanka", team2="Kenya", winner="SriLanka")])
    records = parse_matches(path)
    assert records[0].actual_winner is Winner.TEAM1


def test_parse_snapshots_join(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1")]))
    snaps = snapshots_file(tmp_path, [f"M1,{o},{o * 5},{o // 10}" for o in range(1, 36)])
    ds = parse_snapshots(snaps, matches)
    assert len(ds.snapshots_for("M1")) == 35


def test_parse_snapshots_decreasing_runs(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1")]))
    snaps = snapshots_file(tmp_path, ["M1,1,10,0", "M1,2,8,0"])
    with pytest.raises(ValidationError, match="M1 over 2.*decreased"):
        parse_snapshots(snaps, matches)


def test_parse_snapshots_decreasing_wickets(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1")]))
    snaps = snapshots_file(tmp_path, ["M1,1,10,2", "M1,2,14,1"])
    with pytest.raises(ValidationError, match="wickets decreased"):
        parse_snapshots(snaps, matches)


def test_parse_snapshots_orphan(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1")]))
    snaps = snapshots_file(tmp_path, ["M2,1,4,0"])
    with pytest.raises(ValidationError, match="unknown match_id"):
        parse_snapshots(snaps, matches)


def test_parse_snapshots_duplicate_over(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1")]))
    snaps = snapshots_file(tmp_path, ["M1,3,10,0", "M1,3,10,0"])
    with pytest.raises(ValidationError, match="duplicate snapshot"):
        parse_snapshots(snaps, matches)


def test_no_snapshot_after_target_passed(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1", runs=100)]))
    snaps = snapshots_file(tmp_path, ["M1,10,50,1", "M1,20,101,2", "M1,21,105,2"])
    with pytest.raises(ValidationError, match="target was passed"):
        parse_snapshots(snaps, matches)


def test_no_snapshot_with_ten_wickets(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1")]))
    snaps = snapshots_file(tmp_path, ["M1,30,120,10"])
    with pytest.raises(ValidationError, match="10 wickets"):
        parse_snapshots(snaps, matches)


def test_match_without_snapshots_is_dropped(tmp_path):
    matches = parse_matches(matches_file(tmp_path, [row("M1"), row("M2")]))
    snaps = snapshots_file(tmp_path, ["M1,1,4,0"])
    ds = parse_snapshots(snaps, matches)
    assert [m.match_id for m in ds.matches] == ["M1"]


def test_round_trip(tmp_path, corpus_small):
    write_matches(tmp_path / "m.csv", corpus_small.matches)
    write_snapshots(tmp_path / "s.csv", corpus_small.snapshots)
    again = parse_snapshots(tmp_path / "s.csv", parse_matches(tmp_path / "m.csv"))
    assert again.matches == corpus_small.matches
    assert again.snapshots == corpus_small.snapshots


def test_crlf_accepted(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(MATCH_HEADER + "\r\n" + row("M1") + "\r\n", encoding="utf-8")
    assert len(parse_matches(path)) == 1


def test_synth_determinism(table):
    a = synth_corpus(seed=7, n_matches=100, table=table)
    b = synth_corpus(seed=7, n_matches=100, table=table)
    assert a.matches == b.matches
    assert a.snapshots == b.snapshots


def test_synth_contract(corpus_small):
    assert len(corpus_small.matches) == 100
    for match in corpus_small.matches:
        snaps = corpus_small.snapshots_for(match.match_id)
        assert 1 <= len(snaps) <= 50
        assert match.actual_winner in (Winner.TEAM1, Winner.TEAM2)
        for snap in snaps:
            assert snap.team2_wickets <= 9
            assert snap.team2_runs <= match.team1_runs


def test_synth_rejects_bad_n(table):
    with pytest.raises(ValueError, match="n_matches"):
        synth_corpus(seed=1, n_matches=0, table=table)


def test_dataset_join_totality(corpus_small):
    ids = {m.match_id for m in corpus_small.matches}
    assert all(s.match_id in ids for s in corpus_small.snapshots)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 5))
def test_round_trip_property(tmp_path_factory, seed, n):
    from dlsuite.dls import default_table

    tmp = tmp_path_factory.mktemp("rt")
    ds = synth_corpus(seed=seed, n_matches=n, table=default_table())
    write_matches(tmp / "m.csv", ds.matches)
    write_snapshots(tmp / "s.csv", ds.snapshots)
    again = parse_snapshots(tmp / "s.csv", parse_matches(tmp / "m.csv"))
    assert again.matches == ds.matches
    assert again.snapshots == ds.snapshots


def test_dataset_build_validates_construction():
    m = MatchRecord(
        match_id="M1",
        date=date(2010, 1, 1),
        team1="India",
        team2="Kenya",
        toss_winner="India",
        team1_runs=200,
        team1_wickets=6,
        actual_winner=Winner.TEAM1,
    )
    snaps = [OverSnapshot("M1", 1, 5, 0), OverSnapshot("M1", 2, 11, 1)]
    ds = Dataset.build([m], snaps)
    assert ds.match("M1") is m
    assert ds.team_names() == ["India", "Kenya"]
