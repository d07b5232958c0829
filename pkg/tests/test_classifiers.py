import math

import numpy as np
import pytest

from dlsuite.classifiers import (
    ALL_KINDS,
    DecisionTreeModel,
    Hyperparams,
    LabeledExample,
    ModelKind,
    NaiveBayesModel,
    NeuralNetModel,
    RandomForestModel,
    _majority,
    accuracy,
    evaluate_protocol,
    make_examples,
    predict,
    split_70_30,
    train,
)
from dlsuite.data import Winner
from dlsuite.dls import N_OVERS, OverFilter, par_score
from dlsuite.synth import synth_corpus


def example(r1, w1, r2, w2, overs, dl, label):
    return LabeledExample(
        team1_runs=r1,
        team1_wickets=w1,
        team2_runs=r2,
        team2_wickets=w2,
        overs_played=overs,
        dl_prediction=dl,
        label=label,
    )


def toy_training_set():
    """20 handmade examples, two loose clusters."""
    rng = np.random.default_rng(42)
    examples = []
    for _ in range(10):
        examples.append(
            example(
                int(rng.normal(260, 15)), int(rng.integers(4, 9)),
                int(rng.normal(90, 12)), int(rng.integers(4, 8)),
                int(rng.integers(25, 35)), Winner.TEAM1, Winner.TEAM1,
            )
        )
    for _ in range(10):
        examples.append(
            example(
                int(rng.normal(225, 15)), int(rng.integers(3, 8)),
                int(rng.normal(150, 12)), int(rng.integers(1, 5)),
                int(rng.integers(25, 35)), Winner.TEAM2, Winner.TEAM2,
            )
        )
    return examples


def oracle_posterior(examples, x, var_floor=1e-9):
    """Direct Bayes-rule computation mirroring the model's definitions:
    per-class Gaussian likelihoods with a variance floor on the numeric
    features, Laplace-smoothed Bernoulli on the prediction column."""
    joint = []
    for c in (0, 1):
        rows = [e.features() for e in examples
                if (0 if e.label is Winner.TEAM1 else 1) == c]
        n_c = len(rows)
        prior = n_c / len(examples)
        likelihood = prior
        for f in range(5):
            vals = [r[f] for r in rows]
            mean = sum(vals) / n_c
            var = max(sum((v - mean) ** 2 for v in vals) / n_c, var_floor)
            likelihood *= math.exp(-((x[f] - mean) ** 2) / (2 * var)) / math.sqrt(
                2 * math.pi * var
            )
        ones = sum(r[5] for r in rows)
        p_one = (ones + 1.0) / (n_c + 2.0)
        likelihood *= p_one if x[5] == 1.0 else 1.0 - p_one
        joint.append(likelihood)
    total = joint[0] + joint[1]
    return [joint[0] / total, joint[1] / total]


def test_naive_bayes_matches_bayes_oracle():
    examples = toy_training_set()
    model = train(ModelKind.NAIVE_BAYES, examples)
    held_out = [
        example(250, 5, 120, 3, 30, Winner.TEAM1, Winner.TEAM1),
        example(230, 6, 140, 2, 30, Winner.TEAM2, Winner.TEAM2),
        example(245, 7, 100, 6, 28, Winner.TEAM1, Winner.TEAM1),
    ]
    for e in held_out:
        x = e.features()
        got = model.posteriors(x)
        want = oracle_posterior(examples, x)
        assert abs(got[0] - want[0]) < 1e-9
        assert abs(got[1] - want[1]) < 1e-9
        expected_label = Winner.TEAM1 if want[0] >= want[1] else Winner.TEAM2
        assert predict(model, e) is expected_label


def test_naive_bayes_posteriors_sum_to_one():
    model = train(ModelKind.NAIVE_BAYES, toy_training_set())
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = np.array([rng.normal(240, 30), rng.integers(0, 10), rng.normal(120, 40),
                      rng.integers(0, 10), rng.integers(1, 50), rng.integers(0, 2)],
                     dtype=float)
        assert abs(model.posteriors(x).sum() - 1.0) < 1e-12


def test_neural_net_gradient_matches_finite_differences():
    examples = toy_training_set()
    Xy = [(e.features(), 0 if e.label is Winner.TEAM1 else 1) for e in examples]
    X = np.stack([x for x, _ in Xy])
    y = np.array([c for _, c in Xy])
    model = NeuralNetModel(hidden=8, epochs=3, seed=12).fit(X, y)

    rng = np.random.default_rng(99)
    h = 1e-5
    for _ in range(10):
        xi = np.array(
            [rng.normal(240, 30), rng.integers(0, 10), rng.normal(120, 40),
             rng.integers(0, 10), rng.integers(1, 50), rng.integers(0, 2)],
            dtype=float,
        )[None, :]
        yi = np.array([int(rng.integers(0, 2))])
        analytic = model.gradient_flat(xi, yi)
        theta = model.flat_params()
        numeric = np.empty_like(theta)
        for j in range(len(theta)):
            bump = theta.copy()
            bump[j] = theta[j] + h
            model.set_flat_params(bump)
            up = model.loss_on(xi, yi)
            bump[j] = theta[j] - h
            model.set_flat_params(bump)
            down = model.loss_on(xi, yi)
            numeric[j] = (up - down) / (2 * h)
        model.set_flat_params(theta)
        denom = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
        rel = np.linalg.norm(analytic - numeric) / denom
        assert rel < 1e-4


def test_neural_net_losses_stay_finite(corpus_small, table):
    examples = make_examples(corpus_small, table, OverFilter.span(1, 50))[:400]
    model = train(ModelKind.NEURAL_NET, examples, Hyperparams(nn_epochs=30), seed=1)
    assert len(model.loss_history) == 30
    assert all(np.isfinite(loss) for loss in model.loss_history)


def test_forest_of_one_tree_equals_direct_tree():
    examples = toy_training_set()
    X = np.stack([e.features() for e in examples])
    y = np.array([0 if e.label is Winner.TEAM1 else 1 for e in examples])
    forest = RandomForestModel(
        trees=1, feature_subset=6, bootstrap=False, seed=17
    ).fit(X, y)
    tree = DecisionTreeModel(feature_subset=6, seed=23).fit(X, y)
    rng = np.random.default_rng(5)
    probes = [X[i] for i in range(len(X))] + [
        np.array([rng.normal(240, 40), rng.integers(0, 10), rng.normal(120, 50),
                  rng.integers(0, 10), rng.integers(1, 50), rng.integers(0, 2)],
                 dtype=float)
        for _ in range(60)
    ]
    for x in probes:
        assert forest.predict_one(x) == tree.predict_one(x)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_single_label_training_predicts_that_label(kind):
    examples = [
        example(250 + i, 5, 100 + i, 3, 20, Winner.TEAM1, Winner.TEAM1)
        for i in range(12)
    ]
    model = train(kind, examples, Hyperparams(nn_epochs=20, bag_rounds=5, rf_trees=5))
    for e in examples:
        assert predict(model, e) is Winner.TEAM1


def test_vote_ties_go_to_team1():
    assert _majority(1, 2) == 0
    assert _majority(2, 4) == 0
    assert _majority(3, 4) == 1
    assert _majority(0, 2) == 0


def test_split_ratio_and_determinism():
    examples = toy_training_set()[:10]
    a = split_70_30(examples, seed=1)
    b = split_70_30(examples, seed=1)
    assert len(a.train) == 7 and len(a.test) == 3
    assert a.train == b.train and a.test == b.test
    assert set(a.train).isdisjoint(a.test)
    assert set(a.train) | set(a.test) == set(examples)


def test_split_is_stratified():
    examples = toy_training_set()
    split = split_70_30(examples, seed=9)
    for part in (split.train, split.test):
        labels = {e.label for e in part}
        assert labels == {Winner.TEAM1, Winner.TEAM2}


def test_split_single_label_ok():
    examples = [
        example(250, 5, 100 + i, 3, 20, Winner.TEAM1, Winner.TEAM1) for i in range(10)
    ]
    split = split_70_30(examples, seed=2)
    assert len(split.train) == 7 and len(split.test) == 3


def test_split_rejects_tiny_input():
    with pytest.raises(ValueError, match="at least 10"):
        split_70_30(toy_training_set()[:9], seed=0)


def test_split_ratio_rounds(corpus_small, table):
    examples = make_examples(corpus_small, table, OverFilter.span(1, 30))
    split = split_70_30(examples, seed=3)
    assert len(split.train) == round(0.7 * len(examples))


def test_make_examples_fields_and_recomputation(corpus_small, table):
    examples = make_examples(corpus_small, table, OverFilter.span(10, 20))
    assert all(10 <= e.overs_played < 20 for e in examples)
    by_id = {m.match_id: m for m in corpus_small.matches}
    count = 0
    for match in corpus_small.matches:
        for snap in corpus_small.snapshots_for(match.match_id):
            if 10 <= snap.overs_bowled < 20:
                count += 1
    assert len(examples) == count
    # independent recomputation of the prediction feature
    snaps = {
        (m.match_id, s.overs_bowled): s
        for m in corpus_small.matches
        for s in corpus_small.snapshots_for(m.match_id)
    }
    for e in examples:
        candidates = [
            (mid, over)
            for (mid, over), s in snaps.items()
            if over == e.overs_played
            and s.team2_runs == e.team2_runs
            and s.team2_wickets == e.team2_wickets
            and by_id[mid].team1_runs == e.team1_runs
        ]
        assert candidates
        mid, over = candidates[0]
        par = par_score(e.team1_runs, table, N_OVERS - over, e.team2_wickets)
        expected = Winner.TEAM1 if e.team2_runs < par else Winner.TEAM2
        assert e.dl_prediction is expected


def test_make_examples_one_per_match_at_checkpoint(corpus_small, table):
    examples = make_examples(corpus_small, table, OverFilter.checkpoint(5))
    reached = sum(
        1
        for m in corpus_small.matches
        if any(s.overs_bowled == 5 for s in corpus_small.snapshots_for(m.match_id))
    )
    assert len(examples) == reached


def test_make_examples_empty_selection(corpus_small, table):
    with pytest.raises(ValueError, match="over 50"):
        make_examples(corpus_small, table, OverFilter.checkpoint(50))


def test_protocol_shape_and_determinism(corpus_small, table):
    selections = [OverFilter.checkpoint(k) for k in (10, 20, 30, 40)]
    params = Hyperparams(nn_epochs=15, bag_rounds=5, rf_trees=10)
    a = evaluate_protocol(corpus_small, table, selections, seed=4, params=params)
    b = evaluate_protocol(corpus_small, table, selections, seed=4, params=params)
    assert a == b
    per_kind = {}
    for row in a.rows:
        per_kind.setdefault(row.kind, []).append(row)
    assert set(per_kind) == set(ALL_KINDS)
    for rows in per_kind.values():
        assert len(rows) == 4
    assert len(a.best) == 4
    for row in a.rows:
        assert 0.0 <= row.accuracy <= 1.0
        assert 0.0 <= row.dl_accuracy <= 1.0


def test_protocol_jobs_equivalence(corpus_small, table):
    selections = [OverFilter.checkpoint(k) for k in (10, 20)]
    params = Hyperparams(nn_epochs=10, bag_rounds=3, rf_trees=5)
    a = evaluate_protocol(corpus_small, table, selections, seed=4, params=params, jobs=1)
    b = evaluate_protocol(corpus_small, table, selections, seed=4, params=params, jobs=4)
    assert a == b


def test_protocol_learnable_labels(corpus_small, table):
    examples = make_examples(corpus_small, table, OverFilter.span(1, 50))
    relabeled = [
        LabeledExample(
            e.team1_runs, e.team1_wickets, e.team2_runs, e.team2_wickets,
            e.overs_played, e.dl_prediction, e.dl_prediction,
        )
        for e in examples
    ][:800]
    split = split_70_30(relabeled, seed=6)
    for kind in ALL_KINDS:
        model = train(kind, split.train, Hyperparams(nn_epochs=60), seed=8)
        assert accuracy(model, split.test) >= 0.95


def test_protocol_on_table_consistent_corpus(table):
    ds = synth_corpus(seed=19, n_matches=400, table=table, disagree_frac=0.0)
    selections = [OverFilter.span(*p) for p in ((10, 20), (30, 40), (20, 50))]
    result = evaluate_protocol(
        ds, table, selections, seed=5, params=Hyperparams(nn_epochs=40, rf_trees=30)
    )
    for best in result.best:
        assert best.accuracy >= best.dl_accuracy - 0.02


def test_n_test_matches_partition(corpus_small, table):
    selections = [OverFilter.checkpoint(20)]
    result = evaluate_protocol(
        corpus_small, table, selections, seed=4,
        params=Hyperparams(nn_epochs=5, bag_rounds=3, rf_trees=5),
    )
    examples = make_examples(corpus_small, table, selections[0])
    expected_test = len(examples) - round(0.7 * len(examples))
    assert all(r.n_test == expected_test for r in result.rows)
