"""Winner classifiers over six-feature over-snapshots and the 70/30 protocol.

Feature vector, in order: team1 runs, team1 wickets, team2 runs, team2
wickets, overs played, and the par-score prediction encoded 0 (Team1) / 1
(Team2). Labels use the same encoding. Four model families are provided:
Gaussian/categorical naive Bayes, a one-hidden-layer sigmoid network,
bagged naive Bayes, and a random forest. All training is seeded and
deterministic; majority votes and argmax ties resolve to Team1.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import Dataset, Winner
from .dls import N_OVERS, OverFilter, ResourceTable, par_score, predict_winner

N_FEATURES = 6
_NUMERIC = slice(0, 5)  # gaussian-modelled columns; column 5 is categorical
_CAT = 5


class ModelKind(Enum):
    NAIVE_BAYES = "naive_bayes"
    NEURAL_NET = "neural_net"
    BAGGED_NAIVE_BAYES = "bagged_naive_bayes"
    RANDOM_FOREST = "random_forest"


ALL_KINDS = tuple(ModelKind)


@dataclass(frozen=True)
class LabeledExample:
    team1_runs: int
    team1_wickets: int
    team2_runs: int
    team2_wickets: int
    overs_played: int
    dl_prediction: Winner
    label: Winner

    def features(self) -> np.ndarray:
        return np.array(
            [
                self.team1_runs,
                self.team1_wickets,
                self.team2_runs,
                self.team2_wickets,
                self.overs_played,
                0.0 if self.dl_prediction is Winner.TEAM1 else 1.0,
            ],
            dtype=float,
        )


def _encode(examples) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([e.features() for e in examples])
    y = np.array([0 if e.label is Winner.TEAM1 else 1 for e in examples], dtype=int)
    return X, y


@dataclass(frozen=True)
class Hyperparams:
    nb_var_floor: float = 1e-9
    nn_hidden: int = 8
    nn_learning_rate: float = 0.1
    nn_epochs: int = 200
    nn_batch: int = 32
    bag_rounds: int = 25
    rf_trees: int = 100
    rf_feature_subset: int = 3
    rf_min_leaf: int = 2
    rf_max_depth: int | None = None
    rf_bootstrap: bool = True


def make_examples(
    dataset: Dataset, table: ResourceTable, selection: OverFilter
) -> list[LabeledExample]:
    """One example per selected snapshot; over 50 is never selected."""
    examples = []
    for match in dataset.matches:
        for snap in dataset.snapshots_for(match.match_id):
            if snap.overs_bowled == N_OVERS:
                continue
            if not selection.contains(snap.overs_bowled):
                continue
            par = par_score(
                match.team1_runs, table, N_OVERS - snap.overs_bowled, snap.team2_wickets
            )
            examples.append(
                LabeledExample(
                    team1_runs=match.team1_runs,
                    team1_wickets=match.team1_wickets,
                    team2_runs=snap.team2_runs,
                    team2_wickets=snap.team2_wickets,
                    overs_played=snap.overs_bowled,
                    dl_prediction=predict_winner(par, snap.team2_runs).predicted,
                    label=match.actual_winner,
                )
            )
    if not examples:
        raise ValueError(f"no snapshots match selection {selection.label!r}")
    return examples


@dataclass(frozen=True)
class TrainTestSplit:
    train: tuple[LabeledExample, ...]
    test: tuple[LabeledExample, ...]
    seed: int


def split_70_30(examples, seed: int) -> TrainTestSplit:
    """Seeded stratified partition with |train| = round(0.7 * n)."""
    n = len(examples)
    if n < 10:
        raise ValueError(f"need at least 10 examples to split, got {n}")
    target = round(0.7 * n)
    rng = np.random.default_rng(seed)

    by_label: dict[int, list[int]] = {}
    for i, e in enumerate(examples):
        by_label.setdefault(0 if e.label is Winner.TEAM1 else 1, []).append(i)

    labels = sorted(by_label)
    alloc = {}
    remainders = []
    used = 0
    for c in labels:
        quota = 0.7 * len(by_label[c])
        alloc[c] = int(quota)
        used += alloc[c]
        remainders.append((quota - int(quota), c))
    for _, c in sorted(remainders, key=lambda t: (-t[0], t[1])):
        if used >= target:
            break
        alloc[c] += 1
        used += 1
    # keep both partitions populated per class where the class allows it
    for c in labels:
        n_c = len(by_label[c])
        if n_c >= 2:
            alloc[c] = min(max(alloc[c], 1), n_c - 1)
    while sum(alloc.values()) > target:
        c = max(labels, key=lambda c: (alloc[c] > (1 if len(by_label[c]) >= 2 else 0), alloc[c]))
        alloc[c] -= 1
    while sum(alloc.values()) < target:
        c = max(
            labels,
            key=lambda c: (len(by_label[c]) - (1 if len(by_label[c]) >= 2 else 0)) - alloc[c],
        )
        alloc[c] += 1

    train_idx: list[int] = []
    test_idx: list[int] = []
    for c in labels:
        order = rng.permutation(len(by_label[c]))
        shuffled = [by_label[c][j] for j in order]
        train_idx.extend(shuffled[: alloc[c]])
        test_idx.extend(shuffled[alloc[c] :])
    return TrainTestSplit(
        train=tuple(examples[i] for i in train_idx),
        test=tuple(examples[i] for i in test_idx),
        seed=seed,
    )


def _majority(votes_team2: int, total: int) -> int:
    """Majority label with ties to Team1."""
    return 1 if 2 * votes_team2 > total else 0


class NaiveBayesModel:
    """Gaussian class-conditionals on the numeric columns, Laplace-smoothed
    categorical likelihood for the prediction column."""

    kind = ModelKind.NAIVE_BAYES

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def fit(self, X: np.ndarray, y: np.ndarray) -> "NaiveBayesModel":
        n = len(y)
        self.priors = np.zeros(2)
        self.means = np.zeros((2, 5))
        self.variances = np.ones((2, 5))
        self.cat_logp = np.zeros((2, 2))
        for c in (0, 1):
            rows = X[y == c]
            n_c = len(rows)
            self.priors[c] = n_c / n
            if n_c == 0:
                continue
            self.means[c] = rows[:, _NUMERIC].mean(axis=0)
            self.variances[c] = np.maximum(
                rows[:, _NUMERIC].var(axis=0), self.var_floor
            )
            ones = float(rows[:, _CAT].sum())
            self.cat_logp[c, 1] = np.log((ones + 1.0) / (n_c + 2.0))
            self.cat_logp[c, 0] = np.log((n_c - ones + 1.0) / (n_c + 2.0))
        return self

    def _log_joint(self, x: np.ndarray) -> np.ndarray:
        out = np.full(2, -np.inf)
        for c in (0, 1):
            if self.priors[c] == 0.0:
                continue
            var = self.variances[c]
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * var) + (x[_NUMERIC] - self.means[c]) ** 2 / var
            )
            ll += self.cat_logp[c, int(x[_CAT])]
            out[c] = np.log(self.priors[c]) + ll
        return out

    def posteriors(self, x: np.ndarray) -> np.ndarray:
        lj = self._log_joint(x)
        if np.all(np.isinf(lj)):
            raise ValueError("model was fitted on no data")
        shift = lj - lj.max()
        p = np.exp(shift)
        return p / p.sum()

    def predict_one(self, x: np.ndarray) -> int:
        p = self.posteriors(x)
        return 1 if p[1] > p[0] else 0


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class NeuralNetModel:
    """6 -> hidden -> 1 sigmoid network trained with mini-batch backprop on
    binary cross-entropy; the five numeric features are standardized with
    train-set statistics."""

    kind = ModelKind.NEURAL_NET

    def __init__(self, hidden=8, learning_rate=0.1, epochs=200, batch=32, seed=0):
        self.hidden = hidden
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch = batch
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "NeuralNetModel":
        rng = np.random.default_rng(self.seed)
        self.center = np.zeros(N_FEATURES)
        self.scale = np.ones(N_FEATURES)
        self.center[_NUMERIC] = X[:, _NUMERIC].mean(axis=0)
        self.scale[_NUMERIC] = np.maximum(X[:, _NUMERIC].std(axis=0), 1e-9)
        Xs = (X - self.center) / self.scale

        self.W1 = rng.uniform(-0.5, 0.5, size=(N_FEATURES, self.hidden))
        self.b1 = np.zeros(self.hidden)
        self.W2 = rng.uniform(-0.5, 0.5, size=(self.hidden, 1))
        self.b2 = np.zeros(1)

        n = len(y)
        self.loss_history = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch):
                idx = order[start : start + self.batch]
                loss, grads = self._loss_grads(Xs[idx], y[idx])
                epoch_loss += loss * len(idx)
                self.W1 -= self.learning_rate * grads["W1"]
                self.b1 -= self.learning_rate * grads["b1"]
                self.W2 -= self.learning_rate * grads["W2"]
                self.b2 -= self.learning_rate * grads["b2"]
            self.loss_history.append(epoch_loss / n)
        return self

    def _forward(self, Xs: np.ndarray):
        h = _sigmoid(Xs @ self.W1 + self.b1)
        p = _sigmoid(h @ self.W2 + self.b2).ravel()
        return h, p

    def _loss_grads(self, Xs: np.ndarray, y: np.ndarray):
        b = len(y)
        h, p = self._forward(Xs)
        safe = np.clip(p, 1e-12, 1.0 - 1e-12)
        loss = -float(np.mean(y * np.log(safe) + (1 - y) * np.log(1.0 - safe)))
        dz2 = ((p - y) / b)[:, None]
        dh = dz2 @ self.W2.T
        dz1 = dh * h * (1.0 - h)
        grads = {
            "W2": h.T @ dz2,
            "b2": dz2.sum(axis=0),
            "W1": Xs.T @ dz1,
            "b1": dz1.sum(axis=0),
        }
        return loss, grads

    def loss_on(self, X: np.ndarray, y: np.ndarray) -> float:
        Xs = (X - self.center) / self.scale
        loss, _ = self._loss_grads(Xs, y)
        return loss

    def gradient_flat(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        Xs = (X - self.center) / self.scale
        _, g = self._loss_grads(Xs, y)
        return np.concatenate(
            [g["W1"].ravel(), g["b1"].ravel(), g["W2"].ravel(), g["b2"].ravel()]
        )

    def flat_params(self) -> np.ndarray:
        return np.concatenate(
            [self.W1.ravel(), self.b1.ravel(), self.W2.ravel(), self.b2.ravel()]
        )

    def set_flat_params(self, theta: np.ndarray) -> None:
        shapes = [self.W1.shape, self.b1.shape, self.W2.shape, self.b2.shape]
        parts = []
        at = 0
        for shape in shapes:
            size = int(np.prod(shape))
            parts.append(theta[at : at + size].reshape(shape))
            at += size
        self.W1, self.b1, self.W2, self.b2 = parts

    def predict_one(self, x: np.ndarray) -> int:
        xs = (x - self.center) / self.scale
        _, p = self._forward(xs[None, :])
        return 1 if p[0] > 0.5 else 0


class BaggedNaiveBayesModel:
    kind = ModelKind.BAGGED_NAIVE_BAYES

    def __init__(self, rounds=25, var_floor=1e-9, seed=0):
        self.rounds = rounds
        self.var_floor = var_floor
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "BaggedNaiveBayesModel":
        n = len(y)
        self.members = []
        for b in range(self.rounds):
            rng = np.random.default_rng(np.random.SeedSequence((self.seed, b)))
            idx = rng.integers(0, n, size=n)
            self.members.append(NaiveBayesModel(self.var_floor).fit(X[idx], y[idx]))
        return self

    def predict_one(self, x: np.ndarray) -> int:
        votes = sum(m.predict_one(x) for m in self.members)
        return _majority(votes, len(self.members))


class _Leaf:
    __slots__ = ("label",)

    def __init__(self, label: int):
        self.label = label


class _Split:
    __slots__ = ("feature", "threshold", "left", "right")

    def __init__(self, feature, threshold, left, right):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float(np.dot(p, p))


class DecisionTreeModel:
    """CART with Gini impurity; split ties go to the lowest feature index and
    then the lowest threshold, so candidate order never matters."""

    def __init__(self, max_depth=None, min_leaf=2, feature_subset=N_FEATURES, seed=0):
        self.max_depth = max_depth
        self.min_leaf = max(1, min_leaf)
        self.feature_subset = min(feature_subset, N_FEATURES)
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTreeModel":
        self._rng = np.random.default_rng(self.seed)
        self.root = self._grow(X, y, depth=0)
        del self._rng
        return self

    def _leaf(self, y: np.ndarray) -> _Leaf:
        return _Leaf(_majority(int(y.sum()), len(y)))

    def _grow(self, X, y, depth):
        if (
            len(y) < 2 * self.min_leaf
            or (self.max_depth is not None and depth >= self.max_depth)
            or len(np.unique(y)) == 1
        ):
            return self._leaf(y)

        if self.feature_subset >= N_FEATURES:
            features = range(N_FEATURES)
        else:
            features = sorted(
                self._rng.choice(N_FEATURES, size=self.feature_subset, replace=False)
            )

        parent = _gini(np.bincount(y, minlength=2))
        n = len(y)
        best = None  # (gain, feature, threshold)
        for f in features:
            order = np.argsort(X[:, f], kind="stable")
            xs = X[order, f]
            ys = y[order]
            ones = np.cumsum(ys)
            for i in range(self.min_leaf, n - self.min_leaf + 1):
                if xs[i] == xs[i - 1]:
                    continue
                left_ones = int(ones[i - 1])
                left = np.array([i - left_ones, left_ones], dtype=float)
                right = np.array(
                    [(n - i) - (int(ones[-1]) - left_ones), int(ones[-1]) - left_ones],
                    dtype=float,
                )
                gain = parent - (i / n) * _gini(left) - ((n - i) / n) * _gini(right)
                threshold = 0.5 * (xs[i - 1] + xs[i])
                key = (gain, -f, -threshold)
                if best is None or key > (best[0], -best[1], -best[2]):
                    best = (gain, f, threshold)
        if best is None or best[0] <= 1e-15:
            return self._leaf(y)
        gain, f, threshold = best
        mask = X[:, f] <= threshold
        return _Split(
            f,
            threshold,
            self._grow(X[mask], y[mask], depth + 1),
            self._grow(X[~mask], y[~mask], depth + 1),
        )

    def predict_one(self, x: np.ndarray) -> int:
        node = self.root
        while isinstance(node, _Split):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.label


class RandomForestModel:
    kind = ModelKind.RANDOM_FOREST

    def __init__(
        self,
        trees=100,
        feature_subset=3,
        min_leaf=2,
        max_depth=None,
        bootstrap=True,
        seed=0,
    ):
        self.trees = trees
        self.feature_subset = feature_subset
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.bootstrap = bootstrap
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestModel":
        n = len(y)
        self.members = []
        for t in range(self.trees):
            ss = np.random.SeedSequence((self.seed, t))
            boot_seed, tree_seed = ss.generate_state(2)
            if self.bootstrap:
                idx = np.random.default_rng(int(boot_seed)).integers(0, n, size=n)
            else:
                idx = np.arange(n)
            tree = DecisionTreeModel(
                max_depth=self.max_depth,
                min_leaf=self.min_leaf,
                feature_subset=self.feature_subset,
                seed=int(tree_seed),
            )
            self.members.append(tree.fit(X[idx], y[idx]))
        return self

    def predict_one(self, x: np.ndarray) -> int:
        votes = sum(m.predict_one(x) for m in self.members)
        return _majority(votes, len(self.members))


def train(kind: ModelKind, examples, params: Hyperparams = Hyperparams(), seed: int = 0):
    """Fit one model family on labeled examples."""
    if not examples:
        raise ValueError("training set is empty")
    X, y = _encode(examples)
    if kind is ModelKind.NAIVE_BAYES:
        return NaiveBayesModel(params.nb_var_floor).fit(X, y)
    if kind is ModelKind.NEURAL_NET:
        return NeuralNetModel(
            hidden=params.nn_hidden,
            learning_rate=params.nn_learning_rate,
            epochs=params.nn_epochs,
            batch=params.nn_batch,
            seed=seed,
        ).fit(X, y)
    if kind is ModelKind.BAGGED_NAIVE_BAYES:
        return BaggedNaiveBayesModel(
            rounds=params.bag_rounds, var_floor=params.nb_var_floor, seed=seed
        ).fit(X, y)
    if kind is ModelKind.RANDOM_FOREST:
        return RandomForestModel(
            trees=params.rf_trees,
            feature_subset=params.rf_feature_subset,
            min_leaf=params.rf_min_leaf,
            max_depth=params.rf_max_depth,
            bootstrap=params.rf_bootstrap,
            seed=seed,
        ).fit(X, y)
    raise ValueError(f"unknown model kind {kind!r}")


def predict(model, example: LabeledExample) -> Winner:
    return Winner.TEAM1 if model.predict_one(example.features()) == 0 else Winner.TEAM2


def accuracy(model, examples) -> float:
    hits = sum(1 for e in examples if predict(model, e) is e.label)
    return hits / len(examples)


@dataclass(frozen=True)
class ProtocolRow:
    selection: str
    n_test: int
    dl_accuracy: float
    kind: ModelKind
    accuracy: float


@dataclass(frozen=True)
class ProtocolResult:
    rows: tuple[ProtocolRow, ...]
    best: tuple[ProtocolRow, ...]


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1)[0])


def evaluate_protocol(
    dataset: Dataset,
    table: ResourceTable,
    selections,
    kinds=ALL_KINDS,
    seed: int = 0,
    params: Hyperparams = Hyperparams(),
    jobs: int = 1,
) -> ProtocolResult:
    """Per selection: build examples, split 70/30, train every kind, and report
    test accuracy next to the par-score baseline measured on the same test set."""
    selections = list(selections)
    if not selections:
        raise ValueError("no selections given")

    def run_one(s: int) -> list[ProtocolRow]:
        selection = selections[s]
        examples = make_examples(dataset, table, selection)
        split = split_70_30(examples, seed=_derived_seed(seed, s, 1))
        dl_hits = sum(1 for e in split.test if e.dl_prediction is e.label)
        dl_acc = dl_hits / len(split.test)
        rows = []
        for k, kind in enumerate(kinds):
            model = train(kind, split.train, params, seed=_derived_seed(seed, s, 2, k))
            rows.append(
                ProtocolRow(
                    selection=selection.label,
                    n_test=len(split.test),
                    dl_accuracy=dl_acc,
                    kind=kind,
                    accuracy=accuracy(model, split.test),
                )
            )
        return rows

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_selection = list(pool.map(run_one, range(len(selections))))
    else:
        per_selection = [run_one(s) for s in range(len(selections))]

    rows = tuple(row for group in per_selection for row in group)
    best = tuple(max(group, key=lambda r: r.accuracy) for group in per_selection)
    return ProtocolResult(rows=rows, best=best)
