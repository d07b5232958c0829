import numpy as np
import pytest

from dlsuite.dls import ResourceTable, default_table
from dlsuite.synth import synth_corpus


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def corpus_small(table):
    return synth_corpus(seed=7, n_matches=100, table=table)


@pytest.fixture(scope="session")
def corpus_2000(table):
    return synth_corpus(seed=7, n_matches=2000, table=table)


@pytest.fixture(scope="session")
def hidden_table(table):
    # monotone transform of every column; raises all values, stays valid
    grid = np.round(100.0 * (table.values / 100.0) ** 0.9, 1)
    return ResourceTable.from_grid(grid)


@pytest.fixture(scope="session")
def hidden_corpus(hidden_table):
    return synth_corpus(seed=11, n_matches=2000, table=hidden_table)


@pytest.fixture(scope="session")
def perturbed_table(table):
    # same transform the other way; a deliberately degraded but valid baseline
    grid = np.round(100.0 * (table.values / 100.0) ** 1.15, 1)
    return ResourceTable.from_grid(grid)
