"""Regenerate the bundled default resource table.

The upper-left block of the grid (overs_left 50..33, wickets 0..6) is a
published reference excerpt and is written out verbatim. Every other cell
is synthesized: each wicket column is fitted with a saturating-exponential
decay curve v(u) = A * (1 - exp(-k * u)) against the excerpt, the fitted
curve fills overs_left 1..32, and columns for wickets 7..9 (no published
data at all) extrapolate the excerpt's column-top ratio and steepness
trends. Running-minimum clamps guarantee both monotonicity axes, so the
output always passes table validation.

Replace the bundled CSV with an official table when one is available; the
file format is the same.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dlsuite.dls import N_OVERS, N_WICKETS, load_table, save_table, validate_grid  # noqa: E402
from dlsuite.dls import ResourceTable  # noqa: E402

# overs_left 50 (first row) down to 33, wickets 0..6
EXCERPT_TOP_OVERS = 50
EXCERPT = np.array(
    [
        [100.0, 93.4, 85.1, 74.9, 62.7, 49.0, 34.9],
        [99.1, 92.6, 84.5, 74.4, 62.5, 48.9, 34.9],
        [98.1, 91.7, 83.8, 74.0, 62.2, 48.8, 34.9],
        [97.1, 90.9, 83.2, 73.5, 61.9, 48.6, 34.9],
        [96.1, 90.0, 82.5, 73.0, 61.6, 48.5, 34.8],
        [95.0, 89.1, 81.8, 72.5, 61.3, 48.4, 34.8],
        [93.9, 88.2, 81.0, 72.0, 61.0, 48.3, 34.8],
        [92.8, 87.3, 80.3, 71.4, 60.7, 48.1, 34.7],
        [91.7, 86.3, 79.5, 70.9, 60.3, 47.9, 34.7],
        [90.5, 85.3, 78.7, 70.3, 59.9, 47.8, 34.6],
        [89.3, 84.2, 77.8, 69.6, 59.5, 47.6, 34.6],
        [88.0, 83.1, 76.9, 69.0, 59.1, 47.4, 34.5],
        [86.7, 82.0, 76.0, 68.3, 58.7, 47.1, 34.5],
        [85.4, 80.9, 75.0, 67.6, 58.2, 46.9, 34.4],
        [84.1, 79.7, 74.1, 66.8, 57.7, 46.6, 34.3],
        [82.7, 78.5, 73.0, 66.0, 57.2, 46.4, 34.2],
        [81.3, 77.2, 72.0, 65.2, 56.6, 46.1, 34.1],
        [79.8, 75.9, 70.9, 64.4, 56.0, 45.8, 34.0],
    ]
)


def fit_saturating_exp(u: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares fit of y = A * (1 - exp(-k*u)); A is solved in closed form."""

    def amplitude_and_sse(k: float) -> tuple[float, float]:
        f = 1.0 - np.exp(-k * u)
        a = float(np.dot(y, f) / np.dot(f, f))
        r = a * f - y
        return a, float(np.dot(r, r))

    ks = np.geomspace(1e-3, 2.0, 400)
    sses = [amplitude_and_sse(k)[1] for k in ks]
    best = int(np.argmin(sses))
    lo = ks[max(0, best - 1)]
    hi = ks[min(len(ks) - 1, best + 1)]
    for _ in range(60):
        mids = np.linspace(lo, hi, 8)
        errs = [amplitude_and_sse(k)[1] for k in mids]
        j = int(np.argmin(errs))
        lo = mids[max(0, j - 1)]
        hi = mids[min(len(mids) - 1, j + 1)]
    k = 0.5 * (lo + hi)
    a, _ = amplitude_and_sse(k)
    return a, k


def build_grid() -> np.ndarray:
    grid = np.zeros((N_OVERS, N_WICKETS))
    n_excerpt = EXCERPT.shape[0]
    grid[:n_excerpt, :7] = EXCERPT

    overs = np.arange(EXCERPT_TOP_OVERS, EXCERPT_TOP_OVERS - n_excerpt, -1)
    amps = np.zeros(N_WICKETS)
    rates = np.zeros(N_WICKETS)
    for w in range(7):
        amps[w], rates[w] = fit_saturating_exp(overs.astype(float), EXCERPT[:, w])

    # Wickets 7..9: extend the excerpt's top-row ratio trend (second differences
    # continued) and the fitted steepness trend.
    tops = EXCERPT[0, :].tolist()
    ratios = [tops[i + 1] / tops[i] for i in range(6)]
    diffs = np.diff(ratios)
    step = float(np.mean(diffs[-2:]) - np.mean(diffs[:-2])) / 2 or -0.012
    last_diff = diffs[-1]
    last_ratio = ratios[-1]
    k_growth = min(2.5, max(1.1, rates[6] / rates[5]))
    for w in range(7, N_WICKETS):
        last_diff += step
        last_ratio += last_diff
        tops.append(max(1.0, tops[-1] * last_ratio))
        rates[w] = rates[w - 1] * k_growth
        amps[w] = tops[w] / (1.0 - np.exp(-rates[w] * EXCERPT_TOP_OVERS))

    # Fill below the excerpt (wickets 0..6) and whole columns for wickets 7..9,
    # clamping each column into a running minimum from the row above.
    for w in range(N_WICKETS):
        start = n_excerpt if w < 7 else 0
        for i in range(start, N_OVERS):
            u = N_OVERS - i
            raw = amps[w] * (1.0 - np.exp(-rates[w] * u))
            value = round(max(0.0, raw), 1)
            if i > 0:
                value = min(value, grid[i - 1, w])
            grid[i, w] = value

    # Cross-wicket running minimum; never moves an excerpt cell because the
    # excerpt rows are already non-increasing left to right.
    for w in range(1, N_WICKETS):
        grid[:, w] = np.minimum(grid[:, w], grid[:, w - 1])
    return grid


def main() -> None:
    grid = build_grid()
    validate_grid(grid)
    assert np.array_equal(grid[: EXCERPT.shape[0], :7], EXCERPT), "excerpt cells moved"
    out = Path(__file__).resolve().parents[1] / "src" / "dlsuite" / "tables" / "resource_table.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_table(out, ResourceTable.from_grid(grid))
    reread = load_table(out)
    assert np.array_equal(reread.values, grid), "round-trip drift"
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
