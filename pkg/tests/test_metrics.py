"""MMD against a naive double loop, median bandwidth, stop-rule traces."""

from __future__ import annotations

import numpy as np
import pytest

from dualpush.exceptions import DegenerateError, DimensionError
from dualpush.metrics import (
    HistoryRow,
    Kernel,
    RunHistory,
    RunStatus,
    median_heuristic,
    mmd2,
    should_stop,
)


def naive_mmd2(x, y, bandwidth):
    def k(a, b):
        return np.exp(-np.sum((a - b) ** 2) / (2 * bandwidth**2))

    kxx = np.mean([[k(a, b) for b in x] for a in x])
    kyy = np.mean([[k(a, b) for b in y] for a in y])
    kxy = np.mean([[k(a, b) for b in y] for a in x])
    return kxx + kyy - 2 * kxy


def test_kernel_validation():
    with pytest.raises(ValueError):
        Kernel("laplace", 1.0)
    with pytest.raises(ValueError):
        Kernel("rbf", 0.0)


def test_kernel_gram_frozen_value():
    k = Kernel("rbf", 1.0)
    np.testing.assert_allclose(k.gram([[0.0]], [[1.0]]), [[np.exp(-0.5)]], rtol=1e-15)


def test_mmd2_singletons_frozen_value():
    val = mmd2(np.array([[0.0]]), np.array([[1.0]]), Kernel("rbf", 1.0))
    assert val == pytest.approx(2.0 * (1.0 - np.exp(-0.5)), abs=1e-15)
    assert val == pytest.approx(0.7869386805747332, abs=1e-15)


def test_mmd2_identical_sets_is_zero():
    x = np.random.default_rng(0).normal(size=(7, 3))
    assert mmd2(x, x.copy(), Kernel("rbf", 0.7)) == 0.0


def test_mmd2_matches_naive_loop():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(9, 2))
    y = rng.normal(size=(5, 2))
    for bw in (0.3, 1.0, 2.5):
        assert mmd2(x, y, Kernel("rbf", bw)) == pytest.approx(naive_mmd2(x, y, bw), abs=1e-12)


def test_mmd2_symmetric_and_nonnegative():
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = rng.normal(size=(6, 2))
        y = rng.normal(size=(8, 2))
        k = Kernel("rbf", 1.3)
        assert mmd2(x, y, k) == pytest.approx(mmd2(y, x, k), abs=1e-14)
        assert mmd2(x, y, k) >= -1e-12


def test_mmd2_dimension_mismatch():
    with pytest.raises(DimensionError):
        mmd2(np.zeros((3, 2)), np.zeros((3, 3)), Kernel())
    with pytest.raises(DegenerateError):
        mmd2(np.zeros((0, 2)), np.zeros((3, 2)), Kernel())


def test_median_heuristic_two_points():
    assert median_heuristic(np.array([[0.0]]), np.array([[1.0]])) == 1.0


def test_median_heuristic_pooled():
    x = np.array([[0.0], [1.0]])
    y = np.array([[2.0], [3.0]])
    # pooled pairwise distances: 1,2,3,1,2,1 -> median 1.5
    assert median_heuristic(x, y) == pytest.approx(1.5)


def test_median_heuristic_degenerate():
    with pytest.raises(DegenerateError):
        median_heuristic(np.zeros((4, 2)), np.zeros((4, 2)))


# ---------------------------------------------------------------------------
# Early stopping


def test_should_stop_constant_trace():
    mmds = [1.0] * 50
    # With patience 20 the first stop is when 21 iterations have passed
    # since the best (iteration 0), i.e. with 22 rows logged.
    assert not should_stop(mmds[:21], 20)
    assert should_stop(mmds[:22], 20)


def test_should_stop_dip_then_flat():
    mmds = [5.0, 4.0, 3.0, 2.0, 1.0, 0.5] + [0.6] * 40
    stop_at = next(t for t in range(len(mmds)) if should_stop(mmds[: t + 1], 20))
    assert stop_at == 26  # best at iteration 5, plus patience 20, plus 1


def test_should_stop_ties_do_not_reset():
    mmds = [3.0] + [1.0] * 30
    stop_at = next(t for t in range(len(mmds)) if should_stop(mmds[: t + 1], 20))
    assert stop_at == 22  # first 1.0 is at iteration 1


def test_should_stop_improving_never_stops():
    mmds = list(np.linspace(1.0, 0.1, 40))
    assert not any(should_stop(mmds[: t + 1], 5) for t in range(len(mmds)))


def test_should_stop_accepts_history():
    rows = [HistoryRow(i, m, 0.0, 0, 0.0) for i, m in enumerate([1.0] * 22)]
    hist = RunHistory(rows=rows)
    assert should_stop(hist, 20)
    assert not should_stop(RunHistory(rows=rows[:10]), 20)


def test_should_stop_validation():
    with pytest.raises(ValueError):
        should_stop([1.0], 0)
    assert not should_stop([], 3)


def test_run_history_accessors():
    rows = [HistoryRow(i, 1.0 / (i + 1), 0.0, 0, 0.5) for i in range(4)]
    hist = RunHistory(rows=rows, status=RunStatus.completed())
    assert hist.final_mmd == 0.25
    assert hist.n_updates == 3
    np.testing.assert_allclose(hist.mmds, [1.0, 0.5, 1 / 3, 0.25])
    assert RunStatus.early_stopped(7).at == 7
    assert RunStatus.aborted("boom").reason == "boom"
    with pytest.raises(DegenerateError):
        RunHistory().final_mmd
