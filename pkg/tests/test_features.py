"""Daily feature extraction, seasonal stratification, scaling, and PCA."""

import numpy as np
import pytest

from gridplan.core import synth_profiles
from gridplan.errors import DataError
from gridplan.scenarios import (
    Season,
    build_feature_matrix,
    normalize_minmax,
    reduce_pca,
    stratify_seasons,
)
from gridplan.scenarios.features import SEASON_MONTHS, SEASON_ORDER, season_of


def test_feature_matrix_shape(roomy_net):
    prof = synth_profiles(roomy_net, seed=0)
    fm = build_feature_matrix(prof)
    assert fm.values.shape == (365, 3 * 24 + 24)
    assert fm.n_buses == 3
    assert np.array_equal(fm.row_day, np.arange(365))


def test_feature_rows_concatenate_load_then_pv(roomy_net):
    prof = synth_profiles(roomy_net, seed=0)
    fm = build_feature_matrix(prof)
    d = 40
    assert np.array_equal(fm.values[d, : 3 * 24], prof.load_kw[d].reshape(-1))
    assert np.array_equal(fm.values[d, 3 * 24 :], prof.pv_factor[d])


def test_season_months_partition_year():
    months = [m for s in SEASON_ORDER for m in SEASON_MONTHS[s]]
    assert sorted(months) == list(range(1, 13))


def test_stratify_covers_year(roomy_net):
    prof = synth_profiles(roomy_net, seed=0)
    fm = build_feature_matrix(prof)
    part = stratify_seasons(fm, prof.day_dates)
    sizes = {s: len(part.day_indices[s]) for s in SEASON_ORDER}
    assert sum(sizes.values()) == 365
    # austral summer in a non-leap year: all of Dec + Jan + Feb
    assert sizes[Season.SUMMER] == 31 + 31 + 28
    for s in SEASON_ORDER:
        for d in part.day_indices[s]:
            assert season_of(prof.day_dates[d]) is s


def test_stratify_length_mismatch(roomy_net):
    prof = synth_profiles(roomy_net, seed=0)
    fm = build_feature_matrix(prof)
    with pytest.raises(DataError, match="one date"):
        stratify_seasons(fm, prof.day_dates[:-1])


def test_minmax_scales_to_unit_interval():
    rng = np.random.default_rng(0)
    x = rng.normal(5.0, 3.0, size=(40, 7))
    out = normalize_minmax(x)
    assert out.min() >= 0 and out.max() <= 1
    assert np.allclose(out.min(axis=0), 0) and np.allclose(out.max(axis=0), 1)


def test_minmax_constant_column_maps_to_zero():
    x = np.column_stack([np.full(10, 4.2), np.arange(10.0)])
    out = normalize_minmax(x)
    assert np.all(out[:, 0] == 0)
    assert out[:, 1].max() == 1


def test_minmax_needs_two_rows():
    with pytest.raises(DataError, match="2 rows"):
        normalize_minmax(np.ones((1, 3)))


def test_pca_full_variance_reconstructs():
    rng = np.random.default_rng(1)
    x = rng.random((30, 6))
    scores, loadings = reduce_pca(x, variance_target=1.0)
    rebuilt = scores @ loadings + x.mean(axis=0)
    assert np.allclose(rebuilt, x, atol=1e-10)


def test_pca_truncates_low_rank():
    rng = np.random.default_rng(2)
    basis = rng.random((2, 9))
    x = rng.random((50, 2)) @ basis  # exactly rank 2
    scores, loadings = reduce_pca(x, variance_target=0.95)
    assert scores.shape[1] <= 2
    assert loadings.shape == (scores.shape[1], 9)


def test_pca_component_count_is_minimal():
    # three axis-aligned directions with variances 100, 10, 1
    rng = np.random.default_rng(3)
    x = np.column_stack([
        rng.normal(0, 10.0, 400),
        rng.normal(0, np.sqrt(10.0), 400),
        rng.normal(0, 1.0, 400),
    ])
    scores, _ = reduce_pca(x, variance_target=0.95)
    total = 100.0 + 10.0 + 1.0
    assert 100.0 / total < 0.95 <= 110.0 / total  # so exactly 2 components
    assert scores.shape[1] == 2


def test_pca_degenerate_constant_matrix():
    scores, loadings = reduce_pca(np.ones((5, 4)) * 0.0, variance_target=0.95)
    assert scores.shape == (5, 1)
    assert np.all(scores == 0) and np.all(loadings == 0)


def test_pca_rejects_bad_target():
    with pytest.raises(DataError, match="variance target"):
        reduce_pca(np.random.default_rng(0).random((5, 3)), variance_target=0.0)
