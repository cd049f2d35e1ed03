"""Tests for the exact solution-path K-fold cross-validation."""

import math

import numpy as np
import pytest

from ctreg import (
    CanonicalCoefficients,
    Dataset,
    HARD_RULE,
    SOFT_RULE,
    breakpoints,
    canonical_ls,
    canonicalize,
    cv_error_at,
    fold_assignment,
    grid_cv_oracle,
    joint_cv,
    kfold_cv,
    kfold_cv_pcr,
    kfold_cv_ridge,
)
from ctreg.estimators import fit_pcr, fit_ridge


def random_dataset(seed, n, d, noise=1.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    beta = rng.standard_normal(d)
    Y = X @ beta + noise * rng.standard_normal(n)
    return Dataset(X, Y)


def spectral_setup(eigenvalues, theta_ls):
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    theta_ls = np.asarray(theta_ls, dtype=np.float64)
    n = eigenvalues.shape[0]
    X = math.sqrt(n) * np.diag(np.sqrt(eigenvalues))
    dec = canonicalize(Dataset(X, np.zeros(n)))
    return dec, CanonicalCoefficients(theta_ls)


class TestBreakpoints:
    def test_unweighted(self):
        dec, theta = spectral_setup([1.0, 1.0, 1.0], [3.0, -1.0, 0.0])
        np.testing.assert_allclose(breakpoints(dec, theta, 0.0), [0.0, 1.0, 3.0])

    def test_weighted(self):
        # eigenvalue weights lam^(1/2) = (2, 1, 1): magnitudes (6, 1, 0)
        dec, theta = spectral_setup([4.0, 1.0, 1.0], [3.0, -1.0, 0.0])
        np.testing.assert_allclose(
            breakpoints(dec, theta, 1.0), [0.0, 1.0, 6.0], atol=1e-12
        )

    def test_zero_theta(self):
        dec, theta = spectral_setup([1.0, 1.0], [0.0, 0.0])
        np.testing.assert_array_equal(breakpoints(dec, theta, 0.0), [0.0])


class TestFoldAssignment:
    def test_sizes(self):
        for n, L in ((10, 3), (20, 4), (17, 5), (7, 7)):
            assignment = fold_assignment(n, L, seed=0)
            sizes = np.bincount(assignment, minlength=L)
            assert sizes.sum() == n
            assert set(sizes) <= {n // L, n // L + 1}

    def test_determinism(self):
        a = fold_assignment(30, 5, seed=42)
        b = fold_assignment(30, 5, seed=42)
        np.testing.assert_array_equal(a, b)
        c = fold_assignment(30, 5, seed=43)
        assert not np.array_equal(a, c)

    def test_contiguous_mode(self):
        assignment = fold_assignment(6, 3, seed=0, fold_mode="contiguous")
        np.testing.assert_array_equal(assignment, [0, 0, 1, 1, 2, 2])

    def test_invalid_folds(self):
        with pytest.raises(ValueError):
            fold_assignment(10, 1, seed=0)
        with pytest.raises(ValueError):
            fold_assignment(5, 6, seed=0)


class TestKfoldCv:
    def test_zero_response_tie_break(self):
        # every tau gives the same (zero) fit; the largest candidate wins,
        # and with no signal the only breakpoint is 0
        X = np.random.default_rng(0).standard_normal((12, 4))
        result = kfold_cv(Dataset(X, np.zeros(12)), 3)
        assert result.tau_cv == max(float(bp.max()) for bp in result.fold_breakpoints)
        assert result.tau_cv == 0.0

    def test_leave_one_out_beats_grid(self):
        ds = random_dataset(1, 20, 10)
        result = kfold_cv(ds, 20, seed=7)
        hi = max(float(bp.max()) for bp in result.fold_breakpoints)
        grid = np.concatenate(([0.0], np.logspace(math.log10(hi) - 6, math.log10(hi), 10_000)))
        _, grid_err = grid_cv_oracle(ds, 20, 0.0, SOFT_RULE, grid, seed=7)
        assert result.cv_error_at_tau <= grid_err + 1e-10

    def test_exact_path_and_reevaluation(self):
        ds = random_dataset(2, 30, 50)
        result = kfold_cv(ds, 5, seed=3)
        hi = max(float(bp.max()) for bp in result.fold_breakpoints)
        grid = np.linspace(0.0, hi * 1.05, 10_000)
        _, grid_err = grid_cv_oracle(ds, 5, 0.0, SOFT_RULE, grid, seed=3)
        assert result.cv_error_at_tau <= grid_err + 1e-10
        re_eval = cv_error_at(ds, 5, 0.0, SOFT_RULE, 3, result.tau_cv)
        assert re_eval == pytest.approx(result.cv_error_at_tau, abs=1e-12)

    def test_hard_rule_matches_breakpoint_grid(self):
        ds = random_dataset(3, 25, 8, noise=0.5)
        result = kfold_cv(ds, 5, rule=HARD_RULE, seed=1)
        finite = result.candidate_set[np.isfinite(result.candidate_set)]
        tau_g, err_g = grid_cv_oracle(ds, 5, 0.0, HARD_RULE, finite, seed=1)
        assert result.cv_error_at_tau <= err_g + 1e-12
        if math.isfinite(result.tau_cv):
            assert result.tau_cv == tau_g
            assert result.cv_error_at_tau == pytest.approx(err_g, abs=1e-12)

    def test_determinism(self):
        ds = random_dataset(4, 20, 10)
        a = kfold_cv(ds, 4, seed=11)
        b = kfold_cv(ds, 4, seed=11)
        assert a.tau_cv == b.tau_cv
        np.testing.assert_array_equal(a.fold_assignment, b.fold_assignment)

    def test_candidate_count_bound(self):
        ds = random_dataset(5, 30, 50)
        L = 5
        result = kfold_cv(ds, L, seed=0)
        for bp in result.fold_breakpoints:
            assert bp.shape[0] <= min(30, 50) + 1
        assert result.candidate_set.shape[0] <= L * min(30, 50) + 2

    def test_large_tau_is_zero_estimator_error(self):
        ds = random_dataset(6, 18, 6)
        result = kfold_cv(ds, 3, seed=2)
        hi = max(float(bp.max()) for bp in result.fold_breakpoints)
        assignment = result.fold_assignment
        expected = 0.0
        for fold_id in range(3):
            y_val = ds.response[assignment == fold_id]
            expected += float(np.mean(y_val**2)) / 3
        assert cv_error_at(ds, 3, 0.0, SOFT_RULE, 2, hi * 2) == pytest.approx(expected)

    def test_custom_rule_runs(self):
        from ctreg import RuleKind, ThresholdRule
        from ctreg.thresholding import soft as soft_scalar

        rule = ThresholdRule(RuleKind.CUSTOM, custom_fn=soft_scalar, custom_constant=3.0)
        ds = random_dataset(7, 15, 5)
        result = kfold_cv(ds, 3, rule=rule, seed=0)
        assert math.isfinite(result.cv_error_at_tau)


class TestGridOracle:
    def test_single_point_grid(self):
        ds = random_dataset(8, 12, 4)
        tau, err = grid_cv_oracle(ds, 3, 0.0, SOFT_RULE, np.array([0.0]), seed=5)
        assert tau == 0.0
        assert err == pytest.approx(cv_error_at(ds, 3, 0.0, SOFT_RULE, 5, 0.0))

    def test_dominated_by_exact_path(self):
        ds = random_dataset(9, 25, 15)
        result = kfold_cv(ds, 5, seed=9)
        for grid in (np.linspace(0, 3, 50), np.logspace(-3, 1, 200)):
            _, err = grid_cv_oracle(ds, 5, 0.0, SOFT_RULE, grid, seed=9)
            assert result.cv_error_at_tau <= err + 1e-12

    def test_empty_grid(self):
        ds = random_dataset(10, 10, 3)
        with pytest.raises(ValueError):
            grid_cv_oracle(ds, 2, 0.0, SOFT_RULE, np.array([]), seed=0)


class TestJointCv:
    def test_matches_two_separate_calls(self):
        ds = random_dataset(11, 24, 12)
        phi, tau, result = joint_cv(ds, 4, [0.0, 1.0], seed=6)
        r0 = kfold_cv(ds, 4, 0.0, SOFT_RULE, seed=6)
        r1 = kfold_cv(ds, 4, 1.0, SOFT_RULE, seed=6)
        best = min(r0.cv_error_at_tau, r1.cv_error_at_tau)
        assert result.cv_error_at_tau == best
        assert phi == (0.0 if r0.cv_error_at_tau <= r1.cv_error_at_tau else 1.0)

    def test_empty_grid(self):
        ds = random_dataset(12, 10, 4)
        with pytest.raises(ValueError):
            joint_cv(ds, 3, [], seed=0)


class TestBaselineCv:
    def test_pcr_matches_brute_force(self):
        ds = random_dataset(13, 20, 6)
        m_star, err_star = kfold_cv_pcr(ds, 4, seed=8)
        # brute force: refit per fold via the library estimators
        assignment = fold_assignment(20, 4, seed=8)
        max_m = m_star
        errors = {}
        dec_rank = min(
            canonicalize(
                Dataset(ds.design[assignment != l], ds.response[assignment != l])
            ).rank
            for l in range(4)
        )
        for m in range(dec_rank + 1):
            total = 0.0
            for l in range(4):
                train = Dataset(ds.design[assignment != l], ds.response[assignment != l])
                fit = fit_pcr(train, m)
                val_X = ds.design[assignment == l]
                val_y = ds.response[assignment == l]
                total += float(np.mean((val_y - val_X @ fit.beta) ** 2)) / 4
            errors[m] = total
        brute_m = min(errors, key=lambda m: (errors[m], m))
        assert m_star == brute_m
        assert err_star == pytest.approx(errors[brute_m], abs=1e-10)

    def test_ridge_matches_brute_force(self):
        ds = random_dataset(14, 18, 9)
        grid = np.logspace(-4, 1, 12)
        lam_star, err_star = kfold_cv_ridge(ds, 3, grid, seed=4)
        assignment = fold_assignment(18, 3, seed=4)
        best = (math.nan, math.inf)
        for lam in np.sort(grid):
            total = 0.0
            for l in range(3):
                train = Dataset(ds.design[assignment != l], ds.response[assignment != l])
                fit = fit_ridge(train, float(lam))
                val_X = ds.design[assignment == l]
                val_y = ds.response[assignment == l]
                total += float(np.mean((val_y - val_X @ fit.beta) ** 2)) / 3
            if total <= best[1]:
                best = (float(lam), total)
        assert lam_star == pytest.approx(best[0])
        assert err_star == pytest.approx(best[1], abs=1e-10)
