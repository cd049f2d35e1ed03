"""Exact solution-path K-fold cross-validation for the threshold level.

As tau sweeps [0, inf) the thresholded support only changes at the finite
set of weighted coefficient magnitudes, so the CV objective is piecewise
quadratic in tau for the soft rule (minimized in closed form per segment)
and piecewise constant for the hard rule (one evaluation per segment).
A brute-force grid oracle with identical fold construction is provided
for testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from .canonical import (
    CanonicalCoefficients,
    CanonicalDecomposition,
    Dataset,
    canonical_ls,
    canonicalize,
)
from .thresholding import RuleKind, SOFT_RULE, ThresholdRule, apply_rule

FloatArray = NDArray[np.float64]

FoldMode = Literal["seeded-random", "contiguous"]


@dataclass(frozen=True)
class PathSegment:
    """Minimizer of the CV objective restricted to one tau interval."""

    lo: float
    hi: float
    tau: float
    error: float


@dataclass(frozen=True)
class CvResult:
    tau_cv: float
    cv_error_at_tau: float
    fold_breakpoints: List[FloatArray]
    candidate_set: FloatArray
    fold_assignment: NDArray[np.int64]
    path_segments: List[PathSegment]


def breakpoints(
    dec: CanonicalDecomposition,
    theta_ls: CanonicalCoefficients,
    phi: float,
) -> FloatArray:
    """Sorted distinct tau values at which the thresholded support changes.

    Returns {0} united with the weighted magnitudes lam_j^(phi/2)|theta_j|;
    at and above the maximum the soft-rule estimator is identically zero.
    """
    if theta_ls.values.shape != (dec.rank,):
        raise ValueError("theta length must equal decomposition rank")
    weights = dec.eigenvalues ** (phi / 2.0)
    vals = weights * np.abs(theta_ls.values)
    return np.unique(np.concatenate(([0.0], vals)))


def fold_assignment(
    n: int, L: int, seed: int, fold_mode: FoldMode = "seeded-random"
) -> NDArray[np.int64]:
    """Partition [n] into L blocks with sizes in {floor(n/L), floor(n/L)+1}."""
    if L < 2:
        raise ValueError("need at least 2 folds")
    if L > n:
        raise ValueError(f"cannot split {n} observations into {L} folds")
    base, extra = divmod(n, L)
    sizes = [base + 1] * extra + [base] * (L - extra)
    if fold_mode == "seeded-random":
        order = np.random.default_rng(seed).permutation(n)
    elif fold_mode == "contiguous":
        order = np.arange(n)
    else:
        raise ValueError(f"unknown fold_mode {fold_mode!r}")
    assignment = np.empty(n, dtype=np.int64)
    start = 0
    for fold_id, size in enumerate(sizes):
        assignment[order[start : start + size]] = fold_id
        start += size
    return assignment


@dataclass(frozen=True)
class _Fold:
    """Per-fold precomputation: validation scores against the training basis."""

    theta_ls: FloatArray
    eigenvalues: FloatArray
    weights: FloatArray  # lam_j^(phi/2) on the training part
    scores: FloatArray  # X_val @ U @ Lambda^{-1}, shape m x r
    y_val: FloatArray
    bps: FloatArray


def _prepare_folds(
    dataset: Dataset, L: int, phi: float, seed: int, fold_mode: FoldMode
) -> Tuple[NDArray[np.int64], List[_Fold]]:
    assignment = fold_assignment(dataset.n, L, seed, fold_mode)
    folds: List[_Fold] = []
    for fold_id in range(L):
        val_mask = assignment == fold_id
        train = Dataset(
            dataset.design[~val_mask], dataset.response[~val_mask], dataset.centered
        )
        dec = canonicalize(train)
        theta = canonical_ls(dec, train.response)
        scores = (
            dataset.design[val_mask] @ dec.right_vectors / dec.singular_values
        )
        folds.append(
            _Fold(
                theta_ls=theta.values,
                eigenvalues=dec.eigenvalues,
                weights=dec.eigenvalues ** (phi / 2.0),
                scores=scores,
                y_val=dataset.response[val_mask],
                bps=breakpoints(dec, theta, phi),
            )
        )
    return assignment, folds


def _fold_error(fold: _Fold, rule: ThresholdRule, tau: float) -> float:
    theta_hat = apply_rule(rule, fold.weights * fold.theta_ls, tau) / fold.weights
    residual = fold.y_val - fold.scores @ theta_hat
    return float(residual @ residual) / fold.y_val.shape[0]


def _cv_error(folds: Sequence[_Fold], rule: ThresholdRule, tau: float) -> float:
    return sum(_fold_error(fold, rule, tau) for fold in folds) / len(folds)


def cv_error_at(
    dataset: Dataset,
    L: int,
    phi: float,
    rule: ThresholdRule,
    seed: int,
    tau: float,
    fold_mode: FoldMode = "seeded-random",
) -> float:
    """Evaluate the K-fold CV objective at a single threshold level."""
    _, folds = _prepare_folds(dataset, L, phi, seed, fold_mode)
    return _cv_error(folds, rule, tau)


def _soft_segment_quadratic(
    folds: Sequence[_Fold], lo: float
) -> Tuple[float, float, float]:
    """Coefficients (A, B, C) of the average CV error A tau^2 + B tau + C on
    the segment whose open interior starts at ``lo``."""
    A = B = C = 0.0
    for fold in folds:
        active = fold.weights * np.abs(fold.theta_ls) > lo
        theta_active = np.where(active, fold.theta_ls, 0.0)
        slope = np.where(active, np.sign(fold.theta_ls) / fold.weights, 0.0)
        u = fold.y_val - fold.scores @ theta_active
        v = fold.scores @ slope
        m = fold.y_val.shape[0]
        A += float(v @ v) / m
        B += 2.0 * float(u @ v) / m
        C += float(u @ u) / m
    L = len(folds)
    return A / L, B / L, C / L


def _minimize_quadratic(
    A: float, B: float, C: float, lo: float, hi: float
) -> Tuple[float, float]:
    """Minimize on [lo, hi]; exact ties resolved toward the larger tau."""
    value = lambda t: A * t * t + B * t + C
    best_tau, best_err = hi, value(hi)
    if A > 0:
        vertex = -B / (2.0 * A)
        if lo < vertex < hi and value(vertex) < best_err:
            best_tau, best_err = vertex, value(vertex)
    if value(lo) < best_err:
        best_tau, best_err = lo, value(lo)
    return best_tau, best_err


def kfold_cv(
    dataset: Dataset,
    L: int,
    phi: float = 0.0,
    rule: ThresholdRule = SOFT_RULE,
    seed: int = 0,
    fold_mode: FoldMode = "seeded-random",
) -> CvResult:
    """Exact K-fold CV over all tau >= 0.

    Soft rule: closed-form minimization of the piecewise-quadratic objective
    on every segment between merged breakpoints.  Hard rule: one evaluation
    per merged breakpoint plus a sentinel above the maximum representing the
    zero estimator (the boundary component is still kept at tau equal to a
    breakpoint).  Custom rules: finite evaluation at breakpoints and segment
    midpoints.  Exact ties are broken toward the largest tau.
    """
    assignment, folds = _prepare_folds(dataset, L, phi, seed, fold_mode)
    fold_bps = [fold.bps for fold in folds]
    merged = np.unique(np.concatenate(fold_bps))

    segments: List[PathSegment] = []
    if rule.kind is RuleKind.SOFT:
        candidates = merged
        best_tau, best_err = math.nan, math.inf
        if merged.shape[0] == 1:
            tau0 = float(merged[0])
            err0 = _cv_error(folds, rule, tau0)
            segments.append(PathSegment(tau0, tau0, tau0, err0))
            best_tau, best_err = tau0, err0
        for lo, hi in zip(merged[:-1], merged[1:]):
            A, B, C = _soft_segment_quadratic(folds, float(lo))
            tau_star, err_star = _minimize_quadratic(A, B, C, float(lo), float(hi))
            segments.append(PathSegment(float(lo), float(hi), tau_star, err_star))
            if err_star <= best_err:
                best_tau, best_err = tau_star, err_star
    else:
        if rule.kind is RuleKind.HARD:
            candidates = merged
            if merged[-1] > 0:
                candidates = np.append(candidates, math.inf)
        else:
            midpoints = (merged[:-1] + merged[1:]) / 2.0
            extra = [merged[-1] * 1.5] if merged[-1] > 0 else []
            candidates = np.unique(np.concatenate((merged, midpoints, extra)))
        best_tau, best_err = math.nan, math.inf
        for tau in candidates:
            err = _cv_error(folds, rule, float(tau))
            if err <= best_err:
                best_tau, best_err = float(tau), err

    return CvResult(
        tau_cv=best_tau,
        cv_error_at_tau=best_err,
        fold_breakpoints=fold_bps,
        candidate_set=np.asarray(candidates, dtype=np.float64),
        fold_assignment=assignment,
        path_segments=segments,
    )


def _fold_errors_on_grid(
    fold: _Fold, rule: ThresholdRule, taus: FloatArray
) -> FloatArray:
    """Validation error of one fold at every grid point at once."""
    weighted = fold.weights * fold.theta_ls
    if rule.kind is RuleKind.SOFT:
        shrunk = np.sign(weighted)[:, None] * np.maximum(
            np.abs(weighted)[:, None] - taus[None, :], 0.0
        )
    elif rule.kind is RuleKind.HARD:
        shrunk = np.where(
            np.abs(weighted)[:, None] >= taus[None, :], weighted[:, None], 0.0
        )
    else:
        return np.array([_fold_error(fold, rule, float(tau)) for tau in taus])
    theta_hat = shrunk / fold.weights[:, None]  # r x m
    residual = fold.y_val[:, None] - fold.scores @ theta_hat
    return np.sum(residual**2, axis=0) / fold.y_val.shape[0]


def grid_cv_oracle(
    dataset: Dataset,
    L: int,
    phi: float,
    rule: ThresholdRule,
    grid: FloatArray,
    seed: int,
    fold_mode: FoldMode = "seeded-random",
) -> Tuple[float, float]:
    """Brute-force CV over an explicit tau grid with identical folds."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("empty grid")
    _, folds = _prepare_folds(dataset, L, phi, seed, fold_mode)
    taus = np.sort(grid)
    errors = sum(_fold_errors_on_grid(fold, rule, taus) for fold in folds) / len(folds)
    # scan ascending with <= so exact ties resolve toward the largest tau
    best_tau, best_err = math.nan, math.inf
    for tau, err in zip(taus, errors):
        if err <= best_err:
            best_tau, best_err = float(tau), float(err)
    return best_tau, best_err


def joint_cv(
    dataset: Dataset,
    L: int,
    phi_grid: Sequence[float],
    rule: ThresholdRule = SOFT_RULE,
    seed: int = 0,
    fold_mode: FoldMode = "seeded-random",
) -> Tuple[float, float, CvResult]:
    """Tune (tau, phi) by running the exact tau path for each phi candidate.

    Returns (phi, tau, result) with the smallest CV error; ties go to the
    smaller phi.
    """
    if len(phi_grid) == 0:
        raise ValueError("empty phi grid")
    best: Optional[Tuple[float, float, CvResult]] = None
    for phi in phi_grid:
        result = kfold_cv(dataset, L, phi, rule, seed, fold_mode)
        if best is None or result.cv_error_at_tau < best[2].cv_error_at_tau:
            best = (float(phi), result.tau_cv, result)
    assert best is not None
    return best


def kfold_cv_pcr(
    dataset: Dataset,
    L: int,
    seed: int = 0,
    fold_mode: FoldMode = "seeded-random",
) -> Tuple[int, float]:
    """Select the number of leading components by K-fold CV.

    Components beyond the smallest per-fold rank are not considered.  Ties
    go to the smaller model.
    """
    _, folds = _prepare_folds(dataset, L, 0.0, seed, fold_mode)
    max_m = min(fold.theta_ls.shape[0] for fold in folds)
    errors = np.zeros(max_m + 1)
    for fold in folds:
        m_val = fold.y_val.shape[0]
        pred = np.zeros(m_val)
        errors[0] += float(np.sum((fold.y_val - pred) ** 2)) / m_val / len(folds)
        for m in range(1, max_m + 1):
            pred = pred + fold.scores[:, m - 1] * fold.theta_ls[m - 1]
            errors[m] += (
                float(np.sum((fold.y_val - pred) ** 2)) / m_val / len(folds)
            )
    best_m = int(np.argmin(errors))
    return best_m, float(errors[best_m])


def kfold_cv_ridge(
    dataset: Dataset,
    L: int,
    lambda_grid: FloatArray,
    seed: int = 0,
    fold_mode: FoldMode = "seeded-random",
) -> Tuple[float, float]:
    """Select the ridge penalty by K-fold CV over an explicit grid."""
    lambda_grid = np.asarray(lambda_grid, dtype=np.float64)
    if lambda_grid.size == 0:
        raise ValueError("empty lambda grid")
    _, folds = _prepare_folds(dataset, L, 0.0, seed, fold_mode)
    best_lam, best_err = math.nan, math.inf
    for lam in np.sort(lambda_grid):
        err = 0.0
        for fold in folds:
            theta_hat = fold.theta_ls / (1.0 + lam / fold.eigenvalues)
            residual = fold.y_val - fold.scores @ theta_hat
            err += float(residual @ residual) / fold.y_val.shape[0] / len(folds)
        if err <= best_err:
            best_lam, best_err = float(lam), err
    return best_lam, best_err
