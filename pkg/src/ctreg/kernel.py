"""Canonical thresholding regression in an RKHS.

The Gram matrix scaled by 1/n plays the role of the sample covariance:
its eigendecomposition K/n = V Lambda^2 V^T yields the same canonical
basis sqrt(n) V as in the linear case, the shrunken canonical
coefficients determine the in-sample fit, and the minimum-RKHS-norm
interpolant of that fit is a kernel expansion with explicit dual
coefficients alpha = V Lambda^{-2} theta_hat / sqrt(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from .errors import NotPositiveSemidefiniteError, ZeroDesignError
from .estimators import GctConfig
from .thresholding import apply_rule

FloatArray = NDArray[np.float64]

DEFAULT_KERNEL_RANK_REL_TOL = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """A positive definite kernel: linear, RBF, or polynomial."""

    kind: str  # "linear" | "rbf" | "poly"
    gamma: float = 1.0  # rbf
    degree: int = 2  # poly
    coef0: float = 0.0  # poly
    scale: float = 1.0  # poly

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "rbf", "poly"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and self.gamma < 0:
            raise ValueError("rbf gamma must be nonnegative")
        if self.kind == "poly":
            if self.degree < 1:
                raise ValueError("poly degree must be a positive integer")
            if self.scale <= 0:
                raise ValueError("poly scale must be positive")


def _cross_gram(spec: KernelSpec, A: FloatArray, B: FloatArray) -> FloatArray:
    if spec.kind == "linear":
        return A @ B.T
    if spec.kind == "rbf":
        sq = (
            np.sum(A**2, axis=1)[:, None]
            + np.sum(B**2, axis=1)[None, :]
            - 2.0 * A @ B.T
        )
        return np.exp(-spec.gamma * np.maximum(sq, 0.0))
    return (spec.scale * (A @ B.T) + spec.coef0) ** spec.degree


def gram(points: FloatArray, spec: KernelSpec) -> FloatArray:
    """Kernel matrix K_ij = k(x_i, x_j), exactly symmetric."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a nonempty 2-D array")
    K = _cross_gram(spec, points, points)
    if not np.all(np.isfinite(K)):
        raise ValueError("non-finite kernel matrix entries")
    return (K + K.T) / 2.0


def kernel_canonicalize(
    K: FloatArray, rank_rel_tol: float = DEFAULT_KERNEL_RANK_REL_TOL
) -> Tuple[FloatArray, FloatArray]:
    """Eigendecomposition of K/n with the small-spectrum floor applied.

    Returns (eigenvalues, left_vectors) with eigenvalues non-increasing.
    Eigenvalues within rank_rel_tol of zero (relative to the top one) are
    dropped; materially negative ones raise an error.
    """
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    if K.shape != (n, n):
        raise ValueError("kernel matrix must be square")
    if not np.allclose(K, K.T, atol=1e-10 * max(1.0, float(np.abs(K).max()))):
        raise ValueError("kernel matrix must be symmetric")
    if not np.any(K):
        raise ZeroDesignError("zero kernel matrix")

    eig, vec = np.linalg.eigh(K / n)
    eig, vec = eig[::-1], vec[:, ::-1]
    top = eig[0]
    if top <= 0:
        raise NotPositiveSemidefiniteError("kernel matrix not positive semidefinite")
    if eig[-1] < -rank_rel_tol * top:
        raise NotPositiveSemidefiniteError("kernel matrix not positive semidefinite")
    keep = eig > rank_rel_tol * top
    eig, vec = eig[keep], vec[:, keep]

    # deterministic sign, matching the linear-module convention
    r = eig.shape[0]
    pivot = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[pivot, np.arange(r)])
    signs[signs == 0] = 1.0
    return eig, vec * signs


@dataclass(frozen=True)
class KernelModel:
    """A fitted RKHS model: dual coefficients plus the retained spectrum."""

    training_points: FloatArray
    dual_coeffs: FloatArray
    theta_hat: FloatArray
    eigenvalues: FloatArray
    left_vectors: FloatArray
    config: GctConfig
    kernel: KernelSpec
    response_mean: Optional[float] = None

    @property
    def rank(self) -> int:
        return self.eigenvalues.shape[0]


def fit_kernel_gct(
    points: FloatArray,
    Y: FloatArray,
    spec: KernelSpec,
    config: GctConfig,
    rank_rel_tol: float = DEFAULT_KERNEL_RANK_REL_TOL,
    center_response: bool = False,
) -> KernelModel:
    """Fit the kernel thresholding estimator.

    theta_hat = Lambda^{-phi} T_tau[Lambda^{phi} V^T Y / sqrt(n)] and
    alpha = V Lambda^{-2} theta_hat / sqrt(n).
    """
    points = np.asarray(points, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n = points.shape[0]
    if Y.shape != (n,):
        raise ValueError(f"response must have length {n}, got {Y.shape}")
    response_mean = None
    if center_response:
        response_mean = float(Y.mean())
        Y = Y - response_mean

    K = gram(points, spec)
    eig, vec = kernel_canonicalize(K, rank_rel_tol)
    theta_ls = vec.T @ Y / math.sqrt(n)
    weights = eig ** (config.phi / 2.0)
    theta_hat = apply_rule(config.rule, weights * theta_ls, config.tau) / weights
    alpha = vec @ (theta_hat / eig) / math.sqrt(n)
    return KernelModel(
        training_points=points,
        dual_coeffs=alpha,
        theta_hat=theta_hat,
        eigenvalues=eig,
        left_vectors=vec,
        config=config,
        kernel=spec,
        response_mean=response_mean,
    )


def predict_kernel(model: KernelModel, x: FloatArray) -> float:
    """Predict at a single point via the dual form sum_i alpha_i k(x_i, x)."""
    x = np.asarray(x, dtype=np.float64)
    d = model.training_points.shape[1]
    if x.shape != (d,):
        raise ValueError(f"point must have dimension {d}, got {x.shape}")
    kx = _cross_gram(model.kernel, x[None, :], model.training_points)[0]
    value = float(kx @ model.dual_coeffs)
    if model.response_mean is not None:
        value += model.response_mean
    return value


def predict_kernel_batch(model: KernelModel, X: FloatArray) -> FloatArray:
    """Predict at several points at once."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.training_points.shape[1]:
        raise ValueError(
            f"points must have {model.training_points.shape[1]} columns"
        )
    values = _cross_gram(model.kernel, X, model.training_points) @ model.dual_coeffs
    if model.response_mean is not None:
        values = values + model.response_mean
    return values


def in_sample_fit(model: KernelModel) -> FloatArray:
    """Fitted values at the training points, sqrt(n) V theta_hat."""
    n = model.training_points.shape[0]
    values = math.sqrt(n) * model.left_vectors @ model.theta_hat
    if model.response_mean is not None:
        values = values + model.response_mean
    return values


@dataclass(frozen=True)
class InSampleError:
    total: float  # n^{-1} sum_i (fhat(x_i) - f(x_i))^2
    canonical: float  # ||theta_hat - V^T f / sqrt(n)||^2
    outside_span: float  # mass of f outside span(V), divided by n


def kernel_in_sample_error(
    model: KernelModel, f_true_values: FloatArray
) -> InSampleError:
    """Average squared in-sample error against true function values.

    The total splits exactly into the canonical-coefficient distance plus
    the part of f outside the retained spectral span.
    """
    f = np.asarray(f_true_values, dtype=np.float64)
    n = model.training_points.shape[0]
    if f.shape != (n,):
        raise ValueError(f"f_true_values must have length {n}, got {f.shape}")
    if model.response_mean is not None:
        f = f - model.response_mean
    fitted = math.sqrt(n) * model.left_vectors @ model.theta_hat
    total = float(np.sum((fitted - f) ** 2)) / n
    theta_true = model.left_vectors.T @ f / math.sqrt(n)
    canonical = float(np.sum((model.theta_hat - theta_true) ** 2))
    projection = math.sqrt(n) * model.left_vectors @ theta_true
    outside = float(np.sum((f - projection) ** 2)) / n
    return InSampleError(total=total, canonical=canonical, outside_span=outside)


def kernel_effective_dimension(K: FloatArray, f_values: FloatArray, q: float) -> float:
    """Joint effective dimension || V^T f / ||f||_2 ||_q^q of a kernel problem."""
    if not 0.0 <= q <= 2.0:
        raise ValueError(f"q must lie in [0, 2], got {q!r}")
    f = np.asarray(f_values, dtype=np.float64)
    norm = float(np.linalg.norm(f))
    if norm <= 0:
        raise ValueError("f must be nonzero")
    _, vec = kernel_canonicalize(np.asarray(K, dtype=np.float64))
    proj = vec.T @ f / norm
    if q == 0.0:
        return float(np.count_nonzero(np.abs(proj) > 1e-12))
    return float(np.sum(np.abs(proj) ** q))
