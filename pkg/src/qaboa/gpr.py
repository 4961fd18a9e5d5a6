"""Gaussian process surrogate with a Matern kernel, optionally augmented with a
per-sample noise term derived from the kurtosis of measured basis-state
distributions.

The kurtosis term models the measurement uncertainty of a quantum circuit
evaluation: a sharply peaked basis-state distribution (large kurtosis) gives a
reliable objective value, so its noise contribution omega * (kappa + eps)**-2
shrinks quadratically.  The term enters only the training covariance diagonal
for the sample it was measured on, never the cross- or test-covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator

from .statevector import MeasurementHistogram

SUPPORTED_NU = (0.5, 1.5, 2.5)
DEGENERATE_VARIANCE_TOL = 1e-12
BASE_JITTER = 1e-10
MAX_JITTER = 1e-4


def matern_kernel(a: np.ndarray, b: np.ndarray, nu: float = 0.5, length_scale: float = 1.0) -> np.ndarray:
    """Matern covariance between two point sets, using the closed forms for nu in {1/2, 3/2, 5/2}."""
    if nu not in SUPPORTED_NU:
        raise ValueError(f"nu must be one of {SUPPORTED_NU}, got {nu}")
    if length_scale <= 0:
        raise ValueError("length_scale must be positive")
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    r = cdist(a, b) / length_scale
    if nu == 0.5:
        return np.exp(-r)
    if nu == 1.5:
        s = math.sqrt(3.0) * r
        return (1.0 + s) * np.exp(-s)
    s = math.sqrt(5.0) * r
    return (1.0 + s + s**2 / 3.0) * np.exp(-s)


@dataclass(frozen=True)
class KurtosisEstimate:
    """Pearson kurtosis of an empirical basis-state distribution.

    ``degenerate`` marks a (near) point mass, where the ratio is 0/0; the
    stored kappa is meaningless in that case and noise contributions treat
    the measurement as perfectly sharp.
    """

    kappa: float
    degenerate: bool


def histogram_kurtosis(hist: MeasurementHistogram) -> KurtosisEstimate:
    """Fourth central moment over squared variance of the measured basis indices."""
    zs, ps = hist.frequencies()
    if zs.size == 0:
        raise ValueError("empty histogram")
    mu = float(np.dot(ps, zs))
    centered = zs - mu
    var = float(np.dot(ps, centered**2))
    if var < DEGENERATE_VARIANCE_TOL:
        return KurtosisEstimate(kappa=0.0, degenerate=True)
    fourth = float(np.dot(ps, centered**4))
    return KurtosisEstimate(kappa=fourth / var**2, degenerate=False)


def kurtosis_noise(estimate: KurtosisEstimate, omega: float, epsilon: float) -> float:
    """Same-sample covariance bump omega * (kappa + epsilon)**-2; zero for point masses."""
    if estimate.degenerate:
        return 0.0
    return omega * (estimate.kappa + epsilon) ** -2


def quantum_matern_kernel(
    x: np.ndarray,
    x_prime: np.ndarray,
    same_sample: bool,
    kappa: KurtosisEstimate | None = None,
    nu: float = 0.5,
    length_scale: float = 1.0,
    omega: float = 1.0,
    epsilon: float = 1e-6,
) -> float:
    """Kurtosis-augmented Matern kernel between two individual points.

    The augmentation applies only when both arguments are the same training
    sample (``same_sample``), for which ``kappa`` must be supplied.
    """
    base = float(matern_kernel(np.atleast_2d(x), np.atleast_2d(x_prime), nu=nu, length_scale=length_scale)[0, 0])
    if not same_sample:
        return base
    if kappa is None:
        raise ValueError("same-sample evaluation requires a kurtosis estimate")
    return base + kurtosis_noise(kappa, omega, epsilon)


def _cholesky_with_jitter(k: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of k + jitter*I, doubling jitter from 1e-10 up to 1e-4."""
    jitter = BASE_JITTER
    while True:
        try:
            return cholesky(k + jitter * np.eye(k.shape[0]), lower=True), jitter
        except np.linalg.LinAlgError:
            if jitter >= MAX_JITTER:
                raise np.linalg.LinAlgError(
                    f"covariance matrix not positive definite even with jitter {jitter:g}"
                ) from None
            jitter = min(2.0 * jitter, MAX_JITTER)


class GaussianProcessSurrogate(BaseEstimator):
    """GP regressor over box-scaled search points.

    Parameters
    ----------
    kernel : "matern" or "qmatern"
        "qmatern" adds the kurtosis noise term to the training diagonal and
        requires per-sample kurtosis estimates at fit time.
    nu : smoothness, one of 0.5, 1.5, 2.5.
    length_scale, omega : initial hyperparameter values.
    length_scale_bounds, omega_bounds : tuning boxes for the marginal
        likelihood search.
    epsilon : guard added to kappa before inversion.
    optimizer : "lbfgsb" tunes hyperparameters by maximizing the log marginal
        likelihood (quasi-Newton with numerical gradients, log-space bounds);
        None keeps the initial values.
    n_restarts : extra optimizer starts drawn log-uniformly within bounds.
    random_state : seed for the restart draws, fixed so refits are reproducible.

    Targets are standardized internally to zero mean and unit variance;
    predictions are returned on the original scale.
    """

    def __init__(
        self,
        kernel: str = "matern",
        nu: float = 0.5,
        length_scale: float = 1.0,
        length_scale_bounds: tuple[float, float] = (1e-2, 1e2),
        omega: float = 1.0,
        omega_bounds: tuple[float, float] = (1e-4, 1e4),
        epsilon: float = 1e-6,
        optimizer: str | None = "lbfgsb",
        n_restarts: int = 5,
        random_state: int = 0,
    ):
        self.kernel = kernel
        self.nu = nu
        self.length_scale = length_scale
        self.length_scale_bounds = length_scale_bounds
        self.omega = omega
        self.omega_bounds = omega_bounds
        self.epsilon = epsilon
        self.optimizer = optimizer
        self.n_restarts = n_restarts
        self.random_state = random_state

    # -- fitting -----------------------------------------------------------

    def _validate_inputs(self, X, y, kappas):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} values")
        if X.shape[0] < 1:
            raise ValueError("need at least one sample")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("non-finite values in training data")
        if self.kernel not in ("matern", "qmatern"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.kernel == "qmatern":
            if kappas is None:
                raise ValueError("qmatern kernel requires per-sample kurtosis estimates")
            if len(kappas) != y.shape[0]:
                raise ValueError("one kurtosis estimate per sample is required")
            inv_sq = np.array(
                [0.0 if k.degenerate else (k.kappa + self.epsilon) ** -2 for k in kappas]
            )
        else:
            inv_sq = np.zeros(y.shape[0])
        return X, y, inv_sq

    def _training_covariance(self, length_scale: float, omega: float) -> np.ndarray:
        k = matern_kernel(self.X_, self.X_, nu=self.nu, length_scale=length_scale)
        return k + np.diag(omega * self._inv_sq)

    def _neg_lml(self, theta: np.ndarray) -> float:
        length_scale = math.exp(theta[0])
        omega = math.exp(theta[1]) if theta.shape[0] > 1 else self.omega
        k = self._training_covariance(length_scale, omega)
        try:
            low = cholesky(k + BASE_JITTER * np.eye(k.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            return np.inf
        alpha = cho_solve((low, True), self._y_std)
        lml = (
            -0.5 * float(self._y_std @ alpha)
            - float(np.sum(np.log(np.diag(low))))
            - 0.5 * k.shape[0] * math.log(2.0 * math.pi)
        )
        return -lml

    def log_marginal_likelihood(self, length_scale: float | None = None, omega: float | None = None) -> float:
        """Log marginal likelihood of the standardized targets at the given hyperparameters."""
        theta = [math.log(length_scale if length_scale is not None else self.length_scale_)]
        if self.kernel == "qmatern":
            theta.append(math.log(omega if omega is not None else self.omega_))
        return -self._neg_lml(np.asarray(theta))

    def _optimize_hyperparameters(self) -> tuple[float, float]:
        tune_omega = self.kernel == "qmatern"
        bounds = [tuple(np.log(self.length_scale_bounds))]
        start = [math.log(self.length_scale)]
        if tune_omega:
            bounds.append(tuple(np.log(self.omega_bounds)))
            start.append(math.log(self.omega))
        rng = np.random.default_rng(self.random_state)
        starts = [np.asarray(start)]
        for _ in range(self.n_restarts):
            starts.append(np.array([rng.uniform(lo, hi) for lo, hi in bounds]))
        best_theta, best_value = starts[0], np.inf
        for theta0 in starts:
            result = minimize(self._neg_lml, theta0, method="L-BFGS-B", bounds=bounds)
            if result.fun < best_value:
                best_theta, best_value = result.x, result.fun
        length_scale = math.exp(best_theta[0])
        omega = math.exp(best_theta[1]) if tune_omega else self.omega
        return length_scale, omega

    def fit(self, X, y, kappas=None):
        """Fit the surrogate; ``kappas`` holds one KurtosisEstimate per sample for qmatern."""
        self.X_, y, self._inv_sq = self._validate_inputs(X, y, kappas)
        self.y_train_ = y
        self.y_shift_ = float(np.mean(y))
        scale = float(np.std(y))
        self.y_scale_ = scale if scale > DEGENERATE_VARIANCE_TOL else 1.0
        self._y_std = (y - self.y_shift_) / self.y_scale_

        if self.optimizer is None:
            self.length_scale_, self.omega_ = self.length_scale, self.omega
        elif self.optimizer == "lbfgsb":
            self.length_scale_, self.omega_ = self._optimize_hyperparameters()
        else:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

        k = self._training_covariance(self.length_scale_, self.omega_)
        self.L_, self.jitter_ = _cholesky_with_jitter(k)
        self.alpha_vec_ = cho_solve((self.L_, True), self._y_std)
        self.lml_value_ = self.log_marginal_likelihood()
        return self

    # -- prediction --------------------------------------------------------

    def _check_fitted(self):
        if not hasattr(self, "L_"):
            raise RuntimeError("surrogate is not fitted")

    def predict_standardized(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and stddev on the internal standardized-target scale."""
        self._check_fitted()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.X_.shape[1]:
            raise ValueError(f"expected {self.X_.shape[1]} features, got {X.shape[1]}")
        k_star = matern_kernel(X, self.X_, nu=self.nu, length_scale=self.length_scale_)
        mu = k_star @ self.alpha_vec_
        v = solve_triangular(self.L_, k_star.T, lower=True)
        var = np.clip(1.0 - np.sum(v**2, axis=0), 0.0, None)
        return mu, np.sqrt(var)

    def predict(self, X, return_std: bool = False):
        """Posterior mean (and stddev) on the original target scale."""
        mu_std, sigma_std = self.predict_standardized(X)
        mu = self.y_shift_ + self.y_scale_ * mu_std
        if return_std:
            return mu, self.y_scale_ * sigma_std
        return mu
