"""scikit-learn style wrappers around the spectral features and the E_f optimizer."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import ValidationError, check_unit_norm
from .antisym import AmplitudeTensor, _copy_count, coefficient_matrix
from .bounds import i2_defect
from .eof import MixedState, OptimizerConfig, eof_sandwich, eof_upper_bound
from .spectra import reduced_density, summarize

FEATURES = ("entropy", "I2", "s2", "concurrence", "defect")


def check_amplitude_rows(X, n=None):
    """Validate a 2-D batch of amplitude tensors, one per row.

    Returns the batch as a complex array and the copy count.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        raise ValidationError("expected a 2-D array with one amplitude tensor per row; "
                              "reshape a single sample with X.reshape(1, -1)")
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError(f"expected a non-empty 2-D array, got shape {X.shape}")
    X = X.astype(np.complex128)
    if not np.all(np.isfinite(X)):
        raise ValidationError("input contains non-finite values")
    k = _copy_count(X.shape[1])
    if n is not None and k != n:
        raise ValidationError(f"estimator was fitted on n={n} copies, got rows for n={k}")
    for row in X:
        check_unit_norm(row, "amplitude row")
    return X, k


def check_mixed_state(X, dims=None):
    if isinstance(X, MixedState):
        return X
    rho = np.asarray(X)
    if dims is None:
        d = rho.shape[0]
        root = int(round(np.sqrt(d)))
        if root * root != d:
            raise ValidationError("pass dims=(dim_a, dim_b) for non-square bipartitions")
        dims = (root, root)
    tag = None
    k = 0
    while 3**k < dims[0]:
        k += 1
    if dims[0] == dims[1] == 3**k and k >= 1:
        candidate = MixedState(dims[0], dims[1], rho)
        if candidate.support_residual(k) <= 1e-9:
            tag = k
    return MixedState(dims[0], dims[1], rho, tag)


class SpectrumFeatures(TransformerMixin, BaseEstimator):
    """Map amplitude tensors to entanglement features of their reduced states.

    Parameters
    ----------
    features : tuple of str
        Columns to emit, any of ``"entropy"``, ``"I2"``, ``"s2"``,
        ``"concurrence"`` and ``"defect"`` (the last is limited to n <= 3).
    """

    def __init__(self, features=("entropy", "I2", "s2", "concurrence")):
        self.features = features

    def fit(self, X, y=None):
        unknown = set(self.features) - set(FEATURES)
        if unknown:
            raise ValueError(f"unknown features: {sorted(unknown)}")
        _, self.n_copies_ = check_amplitude_rows(X)
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_copies_")
        X, n = check_amplitude_rows(X, self.n_copies_)
        out = np.empty((X.shape[0], len(self.features)))
        for i, row in enumerate(X):
            a = AmplitudeTensor(n, row)
            summary = summarize(reduced_density(coefficient_matrix(a)), ks=(2,))
            values = {
                "entropy": summary.entropy_bits,
                "I2": summary.power_sums[2],
                "s2": summary.sym_functions[2],
                "concurrence": summary.concurrence,
            }
            for j, name in enumerate(self.features):
                out[i, j] = i2_defect(a) if name == "defect" else values[name]
        return out

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.features, dtype=object)


class EntanglementOfFormation(BaseEstimator):
    """Numerical upper bound on the entanglement of formation of a mixed state.

    ``fit`` accepts a :class:`~antisym_ec.eof.MixedState` or a density matrix
    (with ``dims`` for non-square bipartitions).  States supported in an
    n-copy antisymmetric subspace are recognized and additionally bracketed
    from below by ``n``.

    Attributes
    ----------
    value_ : float
        Best ensemble-average entanglement found.
    ensemble_ : DecompositionEnsemble
    trace_ : list of dict
        Optimizer log with ``restart``, ``iteration``, ``objective``, ``step_norm``.
    lower_ : float or None
        Analytic lower bound for tagged states.
    gap_ : float or None
    converged_ : bool
    """

    def __init__(self, ensemble_size=None, restarts=8, max_iterations=500,
                 step_tolerance=1e-9, objective_tolerance=1e-12, seed=0,
                 eigen_start=True, dims=None):
        self.ensemble_size = ensemble_size
        self.restarts = restarts
        self.max_iterations = max_iterations
        self.step_tolerance = step_tolerance
        self.objective_tolerance = objective_tolerance
        self.seed = seed
        self.eigen_start = eigen_start
        self.dims = dims

    def _config(self):
        return OptimizerConfig(
            ensemble_size=self.ensemble_size,
            restarts=self.restarts,
            max_iterations=self.max_iterations,
            step_tolerance=self.step_tolerance,
            objective_tolerance=self.objective_tolerance,
            seed=self.seed,
            eigen_start=self.eigen_start,
        )

    def fit(self, X, y=None, initial=None):
        state = check_mixed_state(X, self.dims)
        cfg = self._config()
        if state.support_n is not None:
            report = eof_sandwich(state, cfg, initial)
            result = report.result
            self.lower_, self.gap_ = report.lower, report.gap
            self.report_ = report
        else:
            result = eof_upper_bound(state, cfg, initial)
            self.lower_ = self.gap_ = None
            self.report_ = None
        self.state_ = state
        self.value_ = result.value
        self.ensemble_ = result.ensemble
        self.trace_ = result.trace
        self.converged_ = result.converged
        self.restart_values_ = result.restart_values
        return self

    def score(self, X=None, y=None):
        """Negated upper bound, so that larger is better."""
        check_is_fitted(self, "value_")
        return -self.value_
