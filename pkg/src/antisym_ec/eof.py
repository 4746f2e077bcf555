"""Entanglement of formation by minimization over decomposition ensembles.

Every size-m pure-state decomposition of a rank-r state ``rho`` is reached by
an m x r isometry ``U`` acting on the eigen-ensemble::

    phi_j = sum_k U[j, k] sqrt(lam_k) v_k,   p_j = |phi_j|**2,   psi_j = phi_j / |phi_j|

The average entanglement of such an ensemble is an upper bound on E_f.  It is
minimized by Riemannian steepest descent on the complex Stiefel manifold with
a polar retraction and Armijo backtracking, from several seeded starts.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import (
    ValidationError,
    check_density,
    check_isometry,
    check_positive_int,
)
from .antisym import antisymmetric_isometry
from .bounds import input_digest
from .spectra import entropy_from_eigenvalues

__all__ = [
    "MixedState",
    "DecompositionEnsemble",
    "OptimizerConfig",
    "EofResult",
    "SandwichReport",
    "pure_entanglement",
    "ensemble_average_entropy",
    "eigen_ensemble",
    "decomposition_from_isometry",
    "isometry_from_ensemble",
    "eof_upper_bound",
    "product_ensemble",
    "tensor_states",
    "tensor_mixed",
    "eof_sandwich",
    "ec_estimate",
    "random_antisymmetric_mixed",
    "maximally_mixed_antisymmetric",
]

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
WEIGHT_FLOOR = 1e-14
RECONSTRUCTION_TOL = 1e-9
SUPPORT_TOL = 1e-9
ELEMENT_TOL = 1e-6
GAP_TOL = 1e-9
MAX_COPIES = 3
MAX_BIPARTITE_DIM = 729


def _interleave_perm(d_a1, d_b1, d_a2, d_b2):
    # kron order is (a1, b1, a2, b2); bipartite order wants (a1, a2, b1, b2)
    return (d_a1, d_b1, d_a2, d_b2), (0, 2, 1, 3)


def tensor_states(psi1, dims1, psi2, dims2):
    """Bipartite tensor product of two state vectors, Alice's factors first."""
    shape, perm = _interleave_perm(*dims1, *dims2)
    t = np.kron(np.asarray(psi1), np.asarray(psi2)).reshape(shape)
    return np.transpose(t, perm).reshape(-1)


@dataclass(eq=False)
class MixedState:
    """Density matrix on ``C^dim_a (x) C^dim_b``, optionally tagged as antisymmetric.

    ``support_n`` marks support in the n-copy antisymmetric subspace (then
    ``dim_a == dim_b == 3**n``); the tag is verified on construction.
    """

    dim_a: int
    dim_b: int
    rho: np.ndarray
    support_n: int = None

    def __post_init__(self):
        self.dim_a = check_positive_int(self.dim_a, "dim_a")
        self.dim_b = check_positive_int(self.dim_b, "dim_b")
        rho = check_density(self.rho)
        if rho.shape[0] != self.dim_a * self.dim_b:
            raise ValidationError(
                f"rho has dimension {rho.shape[0]}, expected {self.dim_a * self.dim_b}"
            )
        self.rho = rho
        if self.support_n is not None:
            n = check_positive_int(self.support_n, "support_n")
            if self.dim_a != 3**n or self.dim_b != 3**n:
                raise ValidationError(f"antisymmetric {n}-copy states need dim_a = dim_b = {3**n}")
            residual = self.support_residual(n)
            if residual > SUPPORT_TOL:
                raise ValidationError(
                    f"state is not supported in the {n}-copy antisymmetric subspace "
                    f"(residual {residual:.3e})"
                )
            self.support_n = n

    @property
    def dim(self):
        return self.dim_a * self.dim_b

    def support_residual(self, n):
        w = antisymmetric_isometry(n)
        outside = self.rho - w @ (w.conj().T @ self.rho)
        return float(np.linalg.norm(outside))

    @classmethod
    def from_pure(cls, psi, dim_a, dim_b, support_n=None):
        psi = np.asarray(psi, dtype=np.complex128)
        return cls(dim_a, dim_b, np.outer(psi, psi.conj()), support_n)


def tensor_mixed(s1, s2):
    """``s1 (x) s2`` with Alice's and Bob's factors each grouped together."""
    shape, perm = _interleave_perm(s1.dim_a, s1.dim_b, s2.dim_a, s2.dim_b)
    t = np.kron(s1.rho, s2.rho).reshape(shape + shape)
    t = np.transpose(t, perm + tuple(p + 4 for p in perm))
    d = s1.dim * s2.dim
    tag = None
    if s1.support_n is not None and s2.support_n is not None:
        tag = s1.support_n + s2.support_n
    return MixedState(s1.dim_a * s2.dim_a, s1.dim_b * s2.dim_b, t.reshape(d, d), tag)


@dataclass(eq=False)
class DecompositionEnsemble:
    weights: np.ndarray
    states: np.ndarray  # shape (m, dim), one unit vector per row

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=np.complex128))
        if self.weights.ndim != 1 or self.weights.shape[0] != self.states.shape[0]:
            raise ValidationError("weights and states must have matching lengths")
        if np.any(self.weights <= 0):
            raise ValidationError("ensemble weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-10:
            raise ValidationError(f"ensemble weights sum to {self.weights.sum()!r}")
        norms = np.linalg.norm(self.states, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValidationError("ensemble states must be unit vectors")

    @property
    def size(self):
        return self.weights.shape[0]

    def density(self):
        return (self.states.T * self.weights) @ self.states.conj()

    def check_reconstructs(self, rho, tol=RECONSTRUCTION_TOL):
        residual = float(np.max(np.abs(self.density() - rho)))
        if residual > tol:
            raise ValidationError(f"ensemble does not reconstruct rho (residual {residual:.3e})")
        return residual


def pure_entanglement(psi, dim_a, dim_b):
    """Entropy of entanglement of a bipartite pure state via its Schmidt coefficients."""
    s = np.linalg.svd(np.asarray(psi).reshape(dim_a, dim_b), compute_uv=False)
    lam = s**2
    return entropy_from_eigenvalues(lam / lam.sum())


def ensemble_average_entropy(ensemble, dim_a, dim_b, rho=None):
    """Average entanglement of an ensemble; checks reconstruction when ``rho`` is given."""
    if rho is not None:
        ensemble.check_reconstructs(np.asarray(rho))
    return float(sum(p * pure_entanglement(psi, dim_a, dim_b)
                     for p, psi in zip(ensemble.weights, ensemble.states)))


def _eigen(rho):
    lam, vecs = np.linalg.eigh(rho)
    keep = lam > RANK_TOL
    lam, vecs = lam[keep][::-1], vecs[:, keep][:, ::-1]
    return lam, vecs


def eigen_ensemble(rho):
    lam, vecs = _eigen(check_density(rho))
    lam = lam / lam.sum()
    return DecompositionEnsemble(lam, vecs.T.copy())


def _build_ensemble(phi):
    # phi: (dim, m) unnormalized members as columns
    weights = np.sum(np.abs(phi) ** 2, axis=0)
    keep = weights >= WEIGHT_FLOOR
    weights, phi = weights[keep], phi[:, keep]
    states = (phi / np.sqrt(weights)).T
    return DecompositionEnsemble(weights / weights.sum(), states)


def decomposition_from_isometry(rho, u, eig=None):
    """Ensemble ``phi_j = sum_k U[j, k] sqrt(lam_k) v_k`` for an isometry ``U``.

    ``eig`` may pass a precomputed ``(lam, vecs)`` pair restricted to the
    support of ``rho``.  The reconstruction of ``rho`` is asserted.
    """
    rho = check_density(rho)
    lam, vecs = eig if eig is not None else _eigen(rho)
    u = check_isometry(u)
    if u.shape[1] != lam.shape[0]:
        raise ValidationError(f"U has {u.shape[1]} columns but rho has rank {lam.shape[0]}")
    phi = (vecs * np.sqrt(lam)) @ u.T
    ens = _build_ensemble(phi)
    ens.check_reconstructs(rho)
    return ens


def isometry_from_ensemble(rho, ensemble, eig=None):
    """Isometry that maps the eigen-ensemble of ``rho`` onto ``ensemble``."""
    lam, vecs = eig if eig is not None else _eigen(check_density(rho))
    phi = ensemble.states.T * np.sqrt(ensemble.weights)
    u = (vecs.conj().T @ phi).T / np.sqrt(lam)
    return check_isometry(u, tol=1e-8)


def product_ensemble(e1, dims1, e2, dims2):
    """Ensemble of all products ``psi_j1 (x) psi_j2`` with weights ``p_j1 p_j2``."""
    weights = np.multiply.outer(e1.weights, e2.weights).ravel()
    states = np.array([tensor_states(s1, dims1, s2, dims2)
                       for s1 in e1.states for s2 in e2.states])
    return DecompositionEnsemble(weights / weights.sum(), states)


@dataclass
class OptimizerConfig:
    ensemble_size: int = None  # default rank + 2, capped at dim**2
    restarts: int = 8
    max_iterations: int = 500
    step_tolerance: float = 1e-9
    objective_tolerance: float = 1e-12
    seed: int = 0
    eigen_start: bool = True

    def __post_init__(self):
        if self.ensemble_size is not None:
            self.ensemble_size = check_positive_int(self.ensemble_size, "ensemble_size")
        self.restarts = check_positive_int(self.restarts, "restarts")
        self.max_iterations = check_positive_int(self.max_iterations, "max_iterations", 0)

    def resolved_size(self, rank, dim):
        m = self.ensemble_size if self.ensemble_size is not None else min(rank + 2, dim * dim)
        if m < rank:
            raise ValidationError(f"ensemble size {m} is below rank {rank}")
        return m

    def to_dict(self):
        return asdict(self)


class _Objective:
    """Average entanglement as a function of the isometry, with its gradient."""

    def __init__(self, lam, vecs, dim_a, dim_b):
        self.phi0 = vecs * np.sqrt(lam)
        self.dim_a, self.dim_b = dim_a, dim_b
        self.min_element_entropy = math.inf
        self.evaluations = 0

    def members(self, u):
        return self.phi0 @ u.T

    def value(self, u, with_grad=False):
        phi = self.members(u)
        m = phi.shape[1]
        mats = phi.T.reshape(m, self.dim_a, self.dim_b)
        w, s, vh = np.linalg.svd(mats, full_matrices=False)
        sq = s**2
        p = sq.sum(axis=1)
        total = 0.0
        grad_cols = np.zeros_like(phi) if with_grad else None
        for j in range(m):
            if p[j] < WEIGHT_FLOOR:
                continue
            nz = sq[j] > 0
            logs = np.zeros_like(sq[j])
            logs[nz] = np.log2(sq[j][nz]) - math.log2(p[j])
            h = -float(np.sum(sq[j][nz] * logs[nz]))
            total += h
            self.min_element_entropy = min(self.min_element_entropy, h / p[j])
            if with_grad:
                g = -(w[j] * (logs * s[j])) @ vh[j]
                grad_cols[:, j] = g.reshape(-1)
        self.evaluations += 1
        if not with_grad:
            return total
        egrad = grad_cols.T @ self.phi0.conj()
        return total, egrad


def _polar(y):
    w, _, vh = np.linalg.svd(y, full_matrices=False)
    return w @ vh


def _riemannian_grad(u, egrad):
    x = u.conj().T @ egrad
    return 2.0 * (egrad - u @ (0.5 * (x + x.conj().T)))


def _random_isometry(m, r, rng):
    z = rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))
    q, rr = np.linalg.qr(z)
    return q * (np.diag(rr) / np.abs(np.diag(rr)))


def _descend(obj, u, cfg, restart, trace):
    f, eg = obj.value(u, with_grad=True)
    g = _riemannian_grad(u, eg)
    trace.append({"restart": restart, "iteration": 0, "objective": f, "step_norm": 0.0})
    step = 1.0
    converged = False
    for it in range(1, cfg.max_iterations + 1):
        gnorm2 = float(np.real(np.vdot(g, g)))
        if gnorm2 < 1e-30:
            converged = True
            break
        # Armijo backtracking keeps every accepted iterate no worse than the last
        while True:
            cand = _polar(u - step * g)
            fc = obj.value(cand)
            if fc <= f - 1e-4 * step * gnorm2 or step < 1e-14:
                break
            step *= 0.5
        if fc > f:
            converged = True
            break
        step_norm = float(np.linalg.norm(cand - u))
        decrease = f - fc
        f, eg = obj.value(cand, with_grad=True)
        g_new = _riemannian_grad(cand, eg)
        # Barzilai-Borwein trial step from the last displacement
        s_vec, y_vec = cand - u, g_new - g
        sy = float(np.real(np.vdot(s_vec, y_vec)))
        step = float(np.real(np.vdot(s_vec, s_vec))) / sy if sy > 1e-30 else 2.0 * step
        step = min(max(step, 1e-10), 1e6)
        u, g = cand, g_new
        trace.append({"restart": restart, "iteration": it, "objective": f,
                      "step_norm": step_norm})
        if step_norm < cfg.step_tolerance or decrease < cfg.objective_tolerance:
            converged = True
            break
    return u, f, converged


@dataclass
class EofResult:
    value: float
    ensemble: DecompositionEnsemble
    trace: list
    converged: bool
    restart_values: list
    best_restart: int
    min_element_entropy: float
    isometry: np.ndarray = field(repr=False, default=None)


def eof_upper_bound(state, cfg=None, initial=None):
    """Minimize the average entanglement over decompositions of ``state``.

    Returns an :class:`EofResult`; ``value`` is the best ensemble average found
    and is therefore an upper bound on the entanglement of formation.
    ``initial`` is an optional warm-start ensemble for ``state.rho``; when it is
    given it replaces the starting point of restart 0.
    """
    cfg = cfg or OptimizerConfig()
    if state.dim > MAX_BIPARTITE_DIM:
        raise ValueError(f"bipartite dimension {state.dim} exceeds {MAX_BIPARTITE_DIM}")
    lam, vecs = _eigen(state.rho)
    rank = lam.shape[0]
    obj = _Objective(lam, vecs, state.dim_a, state.dim_b)

    u_init = None
    if initial is not None:
        initial.check_reconstructs(state.rho)
        u_init = isometry_from_ensemble(state.rho, initial, (lam, vecs))
    m = u_init.shape[0] if u_init is not None else cfg.resolved_size(rank, state.dim)

    trace, values, isometries, flags = [], [], [], []
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, restart])
        if restart == 0 and u_init is not None:
            u0 = u_init
        elif restart == 0 and cfg.eigen_start:
            u0 = np.eye(m, rank, dtype=np.complex128)
        else:
            u0 = _random_isometry(m, rank, rng)
        u, f, conv = _descend(obj, u0, cfg, restart, trace)
        logger.debug("restart %d: objective %.12g (converged=%s)", restart, f, conv)
        values.append(f)
        isometries.append(u)
        flags.append(conv)

    # np.argmin keeps the earliest restart among ties
    best = int(np.argmin(values))
    u = isometries[best]
    ensemble = decomposition_from_isometry(state.rho, u, (lam, vecs))
    return EofResult(
        value=float(values[best]),
        ensemble=ensemble,
        trace=trace,
        converged=bool(flags[best]),
        restart_values=[float(v) for v in values],
        best_restart=best,
        min_element_entropy=float(obj.min_element_entropy),
        isometry=u,
    )


@dataclass
class SandwichReport:
    n: int
    lower: float
    upper: float
    gap: float
    converged: bool
    elements_checked: bool
    min_element_entropy: float
    cfg: dict
    input_digest: str
    result: EofResult = field(repr=False, default=None)

    @property
    def consistent(self):
        return self.gap >= -GAP_TOL and self.elements_checked

    def to_dict(self):
        return {
            "n": self.n,
            "value": self.upper,
            "lower": self.lower,
            "upper": self.upper,
            "gap": self.gap,
            "converged": self.converged,
            "elements_checked": self.elements_checked,
            "min_element_entropy": self.min_element_entropy,
            "cfg": self.cfg,
            "input_digest": self.input_digest,
        }


def eof_sandwich(state, cfg=None, initial=None):
    """Bracket E_f of an n-copy antisymmetric state between ``n`` and the optimizer.

    The lower value is the analytic bound ``n``; the optimizer only supplies
    the upper value.  Every ensemble member the optimizer evaluates is checked
    against the per-state bound ``E >= n``.
    """
    if state.support_n is None:
        raise ValidationError("eof_sandwich needs a state tagged with its antisymmetric copy count")
    n = state.support_n
    if n > MAX_COPIES:
        raise ValueError(f"copy count {n} exceeds {MAX_COPIES}")
    cfg = cfg or OptimizerConfig()
    res = eof_upper_bound(state, cfg, initial)
    lower = float(n)
    return SandwichReport(
        n=n,
        lower=lower,
        upper=res.value,
        gap=res.value - lower,
        converged=res.converged,
        elements_checked=res.min_element_entropy >= n - ELEMENT_TOL,
        min_element_entropy=res.min_element_entropy,
        cfg=cfg.to_dict(),
        input_digest=input_digest(state.rho),
        result=res,
    )


def ec_estimate(state, n_max, cfg=None):
    """Finite-copy ratios ``(n, upper/n, lower/n)`` for ``state**n``, n = 1..n_max."""
    if state.support_n != 1:
        raise ValidationError("ec_estimate needs a single-copy antisymmetric state")
    n_max = check_positive_int(n_max, "n_max")
    if n_max > MAX_COPIES:
        raise ValueError(f"n_max={n_max} exceeds the dimension guard {MAX_COPIES}")
    rows = []
    power = state
    for n in range(1, n_max + 1):
        if n > 1:
            power = tensor_mixed(power, state)
        rep = eof_sandwich(power, cfg)
        rows.append((n, rep.upper / n, rep.lower / n))
    return rows


def random_antisymmetric_mixed(rank, seed=None, n=1):
    """Random density matrix of the given rank supported in the n-copy subspace."""
    n = check_positive_int(n, "n")
    d = 3**n
    rank = check_positive_int(rank, "rank")
    if rank > d:
        raise ValueError(f"rank {rank} exceeds subspace dimension {d}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    sigma = g @ g.conj().T
    sigma /= np.trace(sigma).real
    w = antisymmetric_isometry(n)
    rho = w @ sigma @ w.conj().T
    return MixedState(d, d, 0.5 * (rho + rho.conj().T), n)


def maximally_mixed_antisymmetric(n=1):
    w = antisymmetric_isometry(n)
    return MixedState(3**n, 3**n, (w @ w.conj().T) / 3**n, n)
