"""Numerical checks of the entropy and purity inequalities.

Each check returns a :class:`BoundReport` whose ``slack`` is oriented so that
a non-negative value means the inequality holds.
"""

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_density
from .antisym import as_amplitude, coefficient_matrix
from .spectra import (
    eigenvalues,
    entropy_from_eigenvalues,
    power_sum,
    reduced_density,
)

__all__ = [
    "BoundReport",
    "furuta_rhs",
    "furuta_rhs_natural",
    "furuta_spectrum_bound",
    "entropy_purity_bound",
    "purity_bound_check",
    "i2_defect",
    "antisym_entropy_check",
    "shimono_lower_bound",
    "input_digest",
]

INEQUALITY_TOL = 1e-9
PURITY_TOL = 1e-10
DEFECT_MAX_N = 3


def input_digest(*arrays):
    h = hashlib.sha256()
    for arr in arrays:
        arr = np.ascontiguousarray(np.asarray(arr, dtype=np.complex128))
        h.update(str(arr.shape).encode())
        h.update(arr.tobytes())
    return h.hexdigest()[:16]


@dataclass
class BoundReport:
    bound_name: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    input_digest: str = ""
    details: dict = field(default_factory=dict)

    @property
    def satisfied(self):
        return self.slack >= -self.tolerance

    def to_dict(self):
        out = {
            "bound_name": self.bound_name,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "slack": float(self.slack),
            "tolerance": float(self.tolerance),
            "satisfied": bool(self.satisfied),
            "input_digest": self.input_digest,
        }
        if self.details:
            out["details"] = {k: _plain(v) for k, v in self.details.items()}
        return out


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating, int, np.integer)):
        return float(v) if isinstance(v, (float, np.floating)) else int(v)
    return v


def _check_positive(name, v):
    if not v > 0:
        raise ValueError(f"{name} must be positive, got {v}")


def furuta_rhs(lam, x):
    """Right-hand side ``(1 - log2 x) lam - lam**2 / x`` as written with base-2 logs.

    Equality with ``-lam log2 lam`` holds at ``x == lam``, but this form is not
    a lower bound for every ``x``: it peaks at ``x = lam ln 2``.  Use
    :func:`furuta_rhs_natural` for the form that bounds the entropy term.
    """
    _check_positive("lambda", lam)
    _check_positive("x", x)
    return (1.0 - math.log2(x)) * lam - lam * lam / x


def furuta_rhs_natural(lam, x):
    """``((1 - ln x) lam - lam**2 / x) / ln 2``, a lower bound on ``-lam log2 lam``.

    The bound is tight exactly at ``x == lam``.
    """
    _check_positive("lambda", lam)
    _check_positive("x", x)
    return ((1.0 - math.log(x)) * lam - lam * lam / x) / math.log(2.0)


def furuta_spectrum_bound(lam, x, natural=True):
    """Sum of the Furuta right-hand side over the positive part of a spectrum."""
    rhs = furuta_rhs_natural if natural else furuta_rhs
    return float(sum(rhs(float(v), x) for v in np.asarray(lam) if v > 0))


def entropy_purity_bound(rho, tol=INEQUALITY_TOL):
    """Report for ``S(rho) >= -log2 Tr rho**2``."""
    rho = check_density(rho)
    lam = eigenvalues(rho)
    s = entropy_from_eigenvalues(lam)
    i2 = power_sum(rho, 2)
    rhs = -math.log2(i2)
    return BoundReport("entropy_purity", s, rhs, s - rhs, tol, input_digest(rho),
                       {"I2": i2})


def purity_bound_check(a, tol=PURITY_TOL):
    """Report for ``I2(rho_A) <= 2**-n`` on the state built from ``a``."""
    a = as_amplitude(a)
    rho = reduced_density(coefficient_matrix(a))
    i2 = power_sum(rho, 2)
    bound = 2.0**-a.n
    return BoundReport("purity", bound, i2, bound - i2, tol, input_digest(a.entries),
                       {"n": a.n})


def i2_defect(a):
    """Defect ``2**-n - I2`` from an explicit sum over slot exchanges.

    For every subset ``T`` of copy slots and every ordered pair of multi-indices
    ``(P, P')``, ``(Q, Q')`` is formed by exchanging the slots in ``T`` between
    ``P`` and ``P'``; the defect is the sum of ``|a_P a_P' - a_Q a_Q'|**2``
    weighted by ``2**-(2n+1)``.
    """
    a = as_amplitude(a)
    n = a.n
    if n > DEFECT_MAX_N:
        raise ValueError(f"defect enumeration is limited to n <= {DEFECT_MAX_N}, got n={n}")
    # pair[p_1..p_n, p'_1..p'_n] = a_P a_P'
    pair = np.multiply.outer(a.as_tensor(), a.as_tensor())
    total = 0.0
    for mask in range(2**n):
        swapped = pair
        for m in range(n):
            if mask >> m & 1:
                swapped = np.swapaxes(swapped, m, n + m)
        total += float(np.sum(np.abs(pair - swapped) ** 2))
    return total / 2.0 ** (2 * n + 1)


def antisym_entropy_check(a, tol=INEQUALITY_TOL):
    """Report for ``E(psi) >= n`` together with the chain ``E >= -log2 I2 >= n``."""
    a = as_amplitude(a)
    rho = reduced_density(coefficient_matrix(a))
    e = entropy_from_eigenvalues(eigenvalues(rho))
    i2 = power_sum(rho, 2)
    renyi = -math.log2(i2)
    details = {
        "n": a.n,
        "I2": i2,
        "minus_log2_I2": renyi,
        "entropy_over_renyi_slack": e - renyi,
        "renyi_over_n_slack": renyi - a.n,
    }
    details["chain_satisfied"] = bool(
        details["entropy_over_renyi_slack"] >= -tol and details["renyi_over_n_slack"] >= -tol
    )
    return BoundReport("antisym_entropy", e, float(a.n), e - a.n, tol,
                       input_digest(a.entries), details)


def shimono_lower_bound(d):
    """Reference lower bound ``log2(d / (d - 1))`` for d-level antisymmetric states."""
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    return math.log2(d / (d - 1))
