"""Reduced states, spectra and the spectral functions built on them.

All entropies are in bits.  Eigenvalues are computed with a dense Hermitian
solver; desk-scale matrices here are at most 81 x 81 (729 x 729 for the
three-copy reduced states of mixed-state ensembles).
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import PSD_TOL, ValidationError, check_density
from .antisym import as_amplitude, coefficient_matrix

__all__ = [
    "SpectrumSummary",
    "reduced_density",
    "eigenvalues",
    "von_neumann_entropy",
    "entropy_from_eigenvalues",
    "power_sum",
    "elementary_symmetric",
    "generalized_concurrence",
    "s2_minor_oracle",
    "entropy_of_entanglement",
    "summarize",
]

SUM_TOL = 1e-10
CROSS_CHECK_TOL = 1e-10
ORACLE_MAX_N = 3


def reduced_density(alpha):
    """Alice's reduced state ``alpha @ alpha^H`` of a bipartite pure state."""
    alpha = np.asarray(alpha, dtype=np.complex128)
    rho = alpha @ alpha.conj().T
    return check_density(0.5 * (rho + rho.conj().T), "reduced density")


def eigenvalues(rho):
    """Eigenvalues of a density matrix, clamped to ``[0, 1]``, descending.

    Values in ``[-1e-10, 0)`` are treated as round-off and set to zero; anything
    more negative is rejected by the density-matrix validation.
    """
    rho = check_density(rho)
    lam = np.linalg.eigvalsh(rho)
    if lam[0] < -PSD_TOL:
        raise ValidationError(f"negative eigenvalue {lam[0]:.3e}")
    lam = np.clip(lam, 0.0, 1.0)[::-1]
    total = lam.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"eigenvalues sum to {total!r}")
    return lam


def entropy_from_eigenvalues(lam):
    lam = np.asarray(lam, dtype=np.float64)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam))) if lam.size else 0.0


def von_neumann_entropy(rho):
    """``-Tr rho log2 rho`` with ``0 log 0 = 0``."""
    return entropy_from_eigenvalues(eigenvalues(rho))


def power_sum(rho, k):
    """``Tr rho**k``, from the spectrum and cross-checked against matrix powers."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    rho = check_density(rho)
    lam = eigenvalues(rho)
    from_spectrum = float(np.sum(lam**k))
    from_matrix = float(np.trace(np.linalg.matrix_power(rho, k)).real)
    if abs(from_spectrum - from_matrix) > CROSS_CHECK_TOL:
        raise ArithmeticError(
            f"power sum mismatch for k={k}: {from_spectrum!r} vs {from_matrix!r}"
        )
    return from_spectrum


def _newton_elementary(power_sums, k):
    # power_sums[i] = I_{i+1}; e_0 = 1, k e_k = sum_i (-1)^(i-1) e_{k-i} I_i
    e = [1.0]
    for q in range(1, k + 1):
        acc = 0.0
        for i in range(1, q + 1):
            acc += (-1) ** (i - 1) * e[q - i] * power_sums[i - 1]
        e.append(acc / q)
    return e[k]


def elementary_symmetric(rho, k):
    """k-th elementary symmetric function of the spectrum via Newton's identities."""
    rho = check_density(rho)
    dim = rho.shape[0]
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= dim:
        raise ValueError(f"k must be an integer in [1, {dim}], got {k}")
    lam = eigenvalues(rho)
    sums = [float(np.sum(lam**i)) for i in range(1, int(k) + 1)]
    return float(_newton_elementary(sums, int(k)))


def generalized_concurrence(rho):
    """Square root of the second elementary symmetric function of the spectrum."""
    return float(np.sqrt(max(elementary_symmetric(rho, 2), 0.0)))


def _support_entries(n):
    # alpha[J, K] can be nonzero only where j_m != k_m in every slot
    digits = np.indices((3,) * n).reshape(n, -1).T
    weights = 3 ** np.arange(n - 1, -1, -1)
    rows, cols = [], []
    for jd in digits:
        for kd in digits:
            if np.all(jd != kd):
                rows.append(jd @ weights)
                cols.append(kd @ weights)
    return np.asarray(rows), np.asarray(cols)


def s2_minor_oracle(alpha):
    """Sum of squared moduli of all 2x2 minors of the coefficient matrix.

    Each minor is counted once, with rows ``J < J'`` and columns ``K < K'``.
    Minors outside the structural support of an antisymmetric coefficient
    matrix vanish identically and are skipped; every remaining minor is
    enumerated explicitly.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    d = alpha.shape[0]
    n = 0
    while 3**n < d:
        n += 1
    if 3**n != d or alpha.shape != (d, d):
        raise ValidationError(f"expected a 3**n x 3**n matrix, got shape {alpha.shape}")
    if n > ORACLE_MAX_N:
        raise ValueError(f"minor enumeration is limited to n <= {ORACLE_MAX_N}, got n={n}")
    if n == 0:
        return 0.0

    rows, cols = _support_entries(n)
    off_support = np.ones((d, d), dtype=bool)
    off_support[rows, cols] = False
    if np.any(np.abs(alpha[off_support]) > 1e-12):
        raise ValidationError("matrix has entries outside the antisymmetric support")

    # a minor is nonzero only if its diagonal or anti-diagonal pair is in support
    r1, r2 = np.meshgrid(np.arange(rows.size), np.arange(rows.size), indexing="ij")
    r1, r2 = r1.ravel(), r2.ravel()
    keep = (rows[r1] < rows[r2]) & (cols[r1] != cols[r2])
    j, jp = rows[r1[keep]], rows[r2[keep]]
    k = np.minimum(cols[r1[keep]], cols[r2[keep]])
    kp = np.maximum(cols[r1[keep]], cols[r2[keep]])
    keys = np.unique(((j * d + jp) * d + k) * d + kp)
    keys, kp = np.divmod(keys, d)
    keys, k = np.divmod(keys, d)
    j, jp = np.divmod(keys, d)
    minors = alpha[j, k] * alpha[jp, kp] - alpha[j, kp] * alpha[jp, k]
    return float(np.sum(np.abs(minors) ** 2))


def entropy_of_entanglement(a):
    """Entropy of Alice's reduced state for the antisymmetric state built from ``a``."""
    return von_neumann_entropy(reduced_density(coefficient_matrix(as_amplitude(a))))


@dataclass
class SpectrumSummary:
    eigenvalues: np.ndarray
    entropy_bits: float
    power_sums: dict = field(default_factory=dict)
    sym_functions: dict = field(default_factory=dict)
    concurrence: float = 0.0

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "entropy_bits": float(self.entropy_bits),
            "I2": float(self.power_sums[2]),
            "s2": float(self.sym_functions[2]),
            "concurrence": float(self.concurrence),
        }


def summarize(rho, ks=(2, 3)):
    """Spectrum, entropy, power sums and elementary symmetric functions of ``rho``."""
    rho = check_density(rho)
    lam = eigenvalues(rho)
    ks = sorted(set(ks) | {1, 2})
    ks = [k for k in ks if k <= rho.shape[0]]
    sums = {k: power_sum(rho, k) for k in ks}
    syms = {k: elementary_symmetric(rho, k) for k in ks}
    return SpectrumSummary(
        eigenvalues=lam,
        entropy_bits=entropy_from_eigenvalues(lam),
        power_sums=sums,
        sym_functions=syms,
        concurrence=float(np.sqrt(max(syms[2], 0.0))),
    )
