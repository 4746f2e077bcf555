"""Antisymmetric qutrit states of n copies and their coefficient matrices.

A pure state of the n-fold antisymmetric subspace is parameterized by a unit
amplitude tensor ``a`` with ``3**n`` entries.  Its bipartite coefficient matrix
is obtained by contracting every slot of ``a`` with the Levi-Civita symbol::

    alpha[J, K] = 2**(-n/2) * sum_I a[I] * prod_m eps(i_m, j_m, k_m)

Rows ``J`` are Alice's multi-indices, columns ``K`` are Bob's, both in
lexicographic base-3 order with the first slot most significant.
"""

import json
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from ._validation import (
    NORM_TOL,
    ValidationError,
    check_complex_vector,
    check_positive_int,
    check_unit_norm,
)

__all__ = [
    "AmplitudeTensor",
    "levi_civita",
    "encode_multi_index",
    "decode_multi_index",
    "coefficient_matrix",
    "product_amplitude",
    "random_amplitude_tensor",
    "state_vector",
    "antisymmetric_isometry",
    "antisymmetric_projector",
    "subspace_residual",
    "swap_copy",
    "read_state",
    "write_state",
    "state_to_dict",
    "state_from_dict",
]

STATE_FILE_NORM_TOL = 1e-9


def _build_epsilon():
    eps = np.zeros((3, 3, 3), dtype=np.int8)
    for perm in permutations(range(3)):
        # parity from the number of inversions
        inv = sum(1 for x in range(3) for y in range(x + 1, 3) if perm[x] > perm[y])
        eps[perm] = -1 if inv % 2 else 1
    return eps


EPSILON = _build_epsilon()
EPSILON.setflags(write=False)


def levi_civita(i, j, k):
    """Levi-Civita symbol on 0-based indices, ``eps(0, 1, 2) == +1``."""
    for name, v in (("i", i), ("j", j), ("k", k)):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise TypeError(f"index {name} must be an integer")
        if not 0 <= v <= 2:
            raise ValueError(f"index {name} must lie in {{0, 1, 2}}, got {v}")
    return int(EPSILON[i, j, k])


def encode_multi_index(digits):
    """Map base-3 digits (first digit most significant) to a flat index."""
    flat = 0
    for d in digits:
        d = int(d)
        if not 0 <= d <= 2:
            raise ValueError(f"digit out of range {{0, 1, 2}}: {d}")
        flat = 3 * flat + d
    return flat


def decode_multi_index(flat, n):
    """Inverse of :func:`encode_multi_index` for ``n`` digits."""
    n = check_positive_int(n, "n")
    flat = int(flat)
    if not 0 <= flat < 3**n:
        raise ValueError(f"flat index {flat} out of range [0, {3**n})")
    digits = [0] * n
    for m in range(n - 1, -1, -1):
        flat, digits[m] = divmod(flat, 3)
    return tuple(digits)


def _copy_count(length):
    n, size = 0, 1
    while size < length:
        size *= 3
        n += 1
    if size != length or n == 0:
        raise ValidationError(f"amplitude length {length} is not a positive power of 3")
    return n


@dataclass(frozen=True, eq=False)
class AmplitudeTensor:
    """Unit-norm complex tensor with ``3**n`` entries in lexicographic order."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        n = check_positive_int(self.n, "n")
        entries = check_complex_vector(self.entries, "entries", length=3**n)
        check_unit_norm(entries, "amplitude tensor", NORM_TOL)
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=np.complex128).ravel()
        return cls(_copy_count(x.shape[0]), x)

    @classmethod
    def basis(cls, n, index):
        """Basis tensor ``e_I``; ``index`` is a flat index or a digit tuple."""
        x = np.zeros(3**n, dtype=np.complex128)
        if np.isscalar(index):
            flat = int(index)
        elif len(index) == n:
            flat = encode_multi_index(index)
        else:
            raise ValueError(f"expected {n} digits, got {len(index)}")
        x[flat] = 1.0
        return cls(n, x)

    def as_tensor(self):
        return self.entries.reshape((3,) * self.n)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, AmplitudeTensor):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.entries, other.entries)

    __hash__ = None


def as_amplitude(a):
    if isinstance(a, AmplitudeTensor):
        return a
    return AmplitudeTensor.from_array(a)


def coefficient_matrix(a):
    """Return the ``3**n x 3**n`` coefficient matrix of the state built from ``a``."""
    a = as_amplitude(a)
    n = a.n
    t = a.as_tensor()
    eps = EPSILON.astype(np.float64)
    # each pass replaces the leading i-slot with a trailing (j, k) pair
    for _ in range(n):
        t = np.tensordot(t, eps, axes=([0], [0]))
    # axes are now (j1, k1, j2, k2, ...); bring Alice's slots first
    order = [2 * m for m in range(n)] + [2 * m + 1 for m in range(n)]
    t = np.transpose(t, order)
    return t.reshape(3**n, 3**n) * 2.0 ** (-n / 2)


def product_amplitude(a, b):
    """Tensor product of amplitude tensors; slots of ``a`` come first."""
    a, b = as_amplitude(a), as_amplitude(b)
    x = np.kron(a.entries, b.entries)
    x /= np.linalg.norm(x)
    return AmplitudeTensor(a.n + b.n, x)


def random_amplitude_tensor(n, seed=None):
    """Haar-random amplitude tensor drawn from a seeded generator.

    ``seed`` may be anything accepted by :func:`numpy.random.default_rng`,
    including an existing ``Generator``.
    """
    n = check_positive_int(n, "n")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(3**n) + 1j * rng.standard_normal(3**n)
    return AmplitudeTensor(n, z / np.linalg.norm(z))


def state_vector(a):
    """Bipartite state vector of length ``9**n``, Alice block-major."""
    return coefficient_matrix(a).reshape(-1)


def antisymmetric_isometry(n):
    """Isometry ``W`` of shape ``(9**n, 3**n)`` whose columns span the subspace.

    Column ``I`` is the state vector of the basis amplitude ``e_I``; the map
    ``a -> W a`` is exactly :func:`state_vector`.
    """
    n = check_positive_int(n, "n")
    d = 3**n
    w = np.empty((d * d, d), dtype=np.complex128)
    for idx in range(d):
        e = np.zeros(d, dtype=np.complex128)
        e[idx] = 1.0
        w[:, idx] = state_vector(AmplitudeTensor(n, e))
    return w


def antisymmetric_projector(n):
    w = antisymmetric_isometry(n)
    return w @ w.conj().T


def subspace_residual(psi, n):
    """Norm of the component of ``psi`` orthogonal to the n-copy subspace."""
    w = antisymmetric_isometry(n)
    psi = np.asarray(psi, dtype=np.complex128)
    return float(np.linalg.norm(psi - w @ (w.conj().T @ psi)))


def swap_copy(psi, n, m):
    """Exchange Alice's and Bob's qutrit in copy ``m`` (0-based)."""
    t = np.asarray(psi, dtype=np.complex128).reshape((3,) * (2 * n))
    return np.swapaxes(t, m, n + m).reshape(-1)


def state_to_dict(a):
    a = as_amplitude(a)
    return {"n": a.n, "amplitudes": [[float(z.real), float(z.imag)] for z in a.entries]}


def state_from_dict(data):
    try:
        n = data["n"]
        pairs = np.asarray(data["amplitudes"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed state record: {exc}") from exc
    n = check_positive_int(n, "n")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValidationError("amplitudes must be a list of [re, im] pairs")
    if pairs.shape[0] != 3**n:
        raise ValidationError(f"expected {3**n} amplitudes for n={n}, got {pairs.shape[0]}")
    x = pairs[:, 0] + 1j * pairs[:, 1]
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > STATE_FILE_NORM_TOL:
        raise ValidationError(f"amplitude norm deviates from 1 by {abs(norm - 1.0):.3e}")
    # renormalize so the in-memory tolerance holds for files written at lower precision
    return AmplitudeTensor(n, x / norm)


def write_state(a, path):
    with open(path, "w") as fh:
        json.dump(state_to_dict(a), fh)
        fh.write("\n")


def read_state(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_dict(data)
