"""Input validation helpers shared by the numerical modules and estimators."""

import numbers

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


class ValidationError(ValueError):
    """Raised when an array violates the contract of a domain type."""


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_complex_vector(x, name="x", length=None):
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise ValidationError(f"{name} must have length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def check_unit_norm(x, name="x", tol=NORM_TOL):
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"{name} must have unit norm, got {norm!r}")
    return x


def check_square(m, name="matrix"):
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def check_hermitian(m, name="matrix", tol=HERMITIAN_TOL):
    arr = check_square(m, name)
    dev = np.max(np.abs(arr - arr.conj().T)) if arr.size else 0.0
    if dev > tol:
        raise ValidationError(f"{name} is not Hermitian (max deviation {dev:.3e})")
    return arr


def check_density(rho, name="rho", herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                  psd_tol=PSD_TOL):
    """Validate a density matrix and return it as a complex Hermitian array.

    The input is symmetrized after the Hermiticity check so that downstream
    eigensolvers see an exactly Hermitian matrix.
    """
    arr = check_hermitian(rho, name, herm_tol)
    tr = np.trace(arr).real
    if abs(tr - 1.0) > trace_tol:
        raise ValidationError(f"{name} must have unit trace, got {tr!r}")
    arr = 0.5 * (arr + arr.conj().T)
    lam_min = np.linalg.eigvalsh(arr)[0]
    if lam_min < -psd_tol:
        raise ValidationError(f"{name} is not positive semidefinite (min eigenvalue {lam_min:.3e})")
    return arr


def check_isometry(u, name="U", tol=1e-10):
    arr = np.asarray(u, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < arr.shape[1]:
        raise ValidationError(f"{name} must be a tall m x r matrix, got shape {arr.shape}")
    dev = np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[1])))
    if dev > tol:
        raise ValidationError(f"{name} does not have orthonormal columns (deviation {dev:.3e})")
    return arr
