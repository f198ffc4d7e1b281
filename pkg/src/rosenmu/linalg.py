"""Dense complex linear-algebra kernels shared by the whole package.

Thin, contract-enforcing wrappers around LAPACK (via numpy): SVD with
multiplicity bookkeeping for the largest singular value, spectral radius
with a verified eigenpair, and linear solves with an explicit relative
singularity threshold.  All tolerances are relative to the spectral norm
with an absolute floor of ``ABS_FLOOR``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative tolerance for grouping singular values with the largest one.
MULT_TOL = 1e-8
# Absolute floor used when a matrix norm vanishes.
ABS_FLOOR = 1e-14
# Relative sigma_min threshold below which solves are refused.
SOLVE_SINGULAR_TOL = 1e-12


class InputError(ValueError):
    """Raised for malformed numeric input (wrong shape, NaN/Inf entries)."""


class NumericError(RuntimeError):
    """Raised when a dense factorization fails to converge."""


class SingularMatrixError(NumericError):
    """Raised on solves with a numerically singular coefficient matrix."""

    def __init__(self, msg: str, sigma_min: float):
        super().__init__(msg)
        self.sigma_min = sigma_min


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d complex array and reject empty or non-finite input."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InputError(f"{name} must be 2-dimensional, got ndim={a.ndim}")
    if a.size == 0:
        raise InputError(f"{name} must be nonempty, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise InputError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class SvdFactors:
    """Full SVD ``m = U diag(s) V*`` with columns of U, V orthonormal.

    ``multiplicity_of_max`` counts singular values within relative
    tolerance ``MULT_TOL`` of the largest.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    multiplicity_of_max: int


def svd(m) -> SvdFactors:
    """Singular value decomposition with max-multiplicity detection."""
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"SVD did not converge: {exc}") from exc
    mult = int(np.count_nonzero(s[0] - s <= MULT_TOL * s[0])) if s[0] > 0 else len(s)
    return SvdFactors(s, u[:, : len(s)], vh[: len(s)].conj().T, mult)


def sigma_max(m) -> float:
    """Largest singular value (spectral norm)."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def sigma_min(m) -> float:
    """Smallest singular value."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def spectral_radius(m) -> tuple[float, complex, np.ndarray]:
    """Spectral radius of a square matrix.

    Returns ``(rho, eigenvalue, eigenvector)`` where the eigenpair attains
    the radius, the eigenvector has unit norm and the residual satisfies
    ``|m v - lambda v| <= 1e-8 |m|``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InputError(f"spectral radius needs a square matrix, got {a.shape}")
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    idx = int(np.argmax(np.abs(w)))
    lam = complex(w[idx])
    vec = v[:, idx]
    vec = vec / np.linalg.norm(vec)
    nrm = sigma_max(a)
    resid = float(np.linalg.norm(a @ vec - lam * vec))
    if resid > 1e-8 * max(nrm, ABS_FLOOR):
        raise NumericError(
            f"eigenpair residual {resid:.3e} exceeds 1e-8*|m| = {1e-8 * nrm:.3e}"
        )
    return float(abs(lam)), lam, vec


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b``, refusing numerically singular systems."""
    am = as_matrix(a, "a")
    bm = as_matrix(b, "b")
    if am.shape[0] != am.shape[1]:
        raise InputError(f"solve needs a square matrix, got {am.shape}")
    s = np.linalg.svd(am, compute_uv=False)
    if s[-1] <= SOLVE_SINGULAR_TOL * max(s[0], ABS_FLOOR):
        raise SingularMatrixError(
            f"matrix is numerically singular (sigma_min={s[-1]:.3e}, "
            f"sigma_max={s[0]:.3e})",
            sigma_min=float(s[-1]),
        )
    return np.linalg.solve(am, bm)


def det_is_singular(a, tol: float = SOLVE_SINGULAR_TOL) -> bool:
    """True when ``sigma_min(a) <= tol * |a|`` (with absolute floor)."""
    am = as_matrix(a, "a")
    if am.shape[0] != am.shape[1]:
        raise InputError(f"singularity test needs a square matrix, got {am.shape}")
    s = np.linalg.svd(am, compute_uv=False)
    return bool(s[-1] <= tol * max(s[0], ABS_FLOOR))


def inverse(a) -> np.ndarray:
    """Matrix inverse via :func:`solve` against the identity."""
    am = as_matrix(a, "a")
    return solve(am, np.eye(am.shape[0], dtype=complex))
