"""Rosenbrock system matrices S(z) = [[A - z I, B], [C, P(z)]].

The polynomial block is P(z) = sum_j z^j A_j of degree d with n x n
coefficients.  A scalar lambda is an eigenvalue of S(z) when S(lambda) is
singular.  This module owns the system data model, its evaluation, the
eigenvalue test, the unstructured backward error, and the JSON exchange
format shared with the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ABS_FLOOR, InputError, as_matrix

# Relative sigma_min threshold deciding "lambda is an eigenvalue".
EIGENVALUE_TOL = 1e-10


@dataclass
class RosenbrockSystem:
    """System data (A, B, C, A_0..A_d) with dimensions (r, n, d)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    poly_coeffs: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.a = as_matrix(self.a, "A")
        r = self.a.shape[0]
        if self.a.shape != (r, r):
            raise InputError(f"A must be square, got {self.a.shape}")
        self.b = as_matrix(self.b, "B")
        if self.b.shape[0] != r:
            raise InputError(f"B must have {r} rows, got {self.b.shape}")
        n = self.b.shape[1]
        self.c = as_matrix(self.c, "C")
        if self.c.shape != (n, r):
            raise InputError(f"C must be {n}x{r}, got {self.c.shape}")
        if not self.poly_coeffs:
            raise InputError("poly_coeffs must contain at least A_0")
        coeffs = []
        for j, ak in enumerate(self.poly_coeffs):
            ak = as_matrix(ak, f"P[{j}]")
            if ak.shape != (n, n):
                raise InputError(f"P[{j}] must be {n}x{n}, got {ak.shape}")
            coeffs.append(ak)
        self.poly_coeffs = tuple(coeffs)

    @property
    def r(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.b.shape[1]

    @property
    def d(self) -> int:
        return len(self.poly_coeffs) - 1

    def poly_eval(self, lam: complex) -> np.ndarray:
        """Horner evaluation of P(lambda)."""
        acc = np.zeros_like(self.poly_coeffs[0])
        for ak in reversed(self.poly_coeffs):
            acc = acc * lam + ak
        return acc


def evaluate(sys: RosenbrockSystem, lam: complex) -> np.ndarray:
    """Assemble the (r+n) x (r+n) matrix S(lambda)."""
    lam = complex(lam)
    if not np.isfinite(lam.real) or not np.isfinite(lam.imag):
        raise InputError("lambda must be finite")
    return np.block(
        [[sys.a - lam * np.eye(sys.r), sys.b], [sys.c, sys.poly_eval(lam)]]
    )


def is_eigenvalue(sys: RosenbrockSystem, lam: complex, tol: float = EIGENVALUE_TOL) -> bool:
    """True when sigma_min(S(lambda)) <= tol * |S(lambda)|."""
    s = np.linalg.svd(evaluate(sys, lam), compute_uv=False)
    return bool(s[-1] <= tol * max(s[0], ABS_FLOOR))


def unstructured_backward_error(sys: RosenbrockSystem, lam: complex) -> float:
    """Backward error ignoring the zero/identity block structure.

    Equals sigma_min(S(lambda)) / (1 + |lambda| + ... + |lambda|^deg).
    Viewed as a matrix polynomial, S(z) always carries a degree-1
    coefficient (the -I_r block), so deg = max(1, d).
    """
    lam = complex(lam)
    s_min = float(np.linalg.svd(evaluate(sys, lam), compute_uv=False)[-1])
    deg = max(1, sys.d)
    denom = sum(abs(lam) ** j for j in range(deg + 1))
    return s_min / denom


# ---------------------------------------------------------------------------
# JSON exchange format.
#
# A matrix is an array of rows; each entry is [re, im] (a bare number is
# accepted and read as purely real).  A system is an object with integer
# fields "r", "n", "d" and matrix fields "A", "B", "C", "P" where P is the
# array of d+1 polynomial coefficients.
# ---------------------------------------------------------------------------


def _entry_from_json(entry, path: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if (
        isinstance(entry, (list, tuple))
        and len(entry) == 2
        and all(isinstance(v, (int, float)) for v in entry)
    ):
        return complex(entry[0], entry[1])
    raise InputError(f"{path}: expected [re, im] or a number, got {entry!r}")


def matrix_from_json(obj, path: str = "matrix", shape: tuple[int, int] | None = None) -> np.ndarray:
    """Parse a matrix, naming the offending path on any mismatch."""
    if not isinstance(obj, list) or not obj:
        raise InputError(f"{path}: expected a nonempty array of rows")
    rows = []
    width = None
    for i, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise InputError(f"{path}[{i}]: expected a nonempty array of entries")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(
                f"{path}[{i}]: row has {len(row)} entries, expected {width}"
            )
        rows.append([_entry_from_json(e, f"{path}[{i}][{j}]") for j, e in enumerate(row)])
    m = np.array(rows, dtype=complex)
    if shape is not None and m.shape != shape:
        raise InputError(f"{path}: expected shape {shape[0]}x{shape[1]}, got {m.shape[0]}x{m.shape[1]}")
    return as_matrix(m, path)


def matrix_to_json(m) -> list:
    a = as_matrix(m)
    return [[[float(e.real), float(e.imag)] for e in row] for row in a]


def system_from_json(obj) -> RosenbrockSystem:
    """Parse the system JSON object, validating all dimension fields."""
    if not isinstance(obj, dict):
        raise InputError("system: expected a JSON object")
    for key in ("r", "n", "d", "A", "B", "C", "P"):
        if key not in obj:
            raise InputError(f"system: missing field {key!r}")
    r, n, d = obj["r"], obj["n"], obj["d"]
    for name, val in (("r", r), ("n", n), ("d", d)):
        if not isinstance(val, int) or val < 0 or (name != "d" and val < 1):
            raise InputError(f"system.{name}: expected a positive integer, got {val!r}")
    a = matrix_from_json(obj["A"], "system.A", (r, r))
    b = matrix_from_json(obj["B"], "system.B", (r, n))
    c = matrix_from_json(obj["C"], "system.C", (n, r))
    if not isinstance(obj["P"], list) or len(obj["P"]) != d + 1:
        raise InputError(
            f"system.P: expected an array of {d + 1} matrices"
            + (f", got {len(obj['P'])}" if isinstance(obj["P"], list) else "")
        )
    coeffs = tuple(
        matrix_from_json(pk, f"system.P[{j}]", (n, n)) for j, pk in enumerate(obj["P"])
    )
    return RosenbrockSystem(a, b, c, coeffs)


def system_to_json(sys: RosenbrockSystem) -> dict:
    return {
        "r": sys.r,
        "n": sys.n,
        "d": sys.d,
        "A": matrix_to_json(sys.a),
        "B": matrix_to_json(sys.b),
        "C": matrix_to_json(sys.c),
        "P": [matrix_to_json(ak) for ak in sys.poly_coeffs],
    }
