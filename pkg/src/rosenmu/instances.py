"""Ready-made demo instances used by the test suite and example scripts."""

from __future__ import annotations

import numpy as np

from .rosenbrock import RosenbrockSystem


def golden_two_block_matrix() -> np.ndarray:
    """5x5 matrix with a known two-block mu-value near 3.081980.

    Blocks (2,3) and (3,2); the diagonal-scaling upper bound is exact here
    and beats the classical square-block bound 3.097070.
    """
    i = 1j
    return np.array(
        [
            [i, 0.5 - 0.5 * i, 1, 1, 0.5],
            [0.5, -0.5, i, i, 0.5 - 0.5 * i],
            [i, 1 - 0.5 * i, 1, 0.5, 0],
            [-0.5, 0.5 + i, -0.5 + 0.5 * i, 1 + 0.5 * i, 0.5 - 0.5 * i],
            [0.5 + i, 0.5 + 0.5 * i, 0, -0.5 - 0.5 * i, 0.5 - 0.5 * i],
        ],
        dtype=complex,
    )


def fluid_solid_instance(seed: int = 20240901) -> RosenbrockSystem:
    """Rosenbrock realization of a fluid-solid vibration eigenproblem.

    The rational problem (M - z K + sum_i z/(z - alpha_i) E_i) x = 0 with
    poles alpha_i > 0, symmetric positive definite M, K and rank-one
    E_i = C_i C_i^T realizes as S(z) with A = diag(alpha_i), B = Ctilde^T,
    C = Ctilde A, A_0 = M - Ctilde Ctilde^T, A_1 = -K, where
    Ctilde = [C_1 ... C_k].  Shapes: r = 3 poles, n = 5, degree 1.
    """
    rng = np.random.default_rng(seed)
    n, r = 5, 3
    g_m = rng.standard_normal((n, n))
    mass = g_m @ g_m.T + n * np.eye(n)
    g_k = rng.standard_normal((n, n))
    stiff = g_k @ g_k.T + n * np.eye(n)
    poles = np.sort(rng.uniform(0.5, 3.0, r))
    c_tilde = rng.standard_normal((n, r))
    a = np.diag(poles).astype(complex)
    b = c_tilde.T.astype(complex)
    c = (c_tilde @ np.diag(poles)).astype(complex)
    a0 = (mass - c_tilde @ c_tilde.T).astype(complex)
    a1 = (-stiff).astype(complex)
    return RosenbrockSystem(a, b, c, (a0, a1))
