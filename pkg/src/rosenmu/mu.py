"""Bracketing structured mu-values of rectangular matrices.

For M (k x p) and a block structure with rectangular blocks Delta_i of
shape p_i x k_i, the structured mu-value is the reciprocal of the smallest
max-block-norm Delta with det(I - Delta M) = 0 (zero when no such Delta
exists).  The engine computes

* an upper bound: minimize sigma_max(D1(x) M D2(-x)) over block scalings
  D1(x) = diag(e^{x_i} I_{k_i}), D2(x) = diag(e^{x_i} I_{p_i}), which is
  exact when the optimum has a simple largest singular value or when the
  structure has at most three blocks;
* a certified lower bound: sup over block-diagonal partial isometries P of
  the spectral radius rho(P M), searched by extracting P from the top
  singular subspace at the scaling optimum and refining with an
  alternating power-type iteration plus seeded random restarts.

Every evaluated P lies in the admissible class, so every reported lower
bound is mathematically valid regardless of optimizer success.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .linalg import InputError, as_matrix
from .reduction import BlockStructure

# Scaling exponents are confined to a safe dynamic range for doubles.
X_BOUND = 40.0
# Relative tolerance for grouping singular values with the largest.
MULT_TOL = 1e-8
# Acceptance threshold for the kernel-direction residual sum.
KERNEL_TOL = 1e-8
# Norm below which a vector block is treated as vanished.
TINY = 1e-14


@dataclass(frozen=True)
class MuOptions:
    """Effort knobs for the bracketing engine."""

    starts: int = 8
    max_iters: int = 200
    grad_tol: float = 1e-9
    seed: int = 0
    refine_rounds: int = 200


@dataclass
class PartialIsometrySet:
    """Block-diagonal candidate P with partially isometric blocks."""

    blocks: tuple[np.ndarray, ...]
    structure: BlockStructure

    def matrix(self) -> np.ndarray:
        return self.structure.assemble(self.blocks)

    def max_defect(self) -> float:
        """Largest deviation from the partial-isometry identity P P* P = P."""
        worst = 0.0
        for blk in self.blocks:
            worst = max(worst, float(np.linalg.norm(blk @ blk.conj().T @ blk - blk, 2)))
        return worst


@dataclass
class OptimizerTrace:
    starts: int = 0
    iterations: int = 0
    final_grad_norm: float | None = None
    multiplicity: int = 0
    kernel_residual: float | None = None
    refine_rounds: int = 0


@dataclass
class MuResult:
    lower: float
    upper: float
    certificate_p: PartialIsometrySet | None
    certificate_delta: tuple[np.ndarray, ...] | None
    delta_residual: float | None
    exactness: str  # exact_n_le_3 | exact_simple_sigma | bracket_only
    possibly_zero: bool
    x_star: np.ndarray
    trace: OptimizerTrace


def _check_shapes(m: np.ndarray, structure: BlockStructure) -> None:
    if m.shape != (structure.k_total, structure.p_total):
        raise InputError(
            f"M is {m.shape[0]}x{m.shape[1]} but structure totals are "
            f"k={structure.k_total}, p={structure.p_total}"
        )


def _weights(structure: BlockStructure, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    row = np.concatenate(
        [np.full(k, np.exp(xi)) for (_, k), xi in zip(structure.blocks, x)]
    )
    col = np.concatenate(
        [np.full(p, np.exp(-xi)) for (p, _), xi in zip(structure.blocks, x)]
    )
    return row, col


def scale_matrices(x, structure: BlockStructure) -> tuple[np.ndarray, np.ndarray]:
    """Dense scaling pair D1(x) (k x k) and D2(x) (p x p)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (structure.n_blocks,):
        raise InputError(f"x must have length {structure.n_blocks}, got {x.shape}")
    d1 = np.concatenate(
        [np.full(k, np.exp(xi)) for (_, k), xi in zip(structure.blocks, x)]
    )
    d2 = np.concatenate(
        [np.full(p, np.exp(xi)) for (p, _), xi in zip(structure.blocks, x)]
    )
    return np.diag(d1).astype(complex), np.diag(d2).astype(complex)


def _scaled(m: np.ndarray, structure: BlockStructure, x: np.ndarray) -> np.ndarray:
    row, col = _weights(structure, x)
    return m * row[:, None] * col[None, :]


def scaled_sigma(m, structure: BlockStructure, x) -> float:
    """sigma_max(D1(x) M D2(-x)), guarding the exponent range |x_i| <= 40."""
    a = as_matrix(m)
    _check_shapes(a, structure)
    x = np.asarray(x, dtype=float)
    if x.shape != (structure.n_blocks,):
        raise InputError(f"x must have length {structure.n_blocks}, got {x.shape}")
    if np.any(np.abs(x) > X_BOUND):
        raise InputError(f"scaling exponents must satisfy |x_i| <= {X_BOUND}")
    return float(np.linalg.svd(_scaled(a, structure, x), compute_uv=False)[0])


def _value_and_branch_grad(
    m: np.ndarray, structure: BlockStructure, x: np.ndarray
) -> tuple[float, np.ndarray, int]:
    """Objective value, gradient of the top singular branch, multiplicity.

    The branch gradient equals the analytic gradient wherever sigma_max is
    simple and is a valid one-sided slope elsewhere.
    """
    a = _scaled(m, structure, x)
    u_full, s, vh = np.linalg.svd(a)
    mult = int(np.count_nonzero(s[0] - s <= MULT_TOL * s[0])) if s[0] > 0 else len(s)
    u = u_full[:, 0]
    v = vh[0].conj()
    grad = np.empty(structure.n_blocks)
    for i, (sk, sp) in enumerate(zip(structure.k_slices(), structure.p_slices())):
        grad[i] = s[0] * (
            float(np.vdot(u[sk], u[sk]).real) - float(np.vdot(v[sp], v[sp]).real)
        )
    return float(s[0]), grad, mult


def scaled_sigma_gradient(m, structure: BlockStructure, x):
    """Analytic gradient of scaled_sigma, or None when sigma_max is repeated.

    Component i is sigma * (|u_i|^2 - |v_i|^2) with u, v the top left/right
    singular vectors of the scaled matrix, blocked by (k_i) and (p_i).
    """
    a = as_matrix(m)
    _check_shapes(a, structure)
    x = np.asarray(x, dtype=float)
    value, grad, mult = _value_and_branch_grad(a, structure, x)
    if value > 0 and mult > 1:
        return None
    return grad


@dataclass
class UpperBound:
    value: float
    x: np.ndarray
    multiplicity: int
    grad_norm: float | None
    iterations: int
    starts: int


def mu_upper(m, structure: BlockStructure, opts: MuOptions = MuOptions()) -> UpperBound:
    """Minimize the scaled largest singular value over block scalings.

    Multi-start quasi-Newton descent with the analytic branch gradient,
    followed by a simplex polish that handles the kinks where sigma_max is
    repeated.  The first scaling exponent is frozen at zero: shifting all
    exponents together never changes the objective.
    """
    a = as_matrix(m)
    _check_shapes(a, structure)
    nb = structure.n_blocks
    s0 = float(np.linalg.svd(a, compute_uv=False)[0])
    if s0 == 0.0:
        return UpperBound(0.0, np.zeros(nb), min(a.shape), None, 0, 0)
    a_n = a / s0

    if nb == 1:
        value, _, mult = _value_and_branch_grad(a_n, structure, np.zeros(1))
        return UpperBound(s0 * value, np.zeros(1), mult, 0.0, 0, 0)

    def full(xf: np.ndarray) -> np.ndarray:
        return np.clip(np.concatenate(([0.0], xf)), -X_BOUND, X_BOUND)

    def fg(xf: np.ndarray) -> tuple[float, np.ndarray]:
        value, grad, _ = _value_and_branch_grad(a_n, structure, full(xf))
        return value, grad[1:]

    rng = np.random.default_rng(opts.seed)
    starts = [np.zeros(nb - 1)]
    for _ in range(max(0, opts.starts - 1)):
        starts.append(rng.uniform(-2.0, 2.0, nb - 1))

    iterations = 0
    candidates = []
    for x0 in starts:
        res = minimize(
            fg,
            x0,
            jac=True,
            method="BFGS",
            options=dict(gtol=opts.grad_tol, maxiter=opts.max_iters),
        )
        iterations += int(res.nit)
        candidates.append((float(res.fun), res.x))
    candidates.sort(key=lambda c: c[0])

    best_val, best_x = candidates[0]
    # Simplex polish reaches into the nonsmooth valley the quasi-Newton
    # steps stop short of; a restart tightens the final digits.
    for _ in range(2):
        res = minimize(
            lambda xf: fg(xf)[0],
            best_x,
            method="Nelder-Mead",
            options=dict(
                xatol=1e-12, fatol=1e-14, maxiter=400 * max(1, nb - 1), maxfev=10**6
            ),
        )
        iterations += int(res.nit)
        if float(res.fun) <= best_val:
            best_val, best_x = float(res.fun), res.x

    x_star = full(best_x)
    value, grad, mult = _value_and_branch_grad(a_n, structure, x_star)
    grad_norm = float(np.linalg.norm(grad[1:])) if mult == 1 else None
    return UpperBound(s0 * value, x_star, mult, grad_norm, iterations, len(starts))


# ---------------------------------------------------------------------------
# Lower bound machinery.
# ---------------------------------------------------------------------------


def _top_subspace_forms(
    m_scaled: np.ndarray, structure: BlockStructure, cluster_tol: float
):
    """Blocks (alpha_i, beta_i) of the top singular subspace and the
    normalized Hermitian forms H_i = alpha_i* alpha_i - beta_i* beta_i."""
    u, s, vh = np.linalg.svd(m_scaled)
    if s[0] == 0.0:
        return None
    r = int(np.count_nonzero(s[0] - s <= cluster_tol * s[0]))
    u1 = u[:, :r]
    v1 = vh[:r].conj().T
    alphas = [u1[sk] for sk in structure.k_slices()]
    betas = [v1[sp] for sp in structure.p_slices()]
    forms = [a.conj().T @ a - b.conj().T @ b for a, b in zip(alphas, betas)]
    return alphas, betas, forms, r


def _kernel_direction(forms, rng, n_starts: int = 16) -> tuple[np.ndarray, float]:
    """Unit v (nearly) annihilating every quadratic form v* H_i v.

    Minimizes sum_i |v* H_i v|^2 over the unit sphere by unconstrained
    descent on the scale-invariant quotient; returns the best v found and
    the attained residual sum.
    """
    r = forms[0].shape[0]
    if r == 1:
        v = np.ones(1, dtype=complex)
        return v, float(sum(abs(h[0, 0]) ** 2 for h in forms))

    def fg(w: np.ndarray) -> tuple[float, np.ndarray]:
        v = w[:r] + 1j * w[r:]
        q = float(np.vdot(v, v).real)
        if q < TINY:
            return 1.0, np.zeros_like(w)
        val = 0.0
        gc = np.zeros(r, dtype=complex)
        for h in forms:
            hv = h @ v
            c = float(np.vdot(v, hv).real)
            val += (c / q) ** 2
            gc += 2.0 * c / q**2 * (hv - (c / q) * v)
        return val, np.concatenate([2.0 * gc.real, 2.0 * gc.imag])

    best_v, best_val = None, np.inf
    for t in range(n_starts):
        w0 = np.zeros(2 * r)
        if t < r:
            w0[t] = 1.0  # canonical starts first, then random ones
        else:
            w0 = rng.standard_normal(2 * r)
        res = minimize(fg, w0, jac=True, method="BFGS", options=dict(gtol=1e-14, maxiter=300))
        if float(res.fun) < best_val:
            best_val, best_v = float(res.fun), res.x
    v = best_v[:r] + 1j * best_v[r:]
    v /= np.linalg.norm(v)
    return v, best_val


def _isometries_from_direction(alphas, betas, v, structure: BlockStructure):
    """Rank-one blocks mapping alpha_i v to beta_i v, zero where either dies."""
    blocks = []
    for (p, k), a, b in zip(structure.blocks, alphas, betas):
        av = a @ v
        bv = b @ v
        na, nb_ = np.linalg.norm(av), np.linalg.norm(bv)
        if na < TINY or nb_ < TINY:
            blocks.append(np.zeros((p, k), dtype=complex))
        else:
            # Normalized by both factors so each block is exactly partially
            # isometric even when |alpha_i v| and |beta_i v| differ slightly.
            blocks.append(np.outer(bv, av.conj()) / (na * nb_))
    return blocks


def _rho(p_dense: np.ndarray, m: np.ndarray) -> tuple[float, complex]:
    ev = np.linalg.eigvals(p_dense @ m)
    idx = int(np.argmax(np.abs(ev)))
    return float(abs(ev[idx])), complex(ev[idx])


def _phase_align(blocks, m: np.ndarray, structure: BlockStructure):
    """Rotate P so its best product eigenvalue sits on the positive real axis."""
    rho, lam = _rho(structure.assemble(blocks), m)
    if rho <= TINY:
        return blocks
    phase = lam / abs(lam)
    return [blk / phase for blk in blocks]


def extract_certificate(
    m,
    structure: BlockStructure,
    x_star,
    cluster_tol: float = MULT_TOL,
    accept_tol: float = KERNEL_TOL,
    seed: int = 0,
):
    """Partial-isometry certificate from the scaling optimum, if one exists.

    Builds the Hermitian forms of the top singular subspace at x_star,
    searches the joint numerical range for a kernel direction, and maps it
    to rank-one partially isometric blocks.  Returns None (joint-range
    obstruction) when the residual stays above accept_tol.
    """
    a = as_matrix(m)
    _check_shapes(a, structure)
    s0 = float(np.linalg.svd(a, compute_uv=False)[0])
    if s0 == 0.0:
        return None
    x_star = np.asarray(x_star, dtype=float)
    parts = _top_subspace_forms(_scaled(a / s0, structure, x_star), structure, cluster_tol)
    alphas, betas, forms, _ = parts
    v, resid = _kernel_direction(forms, np.random.default_rng(seed))
    if resid > accept_tol:
        return None
    blocks = _isometries_from_direction(alphas, betas, v, structure)
    blocks = _phase_align(blocks, a / s0, structure)
    return PartialIsometrySet(tuple(blocks), structure)


def _alternating_refine(
    blocks, m: np.ndarray, structure: BlockStructure, rounds: int, target: float | None
):
    """Power-type alternating ascent of rho(P M), keeping the running best.

    Each step re-aims every block at the current dominant eigenvector:
    with unit right eigenvector w of P M and z = M w, the block update
    w_i z_i* / (|w_i| |z_i|) maximizes |w* P z| over admissible P.  There
    is no monotonicity guarantee, so every iterate is evaluated and only
    improvements are kept.
    """
    p_slices = structure.p_slices()
    k_slices = structure.k_slices()
    best_rho, best_lam = _rho(structure.assemble(blocks), m)
    best_blocks = [blk.copy() for blk in blocks]
    cur = blocks
    stall = 0
    used = 0
    for _ in range(rounds):
        used += 1
        ev, vecs = np.linalg.eig(structure.assemble(cur) @ m)
        idx = int(np.argmax(np.abs(ev)))
        w = vecs[:, idx]
        w /= np.linalg.norm(w)
        z = m @ w
        nxt = []
        for (p, k), sp, sk in zip(structure.blocks, p_slices, k_slices):
            wi, zi = w[sp], z[sk]
            nw, nz = np.linalg.norm(wi), np.linalg.norm(zi)
            if nw < TINY or nz < TINY:
                nxt.append(np.zeros((p, k), dtype=complex))
            else:
                nxt.append(np.outer(wi, zi.conj()) / (nw * nz))
        rho, lam = _rho(structure.assemble(nxt), m)
        if rho > best_rho * (1 + 1e-14):
            best_rho, best_lam, best_blocks = rho, lam, [b.copy() for b in nxt]
            stall = 0
        else:
            stall += 1
        cur = nxt
        if stall >= 25:
            break
        if target is not None and best_rho >= target * (1 - 1e-13):
            break
    return best_rho, best_blocks, used


def _random_isometry(structure: BlockStructure, rng) -> list[np.ndarray]:
    blocks = []
    for p, k in structure.blocks:
        g = rng.standard_normal((p, k)) + 1j * rng.standard_normal((p, k))
        u, _, vh = np.linalg.svd(g, full_matrices=False)
        blocks.append(u @ vh)
    return blocks


def _snap_partial_isometry(blk: np.ndarray) -> np.ndarray:
    """Project a block onto the partial isometries (singular values to 0/1).

    Leaves genuine partial isometries unchanged up to roundoff, so seeded
    candidates keep their spectral-radius value while guaranteed valid.
    """
    u, s, vh = np.linalg.svd(blk, full_matrices=False)
    keep = s >= 0.5
    if not np.any(keep):
        return np.zeros_like(blk)
    return u[:, keep] @ vh[keep]


@dataclass
class LowerBound:
    value: float
    certificate: PartialIsometrySet | None
    kernel_residual: float | None
    refine_rounds: int


def mu_lower(
    m,
    structure: BlockStructure,
    opts: MuOptions = MuOptions(),
    x_star=None,
    target: float | None = None,
    seed_isometries=(),
) -> LowerBound:
    """Best certified lower bound sup rho(P M) over the searched P.

    Candidates come from (a) kernel directions of the top singular
    subspace at the scaling optimum x_star, swept over a widening cluster
    tolerance, (b) caller-provided seed isometries, (c) seeded random
    restarts; every candidate is refined by the alternating iteration.
    """
    a = as_matrix(m)
    _check_shapes(a, structure)
    s0 = float(np.linalg.svd(a, compute_uv=False)[0])
    if s0 == 0.0:
        return LowerBound(0.0, None, None, 0)
    a_n = a / s0
    target_n = None if target is None else target / s0
    rng = np.random.default_rng(opts.seed + 1)

    candidates: list[list[np.ndarray]] = []
    kernel_residual = None
    if x_star is not None:
        x_star = np.asarray(x_star, dtype=float)
        scaled = _scaled(a_n, structure, x_star)
        for tol in (MULT_TOL, 1e-6, 1e-4, 1e-2):
            parts = _top_subspace_forms(scaled, structure, tol)
            if parts is None:
                break
            alphas, betas, forms, rank = parts
            v, resid = _kernel_direction(forms, rng)
            if tol == MULT_TOL:
                kernel_residual = resid
            candidates.append(_isometries_from_direction(alphas, betas, v, structure))
            if rank == min(a.shape):
                break
    for seed_p in seed_isometries:
        candidates.append([_snap_partial_isometry(np.asarray(blk, dtype=complex)) for blk in seed_p])
    for _ in range(opts.starts):
        candidates.append(_random_isometry(structure, rng))

    best_rho, best_blocks = 0.0, None
    rounds_used = 0
    for cand in candidates:
        rho0, _ = _rho(structure.assemble(cand), a_n)
        rho, blocks, used = _alternating_refine(
            cand, a_n, structure, opts.refine_rounds, target_n
        )
        rounds_used += used
        if max(rho, rho0) > best_rho:
            best_rho, best_blocks = (
                (rho, blocks) if rho >= rho0 else (rho0, cand)
            )
        if target_n is not None and best_rho >= target_n * (1 - 1e-13):
            break

    if best_blocks is None or best_rho <= 0.0:
        return LowerBound(0.0, None, kernel_residual, rounds_used)
    best_blocks = _phase_align(best_blocks, a_n, structure)
    cert = PartialIsometrySet(tuple(best_blocks), structure)
    return LowerBound(s0 * best_rho, cert, kernel_residual, rounds_used)


class NoCertificateError(RuntimeError):
    """Raised when a perturbation certificate is requested but rho(P M) = 0."""


def certificate_to_delta(
    pset: PartialIsometrySet, m
) -> tuple[tuple[np.ndarray, ...], float]:
    """Minimal structured perturbation from a partial-isometry certificate.

    With lambda_e the dominant eigenvalue of P M, Delta = P / lambda_e has
    max block norm 1 / rho(P M) and makes I - Delta M singular.  Returns
    the blocks and the residual sigma_min(I - Delta M).
    """
    a = as_matrix(m)
    rho, lam = _rho(pset.matrix(), a)
    if rho <= TINY:
        raise NoCertificateError("rho(P M) vanishes; no finite perturbation exists")
    blocks = tuple(blk / lam for blk in pset.blocks)
    delta = pset.structure.assemble(blocks)
    resid = float(
        np.linalg.svd(np.eye(delta.shape[0]) - delta @ a, compute_uv=False)[-1]
    )
    return blocks, resid


def mu_bracket(m, structure: BlockStructure, opts: MuOptions = MuOptions(), seed_isometries=()) -> MuResult:
    """Full bracket [lower, upper] with certificates and exactness record."""
    a = as_matrix(m)
    _check_shapes(a, structure)
    upper = mu_upper(a, structure, opts)
    lower = mu_lower(
        a,
        structure,
        opts,
        x_star=upper.x,
        target=upper.value,
        seed_isometries=seed_isometries,
    )

    nb = structure.n_blocks
    scale = float(np.linalg.svd(a, compute_uv=False)[0])
    if nb <= 3:
        exactness = "exact_n_le_3"
    elif (
        upper.multiplicity == 1
        and upper.grad_norm is not None
        and upper.grad_norm <= 1e-6
    ):
        exactness = "exact_simple_sigma"
    else:
        exactness = "bracket_only"
    possibly_zero = lower.value <= 1e-12 and upper.value <= 1e-12 * max(1.0, scale)

    cert_delta = None
    resid = None
    if lower.certificate is not None and lower.value > TINY:
        cert_delta, resid = certificate_to_delta(lower.certificate, a)

    trace = OptimizerTrace(
        starts=upper.starts,
        iterations=upper.iterations,
        final_grad_norm=upper.grad_norm,
        multiplicity=upper.multiplicity,
        kernel_residual=lower.kernel_residual,
        refine_rounds=lower.refine_rounds,
    )
    return MuResult(
        lower=lower.value,
        upper=upper.value,
        certificate_p=lower.certificate,
        certificate_delta=cert_delta,
        delta_residual=resid,
        exactness=exactness,
        possibly_zero=possibly_zero,
        x_star=upper.x,
        trace=trace,
    )
