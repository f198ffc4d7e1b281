"""Structured eigenvalue backward errors of Rosenbrock system matrices.

Top-level pipeline: short-circuit exact eigenvalues to zero, reduce the
(system, lambda, scenario) instance, solve it exactly or bracket the
mu-value, and invert the bracket into backward-error bounds.  The mu lower
bound is the certified side: its partial-isometry certificate converts to
an explicit structured perturbation whose max block norm realizes the
backward-error upper bound, checkable by a sigma_min residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ABS_FLOOR, inverse, sigma_max, sigma_min
from .mu import MuOptions, MuResult, mu_bracket
from .reduction import (
    ExactFormula,
    ReducedProblem,
    Scenario,
    WITNESS_ZERO_TOL,
    all_scenarios,
    assemble_perturbation,
    perturbation_norm,
    reduce,
)
from .rosenbrock import RosenbrockSystem, evaluate, is_eigenvalue

# mu lower bounds at or below this level cannot certify a finite error.
MU_ZERO_TOL = 1e-12


@dataclass
class BackwardErrorResult:
    """Bracket [eta_lower, eta_upper] plus the realizing perturbation.

    The upper estimate is the certified side: when ``certificate`` is
    present, ``certificate_norm`` equals ``eta_upper`` and
    sigma_min(S(lambda) - certificate) equals ``residual``.  The lower
    estimate comes from the scaling upper bound on mu and carries no
    certificate.
    """

    scenario: Scenario
    lam: complex
    eta_lower: float
    eta_upper: float
    exactness: str
    possibly_infinite: bool
    delta_blocks: dict[str, np.ndarray] | None
    certificate: np.ndarray | None
    certificate_norm: float | None
    residual: float | None
    mu: MuResult | None
    infinite_witness: np.ndarray | None = None

    @property
    def is_exact(self) -> bool:
        return self.exactness in (
            "exact_eigenvalue",
            "exact_formula",
            "exact_n_le_3",
            "exact_simple_sigma",
        )


def _eigenvalue_result(sys: RosenbrockSystem, lam: complex, scenario: Scenario):
    s_mat = evaluate(sys, lam)
    return BackwardErrorResult(
        scenario=scenario,
        lam=lam,
        eta_lower=0.0,
        eta_upper=0.0,
        exactness="exact_eigenvalue",
        possibly_infinite=False,
        delta_blocks={},
        certificate=np.zeros_like(s_mat),
        certificate_norm=0.0,
        residual=sigma_min(s_mat),
        mu=None,
    )


def _rank_one_inverse_image(h: np.ndarray) -> np.ndarray:
    """Minimal-norm Delta with Delta (H w) = w for the top singular pair.

    With w the top right singular vector, Delta = w (H w)* / |H w|^2 has
    spectral norm 1/sigma_max(H) and puts an eigenvalue one into Delta H.
    """
    u, s, vh = np.linalg.svd(h)
    w = vh[0].conj()
    hw = h @ w
    return np.outer(w, hw.conj()) / float(np.vdot(hw, hw).real)


def _exact_result(
    sys: RosenbrockSystem,
    lam: complex,
    scenario: Scenario,
    h: np.ndarray,
    label: str,
    value: float,
):
    if not np.isfinite(value):
        return BackwardErrorResult(
            scenario=scenario,
            lam=lam,
            eta_lower=np.inf,
            eta_upper=np.inf,
            exactness="exact_formula",
            possibly_infinite=False,
            delta_blocks=None,
            certificate=None,
            certificate_norm=None,
            residual=None,
            mu=None,
            infinite_witness=h,
        )
    delta = _rank_one_inverse_image(h)
    blocks = {label: delta}
    delta_s = assemble_perturbation(sys.r, sys.n, lam, blocks)
    resid = sigma_min(evaluate(sys, lam) - delta_s)
    return BackwardErrorResult(
        scenario=scenario,
        lam=lam,
        eta_lower=value,
        eta_upper=value,
        exactness="exact_formula",
        possibly_infinite=False,
        delta_blocks=blocks,
        certificate=delta_s,
        certificate_norm=perturbation_norm([delta]),
        residual=resid,
        mu=None,
    )


def backward_error(
    sys: RosenbrockSystem,
    lam: complex,
    scenario: Scenario,
    opts: MuOptions = MuOptions(),
    seed_isometries=(),
) -> BackwardErrorResult:
    """Backward error of lambda for S(z) under one perturbation scenario."""
    lam = complex(lam)
    if is_eigenvalue(sys, lam):
        return _eigenvalue_result(sys, lam, scenario)

    problem = reduce(sys, lam, scenario)
    if isinstance(problem, ExactFormula):
        return _exact_result(
            sys, lam, scenario, problem.witness, problem.label, problem.value
        )

    if problem.structure.n_blocks == 1:
        # One perturbed block (P(z) of degree zero): mu degenerates to
        # sigma_max and the closed-form treatment applies with H = M.
        smax = sigma_max(problem.m)
        inv_norm = sigma_max(inverse(evaluate(sys, lam)))
        value = (
            np.inf
            if smax <= WITNESS_ZERO_TOL * max(inv_norm, ABS_FLOOR)
            else 1.0 / smax
        )
        return _exact_result(
            sys, lam, scenario, problem.m, problem.labels[0], value
        )

    mu = mu_bracket(problem.m, problem.structure, opts, seed_isometries=seed_isometries)
    eta_lower = 1.0 / mu.upper if mu.upper > 0 else np.inf
    possibly_infinite = mu.lower <= MU_ZERO_TOL
    if mu.lower > 0:
        # roundoff can cross the mu bounds by ~1e-15; keep the eta interval ordered
        eta_lower = min(eta_lower, 1.0 / mu.lower)
    if mu.certificate_delta is not None and mu.lower > 0:
        eta_upper = 1.0 / mu.lower
        blocks = {
            label: blk for label, blk in zip(problem.labels, mu.certificate_delta)
        }
        delta_s = assemble_perturbation(sys.r, sys.n, lam, blocks)
        resid = sigma_min(evaluate(sys, lam) - delta_s)
        norm = perturbation_norm(mu.certificate_delta)
    else:
        eta_upper = np.inf
        blocks = None
        delta_s = None
        resid = None
        norm = None
    return BackwardErrorResult(
        scenario=scenario,
        lam=lam,
        eta_lower=eta_lower,
        eta_upper=eta_upper,
        exactness=mu.exactness,
        possibly_infinite=possibly_infinite,
        delta_blocks=blocks,
        certificate=delta_s,
        certificate_norm=norm,
        residual=resid,
        mu=mu,
    )


def _seed_blocks_for(problem_labels, structure, pool: dict[str, dict[str, np.ndarray]]):
    """Partial-isometry seeds for a scenario from its already-solved subsets.

    A certificate for a subset scenario embeds into a superset by padding
    the untouched blocks with zeros (zero blocks are partially isometric),
    and its rho value carries over, so seeded lower bounds can only match
    or improve the subset's certified bound.
    """
    seeds = []
    label_set = set(problem_labels)
    for labeled in pool.values():
        if not set(labeled) <= label_set:
            continue
        blocks = []
        for label, (p, k) in zip(problem_labels, structure.blocks):
            blocks.append(labeled.get(label, np.zeros((p, k), dtype=complex)))
        seeds.append(blocks)
    return seeds


def scenario_sweep(
    sys: RosenbrockSystem, lam: complex, opts: MuOptions = MuOptions()
) -> list[BackwardErrorResult]:
    """All 15 scenarios, ordered by scenario size then lexicographically.

    Later (larger) scenarios reuse the certificates of their subsets as
    lower-bound seeds, which keeps the reported brackets monotone under
    scenario inclusion up to solver roundoff.
    """
    lam = complex(lam)
    results = []
    pool: dict[str, dict[str, np.ndarray]] = {}
    for scenario in all_scenarios():
        seeds = ()
        problem = None
        if not is_eigenvalue(sys, lam):
            problem = reduce(sys, lam, scenario)
            if isinstance(problem, ReducedProblem) and problem.structure.n_blocks > 1:
                seeds = _seed_blocks_for(problem.labels, problem.structure, pool)
        res = backward_error(sys, lam, scenario, opts, seed_isometries=seeds)
        results.append(res)
        if res.delta_blocks and res.certificate_norm and res.certificate_norm > 0:
            # Rescale the realized perturbation blocks to unit spectral norm
            # so they can seed supersets as partial isometries.
            pool[scenario.name] = {
                label: blk / sigma_max(blk)
                for label, blk in res.delta_blocks.items()
                if sigma_max(blk) > 0
            }
    return results
