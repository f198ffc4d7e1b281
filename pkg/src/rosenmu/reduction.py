"""Reductions from (system, lambda, scenario) to mu-value problems.

Each of the 15 nonempty subsets of perturbable blocks {A, B, C, P} either
admits an exact backward-error formula 1/sigma_max(H) for an explicit
window H of S(lambda)^{-1} (single-block cases A, B, C), or reduces to a
structured mu-value of a rectangular matrix M under a rectangular block
diagonal perturbation class.  The reverse direction (re-assembling a block
list into a structured perturbation of S(lambda)) lives here too, so
certificates stay self-describing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .linalg import ABS_FLOOR, InputError, as_matrix, inverse, sigma_max
from .rosenbrock import RosenbrockSystem, evaluate

# H is declared exactly zero (infinite backward error) below this relative level.
WITNESS_ZERO_TOL = 1e-14

_BLOCK_ORDER = "ABCP"


@dataclass(frozen=True)
class Scenario:
    """Subset of the blocks A, B, C, P(z) that perturbations may touch."""

    perturb_a: bool = False
    perturb_b: bool = False
    perturb_c: bool = False
    perturb_p: bool = False

    def __post_init__(self):
        if not (self.perturb_a or self.perturb_b or self.perturb_c or self.perturb_p):
            raise InputError("scenario must perturb at least one block")

    @classmethod
    def from_string(cls, spec: str) -> "Scenario":
        s = spec.strip().upper()
        if not s or any(ch not in _BLOCK_ORDER for ch in s) or len(set(s)) != len(s):
            raise InputError(
                f"scenario must be a nonempty subset of 'ABCP', got {spec!r}"
            )
        return cls("A" in s, "B" in s, "C" in s, "P" in s)

    @property
    def name(self) -> str:
        return "".join(
            ch
            for ch, on in zip(
                _BLOCK_ORDER,
                (self.perturb_a, self.perturb_b, self.perturb_c, self.perturb_p),
            )
            if on
        )

    @property
    def size(self) -> int:
        return len(self.name)

    def includes(self, other: "Scenario") -> bool:
        return set(other.name) <= set(self.name)


def all_scenarios() -> list[Scenario]:
    """The 15 scenarios, sorted by size then lexicographically."""
    out = []
    for size in range(1, 5):
        for combo in combinations(_BLOCK_ORDER, size):
            out.append(Scenario.from_string("".join(combo)))
    return out


@dataclass(frozen=True)
class BlockStructure:
    """Ordered block shapes (p_i, k_i) of the perturbation class."""

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.blocks:
            raise InputError("block structure must be nonempty")
        for i, (p, k) in enumerate(self.blocks):
            if p < 1 or k < 1:
                raise InputError(f"block {i}: shapes must be >= 1, got ({p}, {k})")
        object.__setattr__(self, "blocks", tuple((int(p), int(k)) for p, k in self.blocks))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def p_total(self) -> int:
        return sum(p for p, _ in self.blocks)

    @property
    def k_total(self) -> int:
        return sum(k for _, k in self.blocks)

    def p_slices(self) -> list[slice]:
        out, off = [], 0
        for p, _ in self.blocks:
            out.append(slice(off, off + p))
            off += p
        return out

    def k_slices(self) -> list[slice]:
        out, off = [], 0
        for _, k in self.blocks:
            out.append(slice(off, off + k))
            off += k
        return out

    def assemble(self, blocks) -> np.ndarray:
        """Stack a block list into the dense p x k block-diagonal matrix."""
        blocks = self.check_blocks(blocks)
        delta = np.zeros((self.p_total, self.k_total), dtype=complex)
        for sp, sk, blk in zip(self.p_slices(), self.k_slices(), blocks):
            delta[sp, sk] = blk
        return delta

    def check_blocks(self, blocks) -> list[np.ndarray]:
        if len(blocks) != self.n_blocks:
            raise InputError(f"expected {self.n_blocks} blocks, got {len(blocks)}")
        out = []
        for i, ((p, k), blk) in enumerate(zip(self.blocks, blocks)):
            b = as_matrix(blk, f"block {i}")
            if b.shape != (p, k):
                raise InputError(f"block {i}: expected {p}x{k}, got {b.shape}")
            out.append(b)
        return out


@dataclass
class ReducedProblem:
    """mu-value problem (M, structure) plus the embedding back into S(lambda).

    ``labels[i]`` names the block of the structured perturbation of
    S(lambda) that block i of Delta lands in: one of "A", "B", "C" or
    "A<j>" for the degree-j polynomial coefficient.
    """

    m: np.ndarray
    structure: BlockStructure
    labels: tuple[str, ...]
    scenario: Scenario
    r: int
    n: int
    d: int
    lam: complex

    def __post_init__(self):
        k, p = self.m.shape
        if (k, p) != (self.structure.k_total, self.structure.p_total):
            raise InputError(
                f"M is {k}x{p} but structure totals are "
                f"k={self.structure.k_total}, p={self.structure.p_total}"
            )
        if len(self.labels) != self.structure.n_blocks:
            raise InputError("one label per block is required")


@dataclass
class ExactFormula:
    """Closed-form backward error 1/sigma_max(H), +inf when H = 0."""

    value: float
    witness: np.ndarray
    label: str
    scenario: Scenario
    r: int
    n: int
    lam: complex


def build_tilde_js(r: int, n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """0/1 distribution factors for the degree >= 1 polynomial coefficients.

    The first is the d-fold block diagonal of [0_{r,n}; I_n], the second the
    d-fold vertical stack of [0_{n,r}  I_n]; both are empty when d = 0.
    """
    j1 = np.zeros(((r + n) * d, n * d))
    j2 = np.zeros((n * d, r + n))
    for j in range(d):
        j1[j * (r + n) + r : (j + 1) * (r + n), j * n : (j + 1) * n] = np.eye(n)
        j2[j * n : (j + 1) * n, r:] = np.eye(n)
    return j1, j2


def _power_row(r: int, n: int, d: int, lam: complex) -> np.ndarray:
    return np.hstack([lam**j * np.eye(r + n) for j in range(d + 1)])


def _poly_j_factors(scenario: Scenario, r: int, n: int, d: int):
    """J factors and structure for the scenarios that perturb P(z).

    Columns of J1 follow the row partition of Delta, rows of J2 its column
    partition; the trailing parts distribute the degree >= 1 coefficients.
    """
    j1t, j2t = build_tilde_js(r, n, d)
    i_r, i_n = np.eye(r), np.eye(n)
    row_r = np.hstack([i_r, np.zeros((r, n))])  # selects the top rows of S
    row_n = np.hstack([np.zeros((n, r)), i_n])  # selects the bottom rows

    head_cols = []  # leading column blocks of J1: (width, top r x ?, middle n x ?)
    head_rows = []  # leading row blocks of J2
    structure = []
    labels = []
    if scenario.perturb_a:
        head_cols.append((r, i_r, np.zeros((n, r))))
        head_rows.append(row_r)
        structure.append((r, r))
        labels.append("A")
    if scenario.perturb_b:
        head_cols.append((r, i_r, np.zeros((n, r))))
        head_rows.append(row_n)
        structure.append((r, n))
        labels.append("B")
    if scenario.perturb_c:
        head_cols.append((n, np.zeros((r, n)), i_n))
        head_rows.append(row_r)
        structure.append((n, r))
        labels.append("C")
    # A_0 rides in the explicit head; A_1..A_d go through the tilde factors.
    head_cols.append((n, np.zeros((r, n)), i_n))
    head_rows.append(row_n)
    structure.extend([(n, n)] * (d + 1))
    labels.extend(f"A{j}" for j in range(d + 1))

    head_w = sum(w for w, _, _ in head_cols)
    j1 = np.zeros(((d + 1) * (r + n), head_w + n * d))
    off = 0
    for w, top, mid in head_cols:
        j1[:r, off : off + w] = top
        j1[r : r + n, off : off + w] = mid
        off += w
    j1[r + n :, head_w:] = j1t
    j2 = np.vstack(head_rows + ([j2t] if d > 0 else []))
    return j1, j2, BlockStructure(tuple(structure)), tuple(labels)


def _fixed_factors(scenario: Scenario, r: int, n: int):
    """Left/right selector factors for the P-free multi-block scenarios.

    Returns (L, R, structure, labels) with det(S - L Delta R) = 0 iff
    det(I - Delta R S^{-1} L) = 0.
    """
    i_r, i_n = np.eye(r), np.eye(n)
    z_rn, z_nr = np.zeros((r, n)), np.zeros((n, r))
    name = scenario.name
    if name == "AB":
        left = np.block([[i_r, i_r], [z_nr, z_nr]])
        right = np.eye(r + n)
        structure = ((r, r), (r, n))
    elif name == "AC":
        left = np.eye(r + n)
        right = np.block([[i_r, z_rn], [i_r, z_rn]])
        structure = ((r, r), (n, r))
    elif name == "BC":
        left = np.eye(r + n)
        right = np.block([[z_nr, i_n], [i_r, z_rn]])
        structure = ((r, n), (n, r))
    elif name == "ABC":
        left = np.block([[i_r, i_r, z_rn], [z_nr, z_nr, i_n]])
        right = np.block([[i_r, z_rn], [z_nr, i_n], [i_r, z_rn]])
        structure = ((r, r), (r, n), (n, r))
    else:  # pragma: no cover - guarded by the dispatcher
        raise InputError(f"no fixed factors for scenario {name}")
    return left, right, BlockStructure(structure), tuple(name)


def _exact_windows(scenario: Scenario, r: int, n: int):
    i_r, i_n = np.eye(r), np.eye(n)
    rows_r = np.hstack([i_r, np.zeros((r, n))])
    rows_n = np.hstack([np.zeros((n, r)), i_n])
    name = scenario.name
    if name == "A":
        return rows_r, rows_r.T
    if name == "B":
        return rows_n, rows_r.T
    if name == "C":
        return rows_r, rows_n.T
    raise InputError(f"no exact window for scenario {name}")  # pragma: no cover


def reduce(sys: RosenbrockSystem, lam: complex, scenario: Scenario):
    """Reduce a backward-error instance to an ExactFormula or ReducedProblem.

    Requires S(lambda) to be invertible; callers short-circuit eigenvalues
    to a zero backward error before reaching this point.
    """
    lam = complex(lam)
    r, n, d = sys.r, sys.n, sys.d
    s_inv = inverse(evaluate(sys, lam))

    if scenario.size == 1 and not scenario.perturb_p:
        rows, cols = _exact_windows(scenario, r, n)
        h = rows @ s_inv @ cols
        smax = sigma_max(h)
        if smax <= WITNESS_ZERO_TOL * max(sigma_max(s_inv), ABS_FLOOR):
            value = np.inf
        else:
            value = 1.0 / smax
        return ExactFormula(value, h, scenario.name, scenario, r, n, lam)

    if scenario.perturb_p:
        j1, j2, structure, labels = _poly_j_factors(scenario, r, n, d)
        m = j2 @ s_inv @ _power_row(r, n, d, lam) @ j1
    else:
        left, right, structure, labels = _fixed_factors(scenario, r, n)
        m = right @ s_inv @ left
    return ReducedProblem(m, structure, labels, scenario, r, n, d, lam)


def exact_as_reduced(formula: ExactFormula, sys: RosenbrockSystem) -> ReducedProblem:
    """Recast a single-block exact case as a 1-block mu problem (M = H)."""
    r, n = formula.r, formula.n
    shape = {"A": (r, r), "B": (r, n), "C": (n, r)}[formula.label]
    return ReducedProblem(
        formula.witness,
        BlockStructure((shape,)),
        (formula.label,),
        formula.scenario,
        r,
        n,
        sys.d,
        formula.lam,
    )


def assemble_perturbation(
    r: int, n: int, lam: complex, labeled_blocks: dict[str, np.ndarray]
) -> np.ndarray:
    """Assemble labeled delta blocks into the dense perturbation of S(lambda).

    A, B, C land in their quadrants; each polynomial coefficient "A<j>"
    contributes lambda^j times itself to the lower-right quadrant.
    """
    lam = complex(lam)
    delta_s = np.zeros((r + n, r + n), dtype=complex)
    quadrants = {
        "A": (slice(0, r), slice(0, r), (r, r)),
        "B": (slice(0, r), slice(r, r + n), (r, n)),
        "C": (slice(r, r + n), slice(0, r), (n, r)),
    }
    for label, blk in labeled_blocks.items():
        b = as_matrix(blk, f"delta[{label}]")
        if label in quadrants:
            rows, cols, shape = quadrants[label]
            if b.shape != shape:
                raise InputError(
                    f"delta[{label}]: expected {shape[0]}x{shape[1]}, got {b.shape}"
                )
            delta_s[rows, cols] += b
        elif label.startswith("A") and label[1:].isdigit():
            if b.shape != (n, n):
                raise InputError(f"delta[{label}]: expected {n}x{n}, got {b.shape}")
            delta_s[r:, r:] += lam ** int(label[1:]) * b
        else:
            raise InputError(f"unknown block label {label!r}")
    return delta_s


def embed(problem: ReducedProblem, delta_blocks) -> np.ndarray:
    """Map a block list for the reduced problem back to a perturbation of S."""
    blocks = problem.structure.check_blocks(delta_blocks)
    labeled: dict[str, np.ndarray] = {}
    for label, blk in zip(problem.labels, blocks):
        labeled[label] = labeled.get(label, 0) + blk
    return assemble_perturbation(problem.r, problem.n, problem.lam, labeled)


def perturbation_norm(delta_blocks) -> float:
    """Size measure of a structured perturbation: max of block spectral norms."""
    return max(sigma_max(blk) for blk in delta_blocks)
