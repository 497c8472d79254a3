"""Truncated Fock-space states and operators for the two motional modes.

Basis ordering is spin (if present) slowest, then mode a, then mode b:
index = (s * dim_a + n_a) * dim_b + n_b.  Spin basis is {|down>, |up>}.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicsDomainError, TruncationError

DEFAULT_TAIL_TOL = 1e-6

SPIN_DOWN = np.array([1.0, 0.0], dtype=complex)
SPIN_UP = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class FockSpace:
    """Truncated product space of the two motional modes, optionally with
    a two-level (spin) factor on ion a."""

    dim_a: int
    dim_b: int
    spin_a: bool = False

    def __post_init__(self):
        if self.dim_a < 2 or self.dim_b < 2:
            raise PhysicsDomainError("Fock dimensions must be at least 2")

    @property
    def spin_dim(self) -> int:
        return 2 if self.spin_a else 1

    @property
    def total_dim(self) -> int:
        return self.spin_dim * self.dim_a * self.dim_b

    def index(self, n_a: int, n_b: int, spin: int = 0) -> int:
        return (spin * self.dim_a + n_a) * self.dim_b + n_b

    def diagonal_numbers(self):
        """Arrays (n_a, n_b, spin) aligned with the basis index."""
        grid = np.indices((self.spin_dim, self.dim_a, self.dim_b))
        spin, n_a, n_b = (g.ravel() for g in grid)
        return n_a, n_b, spin


def destroy(dim: int) -> np.ndarray:
    """Single-mode lowering operator on a dim-level truncation."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def mode_operator(space: FockSpace, op_single: np.ndarray, mode: str) -> np.ndarray:
    """Embed a single-mode operator into the full product space.

    Intended for building small-dimension test operators; the evolution
    engine never materializes full-space operators.
    """
    if mode == "a":
        full = np.kron(op_single, np.eye(space.dim_b))
    elif mode == "b":
        full = np.kron(np.eye(space.dim_a), op_single)
    else:
        raise PhysicsDomainError(f"mode must be 'a' or 'b', got {mode!r}")
    if space.spin_a:
        full = np.kron(np.eye(2), full)
    return full.astype(complex)


def spin_operator(space: FockSpace, op2: np.ndarray) -> np.ndarray:
    if not space.spin_a:
        raise PhysicsDomainError("space has no spin factor")
    return np.kron(op2, np.eye(space.dim_a * space.dim_b)).astype(complex)


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix over a FockSpace, validated on construction.

    Cheap checks (hermiticity, trace, shape) always run; the positivity
    eigenvalue check is O(dim^3) and only runs via validate_full().
    """

    space: FockSpace
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = self.matrix
        n = self.space.total_dim
        if m.shape != (n, n):
            raise PhysicsDomainError(f"matrix shape {m.shape} != space dim {n}")
        if self.check:
            herm = self.hermiticity_defect()
            if herm > 1e-12:
                raise PhysicsDomainError(f"matrix not Hermitian: defect {herm:.2e}")
            tr = self.trace()
            if abs(tr - 1.0) > 1e-10:
                raise PhysicsDomainError(f"trace {tr!r} != 1")

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_defect(self) -> float:
        from ._kernels import hermiticity_defect
        return float(hermiticity_defect(np.ascontiguousarray(self.matrix)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def validate_full(self, positivity_tol: float = 1e-9) -> None:
        """Full physicality check including the eigenvalue spectrum."""
        herm = self.hermiticity_defect()
        if herm > 1e-12:
            raise PhysicsDomainError(f"matrix not Hermitian: defect {herm:.2e}")
        if abs(self.trace() - 1.0) > 1e-10:
            raise PhysicsDomainError(f"trace {self.trace()!r} != 1")
        lo = self.min_eigenvalue()
        if lo < -positivity_tol:
            raise PhysicsDomainError(f"negative eigenvalue {lo:.2e}")

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def top_level_population(self, mode: str) -> float:
        """Population of the highest retained Fock level of one mode."""
        n_a, n_b, _ = self.space.diagonal_numbers()
        diag = self.matrix.diagonal().real
        if mode == "a":
            return float(diag[n_a == self.space.dim_a - 1].sum())
        if mode == "b":
            return float(diag[n_b == self.space.dim_b - 1].sum())
        raise PhysicsDomainError(f"mode must be 'a' or 'b', got {mode!r}")

    def population_up(self) -> float:
        """Probability of finding the ion-a spin in |up>."""
        _, _, spin = self.space.diagonal_numbers()
        return float(self.matrix.diagonal().real[spin == 1].sum())


def expectation_number(rho: DensityOperator, mode: str) -> float:
    """Mean occupation <n_mode> = Tr(rho n_mode); real and >= 0."""
    n_a, n_b, _ = rho.space.diagonal_numbers()
    weights = n_a if mode == "a" else n_b if mode == "b" else None
    if weights is None:
        raise PhysicsDomainError(f"mode must be 'a' or 'b', got {mode!r}")
    return float(rho.matrix.diagonal().real @ weights)


def thermal_probabilities(nbar: float, dim: int) -> np.ndarray:
    """Geometric Fock distribution p_n = nbar^n/(1+nbar)^(n+1), renormalized
    over the truncation."""
    if nbar < 0:
        raise PhysicsDomainError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        probs = np.zeros(dim)
        probs[0] = 1.0
        return probs
    ratio = nbar / (1.0 + nbar)
    probs = ratio ** np.arange(dim) / (1.0 + nbar)
    return probs / probs.sum()


def minimum_fock_dim(nbar: float, tail_tol: float = DEFAULT_TAIL_TOL,
                     headroom: int = 0) -> int:
    """Smallest truncation whose top-level thermal population is below
    tail_tol, plus optional headroom levels."""
    if nbar < 0:
        raise PhysicsDomainError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        return 2 + headroom
    ratio = nbar / (1.0 + nbar)
    # p_{N-1} = ratio^(N-1)/(1+nbar) < tail_tol
    n_top = math.log(tail_tol * (1.0 + nbar)) / math.log(ratio)
    return max(2, math.ceil(n_top) + 1) + headroom


def _spin_density(spin) -> np.ndarray:
    if isinstance(spin, str):
        vec = {"down": SPIN_DOWN, "up": SPIN_UP}.get(spin)
        if vec is None:
            raise PhysicsDomainError(f"spin must be 'down' or 'up', got {spin!r}")
    else:
        vec = np.asarray(spin, dtype=complex)
        if vec.shape != (2,):
            raise PhysicsDomainError("spin state must be a length-2 vector")
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise PhysicsDomainError("spin state must be nonzero")
        vec = vec / norm
    return np.outer(vec, vec.conj())


def thermal_state(space: FockSpace, nbar_a: float, nbar_b: float,
                  spin=None, tail_tol: float = DEFAULT_TAIL_TOL) -> DensityOperator:
    """Product of single-mode thermal states, optionally with a pure spin
    factor on ion a.

    Raises TruncationError (naming the required dimension) if either
    truncation leaves more than tail_tol in its top level.
    """
    for nbar, dim, mode in ((nbar_a, space.dim_a, "a"), (nbar_b, space.dim_b, "b")):
        probs = thermal_probabilities(nbar, dim)
        if probs[-1] >= tail_tol:
            need = minimum_fock_dim(nbar, tail_tol)
            raise TruncationError(
                f"mode {mode}: dim {dim} leaves tail {probs[-1]:.2e} >= "
                f"tail_tol {tail_tol:.1e} for nbar={nbar}; need dim >= {need}")
    diag = np.kron(thermal_probabilities(nbar_a, space.dim_a),
                   thermal_probabilities(nbar_b, space.dim_b))
    if space.spin_a:
        spin_rho = _spin_density("down" if spin is None else spin)
        n = space.total_dim
        m = space.dim_a * space.dim_b
        matrix = np.zeros((n, n), dtype=complex)
        motion = np.arange(m)
        for s_row in range(2):
            for s_col in range(2):
                if spin_rho[s_row, s_col] != 0:
                    matrix[s_row * m + motion, s_col * m + motion] = \
                        spin_rho[s_row, s_col] * diag
    else:
        if spin is not None:
            raise PhysicsDomainError("spin state given but space has no spin factor")
        matrix = np.diag(diag).astype(complex)
    return DensityOperator(space, matrix)


def fock_state(space: FockSpace, n_a: int, n_b: int, spin=None) -> DensityOperator:
    """Pure product state |n_a, n_b>, optionally with a pure ion-a spin."""
    if not 0 <= n_a < space.dim_a or not 0 <= n_b < space.dim_b:
        raise PhysicsDomainError(f"Fock indices ({n_a}, {n_b}) outside truncation")
    motion = np.zeros(space.dim_a * space.dim_b)
    motion[n_a * space.dim_b + n_b] = 1.0
    matrix = np.diag(motion).astype(complex)
    if space.spin_a:
        matrix = np.kron(_spin_density("down" if spin is None else spin), matrix)
    elif spin is not None:
        raise PhysicsDomainError("spin state given but space has no spin factor")
    return DensityOperator(space, matrix)


def dump_state_csv(rho: DensityOperator, path) -> None:
    """Write the matrix row-major as (re, im) pairs with a basis header."""
    space = rho.space
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(
            f"# basis=spin,mode_a,mode_b spin_a={space.spin_a} "
            f"dim_a={space.dim_a} dim_b={space.dim_b} "
            "layout=row-major entries=re,im pairs\n")
        writer = csv.writer(handle, lineterminator="\n")
        for row in rho.matrix:
            flat = []
            for value in row:
                flat.append(f"{value.real:.17g}")
                flat.append(f"{value.imag:.17g}")
            writer.writerow(flat)
