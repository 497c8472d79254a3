"""Master-equation engine for the coupled wells, plus its closed forms.

The simulated equation, in the frame rotating at the mean well frequency,
is

    drho/dt = -i [H, rho] + sum_i D[L_i] rho
    H = (delta/2)(n_a - n_b) + omega_ex (a b+ + a+ b)

with four heating jump operators L in {sqrt(g_a) a, sqrt(g_a) a+,
sqrt(g_b) b, sqrt(g_b) b+} (equal up/down rates give d<n>/dt = g
independent of <n>).  Integration is classical fixed-step 4th order.

The engine evolves only the excitation-difference sectors of rho that are
actually populated; the Liouvillian is exactly block-diagonal over those
sectors, so this is a lossless reduction (see _kernels).
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import coefficient_vectors, rk4_step, scale, sector_rhs
from .errors import PhysicsDomainError, StepSizeError, TruncationError
from .fock import DEFAULT_TAIL_TOL, DensityOperator, FockSpace, destroy, mode_operator
from .series import TimeSeries


@dataclass(frozen=True)
class HeatingModel:
    """Per-mode heating rates in quanta per second."""

    ndot_a: float = 0.0
    ndot_b: float = 0.0

    def __post_init__(self):
        if self.ndot_a < 0 or self.ndot_b < 0:
            raise PhysicsDomainError("heating rates must be >= 0")

    @property
    def mean_rate(self) -> float:
        return 0.5 * (self.ndot_a + self.ndot_b)


NO_HEATING = HeatingModel(0.0, 0.0)


@dataclass(frozen=True)
class ExchangeHamiltonian:
    """Rotating-frame exchange Hamiltonian (divided by hbar).

    omega_ex : rad/s, exchange rate
    detuning_delta : rad/s, angular frequency difference w_a - w_b
    """

    omega_ex: float
    detuning_delta: float = 0.0

    def __post_init__(self):
        if self.omega_ex < 0:
            raise PhysicsDomainError("omega_ex must be >= 0")

    def matrix(self, space: FockSpace) -> np.ndarray:
        """Dense H/hbar on the full product space (for checks and small dims)."""
        a = mode_operator(space, destroy(space.dim_a), "a")
        b = mode_operator(space, destroy(space.dim_b), "b")
        n_a = a.conj().T @ a
        n_b = b.conj().T @ b
        return (0.5 * self.detuning_delta * (n_a - n_b)
                + self.omega_ex * (a @ b.conj().T + a.conj().T @ b))


def closed_form_exchange(nbar_a0: float, nbar_b0: float, omega_ex: float,
                         ndot: float, times) -> TimeSeries:
    """Mean occupation of mode a on resonance, from the Langevin solution:

        <n_a>(t) = n_a0 cos^2(w t) + n_b0 sin^2(w t) + ndot * t

    ndot is the mean of the two per-mode heating rates.
    """
    if nbar_a0 < 0 or nbar_b0 < 0 or omega_ex < 0 or ndot < 0:
        raise PhysicsDomainError("closed_form_exchange inputs must be >= 0")
    t = np.asarray(times, dtype=float)
    phase = omega_ex * t
    values = (nbar_a0 * np.cos(phase) ** 2 + nbar_b0 * np.sin(phase) ** 2
              + ndot * t)
    return TimeSeries(label="n_a_mean", times=t, values=values)


def heisenberg_mode_swap_check(omega_ex: float, t: float) -> np.ndarray:
    """Mode-mixing matrix of the resonant Heisenberg solution.

    Maps (a+, b+) at time 0 to time t, global oscillation phase dropped:
    [[cos wt, -i sin wt], [-i sin wt, cos wt]].  Unitary for all t; a pure
    swap (up to the -i phase) at t = pi/(2 w).
    """
    c = math.cos(omega_ex * t)
    s = math.sin(omega_ex * t)
    return np.array([[c, -1j * s], [-1j * s, c]])


def detuned_exchange_amplitude(omega_ex: float, delta: float, t):
    """Single-excitation transfer probability at detuning delta:

        P(t) = (w^2 / weff^2) sin^2(weff t),  weff = sqrt(w^2 + delta^2/4)
    """
    w_eff = math.hypot(omega_ex, 0.5 * delta)
    if w_eff == 0.0:
        return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
    ratio = (omega_ex / w_eff) ** 2
    return ratio * np.sin(w_eff * np.asarray(t, dtype=float)) ** 2


# --- sector bookkeeping -------------------------------------------------

@lru_cache(maxsize=256)
def _sector_map(dim_a: int, dim_b: int, q: int):
    """Index arrays linking sector slots T[i,j,k] (l implicit) to the
    two-mode matrix block: returns (rows, cols, pad_i, pad_j, pad_k)."""
    i, j, k = np.indices((dim_a, dim_b, dim_a))
    l = i + j - k - q
    valid = (l >= 0) & (l < dim_b)
    i, j, k, l = i[valid], j[valid], k[valid], l[valid]
    rows = i * dim_b + j
    cols = k * dim_b + l
    return rows, cols, i + 1, j + 1, k + 1


def _block_view(matrix, space, s_row, s_col):
    m = space.dim_a * space.dim_b
    return matrix[s_row * m:(s_row + 1) * m, s_col * m:(s_col + 1) * m]


def _decompose(matrix: np.ndarray, space: FockSpace):
    """Split a density matrix into its populated (spin-block, q) sectors."""
    da, db = space.dim_a, space.dim_b
    keys = []
    for s_row in range(space.spin_dim):
        for s_col in range(space.spin_dim):
            block = _block_view(matrix, space, s_row, s_col)
            rows, cols = np.nonzero(block)
            if rows.size == 0:
                continue
            qs = (rows // db + rows % db) - (cols // db + cols % db)
            for q in np.unique(qs):
                keys.append((s_row, s_col, int(q)))
    stack = np.zeros((len(keys), da + 2, db + 2, da + 2), dtype=complex)
    for idx, (s_row, s_col, q) in enumerate(keys):
        rows, cols, pi, pj, pk = _sector_map(da, db, q)
        block = _block_view(matrix, space, s_row, s_col)
        stack[idx, pi, pj, pk] = block[rows, cols]
    return stack, keys


def _assemble(stack: np.ndarray, keys, space: FockSpace) -> np.ndarray:
    n = space.total_dim
    matrix = np.zeros((n, n), dtype=complex)
    for idx, (s_row, s_col, q) in enumerate(keys):
        rows, cols, pi, pj, pk = _sector_map(space.dim_a, space.dim_b, q)
        _block_view(matrix, space, s_row, s_col)[rows, cols] = stack[idx, pi, pj, pk]
    return matrix


class _DiagProbe:
    """Cached flat-index gathers for diagonal observables of the stack."""

    def __init__(self, stack_shape, keys, space):
        da, db = space.dim_a, space.dim_b
        sec_of_block = {}
        for idx, (s_row, s_col, q) in enumerate(keys):
            if s_row == s_col and q == 0:
                sec_of_block[s_row] = idx
        i = np.arange(da)[:, None]
        j = np.arange(db)[None, :]
        flats = []
        self._diag_slices = []
        for s in range(space.spin_dim):
            if s in sec_of_block:
                sec = np.full((da, db), sec_of_block[s])
                flat = np.ravel_multi_index(
                    (sec, np.broadcast_to(i + 1, (da, db)),
                     np.broadcast_to(j + 1, (da, db)),
                     np.broadcast_to(i + 1, (da, db))), stack_shape)
                flats.append(flat.ravel())
                self._diag_slices.append((s, True))
            else:
                self._diag_slices.append((s, False))
        self._flat = np.concatenate(flats) if flats else np.empty(0, dtype=np.intp)
        self._space = space
        n_a = np.tile(np.repeat(np.arange(da), db), space.spin_dim)
        self._top_a_mask = n_a == da - 1
        n_b = np.tile(np.tile(np.arange(db), da), space.spin_dim)
        self._top_b_mask = n_b == db - 1

    def diagonal(self, stack) -> np.ndarray:
        da, db = self._space.dim_a, self._space.dim_b
        diag = np.zeros(self._space.total_dim)
        if self._flat.size:
            values = stack.ravel()[self._flat].real
            pos = 0
            for s, present in self._diag_slices:
                if present:
                    diag[s * da * db:(s + 1) * da * db] = values[pos:pos + da * db]
                    pos += da * db
        return diag

    def trace(self, stack) -> float:
        if not self._flat.size:
            return 0.0
        return float(stack.ravel()[self._flat].real.sum())

    def tail_populations(self, diag):
        return float(diag[self._top_a_mask].sum()), float(diag[self._top_b_mask].sum())


# --- the integrator -----------------------------------------------------

def _default_dt(scale: float) -> float:
    return 1.0 / (200.0 * scale)


def evolve(rho0: DensityOperator, hamiltonian: ExchangeHamiltonian,
           heating: HeatingModel | None = None, duration: float = 0.0,
           dt: float | None = None, sample_times=None, sample_fn=None,
           sample_diag_fn=None, tail_tol: float = DEFAULT_TAIL_TOL,
           trace_budget: float = 1e-8) -> DensityOperator:
    """Integrate the master equation for `duration` seconds.

    Optional samples: `sample_times` (sorted, within [0, duration]) trigger
    callbacks along the way; `sample_fn(t, state)` receives the full
    DensityOperator, `sample_diag_fn(t, diag)` just the basis diagonal
    (cheap).  The truncation tail (top Fock level of either mode) is
    re-checked against tail_tol at every sample and at the end.

    The step size must satisfy dt <= 0.01 / max(|delta|/2, omega_ex, rates)
    and the RK4 stability bound for the truncated operator norms; the
    default is 1/(200 * max(...)).
    """
    heating = heating or NO_HEATING
    space = rho0.space
    if duration < 0:
        raise PhysicsDomainError("duration must be >= 0")
    delta = hamiltonian.detuning_delta
    omega = hamiltonian.omega_ex
    ga, gb = heating.ndot_a, heating.ndot_b
    scale_hz = max(abs(delta) / 2.0, omega, ga, gb)

    if dt is None:
        dt = _default_dt(scale_hz) if scale_hz > 0 else max(duration, 1.0)
    elif dt <= 0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    elif scale_hz > 0 and dt > 0.01 / scale_hz:
        raise StepSizeError(
            f"dt={dt:.3e} exceeds the accuracy bound 0.01/max-rate="
            f"{0.01 / scale_hz:.3e}")
    da, db = space.dim_a, space.dim_b
    lam = (abs(delta) * (da + db - 2) + 4.0 * omega * math.sqrt(da * db)
           + 2.0 * (ga * (2 * da + 1) + gb * (2 * db + 1)))
    if lam > 0 and dt * lam > 2.5:
        raise StepSizeError(
            f"dt={dt:.3e} unstable for truncated operator norms; "
            f"need dt <= {2.5 / lam:.3e}")

    times = [] if sample_times is None else [float(t) for t in sample_times]
    if any(t < -1e-15 or t > duration * (1 + 1e-12) + 1e-15 for t in times):
        raise PhysicsDomainError("sample times must lie within [0, duration]")
    if sorted(times) != times:
        raise PhysicsDomainError("sample times must be sorted")

    stack, keys = _decompose(rho0.matrix, space)
    if not keys:
        raise PhysicsDomainError("initial state has no population")
    probe = _DiagProbe(stack.shape, keys, space)
    qs = np.array([q for (_, _, q) in keys], dtype=np.int64)
    ra, rb, wa, wb = coefficient_vectors(da, db, ga, gb)
    args = (qs, ra, rb, wa, wb, 0.5 * delta, omega, ga, gb, da, db)
    bufs = [np.zeros_like(stack) for _ in range(5)]

    def check_and_sample(t):
        diag = probe.diagonal(stack)
        tail_a, tail_b = probe.tail_populations(diag)
        if tail_a > tail_tol or tail_b > tail_tol:
            raise TruncationError(
                f"top-level population (a={tail_a:.2e}, b={tail_b:.2e}) exceeds "
                f"tail_tol={tail_tol:.1e} at t={t:.3e} s; enlarge the Fock dims")
        if sample_diag_fn is not None:
            sample_diag_fn(t, diag)
        if sample_fn is not None:
            sample_fn(t, DensityOperator(space, _assemble(stack, keys, space),
                                         check=False))

    boundaries = sorted(set(times) | {duration})
    now = 0.0
    if times and abs(times[0]) < 1e-15:
        check_and_sample(0.0)
    for target in boundaries:
        seg = target - now
        if seg <= 1e-18:
            continue
        nsteps = max(1, math.ceil(seg / dt - 1e-9))
        dt_seg = seg / nsteps
        for _ in range(nsteps):
            rk4_step(stack, bufs, dt_seg, args)
            tr = probe.trace(stack)
            drift = abs(tr - 1.0)
            if drift > trace_budget:
                raise StepSizeError(
                    f"trace drift {drift:.2e} exceeds budget {trace_budget:.1e} "
                    "per step; reduce dt")
            if drift > 1e-14:
                scale(stack, 1.0 / tr)
        now = target
        if target in times or target == duration:
            if target in times:
                check_and_sample(target)

    final = DensityOperator(space, _assemble(stack, keys, space), check=False)
    tail_a = final.top_level_population("a")
    tail_b = final.top_level_population("b")
    if tail_a > tail_tol or tail_b > tail_tol:
        raise TruncationError(
            f"top-level population (a={tail_a:.2e}, b={tail_b:.2e}) exceeds "
            f"tail_tol={tail_tol:.1e} at end of evolution; enlarge the Fock dims")
    return final


def _liouvillian_apply(rho: DensityOperator, hamiltonian: ExchangeHamiltonian,
                       heating: HeatingModel | None = None) -> np.ndarray:
    """Single Liouvillian application via the sector kernel (test hook)."""
    heating = heating or NO_HEATING
    space = rho.space
    stack, keys = _decompose(rho.matrix, space)
    qs = np.array([q for (_, _, q) in keys], dtype=np.int64)
    ra, rb, wa, wb = coefficient_vectors(space.dim_a, space.dim_b,
                                         heating.ndot_a, heating.ndot_b)
    out = np.zeros_like(stack)
    sector_rhs(stack, out, qs, ra, rb, wa, wb,
               0.5 * hamiltonian.detuning_delta, hamiltonian.omega_ex,
               heating.ndot_a, heating.ndot_b, space.dim_a, space.dim_b)
    return _assemble(out, keys, space)
