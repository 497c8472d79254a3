"""Experiment sequences composed from the dynamics engine.

Three measurements are implemented: the few-quanta thermal energy exchange
(mean occupation of ion a versus interaction time), the single-quantum
exchange bracketed by blue-sideband pi pulses on ion a (spin-up probability
versus interaction time), and sideband-asymmetry thermometry.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.sparse

from . import coupling
from .constants import IonSpecies
from .coupling import TrapConfig
from .dynamics import ExchangeHamiltonian, HeatingModel, evolve
from .errors import PhysicsDomainError, TruncationError
from .fock import (DEFAULT_TAIL_TOL, DensityOperator, FockSpace,
                   minimum_fock_dim, thermal_state)
from .series import TimeSeries

_MAX_AUTO_DIM = 80
_RAMP_SEGMENTS = 32


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to run one exchange experiment.

    taus : interaction times in seconds, sorted ascending
    ramp_model : "instantaneous" or "linear"; a linear ramp brings the
        detuning from off_resonance_detuning_hz to zero over ramp_time
        before the interaction clock starts (thermal experiment only; the
        single-quantum sequence stays on resonance throughout)
    pulse_error : depolarizing spin error applied after each sideband pulse
    dims : optional (dim_a, dim_b) override of the automatic truncation
    dt : optional integrator step override (seconds)
    """

    trap: TrapConfig
    species_a: IonSpecies
    species_b: IonSpecies
    heating: HeatingModel
    nbar_a: float
    nbar_b: float
    taus: tuple
    ramp_model: str = "instantaneous"
    ramp_time: float = 9e-6
    off_resonance_detuning_hz: float = 1e5
    pulse_error: float = 0.0
    tail_tol: float = DEFAULT_TAIL_TOL
    dt: float | None = None
    dims: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        if not self.taus:
            raise PhysicsDomainError("plan needs at least one interaction time")
        if any(t < 0 for t in self.taus) or list(self.taus) != sorted(self.taus):
            raise PhysicsDomainError("taus must be >= 0 and sorted ascending")
        if self.nbar_a < 0 or self.nbar_b < 0:
            raise PhysicsDomainError("initial occupations must be >= 0")
        if not 0 <= self.pulse_error < 1:
            raise PhysicsDomainError("pulse_error must lie in [0, 1)")
        if self.ramp_model not in ("instantaneous", "linear"):
            raise PhysicsDomainError(
                f"ramp_model must be 'instantaneous' or 'linear', got {self.ramp_model!r}")
        if self.ramp_model == "linear":
            positive = [t for t in self.taus if t > 0]
            if not self.ramp_time > 0:
                raise PhysicsDomainError("linear ramp needs ramp_time > 0")
            if positive and self.ramp_time >= min(positive):
                raise PhysicsDomainError(
                    "ramp_time must be shorter than the smallest positive tau")

    def exchange_rate(self) -> float:
        return coupling.exchange_rate(self.trap, self.species_a, self.species_b)


def _auto_dims(plan: ExperimentPlan, pulsed: bool) -> tuple:
    """Truncation sized for the worst-case mean occupation of either mode.

    The exchange swaps the mode populations, a sideband pulse adds one
    quantum to mode a, and heating grows the mean linearly, so both modes
    are sized for max(nbar_a (+1), nbar_b) + ndot*t_max, plus headroom.
    """
    if plan.dims is not None:
        return tuple(plan.dims)
    t_max = max(plan.taus)
    if plan.ramp_model == "linear":
        t_max += plan.ramp_time
    worst = max(plan.nbar_a + (1.0 if pulsed else 0.0), plan.nbar_b)
    worst += max(plan.heating.ndot_a, plan.heating.ndot_b) * t_max
    dim = minimum_fock_dim(worst, plan.tail_tol, headroom=3)
    if pulsed:
        dim += 1
    if dim > _MAX_AUTO_DIM:
        raise TruncationError(
            f"required Fock dimension {dim} exceeds the cap {_MAX_AUTO_DIM}; "
            "reduce occupations/heating or pass dims explicitly")
    return dim, dim


def _ramp_into_resonance(rho, plan, omega):
    """Piecewise-constant approximation of a linear detuning ramp to zero."""
    delta0 = 2.0 * math.pi * plan.off_resonance_detuning_hz
    seg = plan.ramp_time / _RAMP_SEGMENTS
    for k in range(_RAMP_SEGMENTS):
        delta_mid = delta0 * (1.0 - (k + 0.5) / _RAMP_SEGMENTS)
        rho = evolve(rho, ExchangeHamiltonian(omega, delta_mid), plan.heating,
                     duration=seg, tail_tol=plan.tail_tol)
    return rho


def thermal_exchange_experiment(plan: ExperimentPlan) -> TimeSeries:
    """Mean occupation of ion a after each interaction time.

    Prepares the two-mode thermal state, brings the wells into resonance
    (instantaneously or via the linear ramp), evolves with heating, and
    reports <n_a>(tau).  With the instantaneous ramp this reproduces the
    closed-form exchange solution.
    """
    dims = _auto_dims(plan, pulsed=False)
    space = FockSpace(dims[0], dims[1])
    rho = thermal_state(space, plan.nbar_a, plan.nbar_b, tail_tol=plan.tail_tol)
    omega = plan.exchange_rate()
    if plan.ramp_model == "linear":
        rho = _ramp_into_resonance(rho, plan, omega)

    n_a, _, _ = space.diagonal_numbers()
    collected = {}

    def record(t, diag):
        collected[t] = float(diag @ n_a)

    evolve(rho, ExchangeHamiltonian(omega, 0.0), plan.heating,
           duration=max(plan.taus), dt=plan.dt,
           sample_times=sorted(set(plan.taus)), sample_diag_fn=record,
           tail_tol=plan.tail_tol)
    return TimeSeries(label="n_a_mean", times=np.array(plan.taus),
                      values=np.array([collected[t] for t in plan.taus]))


def _sideband_unitary(space: FockSpace, area: float = 1.0):
    """Anti-Jaynes-Cummings pulse on ion a as a sparse unitary.

    Couples |n, down> <-> |n+1, up> with rotation angle area*pi*sqrt(n+1);
    area = 1 is the calibrated n = 0 pi pulse.  The unpaired states
    |0, up> and |top, down> are left untouched.
    """
    da = space.dim_a
    rows, cols, vals = [], [], []

    def put(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    for n in range(da - 1):
        half = 0.5 * area * math.pi * math.sqrt(n + 1.0)
        lo = 0 * da + n        # |down, n>
        hi = 1 * da + (n + 1)  # |up, n+1>
        put(lo, lo, math.cos(half))
        put(hi, hi, math.cos(half))
        put(lo, hi, -1j * math.sin(half))
        put(hi, lo, -1j * math.sin(half))
    put(1 * da + 0, 1 * da + 0, 1.0)            # |up, 0> dark
    put(0 * da + (da - 1), 0 * da + (da - 1), 1.0)  # |down, top> frozen
    u_spin_a = scipy.sparse.coo_matrix((vals, (rows, cols)),
                                       shape=(2 * da, 2 * da), dtype=complex)
    return scipy.sparse.kron(u_spin_a, scipy.sparse.identity(space.dim_b),
                             format="csr")


def _depolarize_spin(matrix: np.ndarray, space: FockSpace, p: float) -> np.ndarray:
    if p == 0.0:
        return matrix
    m = space.dim_a * space.dim_b
    dd = matrix[:m, :m]
    uu = matrix[m:, m:]
    mix = 0.5 * p * (dd + uu)
    out = (1.0 - p) * matrix
    out[:m, :m] += mix
    out[m:, m:] += mix
    return out


def blue_sideband_pi_pulse(state: DensityOperator, pulse_error: float = 0.0,
                           area: float = 1.0,
                           tail_tol: float = DEFAULT_TAIL_TOL) -> DensityOperator:
    """Apply the calibrated blue-sideband pulse on ion a.

    The inter-well coupling is frozen for the (instantaneous) pulse.  After
    the unitary a depolarizing error of strength pulse_error acts on the
    spin.  Raises TruncationError if the top Fock level of mode a carries
    spin-down population above tail_tol (it has no pulse partner).
    """
    space = state.space
    if not space.spin_a:
        raise PhysicsDomainError("sideband pulse needs a spin-enabled space")
    if not 0 <= pulse_error < 1:
        raise PhysicsDomainError("pulse_error must lie in [0, 1)")
    n_a, _, spin = space.diagonal_numbers()
    diag = state.matrix.diagonal().real
    stranded = float(diag[(n_a == space.dim_a - 1) & (spin == 0)].sum())
    if stranded > tail_tol:
        raise TruncationError(
            f"top Fock level of mode a holds {stranded:.2e} spin-down "
            f"population (> tail_tol {tail_tol:.1e}); enlarge dim_a")
    u = _sideband_unitary(space, area)
    # (u rho)^H = rho u^H; the explicit contiguous copy keeps the second
    # sparse product streaming over rows instead of strided columns.
    half = np.ascontiguousarray((u @ state.matrix).conj().T)
    rotated = u @ half
    rotated = _depolarize_spin(rotated, space, pulse_error)
    return DensityOperator(space, rotated)


def single_quantum_experiment(plan: ExperimentPlan) -> TimeSeries:
    """Spin-up probability of ion a after the pulse-exchange-pulse sequence.

    Per interaction time tau: prepare thermal x |down>_a, apply a
    blue-sideband pi pulse, evolve on resonance with heating for tau,
    apply a second pi pulse, report P(up_a).  For ground-state preparation
    with no heating and no pulse error this equals sin^2(omega_ex * tau).
    """
    dims = _auto_dims(plan, pulsed=True)
    space = FockSpace(dims[0], dims[1], spin_a=True)
    rho = thermal_state(space, plan.nbar_a, plan.nbar_b, spin="down",
                        tail_tol=plan.tail_tol)
    rho = blue_sideband_pi_pulse(rho, pulse_error=plan.pulse_error,
                                 tail_tol=plan.tail_tol)
    omega = plan.exchange_rate()

    # Fold the second pulse and spin measurement into one sparse observable:
    # P(up) after pulse + depolarizing = (1-p) Tr(U+ P_up U rho) + p/2.
    u = _sideband_unitary(space)
    _, _, spin = space.diagonal_numbers()
    p_up = scipy.sparse.diags(spin.astype(float))
    observable = (u.conj().T @ p_up @ u).tocoo()
    obs_data = observable.data
    obs_gather = (observable.col, observable.row)

    collected = {}

    def record(t, state):
        raw = float((obs_data * state.matrix[obs_gather]).sum().real)
        collected[t] = (1.0 - plan.pulse_error) * raw + 0.5 * plan.pulse_error

    evolve(rho, ExchangeHamiltonian(omega, 0.0), plan.heating,
           duration=max(plan.taus), dt=plan.dt,
           sample_times=sorted(set(plan.taus)), sample_fn=record,
           tail_tol=plan.tail_tol)
    return TimeSeries(label="p_up_a", times=np.array(plan.taus),
                      values=np.array([collected[t] for t in plan.taus]))


def sideband_asymmetry(nbar: float) -> float:
    """Red/blue sideband strength ratio r = nbar / (nbar + 1)."""
    if nbar < 0:
        raise PhysicsDomainError(f"nbar must be >= 0, got {nbar}")
    return nbar / (nbar + 1.0)


def nbar_of_ratio(r: float) -> float:
    """Invert the sideband ratio: nbar = r / (1 - r), for r in [0, 1)."""
    if not 0 <= r < 1:
        raise PhysicsDomainError(f"sideband ratio must lie in [0, 1), got {r}")
    return r / (1.0 - r)


def fit_exchange_period(times, values, period_guess: float) -> dict:
    """Fit offset + slope*t - (amp/2) cos(2 pi t / period) to a series.

    Returns the fitted period, peak-to-peak amplitude, offset and slope.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)

    def model(t, offset, slope, amp, period):
        return offset + slope * t - 0.5 * amp * np.cos(2.0 * np.pi * t / period)

    p0 = (float(values.mean()), 0.0,
          float(values.max() - values.min()), float(period_guess))
    popt, _ = scipy.optimize.curve_fit(model, times, values, p0=p0, maxfev=20000)
    return {"offset": popt[0], "slope": popt[1], "amplitude": abs(popt[2]),
            "period": abs(popt[3])}
