"""Simulator for two Coulomb-coupled trapped-ion harmonic oscillators.

Two ions in separate potential wells exchange motional energy through
their mutual Coulomb interaction.  This package provides the closed-form
coupling quantities, classical normal-mode analysis of the avoided
crossing, a truncated-Fock-space master-equation engine with heating, and
the experiment sequences built on top of it.
"""
from .constants import (BERYLLIUM_9, CALCIUM_40, CODATA2018, MAGNESIUM_25,
                        IonSpecies, PhysicalConstants)
from .coupling import (CouplingParams, TrapConfig, coulomb_coupling_constant,
                       coupling_params, exchange_rate, exchange_time,
                       shielding_factor, static_frequency_shift)
from .dynamics import (ExchangeHamiltonian, HeatingModel,
                       closed_form_exchange, detuned_exchange_amplitude,
                       evolve, heisenberg_mode_swap_check)
from .errors import (ConfigError, InstabilityError, PhysicsDomainError,
                     StepSizeError, TruncationError)
from .fock import (DensityOperator, FockSpace, destroy, dump_state_csv,
                   expectation_number, fock_state, minimum_fock_dim,
                   mode_operator, number_op, thermal_state)
from .modes import (CrossingSweep, ModeSpectrum, avoided_crossing_sweep,
                    mode_frequencies, normal_mode_frequencies)
from .protocols import (ExperimentPlan, blue_sideband_pi_pulse,
                        fit_exchange_period, nbar_of_ratio,
                        sideband_asymmetry, single_quantum_experiment,
                        thermal_exchange_experiment)
from .series import TimeSeries

__version__ = "0.1.0"

__all__ = [
    "BERYLLIUM_9", "CALCIUM_40", "CODATA2018", "MAGNESIUM_25",
    "IonSpecies", "PhysicalConstants",
    "CouplingParams", "TrapConfig", "coulomb_coupling_constant",
    "coupling_params", "exchange_rate", "exchange_time", "shielding_factor",
    "static_frequency_shift",
    "ExchangeHamiltonian", "HeatingModel", "closed_form_exchange",
    "detuned_exchange_amplitude", "evolve", "heisenberg_mode_swap_check",
    "ConfigError", "InstabilityError", "PhysicsDomainError", "StepSizeError",
    "TruncationError",
    "DensityOperator", "FockSpace", "destroy", "dump_state_csv",
    "expectation_number", "fock_state", "minimum_fock_dim", "mode_operator",
    "number_op", "thermal_state",
    "CrossingSweep", "ModeSpectrum", "avoided_crossing_sweep",
    "mode_frequencies", "normal_mode_frequencies",
    "ExperimentPlan", "blue_sideband_pi_pulse", "fit_exchange_period",
    "nbar_of_ratio", "sideband_asymmetry", "single_quantum_experiment",
    "thermal_exchange_experiment",
    "TimeSeries",
]
