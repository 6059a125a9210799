"""Variational anomaly detection of quantum phases on a dense statevector simulator."""

from .hamiltonians import DEBHMParams, PauliHamiltonian, PauliString, TLFIParams, build_model
from .noise import NoiseModel, build_calibration_matrix, mitigate_counts, noisy_execute
from .oracle import exact_ground_state, solve_model
from .phasemap import anomaly_sweep, discover_phases, vqe_warm_sweep
from .statevector import ParamCircuit, StateVector, run_circuit, sample_measurements
from .variational import SPSAConfig, build_syndrome_circuit, run_vqe, spsa_minimize, train_syndrome

__version__ = "0.1.0"
