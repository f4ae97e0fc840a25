"""Simultaneous multi-target controlled-phase gates with charge qubits in a cavity."""

from .device import DeviceParams, QubitKnobs, reference_device
from .errors import ConfigError, IntegrationError, ProtocolError, SpaceError, TruncationError
from .hilbert import HilbertSpace, OperatorMatrix, QuantumState, make_space, qubit_register
from .integrator import IntegratorConfig, evolve_state, propagator_of
from .metrics import extract_qubit_gate, gate_fidelity, hadamard_conjugate
from .propagator import ideal_ntcnot, ideal_ntcp, u_total
from .protocol import ProtocolParams, PulseSchedule, derive, validate
from .simulation import simulate_gate

__version__ = "0.1.0"
