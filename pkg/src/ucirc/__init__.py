"""Synthesis of n-qubit unitaries into CNOT and one-qubit gates."""
from .circuit import (
    CNOT, Circuit, Diagonal, GateCountReport, MultiControlled, OneQubit, Rotation,
    UCGate, UCRotation, apply_circuit, circuit_unitary, count_gates, emit_text, equal_up_to_phase,
    euler_zyz, parse_matrix, parse_state, parse_text, phase_error, rotation_matrix,
)
from .csd import CSDPlan, csd_decompose, csd_decompose_rotations, csd_plan, ruler
from .linalg import (
    PreconditionError, cs_decompose, givens_for, is_unitary, random_state, random_unitary, unitary_eig,
)
from .lowering import lower
from .nq import multiplexor_split, nq_decompose, two_qubit_minimal, two_qubit_up_to_diagonal
from .qr import GivensStep, elimination_profile, expand_multicontrolled, gray, qr_decompose, qr_plan
from .stateprep import PrepPlan, disentangle, state_to_state
from .ucg import (
    constant_multiplexor, decompose_d_gate, decompose_diagonal, decompose_uc_onequbit,
    decompose_uc_rotation, solve_ucr_angles,
)
from .chain import nn_decompose

__version__ = "0.1.0"
