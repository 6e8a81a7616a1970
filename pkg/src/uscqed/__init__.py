"""Dressed-basis open-system simulator for a cascade three-level emitter
ultrastrongly coupled to a cavity mode."""

from .dissipation import DissipatorSet, build_dissipators, liouvillian, liouvillian_apply
from .dressed import DressedBasis, GroundExpansion, diagonalize, ground_expansion, level_sweep, positive_frequency_part
from .dynamics import InvariantError, Trajectory, evolve, evolve_driven, initial_state
from .hilbert import HilbertSpace, Operator, make_destroy, make_transition, tensor_embed
from .model import (ModelParams, PulseParams, build_hamiltonian, build_pulse_operator,
                    build_rwa_hamiltonian, pulse_envelope)
from .observables import ObservableSet
from .system import System

__version__ = "0.1.0"
