"""MUB-balanced pure states in prime-power dimensions d = 3 (mod 4), built and
checked through the discrete Wigner function on F_d^2."""

from .balanced_state import (
    BalancedState,
    ScopeError,
    build_state,
    build_wigner,
    component_histogram,
    density_column,
    semicircle_fit,
    state_vector,
    verify_state,
)
from .finite_field import FieldElement, FieldError, FieldSpec, NotPrimePowerError, field_build, field_for_order
from .mub import MubSet, build_mubs
from .phase_space import INFINITY, Line, PhasePoint, Striation, enumerate_striations
from .report import Check, VerificationReport
from .wigner import WignerFunction, from_wigner, to_wigner

__version__ = "0.1.0"
