"""Autonomous quantum error correction by engineered dissipation.

Synthesizes corrective and preventive Lindblad jumps for a code that meets the
Knill-Laflamme condition, simulates the resulting master equation densely, and
checks how the logical error falls off with engineered strength.
"""

__version__ = "0.1.0"

from .codes import (  # noqa: E402
    CodeSpace,
    CorruptedStructure,
    ErrorSet,
    KLReport,
    build_corrupted_structure,
    builtin_code,
    cardinal_states,
    check_knill_laflamme,
)
from .lindblad import (  # noqa: E402
    DecomposedLindbladian,
    EvolutionResult,
    Lindbladian,
    autoqec_lindbladian,
    decompose,
    evolve,
    steady_states,
)
from .synthesis import EngineeredDissipation, synthesize, validate_preventive  # noqa: E402

__all__ = [
    "CodeSpace",
    "CorruptedStructure",
    "DecomposedLindbladian",
    "EngineeredDissipation",
    "ErrorSet",
    "EvolutionResult",
    "KLReport",
    "Lindbladian",
    "autoqec_lindbladian",
    "build_corrupted_structure",
    "builtin_code",
    "cardinal_states",
    "check_knill_laflamme",
    "decompose",
    "evolve",
    "steady_states",
    "synthesize",
    "validate_preventive",
]
