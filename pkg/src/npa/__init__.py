"""Heralded noiseless attenuation with an optical parametric amplifier.

A two-mode squeezer seeded with a signal state and idler vacuum, followed by
a zero-photon herald on the idler, maps ``|alpha> -> |alpha/g>``. The package
simulates this on truncated Fock spaces and checks it against closed forms
and against the beam-splitter attenuator.
"""

from .analytics import (
    bs_coherent_success,
    cat_coherence_factor,
    coherent_prediction,
    fock_factor,
    qubit_prediction,
)
from .fock import (
    DensityMatrix,
    SingleModeState,
    Truncation,
    TwoModeState,
    fidelity,
    norm_sq,
    partial_trace_idler,
    purity,
    tensor,
)
from .heralding import HeraldOutcome, bs_attenuate, herald_distribution, herald_idler, npa_attenuate
from .operators import (
    OperatorMatrix,
    SqueezerParams,
    annihilation,
    beam_splitter,
    creation,
    matrix_exp,
    two_mode_squeezer_direct,
    two_mode_squeezer_factored,
)
from .states import TruncationError, cat, coherent, fock, single_rail_qubit

__version__ = "0.1.0"
