"""Idler photon-number heralds and the two attenuator pipelines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fock import SingleModeState, TwoModeState, norm_sq, tensor
from .operators import SqueezerParams, mix, squeeze
from .states import fock, guard_dim

ZERO_PROB = 1e-30


@dataclass(frozen=True, eq=False)
class HeraldOutcome:
    """Unnormalized conditional signal state and the herald probability.

    ``normalized`` is None when the probability is below ``ZERO_PROB``.
    """

    conditional: SingleModeState
    probability: float
    normalized: Optional[SingleModeState]

    @property
    def valid(self) -> bool:
        return self.normalized is not None


def _outcome(conditional: SingleModeState) -> HeraldOutcome:
    p = norm_sq(conditional)
    normalized = conditional.scaled(1.0 / np.sqrt(p)) if p > ZERO_PROB else None
    return HeraldOutcome(conditional, p, normalized)


def herald_idler(state: TwoModeState, k: int = 0) -> HeraldOutcome:
    """Project the idler onto ``|k>``; the signal is left unnormalized."""
    di = state.dims[1]
    if not 0 <= k < di:
        raise ValueError(f"herald photon number {k} outside idler truncation 0..{di - 1}")
    return _outcome(SingleModeState(state.amps[:, k]))


def herald_distribution(state: TwoModeState) -> np.ndarray:
    """Probability of each idler count ``k = 0 .. dim_i - 1``."""
    return (np.abs(state.amps) ** 2).sum(axis=0)


def _shrink(outcome: HeraldOutcome, dim: int) -> HeraldOutcome:
    amps = outcome.conditional.amps
    if np.abs(amps[dim:]).max(initial=0.0) > 0:
        raise AssertionError("heralded output left the input support")
    return _outcome(SingleModeState(amps[:dim]))


def npa_dim(state: SingleModeState, g: float) -> int:
    """Working truncation for the parametric attenuator per the guard-band rule."""
    support = np.flatnonzero(state.amps)
    n_max = int(support[-1]) + 1 if support.size else 1
    return max(state.dim, guard_dim(n_max, SqueezerParams.from_gain(g).r))


def opa_output(state: SingleModeState, g: float, dim: Optional[int] = None,
               route: str = "direct") -> TwoModeState:
    """Two-mode state after seeding the amplifier with ``state`` and idler vacuum."""
    p = SqueezerParams.from_gain(g)
    work = npa_dim(state, g) if dim is None else dim
    if work < state.dim:
        raise ValueError(f"working dim {work} below input dim {state.dim}")
    return squeeze(tensor(state.padded(work), fock(0, work)), p, route)


def npa_attenuate(state: SingleModeState, g: float, dim: Optional[int] = None,
                  route: str = "direct") -> HeraldOutcome:
    """Seed the amplifier with ``state`` and idler vacuum, then herald zero idler photons.

    The two-mode space is ``dim x dim`` (default :func:`npa_dim`). A zero-photon
    herald leaves the signal photon number unchanged, so the returned states
    keep the input truncation.
    """
    out = opa_output(state, g, dim, route)
    return _shrink(herald_idler(out, 0), state.dim)


def bs_attenuate(state: SingleModeState, nu: float) -> HeraldOutcome:
    """Beam splitter with amplitude transmittance ``nu``; herald zero reflected photons.

    The beam splitter conserves total photon number, so a ``dim x dim`` space
    is exact for inputs truncated at ``dim``.
    """
    d = state.dim
    psi = tensor(state, fock(0, d))
    return herald_idler(mix(psi, nu), 0)
