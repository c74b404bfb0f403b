"""Closed-form predictions for the heralded attenuators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class AnalyticPrediction:
    """Predicted heralded output.

    ``amplitude`` is the output coherent amplitude for coherent inputs and
    ``coefficients`` the unnormalized Fock coefficients for finite inputs.
    """

    success_probability: float
    attenuation: float
    amplitude: complex | None = None
    coefficients: tuple = ()


def _check_gain(g):
    if not g >= 1:
        raise ValueError(f"g must be >= 1, got {g!r}")


def _check_nu(nu):
    if not 0 < nu <= 1:
        raise ValueError(f"nu must lie in (0, 1], got {nu!r}")


def coherent_success(alpha, g) -> float:
    _check_gain(g)
    return math.exp(-(g * g - 1) * abs(alpha) ** 2 / (g * g)) / (g * g)


def coherent_prediction(alpha, g) -> AnalyticPrediction:
    """``|alpha> -> (1/g) exp(-(g^2-1)|alpha|^2 / 2g^2) |alpha/g>``."""
    _check_gain(g)
    return AnalyticPrediction(coherent_success(alpha, g), 1.0 / g, amplitude=complex(alpha) / g)


def fock_factor(n: int, g) -> float:
    """Heralded amplitude picked up by ``|n>``: ``g**-(n+1)``."""
    _check_gain(g)
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    return float(g) ** -(n + 1)


def qubit_prediction(g, c0=1 / math.sqrt(2), c1=1 / math.sqrt(2)) -> AnalyticPrediction:
    """Single-rail qubit ``c0|0> + c1|1>``; the default is the equal superposition."""
    _check_gain(g)
    coeffs = (c0 * fock_factor(0, g), c1 * fock_factor(1, g))
    p = sum(abs(c) ** 2 for c in coeffs)
    return AnalyticPrediction(p, 1.0 / g, coefficients=coeffs)


def qubit_success(g) -> float:
    """``(g^2 + 1) / (2 g^4)``."""
    _check_gain(g)
    return (g * g + 1) / (2 * g**4)


def bs_coherent_success(alpha, nu) -> float:
    """Zero-reflected-photon probability for a coherent input on the beam splitter."""
    _check_nu(nu)
    return math.exp(-(1 - nu * nu) * abs(alpha) ** 2)


def cat_coherence_factor(alpha, nu) -> float:
    """Overlap ``|<beta|-beta>|`` of the environment states, ``beta^2 = (1-nu^2)|alpha|^2``.

    This multiplies the cat's off-diagonal terms after unheralded loss.
    """
    _check_nu(nu)
    return math.exp(-2 * (1 - nu * nu) * abs(alpha) ** 2)


def lossy_cat_purity(alpha, nu, sign: int = 1) -> float:
    """Purity of a cat state after unheralded loss with amplitude transmittance ``nu``.

    With ``s = <nu alpha|-nu alpha>`` and ``c`` the coherence factor, the reduced
    state lives on span{|nu alpha>, |-nu alpha>} and
    ``tr(rho^2) = [(1 + sign c s)^2 + (s + sign c)^2] / (2 (1 + sign c s)^2)``.
    """
    _check_nu(nu)
    s = math.exp(-2 * nu * nu * abs(alpha) ** 2)
    c = sign * cat_coherence_factor(alpha, nu)
    return ((1 + c * s) ** 2 + (s + c) ** 2) / (2 * (1 + c * s) ** 2)


def attenuated_cat_amplitude(alpha, g) -> complex:
    return complex(alpha) / g


def poisson_weighted_fock_success(alpha, g, n_terms=None) -> float:
    """``sum_n P_poisson(n) fock_factor(n, g)^2``, summed until the terms vanish."""
    _check_gain(g)
    mu = abs(alpha) ** 2
    if n_terms is None:
        n_terms = int(mu + 40 * math.sqrt(mu) + 60)
    if mu == 0:
        return fock_factor(0, g) ** 2
    n = np.arange(n_terms)
    log_terms = -mu + n * math.log(mu) - gammaln(n + 1) - 2 * (n + 1) * math.log(g)
    return math.fsum(np.exp(log_terms))
