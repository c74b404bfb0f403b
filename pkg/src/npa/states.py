"""Constructors for coherent, Fock, single-rail qubit and cat states."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import poisson

from .fock import NORM_TOL, SingleModeState, as_truncation

TAIL_TOL = 1e-14


class TruncationError(ValueError):
    """The requested truncation cannot hold the state to the required accuracy."""


def poisson_tail(alpha, dim: int) -> float:
    """Coherent-state probability mass on photon numbers ``>= dim``."""
    mu = abs(alpha) ** 2
    if mu == 0.0:
        return 0.0
    return float(poisson.sf(dim - 1, mu))


def coherent_dim(alpha, tail_tol=TAIL_TOL) -> int:
    """Smallest truncation whose discarded Poisson tail is at most ``tail_tol``."""
    mu = abs(alpha) ** 2
    if mu == 0.0:
        return 1
    dim = max(1, int(mu))
    while poisson_tail(alpha, dim) > tail_tol:
        dim += 1
    return dim


def guard_dim(n_max: int, r: float) -> int:
    """Two-mode sizing rule for squeezer inputs with photon support below ``n_max``.

    Pair creation moves amplitude up by about ``sinh(r)**2`` photons per mode,
    so the working truncation is ``2 * (n_max + 10 sinh^2 r)``.
    """
    return int(2 * (n_max + math.ceil(10 * math.sinh(r) ** 2)))


def coherent_coefficients(alpha, dim: int) -> np.ndarray:
    """Untruncated expansion ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)`` for ``n < dim``."""
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def coherent(alpha, trunc=None, tail_tol=TAIL_TOL) -> SingleModeState:
    """Coherent state ``|alpha>``, renormalized after truncation.

    ``trunc`` defaults to :func:`coherent_dim`. Raises :class:`TruncationError`
    when the truncation would discard more than ``tail_tol`` of the Poisson mass.
    """
    alpha = complex(alpha)
    dim = coherent_dim(alpha, tail_tol) if trunc is None else as_truncation(trunc).dim
    tail = poisson_tail(alpha, dim)
    if tail > tail_tol:
        raise TruncationError(
            f"dim {dim} too small for |alpha|={abs(alpha):.6g}: "
            f"tail mass {tail:.3g} > {tail_tol:.1g} (need dim >= {coherent_dim(alpha, tail_tol)})"
        )
    amps = coherent_coefficients(alpha, dim)
    amps /= np.linalg.norm(amps)
    return SingleModeState(amps, discarded=tail)


def fock(n: int, trunc) -> SingleModeState:
    dim = as_truncation(trunc).dim
    if not 0 <= n < dim:
        raise ValueError(f"photon number {n} outside truncation 0..{dim - 1}")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return SingleModeState(amps)


def single_rail_qubit(c0, c1, trunc=2) -> SingleModeState:
    """``c0|0> + c1|1>``; the coefficients must already be normalized."""
    dim = as_truncation(trunc).dim
    if dim < 2:
        raise ValueError("single-rail qubit needs dim >= 2")
    norm = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"|c0|^2 + |c1|^2 = {norm!r}, expected 1")
    amps = np.zeros(dim, dtype=complex)
    amps[0], amps[1] = c0, c1
    return SingleModeState(amps)


def _cat_amps(alpha, sign, dim):
    """``|alpha> + sign |-alpha>`` expanded to ``dim`` levels, not normalized."""
    amps = coherent_coefficients(alpha, dim)
    parity = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    return amps + sign * parity * amps


def cat_tail(alpha, sign: int, dim: int) -> float:
    """Probability mass of the cat state on photon numbers ``>= dim``."""
    kept = np.linalg.norm(_cat_amps(complex(alpha), sign, dim))
    return max(0.0, 1.0 - (kept * cat_normalization(alpha, sign)) ** 2)


def cat_dim(alpha, sign: int = 1, tail_tol=TAIL_TOL) -> int:
    dim = max(coherent_dim(alpha, tail_tol), 2 if sign == -1 else 1)
    while cat_tail(alpha, sign, dim) > tail_tol:
        dim += 1
    return dim


def cat(alpha, sign: int = 1, trunc=None, tail_tol=TAIL_TOL) -> SingleModeState:
    """Cat state ``N (|alpha> + sign |-alpha>)`` with ``sign`` in {+1, -1}.

    Built from the untruncated coherent expansion, which keeps only the
    even (sign=+1) or odd (sign=-1) Fock components exactly. As
    ``alpha -> 0`` the odd cat tends to ``|1>`` carrying the phase of alpha;
    below ``|alpha| = 1e-100`` that limit is returned directly.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    alpha = complex(alpha)
    if alpha == 0 and sign == -1:
        raise ValueError("odd cat with alpha=0 is the zero vector")
    if sign == -1 and abs(alpha) < 1e-100:
        dim = 2 if trunc is None else as_truncation(trunc).dim
        if dim < 2:
            raise TruncationError("odd cat needs dim >= 2")
        amps = np.zeros(dim, dtype=complex)
        amps[1] = np.exp(1j * np.angle(alpha))
        return SingleModeState(amps)
    dim = cat_dim(alpha, sign, tail_tol) if trunc is None else as_truncation(trunc).dim
    tail = cat_tail(alpha, sign, dim)
    if tail > tail_tol:
        raise TruncationError(
            f"dim {dim} too small for cat with |alpha|={abs(alpha):.6g} "
            f"(tail {tail:.3g}, need dim >= {cat_dim(alpha, sign, tail_tol)})"
        )
    amps = _cat_amps(alpha, sign, dim)
    return SingleModeState(amps / np.linalg.norm(amps), discarded=tail)


def cat_normalization(alpha, sign: int = 1) -> float:
    """Exact ``N = [2 (1 + sign exp(-2|alpha|^2))]^{-1/2}``."""
    x = -2.0 * abs(alpha) ** 2
    return 1.0 / math.sqrt(2.0 * (2.0 + math.expm1(x) if sign == 1 else -math.expm1(x)))
