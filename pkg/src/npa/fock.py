"""Truncated Fock-space states, overlaps and reductions.

Two-mode amplitudes are indexed ``amps[n_signal, n_idler]`` with photon
numbers ascending from zero. States are immutable: the underlying arrays are
marked read-only on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12
CHECK_TOL = 1e-10


@dataclass(frozen=True)
class Truncation:
    """Number of retained Fock levels, photon numbers ``0 .. dim-1``."""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"truncation dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))


def as_truncation(trunc) -> Truncation:
    return trunc if isinstance(trunc, Truncation) else Truncation(trunc)


def _frozen(arr, ndim):
    arr = np.array(arr, dtype=complex)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d amplitude array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SingleModeState:
    """Amplitudes ``amps[n] = <n|psi>`` of one mode.

    Unnormalized states are allowed; their squared norm is a probability
    weight. ``discarded`` records the probability mass dropped by truncation
    before any renormalization.
    """

    amps: np.ndarray
    discarded: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps, 1))
        if self.amps.size < 1:
            raise ValueError("state needs at least one Fock level")

    @property
    def trunc(self) -> Truncation:
        return Truncation(self.amps.size)

    @property
    def dim(self) -> int:
        return self.amps.size

    def scaled(self, c) -> SingleModeState:
        return SingleModeState(c * self.amps, self.discarded)

    def normalized(self) -> SingleModeState:
        return self.scaled(1.0 / np.sqrt(norm_sq(self)))

    def padded(self, dim: int) -> SingleModeState:
        """Embed into a larger truncation (zero amplitude on the new levels)."""
        if dim < self.dim:
            raise ValueError(f"cannot pad a dim-{self.dim} state down to {dim}")
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.amps
        return SingleModeState(out, self.discarded)

    def mean_photon_number(self) -> float:
        p = np.abs(self.amps) ** 2
        return float(np.arange(self.dim) @ p / p.sum())


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Signal/idler amplitudes ``amps[n_s, n_i]``."""

    amps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps, 2))

    @property
    def trunc_s(self) -> Truncation:
        return Truncation(self.amps.shape[0])

    @property
    def trunc_i(self) -> Truncation:
        return Truncation(self.amps.shape[1])

    @property
    def dims(self) -> tuple[int, int]:
        return self.amps.shape

    def vector(self) -> np.ndarray:
        """Flattened amplitudes, index ``n_s * dim_i + n_i``."""
        return self.amps.reshape(-1)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rho = _frozen(self.rho, 2)
        if rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

    @property
    def trunc(self) -> Truncation:
        return Truncation(self.rho.shape[0])

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def check(self, tol=CHECK_TOL):
        """Raise ValueError unless Hermitian, trace one and positive semidefinite."""
        herm = np.abs(self.rho - self.rho.conj().T).max()
        if herm > tol:
            raise ValueError(f"density matrix not Hermitian (defect {herm:.3g})")
        if abs(self.trace() - 1.0) > tol:
            raise ValueError(f"density matrix trace {self.trace():.15g} != 1")
        lo = np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T)).min()
        if lo < -tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
        return self


def _check_dims(a, b):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def tensor(s: SingleModeState, i: SingleModeState) -> TwoModeState:
    """Product state with ``s`` in the signal mode and ``i`` in the idler."""
    return TwoModeState(np.outer(s.amps, i.amps))


def norm_sq(state) -> float:
    """Squared norm; for a heralded conditional state this is the success probability."""
    a = state.amps
    return float(np.vdot(a, a).real)


def inner(a: SingleModeState, b: SingleModeState) -> complex:
    """``<a|b>``."""
    _check_dims(a, b)
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: SingleModeState, b: SingleModeState) -> float:
    return abs(inner(a, b)) ** 2


def projector(state: SingleModeState) -> DensityMatrix:
    return DensityMatrix(np.outer(state.amps, state.amps.conj()))


def partial_trace_idler(state: TwoModeState) -> DensityMatrix:
    """Reduced signal density matrix ``rho[m, n] = sum_k amps[m, k] conj(amps[n, k])``."""
    a = state.amps
    return DensityMatrix(a @ a.conj().T)


def purity(rho: DensityMatrix) -> float:
    r = rho.rho
    # tr(rho^2) for Hermitian rho is the squared Frobenius norm
    return float(np.vdot(r, r).real)
