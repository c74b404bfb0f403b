"""Ladder operators, two-mode squeezer and beam splitter on truncated spaces.

The two-mode squeezer is built two independent ways:

* ``direct``: matrix exponential of the truncated generator
  ``r (a b - a^dag b^dag)``;
* ``factored``: the normal-ordered product
  ``(1/g) exp(-t a^dag b^dag) g^{-(n_a + n_b)} exp(t a b)``, ``t = sqrt(g^2-1)/g``,
  where each exponential is a finite (nilpotent) power series.

Every operator here conserves either ``n_s - n_i`` (squeezer) or ``n_s + n_i``
(beam splitter), so both are assembled sector by sector; each sector is a
small tridiagonal problem. ``method="full"`` on the direct builders
exponentiates the whole generator instead and is used to cross-check the
sector decomposition.

Two-mode operators act on the flattened vector with index ``n_s * dim_i + n_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .fock import TwoModeState, as_truncation

UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Square matrix acting on a one-mode (``dims=(d,)``) or two-mode space."""

    mat: np.ndarray
    dims: tuple

    def __post_init__(self):
        mat = np.array(self.mat)
        n = int(np.prod(self.dims))
        if mat.shape != (n, n):
            raise ValueError(f"operator shape {mat.shape} does not match space dims {self.dims}")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def dag(self) -> OperatorMatrix:
        return OperatorMatrix(self.mat.conj().T, self.dims)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.dims != self.dims:
                raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")
            return OperatorMatrix(self.mat @ other.mat, self.dims)
        if isinstance(other, TwoModeState):
            if other.dims != self.dims:
                raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")
            return TwoModeState((self.mat @ other.vector()).reshape(self.dims))
        return self.mat @ other

    def unitarity_defect(self) -> float:
        """``max |U^dag U - I|``."""
        m = self.mat
        return float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())


@dataclass(frozen=True)
class SqueezerParams:
    """Squeezing parameter ``r >= 0`` and gain ``g = cosh(r)``."""

    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError(f"squeezing parameter must satisfy r >= 0, got {self.r!r}")
        object.__setattr__(self, "r", float(self.r))

    @classmethod
    def from_gain(cls, g: float) -> SqueezerParams:
        if not g >= 1:
            raise ValueError(f"g must be >= 1, got {g!r}")
        return cls(math.acosh(g))

    @property
    def g(self) -> float:
        return math.cosh(self.r)

    @property
    def nu(self) -> float:
        return 1.0 / math.cosh(self.r)

    @property
    def t(self) -> float:
        """``sqrt(g^2 - 1) / g``, the coefficient in the factored exponentials."""
        return math.tanh(self.r)


def _dim(trunc) -> int:
    return as_truncation(trunc).dim


def annihilation(trunc) -> OperatorMatrix:
    d = _dim(trunc)
    return OperatorMatrix(np.diag(np.sqrt(np.arange(1.0, d)), 1), (d,))


def creation(trunc) -> OperatorMatrix:
    return annihilation(trunc).dag


def number(trunc) -> OperatorMatrix:
    d = _dim(trunc)
    return OperatorMatrix(np.diag(np.arange(float(d))), (d,))


def matrix_exp(A):
    """Matrix exponential (scaling and squaring, Pade order 13).

    Accepts an :class:`OperatorMatrix` or a plain array and returns the same kind.
    """
    mat = A.mat if isinstance(A, OperatorMatrix) else np.asarray(A)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix_exp needs a square matrix, got shape {mat.shape}")
    out = expm(mat)
    return OperatorMatrix(out, A.dims) if isinstance(A, OperatorMatrix) else out


def two_mode_ladders(trunc_s, trunc_i):
    """``(a, b)`` embedded in the two-mode space."""
    ds, di = _dim(trunc_s), _dim(trunc_i)
    a = np.kron(annihilation(ds).mat, np.eye(di))
    b = np.kron(np.eye(ds), annihilation(di).mat)
    return OperatorMatrix(a, (ds, di)), OperatorMatrix(b, (ds, di))


# --- sector bookkeeping ---------------------------------------------------


def difference_sector(d: int, ds: int, di: int):
    """Basis states with ``n_s - n_i = d``, ordered by ``n_i``: returns (n_s, n_i)."""
    ni = np.arange(max(0, -d), min(di, ds - d))
    return ni + d, ni


def total_sector(total: int, ds: int, di: int):
    """Basis states with ``n_s + n_i = total``, ordered by increasing ``n_i``."""
    ni = np.arange(max(0, total - ds + 1), min(di, total + 1))
    return total - ni, ni


def _pair_generator(ns, ni):
    """Restriction of ``a b`` to a difference sector (strictly upper bidiagonal)."""
    m = len(ns)
    pair = np.zeros((m, m))
    # a b |ns, ni> = sqrt(ns ni) |ns-1, ni-1>, i.e. from position j to j-1
    w = np.sqrt(ns[1:] * ni[1:].astype(float))
    pair[np.arange(m - 1), np.arange(1, m)] = w
    return pair


def _hop_generator(ns, ni):
    """Restriction of ``a^dag b - a b^dag`` to a total-photon sector."""
    m = len(ns)
    G = np.zeros((m, m))
    # position j holds (ns_j, ni_j) with ni increasing, so j+1 has one more idler photon.
    # a^dag b maps j+1 -> j with sqrt((ns_j) (ni_{j+1}))
    w = np.sqrt(ns[:-1] * ni[1:].astype(float))
    G[np.arange(m - 1), np.arange(1, m)] = w
    G[np.arange(1, m), np.arange(m - 1)] = -w
    return G


def _squeezer_block_direct(r, ns, ni):
    pair = _pair_generator(ns, ni)
    return matrix_exp(r * (pair - pair.T))


def _nilpotent_exp(N, c):
    """``exp(c N)`` for nilpotent ``N`` by its terminating power series."""
    m = N.shape[0]
    out = np.eye(m)
    term = np.eye(m)
    for k in range(1, m):
        term = term @ N * (c / k)
        if not term.any():
            break
        out = out + term
    return out


def _squeezer_block_factored(g, ns, ni):
    t = math.sqrt(g * g - 1.0) / g
    pair = _pair_generator(ns, ni)
    right = _nilpotent_exp(pair, t)
    left = _nilpotent_exp(pair.T, -t)
    scale = g ** -(ns + ni).astype(float)
    return (left * scale[None, :]) @ right / g


def _squeezer_block(p: SqueezerParams, ns, ni, route):
    if route == "direct":
        return _squeezer_block_direct(p.r, ns, ni)
    if route == "factored":
        return _squeezer_block_factored(p.g, ns, ni)
    raise ValueError(f"unknown squeezer route {route!r}")


def _assemble(blocks, ds, di, dtype=float):
    U = np.zeros((ds * di, ds * di), dtype=dtype)
    for (ns, ni), block in blocks:
        idx = ns * di + ni
        U[np.ix_(idx, idx)] = block
    return U


def _squeezer_dense(p, trunc_s, trunc_i, route):
    ds, di = _dim(trunc_s), _dim(trunc_i)
    blocks = []
    for d in range(-(di - 1), ds):
        ns, ni = difference_sector(d, ds, di)
        blocks.append(((ns, ni), _squeezer_block(p, ns, ni, route)))
    return OperatorMatrix(_assemble(blocks, ds, di), (ds, di))


def squeezer_generator(p: SqueezerParams, trunc_s, trunc_i) -> OperatorMatrix:
    """Truncated generator ``r (a b - a^dag b^dag)`` (real antisymmetric)."""
    a, b = two_mode_ladders(trunc_s, trunc_i)
    ab = a.mat @ b.mat
    return OperatorMatrix(p.r * (ab - ab.T), a.dims)


def two_mode_squeezer_direct(p: SqueezerParams, trunc_s, trunc_i, method="sectors") -> OperatorMatrix:
    """``exp(r (a b - a^dag b^dag))`` on the truncated two-mode space."""
    if method == "sectors":
        return _squeezer_dense(p, trunc_s, trunc_i, "direct")
    if method == "full":
        return matrix_exp(squeezer_generator(p, trunc_s, trunc_i))
    raise ValueError(f"unknown method {method!r}")


def two_mode_squeezer_factored(p: SqueezerParams, trunc_s, trunc_i) -> OperatorMatrix:
    """Normal-ordered product form of the squeezer, built without any matrix exponential."""
    return _squeezer_dense(p, trunc_s, trunc_i, "factored")


def squeeze(state: TwoModeState, p: SqueezerParams, route="direct") -> TwoModeState:
    """Apply the squeezer to ``state`` without forming the full operator.

    Only difference sectors on which ``state`` has support are exponentiated.
    """
    ds, di = state.dims
    amps = state.amps
    out = np.zeros_like(amps)
    for d in range(-(di - 1), ds):
        ns, ni = difference_sector(d, ds, di)
        v = amps[ns, ni]
        if not v.any():
            continue
        out[ns, ni] = _squeezer_block(p, ns, ni, route) @ v
    return TwoModeState(out)


def _check_nu(nu):
    if not 0 < nu <= 1:
        raise ValueError(f"nu must lie in (0, 1], got {nu!r}")
    return math.acos(min(1.0, nu))


def beam_splitter(nu: float, trunc_s, trunc_i, method="sectors") -> OperatorMatrix:
    """``exp(theta (a^dag b - a b^dag))`` with ``cos(theta) = nu``.

    On one photon, ``|1,0> -> nu |1,0> - sqrt(1-nu^2) |0,1>``, so heralding zero
    photons in the second mode scales ``|n,0>`` by ``nu**n`` with no phase.
    """
    theta = _check_nu(nu)
    ds, di = _dim(trunc_s), _dim(trunc_i)
    if method == "full":
        a, b = two_mode_ladders(ds, di)
        hop = a.mat.T @ b.mat
        return matrix_exp(OperatorMatrix(theta * (hop - hop.T), (ds, di)))
    if method != "sectors":
        raise ValueError(f"unknown method {method!r}")
    blocks = []
    for total in range(ds + di - 1):
        ns, ni = total_sector(total, ds, di)
        blocks.append(((ns, ni), matrix_exp(theta * _hop_generator(ns, ni))))
    return OperatorMatrix(_assemble(blocks, ds, di), (ds, di))


def mix(state: TwoModeState, nu: float) -> TwoModeState:
    """Apply :func:`beam_splitter` to ``state`` sector by sector."""
    theta = _check_nu(nu)
    ds, di = state.dims
    amps = state.amps
    out = np.zeros_like(amps)
    for total in range(ds + di - 1):
        ns, ni = total_sector(total, ds, di)
        v = amps[ns, ni]
        if not v.any():
            continue
        out[ns, ni] = matrix_exp(theta * _hop_generator(ns, ni)) @ v
    return TwoModeState(out)
