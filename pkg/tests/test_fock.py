import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npa.fock import (
    DensityMatrix,
    SingleModeState,
    Truncation,
    TwoModeState,
    fidelity,
    norm_sq,
    partial_trace_idler,
    projector,
    purity,
    tensor,
)
from npa.states import coherent, fock


def random_state(seed, dim, normalize=True):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return SingleModeState(v / np.linalg.norm(v) if normalize else v)


seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 12)


def test_truncation_rejects_nonpositive():
    with pytest.raises(ValueError):
        Truncation(0)
    with pytest.raises(ValueError):
        Truncation(2.5)
    assert Truncation(3).dim == 3


def test_states_are_immutable():
    s = fock(1, 3)
    with pytest.raises(ValueError):
        s.amps[0] = 1.0


def test_tensor_vacuum_product():
    t = tensor(fock(0, 2), fock(0, 2))
    expected = np.zeros((2, 2))
    expected[0, 0] = 1
    np.testing.assert_array_equal(t.amps, expected)


def test_tensor_basis_product():
    t = tensor(fock(1, 2), fock(0, 2))
    assert t.amps[1, 0] == 1
    assert norm_sq(t) == 1


def test_tensor_coherent_vacuum_corner():
    t = tensor(coherent(1.0), fock(0, 3))
    assert t.amps[0, 0].real == pytest.approx(0.606531, abs=5e-7)


def test_norm_sq_examples():
    assert norm_sq(fock(0, 4)) == 1
    assert norm_sq(fock(0, 4).scaled(0.5)) == pytest.approx(0.25, abs=1e-15)


def test_fidelity_examples():
    psi = random_state(3, 7)
    assert fidelity(psi, psi) == pytest.approx(1, abs=1e-12)
    assert fidelity(fock(0, 3), fock(1, 3)) == 0
    # series overlap <0|1> = exp(-1/2), squared
    assert fidelity(coherent(1.0), coherent(0.0, 17)) == pytest.approx(0.36787944117144233, abs=1e-13)


def test_fidelity_dim_mismatch():
    with pytest.raises(ValueError):
        fidelity(fock(0, 2), fock(0, 3))


def test_partial_trace_product_is_projector():
    psi = random_state(11, 6)
    rho = partial_trace_idler(tensor(psi, fock(0, 4)))
    np.testing.assert_allclose(rho.rho, projector(psi).rho, atol=1e-14)
    assert purity(rho) == pytest.approx(1, abs=1e-12)


def test_partial_trace_maximally_entangled():
    amps = np.zeros((2, 2))
    amps[0, 0] = amps[1, 1] = 1 / math.sqrt(2)
    rho = partial_trace_idler(TwoModeState(amps))
    np.testing.assert_allclose(rho.rho, np.diag([0.5, 0.5]), atol=1e-15)
    assert purity(rho) == pytest.approx(0.5, abs=1e-15)


def test_density_matrix_check_rejects_bad_inputs():
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.0, 1.0], [0.0, 0.0]])).check()
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.7, 0.7])).check()
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.2, -0.2])).check()
    DensityMatrix(np.diag([0.25, 0.75])).check()


@given(seeds, dims, seeds, dims)
def test_norm_of_tensor_is_product(s1, d1, s2, d2):
    a = random_state(s1, d1, normalize=False)
    b = random_state(s2, d2, normalize=False)
    assert norm_sq(tensor(a, b)) == pytest.approx(norm_sq(a) * norm_sq(b), rel=1e-12)


@given(seeds, seeds, dims, st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_fidelity_symmetric_and_phase_invariant(s1, s2, d, phi, chi):
    a, b = random_state(s1, d), random_state(s2, d)
    f = fidelity(a, b)
    assert 0 <= f <= 1 + 1e-12
    assert fidelity(b, a) == pytest.approx(f, abs=1e-12)
    assert fidelity(a.scaled(np.exp(1j * phi)), b.scaled(np.exp(1j * chi))) == pytest.approx(f, abs=1e-12)


@settings(max_examples=50)
@given(seeds, st.integers(1, 8), st.integers(1, 8))
def test_partial_trace_is_a_density_matrix(seed, ds, di):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(ds, di)) + 1j * rng.normal(size=(ds, di))
    rho = partial_trace_idler(TwoModeState(amps / np.linalg.norm(amps)))
    rho.check(1e-10)
    assert 0 < purity(rho) <= 1 + 1e-10


@given(seeds, st.integers(1, 8), seeds, st.integers(1, 8))
def test_product_state_stays_pure(s1, d1, s2, d2):
    rho = partial_trace_idler(tensor(random_state(s1, d1), random_state(s2, d2)))
    assert purity(rho) == pytest.approx(1, abs=1e-10)
