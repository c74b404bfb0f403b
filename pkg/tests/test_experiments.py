import json
import math

import numpy as np
import pytest

from npa import experiments as ex
from npa.fock import projector
from npa.heralding import npa_dim
from npa.states import TruncationError, cat, coherent, fock


def test_run_coherent_spot_value():
    rec = ex.run_coherent(1.0, 2.0, 60)
    assert rec.passed, rec.failures
    assert rec.numeric["fidelity"] >= 1 - 1e-8
    assert abs(rec.numeric["probability"] - 0.118092) / rec.numeric["probability"] <= 5e-6
    assert rec.numeric["probability"] == pytest.approx(0.11809163818525369, rel=1e-12)


@pytest.mark.parametrize("g", [1.0, 1.5, 3.0])
def test_run_coherent_vacuum(g):
    rec = ex.run_coherent(0, g)
    assert rec.passed
    assert rec.numeric["fidelity"] == pytest.approx(1, abs=1e-15)
    assert rec.numeric["probability"] == pytest.approx(1 / g**2, abs=1e-12)


def test_run_coherent_large_amplitude():
    rec = ex.run_coherent(2.0, 3.0, 80)
    assert rec.numeric["fidelity"] >= 1 - 1e-8
    assert rec.truncation["below_guard"]
    assert ex.run_coherent(2.0, 3.0).passed


def test_run_coherent_rejects_dim_below_input():
    with pytest.raises(TruncationError):
        ex.run_coherent(2.0, 2.0, 10)


def test_run_coherent_warns_below_guard(caplog):
    rec = ex.run_coherent(1.0, 3.0, 20)
    assert rec.truncation["below_guard"]
    assert any("guard" in m for m in caplog.messages)


@pytest.mark.parametrize("n, g, amp", [(0, 2.0, 0.5), (5, 1.0, 1.0), (3, 1.5, 0.197531), (2, 2.0, 0.125)])
def test_run_fock_examples(n, g, amp):
    rec = ex.run_fock(n, g)
    assert rec.passed, rec.failures
    assert rec.numeric["amplitude"][0] == pytest.approx(amp, abs=5e-7)
    assert rec.residuals["amplitude"] <= 1e-9


def test_run_fock_pinned_factor():
    assert ex.run_fock(3, 1.5).numeric["amplitude"][0] == pytest.approx(0.19753086419753085, abs=1e-12)


def test_run_qubit_examples():
    rec = ex.run_qubit(2.0)
    assert rec.passed
    assert abs(rec.numeric["probability"] - 0.15625) <= 1e-9
    assert rec.residuals["ratio"] <= 1e-9
    rec = ex.run_qubit(1.0)
    assert rec.numeric["probability"] == pytest.approx(1, abs=1e-12)


def test_run_qubit_basis_inputs_have_no_ratio():
    rec = ex.run_qubit(2.0, c0=1, c1=0)
    assert "ratio" not in rec.residuals
    assert rec.numeric["probability"] == pytest.approx(0.25, abs=1e-12)


def test_operator_equivalence_at_zero_squeezing():
    rec = ex.run_operator_equivalence(0.0, (20, 20))
    assert rec.residuals["column_difference"] == 0
    assert rec.passed


def test_operator_equivalence_guard_fraction_domain():
    with pytest.raises(ValueError):
        ex.run_operator_equivalence(0.5, (10, 10), 1.0)


def test_operator_equivalence_unitarity():
    rec = ex.run_operator_equivalence(math.acosh(2.0), (60, 60), 0.4)
    assert rec.residuals["unitarity_defect"] <= 1e-10


def test_operator_equivalence_at_gain_two():
    rec = ex.run_operator_equivalence(math.acosh(2.0), (60, 60), 0.4)
    assert rec.residuals["column_difference"] <= 1e-6


def test_operator_equivalence_small_gain_with_room():
    # g = 1.2 has 10 sinh^2 r = 4.4, so 24 photons sit well inside 60 levels
    rec = ex.run_operator_equivalence(math.acosh(1.2), (60, 60), 0.2)
    assert rec.passed, rec.failures


def test_cat_comparison_spot_values():
    rec = ex.run_cat_comparison(1.0, 2.0)
    assert rec.passed, rec.failures
    # pinned partial-trace oracle, dim 30
    assert rec.numeric["unheralded_coherence"] == pytest.approx(0.22313016014842973, abs=1e-6)
    assert rec.numeric["unheralded_purity"] == pytest.approx(0.7670071538194781, abs=1e-10)
    assert rec.numeric["heralded_purity"] >= 1 - 1e-10
    assert rec.numeric["heralded_fidelity"] >= 1 - 1e-6
    assert rec.numeric["unheralded_purity"] < 1


def test_cat_comparison_identity():
    rec = ex.run_cat_comparison(1.0, 1.0)
    assert rec.numeric["heralded_fidelity"] == pytest.approx(1, abs=1e-12)
    assert rec.numeric["unheralded_purity"] == pytest.approx(1, abs=1e-12)
    assert rec.numeric["heralded_purity"] == pytest.approx(1, abs=1e-12)


def test_cat_comparison_odd_cat():
    rec = ex.run_cat_comparison(1.2, 1.5, sign=-1)
    assert rec.passed, rec.failures


def test_cat_coherence_of_pure_cat_is_one():
    rho = projector(cat(1.0))
    assert ex.cat_coherence(rho, 1.0) == pytest.approx(1, abs=1e-10)


def test_herald_k_records_completeness():
    rec = ex.run_herald(fock(1, 2), 2.0, 1)
    assert rec.passed
    assert rec.numeric["probability"] == pytest.approx(3 / 32, abs=1e-12)


def test_sweep_empty():
    assert ex.sweep("coherent", []) == []


def test_sweep_coherent_gains():
    recs = ex.sweep("coherent", [{"alpha": 1, "g": 1.0}, {"alpha": 1, "g": 2.0}])
    assert [r.numeric["probability"] for r in recs] == pytest.approx([1, 0.118092], abs=5e-7)


def test_sweep_order_and_determinism():
    grid = [{"n": n, "g": g} for n in range(4) for g in (1.5, 3.0)]
    serial = ex.sweep("fock", grid)
    threaded = ex.sweep("fock", grid, workers=4)
    assert [r.inputs["n"] for r in threaded] == [p["n"] for p in grid]
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in threaded]
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in ex.sweep("fock", grid)]


def test_record_round_trip():
    rec = ex.run_cat_comparison(1.0, 2.0)
    text = json.dumps(rec.to_dict())
    assert ex.ExperimentRecord.from_dict(json.loads(text)) == rec


def test_records_stay_in_range():
    for rec in (ex.run_coherent(1.5, 1.7), ex.run_fock(4, 2.5), ex.run_qubit(1.3)):
        assert 0 <= rec.numeric["probability"] <= 1
        assert 0 <= 1 - rec.residuals["fidelity_deficit"] <= 1


def test_failures_carry_diagnostics():
    rec = ex.run_coherent(2.0, 3.0, 30)
    assert not rec.passed
    assert any("tolerance" in f for f in rec.failures)


@pytest.mark.parametrize(
    "run, state, args",
    [
        (ex.run_coherent, coherent(1.0), (1.0, 2.0)),
        (ex.run_coherent, coherent(2.0), (2.0, 3.0)),
        (ex.run_fock, fock(3, 4), (3, 2.0)),
        (ex.run_qubit, fock(1, 2), (1.5,)),
    ],
)
def test_residuals_do_not_grow_with_dim(run, state, args):
    g = args[-1]
    d = npa_dim(state, g)
    recs = [run(*args, dim=dd) for dd in (d, math.ceil(1.25 * d), math.ceil(1.5 * d))]
    for a, b in zip(recs, recs[1:]):
        for k in a.residuals:
            assert b.residuals[k] <= a.residuals[k] + 1e-10


def test_wall_time_excluded_from_dict():
    rec = ex.run_fock(1, 2.0)
    assert rec.wall_time >= 0
    assert "wall_time" not in rec.to_dict()
    assert np.isfinite(rec.wall_time)
