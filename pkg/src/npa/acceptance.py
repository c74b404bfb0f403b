"""Exit criteria for the package, runnable from the CLI (``verify-all``) and pytest."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytics
from .experiments import (
    run_cat_comparison,
    run_coherent,
    run_fock,
    run_operator_equivalence,
    run_qubit,
)
from .fock import SingleModeState, fidelity
from .heralding import bs_attenuate, npa_attenuate, npa_dim
from .states import cat, coherent, fock, single_rail_qubit

COHERENT_GRID = [(a, g) for a in (0.5, 1.0, 2.0) for g in (1.2, 2.0, 3.0)]
FOCK_GRID = [(n, g) for n in range(6) for g in (1.5, 2.0, 3.0)]
QUBIT_GAINS = (1.2, 1.5, 2.0, 3.0)
OPERATOR_GAINS = (1.2, 2.0, 3.0)
EQUIVALENCE_GAINS = (1.5, 2.0)
EQUIVALENCE_SEED = 20170725
IDENTITY_TOL = 1e-12
SERIES_TOL = 1e-12
CONVERGENCE_SLACK = 1e-10


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    records: list = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.title}: {self.detail}"


def _worst(records, key):
    return max(r.residuals[key] for r in records)


def coherent_attenuation() -> CriterionResult:
    recs = [run_coherent(a, g) for a, g in COHERENT_GRID]
    spot = next(r for r in recs if r.inputs["alpha"] == [1.0, 0.0] and r.inputs["g"] == 2.0)
    p = spot.numeric["probability"]
    spot_ok = abs(p - 0.118092) <= 5e-7
    ok = all(r.passed for r in recs) and spot_ok
    detail = (f"worst fidelity deficit {_worst(recs, 'fidelity_deficit'):.2e}, "
              f"worst P rel error {_worst(recs, 'probability_rel'):.2e}, "
              f"P(alpha=1, g=2) = {p:.6f}")
    return CriterionResult(1, "coherent-state attenuation", ok, detail, recs)


def fock_attenuation() -> CriterionResult:
    recs = [run_fock(n, g) for n, g in FOCK_GRID]
    spot = next(r for r in recs if r.inputs["n"] == 2 and r.inputs["g"] == 2.0)
    amp = spot.numeric["amplitude"][0]
    ok = all(r.residuals["amplitude"] <= 1e-9 for r in recs) and abs(amp - 0.125) <= 1e-9
    detail = f"worst amplitude residual {_worst(recs, 'amplitude'):.2e}, amp(n=2, g=2) = {amp:.12f}"
    return CriterionResult(2, "Fock-state factor", ok, detail, recs)


def qubit_attenuation() -> CriterionResult:
    recs = [run_qubit(g) for g in QUBIT_GAINS]
    spot = next(r for r in recs if r.inputs["g"] == 2.0)
    p = spot.numeric["probability"]
    ok = (
        all(r.residuals["probability"] <= 1e-9 and r.residuals["ratio"] <= 1e-9 for r in recs)
        and abs(p - 5 / 32) <= 1e-9
    )
    detail = (f"worst P residual {_worst(recs, 'probability'):.2e}, "
              f"worst ratio residual {_worst(recs, 'ratio'):.2e}, P(g=2) = {p:.12f}")
    return CriterionResult(3, "single-rail qubit", ok, detail, recs)


def operator_identity() -> CriterionResult:
    recs = [run_operator_equivalence(math.acosh(g), (60, 60), 0.4) for g in OPERATOR_GAINS]
    ok = all(r.passed for r in recs)
    diffs = ", ".join(f"g={g}: {r.residuals['column_difference']:.2e}"
                      for g, r in zip(OPERATOR_GAINS, recs))
    detail = (f"column differences ({diffs}); worst unitarity defect "
              f"{_worst(recs, 'unitarity_defect'):.2e}")
    return CriterionResult(4, "direct vs factored squeezer at 60x60", ok, detail, recs)


def identity_limit() -> CriterionResult:
    inputs = {
        "coherent": coherent(1.0),
        "fock": fock(3, 4),
        "qubit": single_rail_qubit(1 / math.sqrt(2), 1 / math.sqrt(2)),
        "cat": cat(1.0, 1),
    }
    worst = 0.0
    for state in inputs.values():
        out = npa_attenuate(state, 1.0)
        worst = max(worst, abs(1 - fidelity(out.normalized, state)), abs(1 - out.probability))
    return CriterionResult(5, "g = 1 identity", worst <= IDENTITY_TOL,
                           f"worst deviation {worst:.2e} over {', '.join(inputs)}")


def random_state(rng, dim) -> SingleModeState:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return SingleModeState(v / np.linalg.norm(v))


def conditional_equivalence(n_states=50, dim=16) -> CriterionResult:
    rng = np.random.default_rng(EQUIVALENCE_SEED)
    states = [random_state(rng, dim) for _ in range(n_states)]
    worst_f = worst_p = 0.0
    for g in EQUIVALENCE_GAINS:
        for psi in states:
            npa = npa_attenuate(psi, g)
            bs = bs_attenuate(psi, 1.0 / g)
            worst_f = max(worst_f, 1 - fidelity(npa.normalized, bs.normalized))
            ref = bs.probability / g**2
            worst_p = max(worst_p, abs(npa.probability - ref) / ref)
    ok = worst_f <= 1e-8 and worst_p <= 1e-6
    return CriterionResult(6, "parametric vs beam-splitter heralding", ok,
                           f"{n_states} states x {len(EQUIVALENCE_GAINS)} gains, worst fidelity "
                           f"deficit {worst_f:.2e}, worst P rel error {worst_p:.2e}")


def cat_contrast() -> CriterionResult:
    rec = run_cat_comparison(1.0, 2.0)
    coh = rec.numeric["unheralded_coherence"]
    ok = rec.passed and abs(coh - 0.223130) <= 1e-6
    detail = (f"heralded purity {rec.numeric['heralded_purity']:.12f}, heralded fidelity "
              f"{rec.numeric['heralded_fidelity']:.12f}, unheralded coherence {coh:.6f}, "
              f"unheralded purity {rec.numeric['unheralded_purity']:.6f}")
    return CriterionResult(7, "cat-state coherence contrast", ok, detail, [rec])


def series_identity() -> CriterionResult:
    worst = 0.0
    for alpha in np.linspace(0, 2, 9):
        for g in np.linspace(1, 3, 9):
            lhs = analytics.poisson_weighted_fock_success(alpha, g)
            worst = max(worst, abs(lhs - analytics.coherent_success(alpha, g)))
    return CriterionResult(8, "Poisson-weighted Fock factors vs coherent success", worst <= SERIES_TOL,
                           f"worst deviation {worst:.2e} over alpha in [0, 2], g in [1, 3]")


def _residual_growth(base, bigger):
    return max(bigger.residuals[k] - base.residuals[k] for k in base.residuals)


def truncation_convergence() -> CriterionResult:
    pairs = []
    for a, g in COHERENT_GRID:
        d = npa_dim(coherent(a), g)
        pairs.append((run_coherent(a, g, d), run_coherent(a, g, math.ceil(1.5 * d))))
    for n, g in FOCK_GRID:
        d = npa_dim(fock(n, n + 1), g)
        pairs.append((run_fock(n, g, d), run_fock(n, g, math.ceil(1.5 * d))))
    for g in QUBIT_GAINS:
        d = npa_dim(single_rail_qubit(1 / math.sqrt(2), 1 / math.sqrt(2)), g)
        pairs.append((run_qubit(g, d), run_qubit(g, math.ceil(1.5 * d))))
    growth = max(_residual_growth(a, b) for a, b in pairs)
    ok = growth <= CONVERGENCE_SLACK and all(b.passed for _, b in pairs)
    return CriterionResult(9, "truncation convergence (dim x1.5)", ok,
                           f"{len(pairs)} scenario points, largest residual growth {growth:.2e}",
                           [b for _, b in pairs])


CRITERIA = [
    coherent_attenuation,
    fock_attenuation,
    qubit_attenuation,
    operator_identity,
    identity_limit,
    conditional_equivalence,
    cat_contrast,
    series_identity,
    truncation_convergence,
]


def verify_all() -> list:
    return [criterion() for criterion in CRITERIA]
