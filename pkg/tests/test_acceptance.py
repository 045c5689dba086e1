"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[acceptance] criterion N PASS|FAIL`` line that is
visible in ``pytest -v`` output even though stdout is captured.
"""

from contextlib import contextmanager

import numpy as np
import pytest

from reference_bases import OFF_DIAGONALS, VECTORS, corrected_basis
from qprotractor.entangle import embed, partial_trace
from qprotractor.metrology import (
    SignalParams,
    discrete_success_probability,
    fit_signal,
    m_vector,
    prepare_protractor_sequence,
    protractor_target,
    rotation_sweep,
    simulate_discrimination,
    synthesize_signal,
)
from qprotractor.protractor import (
    all_known_protractors,
    anticoherent_spin3,
    catalogue_size,
    known_phases,
    known_protractor,
    orthogonal_family,
    overlap_curve,
    protractor_rank,
)
from qprotractor.search import RECORDED_MARGINS, SearchConfig, objective, search_perfect
from qprotractor.spinalg import (
    HalfInt,
    align_phase,
    angular_momentum,
    casimir,
    commutator,
    eigenbasis_matrix,
    haar_amplitudes,
    rotation,
    spins_up_to,
)
from qprotractor.uncertainty import (
    batch_entropy_sums,
    batch_means,
    batch_variances,
    entropy_sum,
    halfspin_certainty_bound,
    pythagorean_means,
    variance_bound,
)

SPINS = list(spins_up_to(7))
SEEDS = (0, 1, 2)


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def report(number: int, label: str):
        passed = False
        try:
            yield
            passed = True
        finally:
            with capsys.disabled():
                print(f"\n[acceptance] criterion {number} {'PASS' if passed else 'FAIL'}: {label}")

    return report


def test_criterion_1_operator_algebra(criterion):
    with criterion(1, "commutators, Casimir and printed eigenbases within 1e-10"):
        for j in SPINS:
            jx, jy, jz = (angular_momentum(j, a) for a in "xyz")
            for a, b, c in [(jx, jy, jz), (jy, jz, jx), (jz, jx, jy)]:
                assert np.max(np.abs(commutator(a, b) - 1j * c)) < 1e-10
            assert np.max(np.abs(casimir(j) - j.j * (j.j + 1) * np.eye(j.dim))) < 1e-10
        for twice_j, (pref, entries) in OFF_DIAGONALS.items():
            upper = pref * np.array(entries)
            jx = angular_momentum(HalfInt(twice_j), "x")
            assert np.max(np.abs(jx - np.diag(upper, 1) - np.diag(upper, -1))) < 1e-10
        for (twice_j, axis) in VECTORS:
            ours = eigenbasis_matrix(HalfInt(twice_j), axis)
            for k, printed in enumerate(corrected_basis(twice_j, axis)):
                # entrywise after removing the global phase freedom of each eigenvector
                assert np.max(np.abs(align_phase(ours[:, k], printed) - printed)) < 1e-10


def test_criterion_2_catalogue_verification(criterion):
    with criterion(2, "catalogue states are rank 3; j=7/2 phases reach f >= -1e-6"):
        assert (catalogue_size(1), catalogue_size("3/2"), catalogue_size(3)) == (4, 8, 1)
        for j, variant, state in all_known_protractors():
            if j.twice_j == 7:
                continue
            report = protractor_rank(state, 1e-10)
            assert report.rank == 3
            for axis in "xyz":
                assert report.per_axis[axis].max_prob_deviation < 1e-10
                assert orthogonal_family(state, axis).residual < 1e-9
        assert objective("7/2", known_phases("7/2")) >= -1e-6
        assert protractor_rank(known_protractor("7/2"), 1e-3).rank == 3


def test_criterion_3_search_recovery(criterion):
    with criterion(3, "search finds f=0 for j in {1,3/2,3}; stays below -margin/2 for {1/2,2,5/2}"):
        for seed in SEEDS:
            for twice_j in (2, 3, 6):
                res = search_perfect(SearchConfig(HalfInt(twice_j), starts=256, seed=seed))
                assert res.best_objective >= -1e-9, (twice_j, seed, res.best_objective)
            for twice_j in (1, 4, 5):
                res = search_perfect(SearchConfig(HalfInt(twice_j), starts=1024, seed=seed))
                assert res.best_objective <= -RECORDED_MARGINS[twice_j] / 2, (twice_j, seed)


def test_criterion_4_uncertainty_saturation(criterion):
    with criterion(4, "catalogue saturates entropy and variance-mean bounds; Haar ensembles respect them"):
        for j, variant, state in all_known_protractors():
            if j.twice_j == 7:
                continue
            assert entropy_sum(state) == pytest.approx(3 * np.log(j.dim), abs=1e-9)
            means = pythagorean_means(state)
            for value in (means.arithmetic, means.geometric, means.harmonic):
                assert value == pytest.approx(variance_bound(j), abs=1e-10)
        for twice_j in range(1, 7):
            j = HalfInt(twice_j)
            amps = haar_amplitudes(j, 10_000, np.random.default_rng(400 + twice_j))
            means = batch_means(batch_variances(j, amps))
            bound = variance_bound(j)
            assert np.max(means["arithmetic"]) <= bound + 1e-8
            assert np.max(means["geometric"]) <= bound + 1e-8
            assert np.nanmax(means["harmonic"]) <= bound + 1e-8


def test_criterion_5_spin_half_certainty(criterion):
    with criterion(5, "1e5 Haar spin-1/2 states stay below the certainty bound"):
        bound = (3 * np.log(6) - np.sqrt(3) * np.log(2 + np.sqrt(3))) / 2
        assert halfspin_certainty_bound() == pytest.approx(bound, abs=1e-15)
        sums = batch_entropy_sums("1/2", haar_amplitudes("1/2", 100_000, np.random.default_rng(5)))
        assert np.max(sums) <= bound + 1e-9


def spin3_reduction_reference():
    a = (3 * np.sqrt(6) + 2 * np.sqrt(10)) / 70
    c = a / np.sqrt(2)
    w = np.exp(1j * np.pi / 4)
    return np.array([
        [0.25, a * w**-3, 1j * c, 0],
        [a * w**3, 0.25, 0, 1j * c],
        [-1j * c, 0, 0.25, a * w],
        [0, -1j * c, a / w, 0.25],
    ])


def test_criterion_6_entanglement(criterion):
    with criterion(6, "qubit reductions are I/2; spin-3 reduction matches the closed form"):
        half = np.eye(2) / 2
        composite = embed(known_protractor(1), ["1/2", "1/2"])
        for keep in (0, 1):
            assert np.max(np.abs(partial_trace(composite, [2, 2], [keep]).entries - half)) < 1e-10
        for variant in range(catalogue_size("3/2")):
            composite = embed(known_protractor("3/2", variant), ["1/2"] * 3)
            for keep in range(3):
                assert np.max(np.abs(partial_trace(composite, [2, 2, 2], [keep]).entries - half)) < 1e-10
        composite = embed(known_protractor(3), ["3/2", "3/2"])
        rho = partial_trace(composite, [4, 4], [0]).entries
        assert np.max(np.abs(rho - spin3_reduction_reference())) < 1e-10


def test_criterion_7_discrete_discrimination(criterion):
    with criterion(7, "p_succ = d/n with equal per-angle terms; Monte Carlo within 3 sigma"):
        probes = {3: known_protractor(1), 7: known_protractor(3)}
        for d, n in [(3, 3), (3, 4), (3, 6), (7, 7), (7, 14)]:
            for axis in "xyz":
                res = discrete_success_probability(probes[d], axis, n)
                assert abs(res.probability - d / n) < 1e-10
                assert np.max(np.abs(res.terms - d / n)) < 1e-10
            sim = simulate_discrimination(probes[d], "z", n, 100_000, seed=n)
            sigma = np.sqrt((d / n) * (1 - d / n) / sim.trials)
            assert abs(sim.rate - d / n) <= 3 * sigma + 1e-12


def test_criterion_8_experiment_model(criterion):
    with criterion(8, "preparation, rotation circles, signal round trip and overlap curves"):
        target = protractor_target()
        assert abs(np.vdot(target.amplitudes, prepare_protractor_sequence().amplitudes)) > 1 - 1e-10
        for k in "xyz":
            rows = rotation_sweep(target, k)
            assert rows.shape[0] == 34
            assert np.max(np.abs(np.hypot(rows[:, 1], rows[:, 2]) - 2 / 3)) < 1e-9
        params = SignalParams()
        m = m_vector(target)
        fit = fit_signal(synthesize_signal(m, params), params)
        assert np.max(np.abs(fit.m.as_array() - m.as_array())) < 1e-9
        phis = np.linspace(0, 2 * np.pi, 1000)
        anti = anticoherent_spin3()
        proto = known_protractor(3)
        footnote = (1 + 2 * sum(np.cos(m * phis) for m in (1, 2, 3))) ** 2 / 49
        for axis in "xyz":
            # distribution route and explicit rotation route
            assert np.max(np.abs(overlap_curve(anti, axis, phis) - np.cos(2 * phis) ** 2)) < 1e-10
            assert np.max(np.abs(overlap_curve(proto, axis, phis) - footnote)) < 1e-10
            direct = np.array([abs(np.vdot(proto.amplitudes, rotation(3, axis, p) @ proto.amplitudes)) ** 2 for p in phis])
            assert np.max(np.abs(direct - footnote)) < 1e-10
