import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reference_bases import corrected_basis
from qprotractor.errors import NonexistenceProven, NotCatalogued, ValidationError
from qprotractor.protractor import (
    SPIN72_FREE_PHASES,
    PhaseVector,
    all_known_protractors,
    anticoherent_spin3,
    axis_distribution,
    canonicalize,
    catalogue_size,
    catalogue_tolerance,
    cross_product_eigenstate,
    gauge_index,
    is_optimal,
    known_phases,
    known_protractor,
    max_uniform_deviation,
    orthogonal_family,
    overlap_curve,
    protractor_rank,
    spin2_rank2_example,
    uniform_overlap,
    uniform_state,
    wrap_phase,
)
from qprotractor.spinalg import HalfInt, PureState, haar_state, rotation, same_up_to_phase, spins_up_to

SPINS = list(spins_up_to(7))
CATALOGUE = list(all_known_protractors())


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def spin1_experiment_state():
    return PureState(HalfInt(2), np.array([np.exp(3j * np.pi / 4), 1, np.exp(1j * np.pi / 4)]) / np.sqrt(3))


# --- distributions and optimality ------------------------------------------------


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_basis_state_distribution_is_indicator(j):
    for k, m in enumerate(j.ms()):
        p = axis_distribution(PureState.basis_state(j, m), "z")
        np.testing.assert_allclose(p, np.eye(j.dim)[k], atol=1e-15)


def test_experiment_state_is_uniform_in_z():
    np.testing.assert_allclose(axis_distribution(spin1_experiment_state(), "z"), [1 / 3] * 3, atol=1e-15)


@pytest.mark.parametrize("twice_j", range(1, 8))
@pytest.mark.parametrize("axis", ["x", "y"])
def test_distribution_matches_printed_basis_projection(twice_j, axis):
    j = HalfInt(twice_j)
    s = haar_state(j, np.random.default_rng(twice_j))
    brute = np.array([abs(np.vdot(v, s.amplitudes)) ** 2 for v in corrected_basis(twice_j, axis)])
    p = axis_distribution(s, axis)
    assert np.max(np.abs(p - brute)) < 1e-12
    assert abs(p.sum() - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPINS), st.integers(0, 2**32 - 1))
def test_uniform_phase_state_is_optimal_about_its_axis(j, seed):
    rng = np.random.default_rng(seed)
    n = unit(rng.normal(size=3))
    s = uniform_state(j, rng.uniform(-np.pi, np.pi, j.dim), n)
    assert is_optimal(s, n)


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_highest_weight_is_not_optimal_about_z(j):
    assert not is_optimal(PureState.basis_state(j, j.j), "z")


def test_spin2_rank2_example():
    s = spin2_rank2_example()
    assert is_optimal(s, "z") and is_optimal(s, "x")
    assert not is_optimal(s, "y")
    assert protractor_rank(s).rank == 2


# --- orthogonal families ---------------------------------------------------------


def test_spin1_family_is_orthonormal():
    fam = orthogonal_family(known_protractor(1), "z")
    assert len(fam.states) == 3
    assert fam.residual < 1e-10


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_highest_weight_family_is_degenerate(j):
    fam = orthogonal_family(PureState.basis_state(j, j.j), "z")
    assert fam.residual == pytest.approx(1.0, abs=1e-12)


def test_spin32_first_row_family_about_x():
    # independent construction of the first table row
    a = np.arcsin(1 / np.sqrt(3))
    phi_dd, phi_d = np.pi / 4, a
    amps = np.exp(1j * np.array([0, phi_dd + phi_d + np.pi, phi_d, phi_dd])) / 2
    s = PureState(HalfInt(3), amps)
    copies = np.column_stack([rotation(s.j, "x", 2 * np.pi * k / 4) @ amps for k in range(4)])
    gram = copies.conj().T @ copies
    assert np.max(np.abs(gram - np.eye(4))) < 1e-9
    assert orthogonal_family(s, "x").residual < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SPINS), st.integers(0, 2**32 - 1), st.floats(0, 0.5))
def test_uniformity_and_orthogonality_bound_each_other(j, seed, eps):
    rng = np.random.default_rng(seed)
    base = uniform_state(j, rng.uniform(-np.pi, np.pi, j.dim), "z").amplitudes
    kick = rng.normal(size=j.dim) + 1j * rng.normal(size=j.dim)
    s = PureState.from_amplitudes(base + eps * kick, normalize=True)
    dev = max_uniform_deviation(axis_distribution(s, "z"))
    res = orthogonal_family(s, "z").residual
    # G_0k is the discrete Fourier transform of p, so each controls the other
    assert dev <= res + 1e-12
    assert res <= j.dim * dev + 1e-12
    if dev <= 1e-10:
        assert res < 1e-8
    if res < 1e-10:
        assert dev < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SPINS), st.integers(0, 2**32 - 1), st.floats(-20, 20))
def test_optimality_survives_rotation_about_same_axis(j, seed, theta):
    rng = np.random.default_rng(seed)
    n = unit(rng.normal(size=3))
    s = uniform_state(j, rng.uniform(-np.pi, np.pi, j.dim), n)
    rotated = PureState(j, rotation(j, n, theta) @ s.amplitudes)
    assert is_optimal(rotated, n, 1e-10)


# --- rank -----------------------------------------------------------------------


def test_spin1_catalogue_state_is_perfect():
    r = protractor_rank(uniform_state(1, [np.pi / 4, 0, 3 * np.pi / 4]))
    assert r.rank == 3 and r.perfect


def test_spin_half_up_has_rank_two():
    # |up>_z is the J_z = (x cross y).J eigenstate: uniform over the x and y bases, sharp in z
    r = protractor_rank(PureState.basis_state("1/2", "1/2"))
    assert r.per_axis["x"].optimal and r.per_axis["y"].optimal
    assert not r.per_axis["z"].optimal
    assert r.rank == 2


def test_spin_one_highest_weight_has_rank_zero():
    assert protractor_rank(PureState.basis_state(1, 1)).rank == 0


@pytest.mark.parametrize("n, m", [((1, 0, 0), (0, 1, 0)), ((0, 1, 0), (0, 0, 1)), ((0, 0, 1), (1, 0, 0))])
def test_cross_product_eigenstate_rank_two_for_spin_half(n, m):
    for index in (0, 1):
        s = cross_product_eigenstate(n, m, HalfInt(1), index)
        r = protractor_rank(s)
        assert r.rank == 2
        assert r.per_axis["xyz"[int(np.argmax(np.abs(np.cross(n, m))))]].optimal is False


def test_report_invariants_and_dict():
    for _, _, s in CATALOGUE:
        rep = protractor_rank(s, 1e-5)
        assert rep.rank == sum(a.optimal for a in rep.per_axis.values())
        assert rep.perfect == (rep.rank == 3)
        for a in rep.per_axis.values():
            assert abs(a.distribution.sum() - 1) < 1e-12
    d = protractor_rank(known_protractor(1)).to_dict()
    assert d["rank"] == 3 and d["perfect"] and set(d["per_axis"]) == {"x", "y", "z"}


# --- catalogue ------------------------------------------------------------------


def test_catalogue_counts():
    assert [catalogue_size(j) for j in ("1", "3/2", "3", "7/2")] == [4, 8, 1, 1]


@pytest.mark.parametrize("j, variant, s", CATALOGUE, ids=lambda v: str(v) if not isinstance(v, PureState) else "")
def test_catalogue_entries_are_perfect(j, variant, s):
    rep = protractor_rank(s, catalogue_tolerance(j))
    assert rep.perfect
    assert s.metadata["variant"] == variant


def test_spin1_variant0_amplitudes():
    expected = np.array([np.exp(1j * np.pi / 4), 1, np.exp(3j * np.pi / 4)]) / np.sqrt(3)
    assert np.max(np.abs(known_protractor(1, 0).amplitudes - expected)) < 1e-15


def test_spin1_catalogue_is_the_correlated_sign_family():
    q = np.pi / 4
    found = {tuple(np.round(known_phases(1, v).phases[[0, 2]] / q).astype(int)) for v in range(4)}
    assert found == {(1, 3), (-1, -3), (3, 1), (-3, -1)}
    for up, down in itertools.product([q, -q, 3 * q, -3 * q], repeat=2):
        perfect = protractor_rank(uniform_state(1, [up, 0, down])).perfect
        assert perfect == ((round(up / q), round(down / q)) in found)


def test_spin1_experiment_state_is_in_catalogue():
    assert any(same_up_to_phase(known_protractor(1, v), spin1_experiment_state()) for v in range(4))


def test_spin32_table_relations():
    a = np.arcsin(1 / np.sqrt(3))
    rows = [known_phases("3/2", v).phases for v in range(8)]
    assert len({tuple(np.round(r, 12)) for r in rows}) == 8
    for phases in rows:
        up, down, ddown = phases[1], phases[2], phases[3]
        assert abs(wrap_phase(up - (ddown + down + np.pi))) < 1e-12
        assert min(abs(wrap_phase(down - c)) for c in (a, np.pi - a, -a, a - np.pi)) < 1e-12
    first = rows[0]
    assert first[3] == pytest.approx(np.pi / 4) and first[2] == pytest.approx(a)


def test_spin3_closed_form():
    theta = 0.5 * np.arctan(np.sqrt(15))
    phases = known_phases(3).phases
    # m = 2 carries pi/4 and m = -2 carries -pi/4, the others follow theta
    assert phases[1] == pytest.approx(np.pi / 4)
    assert phases[5] == pytest.approx(-np.pi / 4)
    assert phases[0] == pytest.approx(-theta - np.pi / 4)
    assert phases[2] == pytest.approx(theta + 3 * np.pi / 4)
    assert phases[3] == 0.0


def test_spin72_uses_printed_phases():
    phases = known_phases("7/2").phases
    ms = HalfInt(7).ms()
    for label, value in SPIN72_FREE_PHASES.items():
        k = int(np.flatnonzero(ms == float(eval(label)))[0])
        assert phases[k] == pytest.approx(value, abs=1e-12)
    assert protractor_rank(known_protractor("7/2"), 1e-5).perfect
    # the printed 8-digit phases limit precision; uniformity still holds well below 1e-5
    assert max(r.max_prob_deviation for r in protractor_rank(known_protractor("7/2")).per_axis.values()) < 1e-8


@pytest.mark.parametrize("j", ["1/2", "2", "5/2"])
def test_nonexistent_spins_raise(j):
    with pytest.raises(NonexistenceProven):
        known_protractor(j)


@pytest.mark.parametrize("j", ["0", "4", "9/2", "5"])
def test_uncatalogued_spins_raise(j):
    with pytest.raises(NotCatalogued):
        known_protractor(j)


def test_variant_out_of_range():
    with pytest.raises(NotCatalogued):
        known_protractor(1, 4)


# --- phase vectors ---------------------------------------------------------------


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_phase_vector_gauge(j):
    rng = np.random.default_rng(j.twice_j)
    pv = PhaseVector(j, rng.uniform(-10, 10, j.dim))
    assert pv.phases[gauge_index(j)] == 0.0
    assert np.all(pv.phases > -np.pi) and np.all(pv.phases <= np.pi)
    assert np.allclose(PhaseVector.from_free(j, pv.free()).phases, pv.phases)
    with pytest.raises(ValidationError):
        PhaseVector(j, np.zeros(j.dim + 1))


def test_gauge_index_convention():
    assert gauge_index(1) == 1 and gauge_index(3) == 3
    assert gauge_index("3/2") == 0 and gauge_index("7/2") == 0


def test_canonicalize_makes_gauge_amplitude_real():
    s = PureState(HalfInt(2), np.exp(0.7j) * known_protractor(1).amplitudes)
    c = canonicalize(s)
    assert abs(c.amplitudes[1].imag) < 1e-15 and c.amplitudes[1].real > 0
    assert same_up_to_phase(c, s)


# --- overlap curves --------------------------------------------------------------


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_anticoherent_spin3_curve_is_cos_squared(axis):
    s = anticoherent_spin3()
    phis = np.linspace(0, 2 * np.pi, 1000)
    assert overlap_curve(s, axis, [np.pi / 4])[0] < 1e-15
    assert np.max(np.abs(overlap_curve(s, axis, phis) - np.cos(2 * phis) ** 2)) < 1e-10


def test_anticoherent_spin3_is_isotropic_only_to_second_order():
    # <J_n^2> is 4 along every axis, so F = 1 - 4 phi^2 + O(phi^4) everywhere,
    # but off the coordinate axes the full curve is not cos^2(2 phi)
    s = anticoherent_spin3()
    n = unit([1, 2, 3])
    small = 1e-3
    assert overlap_curve(s, n, [small])[0] == pytest.approx(1 - 4 * small**2, abs=1e-10)
    assert overlap_curve(s, n, [np.pi / 4])[0] > 1e-2


def test_spin3_protractor_curve():
    s = known_protractor(3)
    phis = np.linspace(0, 2 * np.pi, 1000)
    footnote = (1 + 2 * sum(np.cos(m * phis) for m in (1, 2, 3))) ** 2 / 49
    for axis in "xyz":
        assert np.max(np.abs(overlap_curve(s, axis, phis) - footnote)) < 1e-10
        assert overlap_curve(s, axis, [2 * np.pi / 7])[0] < 1e-15
    assert np.max(np.abs(uniform_overlap(3, phis) - footnote)) < 1e-12


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_overlap_curve_matches_direct_rotation(j):
    s = haar_state(j, np.random.default_rng(7))
    n = unit([0.2, 0.5, -0.4])
    phis = np.linspace(-3, 3, 13)
    direct = [abs(np.vdot(s.amplitudes, rotation(j, n, p) @ s.amplitudes)) ** 2 for p in phis]
    curve = overlap_curve(s, n, phis)
    assert np.max(np.abs(curve - direct)) < 1e-12
    assert curve[6] == pytest.approx(1.0)
    assert np.all((curve >= 0) & (curve <= 1))
