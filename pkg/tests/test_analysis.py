import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhlattice import (
    ChainSpec,
    DefectSpec,
    ExcitationSpec,
    StateVector,
    build_chain_hamiltonian,
    centroid,
    centroid_velocity,
    evolve_exact,
    evolve_rk4,
    fit_gaussian,
    group_velocity,
    make_excitation,
    measure_reflection,
    region_norm_fraction,
    storage_efficiency,
)

NH = dict(kappa=1.0, beta=0.4, gamma=0.8)
FIG4_PACKET = ExcitationSpec(kind="gaussian", n0=-30, w0=5.0, q0=-math.pi / 2)


# ---------------------------------------------------------------- excitations


def test_single_site_excitation():
    labels = np.arange(-5, 6)
    c = make_excitation(ExcitationSpec(kind="single_site", n0=0), labels)
    expected = np.zeros(11)
    expected[5] = 1.0
    assert np.array_equal(c.amplitudes, expected)


def test_gaussian_excitation_normalized_and_shaped():
    labels = np.arange(-80, 21)
    c = make_excitation(FIG4_PACKET, labels)
    assert c.norm == pytest.approx(1.0, abs=1e-12)
    # envelope follows exp(-(n-n0)^2/w0^2) with carrier q0*n
    mags = np.abs(c.amplitudes)
    envelope = np.exp(-((labels + 30.0) / 5.0) ** 2)
    envelope /= math.sqrt(np.sum(envelope**2))
    assert np.allclose(mags, envelope, atol=1e-12)


def test_gaussian_zero_carrier_real_symmetric():
    labels = np.arange(-40, 41)
    c = make_excitation(ExcitationSpec(kind="gaussian", n0=0, w0=5.0, q0=0.0), labels)
    assert np.allclose(c.amplitudes.imag, 0.0)
    assert np.all(c.amplitudes.real > 0)
    assert np.allclose(c.amplitudes, c.amplitudes[::-1])


def test_gaussian_unnormalized_matches_formula():
    labels = np.arange(-60, 11)
    spec = ExcitationSpec(kind="gaussian", n0=-30, w0=5.0, q0=-math.pi / 2, normalize=False)
    c = make_excitation(spec, labels)
    direct = np.exp(-((labels + 30.0) / 5.0) ** 2 + 1j * spec.q0 * labels)
    assert np.array_equal(c.amplitudes, direct)


def test_excitation_clearance_warning():
    labels = np.arange(-10, 11)
    with pytest.warns(UserWarning, match="clearance"):
        make_excitation(ExcitationSpec(kind="gaussian", n0=0, w0=5.0, q0=0.0), labels)


def test_excitation_out_of_range():
    with pytest.raises(ValueError):
        make_excitation(ExcitationSpec(kind="single_site", n0=99), np.arange(-5, 6))


# ---------------------------------------------------------------- centroid


def test_centroid_delta():
    labels = np.arange(0, 11)
    amps = np.zeros(11, dtype=complex)
    amps[7] = 2.0j
    assert centroid(StateVector(amps, labels)) == pytest.approx(7.0)


def test_centroid_symmetric_gaussian():
    labels = np.arange(-80, 21)
    c = make_excitation(ExcitationSpec(kind="gaussian", n0=-30, w0=5.0, q0=1.0), labels)
    assert centroid(c) == pytest.approx(-30.0, abs=1e-6)


def test_centroid_two_site_balance():
    c = StateVector(np.array([1.0, 0.0, 1.0j]), np.array([-1, 0, 1]))
    assert centroid(c) == pytest.approx(0.0)


@given(st.integers(0, 9))
def test_centroid_within_label_range(seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=13) + 1j * rng.normal(size=13)
    labels = np.arange(-6, 7)
    value = centroid(StateVector(amps, labels))
    assert labels[0] <= value <= labels[-1]


def test_centroid_velocity_stationary():
    h = build_chain_hamiltonian(ChainSpec(kappa=1, beta=0, gamma=0, phi=0, n_sites=9))
    zero_h = type(h)(dim=9, diag=np.zeros(9), upper=np.zeros(8), lower=np.zeros(8),
                     site_labels=h.site_labels)
    c0 = make_excitation(ExcitationSpec(kind="single_site", n0=4), h.site_labels)
    traj = evolve_exact(zero_h, c0, 3.0, 0.5)
    assert centroid_velocity(traj, (0.0, 3.0)) == pytest.approx(0.0, abs=1e-6)


def test_centroid_velocity_needs_enough_samples():
    h = build_chain_hamiltonian(ChainSpec(kappa=1, beta=0, gamma=0, phi=0, n_sites=9))
    c0 = make_excitation(ExcitationSpec(kind="single_site", n0=4), h.site_labels)
    traj = evolve_exact(h, c0, 3.0, 0.5)
    with pytest.raises(ValueError, match="need >= 5"):
        centroid_velocity(traj, (0.0, 1.0))


def _gaussian_run(phi, beta, gamma, defects=(), t_final=15.0, method="exact"):
    spec = ChainSpec(kappa=1.0, beta=beta, gamma=gamma, phi=phi, n_sites=133,
                     index_origin=-91, defects=defects)
    h = build_chain_hamiltonian(spec)
    exc = ExcitationSpec(kind="gaussian", n0=-25, w0=5.0, q0=-math.pi / 2)
    c0 = make_excitation(exc, spec.site_labels)
    if method == "exact":
        return evolve_exact(h, c0, t_final, 0.25)
    return evolve_rk4(h, c0, t_final, 1e-3, 0.25)


def test_packet_velocity_tracks_group_velocity():
    traj = _gaussian_run(math.pi / 2, 0.4, 0.8)
    v = centroid_velocity(traj, (2.0, 14.0))
    assert v == pytest.approx(group_velocity(1.0, -math.pi / 2), rel=0.05)


def test_packet_velocity_mirror_run():
    spec = ChainSpec(kappa=1.0, beta=0.4, gamma=0.8, phi=-math.pi / 2, n_sites=133,
                     index_origin=-41)
    h = build_chain_hamiltonian(spec)
    exc = ExcitationSpec(kind="gaussian", n0=25, w0=5.0, q0=math.pi / 2)
    traj = evolve_exact(h, make_excitation(exc, spec.site_labels), 15.0, 0.25)
    v = centroid_velocity(traj, (2.0, 14.0))
    assert v == pytest.approx(-2.0, rel=0.05)


# ---------------------------------------------------------------- regions


def test_region_fraction_full_range():
    labels = np.arange(-4, 5)
    rng = np.random.default_rng(0)
    c = StateVector(rng.normal(size=9) + 1j * rng.normal(size=9), labels)
    assert region_norm_fraction(c, (-4, 4)) == pytest.approx(1.0)


def test_region_fraction_disjoint_delta():
    labels = np.arange(-4, 12)
    amps = np.zeros(16, dtype=complex)
    amps[4] = 1.0
    c = StateVector(amps, labels)
    assert region_norm_fraction(c, (1, 10)) == 0.0


def test_region_fraction_half_split():
    # packet symmetric about the midpoint between sites -1 and 0
    labels = np.arange(-60, 60)
    amps = np.exp(-(((labels + 0.5) / 6.0) ** 2) + 0.4j * labels)
    c = StateVector(amps, labels)
    assert region_norm_fraction(c, (-60, -1)) == pytest.approx(0.5, abs=1e-3)
    assert region_norm_fraction(c, (0, 59)) == pytest.approx(0.5, abs=1e-3)


def test_region_fraction_empty_region():
    c = StateVector(np.ones(5, dtype=complex), np.arange(5))
    with pytest.raises(ValueError, match="no sites"):
        region_norm_fraction(c, (10, 20))


def test_fraction_partition_sums_to_one():
    labels = np.arange(-20, 21)
    rng = np.random.default_rng(5)
    c = StateVector(rng.normal(size=41) + 1j * rng.normal(size=41), labels)
    total = (region_norm_fraction(c, (-20, -8)) + region_norm_fraction(c, (-7, 7))
             + region_norm_fraction(c, (8, 20)))
    assert total == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------- reflection


def test_reflection_defect_free_hermitian_passage():
    traj = _gaussian_run(0.0, 0.0, 0.0)
    # packet has fully crossed the barrier position by the end of the run
    assert measure_reflection(traj, -5, 14.0) < 0.01


def test_reflection_hermitian_defects_substantial_vs_nonhermitian():
    defects = (DefectSpec(-5, 2.0, 0.0), DefectSpec(5, 2.0, 0.0))
    hermitian = _gaussian_run(0.0, 0.0, 0.0, defects=defects, t_final=22.0)
    nonherm = _gaussian_run(math.pi / 2, 0.4, 0.8, defects=defects, t_final=22.0)
    r_h = measure_reflection(hermitian, -5, 21.0)
    r_n = measure_reflection(nonherm, -5, 21.0)
    assert r_h > 0.1
    assert 0.0 <= r_n <= 1.0
    assert r_h / max(r_n, 1e-300) > 10.0


def test_reflection_bounds_and_time_window():
    traj = _gaussian_run(0.0, 0.0, 0.0, t_final=5.0)
    value = measure_reflection(traj, 0, 5.0)
    assert 0.0 <= value <= 1.0
    with pytest.raises(ValueError):
        measure_reflection(traj, 0, 99.0)


# ---------------------------------------------------------------- gaussian fit


def test_fit_recovers_exact_gaussian():
    labels = np.arange(-60, 61)
    c = make_excitation(ExcitationSpec(kind="gaussian", n0=7, w0=5.0, q0=-1.0), labels)
    fit = fit_gaussian(c)
    assert not fit.degenerate
    assert fit.width == pytest.approx(5.0, abs=1e-3)
    assert fit.center == pytest.approx(7.0, abs=1e-6)
    assert fit.fidelity > 0.999


def test_fit_delta_is_degenerate():
    amps = np.zeros(41, dtype=complex)
    amps[20] = 1.0
    fit = fit_gaussian(StateVector(amps, np.arange(-20, 21)))
    assert fit.degenerate
    assert fit.fidelity == 0.0


def test_fit_flat_profile_degenerate():
    c = StateVector(np.full(31, 0.3 + 0.1j), np.arange(31))
    fit = fit_gaussian(c)
    assert fit.degenerate
    assert fit.fidelity == 0.0


def test_fit_with_additive_noise():
    labels = np.arange(-60, 61).astype(float)
    rng = np.random.default_rng(42)
    clean = np.exp(-((labels - 3.0) / 6.0) ** 2)
    noisy = clean + 0.01 * rng.normal(size=len(labels))
    c = StateVector(np.abs(noisy).astype(complex), np.arange(-60, 61))
    fit = fit_gaussian(c)
    assert fit.width == pytest.approx(6.0, rel=0.05)
    assert 0.0 <= fit.fidelity <= 1.0


@given(w0=st.floats(2.0, 9.5), n0=st.integers(-20, 20))
@settings(max_examples=15)
def test_fit_fidelity_bounds(w0, n0):
    labels = np.arange(-60, 61)
    c = make_excitation(ExcitationSpec(kind="gaussian", n0=n0, w0=w0, q0=0.7), labels)
    fit = fit_gaussian(c)
    assert 0.0 <= fit.fidelity <= 1.0


# ---------------------------------------------------------------- efficiency


def _hermitian_traj():
    spec = ChainSpec(kappa=1.0, beta=0.0, gamma=0.0, phi=0.0, n_sites=81, index_origin=-40)
    h = build_chain_hamiltonian(spec)
    c0 = make_excitation(ExcitationSpec(kind="gaussian", n0=0, w0=4.0, q0=0.3), spec.site_labels)
    return evolve_exact(h, c0, 4.0, 0.5)


def test_efficiency_identity_case():
    traj = _hermitian_traj()
    full = (int(traj.site_labels[0]), int(traj.site_labels[-1]))
    assert storage_efficiency(traj, 0.0, 0.0, full, full) == pytest.approx(1.0)
    # lossless evolution keeps the full-range intensity
    assert storage_efficiency(traj, 0.0, 4.0, full, full) == pytest.approx(1.0, abs=1e-10)


def test_efficiency_phase_invariance_exact():
    traj = _hermitian_traj()
    full = (int(traj.site_labels[0]), int(traj.site_labels[-1]))
    base = storage_efficiency(traj, 0.0, 4.0, full, (2, 30))
    rotated = type(traj)(times=traj.times, amplitudes=1j * traj.amplitudes,
                         site_labels=traj.site_labels, norm_series=traj.norm_series,
                         method_tag=traj.method_tag, method_detail=traj.method_detail)
    assert storage_efficiency(rotated, 0.0, 4.0, full, (2, 30)) == base


def test_efficiency_scaling_behaviour():
    traj = _hermitian_traj()
    full = (int(traj.site_labels[0]), int(traj.site_labels[-1]))
    out = (2, 30)
    base = storage_efficiency(traj, 0.0, 4.0, full, out)
    scaled = type(traj)(times=traj.times, amplitudes=3.0 * traj.amplitudes,
                        site_labels=traj.site_labels,
                        norm_series=9.0 * traj.norm_series,
                        method_tag=traj.method_tag, method_detail=traj.method_detail)
    # the ratio is scale-free while the raw out-region intensity is quadratic
    assert storage_efficiency(scaled, 0.0, 4.0, full, out) == pytest.approx(base, rel=1e-12)
    raw_base = np.sum(np.abs(traj.amplitudes[-1]) ** 2)
    raw_scaled = np.sum(np.abs(scaled.amplitudes[-1]) ** 2)
    assert raw_scaled == pytest.approx(9.0 * raw_base, rel=1e-12)


def test_efficiency_zero_input_rejected():
    spec = ChainSpec(kappa=1.0, beta=0.0, gamma=0.0, phi=0.0, n_sites=21, index_origin=-10)
    h = build_chain_hamiltonian(spec)
    c0 = make_excitation(ExcitationSpec(kind="single_site", n0=0), spec.site_labels)
    traj = evolve_exact(h, c0, 1.0, 0.5)
    with pytest.raises(ValueError):
        # the initial state is exactly zero away from the kick site
        storage_efficiency(traj, 0.0, 1.0, (-10, -9), (0, 1))
