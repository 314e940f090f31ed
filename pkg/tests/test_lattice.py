import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nhlattice import (
    ChainSpec,
    DefectSpec,
    SandwichSpec,
    SawtoothSpec,
    adiabatic_reduce,
    build_chain_hamiltonian,
    build_sandwich_hamiltonian,
    build_sawtooth_hamiltonian,
    dispersion,
    group_velocity,
    reduce_phase,
)

from reference import dense_chain, dense_sandwich, dense_sawtooth

NH = dict(kappa=1.0, beta=0.4, gamma=0.8)

finite_phases = st.floats(-math.pi, math.pi)
small_rates = st.floats(0.0, 2.0)


# ---------------------------------------------------------------- chain


def test_chain_example_nonhermitian():
    h = build_chain_hamiltonian(ChainSpec(phi=math.pi / 2, n_sites=3, **NH))
    assert np.allclose(h.diag, [-0.8j, -0.8j, -0.8j], atol=1e-15)
    assert np.allclose(h.upper, [0.6, 0.6], atol=1e-15)
    assert np.allclose(h.lower, [1.4, 1.4], atol=1e-15)


def test_chain_example_hermitian_limit():
    h = build_chain_hamiltonian(ChainSpec(kappa=1, beta=0, gamma=0, phi=1.3, n_sites=4))
    dense = h.to_dense()
    assert np.array_equal(dense, dense.conj().T)
    assert h.is_hermitian
    assert np.allclose(np.diag(dense), 0)
    assert np.allclose(np.diag(dense, 1), 1.0)


def test_chain_example_defect_site():
    spec = ChainSpec(phi=math.pi / 2, n_sites=31, index_origin=0,
                     defects=(DefectSpec(10, 2.0, 0.0),), **NH)
    h = build_chain_hamiltonian(spec)
    assert h.diag[10] == pytest.approx(2.0 - 0.8j)
    assert np.allclose(np.delete(h.diag, 10), -0.8j)


def test_chain_rejects_bad_inputs():
    with pytest.raises(ValueError):
        ChainSpec(kappa=0.0, beta=0, gamma=0, phi=0, n_sites=4)
    with pytest.raises(ValueError):
        ChainSpec(kappa=1, beta=-0.1, gamma=0, phi=0, n_sites=4)
    with pytest.raises(ValueError):
        ChainSpec(kappa=1, beta=0, gamma=math.nan, phi=0, n_sites=4)
    with pytest.raises(ValueError):
        ChainSpec(kappa=1, beta=0, gamma=0, phi=0, n_sites=4,
                  defects=(DefectSpec(99, 1.0, 0.0),))
    with pytest.raises(ValueError):
        ChainSpec(kappa=1, beta=0, gamma=0, phi=0, n_sites=4,
                  defects=(DefectSpec(1, 1.0, 0.0), DefectSpec(1, 2.0, 0.0)))


def test_phase_stored_reduced():
    spec = ChainSpec(kappa=1, beta=0.2, gamma=0, phi=2 * math.pi + 0.3, n_sites=4)
    assert spec.phi == pytest.approx(0.3)
    assert reduce_phase(-math.pi) == math.pi
    assert reduce_phase(math.pi) == math.pi


def test_purely_dissipative_flag():
    assert ChainSpec(phi=0, n_sites=4, **NH).is_purely_dissipative
    assert not ChainSpec(kappa=1, beta=0.5, gamma=0.8, phi=0, n_sites=4).is_purely_dissipative


@given(
    beta=small_rates,
    gamma=st.floats(-1.0, 2.0),
    phi=finite_phases,
    n=st.integers(2, 12),
    periodic=st.booleans(),
)
def test_chain_matches_reference_dense(beta, gamma, phi, n, periodic):
    if periodic and n < 3:
        n = 3
    spec = ChainSpec(kappa=1.0, beta=beta, gamma=gamma, phi=phi, n_sites=n,
                     index_origin=-2, boundary="periodic" if periodic else "open")
    got = build_chain_hamiltonian(spec).to_dense()
    want = dense_chain(1.0, beta, gamma, spec.phi, list(spec.site_labels), periodic=periodic)
    assert np.array_equal(got, want)


def test_chain_defects_match_reference_dense():
    defects = ((3, 2.0, 0.0), (-1, -0.5, 0.3))
    spec = ChainSpec(phi=math.pi / 4, n_sites=9, index_origin=-4,
                     defects=tuple(DefectSpec(*d) for d in defects), **NH)
    got = build_chain_hamiltonian(spec).to_dense()
    want = dense_chain(1.0, 0.4, 0.8, spec.phi, list(spec.site_labels), defects=defects)
    assert np.array_equal(got, want)


def test_hermitian_detection_iff():
    base = dict(kappa=1.0, phi=0.7, n_sites=6)
    assert build_chain_hamiltonian(ChainSpec(beta=0.0, gamma=0.0, **base)).is_hermitian
    assert not build_chain_hamiltonian(ChainSpec(beta=0.1, gamma=0.0, **base)).is_hermitian
    assert not build_chain_hamiltonian(ChainSpec(beta=0.0, gamma=0.1, **base)).is_hermitian
    with_gain = ChainSpec(beta=0.0, gamma=0.0, defects=(DefectSpec(2, 0.0, 0.2),), **base)
    assert not build_chain_hamiltonian(with_gain).is_hermitian
    real_defect = ChainSpec(beta=0.0, gamma=0.0, defects=(DefectSpec(2, 1.5, 0.0),), **base)
    assert build_chain_hamiltonian(real_defect).is_hermitian


@given(k=st.integers(0, 15), phi=finite_phases)
def test_ring_eigenmodes(k, phi):
    n = 16
    spec = ChainSpec(phi=phi, n_sites=n, boundary="periodic", **NH)
    h = build_chain_hamiltonian(spec)
    q = 2.0 * math.pi * k / n
    mode = np.exp(1j * q * spec.site_labels)
    energy = dispersion(1.0, 0.4, 0.8, spec.phi, q)
    residual = h.matvec(mode) - energy * mode
    assert np.max(np.abs(residual)) <= 1e-12 * max(1.0, abs(energy))


def test_periodic_two_sites_rejected():
    with pytest.raises(ValueError):
        build_chain_hamiltonian(
            ChainSpec(kappa=1, beta=0, gamma=0, phi=0, n_sites=2, boundary="periodic"))


# ---------------------------------------------------------------- sawtooth


def test_sawtooth_dense_theta_zero():
    saw = SawtoothSpec(kappa=1, j=1, theta=0.0, gamma_a=0.0, u_b=5.0, n_cells=2)
    dense = build_sawtooth_hamiltonian(saw).to_dense()
    # interleaved order (a1, b1, a2, b2)
    expected = np.array([
        [0, 1, 1, 0],
        [1, 5, 1, 0],
        [1, 1, 0, 1],
        [0, 0, 1, 5],
    ], dtype=complex)
    assert np.array_equal(dense, expected)


def test_sawtooth_phase_factors():
    saw = SawtoothSpec(kappa=1, j=1, theta=math.pi / 4, gamma_a=0.0, u_b=5.0, n_cells=3)
    dense = build_sawtooth_hamiltonian(saw).to_dense()
    a, b = (lambda m: 2 * m), (lambda m: 2 * m + 1)
    assert dense[b(0), a(1)] == pytest.approx(cmath.exp(1j * math.pi / 4))
    assert dense[b(0), a(0)] == pytest.approx(cmath.exp(-1j * math.pi / 4))


@given(
    theta=finite_phases,
    j=st.floats(0.1, 3.0),
    gamma_a=st.floats(0.0, 2.0),
    ub_re=st.floats(-20.0, 20.0),
    ub_im=st.floats(-20.0, 20.0),
    m=st.integers(2, 8),
)
def test_sawtooth_matches_reference_dense(theta, j, gamma_a, ub_re, ub_im, m):
    u_b = complex(ub_re, ub_im)
    if abs(u_b) == 0.0:
        u_b = 5.0
    saw = SawtoothSpec(kappa=1.0, j=j, theta=theta, gamma_a=gamma_a, u_b=u_b, n_cells=m)
    got = build_sawtooth_hamiltonian(saw).to_dense()
    want = dense_sawtooth(1.0, j, theta, gamma_a, u_b, m)
    assert np.array_equal(got, want)
    # bandwidth <= 2 in the interleaved layout
    for k in range(3, 2 * m):
        assert np.all(np.diag(got, k) == 0)


def test_sawtooth_rejects_single_cell():
    saw = SawtoothSpec(kappa=1, j=1, theta=0.0, gamma_a=0.0, u_b=5.0, n_cells=1)
    with pytest.raises(ValueError):
        build_sawtooth_hamiltonian(saw)


def test_sawtooth_rejects_bad_va_length():
    with pytest.raises(ValueError):
        SawtoothSpec(kappa=1, j=1, theta=0.0, gamma_a=0.0, u_b=5.0, n_cells=3, v_a=(0.0,))


# ---------------------------------------------------------------- sandwich


def _sandwich(n_sites=13, origin=-6, q0=-math.pi / 2, v_c=1.0, xi=0.4, n_half=3):
    chain = ChainSpec(phi=0.0, n_sites=n_sites, index_origin=origin, **NH)
    return SandwichSpec(chain=chain, n_half=n_half, q0=q0, v_c=v_c, xi=xi)


def test_sandwich_example_rows():
    h = build_sandwich_hamiltonian(_sandwich())
    d = h.to_dense()
    idx = lambda n: n + 6
    assert d[idx(0), idx(0)] == 0
    assert d[idx(0), idx(1)] == pytest.approx(1.0)
    assert d[idx(0), idx(-1)] == pytest.approx(1.0)
    assert d[idx(3), idx(3)] == pytest.approx(1.0 + 0.4j)
    assert d[idx(3), idx(4)] == pytest.approx(1.4)
    assert d[idx(3), idx(2)] == pytest.approx(1.0)
    assert d[idx(5), idx(5)] == pytest.approx(-0.8j)
    assert d[idx(5), idx(6)] == pytest.approx(1.4)
    assert d[idx(5), idx(4)] == pytest.approx(0.6)


def test_sandwich_phase_zero_degenerates():
    h = build_sandwich_hamiltonian(_sandwich(q0=0.0))
    d = h.to_dense()
    outer = [i for i, lab in enumerate(h.site_labels) if abs(lab) > 3]
    for i in outer:
        if i + 1 < h.dim and abs(h.site_labels[i + 1]) > 3:
            assert d[i, i + 1] == pytest.approx(1 + 0.4j)
            assert d[i + 1, i] == pytest.approx(1 + 0.4j)


def test_sandwich_interior_rows_hermitian():
    h = build_sandwich_hamiltonian(_sandwich())
    d = h.to_dense()
    core = [i for i, lab in enumerate(h.site_labels) if -3 < lab < 3]
    sub = d[np.ix_(core, core)]
    assert np.array_equal(sub, sub.conj().T)
    assert np.all(sub.diagonal() == 0)


@given(q0=finite_phases, xi=st.floats(-1.0, 1.0), v_c=st.floats(-2.0, 2.0),
       n_half=st.integers(1, 4))
def test_sandwich_matches_reference_dense(q0, xi, v_c, n_half):
    spec = _sandwich(n_sites=2 * n_half + 7, origin=-(n_half + 3),
                     q0=q0, v_c=v_c, xi=xi, n_half=n_half)
    got = build_sandwich_hamiltonian(spec).to_dense()
    want = dense_sandwich(1.0, 0.4, 0.8, spec.q0, n_half, v_c, xi,
                          list(spec.chain.site_labels))
    assert np.array_equal(got, want)


def test_sandwich_requires_containing_range():
    chain = ChainSpec(phi=0.0, n_sites=7, index_origin=-3, **NH)
    with pytest.raises(ValueError):
        SandwichSpec(chain=chain, n_half=3, q0=0.0, v_c=1.0, xi=0.0)


# ---------------------------------------------------------------- dispersion


def test_dispersion_examples():
    assert dispersion(1, 0.4, 0.8, math.pi / 2, -math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    e0 = dispersion(1, 0.4, 0.8, 0.0, 0.0)
    assert e0 == pytest.approx(2.0 + 0.0j, abs=1e-15)
    qs = np.linspace(-math.pi, math.pi, 401)
    im = dispersion(1, 0.4, 0.8, 0.0, qs).imag
    assert np.all(im[np.abs(qs) > 1e-9] < 0)
    assert dispersion(1, 0.4, 0.8, math.pi / 4, -math.pi / 4) == pytest.approx(math.sqrt(2))


def test_group_velocity_examples():
    assert group_velocity(1.0, 0.0) == 0.0
    assert group_velocity(1.0, -math.pi / 2) == pytest.approx(2.0)
    assert group_velocity(1.0, math.pi / 2) == pytest.approx(-2.0)


@given(q=finite_phases, phi=finite_phases)
def test_dispersion_symmetries(q, phi):
    e_plus = dispersion(1.0, 0.4, 0.8, phi, q)
    e_minus = dispersion(1.0, 0.4, 0.8, phi, -q)
    assert e_plus.real == pytest.approx(e_minus.real, abs=1e-12)
    mirrored = dispersion(1.0, 0.4, 0.8, -phi, -q)
    assert e_plus.imag == pytest.approx(mirrored.imag, abs=1e-12)
    assert group_velocity(1.0, q) == pytest.approx(-group_velocity(1.0, -q), abs=1e-12)


# ---------------------------------------------------------------- reduction


def test_reduce_example_hoppings():
    saw = SawtoothSpec(kappa=1, j=1, theta=math.pi / 4, gamma_a=1.6, u_b=2.5j, n_cells=4)
    red = adiabatic_reduce(saw)
    assert red.j1 == pytest.approx(0.6, abs=1e-15)
    assert red.j2 == pytest.approx(1.4, abs=1e-15)
    chain = red.to_chain_spec()
    assert chain.beta == pytest.approx(0.4)
    assert chain.phi == pytest.approx(math.pi / 2)
    got = build_chain_hamiltonian(chain).to_dense()
    want = build_chain_hamiltonian(
        ChainSpec(kappa=1, beta=0.4, gamma=0.8, phi=math.pi / 2, n_sites=4)).to_dense()
    assert np.allclose(got, want, atol=1e-14)


def test_reduce_example_effective_loss():
    saw = SawtoothSpec(kappa=1, j=1, theta=0.0, gamma_a=1.6, u_b=2.5j, n_cells=5)
    red = adiabatic_reduce(saw)
    assert np.allclose(red.u_eff, -0.8j, atol=1e-15)


def test_reduce_example_real_ub_reciprocal():
    saw = SawtoothSpec(kappa=1, j=1.3, theta=0.0, gamma_a=0.0, u_b=50.0, n_cells=4)
    red = adiabatic_reduce(saw)
    assert red.j1 == red.j2
    assert red.j1.imag == pytest.approx(0.0, abs=1e-16)
    with pytest.raises(ValueError):
        red.to_chain_spec()  # reciprocal real shift is not of the chain's hopping form


def test_reduce_warning_flag():
    ok = adiabatic_reduce(SawtoothSpec(kappa=1, j=4, theta=0.3, gamma_a=0.0,
                                       u_b=40j, n_cells=3))
    assert ok.adiabaticity_ratio == pytest.approx(0.1)
    assert not ok.adiabaticity_warning
    bad = adiabatic_reduce(SawtoothSpec(kappa=1, j=4, theta=0.3, gamma_a=0.0,
                                        u_b=10j, n_cells=3))
    assert bad.adiabaticity_warning


@given(
    beta=st.floats(0.05, 1.5),
    theta=st.floats(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3),
    j=st.floats(0.5, 6.0),
    gamma_a=st.floats(0.0, 3.0),
    kappa=st.floats(0.2, 2.0),
)
def test_reduction_consistency(beta, theta, j, gamma_a, kappa):
    u_b = 1j * j * j / beta
    saw = SawtoothSpec(kappa=kappa, j=j, theta=theta, gamma_a=gamma_a, u_b=u_b, n_cells=5)
    chain = adiabatic_reduce(saw).to_chain_spec(index_origin=-2)
    direct = ChainSpec(kappa=kappa, beta=beta, gamma=gamma_a - 2 * beta,
                       phi=2 * theta, n_sites=5, index_origin=-2)
    got = build_chain_hamiltonian(chain).to_dense()
    want = build_chain_hamiltonian(direct).to_dense()
    scale = max(1.0, np.max(np.abs(want)))
    assert np.max(np.abs(got - want)) <= 1e-13 * scale


def test_reduce_rejects_zero_ub():
    with pytest.raises(ValueError):
        SawtoothSpec(kappa=1, j=1, theta=0.0, gamma_a=0.0, u_b=0.0, n_cells=3)
