import numpy as np
import pytest

from chancrit.dmrg import ground_state_dmrg
from chancrit.spin_model import (
    build_tfim,
    connected_correlator,
    ground_state_dense,
    local_expectation,
)


def test_dense_ground_energy_matches_free_fermions():
    from chancrit.free_fermion import chain_energy, ns_ground_covariance

    for L in (4, 8):
        spec = build_tfim(L, periodic=True)
        state = ground_state_dense(spec)
        h = spec.dense_matrix()
        e = np.vdot(state.amplitudes, h @ state.amplitudes).real
        assert e == pytest.approx(chain_energy(ns_ground_covariance(L)) / 2, abs=1e-9)


def test_mpo_matches_dense():
    for periodic in (False, True):
        spec = build_tfim(6, periodic)
        dense_h = spec.dense_matrix()
        # contract the MPO (index order wL, wR, s_out, s_in) to a dense matrix
        ws = spec.mpo()
        m = ws[0]
        for w in ws[1:]:
            m = np.tensordot(m, w, axes=(1, 0))
            m = np.moveaxis(m, -3, 1)  # keep the open wR bond at position 1
        # axes now (1, 1, out1, in1, out2, in2, ...)
        m = m.reshape((2, 2) * spec.L)
        perm = [2 * r for r in range(spec.L)] + [2 * r + 1 for r in range(spec.L)]
        m = m.transpose(perm).reshape(2**spec.L, 2**spec.L)
        assert np.allclose(m, dense_h, atol=1e-12)


@pytest.mark.parametrize("periodic", [False, True])
def test_dmrg_matches_dense(periodic):
    L = 10
    spec = build_tfim(L, periodic)
    dense = ground_state_dense(spec)
    h = spec.dense_matrix()
    e_exact = np.vdot(dense.amplitudes, h @ dense.amplitudes).real
    mps = ground_state_dmrg(spec, chi_max=32, energy_tol=1e-12, seed=0)
    psi = mps.to_dense()
    e_mps = np.vdot(psi, h @ psi).real / np.vdot(psi, psi).real
    assert e_mps == pytest.approx(e_exact, abs=1e-9)
    overlap = abs(np.vdot(psi, dense.amplitudes)) / np.linalg.norm(psi)
    assert overlap == pytest.approx(1.0, abs=1e-7)


def test_dmrg_deterministic():
    spec = build_tfim(8, True)
    a = ground_state_dmrg(spec, chi_max=16, seed=0)
    b = ground_state_dmrg(spec, chi_max=16, seed=0)
    for ta, tb in zip(a.tensors, b.tensors):
        assert np.array_equal(ta, tb)


def test_correlators_translation_invariant():
    spec = build_tfim(8, periodic=True)
    state = ground_state_dense(spec)
    xs = [local_expectation(state, "z", j) for j in range(8)]
    assert np.ptp(xs) < 1e-9
    c1 = connected_correlator(state, "z", 0, 3)
    c2 = connected_correlator(state, "z", 2, 5)
    assert c1 == pytest.approx(c2, abs=1e-9)
    with pytest.raises(ValueError):
        connected_correlator(state, "z", 1, 1)


def test_x_magnetization_vanishes():
    # the coupling direction is symmetry-broken only in the thermodynamic
    # limit; finite-size ground states have <X> = 0
    state = ground_state_dense(build_tfim(8, True))
    assert abs(local_expectation(state, "x", 0)) < 1e-9
