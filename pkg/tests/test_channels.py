import numpy as np
import pytest

from chancrit.channels import (
    ChannelError,
    apply_channel_dense,
    boundary_site_operator,
    identity_channel,
    make_dephasing,
    make_depolarizing,
    random_channel,
    replica_permutation,
)
from chancrit.pauli import SZ, kron_all, pauli_string


def test_identity_channel_is_trivial():
    ch = identity_channel()
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    assert np.allclose(ch.apply(rho), rho)
    assert ch.is_cptp()
    assert ch.is_unital


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_dephasing_action(p):
    ch = make_dephasing(p, "z")
    rho = np.array([[0.6, 0.25], [0.25, 0.4]], dtype=complex)
    expect = (1 - p / 2) * rho + (p / 2) * SZ @ rho @ SZ
    assert np.allclose(ch.apply(rho), expect)
    assert ch.is_cptp()
    if p == 1.0:
        # complete dephasing kills all off-diagonal elements
        assert np.allclose(ch.apply(rho), np.diag(np.diag(rho)))


def test_dephasing_transfer_block():
    # transfer = identity on the axis direction, (1 - p) transverse
    p = 0.4
    ch = make_dephasing(p, "x")
    t = ch.transfer
    assert np.allclose(t[1, 1], 1.0)
    assert np.allclose(t[2, 2], 1.0 - p)
    assert np.allclose(t[3, 3], 1.0 - p)


def test_depolarizing_fixed_points():
    ch = make_depolarizing(1.0)
    rho = np.array([[0.9, 0.1], [0.1, 0.1]], dtype=complex)
    assert np.allclose(ch.apply(rho), np.eye(2) / 2)
    assert make_depolarizing(0.0).transfer == pytest.approx(np.eye(4))


def test_dual_is_transpose_and_unital():
    ch = make_dephasing(0.6, [0.6, 0.0, 0.8])
    assert ch.is_cptp()
    assert np.allclose(ch.dual().transfer, ch.transfer.T)
    # dual of a CPTP map is unital: dual(I) = I
    assert np.allclose(ch.dual().apply(np.eye(2)), np.eye(2))
    # self-duality of dephasing: transfer is symmetric
    assert np.allclose(ch.transfer, ch.transfer.T)


def test_cptp_rejects_nontrace_preserving():
    bad = np.eye(4)
    bad[0, 1] = 0.5
    with pytest.raises(ChannelError):
        from chancrit.channels import SingleSiteChannel

        SingleSiteChannel(bad)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_replica_permutation_cyclic(n):
    tau = replica_permutation(n).matrix
    tau_inv = replica_permutation(n, inverse=True).matrix
    assert np.allclose(tau @ tau_inv, np.eye(2**n))
    # n-fold application is the identity
    power = np.linalg.matrix_power(tau, n)
    assert np.allclose(power, np.eye(2**n))


def test_replica_permutation_convention():
    # |i1 i2> -> |i2 i1> for n=2; check one basis state for n=3
    tau = replica_permutation(3).matrix
    src = 0b011  # (i1, i2, i3) = (0, 1, 1)
    dst = 0b101  # (i3, i1, i2) = (1, 0, 1)
    assert tau[dst, src] == 1.0


def test_replica_trace_identity():
    # Tr(rho x rho tau_2) = Tr(rho^2) for a random qubit state
    rng = np.random.default_rng(5)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    tau = replica_permutation(2).matrix
    lhs = np.trace(np.kron(rho, rho) @ tau)
    assert np.isclose(lhs, np.trace(rho @ rho))


def test_boundary_operator_identity_channel_is_tau():
    for n in (2, 3):
        b = boundary_site_operator(identity_channel(), n)
        assert np.allclose(b.matrix, replica_permutation(n).matrix, atol=1e-13)


def test_boundary_operator_dephasing_dense_check():
    # B = (N* x N*)(tau_2) compared against explicit superoperator action
    ch = make_dephasing(0.7, "z")
    n = 2
    b = boundary_site_operator(ch, n).matrix
    tau = replica_permutation(n).matrix
    # expand tau in product basis and apply the dual channel leg by leg
    expect = np.zeros_like(tau, dtype=complex)
    dual = ch.dual()
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    e1 = np.zeros((2, 2), dtype=complex)
                    e1[i, j] = 1.0
                    e2 = np.zeros((2, 2), dtype=complex)
                    e2[k, l] = 1.0
                    w = tau.reshape(2, 2, 2, 2)[i, k, j, l]
                    expect += w * kron_all([dual.apply(e1), dual.apply(e2)])
    assert np.allclose(b, expect, atol=1e-12)


def test_apply_channel_dense_single_site():
    ch = make_dephasing(1.0, "z")
    plus = np.ones((2, 2)) / 2.0
    rho = kron_all([plus, plus])
    out = apply_channel_dense([ch, identity_channel()], rho)
    expect = kron_all([np.eye(2) / 2, plus]).astype(complex)
    assert np.allclose(out, expect)


def test_random_channel_is_cptp():
    rng = np.random.default_rng(11)
    for _ in range(20):
        assert random_channel(rng, kraus_rank=2).is_cptp()


def test_boundary_operator_real_for_real_channels():
    for ch in (make_dephasing(0.5, "z"), make_depolarizing(0.4)):
        assert boundary_site_operator(ch, 2).is_real
