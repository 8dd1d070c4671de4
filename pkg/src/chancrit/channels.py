"""Single-qubit channels, their duals, and replica boundary operators.

Channels are stored as 4x4 real Pauli-transfer matrices ``T`` with
``N(sigma_b) = sum_a T[a, b] sigma_a`` in the (I, X, Y, Z) basis.  Trace
preservation means the first row is exactly (1, 0, 0, 0); the dual channel
is the transpose.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .pauli import (
    PAULIS,
    kron_all,
    matrix_to_pauli_tensor,
    normalize_axis,
    pauli_tensor_to_matrix,
    sigma_axis,
)

CHOI_EIG_TOL = -1e-12


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class SingleSiteChannel:
    """A qubit channel in Pauli-transfer form with a descriptive label."""

    transfer: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        t = np.asarray(self.transfer, dtype=float)
        if t.shape != (4, 4):
            raise ChannelError("transfer must be 4x4")
        t = t.copy()
        t.flags.writeable = False
        object.__setattr__(self, "transfer", t)
        if not np.array_equal(t[0], [1.0, 0.0, 0.0, 0.0]):
            raise ChannelError("channel is not trace preserving")

    def dual(self):
        """Adjoint map on observables; transfer matrix is the transpose."""
        return SingleSiteChannel(self.transfer.T.copy(), label="dual(%s)" % self.label)

    def choi(self):
        """Choi matrix (N x id applied to the unnormalized Bell projector)."""
        j = np.zeros((4, 4), dtype=complex)
        for r in range(2):
            for c in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[r, c] = 1.0
                j += np.kron(self.apply(e), e)
        return j

    def is_cptp(self, tol=CHOI_EIG_TOL):
        eigs = np.linalg.eigvalsh(self.choi())
        return eigs.min() >= tol

    def apply(self, rho):
        """Act on a 2x2 matrix."""
        rho = np.asarray(rho, dtype=complex)
        coeff = np.array([np.trace(p @ rho) / 2.0 for p in PAULIS])
        out_coeff = self.transfer @ coeff.real if np.allclose(coeff.imag, 0) else self.transfer @ coeff
        return np.tensordot(out_coeff, PAULIS, axes=(0, 0))

    def superoperator(self):
        """4x4 matrix acting on vec(rho) with row-major (row, col) vectorization."""
        s = np.zeros((4, 4), dtype=complex)
        for r in range(2):
            for c in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[r, c] = 1.0
                s[:, 2 * r + c] = self.apply(e).reshape(4)
        return s

    @property
    def is_unital(self):
        return np.allclose(self.transfer[:, 0], [1.0, 0.0, 0.0, 0.0])


def identity_channel():
    return SingleSiteChannel(np.eye(4), label="identity")


def make_dephasing(p, axis):
    """Dephasing channel ``rho -> (1-p/2) rho + (p/2) s_v rho s_v``.

    Fixes the I and axis-parallel components, scales the two perpendicular
    Pauli components by (1 - p).
    """
    if not 0.0 <= p <= 1.0:
        raise ChannelError("dephasing strength p=%r outside [0, 1]" % (p,))
    v = normalize_axis(axis)
    t = np.eye(4)
    t[1:, 1:] = (1.0 - p) * np.eye(3) + p * np.outer(v, v)
    return SingleSiteChannel(t, label="dephasing(p=%g,axis=%s)" % (p, np.round(v, 6)))


def make_depolarizing(p):
    """Depolarizing channel ``rho -> (1-p) rho + (p/2) I``."""
    if not 0.0 <= p <= 1.0:
        raise ChannelError("depolarizing strength p=%r outside [0, 1]" % (p,))
    t = np.diag([1.0, 1.0 - p, 1.0 - p, 1.0 - p])
    return SingleSiteChannel(t, label="depolarizing(p=%g)" % p)


def dual(channel):
    return channel.dual()


@dataclass(frozen=True)
class ReplicaSiteOperator:
    """Per-site operator on n replicas, B = N*^{x n}(tau_n^{+-1})."""

    n: int
    matrix: np.ndarray
    inverse_flag: bool = False
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2**self.n
        if m.shape != (dim, dim):
            raise ChannelError("replica operator has wrong dimension")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def is_real(self):
        return bool(np.max(np.abs(self.matrix.imag)) < 1e-14)


def replica_permutation(n, inverse=False):
    """Cyclic replica shift tau_n: |i1..in> -> |i_n, i1, .., i_{n-1}|."""
    if n < 2:
        raise ChannelError("replica count must be >= 2")
    dim = 2**n
    mat = np.zeros((dim, dim))
    for idx in range(dim):
        bits = [(idx >> (n - 1 - r)) & 1 for r in range(n)]
        out_bits = [bits[-1]] + bits[:-1]
        if inverse:
            out_bits = bits[1:] + [bits[0]]
        out = 0
        for b in out_bits:
            out = (out << 1) | b
        mat[out, idx] = 1.0
    return ReplicaSiteOperator(n=n, matrix=mat, inverse_flag=inverse, label="tau_%d%s" % (n, "^-1" if inverse else ""))


def boundary_site_operator(channel, n, inverse=False):
    """Apply the dual channel to every replica leg of tau_n^{+-1}.

    Implemented by expanding the permutation in the n-fold Pauli basis and
    transforming each leg's coefficients by the dual transfer matrix.
    """
    tau = replica_permutation(n, inverse=inverse)
    coeff = matrix_to_pauli_tensor(tau.matrix, n)
    d = channel.transfer.T  # dual transfer
    for r in range(n):
        coeff = np.tensordot(d, coeff, axes=([1], [r]))
        coeff = np.moveaxis(coeff, 0, r)
    mat = pauli_tensor_to_matrix(coeff)
    return ReplicaSiteOperator(
        n=n,
        matrix=mat,
        inverse_flag=inverse,
        label="B[%s,n=%d%s]" % (channel.label, n, ",inv" if inverse else ""),
    )


def apply_channel_dense(channels, rho):
    """Apply a product of single-site channels to a dense density matrix.

    `channels` is one channel per site; L <= 12 enforced.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    L = int(np.log2(dim))
    if 2**L != dim or rho.shape != (dim, dim):
        raise ChannelError("rho must be 2^L x 2^L")
    if len(channels) != L:
        raise ChannelError("need exactly one channel per site")
    if L > 12:
        raise ChannelError("dense channel application capped at L=12")
    t = rho.reshape((2, 2) * L)  # axes (r1..rL, c1..cL)
    for j, ch in enumerate(channels):
        s = ch.superoperator().reshape(2, 2, 2, 2)  # (r', c', r, c)
        t = np.tensordot(s, t, axes=([2, 3], [j, L + j]))
        t = np.moveaxis(t, [0, 1], [j, L + j])
    return t.reshape(dim, dim)


def random_channel(rng, kraus_rank=2):
    """Random CPTP qubit channel from a Haar-ish random isometry."""
    g = rng.normal(size=(2 * kraus_rank, 2)) + 1j * rng.normal(size=(2 * kraus_rank, 2))
    q, _ = np.linalg.qr(g)
    kraus = [q[2 * k : 2 * k + 2, :] for k in range(kraus_rank)]
    t = np.zeros((4, 4))
    for b in range(4):
        out = sum(k @ PAULIS[b] @ k.conj().T for k in kraus)
        for a in range(4):
            val = np.trace(PAULIS[a] @ out) / 2.0
            t[a, b] = val.real
    t[0] = [1.0, 0.0, 0.0, 0.0]  # exact trace preservation
    return SingleSiteChannel(t, label="random")
