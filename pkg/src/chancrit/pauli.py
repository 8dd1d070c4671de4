"""Pauli matrices and n-fold Pauli-string helpers.

Conventions used throughout the package:

* Pauli basis order is ``(I, X, Y, Z)``.
* In tensor products over replicas, replica 1 is the leftmost (most
  significant) factor, i.e. ``kron(op_1, op_2, ..., op_n)``.
"""
from __future__ import annotations

from functools import reduce

import numpy as np

ID2 = np.eye(2, dtype=complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

PAULIS = np.stack([ID2, SX, SY, SZ])
PAULI_LABELS = "IXYZ"


def sigma_axis(axis):
    """Pauli operator along a 3-vector direction, ``v . sigma``."""
    v = np.asarray(axis, dtype=float)
    return v[0] * SX + v[1] * SY + v[2] * SZ


def normalize_axis(axis, tol=1e-6):
    """Return a unit 3-vector; reject vectors far from unit length.

    Deviations below `tol` are silently normalized (the caller may warn),
    larger ones raise ``ValueError``.
    """
    if isinstance(axis, str):
        named = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
        if axis.lower() not in named:
            raise ValueError(f"unknown axis name {axis!r}")
        axis = named[axis.lower()]
    v = np.asarray(axis, dtype=float)
    if v.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("axis must be nonzero")
    if abs(norm - 1.0) > tol:
        raise ValueError("axis deviates from unit norm by %.3g" % abs(norm - 1.0))
    return v / norm


def kron_all(mats):
    """Tensor product of a sequence of matrices, leftmost first."""
    return reduce(np.kron, mats)


def pauli_string(indices):
    """Matrix of a Pauli string given basis indices, e.g. (0, 3) -> I x Z."""
    return kron_all([PAULIS[i] for i in indices])


def matrix_to_pauli_tensor(mat, n):
    """Expand a 2^n x 2^n matrix in the n-fold Pauli basis.

    Returns a real-or-complex tensor ``c`` of shape (4,)*n with
    ``mat = sum_a c[a1..an] sigma_a1 x ... x sigma_an``.
    """
    dim = 2**n
    if mat.shape != (dim, dim):
        raise ValueError("matrix has wrong shape for n=%d" % n)
    t = np.asarray(mat, dtype=complex).reshape((2, 2) * n)
    # current axis layout: (i1..in, j1..jn); bring each (i_r, j_r) pair together
    perm = []
    for r in range(n):
        perm += [r, n + r]
    t = t.transpose(perm)
    # contract each leg pair (i_r, j_r) with sigma_a[j, i] / 2 (trace inner product)
    basis = PAULIS.transpose(0, 2, 1) / 2.0  # basis[a, i, j] = sigma_a[j, i] / 2
    for _ in range(n):
        # leading two axes of t are (i_r, j_r); the a_r axis lands at the end
        t = np.tensordot(t, basis, axes=([0, 1], [1, 2]))
    # axes now (a_1, ..., a_n)
    return t


def pauli_tensor_to_matrix(c):
    """Inverse of :func:`matrix_to_pauli_tensor`."""
    c = np.asarray(c, dtype=complex)
    n = c.ndim
    t = c
    for _ in range(n):
        # contract leading a-axis into a (i, j) leg pair appended at the end
        t = np.tensordot(t, PAULIS, axes=([0], [0]))
    # axes: (i1, j1, i2, j2, ..., in, jn)
    perm = [2 * r for r in range(n)] + [2 * r + 1 for r in range(n)]
    t = t.transpose(perm)
    return t.reshape(2**n, 2**n)
