"""Pure-numpy replica contraction kernel.

The environment tensor carries 2n bond axes ordered (k_1..k_n, b_1..b_n)
for the n ket layers and n bra layers.  ``apply_site`` absorbs one MPS site
into the environment together with the 2^n x 2^n replica operator acting
between the ket and bra physical indices.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def apply_site(env, site_tensor, op, n):
    """Absorb one site: env' = env * A^{x n} * op * conj(A)^{x n}.

    env axes: (k_1..k_n, b_1..b_n) with all k bonds of size chiL.
    op[t, s] couples the n bra outputs (t) to the n ket inputs (s),
    replica 1 being the most significant bit of each index.
    """
    a = site_tensor
    chi_r = a.shape[2]
    for _ in range(n):
        env = np.tensordot(env, a, axes=([0], [0]))
    # axes: (b_1..b_n, s_1, k'_1, ..., s_n, k'_n)
    perm = (
        [n + 2 * r + 1 for r in range(n)]
        + list(range(n))
        + [n + 2 * r for r in range(n)]
    )
    env = np.ascontiguousarray(env.transpose(perm))
    lead = env.shape[: 2 * n]
    env = env.reshape(-1, 2**n) @ op.T
    env = env.reshape(lead + (2,) * n)
    ac = a.conj()
    for r in range(n):
        env = np.tensordot(env, ac, axes=([n, 2 * n - r], [0, 1]))
    # axes: (k'_1..k'_n, b'_1..b'_n)
    if env.shape != (chi_r,) * (2 * n):
        raise AssertionError("environment update produced unexpected shape")
    return env


def boundary_environment(chi, n, dtype=np.float64):
    """Identity-product environment for isometric (or trivial) boundaries."""
    eye = np.eye(chi, dtype=dtype)
    env = eye
    for _ in range(n - 1):
        env = np.multiply.outer(env, eye)
    # axes currently (k1, b1, k2, b2, ...)
    perm = [2 * r for r in range(n)] + [2 * r + 1 for r in range(n)]
    return np.ascontiguousarray(env.transpose(perm))


def close_environment(env, n):
    """Contract each k_r with the matching b_r (identity right boundary)."""
    chi = env.shape[0]
    dim = chi**n
    return np.trace(env.reshape(dim, dim))
