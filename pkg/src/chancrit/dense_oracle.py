"""Dense-matrix reference implementations for small chains.

Everything here builds the full 2^L x 2^L density matrix and manipulates it
explicitly.  These routines exist to validate the tensor-network path and
carry hard capacity caps.
"""
from __future__ import annotations

import numpy as np

from .channels import SingleSiteChannel, apply_channel_dense

ENTROPY_MAX_L = 10
NEGATIVITY_MAX_L = 8
EIG_CLIP = 1e-14


class CapacityError(ValueError):
    pass


def _as_channel_list(channels, L):
    if isinstance(channels, SingleSiteChannel):
        return [channels] * L
    channels = list(channels)
    if len(channels) != L:
        raise ValueError("need one channel per site")
    return channels


def _num_qubits(rho):
    L = int(round(np.log2(rho.shape[0])))
    if rho.shape != (2**L, 2**L):
        raise ValueError("density matrix must be 2^L x 2^L")
    return L


def channeled_density_matrix(state, channels):
    """rho = (N_1 x ... x N_L)(|psi><psi|) as a dense matrix."""
    rho = state.density_matrix()
    return apply_channel_dense(_as_channel_list(channels, state.L), rho)


def partial_trace(rho, keep):
    """Trace out all qubits except the 0-based indices in `keep`."""
    L = _num_qubits(rho)
    keep = sorted(keep)
    rest = [j for j in range(L) if j not in keep]
    t = rho.reshape((2,) * (2 * L))
    perm = keep + rest + [L + j for j in keep] + [L + j for j in rest]
    dk, dr = 2 ** len(keep), 2 ** len(rest)
    t = t.transpose(perm).reshape(dk, dr, dk, dr)
    return np.einsum("arbr->ab", t)


def partial_transpose(rho, sites):
    """Transpose the 0-based `sites` indices (ket <-> bra) of rho."""
    L = _num_qubits(rho)
    t = rho.reshape((2,) * (2 * L))
    perm = list(range(2 * L))
    for j in sites:
        perm[j], perm[L + j] = perm[L + j], perm[j]
    return t.transpose(perm).reshape(rho.shape)


def renyi_entropy_dense(rho, n):
    """S^(n) from the eigenvalues of rho; n='von_neumann' gives -Tr rho log rho."""
    lam = np.linalg.eigvalsh(rho)
    lam = np.clip(lam.real, 0.0, None)
    lam = lam / lam.sum()
    if n == "von_neumann" or n == 1:
        nz = lam[lam > EIG_CLIP]
        return float(-np.sum(nz * np.log(nz)))
    return float(np.log(np.sum(lam**n)) / (1 - n))


def dense_oracle_entropies(state, channels, n, region):
    """Renyi (or von Neumann) entropy of the channeled state on `region`."""
    if state.L > ENTROPY_MAX_L:
        raise CapacityError(f"dense entropy oracle capped at L={ENTROPY_MAX_L}")
    rho = channeled_density_matrix(state, channels)
    rho_a = partial_trace(rho, list(region.indices0))
    return renyi_entropy_dense(rho_a, n)


def dense_oracle_mutual_information(state, channels, n, region_a, region_b):
    rho = channeled_density_matrix(state, channels)

    def s(region):
        return renyi_entropy_dense(partial_trace(rho, list(region.indices0)), n)

    if state.L > ENTROPY_MAX_L:
        raise CapacityError(f"dense entropy oracle capped at L={ENTROPY_MAX_L}")
    return s(region_a) + s(region_b) - s(region_a.union(region_b))


def dense_oracle_negativity(state, channels, n_or_exact, region):
    """Renyi negativity (odd n) or log negativity ('exact') of the channeled state."""
    if state.L > NEGATIVITY_MAX_L:
        raise CapacityError(f"dense negativity oracle capped at L={NEGATIVITY_MAX_L}")
    rho = channeled_density_matrix(state, channels)
    rho_t = partial_transpose(rho, list(region.indices0))
    if n_or_exact == "exact":
        mu = np.linalg.eigvalsh(rho_t)
        return float(np.log(np.sum(np.abs(mu))))
    n = int(n_or_exact)
    if n % 2 == 0 or n < 3:
        raise ValueError("Renyi negativity needs an odd index >= 3")
    mu = np.linalg.eigvalsh(rho_t)
    lam = np.linalg.eigvalsh(rho)
    return float(np.log(np.sum(mu**n) / np.sum(lam.real**n)) / (1 - n))


def dense_replica_trace(state, channels, ops_by_site, n):
    """Loop-based Tr over n explicit copies with arbitrary per-site operators.

    Independent of the Pauli-transfer machinery: builds rho once, then
    evaluates <psi|^{x n} (prod O_j) |psi>^{x n} by brute-force index sums.
    Capped at very small sizes.
    """
    L = state.L
    if L * n > 12:
        raise CapacityError("dense replica trace capped at n*L <= 12")
    rho = channeled_density_matrix(state, channels)
    # represent the replicated state as a tensor with 2n chain indices
    big = np.array(1.0)
    for _ in range(n):
        big = np.multiply.outer(big, rho)
    # axes: (k_1, b_1, k_2, b_2, ...) with each k/b of dimension 2^L
    t = big.reshape((2,) * (2 * n * L))
    # axis layout: replica r contributes ket bits [r*2L .. r*2L+L) and bra
    # bits [r*2L+L .. (r+1)*2L)
    for j in range(L):
        op = ops_by_site[j]
        if op is None:
            continue
        op_t = np.asarray(op).reshape((2,) * (2 * n))
        # contract op bra-side bits with the ket bit of site j in each replica
        axes = [r * 2 * L + j for r in range(n)]
        t = np.tensordot(op_t, t, axes=(list(range(n, 2 * n)), axes))
        t = np.moveaxis(t, list(range(n)), axes)
    # close: pair every replica ket bit with its own bra bit
    ket_axes = [r * 2 * L + j for r in range(n) for j in range(L)]
    bra_axes = [r * 2 * L + L + j for r in range(n) for j in range(L)]
    dim = 2 ** (n * L)
    mat = t.transpose(ket_axes + bra_axes).reshape(dim, dim)
    return complex(np.trace(mat))
