"""Dense reconstruction of Gaussian fermionic states from their covariance.

The density matrix is expanded in the 4^L Majorana-monomial basis with
moments supplied by Wick's theorem (Pfaffians of covariance submatrices).
This gives a ground truth for the closed-form Gaussian entropy and
negativity expressions, independently of their mode-decomposition algebra.
Everything is capped at small L.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .free_fermion import majorana_indices

ORACLE_MAX_L = 6


class OracleCapacityError(ValueError):
    pass


def pfaffian(a):
    """Pfaffian of an even-dimensional antisymmetric matrix, by recursion."""
    a = np.asarray(a)
    n = a.shape[0]
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0
    if n == 2:
        return a[0, 1]
    total = 0.0
    rest0 = list(range(1, n))
    for pos, j in enumerate(rest0):
        rest = rest0[:pos] + rest0[pos + 1:]
        sign = (-1.0) ** pos
        total = total + sign * a[0, j] * pfaffian(a[np.ix_(rest, rest)])
    return total


def majorana_matrices(L):
    """2L Majorana operators as dense 2^L matrices (Jordan-Wigner form)."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    out = []
    for j in range(L):
        for tail in (x, y):
            op = np.array([[1.0 + 0j]])
            for k in range(L):
                if k < j:
                    op = np.kron(op, z)
                elif k == j:
                    op = np.kron(op, tail)
                else:
                    op = np.kron(op, eye)
            out.append(op)
    return out


def _even_monomials(indices):
    for size in range(0, len(indices) + 1, 2):
        yield from combinations(indices, size)


def _moment(m, subset):
    """<psi_{i1} ... psi_{ik}> for ascending indices, via Wick's theorem."""
    if not subset:
        return 1.0 + 0j
    k = np.asarray(m[np.ix_(subset, subset)], dtype=complex) * 1j
    return complex(pfaffian(k))


def monomial_density_matrix(cov, sites0=None):
    """Dense (reduced) density matrix of the Gaussian state on `sites0`.

    The reduction to a subset of sites is done in the monomial basis itself:
    only monomials supported on the kept Majorana modes survive the partial
    trace, and they are rebuilt from fresh operators on the small space.
    """
    L = cov.L
    if sites0 is None:
        sites0 = list(range(L))
    sites0 = sorted(sites0)
    la = len(sites0)
    if la > ORACLE_MAX_L:
        raise OracleCapacityError(f"monomial oracle capped at {ORACLE_MAX_L} sites")
    big_idx = majorana_indices(sites0)
    gammas = majorana_matrices(la)
    dim = 2**la
    rho = np.zeros((dim, dim), dtype=complex)
    for subset in _even_monomials(range(2 * la)):
        mom = _moment(cov.M, [big_idx[s] for s in subset])
        if mom == 0.0:
            continue
        op = np.eye(dim, dtype=complex)
        for s in subset:
            op = op @ gammas[s]
        # rho = 2^-la sum_S <Gamma_S> Gamma_S^dagger, and Gamma_S^dagger
        # reverses the product: a (-1)^{|S|/2} phase for even monomials
        rho += mom * (-1.0) ** (len(subset) // 2) * op
    return rho / dim


def oracle_renyi_entropy(cov, region, n):
    rho = monomial_density_matrix(cov, list(region.indices0))
    lam = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    lam = lam / lam.sum()
    if n == "von_neumann" or n == 1:
        nz = lam[lam > 1e-14]
        return float(-np.sum(nz * np.log(nz)))
    return float(np.log(np.sum(lam**n)) / (1 - n))


def oracle_mutual_information(cov, region_a, region_b, n):
    return (
        oracle_renyi_entropy(cov, region_a, n)
        + oracle_renyi_entropy(cov, region_b, n)
        - oracle_renyi_entropy(cov, region_a.union(region_b), n)
    )


def oracle_log_negativity(cov, region):
    """log ||rho^{R_A}||_1 with the partial time reversal applied per monomial.

    Each monomial picks up i^{k_A} with k_A the number of its Majorana
    factors living in the region; the trace norm of the (generally
    non-Hermitian) result is taken via singular values.
    """
    L = cov.L
    if L > ORACLE_MAX_L:
        raise OracleCapacityError(f"monomial oracle capped at {ORACLE_MAX_L} sites")
    idx_a = set(majorana_indices(region.indices0).tolist())
    gammas = majorana_matrices(L)
    dim = 2**L
    rho_r = np.zeros((dim, dim), dtype=complex)
    for subset in _even_monomials(range(2 * L)):
        mom = _moment(cov.M, list(subset))
        if mom == 0.0:
            continue
        op = np.eye(dim, dtype=complex)
        for s in subset:
            op = op @ gammas[s]
        k_a = sum(1 for s in subset if s in idx_a)
        rho_r += (1j**k_a) * mom * (-1.0) ** (len(subset) // 2) * op
    rho_r /= dim
    sv = np.linalg.svd(rho_r, compute_uv=False)
    return float(np.log(np.sum(sv)))
