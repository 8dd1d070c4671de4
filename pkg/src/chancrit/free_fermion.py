"""Exact Gaussian-state backend for the critical Majorana chain.

A fermionic Gaussian state on L sites is fully characterized by its 2L x 2L
real antisymmetric Majorana covariance matrix
M_{jl} = -i Tr((psi_j psi_l - delta_{jl}) rho).
This module builds the antiperiodic (Neveu-Schwarz) critical ground state,
applies the amplitude-damping channel as a convex combination of covariance
matrices, and evaluates entropies, mutual information, and the logarithmic
negativity under partial time reversal in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

NU_CLIP = 1e-10
PURITY_TOL = 1e-8


class GaussianStateError(ValueError):
    pass


@dataclass(frozen=True)
class MajoranaCovariance:
    """Covariance matrix of a Gaussian state on L complex-fermion sites."""

    M: np.ndarray
    L: int

    def __post_init__(self):
        m = np.asarray(self.M, dtype=float)
        if m.shape != (2 * self.L, 2 * self.L):
            raise GaussianStateError("covariance must be 2L x 2L")
        m = (m - m.T) / 2.0  # enforce exact antisymmetry
        sv = np.linalg.svd(m, compute_uv=False)
        if sv.size and sv[0] > 1.0 + 1e-10:
            raise GaussianStateError(f"covariance singular value {sv[0]} exceeds 1")
        object.__setattr__(self, "M", m)

    def is_pure(self, tol=PURITY_TOL):
        return np.max(np.abs(self.M.T @ self.M - np.eye(2 * self.L))) < tol

    def restricted(self, region):
        """Submatrix on the Majorana indices of the region's sites."""
        idx = majorana_indices(region.indices0)
        return self.M[np.ix_(idx, idx)]


def majorana_indices(sites0):
    """Majorana row/column indices (0-based) for 0-based site indices."""
    out = []
    for j in sites0:
        out += [2 * j, 2 * j + 1]
    return np.asarray(out, dtype=int)


def _ns_momenta(L):
    """Antiperiodic single-particle momenta on a ring of 2L Majoranas."""
    return np.pi * (2 * np.arange(2 * L) + 1) / (2 * L)


def ns_ground_covariance(L):
    """Ground state of the uniform Majorana chain with antiperiodic closure.

    The Hamiltonian is H = -2i sum_m eta_m psi_m psi_{m+1} on 2L Majorana
    modes with psi_{2L+1} = -psi_1.  The covariance is assembled from the
    filled negative-energy momentum modes.
    """
    if L < 2:
        raise GaussianStateError("need at least two sites")
    n = 2 * L
    d = np.subtract.outer(np.arange(n), np.arange(n))
    ks = _ns_momenta(L)
    # sum over occupied half of the +/- paired modes
    m = np.zeros((n, n))
    for k in ks[: L]:  # k in (0, pi): one representative per +/- pair
        m += np.sin(k * d)
    m *= 2.0 / n
    # fix the global sign from the bond energy: each -2i psi_m psi_{m+1}
    # term contributes 2 M_{m,m+1}, which must be negative in the ground state
    if m[0, 1] > 0:
        m = -m
    return MajoranaCovariance(m, L)


def single_particle_matrix(L):
    """Antisymmetric 2L x 2L matrix A with H = (i/2) psi^T A psi."""
    n = 2 * L
    a = np.zeros((n, n))
    for m in range(n):
        eta = -1.0 if m == n - 1 else 1.0
        a[m, (m + 1) % n] = -2.0 * eta
        a[(m + 1) % n, m] = 2.0 * eta
    return a


def ns_ground_covariance_dense(L):
    """Same state via dense diagonalization; cross-check for the momentum sum."""
    a = single_particle_matrix(L)
    w, v = np.linalg.eigh(1j * a)
    sgn = np.sign(w)
    m = np.real(-1j * (v * sgn) @ v.conj().T)
    if m[0, 1] > 0:
        m = -m
    return MajoranaCovariance(m, L)


def chain_energy(cov):
    """<H> of the uniform antiperiodic Majorana chain in the given state."""
    n = 2 * cov.L
    e = 0.0
    for m in range(n):
        eta = -1.0 if m == n - 1 else 1.0
        e += 2.0 * eta * cov.M[m, (m + 1) % n]
    return e


def vacuum_covariance(L):
    """Pure product state with M_{2i-1,2i} = +1 (the damping fixed point)."""
    m = np.zeros((2 * L, 2 * L))
    for j in range(L):
        m[2 * j, 2 * j + 1] = 1.0
        m[2 * j + 1, 2 * j] = -1.0
    return MajoranaCovariance(m, L)


def amplitude_damping(cov, p):
    """M_p = (1-p) M + p M0 with M0 the product vacuum covariance."""
    if not 0.0 <= p <= 1.0:
        raise GaussianStateError(f"damping strength p={p!r} outside [0, 1]")
    m0 = vacuum_covariance(cov.L).M
    return MajoranaCovariance((1.0 - p) * cov.M + p * m0, cov.L)


def _covariance_nus(m):
    """Pairing parameters nu_k >= 0 from a real antisymmetric matrix.

    Uses the real Schur form, which exposes the 2x2 blocks [[0, nu], [-nu, 0]]
    directly and keeps the +/- i nu pairing exact.
    """
    if m.shape[0] == 0:
        return np.array([])
    t, _ = scipy.linalg.schur(m, output="real")
    nus = np.abs(np.diag(t, k=1)[::2])
    if np.any(nus > 1.0 + 1e-8):
        raise GaussianStateError(f"mode parameter {nus.max()} exceeds 1")
    return np.clip(nus, 0.0, 1.0)


def _mode_entropy(nus, n):
    lam_p = (1.0 + nus) / 2.0
    lam_m = (1.0 - nus) / 2.0
    if n == "von_neumann" or n == 1:
        out = 0.0
        for lam in (lam_p, lam_m):
            nz = lam[lam > NU_CLIP]
            out -= np.sum(nz * np.log(nz))
        return float(out)
    return float(np.sum(np.log(lam_p**n + lam_m**n)) / (1 - n))


def gaussian_renyi_entropy(cov, region, n):
    """Renyi (or von Neumann) entropy of the modes in `region`."""
    if region.size == 0:
        raise GaussianStateError("entropy of an empty region")
    return _mode_entropy(_covariance_nus(cov.restricted(region)), n)


def gaussian_mutual_information(cov, region_a, region_b, n):
    """I^(n)(A,B) = S_A + S_B - S_AB for disjoint mode regions."""
    if not region_a.is_disjoint(region_b):
        raise GaussianStateError("mutual information needs disjoint regions")
    return (
        gaussian_renyi_entropy(cov, region_a, n)
        + gaussian_renyi_entropy(cov, region_b, n)
        - gaussian_renyi_entropy(cov, region_a.union(region_b), n)
    )


def gaussian_log_negativity(cov, region):
    """Logarithmic negativity under partial time reversal on `region`.

    The reversed state rho^R is Gaussian with covariance Gamma_+ (region
    rows/columns scaled by i, so the region block flips sign), and its
    adjoint has Gamma_-.  Products of Gaussian operators multiply through
    the Cayley transform T = (1+i Gamma)(1-i Gamma)^{-1}, which gives the
    covariance of rho^R rho^R-dagger; the trace norm then splits into a
    mode sum over that covariance plus a Tr(rho^2) normalization.

    For a pure global state this reduces to the Renyi-1/2 entropy of the
    region, which is used directly (the Cayley transform is singular there).
    """
    if cov.is_pure(tol=1e-12):
        return gaussian_renyi_entropy(cov, region, 0.5)
    n2 = 2 * cov.L
    idx_a = majorana_indices(region.indices0)
    mask = np.zeros(n2, dtype=bool)
    mask[idx_a] = True
    g = cov.M.astype(complex)
    phase = np.where(mask, 1j, 1.0)
    # Gamma_+-: the region block picks up (+-i)^2 = -1, the off blocks +-i
    gp = g * np.outer(phase, phase)
    gm = g * np.outer(np.conj(phase), np.conj(phase))
    eye = np.eye(n2)
    tp = np.linalg.solve((eye - 1j * gp).T, (eye + 1j * gp).T).T
    tm = np.linalg.solve((eye - 1j * gm).T, (eye + 1j * gm).T).T
    # product rule: the single-particle factors compose in reverse order
    tx = tm @ tp
    gx = 1j * np.linalg.solve((eye + tx).T, (eye - tx).T).T
    # covariance eigenvalues come as +-i nu; the mode parameter is nu itself
    nus = -1j * np.linalg.eigvals(gx)
    # the mode term is even in nu, so sum over the full +/- paired spectrum
    # and halve instead of selecting one representative per pair
    half = 0.5 * np.sum(np.log(np.sqrt((1.0 + nus) / 2.0) + np.sqrt((1.0 - nus) / 2.0)))
    mus = _covariance_nus(cov.M)
    norm = 0.5 * np.sum(np.log((1.0 + mus**2) / 2.0))
    e = float(np.real(half) + norm)
    if e < -1e-10:
        raise GaussianStateError(f"negativity came out negative: {e}")
    return max(e, 0.0)
