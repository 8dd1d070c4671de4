"""Two-site DMRG ground-state search against the TFIM MPO."""
from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from .mps import MatrixProductState

SWEEP_CAP = 60
WARMUP_SWEEPS = 2
WARMUP_CHI = 8


class DMRGConvergenceError(RuntimeError):
    def __init__(self, message, energy_trace):
        super().__init__(message)
        self.energy_trace = energy_trace


def _left_env_update(env, t, w):
    # env: (a, m, b); t: (a, s, a'); w: (m, m', s_out, s_in)
    out = np.tensordot(env, t, axes=(0, 0))  # (m, b, s, a')
    out = np.tensordot(out, w, axes=([0, 2], [0, 3]))  # (b, a', m', s_out)
    out = np.tensordot(out, t.conj(), axes=([0, 3], [0, 1]))  # (a', m', b')
    return out


def _right_env_update(env, t, w):
    # env: (a, m, b) for bonds to the right; t: (a, s, a'); w: (m, m', s_out, s_in)
    out = np.tensordot(t, env, axes=(2, 0))  # (a, s, m, b)
    out = np.tensordot(out, w, axes=([2, 1], [1, 3]))  # (a, b, m, s_out)
    out = np.tensordot(out, t.conj(), axes=([1, 3], [2, 1]))  # (a, m, a'bra)
    return out


class _TwoSiteOperator:
    """Effective two-site Hamiltonian as a linear operator."""

    def __init__(self, left, right, w1, w2):
        self.left = left
        self.right = right
        self.w1 = w1
        self.w2 = w2
        a = left.shape[0]
        b = right.shape[0]
        self.theta_shape = (a, 2, 2, b)
        self.dim = a * 4 * b

    def matvec(self, x):
        th = x.reshape(self.theta_shape)
        out = np.tensordot(self.left, th, axes=(0, 0))  # (m, ab, s1, s2, b)
        out = np.tensordot(out, self.w1, axes=([0, 2], [0, 3]))  # (ab, s2, b, m1, s1o)
        out = np.tensordot(out, self.w2, axes=([3, 1], [0, 3]))  # (ab, b, s1o, m2, s2o)
        out = np.tensordot(out, self.right, axes=([1, 3], [0, 1]))  # (ab, s1o, s2o, bb)
        return out.reshape(-1)

    def aslinop(self):
        return spla.LinearOperator((self.dim, self.dim), matvec=self.matvec, dtype=np.float64)


def _solve_theta(op, theta0):
    v0 = theta0.reshape(-1)
    if op.dim <= 16:
        h = np.zeros((op.dim, op.dim))
        eye = np.eye(op.dim)
        for k in range(op.dim):
            h[:, k] = op.matvec(eye[:, k])
        vals, vecs = np.linalg.eigh(0.5 * (h + h.T))
        return vals[0], vecs[:, 0].reshape(op.theta_shape)
    vals, vecs = spla.eigsh(op.aslinop(), k=1, which="SA", v0=v0, tol=1e-12, maxiter=2000)
    return float(vals[0]), vecs[:, 0].reshape(op.theta_shape)


def _truncate(theta, chi_max, cutoff=1e-14):
    a, d1, d2, b = theta.shape
    m = theta.reshape(a * d1, d2 * b)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    nonzero = s > cutoff * s[0] if s[0] > 0 else s > 0
    k = int(min(chi_max, max(1, np.count_nonzero(nonzero))))
    u, s, vh = u[:, :k], s[:k], vh[:k]
    s = s / np.linalg.norm(s)
    return u.reshape(a, d1, k), s, vh.reshape(k, d2, b)


def _sweep(mps, mpo, lefts, rights, chi_max):
    """One full left-to-right plus right-to-left sweep; returns last energy."""
    L = mps.L
    energy = None
    for j in range(L - 1):
        theta0 = np.tensordot(mps.tensors[j], mps.tensors[j + 1], axes=(2, 0))
        op = _TwoSiteOperator(lefts[j], rights[j + 1], mpo[j], mpo[j + 1])
        energy, theta = _solve_theta(op, theta0)
        u, s, vh = _truncate(theta, chi_max)
        mps.tensors[j] = u
        mps.tensors[j + 1] = np.tensordot(np.diag(s), vh, axes=(1, 0))
        lefts[j + 1] = _left_env_update(lefts[j], mps.tensors[j], mpo[j])
    for j in range(L - 2, -1, -1):
        theta0 = np.tensordot(mps.tensors[j], mps.tensors[j + 1], axes=(2, 0))
        op = _TwoSiteOperator(lefts[j], rights[j + 1], mpo[j], mpo[j + 1])
        energy, theta = _solve_theta(op, theta0)
        u, s, vh = _truncate(theta, chi_max)
        mps.tensors[j + 1] = vh
        mps.tensors[j] = np.tensordot(u, np.diag(s), axes=(2, 0))
        rights[j] = _right_env_update(rights[j + 1], mps.tensors[j + 1], mpo[j + 1])
    return energy


def ground_state_dmrg(spec, chi_max, energy_tol=1e-10, seed=0, sweep_cap=SWEEP_CAP):
    """Two-site DMRG; sweeps until the energy change per sweep < energy_tol.

    Returns a normalized MPS with the canonical center at site 0 and an
    ``energy`` attribute (variational upper bound).
    """
    if chi_max < 2:
        raise ValueError("need chi_max >= 2")
    mpo = spec.mpo()
    rng = np.random.default_rng(seed)
    mps = MatrixProductState.random(spec.L, min(WARMUP_CHI, chi_max), rng)
    mps.canonicalize(0)

    L = spec.L

    def fresh_envs():
        lefts = [None] * L
        rights = [None] * L
        lefts[0] = np.zeros((1, 1, 1))
        lefts[0][0, 0, 0] = 1.0
        rights[L - 1] = np.zeros((1, 1, 1))
        rights[L - 1][0, 0, 0] = 1.0
        for j in range(L - 1, 0, -1):
            rights[j - 1] = _right_env_update(rights[j], mps.tensors[j], mpo[j])
        return lefts, rights

    trace = []
    lefts, rights = fresh_envs()
    for _ in range(WARMUP_SWEEPS):
        trace.append(_sweep(mps, mpo, lefts, rights, min(WARMUP_CHI, chi_max)))

    prev = trace[-1]
    converged = False
    for _ in range(sweep_cap):
        e = _sweep(mps, mpo, lefts, rights, chi_max)
        trace.append(e)
        if abs(e - prev) < energy_tol:
            converged = True
            break
        prev = e
    if not converged:
        raise DMRGConvergenceError(
            "DMRG did not converge within %d sweeps" % sweep_cap, energy_trace=trace
        )
    mps.canonicalize(0).normalize()
    mps.energy = trace[-1]
    mps.energy_trace = trace
    return mps
