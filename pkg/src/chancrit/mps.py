"""Matrix-product-state container and canonical-form utilities.

Site tensors have shape (left bond, physical=2, right bond); boundary
bonds have size 1.  Tensors left of the canonical center are left
isometries, tensors right of it are right isometries.
"""
from __future__ import annotations

import numpy as np


class MPSError(ValueError):
    pass


class MatrixProductState:
    def __init__(self, tensors, canonical_center=None):
        self.tensors = [np.asarray(t) for t in tensors]
        self.canonical_center = canonical_center
        self._validate_shapes()

    # -- basic structure ---------------------------------------------------
    def _validate_shapes(self):
        if len(self.tensors) < 2:
            raise MPSError("need at least two sites")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise MPSError("boundary bonds must have size 1")
        for j, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise MPSError("site tensor %d must be (chiL, 2, chiR)" % j)
            if j and self.tensors[j - 1].shape[2] != t.shape[0]:
                raise MPSError("bond mismatch between sites %d and %d" % (j - 1, j))

    @property
    def L(self):
        return len(self.tensors)

    @property
    def bond_dims(self):
        return [t.shape[2] for t in self.tensors[:-1]]

    def copy(self):
        return MatrixProductState([t.copy() for t in self.tensors], self.canonical_center)

    # -- norms and canonical form -------------------------------------------
    def norm_squared(self):
        env = np.ones((1, 1), dtype=self.tensors[0].dtype)
        for t in self.tensors:
            env = np.tensordot(env, t, axes=(0, 0))  # (b, s, a')
            env = np.tensordot(t.conj(), env, axes=([0, 1], [0, 1]))  # (b', a')
            env = env.T
        return float(abs(env[0, 0]))

    def normalize(self):
        nrm = np.sqrt(self.norm_squared())
        if nrm == 0:
            raise MPSError("cannot normalize a zero state")
        if self.canonical_center is not None:
            self.tensors[self.canonical_center] = self.tensors[self.canonical_center] / nrm
        else:
            scale = nrm ** (1.0 / self.L)
            for j in range(self.L):
                self.tensors[j] = self.tensors[j] / scale
        return self

    def canonicalize(self, center=0):
        """Bring to mixed canonical form with the center at `center`."""
        if not 0 <= center < self.L:
            raise MPSError("center out of range")
        # left sweep
        for j in range(center):
            t = self.tensors[j]
            chiL, d, chiR = t.shape
            q, r = np.linalg.qr(t.reshape(chiL * d, chiR))
            k = q.shape[1]
            self.tensors[j] = q.reshape(chiL, d, k)
            self.tensors[j + 1] = np.tensordot(r, self.tensors[j + 1], axes=(1, 0))
        # right sweep
        for j in range(self.L - 1, center, -1):
            t = self.tensors[j]
            chiL, d, chiR = t.shape
            q, r = np.linalg.qr(t.reshape(chiL, d * chiR).T)
            k = q.shape[1]
            self.tensors[j] = q.T.reshape(k, d, chiR)
            self.tensors[j - 1] = np.tensordot(self.tensors[j - 1], r.T, axes=(2, 0))
        self.canonical_center = center
        return self

    def isometry_defects(self):
        """Max deviation from the left/right isometry conditions."""
        if self.canonical_center is None:
            return None
        worst = 0.0
        for j in range(self.canonical_center):
            t = self.tensors[j]
            m = t.reshape(-1, t.shape[2])
            worst = max(worst, float(np.max(np.abs(m.conj().T @ m - np.eye(t.shape[2])))))
        for j in range(self.canonical_center + 1, self.L):
            t = self.tensors[j]
            m = t.reshape(t.shape[0], -1)
            worst = max(worst, float(np.max(np.abs(m @ m.conj().T - np.eye(t.shape[0])))))
        return worst

    # -- conversions ---------------------------------------------------------
    @classmethod
    def from_dense(cls, amplitudes, L, chi_max=None, cutoff=1e-14):
        """Exact (or truncated) MPS from a dense state vector via SVD."""
        psi = np.asarray(amplitudes)
        if psi.shape != (2**L,):
            raise MPSError("amplitude vector has wrong length")
        tensors = []
        rest = psi.reshape(1, -1)
        for j in range(L - 1):
            chiL = rest.shape[0]
            m = rest.reshape(chiL * 2, -1)
            u, s, vh = np.linalg.svd(m, full_matrices=False)
            keep = s > cutoff * s[0] if s[0] > 0 else s > 0
            if chi_max is not None:
                keep[chi_max:] = False
            k = max(1, int(np.count_nonzero(keep)))
            tensors.append(u[:, :k].reshape(chiL, 2, k))
            rest = (s[:k, None] * vh[:k])
        tensors.append(rest.reshape(rest.shape[0], 2, 1))
        return cls(tensors, canonical_center=L - 1)

    def to_dense(self):
        if self.L > 20:
            raise MPSError("dense conversion capped at L=20")
        vec = self.tensors[0].reshape(2, -1)
        for t in self.tensors[1:]:
            vec = np.tensordot(vec, t, axes=(-1, 0))
        return vec.reshape(-1)

    @classmethod
    def random(cls, L, chi, rng, dtype=float):
        dims = [1]
        for j in range(1, L):
            dims.append(int(min(chi, 2 ** j, 2 ** (L - j))))
        dims.append(1)
        tensors = []
        for j in range(L):
            shape = (dims[j], 2, dims[j + 1])
            t = rng.normal(size=shape)
            if dtype is complex:
                t = t + 1j * rng.normal(size=shape)
            tensors.append(t)
        mps = cls(tensors)
        mps.canonicalize(0).normalize()
        return mps

    # -- observables ----------------------------------------------------------
    def reduced_density_matrix(self, sites):
        """Exact RDM of a small set of sites (2^{2|sites|} cost)."""
        sites = sorted(sites)
        if len(sites) > 8:
            raise MPSError("reduced density matrix capped at 8 sites")
        work = self.copy().canonicalize(sites[0]).normalize()
        # environment carries open (ket..., bra...) physical legs of `sites`
        env = np.eye(work.tensors[sites[0]].shape[0])
        env = env[None, ...]  # leading "open legs" axis, size 1
        for j in range(sites[0], sites[-1] + 1):
            t = work.tensors[j]
            if j in sites:
                # (open, a, b) x (a, s, a') -> (open, b, s, a')
                env = np.tensordot(env, t, axes=(1, 0))
                env = np.tensordot(env, t.conj(), axes=(1, 0))  # (open, s, a', s', b')
                env = env.transpose(0, 1, 3, 2, 4)  # (open, s, s', a', b')
                k = env.shape[0] * 4
                env = env.reshape(k, env.shape[3], env.shape[4])
            else:
                env = np.tensordot(env, t, axes=(1, 0))  # (open, b, s, a')
                env = np.tensordot(env, t.conj(), axes=([1, 2], [0, 1]))  # (open, a', b')
        # close right bond
        rho = np.einsum("kaa->k", env)
        m = len(sites)
        rho = rho.reshape((2, 2) * m)
        # axes are (s1, s1', s2, s2', ...); want kets first then bras
        perm = [2 * r for r in range(m)] + [2 * r + 1 for r in range(m)]
        rho = rho.transpose(perm).reshape(2**m, 2**m)
        return rho

    def local_expectation_matrix(self, op, site):
        rho = self.reduced_density_matrix([site])
        return complex(np.trace(op @ rho))
