"""Critical transverse-field Ising chain: dense builds, MPO view, observables.

H = - sum_i X_i X_{i+1} - sum_i Z_i with coupling = field = 1 (critical point).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mps import MatrixProductState
from .pauli import SX, SZ, normalize_axis, sigma_axis

DENSE_MAX_L = 14


class CapacityError(ValueError):
    pass


class DegenerateGroundStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class HamiltonianSpec:
    L: int
    periodic: bool

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("need L >= 2")

    # -- dense view ---------------------------------------------------------
    def sparse_matrix(self):
        L = self.L
        sx = sp.csr_matrix(SX.real)
        sz = sp.csr_matrix(SZ.real)
        eye = sp.identity(2, format="csr")

        def site_op(op, j):
            mats = [eye] * L
            mats[j] = op
            out = mats[0]
            for m in mats[1:]:
                out = sp.kron(out, m, format="csr")
            return out

        h = sp.csr_matrix((2**L, 2**L))
        for j in range(L - 1):
            h = h - site_op(sx, j) @ site_op(sx, j + 1)
        if self.periodic:
            h = h - site_op(sx, L - 1) @ site_op(sx, 0)
        for j in range(L):
            h = h - site_op(sz, j)
        return h

    def dense_matrix(self):
        if self.L > DENSE_MAX_L:
            raise CapacityError("dense Hamiltonian capped at L=%d" % DENSE_MAX_L)
        return self.sparse_matrix().toarray()

    # -- MPO view -------------------------------------------------------------
    def mpo(self):
        """MPO tensors with index order (wL, wR, s_out, s_in).

        Bond dimension 3 for open chains; 4 for periodic chains, where the
        extra channel carries the wrap-around X string from site 1 to site L.
        """
        sx = SX.real
        sz = SZ.real
        eye = np.eye(2)
        zero = np.zeros((2, 2))
        if not self.periodic:
            w = 3
            bulk = np.array(
                [
                    [eye, sx, -sz],
                    [zero, zero, -sx],
                    [zero, zero, eye],
                ]
            ).transpose(0, 1, 2, 3)
            first = bulk[0:1, :, :, :]
            last = bulk[:, 2:3, :, :]
        else:
            w = 4
            bulk = np.array(
                [
                    [eye, sx, -sz, zero],
                    [zero, zero, -sx, zero],
                    [zero, zero, eye, zero],
                    [zero, zero, zero, eye],
                ]
            )
            first = np.zeros((1, w, 2, 2))
            first[0, 0] = eye
            first[0, 1] = sx
            first[0, 2] = -sz
            first[0, 3] = -sx  # start of the wrap-around -X_L X_1 term
            last = np.zeros((w, 1, 2, 2))
            last[0, 0] = -sz
            last[1, 0] = -sx
            last[2, 0] = eye
            last[3, 0] = sx
        return [first] + [bulk] * (self.L - 2) + [last]


def build_tfim(L, periodic):
    return HamiltonianSpec(L=int(L), periodic=bool(periodic))


@dataclass
class DenseState:
    amplitudes: np.ndarray
    L: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.L,):
            raise ValueError("amplitude count does not match L")

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def to_mps(self, chi_max=None):
        return MatrixProductState.from_dense(self.amplitudes, self.L, chi_max=chi_max)

    def density_matrix(self):
        psi = self.amplitudes
        return np.outer(psi, psi.conj())


def _fix_phase(vec):
    idx = int(np.argmax(np.abs(vec)))
    phase = vec[idx] / abs(vec[idx])
    return vec / phase


def ground_state_dense(spec, degeneracy_tol=1e-10):
    """Normalized ground state (smallest eigenvalue), deterministic phase."""
    if spec.L > DENSE_MAX_L:
        raise CapacityError("dense diagonalization capped at L=%d" % DENSE_MAX_L)
    if spec.L <= 10:
        h = spec.dense_matrix()
        vals, vecs = np.linalg.eigh(h)
        e0, e1 = vals[0], vals[1]
        vec = vecs[:, 0]
    else:
        h = spec.sparse_matrix()
        v0 = np.ones(2**spec.L) / 2 ** (spec.L / 2.0)
        vals, vecs = spla.eigsh(h, k=2, which="SA", v0=v0, tol=0)
        order = np.argsort(vals)
        e0, e1 = vals[order[0]], vals[order[1]]
        vec = vecs[:, order[0]]
    if abs(e1 - e0) < degeneracy_tol:
        raise DegenerateGroundStateError(
            "ground space degenerate within %g (gap %g)" % (degeneracy_tol, abs(e1 - e0))
        )
    vec = _fix_phase(vec / np.linalg.norm(vec))
    state = DenseState(amplitudes=vec, L=spec.L)
    state.energy = float(e0)
    return state


def _axis_operator(axis):
    v = normalize_axis(axis)
    nrm = np.linalg.norm(np.asarray(axis, dtype=float)) if not isinstance(axis, str) else 1.0
    if 1e-12 < abs(nrm - 1.0) <= 1e-6:
        warnings.warn("normalizing slightly non-unit axis")
    return sigma_axis(v)


def _dense_one_point(state, op, site):
    L = state.L
    t = state.amplitudes.reshape((2,) * L)
    ot = np.tensordot(op, t, axes=(1, site))
    ot = np.moveaxis(ot, 0, site)
    return complex(np.vdot(t, ot))


def _dense_two_point(state, op, i, j):
    L = state.L
    t = state.amplitudes.reshape((2,) * L)
    ot = np.tensordot(op, t, axes=(1, i))
    ot = np.moveaxis(ot, 0, i)
    ot = np.tensordot(op, ot, axes=(1, j))
    ot = np.moveaxis(ot, 0, j)
    return complex(np.vdot(t, ot))


def local_expectation(state, axis, site):
    """<sigma_v> at one site, for dense states or MPS."""
    op = _axis_operator(axis)
    if isinstance(state, DenseState):
        val = _dense_one_point(state, op, site)
    else:
        val = state.local_expectation_matrix(op, site)
    if abs(val.imag) > 1e-9:
        raise RuntimeError("expectation has non-negligible imaginary part")
    return float(val.real)


def connected_correlator(state, axis, i, j):
    """<sigma_v(i) sigma_v(j)> - <sigma_v(i)><sigma_v(j)>."""
    if i == j:
        raise ValueError("need distinct sites")
    op = _axis_operator(axis)
    if isinstance(state, DenseState):
        two = _dense_two_point(state, op, i, j)
        one_i = _dense_one_point(state, op, i)
        one_j = _dense_one_point(state, op, j)
    else:
        rho = state.reduced_density_matrix([min(i, j), max(i, j)])
        two = np.trace(np.kron(op, op) @ rho)
        rho_i = state.reduced_density_matrix([i])
        rho_j = state.reduced_density_matrix([j])
        one_i = np.trace(op @ rho_i)
        one_j = np.trace(op @ rho_j)
    val = two - one_i * one_j
    if abs(complex(val).imag) > 1e-9:
        raise RuntimeError("correlator has non-negligible imaginary part")
    return float(complex(val).real)
