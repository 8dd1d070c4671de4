"""Replica contraction of channeled states.

Evaluates Z = <psi|^{x n} (prod_j O_j) |psi>^{x n} for per-site replica
operators O_j, and the derived Renyi entropies, mutual information and
negativities.  Three evaluation strategies are used:

* all-identity assignments are trivially 1;
* assignments supported on few sites go through an exact reduced density
  matrix of the support;
* everything else is contracted site by site with environments of size
  chi^{2n}, restricted to the window spanned by the non-identity sites.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channels import boundary_site_operator

logger = logging.getLogger(__name__)

DEFAULT_FLOP_BUDGET = 5e11
DEFAULT_MEMORY_BUDGET = 4e9  # bytes
IMAG_TOL = 1e-8
RDM_ROUTE_MAX_QUBITS = 8


class RegionError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when a contraction would exceed the flop or memory budget."""

    def __init__(self, message, flops=None, bytes_needed=None):
        super().__init__(message)
        self.flops = flops
        self.bytes_needed = bytes_needed


class NumericalFailure(ArithmeticError):
    """A contraction produced a value outside its mathematically valid range."""


@dataclass(frozen=True)
class Region:
    """A set of sites on a chain of length L.  Site indices are 1-based."""

    sites: tuple
    L: int

    def __post_init__(self):
        sites = tuple(sorted(int(s) for s in self.sites))
        if len(set(sites)) != len(sites):
            raise RegionError("duplicate sites in region")
        if sites and not (1 <= sites[0] and sites[-1] <= self.L):
            raise RegionError(f"sites must lie in [1, {self.L}]")
        object.__setattr__(self, "sites", sites)

    @classmethod
    def interval(cls, first, last, L):
        """Contiguous region [first, last], 1-based inclusive."""
        if last < first:
            raise RegionError("empty interval: last < first")
        return cls(tuple(range(first, last + 1)), L)

    @classmethod
    def full(cls, L):
        return cls(tuple(range(1, L + 1)), L)

    @property
    def size(self):
        return len(self.sites)

    @property
    def indices0(self):
        """0-based numpy index array."""
        return np.asarray(self.sites, dtype=int) - 1

    def complement(self):
        members = set(self.sites)
        return Region(tuple(s for s in range(1, self.L + 1) if s not in members), self.L)

    def is_disjoint(self, other):
        return not set(self.sites) & set(other.sites)

    def union(self, other):
        if self.L != other.L:
            raise RegionError("regions live on chains of different length")
        return Region(tuple(set(self.sites) | set(other.sites)), self.L)

    def intervals(self, periodic=False):
        """Maximal contiguous runs as (first, last) pairs, 1-based inclusive.

        With periodic=True a run touching site L wraps onto a run starting
        at site 1 and is reported once, starting at its wrapped-around head.
        """
        if not self.sites:
            return []
        runs = []
        start = prev = self.sites[0]
        for s in self.sites[1:]:
            if s == prev + 1:
                prev = s
            else:
                runs.append((start, prev))
                start = prev = s
        runs.append((start, prev))
        if periodic and len(runs) > 1 and runs[0][0] == 1 and runs[-1][1] == self.L:
            head = runs.pop()
            tail = runs.pop(0)
            runs.append((head[0], tail[1]))
        return runs


@dataclass
class ReplicaAssignment:
    """Per-site replica operators: None means identity on all n copies."""

    ops: list
    n: int

    def __post_init__(self):
        dim = 2**self.n
        for j, op in enumerate(self.ops):
            if op is None:
                continue
            op = np.asarray(op)
            if op.shape != (dim, dim):
                raise ValueError(f"operator at site {j} has shape {op.shape}, want {(dim, dim)}")
            self.ops[j] = op

    @property
    def L(self):
        return len(self.ops)

    @property
    def support(self):
        """0-based indices of the non-identity sites."""
        return [j for j, op in enumerate(self.ops) if op is not None]


def _real_if_close(matrix):
    if np.max(np.abs(matrix.imag)) < 1e-14 * max(1.0, np.max(np.abs(matrix.real))):
        return np.ascontiguousarray(matrix.real)
    return matrix


def assignment_region(channel, n, region, inverse=False, complement_op=None):
    """B (or its inverse variant) on `region` sites, identity elsewhere.

    complement_op, if given, is placed on every site outside the region;
    this is how the negativity numerator (B on A, B-tilde on the rest) is
    built.
    """
    b = _real_if_close(boundary_site_operator(channel, n, inverse=inverse).matrix)
    ops = [None] * region.L
    for j in region.indices0:
        ops[j] = b
    if complement_op is not None:
        comp = _real_if_close(complement_op)
        for j in range(region.L):
            if ops[j] is None:
                ops[j] = comp
    return ReplicaAssignment(ops, n)


# -- evaluation strategies ----------------------------------------------------

def _expectation_via_rdm(mps, assignment):
    """Exact route through the reduced density matrix of the support."""
    support = assignment.support
    m = len(support)
    n = assignment.n
    rho = mps.reduced_density_matrix(support)
    big = np.array([[1.0]])
    for _ in range(n):
        big = np.kron(big, rho)
    op = np.array([[1.0]])
    for j in support:
        op = np.kron(op, assignment.ops[j])
    # op index bits are site-major (site, replica); the replicated density
    # matrix is replica-major (replica, site).  Reorder op to match.
    perm = [(q % m) * n + (q // m) for q in range(m * n)]
    nb = m * n
    op = op.reshape((2,) * (2 * nb))
    op = op.transpose(perm + [p + nb for p in perm]).reshape(2**nb, 2**nb)
    return complex(np.sum(op * big.T))


def _window_cost(bond_dims, n, w0, w1):
    """(flops, peak bytes) estimate for contracting sites w0..w1 inclusive."""
    flops = 0.0
    peak = 0.0
    for j in range(w0, w1 + 1):
        cl = float(bond_dims[j])
        cr = float(bond_dims[j + 1])
        layer = (cl**n) * (cr**n) * (2.0**n)
        flops += 2 * n * layer * (cl + cr) + 2 * layer * 2.0**n
        peak = max(peak, 3 * layer * 16)
    return flops, peak


def _expectation_via_window(mps, assignment, flop_budget, memory_budget):
    """Site-by-site contraction restricted to the support window."""
    support = assignment.support
    n = assignment.n
    w0, w1 = support[0], support[-1]
    work = mps.copy().canonicalize(w0)
    dims = [t.shape[0] for t in work.tensors] + [work.tensors[-1].shape[2]]
    flops, peak = _window_cost(dims, n, w0, w1)
    if flops > flop_budget:
        raise BudgetExceeded(
            f"contraction needs about {flops:.2e} flops, budget is {flop_budget:.2e}",
            flops=flops, bytes_needed=peak)
    if peak > memory_budget:
        raise BudgetExceeded(
            f"contraction needs about {peak:.2e} bytes, budget is {memory_budget:.2e}",
            flops=flops, bytes_needed=peak)
    logger.debug("window contraction sites %d..%d, n=%d, est %.2e flops", w0, w1, n, flops)

    dtype = np.result_type(
        work.tensors[0].dtype,
        *(assignment.ops[j].dtype for j in support))
    chi0 = work.tensors[w0].shape[0]
    env = _kernels.boundary_environment(chi0, n, dtype=dtype)
    eye = np.eye(2**n)
    norm_env = np.eye(chi0, dtype=work.tensors[0].dtype)
    for j in range(w0, w1 + 1):
        t = work.tensors[j]
        op = assignment.ops[j]
        env = _kernels.apply_site(env, t, eye if op is None else op, n)
        # single-copy norm environment; its trace^n is the normalization
        norm_env = np.tensordot(norm_env, t, axes=(0, 0))
        norm_env = np.tensordot(t.conj(), norm_env, axes=([0, 1], [0, 1])).T
    z = _kernels.close_environment(env, n)
    z1 = np.trace(norm_env)
    return complex(z) / complex(z1) ** n


def replica_expectation(mps, assignment, flop_budget=DEFAULT_FLOP_BUDGET,
                        memory_budget=DEFAULT_MEMORY_BUDGET):
    """<psi|^{x n} (prod_j O_j) |psi>^{x n} / <psi|psi>^n."""
    if assignment.L != mps.L:
        raise ValueError("assignment length does not match the chain")
    support = assignment.support
    if not support:
        return complex(1.0)
    if assignment.n * len(support) <= RDM_ROUTE_MAX_QUBITS:
        return _expectation_via_rdm(mps, assignment)
    return _expectation_via_window(mps, assignment, flop_budget, memory_budget)


def _real_positive(z, what):
    if abs(z.imag) > IMAG_TOL * max(abs(z), 1e-300):
        raise NumericalFailure(f"{what} has imaginary part {z.imag:.3e} (value {z!r})")
    if z.real <= 0:
        raise NumericalFailure(f"{what} is non-positive: {z.real!r}")
    return z.real


# -- derived quantities --------------------------------------------------------

def renyi_entropy_region(mps, channel, n, region, **budget):
    """Order-n Renyi entropy of the channeled state on `region`."""
    if n < 2 or int(n) != n:
        raise ValueError("Renyi index must be an integer >= 2")
    assignment = assignment_region(channel, n, region)
    z = replica_expectation(mps, assignment, **budget)
    return np.log(_real_positive(z, "replica trace")) / (1 - n)


def renyi_mutual_information(mps, channel, n, region_a, region_b, **budget):
    """I^(n)(A,B) = S_A + S_B - S_AB for disjoint regions."""
    if not region_a.is_disjoint(region_b):
        raise RegionError("mutual information needs disjoint regions")
    s_a = renyi_entropy_region(mps, channel, n, region_a, **budget)
    s_b = renyi_entropy_region(mps, channel, n, region_b, **budget)
    s_ab = renyi_entropy_region(mps, channel, n, region_a.union(region_b), **budget)
    return s_a + s_b - s_ab


def renyi_negativity(mps, channel, n, region, **budget):
    """Renyi negativity of order n (odd) for bipartition region / rest."""
    if n % 2 == 0 or n < 3:
        raise ValueError("Renyi negativity needs an odd replica index >= 3")
    b_inv = boundary_site_operator(channel, n, inverse=True).matrix
    numerator = assignment_region(channel, n, region, complement_op=b_inv)
    denominator = assignment_region(channel, n, Region.full(region.L))
    z_num = replica_expectation(mps, numerator, **budget)
    z_den = replica_expectation(mps, denominator, **budget)
    ratio = _real_positive(z_num, "negativity numerator") / _real_positive(
        z_den, "negativity denominator")
    return np.log(ratio) / (1 - n)


def whole_chain_log_z(mps, channel, n, **budget):
    """log Z^(n)(L) with B on every site; the free-energy input to g."""
    assignment = assignment_region(channel, n, Region.full(mps.L))
    z = replica_expectation(mps, assignment, **budget)
    return np.log(_real_positive(z, "whole-chain replica trace"))
