"""Closed-form two-site mutual information under complete dephasing.

After completely dephasing two sites along an axis v, the joint state is a
two-bit distribution determined by the one-point function x = <sigma_v> and
the connected correlator C.  These closed forms serve as independent
oracles for the tensor-network path and as fast parameter studies.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .pauli import kron_all, ID2, SZ


class PhysicalityError(ValueError):
    """Inputs outside the window where the dephased distribution is valid."""


def _probabilities(x, C):
    """Joint outcome probabilities (++, --, +-, -+) of the dephased pair."""
    return (
        ((1 + x) ** 2 + C) / 4.0,
        ((1 - x) ** 2 + C) / 4.0,
        (1 - x * x - C) / 4.0,
        (1 - x * x - C) / 4.0,
    )


def _check_window(x, C):
    if not -1.0 < x < 1.0:
        raise PhysicalityError(f"one-point function x={x} outside (-1, 1)")
    probs = _probabilities(x, C)
    if any(p < -1e-12 or p > 1.0 + 1e-12 for p in probs):
        raise PhysicalityError(f"x={x}, C={C} gives invalid probabilities {probs}")
    return probs


@dataclass(frozen=True)
class TwoSiteInputs:
    x: float
    C: float
    n: object  # integer >= 2 or "von_neumann"

    def __post_init__(self):
        _check_window(self.x, self.C)


def stabilizer_expansion(n):
    """Even-weight Z-strings on n replicas, each with coefficient 2^{1-n}.

    Their sum reassembles the per-site replica operator of complete
    z-dephasing.
    """
    if not 2 <= n <= 8:
        raise ValueError("replica count must be in [2, 8]")
    strings = [bits for bits in product((0, 1), repeat=n) if sum(bits) % 2 == 0]
    return [(bits, 2.0 ** (1 - n)) for bits in strings]


def stabilizer_expansion_matrix(n):
    """Dense 2^n x 2^n matrix reassembled from the stabilizer expansion."""
    out = np.zeros((2**n, 2**n), dtype=complex)
    for bits, coeff in stabilizer_expansion(n):
        out += coeff * kron_all([SZ if b else ID2 for b in bits])
    return out


def two_site_renyi_mi(inputs):
    """I^(n) of two completely dephased sites from (x, C)."""
    x, C, n = inputs.x, inputs.C, inputs.n
    if n == "von_neumann":
        return two_site_vn_mi(x, C)
    if int(n) != n or n < 2:
        raise ValueError("Renyi index must be an integer >= 2")
    num = ((1 + x) ** 2 + C) ** n + ((1 - x) ** 2 + C) ** n + 2 * (1 - x * x - C) ** n
    den = (1 + x) ** (2 * n) + (1 - x) ** (2 * n) + 2 * (1 - x * x) ** n
    return float(np.log(num / den) / (n - 1))


def _plogp(t):
    """t log t with the 0 log 0 := 0 convention."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    mask = t > 0
    out[mask] = t[mask] * np.log(t[mask])
    return out


def two_site_vn_mi(x, C):
    """Von Neumann mutual information of the dephased pair."""
    p = np.asarray(_check_window(x, C))
    p0 = np.asarray(_probabilities(x, 0.0))
    return float(np.sum(_plogp(p)) - np.sum(_plogp(p0)))


def two_site_vn_small_c(x, C):
    """Leading small-C law C^2 / (2 (1-x^2)^2) of the von Neumann MI."""
    return C * C / (2.0 * (1.0 - x * x) ** 2)


def small_c_renyi_coefficient(n, x):
    """Linear-in-C coefficient of I^(n) at small C."""
    if int(n) != n or n < 2:
        raise ValueError("Renyi index must be an integer >= 2")
    num = ((1 + x) ** (n - 1) - (1 - x) ** (n - 1)) ** 2
    den = ((1 + x) ** n + (1 - x) ** n) ** 2
    return float(n / (n - 1) * num / den)
