"""Closed-form two-site mutual information under complete dephasing."""
import numpy as np
import pytest

from chancrit.analytic import (
    PhysicalityError,
    TwoSiteInputs,
    small_c_renyi_coefficient,
    stabilizer_expansion,
    stabilizer_expansion_matrix,
    two_site_renyi_mi,
    two_site_vn_mi,
    two_site_vn_small_c,
)
from chancrit.channels import boundary_site_operator, make_dephasing
from chancrit.dense_oracle import dense_oracle_mutual_information
from chancrit.replica import Region
from chancrit.spin_model import (
    build_tfim,
    connected_correlator,
    ground_state_dense,
    local_expectation,
)


def test_stabilizer_expansion_structure():
    terms = stabilizer_expansion(3)
    assert len(terms) == 4
    assert all(sum(bits) % 2 == 0 for bits, _ in terms)
    assert all(coeff == 0.25 for _, coeff in terms)
    with pytest.raises(ValueError):
        stabilizer_expansion(1)


def test_stabilizer_expansion_matches_replica_operator():
    # the even-weight Z-string sum reassembles the complete-dephasing
    # per-site replica operator on every replica count
    ch = make_dephasing(1.0, "z")
    for n in (2, 3, 4):
        want = boundary_site_operator(ch, n).matrix
        got = stabilizer_expansion_matrix(n)
        assert np.max(np.abs(got - want)) < 1e-12


def test_two_site_mi_against_direct_probabilities():
    x, C = 0.6, 0.05
    probs = np.array([
        ((1 + x) ** 2 + C) / 4.0,
        ((1 - x) ** 2 + C) / 4.0,
        (1 - x * x - C) / 4.0,
        (1 - x * x - C) / 4.0,
    ])
    marg = np.array([(1 + x) / 2.0, (1 - x) / 2.0])
    prod = np.outer(marg, marg).ravel()[[0, 3, 1, 2]]
    for n in (2, 3):
        want = np.log(np.sum(probs**n) / np.sum(prod**n)) / (n - 1)
        got = two_site_renyi_mi(TwoSiteInputs(x=x, C=C, n=n))
        assert abs(got - want) < 1e-12
    want_vn = float(np.sum(probs * np.log(probs)) - np.sum(prod * np.log(prod)))
    assert abs(two_site_vn_mi(x, C) - want_vn) < 1e-12


def test_closed_form_against_dense_chain():
    state = ground_state_dense(build_tfim(8, True))
    x = local_expectation(state, "z", 0)
    C = connected_correlator(state, "z", 0, 3)
    ch = make_dephasing(1.0, "z")
    a = Region.interval(1, 1, 8)
    b = Region.interval(4, 4, 8)
    for n in (2, 3):
        dense = dense_oracle_mutual_information(state, ch, n, a, b)
        closed = two_site_renyi_mi(TwoSiteInputs(x=x, C=C, n=n))
        assert abs(dense - closed) < 1e-10
    dense_vn = dense_oracle_mutual_information(state, ch, "von_neumann", a, b)
    assert abs(dense_vn - two_site_vn_mi(x, C)) < 1e-10


def test_small_c_coefficient_is_the_derivative():
    x = 0.64
    eps = 1e-7
    for n in (2, 3, 4):
        coeff = small_c_renyi_coefficient(n, x)
        numeric = (
            two_site_renyi_mi(TwoSiteInputs(x=x, C=eps, n=n))
            - two_site_renyi_mi(TwoSiteInputs(x=x, C=-eps, n=n))
        ) / (2 * eps)
        assert abs(coeff - numeric) < 1e-5


def test_n2_coefficient_closed_form():
    # at n = 2 the linear-in-C coefficient reduces to 2 x^2 / (1 + x^2)^2
    for x in (0.2, 0.5, 0.64, 0.9):
        want = 2.0 * x * x / (1.0 + x * x) ** 2
        assert abs(small_c_renyi_coefficient(2, x) - want) < 1e-14


def test_vn_small_c_law():
    x, C = 0.64, 1e-3
    exact = two_site_vn_mi(x, C)
    approx = two_site_vn_small_c(x, C)
    assert abs(exact - approx) / approx < 0.01


def test_physicality_window():
    with pytest.raises(PhysicalityError):
        TwoSiteInputs(x=1.5, C=0.0, n=2)
    with pytest.raises(PhysicalityError):
        TwoSiteInputs(x=0.0, C=1.5, n=2)
