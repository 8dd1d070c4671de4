import numpy as np
import pytest

from chancrit.channels import (
    identity_channel,
    make_dephasing,
    make_depolarizing,
    random_channel,
)
from chancrit.dense_oracle import (
    dense_oracle_entropies,
    dense_oracle_mutual_information,
    dense_oracle_negativity,
    dense_replica_trace,
    renyi_entropy_dense,
    channeled_density_matrix,
    partial_trace,
)
from chancrit.replica import (
    BudgetExceeded,
    Region,
    RegionError,
    assignment_region,
    renyi_entropy_region,
    renyi_mutual_information,
    renyi_negativity,
    replica_expectation,
    whole_chain_log_z,
)
from chancrit.spin_model import build_tfim, ground_state_dense

L = 6


@pytest.fixture(scope="module")
def ground():
    state = ground_state_dense(build_tfim(L, periodic=True))
    return state, state.to_mps()


CHANNELS = {
    "identity": identity_channel(),
    "deph_z_half": make_dephasing(0.5, "z"),
    "deph_x_full": make_dephasing(1.0, "x"),
    "deph_tilted": make_dephasing(1.0, [np.sin(0.4 * np.pi), 0.0, np.cos(0.4 * np.pi)]),
    "depol": make_depolarizing(0.3),
}


def test_region_basics():
    r = Region.interval(2, 4, 8)
    assert r.size == 3
    assert tuple(r.indices0) == (1, 2, 3)
    assert tuple(r.complement().sites) == (1, 5, 6, 7, 8)
    with pytest.raises(RegionError):
        Region.interval(0, 4, 8)
    with pytest.raises(RegionError):
        Region.interval(5, 9, 8)
    assert Region.interval(1, 2, 8).is_disjoint(Region.interval(4, 5, 8))
    assert not Region.interval(1, 3, 8).is_disjoint(Region.interval(3, 5, 8))


def test_region_wrapped_intervals():
    r = Region((1, 2, 7, 8), 8)
    assert r.intervals(periodic=False) == [(1, 2), (7, 8)]
    assert r.intervals(periodic=True) == [(7, 2)]


@pytest.mark.parametrize("cname", sorted(CHANNELS))
@pytest.mark.parametrize("n", [2, 3])
def test_entropy_matches_dense(ground, cname, n):
    state, mps = ground
    ch = CHANNELS[cname]
    for first, last in [(1, 1), (1, 3), (2, 5), (1, 6)]:
        region = Region.interval(first, last, L)
        got = renyi_entropy_region(mps, ch, n, region)
        want = dense_oracle_entropies(state, ch, n, region)
        assert got == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("cname", ["deph_z_half", "deph_tilted", "depol"])
def test_mutual_information_matches_dense(ground, cname):
    state, mps = ground
    ch = CHANNELS[cname]
    ra, rb = Region.interval(1, 2, L), Region.interval(4, 5, L)
    for n in (2, 3):
        got = renyi_mutual_information(mps, ch, n, ra, rb)
        want = dense_oracle_mutual_information(state, ch, n, ra, rb)
        assert got == pytest.approx(want, abs=1e-10)
    # symmetry in the two regions
    assert renyi_mutual_information(mps, ch, 2, rb, ra) == pytest.approx(
        renyi_mutual_information(mps, ch, 2, ra, rb), abs=1e-12)


@pytest.mark.parametrize("cname", sorted(CHANNELS))
def test_negativity_matches_dense(ground, cname):
    state, mps = ground
    ch = CHANNELS[cname]
    region = Region.interval(2, 4, L)
    got = renyi_negativity(mps, ch, 3, region)
    want = dense_oracle_negativity(state, ch, 3, region)
    assert got == pytest.approx(want, abs=1e-10)


def test_negativity_complement_symmetry(ground):
    _, mps = ground
    ch = CHANNELS["deph_tilted"]
    region = Region.interval(1, 2, L)
    a = renyi_negativity(mps, ch, 3, region)
    b = renyi_negativity(mps, ch, 3, region.complement())
    assert a == pytest.approx(b, abs=1e-8)


def test_negativity_of_identity_channel_is_renyi_entropy(ground):
    # for a pure state, N^(3) equals S^(3) of the region (odd-replica identity)
    state, mps = ground
    region = Region.interval(1, 3, L)
    n3 = renyi_negativity(mps, identity_channel(), 3, region)
    rho = channeled_density_matrix(state, identity_channel())
    s3 = renyi_entropy_dense(partial_trace(rho, region.indices0), 3)
    assert n3 == pytest.approx(s3, abs=1e-10)


def test_whole_chain_log_z(ground):
    state, mps = ground
    for cname in ("deph_z_half", "depol"):
        ch = CHANNELS[cname]
        rho = channeled_density_matrix(state, ch)
        for n in (2, 3):
            want = float(np.log(np.trace(np.linalg.matrix_power(rho, n)).real))
            got = whole_chain_log_z(mps, ch, n)
            assert got == pytest.approx(want, abs=1e-10)
    # identity channel: Tr rho^n = 1 exactly
    assert whole_chain_log_z(mps, identity_channel(), 2) == pytest.approx(0.0, abs=1e-12)


def test_shannon_regime(ground):
    # complete z-dephasing everywhere: Z equals sum_i q_i^2 of the z-basis
    # distribution of the pure state
    state, mps = ground
    q = np.abs(state.amplitudes) ** 2
    want = float(np.log(np.sum(q**2)))
    got = whole_chain_log_z(mps, make_dephasing(1.0, "z"), 2)
    assert got == pytest.approx(want, abs=1e-10)


def test_forward_and_inverse_permutations_agree(ground):
    _, mps = ground
    ch = CHANNELS["deph_tilted"]
    region = Region.interval(2, 4, L)
    fwd = replica_expectation(mps, assignment_region(ch, 3, region, inverse=False))
    inv = replica_expectation(mps, assignment_region(ch, 3, region, inverse=True))
    assert np.isclose(fwd, inv, atol=1e-12)


def test_replica_expectation_vs_loop_oracle(ground):
    # Tr[rho_channeled^{x2} tau_A] via the loop oracle must match the
    # contraction of the pure state against B = (N* x N*)(tau) on A
    state, mps = ground
    ch = CHANNELS["deph_z_half"]
    region = Region.interval(2, 4, L)
    got = replica_expectation(mps, assignment_region(ch, 2, region))
    tau_only = assignment_region(identity_channel(), 2, region)
    want = dense_replica_trace(state, ch, tau_only.ops, 2)
    assert np.isclose(got, want, atol=1e-10)


def test_random_channel_grid(ground):
    state, mps = ground
    rng = np.random.default_rng(0)
    region = Region.interval(2, 4, L)
    for _ in range(5):
        ch = random_channel(rng)
        got = renyi_entropy_region(mps, ch, 2, region)
        want = dense_oracle_entropies(state, ch, 2, region)
        assert got == pytest.approx(want, abs=1e-8)


def test_data_processing_von_neumann():
    # vn entropy of the full chain never decreases under local product channels
    rng = np.random.default_rng(42)
    state = ground_state_dense(build_tfim(L, periodic=True))
    region = Region.full(L)
    s0 = dense_oracle_entropies(state, identity_channel(), "von_neumann", region)
    worst = 0.0
    for _ in range(200):
        ch = random_channel(rng)
        s = dense_oracle_entropies(state, ch, "von_neumann", region)
        worst = max(worst, s0 - s)
    assert worst <= 1e-12


def test_renyi_non_monotonicity_witness():
    # unlike von Neumann mutual information, the Renyi-2 mutual information
    # of two sites can be larger after complete tilted-axis dephasing
    from chancrit.cache import cached_ground_state

    mps = cached_ground_state(build_tfim(12, True), 32, ".cache")
    axis = [np.sin(0.4 * np.pi), 0.0, np.cos(0.4 * np.pi)]
    best = -np.inf
    for da, db in [(1, 7), (1, 6), (1, 5), (1, 4)]:
        ra, rb = Region.interval(da, da, 12), Region.interval(db, db, 12)
        pure = renyi_mutual_information(mps, identity_channel(), 2, ra, rb)
        mixed = renyi_mutual_information(mps, make_dephasing(1.0, axis), 2, ra, rb)
        best = max(best, mixed - pure)
    assert best > 1e-8, "expected dephasing to increase some two-site Renyi-2 MI"


def test_budget_refusal():
    rng = np.random.default_rng(1)
    from chancrit.mps import MatrixProductState

    mps = MatrixProductState.random(12, 16, rng)
    ch = make_dephasing(1.0, "z")
    with pytest.raises(BudgetExceeded):
        whole_chain_log_z(mps, ch, 3, flop_budget=1e3)
    with pytest.raises(BudgetExceeded):
        whole_chain_log_z(mps, ch, 3, memory_budget=1e3)
