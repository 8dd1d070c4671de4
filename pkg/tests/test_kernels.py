"""Backend selection and compiled-vs-numpy parity of the contraction core."""
import numpy as np
import pytest

from chancrit import _kernels
from chancrit._kernels import _fallback
from chancrit.channels import replica_permutation


def random_env_and_site(rng, n, chi_l, chi_r, d=2):
    env = rng.normal(size=(chi_l,) * (2 * n)) + 1j * rng.normal(size=(chi_l,) * (2 * n))
    site = rng.normal(size=(chi_l, d, chi_r)) + 1j * rng.normal(size=(chi_l, d, chi_r))
    return env, site


def test_backend_registry():
    names = _kernels.available_backends()
    assert "numpy" in names
    assert _kernels.get_backend() in names
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")


def test_set_backend_roundtrip():
    original = _kernels.get_backend()
    try:
        _kernels.set_backend("numpy")
        assert _kernels.get_backend() == "numpy"
        if "compiled" in _kernels.available_backends():
            _kernels.set_backend("compiled")
            assert _kernels.get_backend() == "compiled"
    finally:
        _kernels.set_backend(original)


@pytest.mark.skipif("compiled" not in _kernels.available_backends(),
                    reason="compiled kernel not built")
@pytest.mark.parametrize("n,chi_l,chi_r", [(1, 8, 6), (2, 5, 7), (3, 3, 4)])
def test_compiled_matches_numpy(n, chi_l, chi_r):
    from chancrit._kernels import _core

    rng = np.random.default_rng(42 + n)
    env, site = random_env_and_site(rng, n, chi_l, chi_r)
    extra = (rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n)))
    for op in (None,
               replica_permutation(n).matrix if n >= 2 else None,
               extra):
        if op is None and n > 1:
            continue
        op_mat = np.eye(2**n) if op is None else np.array(op, dtype=complex)
        a = _core.apply_site(env, site, op_mat, n)
        b = _fallback.apply_site(env, site, op_mat, n)
        assert np.max(np.abs(a - b)) < 1e-10 * max(1.0, np.max(np.abs(b)))


def test_identity_channel_preserves_norm_contraction():
    # contracting a normalized random MPS against itself through identity
    # ops gives 1 for any backend
    from chancrit.mps import MatrixProductState

    rng = np.random.default_rng(7)
    psi = rng.normal(size=2**6) + 1j * rng.normal(size=2**6)
    psi /= np.linalg.norm(psi)
    mps = MatrixProductState.from_dense(psi, 6, chi_max=8)
    n = 1
    env = _kernels.boundary_environment(mps.tensors[0].shape[0], n)
    for t in mps.tensors:
        env = _kernels.apply_site(env, t, np.eye(2), n)
    val = _kernels.close_environment(env, n)
    assert abs(val - 1.0) < 1e-10
