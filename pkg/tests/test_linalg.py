import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoent.linalg import (LinalgConvergenceError, NotHermitianError, hermitian_eig, svd,
                           _rounds)


def rand_hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13])
def test_round_robin_covers_each_pair_once(n):
    seen = []
    for p, q in _rounds(n):
        assert len(set(p) | set(q)) == 2 * len(p)  # disjoint within a round
        seen += list(zip(p.tolist(), q.tolist()))
    assert sorted(seen) == [(i, j) for i in range(n) for j in range(i + 1, n)]


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 24), seed=st.integers(0, 2 ** 32 - 1))
def test_eig_against_numpy(n, seed):
    h = rand_hermitian(n, np.random.default_rng(seed))
    dec = hermitian_eig(h)
    scale = max(1.0, np.linalg.norm(h))
    assert np.all(np.diff(dec.eigenvalues) <= 0)
    assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-12 * scale)
    v = dec.eigenvectors
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) < 1e-12 * n
    assert np.linalg.norm(dec.reconstruct() - h) < 1e-12 * scale


def test_eig_known_values():
    h = np.array([[2, 1j], [-1j, 2]])
    dec = hermitian_eig(h)
    assert np.allclose(dec.eigenvalues, [3, 1], atol=1e-14)
    assert np.allclose(hermitian_eig(np.diag([1.0, 5.0, 3.0])).eigenvalues, [5, 3, 1])


def test_eig_degenerate_and_rank_one():
    rng = np.random.default_rng(1)
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    v /= np.linalg.norm(v)
    dec = hermitian_eig(np.outer(v, v.conj()))
    assert abs(dec.eigenvalues[0] - 1) < 1e-13
    assert np.max(np.abs(dec.eigenvalues[1:])) < 1e-13
    assert abs(abs(np.vdot(dec.eigenvectors[:, 0], v)) - 1) < 1e-12
    assert np.allclose(hermitian_eig(np.eye(4)).eigenvalues, 1.0)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[1, 2], [0, 1]]))
    with pytest.raises(ValueError):
        hermitian_eig(np.ones((2, 3)))


def test_eig_sweep_budget():
    h = rand_hermitian(12, np.random.default_rng(3))
    with pytest.raises(LinalgConvergenceError) as info:
        hermitian_eig(h, max_sweeps=1)
    assert info.value.sweeps == 1


def test_eig_tiny_couplings_do_not_overflow():
    h = np.array([[1.0, 1e-300], [1e-300, 2.0]], dtype=complex)
    with np.errstate(all="raise"):
        dec = hermitian_eig(h)
    assert np.allclose(dec.eigenvalues, [2, 1])


@settings(max_examples=40, deadline=None)
@given(r=st.integers(1, 16), c=st.integers(1, 16), seed=st.integers(0, 2 ** 32 - 1))
def test_svd_invariants(r, c, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
    dec = svd(m)
    k = min(r, c)
    assert dec.left.shape == (r, k) and dec.right.shape == (c, k)
    assert np.linalg.norm(dec.reconstruct() - m) < 1e-12 * np.linalg.norm(m)
    assert np.linalg.norm(dec.left.conj().T @ dec.left - np.eye(k)) < 1e-12
    assert np.linalg.norm(dec.right.conj().T @ dec.right - np.eye(k)) < 1e-12
    assert np.all(np.diff(dec.singulars) <= 0) and np.all(dec.singulars >= 0)
    assert np.allclose(dec.singulars, np.linalg.svd(m, compute_uv=False), atol=1e-12 * dec.singulars[0])


def test_svd_rank_deficient():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((7, 2)) + 1j * rng.standard_normal((7, 2))
    b = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
    dec = svd(a @ b)
    assert dec.rank == 2
    assert np.all(dec.singulars[2:] == 0.0)
    assert np.linalg.norm(dec.left.conj().T @ dec.left - np.eye(5)) < 1e-12
    assert np.linalg.norm(dec.reconstruct() - a @ b) < 1e-12 * np.linalg.norm(a @ b)


def test_svd_zero_matrix():
    dec = svd(np.zeros((3, 2)))
    assert dec.rank == 0
    assert np.allclose(dec.left.conj().T @ dec.left, np.eye(2))


def test_svd_singulars_are_sqrt_of_gram_eigenvalues():
    # the eig(M M^H) route, used here as an independent oracle
    rng = np.random.default_rng(11)
    m = rng.standard_normal((4, 9)) + 1j * rng.standard_normal((4, 9))
    ev = hermitian_eig(m @ m.conj().T).eigenvalues
    assert np.allclose(svd(m).singulars, np.sqrt(ev), atol=1e-12)
