"""Complex Hermitian eigendecomposition and SVD by Jacobi rotations.

Both routines sweep the index pairs in round-robin (tournament) order, so each
round is a set of disjoint 2x2 rotations that numpy applies in one shot. A
sweep visits every pair exactly once, which makes this an ordinary cyclic
Jacobi method with a parallel-friendly ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HERMITIAN_TOL = 1e-12
OFFDIAG_TOL = 1e-13
ORTH_TOL = 1e-15
RANK_TOL = 1e-12
MAX_SWEEPS = 100


class LinalgConvergenceError(RuntimeError):
    """Jacobi sweeps exhausted the budget before the off-diagonal part vanished."""

    def __init__(self, message, sweeps, off_norm):
        super().__init__(message)
        self.sweeps = sweeps
        self.off_norm = off_norm


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray   # descending
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class SingularValueDecomposition:
    """Thin SVD ``M = left @ diag(singulars) @ right^H`` with min(rows, cols) columns."""

    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray
    sweeps: int = 0

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.singulars))

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singulars) @ self.right.conj().T


@lru_cache(maxsize=None)
def _rounds(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin schedule: n-1 (or n) rounds of disjoint (p, q) pairs, p < q."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            pairs.sort()
            p = np.array([a for a, _ in pairs], dtype=np.intp)
            q = np.array([b for _, b in pairs], dtype=np.intp)
            rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _rotation(a: np.ndarray, d: np.ndarray, b: np.ndarray):
    """Unitary 2x2 blocks G with G^H [[a, b], [b*, d]] G diagonal.

    ``a``, ``d`` real and ``b`` complex, all 1-d over the pairs of a round.
    Returns (g_pp, g_pq, g_qp, g_qq, new_a, new_d).
    """
    mag = np.abs(b)
    nz = mag > 0.0
    safe = np.where(nz, mag, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        zeta = (d - a) / (2.0 * safe)
        big = ~(np.abs(zeta) <= 1e150)
        t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
        t = np.where(big, 0.5 / np.where(big, zeta, 1.0), t)
    t = np.where(nz, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    phase = np.exp(-1j * np.angle(b))
    return c + 0j, s + 0j, -s * phase, c * phase, a - t * mag, d + t * mag


def _as_matrix(m) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def _off_norm(h: np.ndarray) -> float:
    off = h.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def hermitian_eig(h, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigen-decompose a Hermitian matrix by cyclic complex Jacobi rotations.

    Eigenvalues come back descending; equal values keep the column order they
    had on the diagonal after the last sweep (stable sort).
    """
    h = _as_matrix(h)
    n, m = h.shape
    if n != m:
        raise ValueError(f"hermitian_eig needs a square matrix, got {h.shape}")
    scale = float(np.linalg.norm(h))
    if float(np.linalg.norm(h - h.conj().T)) > HERMITIAN_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    h = 0.5 * (h + h.conj().T)
    v = np.eye(n, dtype=complex)
    sweeps = 0
    while _off_norm(h) > OFFDIAG_TOL * scale:
        if sweeps >= max_sweeps:
            raise LinalgConvergenceError(
                f"Jacobi eigen-solver did not converge in {max_sweeps} sweeps",
                sweeps, _off_norm(h))
        for p, q in _rounds(n):
            gpp, gpq, gqp, gqq, new_a, new_d = _rotation(h[p, p].real, h[q, q].real, h[p, q])
            hp, hq = h[:, p], h[:, q]
            h[:, p], h[:, q] = hp * gpp + hq * gqp, hp * gpq + hq * gqq
            rp, rq = h[p, :], h[q, :]
            h[p, :] = np.conj(gpp)[:, None] * rp + np.conj(gqp)[:, None] * rq
            h[q, :] = np.conj(gpq)[:, None] * rp + np.conj(gqq)[:, None] * rq
            h[p, q] = 0.0
            h[q, p] = 0.0
            h[p, p] = new_a
            h[q, q] = new_d
            vp, vq = v[:, p], v[:, q]
            v[:, p], v[:, q] = vp * gpp + vq * gqp, vp * gpq + vq * gqq
        sweeps += 1
    w = np.diagonal(h).real.copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweeps)


def _complete_basis(cols: np.ndarray, total: int) -> np.ndarray:
    """Extend orthonormal columns to ``total`` columns by Gram-Schmidt on e_1, e_2, ..."""
    dim = cols.shape[0]
    basis = [cols[:, k] for k in range(cols.shape[1])]
    for e in range(dim):
        if len(basis) == total:
            break
        x = np.zeros(dim, dtype=complex)
        x[e] = 1.0
        for _ in range(2):
            for b in basis:
                x = x - b * np.vdot(b, x)
        nrm = np.linalg.norm(x)
        if nrm > 1e-6:
            basis.append(x / nrm)
    return np.stack(basis, axis=1) if basis else np.zeros((dim, 0), dtype=complex)


def _one_sided(x: np.ndarray, max_sweeps: int):
    """Hestenes one-sided Jacobi on the columns of x (rows >= cols)."""
    w = x.copy()
    k = w.shape[1]
    v = np.eye(k, dtype=complex)
    sweeps = 0
    rounds = _rounds(k)
    while True:
        rotated = False
        for p, q in rounds:
            wp, wq = w[:, p], w[:, q]
            alpha = np.sum(np.abs(wp) ** 2, axis=0)
            beta = np.sum(np.abs(wq) ** 2, axis=0)
            gamma = np.sum(np.conj(wp) * wq, axis=0)
            active = np.abs(gamma) > ORTH_TOL * np.sqrt(alpha * beta)
            if not np.any(active):
                continue
            rotated = True
            gamma = np.where(active, gamma, 0.0)
            gpp, gpq, gqp, gqq, _, _ = _rotation(alpha, beta, gamma)
            w[:, p], w[:, q] = wp * gpp + wq * gqp, wp * gpq + wq * gqq
            vp, vq = v[:, p], v[:, q]
            v[:, p], v[:, q] = vp * gpp + vq * gqp, vp * gpq + vq * gqq
        if not rotated:
            break
        sweeps += 1
        if sweeps >= max_sweeps:
            raise LinalgConvergenceError(
                f"one-sided Jacobi SVD did not converge in {max_sweeps} sweeps", sweeps, float("nan"))
    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, w, v = sigma[order], w[:, order], v[:, order]
    smax = sigma[0] if sigma.size else 0.0
    keep = sigma > RANK_TOL * smax if smax > 0 else np.zeros(sigma.shape, dtype=bool)
    nkeep = int(np.count_nonzero(keep))  # sorted, so kept columns form a prefix
    u = w[:, :nkeep] / sigma[:nkeep]
    u = _complete_basis(u, k)
    sigma = np.where(keep, sigma, 0.0)
    return u, sigma, v, sweeps


def svd(m, max_sweeps: int = MAX_SWEEPS) -> SingularValueDecomposition:
    """Thin singular value decomposition by one-sided Jacobi rotations.

    Singular values at or below ``RANK_TOL * sigma_max`` are set to zero and
    their left vectors are completed to an orthonormal set.
    """
    m = _as_matrix(m)
    rows, cols = m.shape
    if cols <= rows:
        u, s, v, sweeps = _one_sided(m, max_sweeps)
        return SingularValueDecomposition(u, s, v, sweeps)
    # M^H = U S V^H  =>  M = V S U^H
    u, s, v, sweeps = _one_sided(m.conj().T, max_sweeps)
    return SingularValueDecomposition(v, s, u, sweeps)
