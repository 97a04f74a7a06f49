"""Independent reference computations used by the tests (no geoent solver code)."""

import numpy as np
from scipy.optimize import minimize


def _qubit(theta, phi):
    return np.stack([np.cos(theta), np.exp(1j * phi) * np.sin(theta)], axis=-1)


def max_product_fidelity_3q(amps, n_theta=9, n_phi=8, polish=6):
    """max |<psi|a b c>|^2 over normalised qubit factors: dense grid, then Nelder-Mead."""
    t = np.linspace(0.0, np.pi / 2, n_theta)
    p = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(t, p, indexing="ij")
    grid = _qubit(tt.ravel(), pp.ravel())                      # (G, 2)
    chi = np.conj(np.asarray(amps).reshape(2, 2, 2))
    vals = np.abs(np.einsum("ijk,ai,bj,ck->abc", chi, grid, grid, grid)) ** 2
    params = np.stack([tt.ravel(), pp.ravel()], axis=1)
    best_idx = np.argsort(vals.ravel())[::-1][:polish]

    def neg(x):
        a, b, c = _qubit(x[0::2], x[1::2])
        return -abs(np.einsum("ijk,i,j,k->", chi, a, b, c)) ** 2

    best = float(vals.max())
    for flat in best_idx:
        ia, ib, ic = np.unravel_index(flat, vals.shape)
        x0 = np.concatenate([params[ia], params[ib], params[ic]])
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
        best = max(best, -float(res.fun))
    return best


def reduced_eigs_numpy(matrix):
    """Eigenvalues of M M^H from numpy's LAPACK path, descending."""
    return np.linalg.eigvalsh(matrix @ matrix.conj().T)[::-1]
