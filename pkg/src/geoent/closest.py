"""Closest unnormalised product state by alternating fixed-point sweeps.

Stationarity of D^2 with respect to factor X reads (conjugated form)

    x_i * prod_{Y != X} N_Y = sum_{others} chi_{..i..} * prod_{Y != X} conj(y_.)

so each update solves that equation for x with the other factors held fixed,
which is also the exact minimiser of D^2 in x. Updates are in place
(Gauss-Seidel), and every sweep ends by rebalancing the factor norms and
rotating the global phase so that <psi|phi> is real and nonnegative.

All restarts of one ``find_extrema`` call are advanced together as a batch;
a run is frozen as soon as it converges, so its trajectory does not depend on
the other runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .qstate import PureState, ProductState, ShapeMismatchError, factor_norms, overlap as _overlap

COLLAPSE_TOL = 1e-12
DEDUP_VALUE_TOL = 1e-8
DEDUP_FIDELITY_TOL = 1e-8
CS_TOL = 1e-9


class ZeroCollapseError(ArithmeticError):
    """A factor update contracted to the zero vector (the trivial stationary point phi = 0)."""


class NoConvergenceError(RuntimeError):
    def __init__(self, message, best_residual):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 32
    max_sweeps: int = 10000
    tol_delta: float = 1e-12      # |change of D^2| per sweep, relative to <psi|psi>
    tol_residual: float = 1e-10
    rng_seed: int = 0
    # add deterministic starts: the uniform product state and, for qubit
    # targets, the critical points of the real symmetric ansatz (these reach
    # repelling branches that no descent from a random start can converge to)
    structured_starts: bool = True

    def __post_init__(self):
        if self.restarts < 1 or self.max_sweeps < 1:
            raise ValueError("restarts and max_sweeps must be positive")
        if not (self.tol_delta > 0 and self.tol_residual > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True, eq=False)
class ExtremumResult:
    product: ProductState
    norms: tuple[float, ...]
    norm_product: float
    cos_theta: float
    dist_sq: float
    dist_sq_normalized: float
    overlap: complex
    residual: float
    sweeps: int
    converged: bool
    restart: int = 0
    start: str = "random"
    label: str = "generic"
    hits: int = 1

    @property
    def trivial(self) -> bool:
        return self.label == "trivial"

    @property
    def theta(self) -> float:
        return math.acos(min(self.cos_theta, 1.0))


@dataclass(frozen=True, eq=False)
class ExtremaReport:
    extrema: tuple[ExtremumResult, ...]
    best: ExtremumResult
    runs: tuple[ExtremumResult, ...] = field(repr=False, default=())

    @property
    def entanglement(self) -> float:
        """sin^2 theta_C = 1 - N_A N_B ... of the nearest product state."""
        return min(max(1.0 - self.best.norm_product, 0.0), 1.0)


class _Batch:
    """Contractions of one target tensor against batches of factor vectors."""

    def __init__(self, psi: PureState):
        self.dims = psi.dims
        self.nf = len(self.dims)
        self.psi_norm_sq = psi.norm_sq()
        self.psi_norm = math.sqrt(self.psi_norm_sq)
        tensor = psi.tensor
        # chi with axis X moved to the front; the others stay in ascending order
        self.moved = [np.ascontiguousarray(np.moveaxis(tensor, x, 0)) for x in range(self.nf)]

    def contract(self, factors: list[np.ndarray], x: int) -> np.ndarray:
        """sum over all factors but x of chi * conj(y) -> (R, d_x), last factor first."""
        r = factors[0].shape[0]
        others = [y for y in range(self.nf) if y != x]
        t = self.moved[x]
        if not others:
            return np.broadcast_to(t, (r,) + t.shape).copy()
        last = factors[others[-1]]
        t = (t.reshape(-1, last.shape[1]) @ np.conj(last).T).T  # (R, d_x * rest)
        for y in reversed(others[:-1]):
            f = factors[y]
            t = (t.reshape(r, -1, f.shape[1]) @ np.conj(f)[:, :, None])[:, :, 0]
        return t.reshape(r, self.dims[x])

    @staticmethod
    def norms(factors: list[np.ndarray]) -> np.ndarray:
        return np.stack([np.sum(np.abs(f) ** 2, axis=1) for f in factors], axis=1)

    def overlap(self, factors: list[np.ndarray]) -> np.ndarray:
        """<psi|phi> per batch row."""
        c = self.contract(factors, 0)
        return np.sum(factors[0] * np.conj(c), axis=1)

    def gauge_fix(self, factors, overlap):
        n = self.norms(factors)
        target = np.prod(n, axis=1) ** (1.0 / self.nf)
        out = []
        for x, f in enumerate(factors):
            with np.errstate(divide="ignore", invalid="ignore"):
                scale = np.where(n[:, x] > 0, np.sqrt(target / n[:, x]), 1.0)
            out.append(f * scale[:, None])
        mag = np.abs(overlap)
        phase = np.where(mag > 0, np.conj(overlap) / np.where(mag > 0, mag, 1.0), 1.0)
        out[0] = out[0] * phase[:, None]
        return out, overlap * phase

    def sweep(self, factors):
        """One Gauss-Seidel pass. Returns (factors, overlap, collapsed)."""
        factors = list(factors)
        r = factors[0].shape[0]
        n = self.norms(factors)
        collapsed = np.zeros(r, dtype=bool)
        c = None
        for x in range(self.nf):
            c = self.contract(factors, x)
            others = np.prod(np.delete(n, x, axis=1), axis=1)
            cnorm = np.linalg.norm(c, axis=1)
            bound = self.psi_norm * np.sqrt(others)
            collapsed |= ~(cnorm > COLLAPSE_TOL * bound)
            safe = np.where(collapsed, 1.0, others)
            factors[x] = np.where(collapsed[:, None], 0.0, c / safe[:, None])
            n[:, x] = np.sum(np.abs(factors[x]) ** 2, axis=1)
        ov = np.sum(factors[-1] * np.conj(c), axis=1)
        factors, ov = self.gauge_fix(factors, ov)
        return factors, ov, collapsed

    def residual(self, factors) -> np.ndarray:
        n = self.norms(factors)
        total = np.prod(n, axis=1)
        worst = np.zeros(factors[0].shape[0])
        for x in range(self.nf):
            c = self.contract(factors, x)
            others = np.prod(np.delete(n, x, axis=1), axis=1)
            lhs = factors[x] * others[:, None]
            worst = np.maximum(worst, np.linalg.norm(lhs - c, axis=1))
        return worst / np.maximum(1.0, total)

    def dist_sq(self, overlap, factors) -> np.ndarray:
        total = np.prod(self.norms(factors), axis=1)
        return np.maximum(self.psi_norm_sq - 2.0 * overlap.real + total, 0.0)


def _as_batch(phi: ProductState) -> list[np.ndarray]:
    return [np.array(f, dtype=complex)[None, :] for f in phi.factors]


def _from_batch(factors, row: int) -> ProductState:
    return ProductState(tuple(f[row].copy() for f in factors))


def _check(psi: PureState, phi: ProductState) -> None:
    if psi.shape != phi.shape:
        raise ShapeMismatchError(f"state dims {psi.dims} vs product dims {phi.dims}")


def sweep(psi: PureState, phi: ProductState) -> ProductState:
    """One in-place pass over the factors, followed by a gauge fix.

    Raises ZeroCollapseError if some factor contracts to zero.
    """
    _check(psi, phi)
    if any(n == 0.0 for n in factor_norms(phi)):
        raise ZeroCollapseError("sweep needs nonzero factors")
    batch = _Batch(psi)
    factors, _, collapsed = batch.sweep(_as_batch(phi))
    if collapsed[0]:
        raise ZeroCollapseError("factor update collapsed to the zero vector (phi = 0 is stationary)")
    return _from_batch(factors, 0)


def residual(psi: PureState, phi: ProductState) -> float:
    """Largest violation ||x * prod_{Y!=X} N_Y - contraction_X||, scaled by max(1, prod N)."""
    _check(psi, phi)
    return float(_Batch(psi).residual(_as_batch(phi))[0])


def gauge_fix(psi: PureState, phi: ProductState) -> ProductState:
    """Equalise all N_X to (prod N)^(1/F) and make <psi|phi> real nonnegative."""
    _check(psi, phi)
    if any(n == 0.0 for n in factor_norms(phi)):
        raise ZeroCollapseError("cannot gauge-fix a product state with a zero factor")
    batch = _Batch(psi)
    factors = _as_batch(phi)
    factors, _ = batch.gauge_fix(factors, batch.overlap(factors))
    return _from_batch(factors, 0)


def _label(phi: ProductState, norm_product: float) -> str:
    if norm_product == 0.0:
        return "trivial"
    units = [f / np.linalg.norm(f) for f in phi.factors]
    if all(np.max(np.abs(u) ** 2) > 1.0 - DEDUP_FIDELITY_TOL for u in units):
        return "basis"
    if len(set(phi.dims)) == 1 and all(
            abs(np.vdot(units[0], u)) ** 2 > 1.0 - DEDUP_FIDELITY_TOL for u in units[1:]):
        return "symmetric"
    return "generic"


def product_fidelity(phi: ProductState, chi: ProductState) -> float:
    """|<phi_hat|chi_hat>|^2 for the normalised product states (factorwise)."""
    fid = 1.0
    for a, b in zip(phi.factors, chi.factors):
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            return 1.0 if na == nb else 0.0
        fid *= abs(np.vdot(a, b)) ** 2 / (na * na * nb * nb)
    return float(fid)


def make_result(psi: PureState, phi: ProductState, residual_value: float, sweeps: int,
                converged: bool, restart: int = 0, start: str = "random") -> ExtremumResult:
    norms = tuple(factor_norms(phi))
    total = float(math.prod(norms))
    cos_theta = math.sqrt(total)
    return ExtremumResult(
        product=phi, norms=norms, norm_product=total, cos_theta=cos_theta,
        dist_sq=max(1.0 - total, 0.0), dist_sq_normalized=max(2.0 * (1.0 - cos_theta), 0.0),
        overlap=_overlap(psi, phi), residual=float(residual_value), sweeps=sweeps,
        converged=converged, restart=restart, start=start, label=_label(phi, total))


def symmetric_ansatz_points(psi: PureState, grid: int = 2049) -> list[float]:
    """Interior critical angles t of |<psi|(cos t, sin t)^(x)q>|^2 for qubit targets.

    Along this one-parameter family the overlap is
    sum_w S_w cos^(q-w) t sin^w t, with S_w the conjugated amplitude sum over
    basis states of Hamming weight w. Sign changes of the derivative on a
    grid are refined with Brent's method.
    """
    if not psi.shape.all_qubits:
        return []
    q = len(psi.dims)
    weights = np.array([bin(i).count("1") for i in range(psi.shape.n)])
    s_w = np.bincount(weights, weights=np.conj(psi.amplitudes).real, minlength=q + 1) + \
        1j * np.bincount(weights, weights=np.conj(psi.amplitudes).imag, minlength=q + 1)
    w = np.arange(q + 1)

    def parts(t):
        c = np.cos(np.asarray(t, dtype=float))[..., None]
        s = np.sin(np.asarray(t, dtype=float))[..., None]
        ov = np.sum(s_w * c ** (q - w) * s ** w, axis=-1)
        dov = np.sum(s_w * (w * c ** (q - w + 1) * s ** np.maximum(w - 1, 0) * (w > 0)
                            - (q - w) * c ** np.maximum(q - w - 1, 0) * s ** (w + 1) * (w < q)),
                     axis=-1)
        return ov, dov

    def slope(t):
        ov, dov = parts(t)
        return 2.0 * (np.conj(ov) * dov).real

    ts = np.linspace(0.0, 0.5 * math.pi, grid)[1:-1]
    vals = slope(ts)
    # a slope at rounding level is a flat stretch (e.g. Bell-like states), not a root
    noise = 1e-10 * (1.0 + q) * float(np.sum(np.abs(s_w))) ** 2
    vals = np.where(np.abs(vals) <= noise, 0.0, vals)
    roots = []
    nz = np.flatnonzero(vals)
    for a, b in zip(nz[:-1], nz[1:]):
        if b - a <= 3 and vals[a] * vals[b] < 0.0:  # allow a root sitting on a grid point
            roots.append(float(brentq(lambda x: float(slope(x)), ts[a], ts[b],
                                      xtol=1e-15, rtol=1e-15)))
    # a trigonometric polynomial of degree 2q has at most 4q roots per period
    if len(roots) > 4 * q:
        return []
    return [t for t in roots if abs(complex(parts(t)[0])) > 1e-12]


def _starts(psi: PureState, cfg: SolverConfig):
    rng = np.random.default_rng(cfg.rng_seed)
    dims = psi.dims
    rows = [[(rng.standard_normal(d) + 1j * rng.standard_normal(d)) / math.sqrt(2.0) for d in dims]
            for _ in range(cfg.restarts)]
    labels = ["random"] * cfg.restarts
    if cfg.structured_starts:
        rows.append([np.ones(d, dtype=complex) / math.sqrt(d) for d in dims])
        labels.append("uniform")
        for t in symmetric_ansatz_points(psi):
            rows.append([np.array([math.cos(t), math.sin(t)], dtype=complex) for _ in dims])
            labels.append("symmetric-ansatz")
    factors = [np.stack([row[x] for row in rows]) for x in range(len(dims))]
    return factors, labels


def run_restarts(psi: PureState, cfg: SolverConfig = SolverConfig()) -> list[ExtremumResult]:
    """Every restart's end point, converged or not, in restart order."""
    batch = _Batch(psi)
    factors, labels = _starts(psi, cfg)
    total = len(labels)
    factors, _ = batch.gauge_fix(factors, batch.overlap(factors))
    prev = batch.dist_sq(batch.overlap(factors), factors)
    res = np.full(total, np.inf)
    sweeps = np.zeros(total, dtype=int)
    state = np.zeros(total, dtype=int)  # 0 active, 1 converged, 2 collapsed
    active = np.arange(total)
    scale = cfg.tol_delta * batch.psi_norm_sq
    for k in range(1, cfg.max_sweeps + 1):
        sub = [f[active] for f in factors]
        sub, ov, collapsed = batch.sweep(sub)
        for f, s in zip(factors, sub):
            f[active] = s
        sweeps[active] = k
        d2 = batch.dist_sq(ov, sub)
        state[active[collapsed]] = 2
        res[active[collapsed]] = 0.0
        near = (np.abs(d2 - prev[active]) <= scale) & ~collapsed
        prev[active] = d2
        if np.any(near):
            idx = np.flatnonzero(near)
            r = batch.residual([s[idx] for s in sub])
            res[active[idx]] = r
            state[active[idx[r <= cfg.tol_residual]]] = 1
        active = np.flatnonzero(state == 0)
        if active.size == 0:
            break
    if active.size:
        res[active] = batch.residual([f[active] for f in factors])
    results = []
    for i in range(total):
        if state[i] == 2:
            phi = ProductState(tuple(np.zeros(d, dtype=complex) for d in psi.dims))
            results.append(make_result(psi, phi, 0.0, int(sweeps[i]), True, i, labels[i]))
        else:
            phi = _from_batch(factors, i)
            results.append(make_result(psi, phi, res[i], int(sweeps[i]), bool(state[i] == 1),
                                       i, labels[i]))
    return results


def dedupe(results: list[ExtremumResult]) -> list[ExtremumResult]:
    """Merge converged results with equal norm product and fidelity ~ 1; sort descending."""
    ordered = sorted((r for r in results if r.converged), key=lambda r: (-r.norm_product, r.restart))
    kept: list[ExtremumResult] = []
    for r in ordered:
        for j, k in enumerate(kept):
            if abs(k.norm_product - r.norm_product) < DEDUP_VALUE_TOL and (
                    (k.trivial and r.trivial)
                    or product_fidelity(k.product, r.product) > 1.0 - DEDUP_FIDELITY_TOL):
                kept[j] = replace(k, hits=k.hits + 1)
                break
        else:
            kept.append(r)
    return kept


def find_extrema(psi: PureState, cfg: SolverConfig = SolverConfig()) -> ExtremaReport:
    """Multi-restart search for stationary points of D^2.

    ``best`` is the extremum with the largest norm product (the nearest
    product state found); the trivial point phi = 0 is only used when nothing
    else converged.
    """
    if psi.raw and abs(psi.norm_sq() - 1.0) > 1e-9:
        raise ValueError("find_extrema needs a normalised state")
    runs = run_restarts(psi, cfg)
    extrema = dedupe(runs)
    if not extrema:
        best_res = min(r.residual for r in runs)
        raise NoConvergenceError(
            f"no restart converged within {cfg.max_sweeps} sweeps (best residual {best_res:.3e})",
            best_res)
    nontrivial = [e for e in extrema if not e.trivial]
    best = nontrivial[0] if nontrivial else extrema[0]
    return ExtremaReport(tuple(extrema), best, tuple(runs))


def cauchy_schwarz_check(result: ExtremumResult) -> bool:
    """N_A N_B ... <= 1 (up to CS_TOL), as required at any extremum."""
    return result.norm_product <= 1.0 + CS_TOL
