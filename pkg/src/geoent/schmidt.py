"""Bipartite Schmidt machinery and the sequential single-qubit Schmidt chain."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .qstate import PureState

DEFAULT_CHAIN_CAP = 8
EXHAUSTIVE_CAP = 4


@dataclass(frozen=True)
class BipartiteSplit:
    """Subsystem A = ``left`` factor indices, B = the rest."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def of(cls, left: Iterable[int], num_factors: int) -> "BipartiteSplit":
        left = tuple(sorted(set(int(i) for i in left)))
        right = tuple(i for i in range(num_factors) if i not in left)
        return cls(left, right)

    @classmethod
    def parse(cls, text: str, num_factors: int) -> "BipartiteSplit":
        """``"0,2|1,3"`` (or just ``"0,2"``, the complement being implied)."""
        lhs, sep, rhs = text.partition("|")
        try:
            left = tuple(int(t) for t in lhs.split(",") if t.strip())
            right = tuple(int(t) for t in rhs.split(",") if t.strip()) if sep else None
        except ValueError:
            raise ValueError(f"bad split {text!r}") from None
        split = cls.of(left, num_factors)
        if right is not None and tuple(sorted(right)) != split.right:
            raise ValueError(f"split {text!r} does not partition factors 0..{num_factors - 1}")
        if len(set(left)) != len(left):
            raise ValueError(f"split {text!r} repeats a factor")
        split.validate(num_factors)
        return split

    def validate(self, num_factors: int) -> None:
        both = self.left + self.right
        if not self.left or not self.right:
            raise ValueError("both sides of a split must be nonempty")
        if sorted(both) != list(range(num_factors)):
            raise ValueError(f"split {self} does not partition factors 0..{num_factors - 1}")

    def sizes(self, dims: Sequence[int]) -> tuple[int, int]:
        return math.prod(dims[i] for i in self.left), math.prod(dims[i] for i in self.right)


def matricize(psi: PureState, split: BipartiteSplit) -> np.ndarray:
    """chi as a u x v matrix: rows over ``split.left`` (ascending), columns over the rest."""
    split.validate(len(psi.dims))
    u, v = split.sizes(psi.dims)
    return np.transpose(psi.tensor, split.left + split.right).reshape(u, v)


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    matrix: np.ndarray
    side: str  # "A" or "B"

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def reduced_density(psi: PureState, split: BipartiteSplit, side: str = "A") -> ReducedDensity:
    """(rho_A)_{ii'} = sum_j chi_ij conj(chi_i'j);  (rho_B)_{jj'} = sum_i chi_ij conj(chi_ij')."""
    m = matricize(psi, split)
    side = side.upper()
    if side == "A":
        rho = m @ m.conj().T
    elif side == "B":
        rho = m.T @ m.conj()
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return ReducedDensity(rho, side)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """psi = sum_k sqrt(p_k) |alpha_k> (x) |beta_k>, nonzero p_k only, descending."""

    coefficients: np.ndarray
    left_vectors: np.ndarray   # columns |alpha_k>
    right_vectors: np.ndarray  # columns |beta_k>
    split: BipartiteSplit

    def reconstruct_matrix(self) -> np.ndarray:
        return (self.left_vectors * np.sqrt(self.coefficients)) @ self.right_vectors.T

    def entropy(self) -> float:
        return von_neumann_entropy(self.coefficients)


def schmidt_decompose(psi: PureState, split: BipartiteSplit) -> SchmidtDecomposition:
    """Schmidt form from the SVD of the matricised amplitudes.

    With chi = A S B^H, alpha_k is column k of A, beta_k is conj(column k of
    B) and p_k = s_k^2.
    """
    m = matricize(psi, split)
    dec = linalg.svd(m)
    keep = dec.singulars > 0.0
    p = dec.singulars[keep] ** 2
    return SchmidtDecomposition(p, dec.left[:, keep], np.conj(dec.right[:, keep]), split)


def von_neumann_entropy(p) -> float:
    """S = -sum p_k log2 p_k in bits, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12):
        raise ValueError("Schmidt coefficients must be nonnegative")
    if abs(float(np.sum(p)) - 1.0) > 1e-9:
        raise ValueError(f"coefficients sum to {float(np.sum(p))!r}, not 1")
    p = p[p > 0.0]
    return max(float(-np.sum(p * np.log2(p))), 0.0) + 0.0  # no -0.0


@dataclass(frozen=True)
class QubitSplitResult:
    """Roots of the quadratic for N_A N_B when one qubit is split off.

    ``theta_max`` follows the identification cos(theta_max) = mu_plus;
    ``theta_critical`` uses cos(theta) = sqrt(mu_plus) instead, which is the
    convention of the critical angle of the distance measure. The two differ;
    both are reported.
    """

    c_invariant: float
    mu_plus: float
    mu_minus: float
    theta_max: float
    theta_critical: float


def qubit_split_quadratic(psi: PureState, qubit: int) -> QubitSplitResult:
    """mu_pm = (1 +- sqrt(1 - 4C)) / 2 with C = sum_{j>k} |chi_0j chi_1k - chi_1j chi_0k|^2."""
    if not 0 <= qubit < len(psi.dims):
        raise ValueError(f"no factor {qubit}")
    if psi.dims[qubit] != 2:
        raise ValueError(f"factor {qubit} has dimension {psi.dims[qubit]}, not 2")
    m = matricize(psi, BipartiteSplit.of([qubit], len(psi.dims)))
    r0, r1 = m[0], m[1]
    c_inv = 0.0
    block = 256
    for start in range(0, r0.size, block):
        j = slice(start, start + block)
        minors = np.outer(r0[j], r1) - np.outer(r1[j], r0)
        rows = np.arange(start, min(start + block, r0.size))[:, None]
        mask = np.arange(r0.size)[None, :] < rows  # k < j
        c_inv += float(np.sum(np.abs(minors[mask]) ** 2))
    # 1 - 4C equals (|r0|^2 - |r1|^2)^2 + 4|<r1|r0>|^2 (Lagrange identity); that form
    # has no cancellation, so mu_pm stay accurate when the two roots nearly coincide
    a, d = float(np.vdot(r0, r0).real), float(np.vdot(r1, r1).real)
    disc = math.hypot(a - d, 2.0 * abs(np.vdot(r1, r0)))
    mu_plus = 0.5 * (1.0 + disc)
    mu_minus = c_inv / mu_plus
    return QubitSplitResult(c_inv, mu_plus, mu_minus, math.acos(min(mu_plus, 1.0)),
                            math.acos(min(math.sqrt(mu_plus), 1.0)))


@dataclass(frozen=True)
class ChainStage:
    qubit: int                  # original factor index split off at this stage
    coefficients: tuple[float, ...]
    selected: int


@dataclass(frozen=True)
class SchmidtChain:
    order: tuple[int, ...]
    stages: tuple[ChainStage, ...]
    chain_norm: float

    @property
    def entanglement_chain(self) -> float:
        return 1.0 - self.chain_norm


def _check_qubits(psi: PureState) -> None:
    if not psi.shape.all_qubits:
        raise ValueError(f"the Schmidt chain needs qubit factors, got dims {psi.dims}")
    if len(psi.dims) < 2:
        raise ValueError("the Schmidt chain needs at least two qubits")


def _check_order(order: Sequence[int], nq: int) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(nq)):
        raise ValueError(f"order {order} is not a permutation of 0..{nq - 1}")
    return order


def _stage(amps: np.ndarray, remaining: list[int], qubit: int):
    """Split ``qubit`` off a state on ``remaining`` (ascending original indices)."""
    pos = remaining.index(qubit)
    nr = len(remaining)
    sub = PureState((2,) * nr, amps, raw=True)
    dec = schmidt_decompose(sub, BipartiteSplit.of([pos], nr))
    rest = [i for i in remaining if i != qubit]
    return dec, rest


def _branches(p: np.ndarray, mode: str) -> list[int]:
    if mode == "dominant":
        return [int(np.argmax(p))]  # argmax picks the lowest index on ties
    return list(range(p.size))


def schmidt_chain(psi: PureState, order: Sequence[int], branches: str = "dominant") -> SchmidtChain:
    """Sequential Schmidt decompositions, splitting off ``order[0]``, ``order[1]``, ...

    At each stage the branch with the largest coefficient is kept and its
    (normalised) remainder is decomposed next. ``branches="exhaustive"``
    instead follows every branch and returns the path with the largest
    product of selected coefficients (at most 4 qubits).
    """
    _check_qubits(psi)
    nq = len(psi.dims)
    order = _check_order(order, nq)
    if branches not in ("dominant", "exhaustive"):
        raise ValueError(f"unknown branch mode {branches!r}")
    if branches == "exhaustive" and nq > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive branching is limited to {EXHAUSTIVE_CAP} qubits")

    def walk(amps, remaining, depth):
        qubit = order[depth]
        dec, rest = _stage(amps, remaining, qubit)
        p = dec.coefficients
        best = None
        for k in _branches(p, branches):
            if len(rest) == 1:
                tail_norm, tail = 1.0, ()
            else:
                tail_norm, tail = walk(dec.right_vectors[:, k].copy(), rest, depth + 1)
            value = float(p[k]) * tail_norm
            if best is None or value > best[0]:
                stage = ChainStage(qubit, tuple(float(x) for x in p), k)
                best = (value, (stage,) + tail)
        return best

    chain_norm, stages = walk(np.array(psi.amplitudes), list(range(nq)), 0)
    return SchmidtChain(order, stages, chain_norm)


def chain_min_over_orders(psi: PureState, cap: int = DEFAULT_CHAIN_CAP,
                          override: bool = False) -> tuple[tuple[int, ...], SchmidtChain]:
    """Order minimising the chain entanglement; ties go to the lexicographically smallest.

    Orders are walked depth-first in lexicographic order, so stages shared by
    a common prefix are decomposed once. The last two entries of an order
    describe the same final split, so only one of them is explored.
    """
    _check_qubits(psi)
    nq = len(psi.dims)
    if nq > cap and not override:
        raise ValueError(f"{nq} qubits exceeds the order-enumeration cap of {cap}")
    best: list = [None]

    def visit(amps, remaining, prefix, stages, norm):
        if len(remaining) == 2:
            a, b = remaining
            dec, _ = _stage(amps, remaining, a)
            p = dec.coefficients
            k = int(np.argmax(p))
            value = norm * float(p[k])
            full = (ChainStage(a, tuple(float(x) for x in p), k),)
            chain = SchmidtChain(prefix + (a, b), stages + full, value)
            if best[0] is None or value > best[0].chain_norm + 1e-12:
                best[0] = chain
            return
        for qubit in remaining:
            dec, rest = _stage(amps, remaining, qubit)
            p = dec.coefficients
            k = int(np.argmax(p))
            stage = ChainStage(qubit, tuple(float(x) for x in p), k)
            visit(dec.right_vectors[:, k].copy(), rest, prefix + (qubit,), stages + (stage,),
                  norm * float(p[k]))

    visit(np.array(psi.amplitudes), list(range(nq)), (), (), 1.0)
    return best[0].order, best[0]


def all_chain_orders(psi: PureState):
    """(order, SchmidtChain) for every permutation, in lexicographic order (small states)."""
    _check_qubits(psi)
    for order in itertools.permutations(range(len(psi.dims))):
        yield order, schmidt_chain(psi, order)
