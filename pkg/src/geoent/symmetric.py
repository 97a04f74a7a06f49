"""The four exactly solvable symmetric q-qubit families and their closed forms.

Every closed form here is an extremum of the all-equal-factor ansatz
a = b = c = ... = (alpha0, alpha1), N = alpha0^2 + alpha1^2, and N^q is the
norm product of that extremal branch. It is the nearest product state for
the W and Dicke families, but not for GHZ-type states, whose nearest product
state is a computational basis state with norm product max(p, 1 - p).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .qstate import PureState, ProductState

BRANCH_LABEL = "symmetric-ansatz branch"
LGAMMA_THRESHOLD = 20


@dataclass(frozen=True)
class SymmetricFamily:
    """kind is one of "ghz" (param p in (0, 1)), "w", "ring", "dicke" (param = excitations)."""

    kind: str
    q: int
    param: Optional[float] = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in ("ghz", "w", "ring", "dicke"):
            raise ValueError(f"unknown family {self.kind!r}")
        if self.q < 3:
            raise ValueError(f"closed forms need q >= 3, got {self.q}")
        if kind == "ghz":
            if self.param is None or not 0.0 < float(self.param) < 1.0:
                raise ValueError("ghz needs a weight p strictly between 0 and 1")
            object.__setattr__(self, "param", float(self.param))
        elif kind == "dicke":
            if self.param is None or int(self.param) != self.param:
                raise ValueError("dicke needs an integer excitation count")
            p = int(self.param)
            if not 1 <= p <= self.q - 1:
                raise ValueError(f"dicke excitation count must be in 1..{self.q - 1}, got {p}")
            object.__setattr__(self, "param", p)
        elif self.param is not None:
            raise ValueError(f"{kind} takes no parameter")

    @classmethod
    def parse(cls, spec: str, q: int) -> "SymmetricFamily":
        """``ghz:0.5``, ``w``, ``ring`` or ``dicke:2``."""
        kind, _, arg = spec.strip().partition(":")
        kind = kind.lower()
        if kind in ("ghz", "dicke"):
            if not arg:
                raise ValueError(f"{kind} needs a parameter, e.g. {kind}:{'0.5' if kind == 'ghz' else '2'}")
            try:
                value = float(arg) if kind == "ghz" else int(arg)
            except ValueError:
                raise ValueError(f"bad parameter in family spec {spec!r}") from None
            return cls(kind, q, value)
        if arg:
            raise ValueError(f"{kind} takes no parameter")
        return cls(kind, q)

    @property
    def name(self) -> str:
        if self.kind == "ghz":
            return f"ghz:{self.param:g}"
        if self.kind == "dicke":
            return f"dicke:{self.param}"
        return self.kind


@dataclass(frozen=True)
class SymmetricAnsatz:
    alpha0: float
    alpha1: float

    @property
    def norm(self) -> float:
        return self.alpha0 ** 2 + self.alpha1 ** 2

    def product(self, q: int) -> ProductState:
        f = np.array([self.alpha0, self.alpha1], dtype=complex)
        return ProductState(tuple(f.copy() for _ in range(q)))


@dataclass(frozen=True)
class ClosedFormResult:
    family: SymmetricFamily
    n_q_exact: float
    n_q_asymptotic: Optional[float]
    ansatz: SymmetricAnsatz
    label: str = BRANCH_LABEL

    @property
    def entanglement_branch(self) -> float:
        return 1.0 - self.n_q_exact


def _basis_index(bits: Iterable[int], q: int) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


def build_state(family: SymmetricFamily) -> PureState:
    q = family.q
    amps = np.zeros(2 ** q)
    if family.kind == "ghz":
        amps[0] = math.sqrt(family.param)
        amps[-1] = math.sqrt(1.0 - family.param)
    elif family.kind == "w":
        for k in range(q):
            amps[1 << k] = 1.0
        amps /= math.sqrt(q)
    elif family.kind == "ring":
        for k in range(q):
            bits = [0] * q
            bits[k] = bits[(k + 1) % q] = 1
            amps[_basis_index(bits, q)] = 1.0
        amps /= math.sqrt(q)
    else:
        p = family.param
        for ones in itertools.combinations(range(q), p):
            amps[sum(1 << (q - 1 - i) for i in ones)] = 1.0
        amps /= math.sqrt(math.comb(q, p))
    return PureState((2,) * q, amps)


def _comb(n: int, k: int) -> float:
    if n > LGAMMA_THRESHOLD:
        return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))
    return float(math.comb(n, k))


def _exact_nq(family: SymmetricFamily) -> float:
    q = family.q
    if family.kind == "ghz":
        p = family.param
        e = 1.0 / (q - 2)
        return p * (1.0 - p) / (p ** e + (1.0 - p) ** e) ** (q - 2)
    if family.kind == "w":
        return (1.0 - 1.0 / q) ** (q - 1)
    if family.kind == "ring":
        # 4 (q-2)^(q-2) / q^(q-1) in exact integers; int / int rounds correctly
        return 4 * (q - 2) ** (q - 2) / q ** (q - 1)
    p = family.param
    x = p / q
    return x ** (p - 1) * (1.0 - x) ** (q - p) * _comb(q - 1, p - 1)


def _ansatz(family: SymmetricFamily, nq: float) -> SymmetricAnsatz:
    q = family.q
    n = nq ** (1.0 / q)
    if family.kind == "ghz":
        # alpha_s^(q-2) = N^(q-1) / amplitude_s for s = 0, 1
        p = family.param
        a0 = (n ** (q - 1) / math.sqrt(p)) ** (1.0 / (q - 2))
        a1 = (n ** (q - 1) / math.sqrt(1.0 - p)) ** (1.0 / (q - 2))
        return SymmetricAnsatz(a0, a1)
    # fraction u = alpha0^2 / N of the weight on |0>
    if family.kind == "w":
        u = 1.0 - 1.0 / q
    elif family.kind == "ring":
        u = (q - 2) / q
    else:
        u = 1.0 - family.param / q
    return SymmetricAnsatz(math.sqrt(u * n), math.sqrt((1.0 - u) * n))


def asymptotic_nq(family: SymmetricFamily, q_infinite: bool = False) -> tuple[float, bool]:
    """Large-q approximation of N^q and whether a large-q formula exists for the family.

    For "ring" there is none; the exact value is returned with ``False``.
    """
    q = family.q
    if family.kind == "ghz":
        p = family.param
        return math.sqrt(p * (1.0 - p)) / 2.0 ** (q - 2), True
    if family.kind == "w":
        return (math.exp(-1.0) if q_infinite else (1.0 - 1.0 / q) ** (q - 1)), True
    if family.kind == "dicke":
        p = family.param
        return p ** (p - 1) * math.exp(-p) / math.factorial(p - 1), True
    return _exact_nq(family), False


def closed_form_nq(family: SymmetricFamily) -> ClosedFormResult:
    nq = _exact_nq(family)
    asym, has_formula = asymptotic_nq(family)
    return ClosedFormResult(family, nq, asym if has_formula else None, _ansatz(family, nq))


DEFAULT_FIG2_FAMILIES = ("w", "dicke:2", "ghz:0.5", "ring")


def fig2_table(q_min: int = 3, q_max: int = 20, families: Iterable[str] = DEFAULT_FIG2_FAMILIES):
    """Rows (q, family name, 1 - N^q) ordered by family (as given), then q."""
    if not 3 <= q_min <= q_max:
        raise ValueError(f"need 3 <= q_min <= q_max, got {q_min}, {q_max}")
    rows = []
    for spec in families:
        for q in range(q_min, q_max + 1):
            fam = SymmetricFamily.parse(spec, q)
            rows.append((q, fam.name, closed_form_nq(fam).entanglement_branch))
    return rows
