"""Dense pure states, unnormalised product states and the distance between them.

Amplitudes are stored flat in row-major mixed-radix order: the multi-index
``(i, j, k)`` over factor dimensions ``(u, v, w)`` lives at ``i*v*w + j*w + k``,
so the first factor is the most significant digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-9


class ShapeMismatchError(ValueError):
    """Raised when a state and a product state live on different factor shapes."""


class StateFormatError(ValueError):
    """Malformed state text. ``lineno`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FactorShape:
    """Ordered factor dimensions ``(u, v, w, ...)`` with total dimension ``n``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("a state needs at least one factor")
        if any(d < 2 for d in dims):
            raise ValueError(f"every factor dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return math.prod(self.dims)

    @property
    def num_factors(self) -> int:
        return len(self.dims)

    @property
    def all_qubits(self) -> bool:
        return all(d == 2 for d in self.dims)

    def flat_index(self, multi: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.dims))

    def multi_index(self, flat: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat, self.dims))


@dataclass(frozen=True, eq=False)
class PureState:
    """A target state |psi> as a dense amplitude vector over ``shape``.

    Normalisation is checked (to ``NORM_TOL``) but never silently corrected;
    pass ``raw=True`` to skip the check, e.g. for expanded product states.
    """

    shape: FactorShape
    amplitudes: np.ndarray
    raw: bool = False

    def __post_init__(self):
        if not isinstance(self.shape, FactorShape):
            object.__setattr__(self, "shape", FactorShape(tuple(self.shape)))
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.shape.n:
            raise ShapeMismatchError(
                f"{amps.size} amplitudes for dims {self.shape.dims} (expected {self.shape.n})")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if not self.raw:
            norm_sq = float(np.vdot(amps, amps).real)
            if abs(norm_sq - 1.0) > NORM_TOL:
                raise ValueError(f"state is not normalised: <psi|psi> = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_amplitudes(cls, dims: Iterable[int], amplitudes, raw: bool = False) -> "PureState":
        return cls(FactorShape(tuple(dims)), np.asarray(amplitudes), raw=raw)

    @classmethod
    def basis(cls, dims: Iterable[int], multi: Sequence[int]) -> "PureState":
        shape = FactorShape(tuple(dims))
        amps = np.zeros(shape.n, dtype=complex)
        amps[shape.flat_index(multi)] = 1.0
        return cls(shape, amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``dims`` (a read-only view)."""
        return self.amplitudes.reshape(self.shape.dims)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def renormalize(self) -> "PureState":
        norm_sq = self.norm_sq()
        if norm_sq == 0.0:
            raise ValueError("cannot renormalise the zero vector")
        return PureState(self.shape, self.amplitudes / math.sqrt(norm_sq))

    def inner(self, other: "PureState") -> complex:
        """<self|other>."""
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{self.dims} vs {other.dims}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return (self.shape == other.shape and self.raw == other.raw
                and np.array_equal(self.amplitudes, other.amplitudes))

    def __repr__(self):
        nnz = int(np.count_nonzero(self.amplitudes))
        return f"PureState(dims={self.dims}, nonzero={nnz}, raw={self.raw})"


@dataclass(frozen=True, eq=False)
class ProductState:
    """|phi> = |A> (x) |B> (x) ... with deliberately unnormalised factors."""

    factors: tuple[np.ndarray, ...]
    shape: FactorShape = field(init=False)

    def __post_init__(self):
        vecs = tuple(_frozen(np.array(f, dtype=complex).reshape(-1)) for f in self.factors)
        if not vecs:
            raise ValueError("a product state needs at least one factor")
        for vec in vecs:
            if vec.size == 0:
                raise ValueError("empty factor")
            if not np.all(np.isfinite(vec)):
                raise ValueError("factor entries must be finite")
        object.__setattr__(self, "factors", vecs)
        object.__setattr__(self, "shape", FactorShape(tuple(v.size for v in vecs)))

    @classmethod
    def of(cls, *factors) -> "ProductState":
        return cls(tuple(factors))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    def __repr__(self):
        return f"ProductState({[f.tolist() for f in self.factors]})"


def _check_shapes(psi: PureState, phi: ProductState) -> None:
    if psi.shape != phi.shape:
        raise ShapeMismatchError(f"state dims {psi.dims} vs product dims {phi.dims}")


def factor_norms(phi: ProductState) -> list[float]:
    """Squared norms ``N_X = sum |x_i|^2`` of each factor; their product is <phi|phi>."""
    return [float(np.vdot(f, f).real) for f in phi.factors]


def overlap(psi: PureState, phi: ProductState) -> complex:
    """<psi|phi> = sum a_i b_j c_k ... conj(chi_ijk...).

    Contracts one factor at a time, last to first, so the product tensor is
    never formed.
    """
    _check_shapes(psi, phi)
    t = np.conj(psi.amplitudes)
    for f in reversed(phi.factors):
        t = t.reshape(-1, f.size) @ f
    return complex(t[0])


def distance_sq(psi: PureState, phi: ProductState) -> float:
    """D^2 = <psi|psi> - 2 Re<psi|phi> + N_A N_B ...  (clamped at 0)."""
    _check_shapes(psi, phi)
    d2 = psi.norm_sq() - 2.0 * overlap(psi, phi).real + math.prod(factor_norms(phi))
    return max(d2, 0.0)


def expand_product(phi: ProductState) -> PureState:
    """Dense tensor a_i b_j c_k ... as a raw state."""
    amps = np.ones(1, dtype=complex)
    for f in phi.factors:
        amps = np.multiply.outer(amps, f).reshape(-1)
    return PureState(phi.shape, amps, raw=True)


# --- text codec -------------------------------------------------------------

def read_state(text: str) -> PureState:
    """Parse the line-oriented state format.

    Format::

        # comment
        dims: 2 2
        raw: true            (optional; skips the normalisation check)
        0 0  0.7071067811865476 0.0
        1 1  0.7071067811865476 0.0

    Unlisted amplitudes are zero. Blank lines are ignored.
    """
    dims = None
    raw = False
    entries: dict[tuple[int, ...], tuple[complex, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, rest = stripped.partition(":")
        if sep:
            key = key.strip().lower()
            if key == "dims":
                if dims is not None:
                    raise StateFormatError("duplicate dims header", lineno)
                if entries:
                    raise StateFormatError("dims header must precede amplitudes", lineno)
                try:
                    dims = FactorShape(tuple(int(tok) for tok in rest.split()))
                except ValueError as exc:
                    raise StateFormatError(f"bad dims header: {exc}", lineno) from None
            elif key == "raw":
                flag = rest.strip().lower()
                if flag not in ("true", "false"):
                    raise StateFormatError(f"raw flag must be true or false, got {flag!r}", lineno)
                raw = flag == "true"
            else:
                raise StateFormatError(f"unknown header {key!r}", lineno)
            continue
        if dims is None:
            raise StateFormatError("amplitude line before dims header", lineno)
        toks = stripped.split()
        nf = dims.num_factors
        if len(toks) != nf + 2:
            raise StateFormatError(
                f"expected {nf} indices plus re and im ({nf + 2} fields), got {len(toks)}", lineno)
        try:
            idx = tuple(int(tok) for tok in toks[:nf])
        except ValueError:
            raise StateFormatError(f"non-integer index in {toks[:nf]}", lineno) from None
        try:
            re, im = float(toks[nf]), float(toks[nf + 1])
        except ValueError:
            raise StateFormatError(f"bad amplitude {toks[nf:]}", lineno) from None
        if not (math.isfinite(re) and math.isfinite(im)):
            raise StateFormatError("amplitude must be finite", lineno)
        for pos, (i, d) in enumerate(zip(idx, dims.dims)):
            if not 0 <= i < d:
                raise StateFormatError(f"index {i} out of range for factor {pos} of dim {d}", lineno)
        if idx in entries:
            raise StateFormatError(f"duplicate index {idx} (first on line {entries[idx][1]})", lineno)
        entries[idx] = (complex(re, im), lineno)
    if dims is None:
        raise StateFormatError("missing dims header")
    amps = np.zeros(dims.n, dtype=complex)
    for idx, (value, _) in entries.items():
        amps[dims.flat_index(idx)] = value
    if not raw:
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise StateFormatError(
                f"state is not normalised (<psi|psi> = {norm_sq!r}); add 'raw: true' to accept")
    return PureState(dims, amps, raw=raw)


def write_state(psi: PureState) -> str:
    """Canonical text: header, then nonzero amplitudes in flat-index order."""
    lines = ["dims: " + " ".join(str(d) for d in psi.dims)]
    if psi.raw:
        lines.append("raw: true")
    for flat in np.flatnonzero(psi.amplitudes):
        z = psi.amplitudes[flat]
        idx = " ".join(str(i) for i in psi.shape.multi_index(int(flat)))
        lines.append(f"{idx} {float(z.real)!r} {float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def load_state(path) -> PureState:
    with open(path, encoding="utf-8") as fh:
        return read_state(fh.read())


def save_state(psi: PureState, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_state(psi))


def random_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    """Haar-random pure state (normalised complex Gaussian vector)."""
    shape = FactorShape(tuple(dims))
    z = rng.standard_normal(shape.n) + 1j * rng.standard_normal(shape.n)
    return PureState(shape, z / np.linalg.norm(z))
