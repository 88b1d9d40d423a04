"""Sparse complex tensors of order m and dimension n.

Indices are 1-based at every public surface (constructors, ``entries()``,
files, reports) and 0-based inside the arrays.
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    BadOrder,
    DimensionMismatch,
    DuplicateIndex,
    IndexOutOfRange,
    InputError,
    IoFailure,
    NonPositiveScale,
    NonPositiveWeight,
)

MultiIndex = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ComplexTensor:
    """Immutable coordinate-format tensor.

    ``index`` holds 0-based multi-indices, one row per stored entry, sorted
    lexicographically; ``values`` holds the matching nonzero complex values.
    Use :func:`build_tensor` rather than the constructor.
    """

    order: int
    dim: int
    index: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.values)

    def entries(self) -> Iterator[tuple[MultiIndex, complex]]:
        """Yield ``(1-based multi-index, value)`` pairs in lexicographic order."""
        for row, val in zip(self.index, self.values):
            yield tuple(int(i) + 1 for i in row), complex(val)

    def __getitem__(self, idx: Sequence[int]) -> complex:
        return self._lookup.get(tuple(int(i) - 1 for i in idx), 0j)

    @cached_property
    def _lookup(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(i) for i in row): complex(v) for row, v in zip(self.index, self.values)}

    @cached_property
    def diagonal_mask(self) -> np.ndarray:
        """True for stored entries whose indices are all equal."""
        if self.nnz == 0:
            return np.zeros(0, dtype=bool)
        return np.all(self.index == self.index[:, :1], axis=1)

    @cached_property
    def diagonal(self) -> np.ndarray:
        """The n diagonal entries a_{i...i} as a complex vector."""
        d = np.zeros(self.dim, dtype=complex)
        mask = self.diagonal_mask
        d[self.index[mask, 0]] = self.values[mask]
        d.setflags(write=False)
        return d

    @cached_property
    def first_index_matrix(self) -> np.ndarray:
        """(nnz, n) 0/1 matrix routing each entry to its row i1."""
        s = np.zeros((self.nnz, self.dim))
        s[np.arange(self.nnz), self.index[:, 0]] = 1.0
        s.setflags(write=False)
        return s

    def off_diagonal(self) -> tuple[np.ndarray, np.ndarray]:
        """(index, values) of the stored off-diagonal entries."""
        keep = ~self.diagonal_mask
        return self.index[keep], self.values[keep]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.order, dtype=complex)
        if self.nnz:
            out[tuple(self.index.T)] = self.values
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComplexTensor):
            return NotImplemented
        return (
            self.order == other.order
            and self.dim == other.dim
            and np.array_equal(self.index, other.index)
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self) -> str:
        return f"ComplexTensor(order={self.order}, dim={self.dim}, nnz={self.nnz})"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _from_arrays(order: int, dim: int, index: np.ndarray, values: np.ndarray) -> ComplexTensor:
    """Canonicalize already-validated 0-based arrays (drop zeros, sort)."""
    index = np.asarray(index, dtype=np.int64).reshape(-1, order)
    values = np.asarray(values, dtype=complex).reshape(-1)
    keep = values != 0
    index, values = index[keep], values[keep]
    if len(values):
        perm = np.lexsort(index.T[::-1])
        index, values = index[perm], values[perm]
    return ComplexTensor(order, dim, _freeze(index.copy()), _freeze(values.copy()))


def build_tensor(
    order: int, dim: int, entries: Iterable[tuple[Sequence[int], complex]]
) -> ComplexTensor:
    """Build a tensor from ``(multi_index, value)`` pairs with 1-based indices.

    Zero values are dropped. Duplicate multi-indices raise rather than sum.
    """
    if int(order) != order or order < 2:
        raise BadOrder(f"order must be an integer >= 2, got {order!r}")
    if int(dim) != dim or dim < 1:
        raise InputError(f"dim must be an integer >= 1, got {dim!r}")
    order, dim = int(order), int(dim)
    seen: set[tuple[int, ...]] = set()
    rows: list[tuple[int, ...]] = []
    vals: list[complex] = []
    for idx, val in entries:
        idx = tuple(idx)
        if len(idx) != order:
            raise IndexOutOfRange(f"multi-index {idx} has {len(idx)} components, expected {order}")
        if any(int(i) != i or not 1 <= i <= dim for i in idx):
            raise IndexOutOfRange(f"multi-index {idx} out of range 1..{dim}")
        key = tuple(int(i) - 1 for i in idx)
        if key in seen:
            raise DuplicateIndex(f"duplicate multi-index {idx}")
        seen.add(key)
        rows.append(key)
        vals.append(complex(val))
    return _from_arrays(order, dim, np.array(rows, dtype=np.int64), np.array(vals, dtype=complex))


def from_dense(arr: np.ndarray) -> ComplexTensor:
    arr = np.asarray(arr)
    if arr.ndim < 2 or len(set(arr.shape)) != 1:
        raise InputError(f"expected a cubical array of order >= 2, got shape {arr.shape}")
    nz = np.argwhere(arr != 0)
    return _from_arrays(arr.ndim, arr.shape[0], nz, arr[tuple(nz.T)])


def diagonal_tensor(order: int, diag: Sequence[complex]) -> ComplexTensor:
    return build_tensor(order, len(diag), [((i + 1,) * order, d) for i, d in enumerate(diag)])


def _check_vector(A: ComplexTensor, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1:] != (A.dim,):
        raise DimensionMismatch(f"vector length {x.shape[-1:]} does not match dim {A.dim}")
    return x


def contract(index: np.ndarray, values: np.ndarray, route: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Batched A x^{m-1} over the leading axes of ``x``.

    ``route`` is the (nnz, n) matrix sending each entry to its first index.
    """
    if len(values) == 0:
        return np.zeros(x.shape, dtype=np.result_type(values, x))
    terms = values * np.prod(x[..., index[:, 1:]], axis=-1)
    return terms @ route


def apply(A: ComplexTensor, x: Sequence[complex]) -> np.ndarray:
    """Return A x^{m-1}, the vector with components sum a_{i i2..im} x_{i2}..x_{im}."""
    x = _check_vector(A, x)
    return contract(A.index, A.values, A.first_index_matrix, x)


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: complex
    vector: np.ndarray

    def __post_init__(self):
        if not np.any(np.asarray(self.vector) != 0):
            raise InputError("eigenvector must be nonzero")


def eigenpair_residual(A: ComplexTensor, pair: EigenPair) -> float:
    """Max-norm of A x^{m-1} - lambda x^{[m-1]}."""
    x = _check_vector(A, pair.vector)
    r = apply(A, x) - pair.value * x ** (A.order - 1)
    return float(np.max(np.abs(r)))


def _positive_vector(x: Sequence[float], n: int, exc: type[InputError], what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch(f"{what} has shape {x.shape}, expected ({n},)")
    if not np.all(x > 0) or not np.all(np.isfinite(x)):
        raise exc(f"{what} must be entrywise positive and finite")
    return x


def diagonal_scale(A: ComplexTensor, d: Sequence[float]) -> ComplexTensor:
    """Similarity scaling b = d_{i1}^{-(m-1)} a d_{i2}...d_{im}; keeps the spectrum."""
    d = _positive_vector(d, A.dim, NonPositiveScale, "scale vector")
    if A.nnz == 0:
        return A
    idx = A.index
    factor = np.prod(d[idx[:, 1:]], axis=1) / d[idx[:, 0]] ** (A.order - 1)
    vals = A.values * factor
    # diagonal entries are fixed points; avoid rounding drift on them
    vals[A.diagonal_mask] = A.values[A.diagonal_mask]
    return ComplexTensor(A.order, A.dim, A.index, _freeze(vals))


def _check_row(A: ComplexTensor, i: int) -> int:
    if int(i) != i or not 1 <= i <= A.dim:
        raise IndexOutOfRange(f"row {i} out of range 1..{A.dim}")
    return int(i) - 1


def off_diagonal_row_sums(A: ComplexTensor, x: np.ndarray | None = None) -> np.ndarray:
    """All weighted off-diagonal row sums at once (x=None means unit weights)."""
    idx, vals = A.off_diagonal()
    mods = np.abs(vals)
    if x is not None:
        mods = mods * np.prod(x[idx[:, 1:]], axis=1) / x[idx[:, 0]] ** (A.order - 1)
    return np.bincount(idx[:, 0], weights=mods, minlength=A.dim).astype(float)


def row_sum(A: ComplexTensor, i: int) -> float:
    """Sum of |a_{i i2..im}| over the non-diagonal entries of row i (1-based)."""
    return float(off_diagonal_row_sums(A)[_check_row(A, i)])


def weighted_row_sum(A: ComplexTensor, i: int, x: Sequence[float]) -> float:
    row = _check_row(A, i)
    x = _positive_vector(x, A.dim, NonPositiveWeight, "weight vector")
    return float(off_diagonal_row_sums(A, x)[row])


def is_nonnegative(A: ComplexTensor) -> bool:
    return bool(np.all(A.values.imag == 0) and np.all(A.values.real >= 0))


class Verdict(enum.Enum):
    IRREDUCIBLE = "irreducible"
    REDUCIBLE = "reducible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IrreducibilityReport:
    """Outcome of the irreducibility checks.

    ``verdict`` is the exact subset-based notion (no nonempty proper index set
    I whose rows only reach I). ``witness`` is such an I, 1-based, when
    reducible. ``weakly_irreducible`` records strong connectivity of the
    index digraph, a strictly stronger condition.
    """

    verdict: Verdict
    witness: frozenset[int] | None = None
    weakly_irreducible: bool | None = None
    method: str = "fixpoint"

    @property
    def irreducible(self) -> bool:
        return self.verdict is Verdict.IRREDUCIBLE

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": sorted(self.witness) if self.witness is not None else None,
            "weakly_irreducible": self.weakly_irreducible,
            "method": self.method,
        }


def _row_patterns(A: ComplexTensor) -> list[list[frozenset[int]]]:
    """For each row i, the distinct index sets {i2..im} of its nonzero entries."""
    pats: list[set[frozenset[int]]] = [set() for _ in range(A.dim)]
    for row in A.index:
        pats[row[0]].add(frozenset(int(j) for j in row[1:]))
    return [sorted(p, key=sorted) for p in pats]


def is_witness(A: ComplexTensor, subset: Iterable[int]) -> bool:
    """True iff every entry with i1 in the (0-based) subset hits the subset again."""
    s = set(subset)
    if not s or len(s) == A.dim:
        return False
    for row in A.index:
        if row[0] in s and not s.intersection(int(j) for j in row[1:]):
            return False
    return True


def _largest_witness_avoiding(pats: list[list[frozenset[int]]], n: int, k: int) -> set[int]:
    current = set(range(n)) - {k}
    changed = True
    while changed and current:
        changed = False
        for i in sorted(current):
            if any(not (p & current) for p in pats[i]):
                current.discard(i)
                changed = True
    return current


def _digraph_strongly_connected(pats: list[list[frozenset[int]]], n: int) -> bool:
    succ = [set().union(*p) - {i} if p else set() for i, p in enumerate(pats)]
    pred: list[set[int]] = [set() for _ in range(n)]
    for i, s in enumerate(succ):
        for j in s:
            pred[j].add(i)

    def reach(adj: list[set[int]]) -> int:
        seen, stack = {0}, [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen)

    return reach(succ) == n and reach(pred) == n


def is_irreducible(A: ComplexTensor) -> IrreducibilityReport:
    """Decide irreducibility exactly.

    Witness sets are closed under union, so for each k the largest witness
    missing k is a greatest fixed point reached by deleting rows that have an
    entry escaping the current set. A is reducible iff one of these n fixed
    points is nonempty. Cost is polynomial in n and nnz.
    """
    n = A.dim
    pats = _row_patterns(A)
    weak = _digraph_strongly_connected(pats, n) if n > 1 else True
    if n == 1:
        return IrreducibilityReport(Verdict.IRREDUCIBLE, None, weak)
    for k in reversed(range(n)):
        w = _largest_witness_avoiding(pats, n, k)
        if w:
            return IrreducibilityReport(Verdict.REDUCIBLE, frozenset(i + 1 for i in w), weak)
    return IrreducibilityReport(Verdict.IRREDUCIBLE, None, weak)


def reducing_subsets_bruteforce(A: ComplexTensor) -> Iterator[frozenset[int]]:
    """Enumerate every witness set (1-based) by checking all 2^n - 2 subsets."""
    for r in range(1, A.dim):
        for combo in itertools.combinations(range(A.dim), r):
            if is_witness(A, combo):
                yield frozenset(i + 1 for i in combo)


# --- file format -----------------------------------------------------------


def tensor_to_dict(A: ComplexTensor) -> dict:
    return {
        "order": A.order,
        "dim": A.dim,
        "entries": [
            {"idx": list(idx), "re": val.real, "im": val.imag} for idx, val in A.entries()
        ],
    }


def tensor_from_dict(obj: dict) -> ComplexTensor:
    try:
        order, dim, raw = obj["order"], obj["dim"], obj["entries"]
        entries = [(tuple(e["idx"]), complex(float(e["re"]), float(e.get("im", 0.0)))) for e in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed tensor document: {exc}") from exc
    return build_tensor(order, dim, entries)


def load_tensor(path: str | Path) -> ComplexTensor:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    return tensor_from_dict(obj)


def save_tensor(A: ComplexTensor, path: str | Path) -> None:
    try:
        Path(path).write_text(json.dumps(tensor_to_dict(A), indent=1) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
