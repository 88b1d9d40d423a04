"""Equimodular members of a tensor and constructive eigenvalue witnesses.

A member keeps A's diagonal and replaces each off-diagonal entry a by
``s * |a| * exp(i*phi)``. Exact members (s = 1) have the same off-diagonal
moduli as A; extended members allow 0 <= s <= 1.

The witnesses turn a point z with v(z) >= 0 into a member Q and a vector y
with Q y^{m-1} = z y^{[m-1]}.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import NotBalanced, OutsideRegion, ScaleOutOfRange
from .minimal import Verdict, mgs_membership
from .spectral import DEFAULT_TOL
from .tensor import ComplexTensor, EigenPair, _from_arrays, eigenpair_residual

MODULUS_SLACK = 1e-12

# Per-row keys are ints (1-based row), per-entry keys are 1-based multi-index tuples.
Assignment = Union[float, Mapping[Union[int, tuple], float], None]


class Kind(enum.Enum):
    EXACT = "exact"
    EXTENDED = "extended"


@dataclass
class EquimodularMember:
    tensor: ComplexTensor
    kind: Kind
    provenance: str


def _per_entry(A: ComplexTensor, spec: Assignment, default: float) -> np.ndarray:
    """Expand a scalar / per-row / per-entry assignment onto A's stored entries."""
    n_entries = A.nnz
    if spec is None:
        return np.full(n_entries, default, dtype=float)
    if not isinstance(spec, Mapping):
        return np.full(n_entries, float(spec))
    out = np.full(n_entries, default, dtype=float)
    for k, (idx, _) in enumerate(A.entries()):
        if idx in spec:
            out[k] = spec[idx]
        elif idx[0] in spec:
            out[k] = spec[idx[0]]
    return out


def _member(A: ComplexTensor, factors: np.ndarray, phases: np.ndarray) -> ComplexTensor:
    diag = A.diagonal_mask
    vals = np.where(diag, A.values, factors * np.abs(A.values) * np.exp(1j * phases))
    return _from_arrays(A.order, A.dim, A.index, vals)


def _random_phases(A: ComplexTensor, seed, per_row: bool) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if per_row:
        return rng.uniform(0, 2 * math.pi, A.dim)[A.index[:, 0]]
    return rng.uniform(0, 2 * math.pi, A.nnz)


def sample_equimodular(A: ComplexTensor, phases: Assignment = None, seed=None,
                       per_row: bool = False) -> EquimodularMember:
    """Member of the exact equimodular set: off-diagonal entries |a| e^{i phi}.

    ``phases`` may be one angle, a per-row or per-entry mapping, or None; with
    None and a ``seed`` the phases are drawn uniformly, otherwise they are 0.
    """
    if phases is None and seed is not None:
        ph = _random_phases(A, seed, per_row)
    else:
        ph = _per_entry(A, phases, 0.0)
    member = EquimodularMember(_member(A, np.ones(A.nnz), ph), Kind.EXACT, "sampled")
    check_member(A, member)
    return member


def sample_hat_equimodular(A: ComplexTensor, scalings: Assignment = None,
                           phases: Assignment = None, seed=None) -> EquimodularMember:
    """Member of the extended set: off-diagonal entries s |a| e^{i phi}, s in [0, 1]."""
    rng = np.random.default_rng(seed)
    if scalings is None and seed is not None:
        s = rng.uniform(0, 1, A.nnz)
    else:
        s = _per_entry(A, scalings, 1.0)
    if np.any((s < 0) | (s > 1)) or not np.all(np.isfinite(s)):
        raise ScaleOutOfRange("scaling factors must lie in [0, 1]")
    if phases is None and seed is not None:
        ph = rng.uniform(0, 2 * math.pi, A.nnz)
    else:
        ph = _per_entry(A, phases, 0.0)
    member = EquimodularMember(_member(A, s, ph), Kind.EXTENDED, "sampled")
    check_member(A, member)
    return member


def check_member(A: ComplexTensor, member: EquimodularMember) -> bool:
    """Scan Q entry by entry against A; raise AssertionError on any violation."""
    Q = member.tensor
    assert Q.order == A.order and Q.dim == A.dim, "shape differs"
    assert np.array_equal(Q.diagonal, A.diagonal), "diagonal differs"
    a_off = {idx: abs(v) for idx, v in A.entries() if len(set(idx)) > 1}
    for idx, v in Q.entries():
        if len(set(idx)) == 1:
            continue
        ref = a_off.get(idx, 0.0)
        if member.kind is Kind.EXACT:
            assert abs(abs(v) - ref) <= MODULUS_SLACK * max(1.0, ref), f"modulus differs at {idx}"
        else:
            assert abs(v) <= ref + MODULUS_SLACK * max(1.0, ref), f"modulus too large at {idx}"
    if member.kind is Kind.EXACT:
        q_off = {idx for idx, _ in Q.entries() if len(set(idx)) > 1}
        assert q_off == set(a_off), "support differs"
    return True


def _weighted_off_sums(A: ComplexTensor, y: np.ndarray) -> np.ndarray:
    idx, vals = A.off_diagonal()
    terms = np.abs(vals) * np.prod(y[idx[:, 1:]], axis=1)
    return np.bincount(idx[:, 0], weights=terms, minlength=A.dim)


def balance_residual(A: ComplexTensor, z: complex, y: np.ndarray) -> float:
    """Max over rows of | |z - a_kk| y_k^{m-1} - sum_off |a| y...y |."""
    lhs = np.abs(z - A.diagonal) * y ** (A.order - 1)
    return float(np.max(np.abs(lhs - _weighted_off_sums(A, y))))


def phases_toward(A: ComplexTensor, z: complex) -> np.ndarray:
    """psi_k = arg(z - a_{k..k}), with arg(0) taken as 0."""
    d = z - np.asarray(A.diagonal)
    return np.where(d == 0, 0.0, np.angle(d))


def _normalized(y: Sequence[float]) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or not np.any(y > 0):
        raise NotBalanced("witness vector must be nonnegative and nonzero")
    return y / y.max()


def balance_threshold(z: complex) -> float:
    return 1e-6 * max(1.0, abs(z))


@dataclass
class WitnessReport:
    z: complex
    v_bracket: tuple[float, float] | None
    mu: list[float]
    psi: list[float]
    residual: float
    kind: Kind
    member: EquimodularMember = field(repr=False)
    pair: EigenPair = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "z": {"re": self.z.real, "im": self.z.imag},
            "v_bracket": list(self.v_bracket) if self.v_bracket is not None else None,
            "mu": self.mu,
            "psi": self.psi,
            "residual": self.residual,
            "kind": self.kind.value,
        }


def boundary_witness(A: ComplexTensor, z: complex, y: Sequence[float]
                     ) -> tuple[EquimodularMember, EigenPair]:
    """Rotate each off-diagonal row of A onto z - a_kk so that z y^{[m-1]} = Q y^{m-1}.

    ``y`` must balance every row: |z - a_kk| y_k^{m-1} equals the weighted
    off-diagonal modulus sum, which is what a Perron vector at a point with
    v(z) = 0 does.
    """
    y = _normalized(y)
    bal = balance_residual(A, z, y)
    if bal > balance_threshold(z):
        raise NotBalanced(f"row balance residual {bal:.3g} exceeds {balance_threshold(z):.3g}")
    psi = phases_toward(A, z)
    member = EquimodularMember(_member(A, np.ones(A.nnz), psi[A.index[:, 0]]), Kind.EXACT,
                               "witness")
    pair = EigenPair(complex(z), y)
    res = eigenpair_residual(member.tensor, pair)
    assert res <= 10 * (bal + 1e-12) * max(1.0, abs(z)), f"witness residual {res} too large"
    return member, pair


def row_factors(A: ComplexTensor, v: float, y: np.ndarray) -> np.ndarray:
    """mu_k = (S_k - v y_k^{m-1}) / S_k, or 1 where the weighted row sum S_k vanishes."""
    s = _weighted_off_sums(A, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(s > 0, (s - v * y ** (A.order - 1)) / np.where(s > 0, s, 1.0), 1.0)
    return mu


def interior_witness(A: ComplexTensor, z: complex, tol: float = DEFAULT_TOL
                     ) -> tuple[EquimodularMember, EigenPair, np.ndarray]:
    """Witness for a point of the minimal set, as an extended-set member.

    Rows are shrunk by mu_k in [0, 1] until the Perron vector balances them,
    then the boundary construction rotates them onto z. Returns the member,
    the eigenpair and the row factors.
    """
    memb = mgs_membership(A, z, tol)
    if memb.verdict is Verdict.OUTSIDE:
        raise OutsideRegion(f"v({z}) < 0 is certified; no witness exists")
    est = memb.estimate
    y = _normalized(est.vector)
    v = max(est.v, 0.0)
    mu = row_factors(A, v, y)
    # only rounding can push these outside [0, 1]
    assert np.all(mu >= -1e-9) and np.all(mu <= 1 + 1e-9), f"row factors out of range: {mu}"
    mu = np.clip(mu, 0.0, 1.0)
    shrunk = _member(A, mu[A.index[:, 0]], np.angle(A.values))
    Q, pair = boundary_witness(shrunk, z, y)
    member = EquimodularMember(Q.tensor, Kind.EXTENDED, "witness")
    check_member(A, member)
    res = eigenpair_residual(member.tensor, pair)
    assert res <= 10 * tol * max(1.0, abs(z), est.mu), f"witness residual {res} too large"
    return member, pair, mu


def witness_report(A: ComplexTensor, z: complex, tol: float = DEFAULT_TOL) -> WitnessReport:
    """Boundary witness when v(z) is within tolerance of 0, interior witness otherwise."""
    memb = mgs_membership(A, z, tol)
    est = memb.estimate
    if memb.verdict is Verdict.OUTSIDE:
        raise OutsideRegion(f"v({z}) < 0 is certified; no witness exists")
    y = _normalized(est.vector)
    try:
        member, pair = boundary_witness(A, z, y)
        mu = np.ones(A.dim)
        kind = Kind.EXACT
    except NotBalanced:
        member, pair, mu = interior_witness(A, z, tol)
        kind = Kind.EXTENDED
    psi = phases_toward(A, z)
    return WitnessReport(
        complex(z),
        (est.v_lower, est.v_upper),
        [float(m) for m in mu],
        [float(p) for p in psi],
        eigenpair_residual(member.tensor, pair),
        kind,
        member,
        pair,
    )
