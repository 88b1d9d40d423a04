"""The v(z) oracle, minimal-set membership, boundary ray search and the
anchored-disk approximation region.

v(z) is the Perron-type eigenvalue of the comparison tensor B(z), whose
diagonal is -|z - a_{i..i}| and whose off-diagonal entries are the moduli of
A's. It is computed as rho(C) - mu with C = B(z) + mu I nonnegative and
mu = max_i |z - a_{i..i}|. z belongs to the minimal set iff v(z) >= 0.
Every decision below is taken on a certified bracket for v, never on a
single float.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ExpansionOverflow, InputError, NotIrreducible
from .gersgorin import DiskSet, disk_set_contains, disk_set_contains_many, point_anchored_set
from .spectral import DEFAULT_MAX_ITER, DEFAULT_SHIFT, DEFAULT_TOL, nqz_batch, nqz_spectral_radius
from .tensor import ComplexTensor, _from_arrays, is_irreducible

RAY_TOL = 1e-8
MAX_EXPANSIONS = 64
_CHUNK = 16384


@dataclass
class VEstimate:
    v_lower: float
    v_upper: float
    vector: np.ndarray
    converged: bool
    mu: float

    @property
    def v(self) -> float:
        return 0.5 * (self.v_lower + self.v_upper)

    @property
    def width(self) -> float:
        return self.v_upper - self.v_lower


class Verdict(enum.Enum):
    INSIDE = "Inside"
    OUTSIDE = "Outside"
    BAND = "BoundaryBand"


@dataclass
class Membership:
    verdict: Verdict
    estimate: VEstimate


def classify(v_lower: float, v_upper: float) -> Verdict:
    if v_lower >= 0:
        return Verdict.INSIDE
    if v_upper < 0:
        return Verdict.OUTSIDE
    return Verdict.BAND


def build_comparison(A: ComplexTensor, z: complex) -> tuple[float, ComplexTensor, ComplexTensor]:
    """Return (mu, C, B) with B = C - mu I the comparison tensor at z."""
    dist = np.abs(z - A.diagonal)
    mu = float(dist.max())
    off_idx, off_val = A.off_diagonal()
    diag_idx = np.repeat(np.arange(A.dim)[:, None], A.order, axis=1)
    idx = np.vstack([off_idx, diag_idx])
    C = _from_arrays(A.order, A.dim, idx, np.concatenate([np.abs(off_val), mu - dist]))
    B = _from_arrays(A.order, A.dim, idx, np.concatenate([np.abs(off_val), -dist]))
    return mu, C, B


def _shift_back(lo, hi, mu):
    """rho bracket -> v bracket, widened by the rounding in mu - dist and in the subtraction."""
    slack = 8 * np.finfo(float).eps * (mu + np.maximum(np.abs(lo), np.abs(hi)))
    return lo - mu - slack, hi - mu + slack


def v_of_z(A: ComplexTensor, z: complex, tol: float = DEFAULT_TOL, h: float = DEFAULT_SHIFT,
           max_iter: int = DEFAULT_MAX_ITER) -> VEstimate:
    """Certified bracket for v(z) together with the Perron-vector iterate."""
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    mu, C, _ = build_comparison(A, z)
    est = nqz_spectral_radius(C, h=h, tol=tol, max_iter=max_iter)
    lo, hi = _shift_back(est.rho_lower, est.rho_upper, mu)
    return VEstimate(float(lo), float(hi), est.vector, est.converged, mu)


class VFunction:
    """Reusable v(z) evaluator for one tensor.

    Precomputes the shared off-diagonal part so that many points, scalar or
    batched, cost one vectorized iteration each.
    """

    def __init__(self, A: ComplexTensor, tol: float = DEFAULT_TOL, h: float = DEFAULT_SHIFT,
                 max_iter: int = DEFAULT_MAX_ITER):
        if not tol > 0:
            raise InputError(f"tol must be positive, got {tol}")
        self.A = A
        self.tol, self.h, self.max_iter = tol, h, max_iter
        idx, val = A.off_diagonal()
        self._idx = idx
        self._val = np.abs(val)
        self._route = np.zeros((len(val), A.dim))
        self._route[np.arange(len(val)), idx[:, 0]] = 1.0
        self._diag = np.asarray(A.diagonal)

    def _run(self, zs: np.ndarray):
        dist = np.abs(zs[:, None] - self._diag[None, :])
        mu = dist.max(axis=1)
        res = nqz_batch(self.A.order, self._idx, self._val, self._route, mu[:, None] - dist,
                        h=self.h, tol=self.tol, max_iter=self.max_iter)
        lo, hi = _shift_back(res.lower, res.upper, mu)
        return lo, hi, res.vectors, res.converged, mu

    def __call__(self, z: complex) -> VEstimate:
        lo, hi, vec, conv, mu = self._run(np.array([z], dtype=complex))
        return VEstimate(float(lo[0]), float(hi[0]), vec[0], bool(conv[0]), float(mu[0]))

    def many(self, zs: Sequence[complex]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(v_lower, v_upper, converged) for a flat array of points."""
        zs = np.asarray(zs, dtype=complex).ravel()
        lo = np.empty(len(zs))
        hi = np.empty(len(zs))
        conv = np.empty(len(zs), dtype=bool)
        for start in range(0, len(zs), _CHUNK):
            sl = slice(start, start + _CHUNK)
            lo[sl], hi[sl], _, conv[sl], _ = self._run(zs[sl])
        return lo, hi, conv


def mgs_membership(A: ComplexTensor, z: complex, tol: float = DEFAULT_TOL) -> Membership:
    est = v_of_z(A, z, tol)
    return Membership(classify(est.v_lower, est.v_upper), est)


def v_diag(A: ComplexTensor, tol: float = DEFAULT_TOL) -> list[tuple[int, VEstimate]]:
    """v at every diagonal entry, as (1-based index, estimate)."""
    vf = VFunction(A, tol)
    return [(j + 1, vf(complex(c))) for j, c in enumerate(A.diagonal)]


@dataclass
class RayHit:
    center_index: int
    theta: float
    gamma: float
    w: complex
    t_inner: float
    t_outer: float
    # certificates: v_lower at t_inner and v_upper at t_outer
    v_inner_lower: float
    v_outer_upper: float

    @property
    def bracket_width(self) -> float:
        return self.t_outer - self.t_inner

    CSV_HEADER = ("center_index", "theta", "gamma", "w_re", "w_im", "t_inner", "t_outer")

    def csv_row(self) -> tuple:
        return (self.center_index, self.theta, self.gamma, self.w.real, self.w.imag,
                self.t_inner, self.t_outer)

    def to_dict(self) -> dict:
        return {
            "center_index": self.center_index,
            "theta": self.theta,
            "gamma": self.gamma,
            "w": {"re": self.w.real, "im": self.w.imag},
            "t_inner": self.t_inner,
            "t_outer": self.t_outer,
            "bracket_width": self.bracket_width,
            "v_inner_lower": self.v_inner_lower,
            "v_outer_upper": self.v_outer_upper,
        }


def _require_irreducible(A: ComplexTensor) -> None:
    report = is_irreducible(A)
    if not report.irreducible:
        raise NotIrreducible(f"tensor is {report.verdict.value}; ray search needs irreducibility")


def ray_boundary(
    A: ComplexTensor,
    j: int,
    theta: float,
    tol: float = RAY_TOL,
    v_tol: float = DEFAULT_TOL,
    delta: float | None = None,
    max_expansions: int = MAX_EXPANSIONS,
    _vf: VFunction | None = None,
    _checked: bool = False,
) -> RayHit:
    """First certified sign change of t -> v(a_{j..j} + t e^{i theta}).

    The search starts at t0 = v(a_{j..j}) (a lower bound on the crossing by
    the Lipschitz property of v), steps outward with doubling increments
    until v is certified negative, then bisects to width ``tol``. A crossing
    hidden inside one expansion step is not seen; pass a smaller ``delta`` to
    refine.
    """
    if not _checked:
        _require_irreducible(A)
    if not 1 <= j <= A.dim:
        raise InputError(f"center index {j} out of range 1..{A.dim}")
    if not tol > 0:
        raise InputError("tol must be positive")
    theta = float(theta) % (2 * math.pi)
    vf = _vf or VFunction(A, v_tol)
    c = complex(A.diagonal[j - 1])
    step = complex(math.cos(theta), math.sin(theta))

    def probe(t: float):
        est = vf(c + t * step)
        return classify(est.v_lower, est.v_upper), est

    t0 = vf(c).v_lower
    if not t0 > 0:
        raise NotIrreducible(f"v at center {j} is not certified positive ({t0})")
    verdict, est = probe(t0)
    if verdict is Verdict.OUTSIDE:
        inner, outer = 0.0, t0
        inner_lo, outer_hi = vf(c).v_lower, est.v_upper
    else:
        inner, inner_lo = t0, est.v_lower
        inc = delta if delta is not None else t0
        if not inc > 0:
            raise InputError("delta must be positive")
        for _ in range(max_expansions):
            t = inner + inc
            verdict, est = probe(t)
            if verdict is Verdict.OUTSIDE:
                outer, outer_hi = t, est.v_upper
                break
            inner, inner_lo = t, est.v_lower
            inc *= 2
        else:
            raise ExpansionOverflow(f"no sign change along ray ({j}, {theta}) after "
                                    f"{max_expansions} expansions")

    while outer - inner > tol:
        mid = 0.5 * (inner + outer)
        if mid <= inner or mid >= outer:
            break
        verdict, est = probe(mid)
        if verdict is Verdict.OUTSIDE:
            outer, outer_hi = mid, est.v_upper
        else:
            inner, inner_lo = mid, est.v_lower

    gamma = 0.5 * (inner + outer)
    return RayHit(j, theta, gamma, c + gamma * step, inner, outer, inner_lo, outer_hi)


@dataclass
class RegionApprox:
    """Intersection over anchors of the disk unions passing through each anchor."""

    anchors: list[RayHit]
    sets: list[DiskSet]

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return all(disk_set_contains(s, z, margin) for s in self.sets)

    def contains_many(self, zs: np.ndarray, margin: float = 0.0) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        out = np.ones(zs.shape, dtype=bool)
        for s in self.sets:
            out &= disk_set_contains_many(s, zs, margin)
        return out

    def to_dict(self) -> dict:
        return {
            "anchors": [a.to_dict() for a in self.anchors],
            "sets": [s.to_dict() for s in self.sets],
        }


def approx_region(
    A: ComplexTensor,
    rays: Sequence[tuple[int, float]],
    tol: float = RAY_TOL,
    v_tol: float = DEFAULT_TOL,
    delta: float | None = None,
) -> RegionApprox:
    """Search every ray and intersect the anchored disk unions of the hits."""
    if not rays:
        raise InputError("at least one ray is required")
    _require_irreducible(A)
    vf = VFunction(A, v_tol)
    hits = [ray_boundary(A, j, th, tol, v_tol, delta, _vf=vf, _checked=True) for j, th in rays]
    sets = [point_anchored_set(A, h.w, f"Gamma^w{k + 1}") for k, h in enumerate(hits)]
    return RegionApprox(hits, sets)


def region_contains(R: RegionApprox, z: complex, margin: float = 0.0) -> bool:
    return R.contains(z, margin)


def center_indices(A: ComplexTensor, dedup: bool = True) -> list[int]:
    """1-based diagonal indices to search from; equal centers collapse to the first."""
    if not dedup:
        return list(range(1, A.dim + 1))
    seen: list[complex] = []
    out = []
    for j, c in enumerate(A.diagonal):
        if c not in seen:
            seen.append(c)
            out.append(j + 1)
    return out


def ray_fan(A: ComplexTensor, count: int, dedup: bool = True) -> list[tuple[int, float]]:
    """``count`` equally spaced angles from each (deduplicated) diagonal center."""
    if count < 1:
        raise InputError("ray count must be at least 1")
    thetas = [2 * math.pi * k / count for k in range(count)]
    return [(j, th) for j in center_indices(A, dedup) for th in thetas]
