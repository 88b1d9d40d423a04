"""Spectral radius of nonnegative tensors with certified two-sided brackets.

The shifted power iteration runs on D = C + hI. At every iterate x > 0 the
componentwise ratios (D x^{m-1})_i / x_i^{m-1} give a lower and an upper
bound on rho(D) (Collatz-Wielandt), so the bracket is valid whether or not
the iteration has converged.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InputError,
    NonPositiveShift,
    NonPositiveStart,
    NonPositiveWeight,
    NotNonnegative,
)
from .tensor import ComplexTensor, apply, contract, is_nonnegative

DEFAULT_SHIFT = 1.0
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000

# Components below this (iterates have max-norm 1) are dropped when forming
# the support-restricted lower bound.
_TRUNCATE_BELOW = 1e-6


@dataclass
class SpectralEstimate:
    rho_lower: float
    rho_upper: float
    vector: np.ndarray
    iterations: int
    converged: bool
    # per-iteration (lower, upper) Collatz-Wielandt ratios of C, when recorded
    history: list[tuple[float, float]] = field(default_factory=list, repr=False)

    @property
    def rho(self) -> float:
        return 0.5 * (self.rho_lower + self.rho_upper)

    @property
    def width(self) -> float:
        return self.rho_upper - self.rho_lower


@dataclass
class _BatchResult:
    lower: np.ndarray
    upper: np.ndarray
    vectors: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    history: list[tuple[float, float]]


def _floor(order: int) -> float:
    # keeps x_i^(m-1) a normal float
    return 1e-280 ** (1.0 / (order - 1))


def nqz_batch(
    order: int,
    off_index: np.ndarray,
    off_values: np.ndarray,
    route: np.ndarray,
    diag: np.ndarray,
    h: float = DEFAULT_SHIFT,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    x0: np.ndarray | None = None,
    record: bool = False,
) -> _BatchResult:
    """Run the shifted iteration for K tensors sharing one off-diagonal part.

    Tensor k is ``off + diag(diag[k])``; ``off_values`` must be nonnegative
    reals and ``diag`` a (K, n) nonnegative array. The returned brackets are
    for rho(C_k), already shifted back by h.
    """
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    K, n = diag.shape
    p = order - 1
    floor = _floor(order)
    if x0 is None:
        X = np.ones((K, n))
    else:
        X = np.broadcast_to(np.asarray(x0, dtype=float), (K, n)).copy()
        X /= X.max(axis=1, keepdims=True)

    best_lo = np.full(K, -np.inf)
    best_hi = np.full(K, np.inf)
    out_x = X.copy()
    iters = np.zeros(K, dtype=np.int64)
    done = np.zeros(K, dtype=bool)
    history: list[tuple[float, float]] = []
    active = np.arange(K)
    shifted = diag + h

    for k in range(1, max_iter + 1):
        Xa = X[active]
        Pa = Xa**p
        Ya = contract(off_index, off_values, route, Xa) + shifted[active] * Pa
        ratios = Ya / Pa
        lo = ratios.min(axis=1)
        hi = ratios.max(axis=1)
        if record:
            history.append((float(lo[0] - h), float(hi[0] - h)))

        thin = np.any(Xa < _TRUNCATE_BELOW, axis=1)
        if thin.any():
            # subinvariance on the support of a nonnegative x still bounds rho from below
            Xt = np.where(Xa[thin] < _TRUNCATE_BELOW, 0.0, Xa[thin])
            Pt = Xt**p
            Yt = contract(off_index, off_values, route, Xt) + shifted[active[thin]] * Pt
            with np.errstate(divide="ignore", invalid="ignore"):
                rt = np.where(Pt > 0, Yt / np.where(Pt > 0, Pt, 1.0), np.inf)
            lo[thin] = np.maximum(lo[thin], rt.min(axis=1))

        best_lo[active] = np.maximum(best_lo[active], lo - h)
        best_hi[active] = np.minimum(best_hi[active], hi - h)
        iters[active] = k
        width = best_hi[active] - best_lo[active]
        conv = width <= tol * np.maximum(1.0, best_hi[active])

        finished = active[conv]
        out_x[finished] = Xa[conv]
        done[finished] = True

        keep = ~conv
        if not keep.any():
            active = active[keep]
            break
        Xn = Ya[keep] ** (1.0 / p)
        Xn /= Xn.max(axis=1, keepdims=True)
        np.maximum(Xn, floor, out=Xn)
        active = active[keep]
        X[active] = Xn
        if k == max_iter:
            out_x[active] = Xa[keep]

    return _BatchResult(best_lo, best_hi, out_x, iters, done, history)


def _require_nonnegative(C: ComplexTensor) -> None:
    if not is_nonnegative(C):
        raise NotNonnegative("tensor has negative or complex entries")


def nqz_spectral_radius(
    C: ComplexTensor,
    h: float = DEFAULT_SHIFT,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    x0: Sequence[float] | None = None,
    record: bool = False,
) -> SpectralEstimate:
    """Certified bracket on rho(C) for a nonnegative tensor C.

    Iterates y = D x^{m-1}, x <- y^{[1/(m-1)]} / ||.||_inf with D = C + hI and
    stops once the bracket width is at most ``tol * max(1, rho_upper)``. When
    ``max_iter`` runs out the bracket is still valid and ``converged`` is False.
    Set ``record`` to keep the per-iteration ratio bounds in ``history``.
    """
    _require_nonnegative(C)
    if not h > 0:
        raise NonPositiveShift(f"shift h must be positive, got {h}")
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    n = C.dim
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (n,):
            raise DimensionMismatch(f"start vector has shape {x0.shape}, expected ({n},)")
        if not np.all(x0 > 0):
            raise NonPositiveStart("start vector must be entrywise positive")
    if C.nnz == 0:
        return SpectralEstimate(0.0, 0.0, np.ones(n), 0, True)

    off_index, off_values = C.off_diagonal()
    route = np.zeros((len(off_values), n))
    route[np.arange(len(off_values)), off_index[:, 0]] = 1.0
    res = nqz_batch(
        C.order,
        off_index,
        off_values.real,
        route,
        C.diagonal.real[None, :],
        h=h,
        tol=tol,
        max_iter=max_iter,
        x0=x0,
        record=record,
    )
    return SpectralEstimate(
        float(res.lower[0]),
        float(res.upper[0]),
        res.vectors[0],
        int(res.iterations[0]),
        bool(res.converged[0]),
        res.history,
    )


def collatz_wielandt_bounds(C: ComplexTensor, x: Sequence[float]) -> tuple[float, float]:
    """(min_i, max_i) of (C x^{m-1})_i / x_i^{m-1}; brackets rho(C) for any x > 0."""
    _require_nonnegative(C)
    x = np.asarray(x, dtype=float)
    if x.shape != (C.dim,):
        raise DimensionMismatch(f"vector has shape {x.shape}, expected ({C.dim},)")
    if not np.all(x > 0):
        raise NonPositiveWeight("probe vector must be entrywise positive")
    ratios = apply(C, x).real / x ** (C.order - 1)
    return float(ratios.min()), float(ratios.max())
