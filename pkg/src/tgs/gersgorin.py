"""Disk-union inclusion sets and their geometry."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, NonPositiveWeight
from .tensor import ComplexTensor, _positive_vector, off_diagonal_row_sums


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise InputError(f"disk radius must be nonnegative, got {self.radius}")

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) <= self.radius


@dataclass(frozen=True)
class DiskSet:
    """Union of closed disks, one per row index, kept in index order."""

    disks: tuple[Disk, ...]
    label: str = "Gamma"

    def __post_init__(self):
        if not self.disks:
            raise InputError("a DiskSet needs at least one disk")

    @property
    def centers(self) -> np.ndarray:
        return np.array([d.center for d in self.disks], dtype=complex)

    @property
    def radii(self) -> np.ndarray:
        return np.array([d.radius for d in self.disks], dtype=float)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "disks": [
                {"cx": d.center.real, "cy": d.center.imag, "r": d.radius} for d in self.disks
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> DiskSet:
        disks = tuple(Disk(complex(d["cx"], d["cy"]), float(d["r"])) for d in obj["disks"])
        return cls(disks, obj.get("label", ""))


def _disk_set(centers: np.ndarray, radii: np.ndarray, label: str) -> DiskSet:
    return DiskSet(tuple(Disk(complex(c), float(r)) for c, r in zip(centers, radii)), label)


def gersgorin(A: ComplexTensor) -> DiskSet:
    """Disk i centered at a_{i..i} with radius the off-diagonal modulus sum of row i."""
    return _disk_set(A.diagonal, off_diagonal_row_sums(A), "Gamma")


def weighted_gersgorin(A: ComplexTensor, x: Sequence[float]) -> DiskSet:
    x = _positive_vector(x, A.dim, NonPositiveWeight, "weight vector")
    return _disk_set(A.diagonal, off_diagonal_row_sums(A, x), "Gamma^x")


def point_anchored_set(A: ComplexTensor, w: complex, label: str = "Gamma^w") -> DiskSet:
    """Disks centered at the diagonal entries, each passing through ``w``."""
    return _disk_set(A.diagonal, np.abs(w - A.diagonal), label)


def disk_set_contains(S: DiskSet, z: complex, margin: float = 0.0) -> bool:
    """Closed-union membership; ``margin`` widens every radius."""
    return bool(np.any(np.abs(z - S.centers) <= S.radii + margin))


def disk_set_contains_many(S: DiskSet, zs: np.ndarray, margin: float = 0.0) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    dist = np.abs(zs[..., None] - S.centers)
    return np.any(dist <= S.radii + margin, axis=-1)


Box = tuple[float, float, float, float]


def bounding_box(S: DiskSet, pad_fraction: float = 0.0) -> Box:
    """(xmin, xmax, ymin, ymax) enclosing every disk, padded by a fraction of the longer side."""
    if pad_fraction < 0:
        raise InputError("pad_fraction must be nonnegative")
    c, r = S.centers, S.radii
    xmin, xmax = float(np.min(c.real - r)), float(np.max(c.real + r))
    ymin, ymax = float(np.min(c.imag - r)), float(np.max(c.imag + r))
    pad = pad_fraction * max(xmax - xmin, ymax - ymin)
    return (xmin - pad, xmax + pad, ymin - pad, ymax + pad)
