import math
from pathlib import Path

import numpy as np
import pytest

from tgs.tensor import build_tensor, diagonal_tensor, from_dense, is_irreducible, load_tensor

DATA = Path(__file__).parent / "data"
FIXTURE_PATH = DATA / "irreducible_3x3.json"

FIXTURE_ENTRIES = {
    (1, 1, 1): 2, (1, 2, 3): 1, (1, 3, 3): 1,
    (2, 2, 2): 2, (2, 3, 1): 1,
    (3, 1, 1): 1, (3, 1, 2): 1, (3, 2, 2): 1, (3, 3, 3): 1,
}

# the six rays (center index, angle) and their published boundary points
PUBLISHED_RAYS = [
    ((1, 0.0), 3.62019802),
    ((3, math.pi), -0.43720383),
    ((1, math.pi / 2), 2 + 1.86790935j),
    ((1, 3 * math.pi / 2), 2 - 1.86790935j),
    ((3, math.pi / 2), 1 + 1.81661895j),
    ((3, 3 * math.pi / 2), 1 - 1.81661895j),
]
PUBLISHED_VDIAG = [1.62019803, 1.62019803, 1.43720383]


@pytest.fixture(scope="session")
def fixture_tensor():
    return build_tensor(3, 3, FIXTURE_ENTRIES.items())


@pytest.fixture(scope="session")
def diag21():
    return diagonal_tensor(3, [2, 1])


@pytest.fixture(scope="session")
def ones32():
    return from_dense(np.ones((2, 2, 2)))


@pytest.fixture(scope="session")
def zero32():
    return build_tensor(3, 2, [])


def random_nonneg_irreducible(rng, order=3, n=None, density=0.4):
    """Random nonnegative irreducible tensor; resamples until the check passes."""
    n = n or int(rng.integers(2, 6))
    while True:
        dense = rng.uniform(0, 1, (n,) * order) * (rng.uniform(size=(n,) * order) < density)
        A = from_dense(dense)
        if A.nnz and is_irreducible(A).irreducible:
            return A


def random_complex_tensor(rng, order=3, n=3, density=0.5):
    shape = (n,) * order
    dense = (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * (rng.uniform(size=shape) < density)
    return from_dense(dense)


def dense_apply(A, x):
    """Brute-force A x^{m-1} straight from the definition."""
    import itertools

    dense = A.to_dense()
    out = np.zeros(A.dim, dtype=complex)
    for i in range(A.dim):
        for rest in itertools.product(range(A.dim), repeat=A.order - 1):
            out[i] += dense[(i,) + rest] * np.prod([x[j] for j in rest])
    return out


def perron_root_closed_form(M: np.ndarray) -> float:
    """Largest real root of the characteristic polynomial of a 2x2 or 3x3 matrix."""
    if M.shape == (2, 2):
        tr = M[0, 0] + M[1, 1]
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        return 0.5 * (tr + math.sqrt(tr * tr - 4 * det))
    tr = np.trace(M)
    c2 = (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
          + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
          + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
    det = (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
           - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
           + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))
    roots = np.roots([1.0, -tr, c2, -det])
    real = roots[np.abs(roots.imag) < 1e-7 * (1 + np.abs(roots))].real
    return float(real.max())
