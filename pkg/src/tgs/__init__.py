"""Gersgorin-type eigenvalue inclusion sets for complex tensors.

Computes the classical and weighted disk unions, decides membership in the
minimal set through a certified v(z) oracle, traces its boundary along rays,
builds equimodular witnesses and renders the results.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .tensor import (  # noqa: F401
    ComplexTensor,
    EigenPair,
    IrreducibilityReport,
    apply,
    build_tensor,
    diagonal_scale,
    eigenpair_residual,
    is_irreducible,
    is_nonnegative,
    load_tensor,
    row_sum,
    save_tensor,
    weighted_row_sum,
)
from .spectral import SpectralEstimate, collatz_wielandt_bounds, nqz_spectral_radius  # noqa: F401
from .gersgorin import (  # noqa: F401
    Disk,
    DiskSet,
    bounding_box,
    disk_set_contains,
    gersgorin,
    point_anchored_set,
    weighted_gersgorin,
)
from .minimal import (  # noqa: F401
    Membership,
    RayHit,
    RegionApprox,
    VEstimate,
    VFunction,
    approx_region,
    build_comparison,
    mgs_membership,
    ray_boundary,
    region_contains,
    v_diag,
    v_of_z,
)
from .equimodular import (  # noqa: F401
    EquimodularMember,
    boundary_witness,
    interior_witness,
    sample_equimodular,
    sample_hat_equimodular,
)
