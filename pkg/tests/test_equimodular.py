import math

import numpy as np
import pytest

from conftest import PUBLISHED_RAYS, random_complex_tensor
from tgs.equimodular import (
    Kind,
    balance_residual,
    boundary_witness,
    check_member,
    interior_witness,
    phases_toward,
    sample_equimodular,
    sample_hat_equimodular,
    witness_report,
)
from tgs.errors import NotBalanced, OutsideRegion, ScaleOutOfRange
from tgs.minimal import ray_boundary, v_of_z
from tgs.spectral import nqz_spectral_radius
from tgs.tensor import EigenPair, eigenpair_residual, from_dense


def off_values(T):
    return {k: v for k, v in T.entries() if len(set(k)) > 1}


class TestSampling:
    def test_zero_phases_take_moduli(self):
        A = from_dense(np.array([[1.0, -2j], [3 + 4j, 0.5]]))
        Q = sample_equimodular(A, phases=0.0).tensor
        assert off_values(Q) == {(1, 2): 2, (2, 1): 5}
        np.testing.assert_array_equal(Q.diagonal, A.diagonal)

    def test_fixture_unchanged(self, fixture_tensor):
        assert sample_equimodular(fixture_tensor, phases=0.0).tensor == fixture_tensor

    def test_phase_pi_negates(self, fixture_tensor):
        Q = sample_equimodular(fixture_tensor, phases=math.pi).tensor
        for k, v in off_values(Q).items():
            assert v == pytest.approx(-fixture_tensor[k])

    def test_per_row_mapping(self, fixture_tensor):
        Q = sample_equimodular(fixture_tensor, phases={3: math.pi / 2}).tensor
        assert Q[3, 1, 2] == pytest.approx(1j)
        assert Q[1, 2, 3] == pytest.approx(1)

    def test_per_entry_mapping(self, fixture_tensor):
        Q = sample_equimodular(fixture_tensor, phases={(1, 2, 3): math.pi}).tensor
        assert Q[1, 2, 3] == pytest.approx(-1)
        assert Q[1, 3, 3] == pytest.approx(1)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_members_pass_scan(self, seed):
        rng = np.random.default_rng(seed)
        A = random_complex_tensor(rng, 3, 3)
        for per_row in (False, True):
            m = sample_equimodular(A, seed=seed, per_row=per_row)
            assert m.kind is Kind.EXACT and check_member(A, m)
        h = sample_hat_equimodular(A, seed=seed)
        assert h.kind is Kind.EXTENDED and check_member(A, h)

    def test_hat_unit_factors(self, fixture_tensor):
        a = sample_hat_equimodular(fixture_tensor, scalings=1.0, phases=0.0).tensor
        assert a == sample_equimodular(fixture_tensor, phases=0.0).tensor

    def test_hat_zero_factors(self, fixture_tensor):
        T = sample_hat_equimodular(fixture_tensor, scalings=0.0).tensor
        assert T.nnz == 3 and off_values(T) == {}

    def test_hat_half(self, fixture_tensor):
        T = sample_hat_equimodular(fixture_tensor, scalings=0.5).tensor
        for k, v in off_values(T).items():
            assert v == pytest.approx(0.5 * fixture_tensor[k])

    def test_hat_out_of_range(self, fixture_tensor):
        with pytest.raises(ScaleOutOfRange):
            sample_hat_equimodular(fixture_tensor, scalings=1.5)

    def test_scan_rejects_bad_member(self, fixture_tensor):
        bad = sample_hat_equimodular(fixture_tensor, scalings=0.5)
        bad.kind = Kind.EXACT
        with pytest.raises(AssertionError):
            check_member(fixture_tensor, bad)


class TestBoundaryWitness:
    def test_rightmost_anchor(self, fixture_tensor):
        w = ray_boundary(fixture_tensor, 1, 0.0).w
        y = v_of_z(fixture_tensor, w).vector
        member, pair = boundary_witness(fixture_tensor, w, y)
        assert check_member(fixture_tensor, member)
        # w exceeds every diagonal entry, so all rotations are trivial
        np.testing.assert_allclose(member.tensor.values, fixture_tensor.values, atol=1e-15)
        assert eigenpair_residual(member.tensor, pair) <= 1e-6

    def test_diagonal(self, diag21):
        member, pair = boundary_witness(diag21, 2, [1.0, 0.0])
        assert member.tensor == diag21
        assert eigenpair_residual(member.tensor, pair) == 0

    def test_not_balanced(self, fixture_tensor):
        y = v_of_z(fixture_tensor, 0).vector
        with pytest.raises(NotBalanced):
            boundary_witness(fixture_tensor, 0, y)

    def test_phase_convention(self, fixture_tensor):
        psi = phases_toward(fixture_tensor, 2 + 1j)
        np.testing.assert_allclose(psi, [math.pi / 2, math.pi / 2, math.pi / 4])
        assert phases_toward(fixture_tensor, 2)[0] == 0

    @pytest.mark.parametrize("ray", [r for r, _ in PUBLISHED_RAYS] + [(1, 1.0), (3, 2.5)])
    def test_boundary_points_are_eigenvalues(self, fixture_tensor, ray):
        w = ray_boundary(fixture_tensor, *ray).w
        est = v_of_z(fixture_tensor, w)
        bal = balance_residual(fixture_tensor, w, est.vector / est.vector.max())
        member, pair = boundary_witness(fixture_tensor, w, est.vector)
        assert member.kind is Kind.EXACT and check_member(fixture_tensor, member)
        assert eigenpair_residual(member.tensor, pair) <= 10 * (bal + 1e-12) * max(1, abs(w))


class TestInteriorWitness:
    @pytest.mark.parametrize("z", [2, 1, 1 + 0.5j, 0, 2.5 - 1j])
    def test_fixture_points(self, fixture_tensor, z):
        member, pair, mu = interior_witness(fixture_tensor, z)
        assert member.kind is Kind.EXTENDED and check_member(fixture_tensor, member)
        assert np.all((mu >= 0) & (mu <= 1))
        assert eigenpair_residual(member.tensor, pair) <= 1e-6
        assert pair.value == z

    def test_boundary_point_keeps_full_moduli(self, fixture_tensor):
        w = ray_boundary(fixture_tensor, 3, math.pi / 2).w
        _, _, mu = interior_witness(fixture_tensor, w)
        np.testing.assert_allclose(mu, 1, atol=1e-7)

    def test_diagonal(self, diag21):
        member, pair, mu = interior_witness(diag21, 2)
        assert member.tensor == diag21
        assert eigenpair_residual(member.tensor, pair) <= 1e-12
        np.testing.assert_array_equal(mu, [1, 1])

    def test_outside(self, fixture_tensor):
        with pytest.raises(OutsideRegion):
            interior_witness(fixture_tensor, 5)

    @pytest.mark.parametrize("seed", range(8))
    def test_random_complex(self, seed):
        rng = np.random.default_rng(seed)
        A = random_complex_tensor(rng, 3, 3, density=0.9)
        z = complex(A.diagonal[0])
        member, pair, mu = interior_witness(A, z)
        assert check_member(A, member)
        assert eigenpair_residual(member.tensor, pair) <= 1e-6


@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_nonnegative_members_have_spectral_radius_in_region(fixture_tensor, t):
    Q = sample_hat_equimodular(fixture_tensor, scalings=t).tensor
    est = nqz_spectral_radius(Q, tol=1e-12)
    assert eigenpair_residual(Q, EigenPair(est.rho, est.vector)) <= 1e-9
    assert v_of_z(fixture_tensor, est.rho).v_upper >= -1e-9


def test_report(fixture_tensor):
    rep = witness_report(fixture_tensor, 2)
    doc = rep.to_dict()
    assert doc["kind"] == "extended" and doc["residual"] <= 1e-6
    assert set(doc) == {"z", "v_bracket", "mu", "psi", "residual", "kind"}
    # the midpoint anchor can sit a hair outside; the inner bracket end cannot
    hit = ray_boundary(fixture_tensor, 1, 0.0)
    inner = fixture_tensor.diagonal[0] + hit.t_inner
    assert witness_report(fixture_tensor, inner, tol=1e-7).kind is Kind.EXACT
