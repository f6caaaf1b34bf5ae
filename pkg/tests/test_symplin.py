import math
from fractions import Fraction as Q

import numpy as np
import pytest

from liouville_lab import symplin as sl


def frac_det_oracle(rows):
    """Independent determinant via permutation expansion (small sizes)."""
    n = len(rows)
    if n == 1:
        return Q(rows[0][0])
    total = Q(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        total += (-1) ** j * Q(rows[0][j]) * frac_det_oracle(minor)
    return total


def random_rational_skew(rng, n):
    rows = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = Q(rng.integers(-4, 5), int(rng.integers(1, 4)))
            rows[j][i] = -rows[i][j]
    return sl.SkewForm(rows)


def test_pfaffian_standard_form():
    assert sl.pfaffian(sl.standard_omega(4)) == 1
    assert sl.pfaffian(sl.standard_omega(6)) == 1


def test_pfaffian_zero_row():
    rows = [[Q(0)] * 4 for _ in range(4)]
    rows[2][3] = Q(5)
    rows[3][2] = Q(-5)
    assert sl.pfaffian(sl.SkewForm(rows)) == 0


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(1)
    for n in (4, 6, 8):
        for _ in range(3):
            a = random_rational_skew(rng, n)
            assert sl.pfaffian(a) ** 2 == frac_det_oracle(a.matrix)


def test_skewform_validation():
    with pytest.raises(ValueError, match="antisymmetric"):
        sl.SkewForm([[0, 1], [1, 0]])
    with pytest.raises(ValueError, match="even"):
        sl.SkewForm(np.zeros((3, 3)))
    with pytest.raises(ValueError, match="12"):
        sl.SkewForm(np.zeros((14, 14)))


def test_tames_standard():
    om = sl.standard_omega(4)
    j = sl.compatible_j(om)
    assert sl.tames(om, j)
    minus = sl.ComplexStructure(-j.matrix)
    assert not sl.tames(om, minus)


def test_tames_exact_path():
    om = sl.standard_omega(2)
    j = sl.ComplexStructure(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert sl.tames(om, j)


def test_tames_4x4_phase_block():
    # the 4x4 model pair with its phase structure J_phi: taming needs
    # cos(phi) < 0 and cos(phi + psi) < 0 in this basis convention
    mu, nu = -0.3, 0.8
    blocks = [sl.ComplexBlock(mu, nu, 1)]
    a0m, a1m = sl._model_matrices(blocks)
    a0 = sl.SkewForm(a0m)
    a1 = sl.SkewForm(a1m)
    psi = math.atan2(nu, mu)
    phi = math.pi - psi / 2
    rot = np.array([
        [math.cos(phi), -math.sin(phi)],
        [math.sin(phi), math.cos(phi)],
    ])
    j = np.zeros((4, 4))
    j[0:2, 2:4] = rot
    j[2:4, 0:2] = -rot.T
    jc = sl.ComplexStructure(j)
    assert sl.tames(a0, jc)
    assert sl.tames(a1, jc)


def test_pencil_endomorphism_examples():
    om = sl.standard_omega(4)
    b = sl.pencil_endomorphism(om, om)
    assert np.allclose(b, np.eye(4))
    two = sl.SkewForm([[2 * x for x in row] for row in om.matrix])
    assert np.allclose(sl.pencil_endomorphism(om, two), 2 * np.eye(4))


def test_pencil_endomorphism_pairing():
    rng = np.random.default_rng(5)
    a0, a1 = sl.random_nondegenerate_pair(rng, 6)
    b = sl.pencil_endomorphism(a0, a1)
    m0, m1 = a0.to_array(), a1.to_array()
    for _ in range(20):
        v = rng.standard_normal(6)
        w = rng.standard_normal(6)
        assert abs((b @ v) @ m0 @ w - v @ m1 @ w) <= 1e-12 * max(
            1.0, abs(v @ m1 @ w))


def test_pencil_endomorphism_requires_nondegenerate():
    degenerate = sl.SkewForm(np.zeros((4, 4)))
    with pytest.raises(ValueError, match="degenerate"):
        sl.pencil_endomorphism(degenerate, sl.standard_omega(4))


def test_segment_and_ray_trivials():
    om = sl.standard_omega(4)
    two = sl.SkewForm([[2 * x for x in row] for row in om.matrix])
    neg = sl.SkewForm([[-x for x in row] for row in om.matrix])
    assert sl.segment_nondegenerate(om, two)
    assert sl.ray_nondegenerate(om, two)
    assert not sl.segment_nondegenerate(om, neg)  # degenerate at t = 1/2
    assert not sl.ray_nondegenerate(om, neg)
    assert sl.cotamed_exists(om, two)
    assert not sl.cotamed_exists(om, neg)


def test_remark_pair_is_cotamed():
    a0, a1 = sl.remark_pair()
    assert sl.pfaffian(a0) != 0 and sl.pfaffian(a1) != 0
    assert a0.to_form().wedge(a1.to_form()).top_coefficient() == 0
    assert sl.cotamed_exists(a0, a1)
    j = sl.construct_cotamed(a0, a1)
    assert sl.tames(a0, j) and sl.tames(a1, j)


def test_reduce_scalar_multiple():
    om = sl.standard_omega(4)
    lam = 3.0
    scaled = sl.SkewForm(np.array(om.to_array() * lam))
    red = sl.simultaneous_reduce(sl.SkewForm(om.to_array()), scaled)
    assert all(isinstance(b, sl.RealBlock) for b in red.blocks)
    assert all(abs(float(b.eigenvalue) - lam) <= 1e-9 for b in red.blocks)
    assert red.omega0_residual <= 1e-9


@pytest.mark.parametrize("mu,nu", [(1.0, 2.0), (-0.5, 1.5)])
def test_reduce_recovers_complex_block(mu, nu):
    rng = np.random.default_rng(42)
    blocks = [sl.ComplexBlock(mu, nu, 1)]
    a0m, a1m = sl._model_matrices(blocks)
    p0 = rng.standard_normal((4, 4))
    while abs(np.linalg.det(p0)) < 0.3:
        p0 = rng.standard_normal((4, 4))
    a0 = sl.SkewForm(p0.T @ a0m @ p0)
    a1 = sl.SkewForm(p0.T @ a1m @ p0)
    red = sl.simultaneous_reduce(a0, a1, 1e-3)
    assert len(red.blocks) == 1
    b = red.blocks[0]
    assert isinstance(b, sl.ComplexBlock)
    assert abs(b.mu - mu) <= 1e-6
    assert abs(abs(b.nu) - abs(nu)) <= 1e-6
    assert red.omega0_residual <= 1e-9
    assert red.omega1_residual <= 10 * 1e-3


def test_reduce_recovers_jordan_chain():
    rng = np.random.default_rng(7)
    eps = 1e-3
    blocks = [sl.RealBlock(2.0, 2)]
    a0m, a1m = sl._model_with_chain_eps(blocks, eps)
    p0 = rng.standard_normal((4, 4))
    a0 = sl.SkewForm(p0.T @ a0m @ p0)
    a1 = sl.SkewForm(p0.T @ a1m @ p0)
    red = sl.simultaneous_reduce(a0, a1, eps)
    assert len(red.blocks) == 1
    b = red.blocks[0]
    assert isinstance(b, sl.RealBlock)
    assert b.chain_length == 2
    assert abs(float(b.eigenvalue) - 2.0) <= 1e-6
    assert red.omega1_residual <= 10 * eps


def test_reduce_mixed_dim8():
    rng = np.random.default_rng(11)
    eps = 1e-3
    blocks = [sl.RealBlock(3.0, 2), sl.ComplexBlock(-1.0, 1.5, 1)]
    a0m, a1m = sl._model_with_chain_eps(blocks, eps)
    p0 = rng.standard_normal((8, 8))
    a0 = sl.SkewForm(p0.T @ a0m @ p0)
    a1 = sl.SkewForm(p0.T @ a1m @ p0)
    red = sl.simultaneous_reduce(a0, a1, eps)
    kinds = sorted(type(b).__name__ for b in red.blocks)
    assert kinds == ["ComplexBlock", "RealBlock"]
    assert red.omega0_residual <= 1e-9
    assert red.omega1_residual <= 10 * eps


def test_exact_reduce_rational_spectrum():
    d0 = sl.standard_omega(4)
    rows = [[Q(0)] * 4 for _ in range(4)]
    rows[0][1], rows[1][0] = Q(1, 3), Q(-1, 3)
    rows[2][3], rows[3][2] = Q(5, 2), Q(-5, 2)
    d1 = sl.SkewForm(rows)
    red = sl.simultaneous_reduce(d0, d1)
    eigs = sorted(b.eigenvalue for b in red.blocks)
    assert eigs == [Q(1, 3), Q(5, 2)]          # exact rationals, not floats
    assert red.omega0_residual == 0.0


def test_block_parameter_stability_across_eps():
    # the clustered spectrum should not move as eps is refined
    rng = np.random.default_rng(3)
    blocks = [sl.ComplexBlock(0.7, -1.1, 1), sl.RealBlock(2.5, 1)]
    a0m, a1m = sl._model_matrices(blocks)
    p0 = rng.standard_normal((6, 6))
    a0 = sl.SkewForm(p0.T @ a0m @ p0)
    a1 = sl.SkewForm(p0.T @ a1m @ p0)
    seen = []
    for eps in (1e-2, 1e-3, 1e-4):
        red = sl.simultaneous_reduce(a0, a1, eps)
        params = sorted(
            (round(b.mu, 6), round(abs(b.nu), 6)) if isinstance(b, sl.ComplexBlock)
            else (round(float(b.eigenvalue), 6), 0.0)
            for b in red.blocks
        )
        seen.append(params)
    assert seen[0] == seen[1] == seen[2]


def test_construct_cotamed_standard():
    om = sl.standard_omega(4)
    j = sl.construct_cotamed(om, sl.SkewForm([list(r) for r in om.matrix]))
    assert sl.tames(om, j)


def test_construct_cotamed_requires_existence():
    om = sl.standard_omega(4)
    neg = sl.SkewForm([[-x for x in row] for row in om.matrix])
    with pytest.raises(sl.CotamedExistenceError):
        sl.construct_cotamed(om, neg)


def test_sign_law_on_random_pairs():
    # when the segment stays nondegenerate, every real eigenvalue of the
    # pencil endomorphism is positive
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(200):
        a0, a1 = sl.random_nondegenerate_pair(rng, 6)
        b = sl.pencil_endomorphism(a0, a1)
        if sl.segment_nondegenerate(a0, a1, cross_validate=False):
            checked += 1
            for lam in np.linalg.eigvals(b):
                if abs(lam.imag) <= 1e-8 * max(1.0, abs(lam.real)):
                    assert lam.real > 0
    assert checked > 10


def test_cayley_map_trivials():
    om = sl.standard_omega(6)
    j0 = sl.compatible_j(om)
    assert np.allclose(sl.cayley_map(j0, j0), 0.0)
    back = sl.cayley_inverse(j0, np.zeros((6, 6)))
    assert np.allclose(back.matrix, j0.matrix)


def test_cayley_singular_cases():
    om = sl.standard_omega(4)
    j0 = sl.compatible_j(om)
    minus = sl.ComplexStructure(-j0.matrix)
    with pytest.raises(ValueError, match="singular"):
        sl.cayley_map(j0, minus)
    bad = np.eye(4)
    with pytest.raises(ValueError, match="anticommute"):
        sl.cayley_inverse(j0, bad)


def test_cayley_roundtrip_and_anticommutation():
    rng = np.random.default_rng(23)
    for trial in range(25):
        a = sl.random_skew(np.random.default_rng(trial), 6)
        if not sl.is_nondegenerate(a):
            continue
        j0 = sl.compatible_j(a)
        j = sl.random_tamed_j(rng, a)
        am = sl.cayley_map(j0, j)
        assert np.max(np.abs(am @ j0.matrix + j0.matrix @ am)) <= 1e-12 * max(
            1.0, float(np.max(np.abs(am))))
        back = sl.cayley_inverse(j0, am)
        assert np.max(np.abs(back.matrix - j.matrix)) <= 1e-10


def test_interpolate_endpoints():
    rng = np.random.default_rng(31)
    a = sl.random_skew(rng, 4)
    while not sl.is_nondegenerate(a):
        a = sl.random_skew(rng, 4)
    j0 = sl.compatible_j(a)
    j1 = sl.random_tamed_j(rng, a)
    j2 = sl.random_tamed_j(rng, a)
    assert np.allclose(sl.interpolate_tamed(j0, j1, j2, 0.0).matrix, j1.matrix)
    assert np.allclose(sl.interpolate_tamed(j0, j1, j2, 1.0).matrix, j2.matrix)


def test_interpolation_preserves_taming():
    rep = sl.interpolation_suite(40, seed=0)
    assert rep.mismatches == 0
    assert rep.worst_margin > 0


def test_taming_threshold_examples():
    om = sl.standard_omega(4)
    j = sl.compatible_j(om)
    assert sl.taming_threshold(om, om, j) == 0.0
    neg = sl.SkewForm([[-x for x in row] for row in om.matrix])
    t = sl.taming_threshold(neg, om, j)
    assert abs(t - 1.0) <= 1e-5
    for mult in (t, 2 * t, 10 * t):
        shifted = sl.SkewForm(np.array(neg.to_array() + mult * om.to_array()))
        assert sl.tames(shifted, j)
    with pytest.raises(ValueError, match="tame"):
        sl.taming_threshold(om, neg, j)


def test_taming_threshold_random_tamed_is_zero():
    rng = np.random.default_rng(41)
    a = sl.random_skew(rng, 4)
    while not sl.is_nondegenerate(a):
        a = sl.random_skew(rng, 4)
    j = sl.compatible_j(a)
    assert sl.taming_threshold(a, a, j) == 0.0


def test_cocompatible_counterexample_basics():
    a0, a1 = sl.remark_pair()
    # standard compatible structure has an explicit violating vector
    j = sl.compatible_j(a0)
    m = a1.to_array() @ j.matrix
    vals, vecs = np.linalg.eigh((m + m.T) / 2)
    assert vals[0] <= 0
    v = vecs[:, 0]
    assert v @ a1.to_array() @ (j.matrix @ v) <= 1e-12


def test_cocompatible_suite_small():
    rep = sl.cocompatible_counterexample_suite(500, seed=0)
    assert rep.mismatches == 0
    assert rep.detail["wedge_top"] == "0"


def test_equivalence_suite_small():
    rep = sl.appendix_equivalence_suite(30, dims=(4, 6), seed=0)
    assert rep.mismatches == 0
