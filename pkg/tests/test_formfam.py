import math
import random

import numpy as np
import pytest

from liouville_lab import formfam as ff
from liouville_lab import liealg
from liouville_lab.exterior import Form


S1 = liealg.totally_real(1)
SOL = liealg.sol_from_sl2([[2, 1], [1, 1]])
TR3 = liealg.totally_real(3)


def test_profile_fd_validation_catches_wrong_derivative():
    with pytest.raises(ff.ProfileError, match="FD check"):
        ff.ProfileFn(math.sin, math.sin, "bad")


def test_profile_library_and_arithmetic():
    f = ff.exp_fn(2.0, 1.0)
    assert abs(f(0.3) - math.exp(1.6)) < 1e-12
    assert abs(f.deriv(0.3) - 2 * math.exp(1.6)) < 1e-12
    g = ff.sin_fn() * ff.cos_fn() + ff.linear(3.0, -1.0)
    s = 0.4
    assert abs(g(s) - (math.sin(s) * math.cos(s) + 3 * s - 1)) < 1e-12
    assert abs(g.deriv(s) - (math.cos(2 * s) + 3)) < 1e-10
    h = f.precompose_affine(-1.0, 0.5)
    assert abs(h(0.2) - math.exp(2 * 0.3 + 1)) < 1e-12


def test_smoothsteps_are_cutoffs():
    for kind in ("quintic", "cubic"):
        psi = ff.cutoff_step(kind)
        assert psi(-0.5) == 0.0 and psi(0.0) == 0.0
        assert psi(1.0) == 1.0 and psi(2.0) == 1.0
        assert 0 < psi(0.5) < 1


def test_plateau_bump_shape():
    psi = ff.plateau_bump(1.0)
    assert psi(-0.1) == 0.0 and psi(1.1) == 0.0
    assert psi(1 / 3) == 1.0 and psi(0.5) == 1.0 and psi(2 / 3) == 1.0


def test_d_param_trivials():
    pf = ff.ParamForm(("ds", "dt"), (), None, 1, {})
    pf.add_term(("dt",), ff.ParamCoeff.of(ff.sin_fn()))
    d = pf.d()
    val = d.at(0.3)
    assert abs(val.terms[0b11] - math.cos(0.3)) < 1e-12
    assert pf.d_squared_sup([0.1, 0.7, 2.0]) <= 1e-9


def test_d_param_leibniz_on_exponential():
    # d(e^s a+) = e^s ds^a+ + e^s da+ at sampled s
    g = SOL.algebra
    pf = ff.ParamForm(("ds", "dt"), (), g, 1, {})
    off = pf.offset
    for m, c in SOL.alpha_plus.terms.items():
        pf.terms[m << off] = ff.ParamCoeff.of(ff.exp_fn(1.0) * float(c))
    d = pf.d()
    for s in (0.0, 0.8, -1.3):
        got = d.at(s)
        es = math.exp(s)
        lam = ff.ParamForm(("ds", "dt"), (), g, 1, dict(pf.terms)).at(s)
        dap = g.ce_differential(SOL.alpha_plus.to_float())
        expect = {}
        for m, c in SOL.alpha_plus.terms.items():
            expect[(m << off) | 1] = es * float(c)
        for m, c in dap.terms.items():
            expect[m << off] = es * float(c)
        for m, c in expect.items():
            assert abs(got.terms.get(m, 0.0) - c) < 1e-12
        del lam


def test_d_param_squares_to_zero_on_families():
    samples = [0.1, 1.0, 2.5, 4.0]
    fixtures = [
        ff.gt_form(SOL, 1).to_param_form(),
        ff.gt_form(TR3, 1).to_param_form(),
        ff.cutoff_liouville(SOL, 2.0, ff.cutoff_step("quintic")),
        ff.lutz_lambda_k(SOL, 2),
    ]
    for pf in fixtures:
        assert pf.d_squared_sup(samples) <= 1e-9
    # two-parameter fixture
    lin = ff.ParamForm(("ds", "dt"), (), SOL.algebra, 1, {})
    for m, c in SOL.alpha_plus.terms.items():
        lin.terms[m << lin.offset] = ff.ParamCoeff(
            [(ff.exp_fn(1.0) * float(c), ff.exp_fn(-0.5))]
        )
    assert lin.d_squared_sup([(0.3, 0.7), (1.0, -1.0)]) <= 1e-9


def test_gt_form_endpoints():
    triple = ff.gt_form(SOL, 1)
    lam0 = triple.lambda_at(0.0)
    off = 2
    for m, c in SOL.alpha_plus.terms.items():
        assert abs(lam0.terms.get(m << off, 0.0) - float(c)) < 1e-12
    lam_pi = triple.lambda_at(math.pi)
    for m, c in SOL.alpha_minus.terms.items():
        assert abs(lam_pi.terms.get(m << off, 0.0) - float(c)) < 1e-12
    assert abs(lam_pi.terms.get(0b10, 0.0)) < 1e-12


def test_gt_form_collapses_to_circle_family():
    # over the pair ±dθ the family is cos s dθ + sin s dt
    triple = ff.gt_form(S1, 1)
    for s in (0.3, 1.2, 2.9):
        lam = triple.lambda_at(s)
        assert abs(lam.terms.get(0b100, 0.0) - math.cos(s)) < 1e-12
        assert abs(lam.terms.get(0b010, 0.0) - math.sin(s)) < 1e-12


def test_gt_requires_positive_k():
    with pytest.raises(ValueError, match="k >= 1"):
        ff.gt_form(S1, 0)


def test_contact_grid_check_t3_constant():
    triple = ff.gt_form(S1, 2)
    chk = ff.contact_grid_check(triple, 256)
    assert chk.passed
    assert abs(chk.min_value - 1.0) < 1e-9   # constant top coefficient


@pytest.mark.parametrize("k", [2, 3])
def test_frequency_k_torus_family_constant_volume(k):
    # cos(ks) dθ + sin(ks) dt over the circle pair: the volume is the
    # constant k, independent of s
    f = 0.5 * (ff.cos_fn(k) + 1.0)
    g = 0.5 * (ff.const(1.0) - ff.cos_fn(k))
    h = ff.sin_fn(k)
    triple = ff.ProfileTriple(f, g, h, ff.PairData.from_preset(S1),
                              (0.0, 2 * math.pi))
    pf = triple.to_param_form()
    dpf = pf.d()
    for s in np.linspace(0.0, 2 * math.pi, 37):
        top = pf.at(s).wedge(dpf.at(s)).top_coefficient()
        assert abs(top - k) <= 1e-12 * k


def test_contact_grid_check_sol():
    chk = ff.contact_grid_check(ff.gt_form(SOL, 1), 256)
    assert chk.passed and chk.min_value > 0


def test_contact_grid_check_threads_deterministic():
    triple = ff.gt_form(SOL, 1)
    a = ff.contact_grid_check(triple, 128, threads=1)
    b = ff.contact_grid_check(triple, 128, threads=4)
    assert a.min_value == b.min_value and a.argmin == b.argmin


def test_degenerate_triple_fails():
    with pytest.raises(ValueError, match="invalid"):
        ff.ProfileTriple(ff.const(0.0), ff.const(0.0), ff.const(1.0),
                         ff.PairData.from_preset(SOL), (0.0, 1.0))
    # (f, g, h) = (1, 0, 0) is a valid triple but h' = h = 0 kills the
    # contact volume, so the grid check fails
    triple = ff.ProfileTriple(ff.const(1.0), ff.const(0.0), ff.const(0.0),
                              ff.PairData.from_preset(S1), (0.0, 1.0))
    chk = ff.contact_grid_check(triple, 32)
    assert not chk.passed


def test_reeb_t3_closed_form():
    triple = ff.gt_form(S1, 1)
    for s in (0.0, 0.4, math.pi / 2, 2.2):
        res = ff.reeb_field(triple, s)
        assert abs(res.X.coords[0] - math.cos(s)) <= 1e-10
        assert abs(res.u - math.sin(s)) <= 1e-10
        assert res.residual_pairing <= 1e-10
        assert res.residual_closure <= 1e-10


def test_reeb_sol_at_quarter_turn():
    triple = ff.gt_form(SOL, 1)
    res = ff.reeb_field(triple, math.pi / 2)
    assert max(abs(v) for v in res.X.coords) <= 1e-10
    assert abs(res.u - 1.0) <= 1e-10
    assert res.residual_pairing <= 1e-8
    assert res.residual_closure <= 1e-8


def test_reeb_residuals_across_grid():
    triple = ff.gt_form(SOL, 1)
    for s in np.linspace(0.0, 2 * math.pi, 64):
        res = ff.reeb_field(triple, float(s))
        assert res.residual_pairing <= 1e-8
        assert res.residual_closure <= 1e-8


def test_reeb_branch_consistency():
    # where |h| is small but nonzero the two u-branch formulas must agree
    triple = ff.gt_form(SOL, 1)
    for delta in (1e-7, 1e-6, 1e-5):
        s = math.pi - delta  # h = sin s ~ delta
        u_h, u_hp = ff.reeb_branch_values(triple, s)
        assert u_h is not None and u_hp is not None
        assert abs(u_h - u_hp) <= 1e-6


def test_reeb_invalid_profile():
    triple = ff.ProfileTriple(ff.const(1.0), ff.const(1.0), ff.const(0.0),
                              ff.PairData.from_preset(SOL), (0.0, 1.0))
    with pytest.raises(ArithmeticError):
        ff.reeb_field(triple, 0.5)


def test_gt_top_coefficient_periodicity():
    triple = ff.gt_form(SOL, 2)
    pf = triple.to_param_form()
    dpf = pf.d()
    for s in (0.3, 1.1, 2.0):
        a = pf.at(s).wedge(dpf.at(s).power(2)).top_coefficient()
        b = pf.at(s + 2 * math.pi).wedge(
            dpf.at(s + 2 * math.pi).power(2)).top_coefficient()
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("tau", [0.0, 0.25, 0.5, 0.75])
def test_lutz_identity(k, tau):
    err = ff.lutz_family_check(SOL, k, tau, grid_n=128)
    assert err <= 1e-8


def test_lutz_identity_second_cutoff_choice():
    # the identity holds for any admissible cutoff: quintic and cubic
    for kind in ("quintic", "cubic"):
        err = ff.lutz_family_check(SOL, 2, 0.5, grid_n=64, kind=kind)
        assert err <= 1e-8


def test_lutz_tau_one_vanishes_on_plateau():
    psi = ff.plateau_bump(1.0)
    lam_k = ff.lutz_lambda_k(SOL, 1)
    scale_zero_at = 0.5  # psi = 1 there, so (1 - tau psi) = 0 at tau = 1
    npow = (lam_k.coframe.dim + 1) // 2
    base = lam_k.at(scale_zero_at).wedge(
        lam_k.d().at(scale_zero_at).power(npow - 1)).top_coefficient()
    assert abs((1 - 1.0 * psi(scale_zero_at)) ** npow * base) == 0.0


def test_xi_identity_random_draws():
    rng = random.Random(0)
    for _ in range(50):
        c_plus = rng.uniform(0, 2)
        c_minus = rng.uniform(0, 2)
        if c_plus == 0 and c_minus == 0:
            continue
        b = rng.uniform(0.1, 3)
        delta = rng.uniform(-2, 2)
        res = ff.xi_nondegenerate(SOL, c_plus, c_minus, b, delta)
        assert res.identity_error <= 1e-9
        assert res.nonzero


def test_xi_degenerate_boundary():
    res = ff.xi_nondegenerate(SOL, 1.0, 1.0, 0.0, 0.5)
    assert abs(res.top_power_value) <= 1e-12
    assert not res.nonzero


def test_xi_reduces_to_contact_volume():
    res = ff.xi_nondegenerate(SOL, 1.0, 0.0, 2.0, 0.0)
    # w = da+ + B dt^a+: top power = p B C+^p dt ^ a+ ^ da+^(p-1)
    assert res.identity_error <= 1e-12
    assert res.top_power_value != 0


def test_xi_rejects_zero_cone_point():
    with pytest.raises(ValueError, match="not both zero"):
        ff.xi_nondegenerate(SOL, 0.0, 0.0, 1.0, 0.0)


def test_linear_model_dim3():
    ab = liealg.LieAlgebra(("Θ*",), {})
    alpha = Form.covector(ab.coframe(), 0)
    res = ff.linear_model_pair_check(ab, alpha, -1.0, 1.0, grid_n=24)
    assert res.passed
    assert res.factor_error <= 1e-8


def test_linear_model_higher_base():
    p = liealg.totally_real(2)
    res = ff.linear_model_pair_check(p.algebra, p.alpha_plus, -0.5, 0.75,
                                     grid_n=12)
    assert res.passed


def test_linear_model_precondition():
    ab = liealg.LieAlgebra(("Θ*",), {})
    alpha = Form.covector(ab.coframe(), 0)
    with pytest.raises(ValueError, match="nu > mu"):
        ff.linear_model_pair_check(ab, alpha, 1.0, 1.0)


def test_ab_squared_identity():
    # a^2 - b^2 = 4 for a = e^s + e^-s, b = e^s - e^-s
    for s in (-2.0, 0.0, 1.7):
        a = math.exp(s) + math.exp(-s)
        b = math.exp(s) - math.exp(-s)
        assert abs(a * a - b * b - 4.0) < 1e-12


def test_weak_domination_omega_dalpha_reduces_to_contact():
    g = SOL.algebra
    ap = SOL.alpha_plus
    dap = g.ce_differential(ap)
    cert = ff.weak_domination_ray_check(ap, dap, dap)
    assert cert.verdict == "positive"
    assert cert.kind == "exact-sturm"


def test_weak_domination_zero_omega_reports_halves():
    g = SOL.algebra
    ap = SOL.alpha_plus
    dap = g.ce_differential(ap)
    zero2 = Form.zero(g.coframe(), 2)
    cert = ff.weak_domination_ray_check(ap, zero2, dap)
    assert not cert.symplectic_ok
    assert cert.ray_ok
    assert cert.verdict == "indefinite"


def test_weak_domination_float_fallback():
    g = SOL.algebra
    ap = SOL.alpha_plus.to_float()
    dap = g.ce_differential(ap)
    cert = ff.weak_domination_ray_check(ap, dap, dap)
    assert cert.kind == "grid"
    assert cert.verdict == "positive"


def test_sol_ray_fixture_exact():
    for eps in ("1/100", "1/1000"):
        cert = ff.sol_weak_filling_ray_fixture(eps)
        assert cert.verdict == "positive"
        assert cert.kind == "exact-sturm"


def test_sol_fixture_wedge_and_grid():
    res = ff.sol_weak_filling_fixture(0.01, grid_n=48)
    assert res.wedge_plus_zero and res.wedge_minus_zero
    assert res.passed
    res0 = ff.sol_weak_filling_fixture(0.0, grid_n=32)
    assert res0.min_top > 0   # exact product Liouville form


def test_cutoff_outside_support_matches_liouville():
    # where psi' = 0 and psi = 1 the cutoff form equals the plain beta
    psi = ff.cutoff_step("quintic")
    c = 3.0
    pf = ff.cutoff_liouville(SOL, c, psi)
    dpf = pf.d()
    plain = ff.beta_grid_check(SOL, (0.0, 0.0), 1)
    p = pf.coframe.dim // 2
    inside = dpf.at(0.0).power(p).top_coefficient()
    assert abs(inside - plain[0]) <= 1e-9 * max(1.0, abs(inside))


def test_cutoff_c0_fails_and_search_recovers():
    psi = ff.cutoff_step("quintic")
    bad = ff.cutoff_positive_on_grid(SOL, 0.0, psi, 128)
    assert not bad[0] > 0
    c_star = ff.min_c_search(SOL, psi, grid_n=128)
    assert c_star < 64
    refined = ff.cutoff_positive_on_grid(SOL, c_star, psi, 512)
    assert refined[0] > 0


def test_cutoff_second_profile_choice():
    psi = ff.cutoff_step("cubic")
    c_star = ff.min_c_search(SOL, psi, grid_n=128)
    assert ff.cutoff_positive_on_grid(SOL, c_star, psi, 512)[0] > 0


def test_cutoff_dim5_pair():
    psi = ff.cutoff_step("quintic")
    c_star = ff.min_c_search(TR3, psi, grid_n=96)
    assert ff.cutoff_positive_on_grid(TR3, c_star, psi, 384)[0] > 0


def test_cutoff_rejects_bad_psi():
    with pytest.raises(ValueError, match="psi"):
        ff.cutoff_liouville(SOL, 1.0, ff.const(0.5))


def test_cutoff_cap_exceeded_reports_violation():
    # (a+, -a+) never becomes Liouville: the coefficient function vanishes
    # at s = 0 for every c, so the search must hit its cap and report it
    bad = ff.PairData(SOL.algebra, SOL.alpha_plus.to_float(),
                      (-1 * SOL.alpha_plus).to_float(), "corrupt")
    psi = ff.cutoff_step("quintic")
    with pytest.raises(ff.CapExceededError) as err:
        ff.min_c_search(bad, psi, grid_n=64, cap=4.0)
    assert err.value.violating_s is not None


def test_gt_form_warns_on_corrupted_pair():
    import warnings
    corrupted = liealg.Preset(
        "corrupt", SOL.algebra, SOL.alpha_plus, SOL.alpha_plus,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ff.gt_form(corrupted, 1)
    assert any("not certified" in str(w.message) for w in caught)


def test_ideal_annulus_identity():
    assert ff.ideal_annulus_check(512) <= 1e-12


def test_phi_at_half_pi_vanishes():
    assert abs(math.log((1 + math.cos(math.pi / 2)) / math.sin(math.pi / 2))) \
        == 0.0


def test_gt_reparam_identity():
    assert ff.gt_reparam_check(SOL, 512) <= 1e-10


def test_beta_grid_agrees_with_exact_certificate():
    rng = random.Random(1)
    from fractions import Fraction as Q
    presets = [liealg.totally_real(2), liealg.totally_real(3),
               liealg.sol_from_sl2([[2, 1], [1, 1]]), liealg.geiges(2)]
    fixtures = []
    for p in presets:
        fixtures.append((p.algebra, p.alpha_plus, p.alpha_minus))
    # corrupted pairs: random sign and coefficient tweaks
    count = 0
    attempts = 0
    while count < 20 and attempts < 200:
        attempts += 1
        p = presets[rng.randrange(len(presets))]
        cf = p.algebra.coframe()
        noise = Form(cf, 1, {
            1 << rng.randrange(cf.dim): Q(rng.randint(-3, 3))
        })
        ap = p.alpha_plus + noise
        am = p.alpha_minus + (-1 if rng.random() < 0.5 else 1) * noise
        cert = liealg.liouville_pair_check(p.algebra, ap, am)
        if cert.verdict != "positive" and cert.witness is not None:
            if cert.witness[0] == "point":
                x = float(cert.witness[1])
                if not (1e-9 < x < 1 - 1e-9):
                    continue
                s_viol = 0.5 * math.log(x / (1 - x))
                if abs(s_viol) > 10:
                    continue
        fixtures.append((p.algebra, ap, am))
        count += 1
    assert count == 20
    for g, ap, am in fixtures:
        cert = liealg.liouville_pair_check(g, ap, am)
        pair = ff.PairData(g, ap.to_float(), am.to_float())
        min_top, _ = ff.beta_grid_check(pair, grid_n=200)
        assert (cert.verdict == "positive") == (min_top > 0)


def test_family_descriptor_roundtrip():
    out = ff.run_family_descriptor(
        {"family": "gt", "k": 2, "pair": "sol:2,1,1,1", "grid": 128}
    )
    assert out["verdict"] == "pass"
    assert out["min_value"] > 0
    assert "orientation" in out
    with pytest.raises(ValueError, match="unknown family"):
        ff.run_family_descriptor({"family": "nope"})


def test_product_pair_fixture_shapes():
    plus, minus = ff.product_pair_fixture(
        SOL, liealg.totally_real(1).algebra,
        liealg.totally_real(1).alpha_plus,
    )
    val = plus.at(0.5)
    assert val.degree == 1
    assert not val.is_zero()
