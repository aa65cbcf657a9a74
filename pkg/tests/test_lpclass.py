import math

import numpy as np
import pytest
import scipy.special

from traceminmax import funcalc, inequality, lpclass, series


def test_constant_product():
    h = lpclass.HadamardProduct()
    assert lpclass.eval_product(h, 1.7) == pytest.approx(1.0)


def test_single_root_factor():
    h = lpclass.HadamardProduct(roots=((1.0, 1),))
    for x in (-0.5, 0.3, 0.99, 2.5):
        assert lpclass.eval_product(h, x) == pytest.approx((1 - x) * math.exp(x),
                                                           rel=1e-14)
    assert lpclass.eval_product(h, 1.0) == 0.0


def test_sign_changes_at_odd_roots(rng):
    h = lpclass.HadamardProduct(roots=((1.0, 1), (-2.0, 1), (3.0, 2)))
    # sign flips exactly at odd-multiplicity roots; bisect to locate them
    for root in (1.0, -2.0):
        lo, hi = root - 0.5, root + 0.5
        flo = lpclass.eval_product(h, lo)
        fhi = lpclass.eval_product(h, hi)
        assert flo * fhi < 0
        for _ in range(60):
            mid = (lo + hi) / 2
            if lpclass.eval_product(h, mid) * flo > 0:
                lo = mid
            else:
                hi = mid
        assert abs((lo + hi) / 2 - root) < 1e-12
    # even multiplicity: no sign change
    assert lpclass.eval_product(h, 2.9) * lpclass.eval_product(h, 3.1) > 0


def test_inverse_gamma_against_lanczos_oracle():
    h = lpclass.inverse_gamma_product(10_000)
    xs = np.linspace(0.5, 3.0, 26)
    for x in xs:
        got = lpclass.eval_product(h, float(x))
        want = 1.0 / scipy.special.gamma(x)  # Lanczos-based reference
        assert abs(got - want) <= 1e-6 * abs(want)


def test_inverse_gamma_truncation_bound():
    h = lpclass.inverse_gamma_product(10_000)
    value, bound = lpclass.eval_product_with_bound(h, 3.0)
    assert 0 < bound < 1e-12  # tail-corrected through fourth moments
    want = 1.0 / scipy.special.gamma(3.0)
    assert abs(value - want) / abs(want) <= bound + 1e-13
    # without tail data the truncated product is exact as written
    h0 = lpclass.HadamardProduct(roots=((1.0, 1),))
    assert lpclass.eval_product_with_bound(h0, 0.5).bound == 0.0


def test_neg_log_series_one_minus_x():
    h = lpclass.HadamardProduct(roots=((1.0, 1),))
    p = lpclass.neg_log_series(h, 0.0, 6)
    want = [0.0, 0.0, 1 / 2, 1 / 3, 1 / 4, 1 / 5, 1 / 6]
    assert np.abs(p.coeffs - want).max() < 1e-15


def test_neg_log_series_pure_exponential():
    h = lpclass.HadamardProduct(b=-1.0)  # e^x
    p = lpclass.neg_log_series(h, 0.0, 5)
    assert np.abs(p.coeffs - [0, -1, 0, 0, 0, 0]).max() == 0.0


def test_neg_log_series_gaussian():
    h = lpclass.HadamardProduct(cq=1.0)  # e^{-x^2}
    p = lpclass.neg_log_series(h, 0.0, 5)
    assert np.abs(p.coeffs - [0, 0, 1, 0, 0, 0]).max() == 0.0


def test_neg_log_series_recentering_matches_values():
    h = lpclass.HadamardProduct(k=1, b=0.3, cq=0.2,
                                roots=((2.0, 1), (-1.5, 2)))
    center = 0.7
    # nearest singularity (the root at 0) is 0.7 away; order 36 puts the
    # truncation tail below the comparison tolerance at |dz| <= 0.25
    p = lpclass.neg_log_series(h, center, 36)
    for dz in (-0.2, -0.05, 0.1, 0.25):
        want = -math.log(lpclass.eval_product(h, center + dz))
        assert p(center + dz) == pytest.approx(want, abs=1e-11)


def test_neg_log_series_rejects_bad_center():
    h = lpclass.HadamardProduct(roots=((1.0, 1),))
    with pytest.raises(ValueError):
        lpclass.neg_log_series(h, 1.0, 4)  # at the root
    with pytest.raises(ValueError):
        lpclass.neg_log_series(h, 2.0, 4)  # beyond it, product negative


def test_products_of_roots_away_from_center_pass_hankel(rng):
    # all roots outside the expansion window: trace minmax finite shadow holds
    for trial in range(5):
        roots = tuple((float(r), 1) for r in rng.uniform(1.5, 8.0, size=4)
                      * rng.choice([-1.0, 1.0], size=4))
        h = lpclass.HadamardProduct(cq=float(rng.uniform(0, 1)), roots=roots)
        p = lpclass.neg_log_series(h, 0.0, 14)
        ok, min_eig = series.hankel_psd_test(p, series.HankelSpec(2, 6, True),
                                             tol=1e-9)
        assert ok, (roots, min_eig)


def test_radical_membership_margins():
    gauss = funcalc.resolve_function("gauss")
    assert lpclass.radical_membership_margin(gauss, (-1.0, 1.0)) >= -1e-12
    # (1 - x/2) on (-1, 1): rank-one geometric Hankel
    lin = funcalc.poly_function([1.0, -0.5], name="1-x/2")
    assert lpclass.radical_membership_margin(lin, (-1.0, 1.0)) >= -1e-12
    # n-th roots stay members
    assert lpclass.radical_membership_margin(gauss, (-1.0, 1.0), n_root=7) >= -1e-12
    # 1 + x^2 has complex roots: not in the class, margin clearly negative
    bad = funcalc.poly_function([1.0, 0.0, 1.0], name="1+x2")
    assert lpclass.radical_membership_margin(bad, (-1.0, 1.0)) < -0.5


def test_det_isoperimetric_closed_under_products(rng):
    # products of determinant isoperimetric registry members stay so
    g1 = funcalc.neg_exp_of(funcalc.resolve_function("x2"))      # e^{-x^2}
    g2 = funcalc.resolve_function("exp")                          # e^{x}
    g3 = funcalc.poly_function([1.0, -0.5], name="1-x/2")
    prod = funcalc.function_product(funcalc.function_product(g1, g2), g3)
    worst = math.inf
    for i in range(300):
        q = inequality.sample_quadruple(1 + (i % 6), (-1.0, 1.0), seed=51,
                                        counter=i, validate=False)
        res = inequality.det_isoperimetric_margin(prod, q)
        assert not res.vanished
        worst = min(worst, res.margin)
    assert worst >= -1e-9


def test_roots_from_csv(tmp_path):
    path = tmp_path / "roots.csv"
    path.write_text("# table\n1.5\n-2.0\n\n3.25\n")
    assert lpclass.roots_from_csv(path) == ((1.5, 1), (-2.0, 1), (3.25, 1))
    bad = tmp_path / "bad.csv"
    bad.write_text("0.0\n")
    with pytest.raises(ValueError):
        lpclass.roots_from_csv(bad)


def test_product_validation():
    with pytest.raises(ValueError):
        lpclass.HadamardProduct(cq=-1.0)
    with pytest.raises(ValueError):
        lpclass.HadamardProduct(roots=((0.0, 1),))
    with pytest.raises(ValueError):
        lpclass.HadamardProduct(roots=((1.0, 0),))
    with pytest.raises(ValueError):
        lpclass.HadamardProduct(k=-1)
