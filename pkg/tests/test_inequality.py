import json
import math

import numpy as np
import pytest

from traceminmax import funcalc, inequality, linalg


def test_scalar_quadruple_is_ordered():
    q = inequality.sample_quadruple(1, (-1.0, 1.0), seed=5)
    a, b, c, d = (m.entries[0, 0].real for m in (q.A, q.B, q.C, q.D))
    assert a <= b <= c
    assert d == pytest.approx(a + c - b, abs=0)


def test_sampling_is_deterministic():
    q1 = inequality.sample_quadruple(4, (-1.0, 1.0), seed=9, counter=3)
    q2 = inequality.sample_quadruple(4, (-1.0, 1.0), seed=9, counter=3)
    assert np.array_equal(q1.A.entries, q2.A.entries)
    assert np.array_equal(q1.D.entries, q2.D.entries)
    q3 = inequality.sample_quadruple(4, (-1.0, 1.0), seed=9, counter=4)
    assert not np.array_equal(q1.A.entries, q3.A.entries)


def test_spectra_confined(rng):
    for interval in [(-1.0, 1.0), (0.0, math.inf), (-math.inf, 1.0), (2.0, 5.0)]:
        for i in range(20):
            n = int(rng.integers(1, 9))
            q = inequality.sample_quadruple(n, interval, seed=1, counter=i)
            lo, hi = interval
            for m in (q.A, q.B, q.C, q.D):
                w = m.eigenvalues()
                assert lo < w[0] and w[-1] < hi


def test_quadruple_order_invariants(rng):
    for i in range(20):
        q = inequality.sample_quadruple(5, (-2.0, 2.0), seed=2, counter=i)
        inequality.validate_quadruple(q)  # raises on failure


def test_trace_margin_linear_function_is_zero(rng):
    f = funcalc.resolve_function("x")
    for i in range(10):
        q = inequality.sample_quadruple(4, (-1.0, 1.0), seed=3, counter=i)
        assert abs(inequality.trace_minmax_margin(f, q)) <= 1e-13


def test_trace_margin_scalar_example():
    # scalars (0, 1, 2) with d = 1: x^2 margin = 0 + 4 - 1 - 1 = 2
    q = inequality.OrderedQuadruple(
        linalg.diag([0.0]), linalg.diag([1.0]), linalg.diag([2.0]),
        linalg.diag([1.0]), interval=(-3.0, 3.0))
    f = funcalc.resolve_function("x2")
    assert inequality.trace_minmax_margin(f, q) == pytest.approx(2.0, abs=0)


def test_x3_counterexample_found():
    f = funcalc.resolve_function("x3")
    worst = 0.0
    for i in range(2000):
        q = inequality.sample_quadruple(1 + (i % 4), (-1.0, 1.0),
                                        seed=0, counter=i, validate=False)
        worst = min(worst, inequality.trace_minmax_margin(f, q))
    assert worst < -1e-6


def test_margin_invariant_under_inner_swap(rng):
    f = funcalc.resolve_function("exp")
    for i in range(10):
        q = inequality.sample_quadruple(4, (-1.0, 1.0), seed=7, counter=i)
        swapped = inequality.swap_inner_pair(q)
        inequality.validate_quadruple(swapped)
        m1 = inequality.trace_minmax_margin(f, q)
        m2 = inequality.trace_minmax_margin(f, swapped)
        assert abs(m1 - m2) <= 1e-12 * max(1.0, abs(m1))


def test_det_margin_scalar_example():
    # scalars (1, 2, 4), d = 3, g = x: log 6 - log 4 > 0
    q = inequality.OrderedQuadruple(
        linalg.diag([1.0]), linalg.diag([2.0]), linalg.diag([4.0]),
        linalg.diag([3.0]), interval=(0.5, 5.0))
    g = funcalc.resolve_function("x")
    res = inequality.det_isoperimetric_margin(g, q)
    assert res.margin == pytest.approx(math.log(6.0) - math.log(4.0))
    assert not res.vanished


def test_det_margin_exp_duality(rng):
    f = funcalc.resolve_function("exp")
    g = funcalc.neg_exp_of(f)
    for i in range(20):
        q = inequality.sample_quadruple(5, (-1.5, 1.5), seed=11, counter=i)
        tm = inequality.trace_minmax_margin(f, q)
        dm = inequality.det_isoperimetric_margin(g, q).margin
        assert abs(tm - dm) <= 1e-10 * max(1.0, abs(tm))


def test_det_margin_negative_exponential_is_identity(rng):
    # det e^{-A} det e^{-C} = det e^{-B} det e^{-D} exactly (trace additivity)
    g = funcalc.resolve_function("expneg")
    for i in range(50):
        q = inequality.sample_quadruple(1 + (i % 6), (-2.0, 2.0), seed=99,
                                        counter=i, validate=False)
        assert abs(inequality.det_isoperimetric_margin(g, q).margin) <= 1e-12


def test_det_margin_vanishing_flag():
    q = inequality.OrderedQuadruple(
        linalg.diag([1.0]), linalg.diag([2.0]), linalg.diag([4.0]),
        linalg.diag([3.0]), interval=(0.5, 5.0))
    g = funcalc.poly_function([-2.0, 1.0], name="x-2")  # vanishes at 2
    res = inequality.det_isoperimetric_margin(g, q)
    assert res.vanished and res.margin == -math.inf


def test_lamecor_scalar_identity():
    q = inequality.OrderedQuadruple(
        linalg.diag([0.0]), linalg.diag([1.0]), linalg.diag([2.0]),
        linalg.diag([1.0]), interval=(-3.0, 3.0))
    rep = inequality.lamecor_suite(q, 0.0)
    assert rep.trace_residual == 0.0
    assert rep.char_poly_margin == 0.0  # t = 0: constant function


def test_lamecor_random_quadruples(rng):
    for i in range(200):
        n = 1 + (i % 8)
        q = inequality.sample_quadruple(n, (-2.0, 2.0), seed=13, counter=i,
                                        validate=False)
        la, lc = q.A.eigenvalues(), q.C.eigenvalues()
        hi = 1.0 / max(abs(lc[0]), abs(lc[-1]))
        lo = -1.0 / max(abs(la[0]), abs(la[-1]))
        t = 0.5 * (hi + lo) + 0.4 * (hi - lo) * np.sin(i)
        rep = inequality.lamecor_suite(q, t)
        assert abs(rep.trace_residual) <= 1e-12 * rep.trace_scale
        assert rep.sq_frobenius_margin >= -1e-10
        assert rep.char_poly_margin >= -1e-10


def test_lamecor_t_out_of_range():
    q = inequality.sample_quadruple(3, (0.5, 2.0), seed=1)
    with pytest.raises(ValueError):
        inequality.lamecor_suite(q, 100.0)


def test_isoperimetric_scalar_example():
    q = inequality.OrderedQuadruple(
        linalg.diag([1.0]), linalg.diag([2.0]), linalg.diag([4.0]),
        linalg.diag([3.0]), interval=(0.5, 5.0))
    assert inequality.isoperimetric_check(q) == pytest.approx(math.log(1.5))


def test_isoperimetric_degenerate_equal_matrices():
    m = linalg.diag([1.0, 2.0])
    q = inequality.OrderedQuadruple(m, m, m, m, interval=(0.5, 3.0))
    assert inequality.isoperimetric_check(q) == pytest.approx(0.0, abs=1e-14)


def test_isoperimetric_requires_psd():
    q = inequality.OrderedQuadruple(
        linalg.diag([-1.0]), linalg.diag([0.0]), linalg.diag([1.0]),
        linalg.diag([0.0]), interval=(-2.0, 2.0))
    with pytest.raises(inequality.PreconditionError):
        inequality.isoperimetric_check(q)


def test_isoperimetric_random_campaign(rng):
    worst = math.inf
    for i in range(300):
        n = 1 + (i % 8)
        q = inequality.sample_quadruple(n, (0.0, 4.0), seed=17, counter=i,
                                        validate=False)
        worst = min(worst, inequality.isoperimetric_check(q))
    assert worst >= -1e-10


def test_loewner_matrix_quadratic_example():
    f = funcalc.resolve_function("x2")
    lm = inequality.loewner_matrix(f, [-0.5, 0.5])
    assert np.allclose(lm.entries.real, [[-1.0, 0.0], [0.0, 1.0]], atol=1e-15)
    assert lm.eigenvalues()[0] == pytest.approx(-1.0)


def test_loewner_matrix_linear_all_ones():
    f = funcalc.resolve_function("x")
    lm = inequality.loewner_matrix(f, [-0.3, 0.1, 0.7])
    assert np.abs(lm.entries.real - 1.0).max() <= 1e-15


def test_monotone_margin_power_functions(rng):
    # x^t with t in [1, 2] has a matrix monotone derivative t x^(t-1)
    g = funcalc.resolve_function("pow:t=1.5").derivative()
    worst = math.inf
    for i in range(100):
        worst = min(worst, inequality.matrix_monotone_margin(
            g, (0.05, 10.0), 1 + (i % 5), seed=23, counter=i))
    assert worst >= -1e-9
    # but x^2 (derivative of x^3/3) is not matrix monotone on (-1, 1)
    f2 = funcalc.resolve_function("x2")
    worst2 = min(inequality.matrix_monotone_margin(f2, (-1.0, 1.0), 3,
                                                   seed=29, counter=i)
                 for i in range(50))
    assert worst2 < -1e-3


def test_convex_margins(rng):
    f1 = funcalc.resolve_function("x")
    assert abs(inequality.matrix_convex_margin(f1, (-1, 1), 4, seed=31)) <= 1e-12
    f2 = funcalc.resolve_function("x2")
    for i in range(20):
        assert inequality.matrix_convex_margin(f2, (-1, 1), 4, seed=31,
                                               counter=i) >= -1e-12
    f3 = funcalc.neglog1m_function(0.5)
    worst = min(inequality.matrix_convex_margin(f3, (-1, 1), 1 + (i % 6),
                                                seed=37, counter=i)
                for i in range(200))
    assert worst >= -1e-9


def test_witness_serialization_roundtrip(tmp_path):
    q = inequality.sample_quadruple(3, (-1.0, 1.0), seed=41, counter=5)
    f = funcalc.resolve_function("x3")
    margin = inequality.trace_minmax_margin(f, q)
    path = tmp_path / "witness.json"
    inequality.save_quadruple(q, path)
    back = inequality.load_quadruple(path)
    assert np.array_equal(back.A.entries, q.A.entries)
    replayed = inequality.trace_minmax_margin(f, back)
    assert abs(replayed - margin) <= 1e-12
    # replay from the recorded seed reproduces the margin bit for bit
    regen = inequality.sample_quadruple(back.n, back.interval, back.seed,
                                        counter=back.counter)
    assert inequality.trace_minmax_margin(f, regen) == margin
    data = json.loads(path.read_text())
    assert set(data) >= {"dimension", "interval", "seed", "A", "B", "C", "D"}


def test_sample_rejects_bad_arguments():
    with pytest.raises(ValueError):
        inequality.sample_quadruple(0, (-1, 1), seed=0)
    with pytest.raises(ValueError):
        inequality.sample_quadruple(2, (1, -1), seed=0)
