import math

import numpy as np
import pytest
import scipy.linalg

from traceminmax import funcalc, linalg

from conftest import random_hermitian, random_psd

# registry instances used in the randomized sweeps, with an interval on which
# each is safely defined
SWEEP = [
    ("x", (-2.0, 2.0)),
    ("x2", (-2.0, 2.0)),
    ("x3", (-2.0, 2.0)),
    ("exp", (-2.0, 2.0)),
    ("expneg", (-2.0, 2.0)),
    ("neglog", (0.2, 3.0)),
    ("neglog1mx", (-1.0, 0.8)),
    ("neglog1m:t=0.5,c=0", (-1.0, 1.0)),
    ("pow:t=1.5", (0.2, 3.0)),
]


def _confined(rng, n, interval):
    lo, hi = interval
    m = random_hermitian(rng, n)
    w = np.linalg.eigvalsh(m)
    s = (hi - lo) * 0.9 / max(w[-1] - w[0], 1e-9)
    t = lo + 0.05 * (hi - lo) - s * w[0]
    return linalg.HermitianMatrix(s * m + t * np.eye(n))


def test_apply_monomial_diagonal():
    f = funcalc.resolve_function("x2")
    out = funcalc.apply(f, linalg.diag([1.0, 2.0]))
    assert np.allclose(out.entries, np.diag([1.0, 4.0]), atol=1e-15)


def test_apply_exp_of_zero():
    f = funcalc.resolve_function("exp")
    out = funcalc.apply(f, linalg.diag([0.0] * 4))
    assert np.abs(out.entries - np.eye(4)).max() < 1e-15


def test_apply_exp_matches_pade_squaring(rng):
    f = funcalc.resolve_function("exp")
    for _ in range(20):
        x = linalg.HermitianMatrix(random_hermitian(rng, 5))
        want = scipy.linalg.expm(x.entries)
        got = funcalc.apply(f, x).entries
        assert np.abs(got - want).max() <= 1e-10 * np.abs(want).max()


def test_apply_domain_error_names_eigenvalue():
    f = funcalc.resolve_function("neglog")
    with pytest.raises(funcalc.DomainError) as err:
        funcalc.apply(f, linalg.diag([1.0, -2.0]))
    assert "-2" in str(err.value)


def test_frechet_quadratic_is_anticommutator(rng):
    f = funcalc.resolve_function("x2")
    x = linalg.HermitianMatrix(random_hermitian(rng, 5))
    h = linalg.HermitianMatrix(random_hermitian(rng, 5))
    want = x.entries @ h.entries + h.entries @ x.entries
    got = funcalc.frechet(f, x, h).entries
    assert np.abs(got - want).max() < 1e-12


def test_frechet_cubic_expansion(rng):
    f = funcalc.resolve_function("x3")
    x = linalg.HermitianMatrix(random_hermitian(rng, 4))
    h = linalg.HermitianMatrix(random_hermitian(rng, 4))
    xe, he = x.entries, h.entries
    want = he @ xe @ xe + xe @ he @ xe + xe @ xe @ he
    got = funcalc.frechet(f, x, h).entries
    assert np.abs(got - want).max() < 1e-12


def test_frechet_matches_central_difference(rng):
    f = funcalc.resolve_function("exp")
    for _ in range(10):
        x = linalg.HermitianMatrix(random_hermitian(rng, 4))
        h = linalg.HermitianMatrix(random_hermitian(rng, 4))
        step = 1e-5
        fd = (scipy.linalg.expm(x.entries + step * h.entries)
              - scipy.linalg.expm(x.entries - step * h.entries)) / (2 * step)
        got = funcalc.frechet(f, x, h).entries
        assert np.abs(got - fd).max() < 1e-6


def test_frechet_linear_in_h(rng):
    f = funcalc.resolve_function("exp")
    x = linalg.HermitianMatrix(random_hermitian(rng, 5))
    h1 = linalg.HermitianMatrix(random_hermitian(rng, 5))
    h2 = linalg.HermitianMatrix(random_hermitian(rng, 5))
    combo = linalg.HermitianMatrix(2.0 * h1.entries - 0.5 * h2.entries)
    lhs = funcalc.frechet(f, x, combo).entries
    rhs = 2.0 * funcalc.frechet(f, x, h1).entries \
        - 0.5 * funcalc.frechet(f, x, h2).entries
    assert np.abs(lhs - rhs).max() < 1e-10


def test_frechet_unitary_equivariance(rng):
    f = funcalc.resolve_function("exp")
    x = linalg.HermitianMatrix(random_hermitian(rng, 4))
    h = linalg.HermitianMatrix(random_hermitian(rng, 4))
    u = linalg.random_unitary(4, rng)
    left = funcalc.frechet(f,
                           linalg.HermitianMatrix(u.conj().T @ x.entries @ u, atol=1e-10),
                           linalg.HermitianMatrix(u.conj().T @ h.entries @ u, atol=1e-10))
    right = u.conj().T @ funcalc.frechet(f, x, h).entries @ u
    assert np.abs(left.entries - right).max() < 1e-10


def test_frechet_degenerate_spectrum(rng):
    # repeated eigenvalues exercise the midpoint-derivative branch
    f = funcalc.resolve_function("exp")
    x = linalg.diag([1.0, 1.0, 2.0])
    h = linalg.HermitianMatrix(random_hermitian(rng, 3))
    step = 1e-5
    fd = (scipy.linalg.expm(x.entries + step * h.entries)
          - scipy.linalg.expm(x.entries - step * h.entries)) / (2 * step)
    assert np.abs(funcalc.frechet(f, x, h).entries - fd).max() < 1e-6


def test_trace_duality_cubic_exact(rng):
    f = funcalc.resolve_function("x3")
    x = linalg.HermitianMatrix(random_hermitian(rng, 5))
    h = linalg.HermitianMatrix(random_hermitian(rng, 5))
    assert funcalc.trace_duality_residual(f, x, h) <= 1e-12


def test_trace_duality_scalar_case(rng):
    f = funcalc.resolve_function("exp")
    x = linalg.diag([0.3])
    h = linalg.diag([1.7])
    assert funcalc.trace_duality_residual(f, x, h) < 1e-14


def test_trace_duality_sweep(rng):
    worst = 0.0
    for spec, interval in SWEEP:
        f = funcalc.resolve_function(spec)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            x = _confined(rng, n, interval)
            h = linalg.HermitianMatrix(random_hermitian(rng, n))
            worst = max(worst, funcalc.trace_duality_residual(f, x, h))
    assert worst <= 1e-8


def test_second_derivative_quadratic(rng):
    f = funcalc.resolve_function("x2")
    x = linalg.HermitianMatrix(random_hermitian(rng, 4))
    h = linalg.HermitianMatrix(random_hermitian(rng, 4))
    k = linalg.HermitianMatrix(random_hermitian(rng, 4))
    got = funcalc.second_derivative_trace(f, x, h, k)
    want = 2.0 * np.trace(h.entries @ k.entries).real
    assert abs(got - want) < 1e-10

    eye2 = linalg.identity(2)
    assert funcalc.second_derivative_trace(f, linalg.diag([0.3, -0.4]),
                                           eye2, eye2) == pytest.approx(4.0)


def test_second_derivative_exp_nonnegative_on_psd(rng):
    f = funcalc.resolve_function("exp")
    for _ in range(40):
        n = int(rng.integers(2, 6))
        x = linalg.HermitianMatrix(random_hermitian(rng, n))
        h = linalg.HermitianMatrix(random_psd(rng, n))
        k = linalg.HermitianMatrix(random_psd(rng, n))
        assert funcalc.second_derivative_trace(f, x, h, k) >= -1e-9


def test_second_derivative_matches_mixed_difference(rng):
    f = funcalc.resolve_function("exp")
    x = linalg.HermitianMatrix(random_hermitian(rng, 4) * 0.5)
    h = linalg.HermitianMatrix(random_hermitian(rng, 4))
    k = linalg.HermitianMatrix(random_hermitian(rng, 4))
    got = funcalc.second_derivative_trace(f, x, h, k)
    step = 1e-4

    def g(s, t):
        m = x.entries + t * h.entries + s * k.entries
        return np.trace(scipy.linalg.expm((m + m.conj().T) / 2)).real

    fd = (g(step, step) - g(step, -step) - g(-step, step) + g(-step, -step)) \
        / (4 * step * step)
    assert abs(got - fd) <= 1e-5 * max(1.0, abs(got))


def test_unitary_equivariance_residuals(rng):
    f = funcalc.resolve_function("exp")
    x = linalg.HermitianMatrix(random_hermitian(rng, 2))
    assert funcalc.unitary_equivariance_residual(f, x, np.eye(2)) < 1e-15
    sig = np.diag([1.0, -1.0]).astype(complex)
    assert funcalc.unitary_equivariance_residual(f, x, sig) <= 1e-12
    # random Householder reflector at n = 6
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    v /= np.linalg.norm(v)
    house = np.eye(6) - 2.0 * np.outer(v, v.conj())
    x6 = linalg.HermitianMatrix(random_hermitian(rng, 6))
    assert funcalc.unitary_equivariance_residual(f, x6, house) <= 1e-10


def test_unitary_equivariance_rejects_nonunitary(rng):
    f = funcalc.resolve_function("exp")
    x = linalg.HermitianMatrix(random_hermitian(rng, 3))
    with pytest.raises(ValueError):
        funcalc.unitary_equivariance_residual(f, x, np.eye(3) * 1.5)


def test_apply_respects_block_structure(rng):
    f = funcalc.resolve_function("exp")
    x1 = random_hermitian(rng, 3)
    x2 = random_hermitian(rng, 2)
    block = np.zeros((5, 5), dtype=complex)
    block[:3, :3] = x1
    block[3:, 3:] = x2
    got = funcalc.apply(f, linalg.HermitianMatrix(block)).entries
    want = np.zeros_like(block)
    want[:3, :3] = funcalc.apply(f, linalg.HermitianMatrix(x1)).entries
    want[3:, 3:] = funcalc.apply(f, linalg.HermitianMatrix(x2)).entries
    assert np.abs(got - want).max() <= 1e-12


# -- scalar function registry ---------------------------------------------------


def test_registry_derivatives_match_finite_differences(rng):
    for spec, interval in SWEEP:
        f = funcalc.resolve_function(spec)
        lo, hi = interval
        xs = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), size=100)
        step = 1e-6 * max(1.0, np.abs(xs).max())
        fd = (f.eval(xs + step) - f.eval(xs - step)) / (2 * step)
        got = f.deriv(xs)
        assert np.abs(got - fd).max() <= 1e-6 * max(1.0, np.abs(got).max()), spec


def test_registry_taylor_reproduces_function():
    cases = [("exp", 0.5), ("neglog", 1.3), ("neglog1mx", -0.2),
             ("pow:t=1.5", 1.1), ("x3", 0.7), ("gauss", 0.4)]
    for spec, center in cases:
        f = funcalc.resolve_function(spec)
        p = f.taylor(center, 25)
        a, b = f.domain
        dist = min(center - a if math.isfinite(a) else math.inf,
                   b - center if math.isfinite(b) else math.inf)
        r = 0.1 * min(dist, 10.0)
        zs = np.linspace(center - r, center + r, 21)
        assert np.abs(p(zs) - f.eval(zs)).max() <= 1e-8, spec


def test_resolve_function_errors():
    with pytest.raises(ValueError):
        funcalc.resolve_function("nope")
    with pytest.raises(ValueError):
        funcalc.resolve_function("pow:q=2")
    with pytest.raises(ValueError):
        funcalc.neglog1m_function(0.0)


def test_neg_exp_combinator(rng):
    f = funcalc.resolve_function("x2")
    g = funcalc.neg_exp_of(f)
    xs = rng.uniform(-1, 1, 50)
    assert np.allclose(g.eval(xs), np.exp(-xs ** 2), atol=1e-14)
    p = g.taylor(0.0, 8)
    assert np.allclose(p.coeffs[:3], [1.0, 0.0, -1.0], atol=1e-14)


def test_derivative_view():
    f = funcalc.resolve_function("pow:t=1.5")
    fp = f.derivative()
    xs = np.linspace(0.5, 2.0, 11)
    assert np.allclose(fp.eval(xs), 1.5 * xs ** 0.5, atol=1e-13)
    assert np.allclose(fp.deriv(xs), 0.75 * xs ** -0.5, atol=1e-13)
    p = fp.taylor(1.0, 6)
    q = f.taylor(1.0, 7)
    assert np.allclose(p.coeffs, q.coeffs[1:] * np.arange(1, 7), atol=1e-14)
