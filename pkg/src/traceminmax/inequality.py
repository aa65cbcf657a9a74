"""Loewner-ordered quadruples and the inequality margins tested over campaigns.

A quadruple is (A, B, C, D) with A <= B <= C in the Loewner order, all
spectra confined to an open interval, and D = A + C - B constructed exactly.
Margins here are signed slacks: a nonnegative margin means the inequality
held on that trial.

Sampling is deterministic: a counter-based generator keyed by the master
seed and the trial index makes every trial reproducible bit for bit,
independent of how trials are distributed over workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .funcalc import ScalarFunction, apply, check_spectrum_in_domain, \
    divided_difference_matrix
from .linalg import HermitianMatrix, _wrap, eigvalsh_many, is_psd, loewner_leq

__all__ = [
    "DetMargin",
    "LamecorReport",
    "OrderedQuadruple",
    "PreconditionError",
    "det_isoperimetric_margin",
    "isoperimetric_check",
    "lamecor_suite",
    "loewner_matrix",
    "load_quadruple",
    "matrix_convex_margin",
    "matrix_monotone_margin",
    "quadruple_from_dict",
    "quadruple_to_dict",
    "sample_quadruple",
    "save_quadruple",
    "swap_inner_pair",
    "trace_minmax_margin",
    "trial_rng",
]

ORDER_TOL = 1e-12
# spectra are kept this fraction of the width away from interval endpoints
EDGE_FRACTION = 0.05


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class OrderedQuadruple:
    A: HermitianMatrix
    B: HermitianMatrix
    C: HermitianMatrix
    D: HermitianMatrix
    interval: tuple
    seed: Optional[int] = None
    counter: Optional[int] = None

    @property
    def n(self) -> int:
        return self.A.n


def trial_rng(seed: int, counter: int = 0) -> np.random.Generator:
    """Counter-split generator: disjoint streams for every (seed, counter)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=counter << 64))


def _complex_gaussian(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def _hermitize(m):
    return (m + m.conj().T) / 2.0


def _affine_params(interval, lo, hi):
    """Order-preserving map x -> s x + t placing [lo, hi] inside the interval."""
    a, b = interval
    spread = max(hi - lo, 0.0)
    if math.isinf(a) and math.isinf(b):
        return 1.0, 0.0
    if math.isinf(b):  # half line (a, oo): shift only
        return 1.0, (a + EDGE_FRACTION * max(1.0, spread)) - lo
    if math.isinf(a):  # half line (-oo, b): shift only
        return 1.0, (b - EDGE_FRACTION * max(1.0, spread)) - hi
    width = b - a
    ta = a + EDGE_FRACTION * width
    tb = b - EDGE_FRACTION * width
    if spread < 1e-12:
        return 1.0, 0.5 * (ta + tb) - lo
    s = (tb - ta) / spread
    return s, ta - s * lo


def sample_quadruple(n: int, interval, seed: int, counter: int = 0,
                     validate: bool = True) -> OrderedQuadruple:
    """Random ordered quadruple with spectra inside the interval.

    A is a scaled Gaussian Hermitian matrix, B and C add Gram-matrix
    increments, and the triple is mapped affinely so the spectra of A and C
    (which bound all four spectra) sit 5% of the width away from the
    endpoints.  Half-infinite intervals are shifted instead of scaled.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"empty interval ({a}, {b})")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = trial_rng(seed, counter)
    g0 = _complex_gaussian(rng, n)
    g1 = _complex_gaussian(rng, n)
    g2 = _complex_gaussian(rng, n)
    a0 = _hermitize(g0) / math.sqrt(n)
    b0 = _hermitize(a0 + (g1 @ g1.conj().T) / n)
    c0 = _hermitize(b0 + (g2 @ g2.conj().T) / n)
    lo = float(eigvalsh_many(a0)[0])
    hi = float(eigvalsh_many(c0)[-1])
    s, t = _affine_params((a, b), lo, hi)
    eye = np.eye(n)
    ma = s * a0 + t * eye
    mb = s * b0 + t * eye
    mc = s * c0 + t * eye
    md = ma + mc - mb
    q = OrderedQuadruple(_wrap(ma), _wrap(mb), _wrap(mc), _wrap(md),
                         interval=(a, b), seed=seed, counter=counter)
    if validate:
        validate_quadruple(q)
    return q


def validate_quadruple(q: OrderedQuadruple, tol: float = ORDER_TOL) -> None:
    if not loewner_leq(q.A, q.B, tol):
        raise PreconditionError("A <= B fails")
    if not loewner_leq(q.B, q.C, tol):
        raise PreconditionError("B <= C fails")
    recon = q.A.entries + q.C.entries - q.B.entries
    scale = max(1.0, float(np.max(np.abs(recon))))
    if float(np.max(np.abs(q.D.entries - recon))) > tol * scale:
        raise PreconditionError("D != A + C - B")
    a, b = q.interval
    la, lc = q.A.eigenvalues(), q.C.eigenvalues()
    if not (a < la[0] and lc[-1] < b):
        raise PreconditionError(
            f"spectra [{la[0]}, {lc[-1]}] escape the interval ({a}, {b})")


def swap_inner_pair(q: OrderedQuadruple) -> OrderedQuadruple:
    """The quadruple with B and D exchanged (valid since A <= D <= C)."""
    return OrderedQuadruple(q.A, q.D, q.C, q.B, q.interval, q.seed, q.counter)


# -- margins ------------------------------------------------------------------


def _quadruple_eigenvalues(q: OrderedQuadruple):
    return (q.A.eigenvalues(), q.B.eigenvalues(),
            q.C.eigenvalues(), q.D.eigenvalues())


def trace_minmax_margin(f: ScalarFunction, q: OrderedQuadruple) -> float:
    """tr f(A) + tr f(C) - tr f(B) - tr f(D); nonnegative iff the trial held."""
    la, lb, lc, ld = _quadruple_eigenvalues(q)
    for lam in (la, lb, lc, ld):
        check_spectrum_in_domain(f, lam)
    return float(f.eval(la).sum() + f.eval(lc).sum()
                 - f.eval(lb).sum() - f.eval(ld).sum())


class DetMargin(NamedTuple):
    margin: float
    vanished: bool


def det_isoperimetric_margin(g: ScalarFunction, q: OrderedQuadruple) -> DetMargin:
    """log det g(B) + log det g(D) - log det g(A) - log det g(C).

    Computed entirely in log-eigenvalue space; products of eigenvalues
    overflow even at n = 8 for exponential-type g.  If g vanishes (or goes
    negative) on any spectrum point the margin is -inf with ``vanished`` set.
    """
    la, lb, lc, ld = _quadruple_eigenvalues(q)
    sums = []
    for lam in (lb, ld, la, lc):
        check_spectrum_in_domain(g, lam)
        vals = g.eval(lam)
        if np.any(vals <= 0.0):
            return DetMargin(-math.inf, True)
        sums.append(float(np.sum(np.log(vals))))
    return DetMargin(sums[0] + sums[1] - sums[2] - sums[3], False)


@dataclass(frozen=True)
class LamecorReport:
    """Margins for the exponential, Frobenius and characteristic-polynomial
    determinant inequalities on one quadruple."""

    trace_residual: float      # tr A + tr C - tr B - tr D, must be ~0
    trace_scale: float
    sq_frobenius_margin: float  # |A|_F^2 + |C|_F^2 - |B|_F^2 - |D|_F^2 >= 0
    plain_frobenius_margin: float  # reported only, not asserted
    char_poly_margin: float    # log-det margin of 1 - t x
    t: float


def lamecor_suite(q: OrderedQuadruple, t: float) -> LamecorReport:
    la, lb, lc, ld = _quadruple_eigenvalues(q)
    norm_a = float(max(abs(la[0]), abs(la[-1])))
    norm_c = float(max(abs(lc[0]), abs(lc[-1])))
    t_lo = -1.0 / norm_a if norm_a > 0 else -math.inf
    t_hi = 1.0 / norm_c if norm_c > 0 else math.inf
    if not t_lo < t < t_hi:
        raise ValueError(f"t={t!r} outside ({t_lo!r}, {t_hi!r})")
    tr = [float(np.sum(lam)) for lam in (la, lb, lc, ld)]
    residual = tr[0] + tr[2] - tr[1] - tr[3]
    scale = max(1.0, sum(abs(v) for v in tr))
    sq = [float(np.sum(lam ** 2)) for lam in (la, lb, lc, ld)]
    sq_margin = sq[0] + sq[2] - sq[1] - sq[3]
    plain = (math.sqrt(sq[0]) + math.sqrt(sq[2])
             - math.sqrt(sq[1]) - math.sqrt(sq[3]))
    logs = [float(np.sum(np.log1p(-t * lam))) for lam in (la, lb, lc, ld)]
    char_margin = logs[1] + logs[3] - logs[0] - logs[2]
    return LamecorReport(residual, scale, sq_margin, plain, char_margin, t)


def isoperimetric_check(q: OrderedQuadruple) -> float:
    """log det B + log det D - log det A - log det C for 0 <= A <= B <= C."""
    if not is_psd(q.A, ORDER_TOL):
        raise PreconditionError("isoperimetric check requires 0 <= A")
    la, lb, lc, ld = _quadruple_eigenvalues(q)
    if la[0] <= 0.0 or lc[0] <= 0.0:
        return math.inf  # det A det C = 0: the inequality holds trivially
    if lb[0] <= 0.0 or ld[0] <= 0.0:
        return -math.inf
    logs = [float(np.sum(np.log(lam))) for lam in (la, lb, lc, ld)]
    return logs[1] + logs[3] - logs[0] - logs[2]


# -- monotonicity and convexity ------------------------------------------------


def loewner_matrix(g: ScalarFunction, points) -> HermitianMatrix:
    """Divided-difference matrix [g[x_i, x_j]] with g'(x_i) on the diagonal.

    Positive semidefiniteness over all point choices characterizes matrix
    monotonicity of g.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 1:
        raise ValueError("points must be a nonempty 1-d sequence")
    check_spectrum_in_domain(g, pts)
    return _wrap(divided_difference_matrix(g, pts).astype(np.complex128))


def matrix_monotone_margin(g: ScalarFunction, interval, n: int, seed: int,
                           counter: int = 0, n_points: int = 4) -> float:
    """min of lambda_min(g(B) - g(A)) over a sampled pair A <= B and the
    minimum eigenvalue of a Loewner matrix at random points.

    Both pieces must be nonnegative (within tolerance) for matrix
    monotonicity of g to survive the finite test.
    """
    a, b = float(interval[0]), float(interval[1])
    rng = trial_rng(seed, counter)
    g0 = _complex_gaussian(rng, n)
    g1 = _complex_gaussian(rng, n)
    a0 = _hermitize(g0) / math.sqrt(n)
    b0 = _hermitize(a0 + (g1 @ g1.conj().T) / n)
    lo = float(eigvalsh_many(a0)[0])
    hi = float(eigvalsh_many(b0)[-1])
    s, t = _affine_params((a, b), lo, hi)
    eye = np.eye(n)
    ma = _wrap(s * a0 + t * eye)
    mb = _wrap(s * b0 + t * eye)
    direct = float((apply(g, mb) - apply(g, ma)).eigenvalues()[0])

    pa, pb = _sample_bounds((a, b))
    pts = np.sort(rng.uniform(pa, pb, size=n_points))
    lm = float(loewner_matrix(g, pts).eigenvalues()[0])
    return min(direct, lm)


def matrix_convex_margin(f: ScalarFunction, interval, n: int, seed: int,
                         counter: int = 0) -> float:
    """lambda_min((f(A) + f(B))/2 - f((A+B)/2)) for random A, B in the interval."""
    a, b = float(interval[0]), float(interval[1])
    rng = trial_rng(seed, counter)
    mats = []
    for _ in range(2):
        g = _complex_gaussian(rng, n)
        m0 = _hermitize(g) / math.sqrt(n)
        w = eigvalsh_many(m0)
        s, t = _affine_params((a, b), float(w[0]), float(w[-1]))
        mats.append(_wrap(s * m0 + t * np.eye(n)))
    ma, mb = mats
    mid = _wrap((ma.entries + mb.entries) / 2.0)
    lhs = _wrap((apply(f, ma).entries + apply(f, mb).entries) / 2.0)
    gap = lhs - apply(f, mid)
    return float(gap.eigenvalues()[0])


def _sample_bounds(interval):
    # finite box for sampling scalar points on possibly infinite intervals
    a, b = interval
    if math.isinf(a) and math.isinf(b):
        return -1.0, 1.0
    if math.isinf(b):
        return a + EDGE_FRACTION, a + 1.0 + EDGE_FRACTION
    if math.isinf(a):
        return b - 1.0 - EDGE_FRACTION, b - EDGE_FRACTION
    width = b - a
    return a + EDGE_FRACTION * width, b - EDGE_FRACTION * width


# -- serialization --------------------------------------------------------------


def _matrix_to_dict(m: HermitianMatrix) -> dict:
    return {"re": m.entries.real.tolist(), "im": m.entries.imag.tolist()}


def _matrix_from_dict(d: dict) -> HermitianMatrix:
    arr = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
    return HermitianMatrix(arr)


def quadruple_to_dict(q: OrderedQuadruple) -> dict:
    return {
        "dimension": q.n,
        "interval": [q.interval[0], q.interval[1]],
        "seed": q.seed,
        "counter": q.counter,
        "A": _matrix_to_dict(q.A),
        "B": _matrix_to_dict(q.B),
        "C": _matrix_to_dict(q.C),
        "D": _matrix_to_dict(q.D),
    }


def quadruple_from_dict(data: dict, validate: bool = True) -> OrderedQuadruple:
    q = OrderedQuadruple(
        A=_matrix_from_dict(data["A"]),
        B=_matrix_from_dict(data["B"]),
        C=_matrix_from_dict(data["C"]),
        D=_matrix_from_dict(data["D"]),
        interval=(float(data["interval"][0]), float(data["interval"][1])),
        seed=data.get("seed"),
        counter=data.get("counter"),
    )
    if validate:
        validate_quadruple(q)
    return q


def save_quadruple(q: OrderedQuadruple, path) -> None:
    with open(path, "w") as fh:
        json.dump(quadruple_to_dict(q), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_quadruple(path, validate: bool = True) -> OrderedQuadruple:
    with open(path) as fh:
        return quadruple_from_dict(json.load(fh), validate=validate)
