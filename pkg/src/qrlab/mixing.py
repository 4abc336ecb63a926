"""Mixing statistics on finite groups.

Every statistic is computed exactly: integer-valued inputs (signs, indicators)
go through int64 sums and ``Fraction`` averages, real inputs through
``math.fsum``. Both reductions are independent of evaluation order, so serial
and parallel runs agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import UNBOUNDED, character_degrees
from .conjugacy import ConjugacyTable, conjugacy_classes, invariant_correlation
from .functions import DensityFunction, SubsetMask, _same_group
from .groups import CapExceeded, FiniteGroup

BOUND_TOL = 1e-9
QUANTILE_LEVELS = (0.5, 0.9, 0.99, 1.0)
FOUR_FUNCTION_MAX_ORDER = 500
DIRECT_NORM_MAX_ORDER = 3000


class ConvergenceError(RuntimeError):
    pass


@dataclass
class MixingReport:
    statistic: str
    deviation_mean: float
    deviation_quantiles: dict[float, float]
    paper_bound: float | None
    bound_satisfied: bool | None
    exceptional_fraction: float | None = None
    exceptional_threshold: float | None = None
    markov_satisfied: bool | None = None
    D: int | None = None
    deviation_exact: Fraction | None = field(default=None, repr=False)


def _degree(G: FiniteGroup, D):
    if D is None:
        D = character_degrees(G).quasirandomness_degree
    return D


def _inv_sqrt(D) -> float:
    return 0.0 if D is UNBOUNDED else D ** -0.5


def _check_groups(G: FiniteGroup, *fs: DensityFunction) -> None:
    for f in fs:
        _same_group(G, f.group)


def _quantiles(pointwise: np.ndarray) -> dict[float, float]:
    return {q: float(np.quantile(pointwise, q)) for q in QUANTILE_LEVELS}


def _mean_abs_deviation(sums, target: Fraction, scale: int, exact: bool):
    """Mean over g of |sums[g] / scale - target| plus pointwise values."""
    if exact:
        p, q = target.numerator, target.denominator
        # |s/scale - p/q| = |s q - p scale| / (scale q)
        nums = [abs(int(s) * q - p * scale) for s in sums]
        denom = scale * q
        mean = Fraction(sum(nums), denom * len(nums))
        return mean, np.array([num / denom for num in nums])
    t = float(target)
    pointwise = np.abs(np.asarray(sums, dtype=float) / scale - t)
    return Fraction(math.fsum(pointwise) / len(pointwise)), pointwise


def _values(*fs: DensityFunction):
    exact = all(f.is_integral for f in fs)
    return exact, [f.int_values() if exact else f.values for f in fs]


def _dot(a, b) -> float | int:
    if a.dtype.kind == "i":
        return int(np.dot(a, b))
    return math.fsum(a * b)


# -- weak mixing ---------------------------------------------------------------

def correlation_sums(G: FiniteGroup, f1: DensityFunction, f2: DensityFunction):
    """sum_x f1(x) f2(xg) for every g."""
    exact, (v1, v2) = _values(f1, f2)
    return exact, [_dot(v1, v2[G.right(g)]) for g in range(G.order)]


def weak_mixing_deviation(G: FiniteGroup, f1: DensityFunction, f2: DensityFunction,
                          D=None) -> MixingReport:
    """E_g |E_x f1(x) f2(xg) - E f1 E f2| against D^{-1/2} ||f1|| ||f2||."""
    _check_groups(G, f1, f2)
    D = _degree(G, D)
    n = G.order
    exact, sums = correlation_sums(G, f1, f2)
    target = f1.mean_exact() * f2.mean_exact()
    mean, pointwise = _mean_abs_deviation(sums, target, n, exact)
    bound = _inv_sqrt(D) * f1.l2_norm() * f2.l2_norm()
    dev = float(mean)
    report = MixingReport("weak", dev, _quantiles(pointwise), bound,
                          dev <= bound + BOUND_TOL, D=None if D is UNBOUNDED else D,
                          deviation_exact=mean if exact else None)
    if D is not UNBOUNDED:
        thr = D ** -0.25
        frac = float(np.count_nonzero(pointwise > thr)) / n
        report.exceptional_threshold = thr
        report.exceptional_fraction = frac
        if max(f1.sup_norm, f2.sup_norm) <= 1:
            report.markov_satisfied = frac <= thr + BOUND_TOL
    return report


# -- operator norm -------------------------------------------------------------

@dataclass
class OperatorNormReport:
    operator_norm: float
    hilbert_schmidt_norm: float
    f2_norm: float
    paper_bound: float
    bound_satisfied: bool
    iterations: int


def convolution_matrix(G: FiniteGroup, f2: DensityFunction) -> np.ndarray:
    """K[g, x] = f2(xg) / |G|: the matrix of f1 -> E_x f1(x) f2(xg)."""
    n = G.order
    if G.table is not None:
        return f2.values[G.table.T] / n
    K = np.empty((n, n))
    for g in range(n):
        K[g] = f2.values[G.right(g)]
    return K / n


def convolution_operator_norm(G: FiniteGroup, f2: DensityFunction, D=None, seed: int = 0,
                              tol: float = 1e-10, max_iter: int = 10**4) -> OperatorNormReport:
    """Largest singular value of T f1(g) = E_x f1(x) f2(xg), together with the
    Hilbert-Schmidt norm of T.

    Up to DIRECT_NORM_MAX_ORDER the norm comes from a dense symmetric eigensolve
    of T^T T. The top singular values of T come in near-tied clusters on
    non-abelian groups, which makes plain power iteration crawl. Larger groups
    fall back to power iteration on T^T T.
    """
    _check_groups(G, f2)
    if abs(f2.mean()) > 1e-12:
        raise ValueError(f"f2 must have mean zero, got {f2.mean():.3e}")
    D = _degree(G, D)
    K = convolution_matrix(G, f2)
    hs = math.sqrt(math.fsum((K * K).ravel()))
    f2_norm = f2.l2_norm()
    bound = _inv_sqrt(D) * f2_norm
    if not np.any(f2.values):
        return OperatorNormReport(0.0, hs, f2_norm, bound, True, 0)
    if G.order <= DIRECT_NORM_MAX_ORDER:
        sigma = math.sqrt(max(float(np.linalg.eigvalsh(K.T @ K)[-1]), 0.0))
        return OperatorNormReport(sigma, hs, f2_norm, bound, sigma <= bound + BOUND_TOL, 0)
    v = np.random.default_rng(seed).standard_normal(G.order)
    v /= np.linalg.norm(v)
    est = 0.0
    for it in range(1, max_iter + 1):
        Kv = K @ v
        new = float(Kv @ Kv)
        w = K.T @ Kv
        norm_w = np.linalg.norm(w)
        if norm_w == 0:
            return OperatorNormReport(0.0, hs, f2_norm, bound, True, it)
        v = w / norm_w
        if abs(new - est) <= tol * new:
            sigma = math.sqrt(new)
            return OperatorNormReport(sigma, hs, f2_norm, bound, sigma <= bound + BOUND_TOL, it)
        est = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


# -- four functions ------------------------------------------------------------

def four_function_deviation(G: FiniteGroup, f1, f2, f3, f4, D=None,
                            check_bound: bool = True) -> MixingReport:
    """E_{g,h} |E_x f1(x) f2(xg) f3(xh) f4(xgh) - prod E f_i| against 3 D^{-1/2}."""
    fs = (f1, f2, f3, f4)
    _check_groups(G, *fs)
    n = G.order
    if n > FOUR_FUNCTION_MAX_ORDER:
        raise CapExceeded(f"four-function average needs |G| <= {FOUR_FUNCTION_MAX_ORDER}")
    if check_bound and max(f.sup_norm for f in fs) > 1:
        raise ValueError("four-function bound needs |f_i| <= 1")
    D = _degree(G, D)
    exact, (v1, v2, v3, v4) = _values(*fs)
    T = G.table.astype(np.intp)
    F3 = v3[T]                      # [x, h] -> f3(xh)
    F4 = v4[T]
    target = Fraction(1)
    for f in fs:
        target *= f.mean_exact()
    total = Fraction(0) if exact else []
    pointwise = np.empty(n * n)
    for g in range(n):
        xg = T[:, g]
        u = v1 * v2[xg]
        sums = u @ (F3 * F4[xg])    # F4[xg][x, h] = f4(xgh)
        mean_g, pw = _mean_abs_deviation(sums, target, n, exact)
        pointwise[g * n:(g + 1) * n] = pw
        if exact:
            total += mean_g
        else:
            total.append(math.fsum(pw))
    mean = total / n if exact else Fraction(math.fsum(total) / (n * n))
    bound = 3 * _inv_sqrt(D)
    dev = float(mean)
    return MixingReport("four", dev, _quantiles(pointwise), bound, dev <= bound + BOUND_TOL,
                        D=None if D is UNBOUNDED else D,
                        deviation_exact=mean if exact else None)


# -- relative mixing -----------------------------------------------------------

def twisted_sums(G: FiniteGroup, f1, f2, f3):
    """sum_x f1(x) f2(xg) f3(gx) for every g."""
    exact, (v1, v2, v3) = _values(f1, f2, f3)
    return exact, [_dot(v1, v2[G.right(g)] * v3[G.left(g)]) for g in range(G.order)]


def relative_mixing_deviation(G: FiniteGroup, f1, f2, f3,
                              classes: ConjugacyTable | None = None) -> MixingReport:
    """E_g |E_x f1(x) f2(xg) f3(gx) - E f1 * E[f2 P f3]|, where P averages over
    conjugacy classes.

    There is no closed-form bound for this statistic, only the qualitative
    fact that it shrinks as D grows, so the deviation is reported as measured.
    """
    _check_groups(G, f1, f2, f3)
    classes = classes or conjugacy_classes(G)
    exact, sums = twisted_sums(G, f1, f2, f3)
    target = f1.mean_exact() * invariant_correlation(classes, f2, f3)
    mean, pointwise = _mean_abs_deviation(sums, target, G.order, exact)
    return MixingReport("relative", float(mean), _quantiles(pointwise), None, None,
                        deviation_exact=mean if exact else None)


# -- consequences for sets and quadruples ----------------------------------------

@dataclass
class TripleProfile:
    densities: np.ndarray          # |A ∩ gB ∩ Bg| / |G| per g
    lower_bound: float
    upper_bound: float
    eps: float
    lower_violation_fraction: float
    upper_violation_fraction: float


def triple_intersection_profile(G: FiniteGroup, A: SubsetMask, B: SubsetMask,
                                eps: float) -> TripleProfile:
    """Exact |A ∩ gB ∩ Bg| / |G| for every g, with the fractions of g falling
    outside [dA dB^2 - eps, dA dB + eps]."""
    _same_group(G, A.group)
    _same_group(G, B.group)
    n = G.order
    a, b = A.bits, B.bits
    counts = np.empty(n, dtype=np.int64)
    inv = G.inverse
    for g in range(n):
        h = inv[g]
        # x in gB  <=>  g^-1 x in B;  x in Bg  <=>  x g^-1 in B
        counts[g] = np.count_nonzero(a & b[G.left(h)] & b[G.right(h)])
    dens = counts / n
    lo = A.density * B.density ** 2 - eps
    hi = A.density * B.density + eps
    return TripleProfile(dens, lo, hi, eps,
                         float(np.count_nonzero(dens < lo - 1e-12)) / n,
                         float(np.count_nonzero(dens > hi + 1e-12)) / n)


@dataclass
class QuadrupleGap:
    left: float
    right: float
    gap: float
    gap_exact: Fraction | None = field(default=None, repr=False)
    mc_estimate: float | None = None
    mc_stderr: float | None = None
    mc_samples: int = 0
    mc_agrees: bool | None = None


def quadruple_statistic_gap(G: FiniteGroup, f0, f1, f2, f3, sample_count: int = 0,
                            seed: int = 0, classes: ConjugacyTable | None = None,
                            sigmas: float = 4.0) -> QuadrupleGap:
    """|E f0(g) f1(x) f2(xg) f3(gx) - E f0(x0) f1(x1) f2(x2) f3(x3)| where x3 is a
    uniform conjugate of x2.

    The second expectation factorises as E f0 * E f1 * E[f2 P f3] (P: class average) and is
    evaluated in closed form; ``sample_count`` > 0 adds a Monte Carlo estimate
    of it as a cross-check.
    """
    _check_groups(G, f0, f1, f2, f3)
    classes = classes or conjugacy_classes(G)
    n = G.order
    exact, sums = twisted_sums(G, f1, f2, f3)
    exact = exact and f0.is_integral
    if exact:
        w0 = f0.int_values()
        left = Fraction(sum(int(w0[g]) * int(s) for g, s in enumerate(sums)), n * n)
    else:
        left = Fraction(math.fsum(f0.values[g] * s for g, s in enumerate(sums)) / (n * n))
    right = f0.mean_exact() * f1.mean_exact() * invariant_correlation(classes, f2, f3)
    gap = abs(left - right)
    out = QuadrupleGap(float(left), float(right), float(gap), gap if exact else None)
    if sample_count > 0:
        rng = np.random.default_rng(seed)
        x0, x1, x2, h = rng.integers(0, n, size=(4, sample_count))
        x3 = G.mul_many(G.mul_many(h, x2), G.inverse[h])
        vals = f0.values[x0] * f1.values[x1] * f2.values[x2] * f3.values[x3]
        est = math.fsum(vals) / sample_count
        stderr = float(np.std(vals, ddof=1) / math.sqrt(sample_count)) if sample_count > 1 else math.inf
        out.mc_estimate, out.mc_stderr, out.mc_samples = est, stderr, sample_count
        out.mc_agrees = abs(est - float(right)) <= sigmas * stderr + 1e-12
    return out
