"""Norm of the Cayley averaging operator 1/4 (L_a + L_b + L_a^-1 + L_b^-1) on
mean-zero functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup

TOL = 1e-8
MAX_ITER = 10**5


@dataclass
class SpectralReport:
    operator_norm: float
    gap: float
    pair: tuple[int, int]
    iterations: int
    generated: bool
    converged: bool
    subgroup_order: int


def generated_subgroup(G: FiniteGroup, gens) -> np.ndarray:
    """Mask of the subgroup generated by ``gens`` (closure of the identity)."""
    seen = np.zeros(G.order, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.intp)
    steps = [G.right(s) for s in gens]     # x -> x s
    while len(frontier):
        nxt = np.unique(np.concatenate([row[frontier] for row in steps]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def averaging_operator(G: FiniteGroup, a: int, b: int):
    """Callable f -> S f with (S f)(x) = 1/4 sum_s f(s x), s in {a, b, a^-1, b^-1}."""
    rows = [G.left(s) for s in (a, b, G.inv(a), G.inv(b))]

    def apply(f: np.ndarray) -> np.ndarray:
        return (f[rows[0]] + f[rows[1]] + f[rows[2]] + f[rows[3]]) / 4

    return apply


def cayley_operator_norm(G: FiniteGroup, a: int, b: int, seed: int = 0,
                         tol: float = TOL, max_iter: int = MAX_ITER) -> SpectralReport:
    """Power iteration on S^2 with the constants projected out at every step.

    If a, b do not generate G, the indicator of the generated subgroup minus its
    mean is a fixed mean-zero vector, so the norm is exactly 1 and no iteration
    is run.
    """
    n = G.order
    sub = generated_subgroup(G, (a, b))
    h = int(sub.sum())
    if h < n:
        return SpectralReport(1.0, 0.0, (a, b), 0, False, True, h)
    if n == 1:
        return SpectralReport(0.0, 1.0, (a, b), 0, True, True, 1)
    S = averaging_operator(G, a, b)
    v = np.random.default_rng(seed).standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    mu = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = S(S(v))
        w -= w.mean()
        mu = float(v @ w)
        resid = np.linalg.norm(w - mu * v)
        norm_w = np.linalg.norm(w)
        if norm_w == 0:
            mu, converged = 0.0, True
            break
        if resid <= tol * max(abs(mu), 1e-300):
            converged = True
            break
        v = w / norm_w
    norm = math.sqrt(max(mu, 0.0))
    return SpectralReport(norm, 1.0 - norm, (a, b), it, True, converged, n)


def abelian_character_norm(n: int, a: int, b: int) -> float:
    """max over non-trivial characters of Z_n of |1/4 (chi(a) + chi(b) + conj)|."""
    best = 0.0
    for t in range(1, n):
        val = (math.cos(2 * math.pi * t * a / n) + math.cos(2 * math.pi * t * b / n)) / 2
        best = max(best, abs(val))
    return best
