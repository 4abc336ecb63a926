"""Conjugacy classes, class averages and commuting-pair accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .functions import DensityFunction, _same_group
from .groups import FiniteGroup


@dataclass(frozen=True, eq=False)
class ConjugacyTable:
    """Partition of G into conjugacy classes.

    Classes are numbered by their smallest element, so class 0 is {identity}.
    """

    group: FiniteGroup
    class_of: np.ndarray
    class_sizes: tuple[int, ...]
    representatives: tuple[int, ...]
    members: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def class_count(self) -> int:
        return len(self.class_sizes)

    @cached_property
    def inverse_class(self) -> np.ndarray:
        """inverse_class[k] = class of the inverses of class k."""
        inv = self.group.inverse
        return np.array([self.class_of[inv[r]] for r in self.representatives], dtype=np.intp)

    def class_sums(self, f: DensityFunction) -> np.ndarray:
        """Per-class sums of f (exact int64 for integral f)."""
        if f.is_integral:
            out = np.zeros(self.class_count, dtype=np.int64)
            np.add.at(out, self.class_of, f.int_values())
            return out
        return np.array([math.fsum(f.values[m]) for m in self.members])


def conjugacy_classes(G: FiniteGroup) -> ConjugacyTable:
    """Orbits of x -> h x h^-1, flooding each orbit with all h at once."""
    n = G.order
    class_of = np.full(n, -1, dtype=np.intp)
    sizes, reps, members = [], [], []
    for x in range(n):
        if class_of[x] >= 0:
            continue
        orbit = np.unique(G.conjugates(x))
        class_of[orbit] = len(sizes)
        sizes.append(len(orbit))
        reps.append(x)
        members.append(orbit)
    return ConjugacyTable(G, class_of, tuple(sizes), tuple(reps), tuple(members))


def project_invariant(classes: ConjugacyTable, f: DensityFunction) -> DensityFunction:
    """Class-average of f: the projection onto conjugation-invariant functions."""
    _same_group(classes.group, f.group)
    sizes = np.asarray(classes.class_sizes)
    averages = classes.class_sums(f) / sizes
    return DensityFunction(f.group, averages[classes.class_of])


def class_averages_exact(classes: ConjugacyTable, f: DensityFunction) -> list[Fraction]:
    if f.is_integral:
        sums = [int(s) for s in classes.class_sums(f)]
    else:
        sums = [sum((Fraction(float(v)) for v in f.values[m]), Fraction(0))
                for m in classes.members]
    return [Fraction(s, 1) / k for s, k in zip(sums, classes.class_sizes)]


def invariant_correlation(classes: ConjugacyTable, f: DensityFunction,
                          h: DensityFunction) -> Fraction:
    """E_G[f * P h], exactly, with P the average over each conjugacy class.

    Equal to sum over classes K of (sum_K f)(sum_K h) / (|K| |G|).
    """
    _same_group(f.group, h.group)
    if f.is_integral and h.is_integral:
        sf, sh = classes.class_sums(f), classes.class_sums(h)
        total = sum(Fraction(int(a) * int(b), k)
                    for a, b, k in zip(sf, sh, classes.class_sizes))
    else:
        avg = class_averages_exact(classes, h)
        sf = class_averages_exact(classes, f)
        total = sum(a * k * b for a, b, k in zip(sf, avg, classes.class_sizes))
    return total / classes.group.order


def commuting_pairs(G: FiniteGroup) -> int:
    """Number of (x, g) with xg = gx, counted directly."""
    total = 0
    for g in range(G.order):
        total += int(np.count_nonzero(G.left(g) == G.right(g)))
    return total


def noncommutativity_bound(G: FiniteGroup, D: int) -> Fraction:
    """|G| (1 + (|G| - 1) / D^2), an upper bound on commuting pairs for a
    D-quasirandom group."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    n = G.order
    return n * (1 + Fraction(n - 1, D * D))
