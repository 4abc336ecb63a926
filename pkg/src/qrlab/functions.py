"""Real-valued functions and subsets on a finite group, plus seeded sampling."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groups import FiniteGroup

DEFAULT_SEED = 20140101


def rng_for(descriptor: str, seed: int, trial: int, stream: str = "") -> np.random.Generator:
    """Counter-based generator keyed by (descriptor, seed, trial, stream).

    The same key always yields the same stream, independent of call order.
    """
    digest = hashlib.sha256(f"{descriptor}|{seed}|{trial}|{stream}".encode()).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class DensityFunction:
    group: FiniteGroup
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.group.order,):
            raise ValueError(
                f"function has {values.shape} values, group order is {self.group.order}")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, G: FiniteGroup, c: float) -> "DensityFunction":
        return cls(G, np.full(G.order, float(c)))

    @classmethod
    def indicator(cls, mask: "SubsetMask") -> "DensityFunction":
        return cls(mask.group, mask.bits.astype(float))

    @property
    def is_integral(self) -> bool:
        v = self.values
        return bool(np.all(v == np.round(v)) and np.all(np.abs(v) < 2**40))

    def int_values(self) -> np.ndarray:
        return np.round(self.values).astype(np.int64)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def mean(self) -> float:
        return math.fsum(self.values) / self.group.order

    def mean_exact(self) -> Fraction:
        if self.is_integral:
            return Fraction(int(self.int_values().sum()), self.group.order)
        return sum((Fraction(float(v)) for v in self.values), Fraction(0)) / self.group.order

    def l2_norm(self) -> float:
        return math.sqrt(math.fsum(self.values**2) / self.group.order)

    def l2_norm_sq_exact(self) -> Fraction:
        if self.is_integral:
            v = self.int_values()
            return Fraction(int((v * v).sum()), self.group.order)
        return sum((Fraction(float(v)) ** 2 for v in self.values), Fraction(0)) / self.group.order

    def __mul__(self, other: "DensityFunction") -> "DensityFunction":
        _same_group(self.group, other.group)
        return DensityFunction(self.group, self.values * other.values)

    def __add__(self, other) -> "DensityFunction":
        if isinstance(other, DensityFunction):
            _same_group(self.group, other.group)
            other = other.values
        return DensityFunction(self.group, self.values + other)

    def centered(self) -> "DensityFunction":
        return DensityFunction(self.group, self.values - self.mean())


@dataclass(frozen=True, eq=False)
class SubsetMask:
    """Membership mask of a subset of G."""

    group: FiniteGroup
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.group.order,):
            raise ValueError("mask length must equal the group order")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_elements(cls, G: FiniteGroup, elements) -> "SubsetMask":
        bits = np.zeros(G.order, dtype=bool)
        bits[np.asarray(list(elements), dtype=np.intp)] = True
        return cls(G, bits)

    @classmethod
    def full(cls, G: FiniteGroup) -> "SubsetMask":
        return cls(G, np.ones(G.order, dtype=bool))

    @classmethod
    def empty(cls, G: FiniteGroup) -> "SubsetMask":
        return cls(G, np.zeros(G.order, dtype=bool))

    @property
    def size(self) -> int:
        return int(self.bits.sum())

    @property
    def density(self) -> float:
        return self.size / self.group.order

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def conjugate(self, h: int) -> "SubsetMask":
        """The set h A h^-1."""
        G = self.group
        images = G.mul_many(G.mul_many(np.full(self.size, h), self.elements()),
                            np.full(self.size, G.inv(h)))
        return SubsetMask.from_elements(G, images)


def _same_group(a: FiniteGroup, b: FiniteGroup) -> None:
    if a is not b and (a.descriptor != b.descriptor or a.order != b.order):
        raise ValueError(f"functions live on different groups: {a.descriptor} vs {b.descriptor}")


def random_signs(G: FiniteGroup, rng: np.random.Generator) -> DensityFunction:
    return DensityFunction(G, rng.choice([-1.0, 1.0], size=G.order))


def random_mean_zero(G: FiniteGroup, rng: np.random.Generator) -> DensityFunction:
    v = rng.standard_normal(G.order)
    return DensityFunction(G, v - math.fsum(v) / G.order)


def random_subset(G: FiniteGroup, density: float, rng: np.random.Generator) -> SubsetMask:
    """Uniformly random subset of size round(density * |G|)."""
    size = int(round(density * G.order))
    return SubsetMask.from_elements(G, rng.choice(G.order, size=size, replace=False))


def load_subset(G: FiniteGroup, path) -> SubsetMask:
    """Read element indices, one per line; blank lines and '#' comments skipped."""
    idx = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                idx.append(int(line))
    if any(not 0 <= i < G.order for i in idx):
        raise ValueError(f"subset file {path} has indices outside [0, {G.order})")
    return SubsetMask.from_elements(G, idx)
