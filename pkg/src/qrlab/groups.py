"""Explicit finite groups with elements indexed 0..|G|-1.

Every group exposes a vectorised elementwise product ``mul_many`` over index
arrays; everything else (translations, inverses, the Cayley table) is built on
top of it. Index 0 is always the identity.
"""

from __future__ import annotations

import itertools
import math
import re
from functools import cached_property

import numpy as np

DEFAULT_MAX_ORDER = 362880
SL2_MAX_ORDER = 10**5
TABLE_THRESHOLD = 8192


class GroupSpecError(ValueError):
    """Bad group parameters or an unparseable descriptor."""


class CapExceeded(RuntimeError):
    """A configured size or iteration budget would be exceeded."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


class FiniteGroup:
    """Base class: subclasses set ``order``, ``descriptor`` and implement
    ``mul_many`` and ``element``."""

    order: int
    descriptor: str
    table_threshold: int = TABLE_THRESHOLD

    def mul_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def element(self, i: int):
        """Concrete element behind index ``i``."""
        raise NotImplementedError

    # -- scalar interface ---------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        if self.table is not None:
            return int(self.table[a, b])
        return int(self.mul_many(np.array([a]), np.array([b]))[0])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def elements(self) -> range:
        return range(self.order)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor} order={self.order}>"

    # -- vectorised helpers -------------------------------------------------

    @cached_property
    def _all(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.intp)

    def left(self, g: int) -> np.ndarray:
        """Row of products g*x for every x."""
        if self.table is not None:
            return self.table[g].astype(np.intp)
        return self.mul_many(np.full(self.order, g, dtype=np.intp), self._all)

    def right(self, g: int) -> np.ndarray:
        """Row of products x*g for every x."""
        if self.table is not None:
            return self.table[:, g].astype(np.intp)
        return self.mul_many(self._all, np.full(self.order, g, dtype=np.intp))

    def conjugates(self, x: int) -> np.ndarray:
        """h x h^-1 for every h."""
        if self.table is not None:
            return self.table[self.table[:, x], self.inverse].astype(np.intp)
        hx =self.mul_many(self._all, np.full(self.order, x, dtype=np.intp))
        return self.mul_many(hx, self.inverse)

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.intp)
        for g in range(self.order):
            row = self.left(g)
            inv[g] = int(np.flatnonzero(row == 0)[0])
        return inv

    @cached_property
    def table(self) -> np.ndarray | None:
        """Dense Cayley table ``table[a, b] = a*b``, or None above the threshold."""
        n = self.order
        if n > self.table_threshold:
            return None
        dtype = np.uint16 if n <= 1 << 16 else np.int32
        out = np.empty((n, n), dtype=dtype)
        cols = self._all
        # chunked rows keep the temporary index arrays small
        step = max(1, (1 << 20) // n)
        for start in range(0, n, step):
            rows = np.arange(start, min(n, start + step), dtype=np.intp)
            a = np.repeat(rows, n)
            b = np.tile(cols, len(rows))
            out[start:start + len(rows)] = self.mul_many(a, b).reshape(len(rows), n)
        return out

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        cur = self._all.copy()
        m = 1
        while True:
            hit = (cur == 0) & (orders == 0)
            orders[hit] = m
            if orders.all():
                return orders
            cur = self.mul_many(cur, self._all)
            m += 1

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*(int(o) for o in np.unique(self.element_orders)))

    @cached_property
    def is_abelian(self) -> bool:
        for g in range(self.order):
            if not np.array_equal(self.left(g), self.right(g)):
                return False
        return True


class CyclicGroup(FiniteGroup):
    def __init__(self, n: int):
        self.n = n
        self.order = n
        self.descriptor = f"cyclic:{n}"

    def mul_many(self, a, b):
        return (np.asarray(a, dtype=np.intp) + np.asarray(b, dtype=np.intp)) % self.n

    @cached_property
    def inverse(self) -> np.ndarray:
        return (-self._all) % self.n

    @cached_property
    def is_abelian(self) -> bool:
        return True

    def element(self, i: int) -> int:
        return int(i)


def _lehmer_rank(perms: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each row of ``perms`` among all n! permutations."""
    perms = np.asarray(perms)
    n = perms.shape[1]
    rank = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(n):
        smaller_later = (perms[:, i + 1:] < perms[:, i:i + 1]).sum(axis=1)
        rank += smaller_later * math.factorial(n - 1 - i)
    return rank


def _parity(perms: np.ndarray) -> np.ndarray:
    n = perms.shape[1]
    inversions = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(n):
        inversions += (perms[:, i + 1:] < perms[:, i:i + 1]).sum(axis=1)
    return inversions % 2


class PermutationGroup(FiniteGroup):
    """S_n or A_n on the letters 0..n-1, elements in lexicographic order.

    The product is composition with the right factor applied first:
    (p*q)(i) = p(q(i)).
    """

    def __init__(self, n: int, alternating: bool = False):
        self.n = n
        self.alternating = alternating
        self.descriptor = f"{'alt' if alternating else 'sym'}:{n}"
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
        if n == 0:
            perms = np.zeros((1, 0), dtype=np.int8)
        nfact = len(perms)
        if alternating:
            keep = _parity(perms) == 0
            self.perms = perms[keep]
            self._lookup = np.full(nfact, -1, dtype=np.intp)
            self._lookup[np.flatnonzero(keep)] = np.arange(len(self.perms))
        else:
            self.perms = perms
            self._lookup = np.arange(nfact, dtype=np.intp)
        self.order = len(self.perms)

    def index_of(self, perms: np.ndarray) -> np.ndarray:
        return self._lookup[_lehmer_rank(perms)]

    def mul_many(self, a, b):
        p = self.perms[np.asarray(a, dtype=np.intp)]
        q = self.perms[np.asarray(b, dtype=np.intp)]
        prod = np.take_along_axis(p, q.astype(np.intp), axis=1)
        return self.index_of(prod)

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.argsort(self.perms, axis=1)
        return self.index_of(inv)

    def element(self, i: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.perms[i])


class SL2Group(FiniteGroup):
    """SL_2(F_p): matrices (a, b, c, d) = [[a, b], [c, d]] with ad - bc = 1.

    Canonical order is lexicographic on (a, b, c, d), except that the
    identity is moved to index 0.
    """

    def __init__(self, p: int):
        self.p = p
        self.descriptor = f"sl2:{p}"
        self.note = "degenerate: D=1, not quasirandom-interesting" if p <= 3 else ""
        grid = np.indices((p,) * 4).reshape(4, -1).T
        a, b, c, d = grid.T
        mats = grid[(a * d - b * c) % p == 1]
        ident = np.flatnonzero((mats == [1, 0, 0, 1]).all(axis=1))[0]
        order = np.concatenate([[ident], np.delete(np.arange(len(mats)), ident)])
        self.mats = mats[order].astype(np.int64)
        self.order = len(self.mats)
        key = self._key(self.mats)
        self._lookup = np.full(p**4, -1, dtype=np.intp)
        self._lookup[key] = np.arange(self.order)

    def _key(self, m: np.ndarray) -> np.ndarray:
        p = self.p
        return ((m[:, 0] * p + m[:, 1]) * p + m[:, 2]) * p + m[:, 3]

    def index_of(self, mats: np.ndarray) -> np.ndarray:
        return self._lookup[self._key(np.asarray(mats) % self.p)]

    def mul_many(self, a, b):
        x = self.mats[np.asarray(a, dtype=np.intp)]
        y = self.mats[np.asarray(b, dtype=np.intp)]
        prod = np.stack([
            x[:, 0] * y[:, 0] + x[:, 1] * y[:, 2],
            x[:, 0] * y[:, 1] + x[:, 1] * y[:, 3],
            x[:, 2] * y[:, 0] + x[:, 3] * y[:, 2],
            x[:, 2] * y[:, 1] + x[:, 3] * y[:, 3],
        ], axis=1)
        return self.index_of(prod)

    @cached_property
    def inverse(self) -> np.ndarray:
        m = self.mats
        inv = np.stack([m[:, 3], -m[:, 1], -m[:, 2], m[:, 0]], axis=1)
        return self.index_of(inv)

    def element(self, i: int) -> tuple[int, int, int, int]:
        return tuple(int(v) for v in self.mats[i])


class DirectProduct(FiniteGroup):
    """G1 x G2 with index i1*|G2| + i2."""

    def __init__(self, g1: FiniteGroup, g2: FiniteGroup):
        self.g1, self.g2 = g1, g2
        self.order = g1.order * g2.order
        self.descriptor = f"prod({g1.descriptor},{g2.descriptor})"

    def _split(self, a):
        return np.divmod(np.asarray(a, dtype=np.intp), self.g2.order)

    def mul_many(self, a, b):
        a1, a2 = self._split(a)
        b1, b2 = self._split(b)
        return self.g1.mul_many(a1, b1) * self.g2.order + self.g2.mul_many(a2, b2)

    @cached_property
    def inverse(self) -> np.ndarray:
        i1, i2 = self._split(self._all)
        return self.g1.inverse[i1] * self.g2.order + self.g2.inverse[i2]

    @cached_property
    def is_abelian(self) -> bool:
        return self.g1.is_abelian and self.g2.is_abelian

    def element(self, i: int):
        i1, i2 = divmod(int(i), self.g2.order)
        return (self.g1.element(i1), self.g2.element(i2))


def _check_cap(order: int, cap: int, what: str) -> None:
    if order > cap:
        raise CapExceeded(f"{what} has order {order}, above the cap {cap}")


def make_cyclic(n: int) -> CyclicGroup:
    if n < 1:
        raise GroupSpecError(f"cyclic group needs n >= 1, got {n}")
    return CyclicGroup(n)


def make_symmetric(n: int, max_order: int = DEFAULT_MAX_ORDER) -> PermutationGroup:
    if not 1 <= n <= 9:
        raise GroupSpecError(f"symmetric group needs 1 <= n <= 9, got {n}")
    _check_cap(math.factorial(n), max_order, f"S_{n}")
    return PermutationGroup(n)


def make_alternating(n: int, max_order: int = DEFAULT_MAX_ORDER) -> PermutationGroup:
    if not 1 <= n <= 9:
        raise GroupSpecError(f"alternating group needs 1 <= n <= 9, got {n}")
    _check_cap(max(1, math.factorial(n) // 2), max_order, f"A_{n}")
    return PermutationGroup(n, alternating=True)


def make_sl2(p: int, max_order: int = SL2_MAX_ORDER) -> SL2Group:
    if not is_prime(p):
        raise GroupSpecError(f"{p} is not prime")
    _check_cap(p * (p * p - 1), max_order, f"SL_2(F_{p})")
    return SL2Group(p)


def direct_product(g1: FiniteGroup, g2: FiniteGroup,
                   max_order: int = DEFAULT_MAX_ORDER) -> DirectProduct:
    _check_cap(g1.order * g2.order, max_order, f"{g1.descriptor} x {g2.descriptor}")
    return DirectProduct(g1, g2)


def cayley_table(G: FiniteGroup) -> np.ndarray:
    """Materialised multiplication table; raises CapExceeded above the threshold."""
    table = G.table
    if table is None:
        raise CapExceeded(
            f"Cayley table for order {G.order} exceeds threshold {G.table_threshold}")
    return table


_ATOM = re.compile(r"^(cyclic|sym|alt|sl2):(\d+)$")


def parse_group(descriptor: str, max_order: int | None = None) -> FiniteGroup:
    """Build a group from ``cyclic:n``, ``sym:n``, ``alt:n``, ``sl2:p`` or
    ``prod(<d1>,<d2>)``."""
    text = descriptor.strip().replace(" ", "")
    if text.startswith("prod(") and text.endswith(")"):
        inner = text[5:-1]
        depth = 0
        for i, ch in enumerate(inner):
            depth += (ch == "(") - (ch == ")")
            if ch == "," and depth == 0:
                left = parse_group(inner[:i], max_order)
                right = parse_group(inner[i + 1:], max_order)
                cap = DEFAULT_MAX_ORDER if max_order is None else max_order
                return direct_product(left, right, cap)
        raise GroupSpecError(f"bad product descriptor: {descriptor!r}")
    m = _ATOM.match(text)
    if not m:
        raise GroupSpecError(f"unknown group descriptor: {descriptor!r}")
    family, n = m.group(1), int(m.group(2))
    if family == "cyclic":
        G = make_cyclic(n)
        if max_order is not None:
            _check_cap(n, max_order, text)
        return G
    kw = {} if max_order is None else {"max_order": max_order}
    return {"sym": make_symmetric, "alt": make_alternating, "sl2": make_sl2}[family](n, **kw)


def check_group_axioms(G: FiniteGroup, samples: int = 10**5, seed: int = 0) -> bool:
    """Associativity (exhaustive up to order 200), identity, inverses and
    bijectivity of translations (exhaustive up to order 1000)."""
    n = G.order
    idx = G._all
    if not (np.array_equal(G.left(0), idx) and np.array_equal(G.right(0), idx)):
        return False
    if not (np.all(G.mul_many(idx, G.inverse) == 0) and np.all(G.mul_many(G.inverse, idx) == 0)):
        return False
    if n <= 200:
        a, b, c = (m.ravel() for m in np.meshgrid(idx, idx, idx, indexing="ij"))
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, samples))
    if not np.array_equal(G.mul_many(G.mul_many(a, b), c), G.mul_many(a, G.mul_many(b, c))):
        return False
    if n <= 1000:
        for g in range(n):
            if len(np.unique(G.left(g))) != n or len(np.unique(G.right(g))) != n:
                return False
    return True
