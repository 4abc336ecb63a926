"""Shared fixtures and brute-force oracles.

The oracles rebuild group products from the explicit element objects
(integers, permutation tuples, 2x2 matrices) with plain Python, so they do
not share code with the vectorised kernels under test.
"""

import itertools
import math

import pytest

from qrlab.groups import CyclicGroup, DirectProduct, PermutationGroup, SL2Group


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("QRLAB_CACHE_DIR", str(tmp_path / "cache"))


def oracle_product(G):
    """Return mul(i, j) computed from element objects, independent of mul_many."""
    elems = [G.element(i) for i in range(G.order)]
    index = {e: i for i, e in enumerate(elems)}
    op = element_op(G)
    return lambda i, j: index[op(elems[i], elems[j])]


def element_op(G):
    if isinstance(G, CyclicGroup):
        return lambda a, b: (a + b) % G.order
    if isinstance(G, PermutationGroup):
        return lambda p, q: tuple(p[q[i]] for i in range(len(p)))
    if isinstance(G, SL2Group):
        p = G.p

        def mat(x, y):
            a, b, c, d = x
            e, f, g, h = y
            return ((a * e + b * g) % p, (a * f + b * h) % p,
                    (c * e + d * g) % p, (c * f + d * h) % p)
        return mat
    if isinstance(G, DirectProduct):
        op1, op2 = element_op(G.g1), element_op(G.g2)
        return lambda x, y: (op1(x[0], y[0]), op2(x[1], y[1]))
    raise TypeError(type(G))


def oracle_table(G):
    mul = oracle_product(G)
    return [[mul(i, j) for j in range(G.order)] for i in range(G.order)]


def oracle_classes(G):
    """Conjugacy classes as frozensets from the oracle product table."""
    T = oracle_table(G)
    inv = [row.index(0) for row in T]
    seen, classes = set(), []
    for x in range(G.order):
        if x in seen:
            continue
        cls = frozenset(T[T[h][x]][inv[h]] for h in range(G.order))
        seen |= cls
        classes.append(cls)
    return classes, T, inv


def hook_length_degrees(n):
    """Irreducible degrees of S_n from the hook length formula."""
    def partitions(m, top):
        if m == 0:
            yield ()
            return
        for k in range(min(m, top), 0, -1):
            for rest in partitions(m - k, k):
                yield (k,) + rest

    out = []
    for lam in partitions(n, n):
        conj = [sum(1 for r in lam if r > j) for j in range(lam[0])]
        hooks = 1
        for i, r in enumerate(lam):
            for j in range(r):
                hooks *= (r - j - 1) + (conj[j] - i - 1) + 1
        out.append(math.factorial(n) // hooks)
    return sorted(out)


def sl2_degrees(p):
    """Textbook degree list of SL_2(F_p) for odd p."""
    degs = [1, p] + [p + 1] * ((p - 3) // 2) + [p - 1] * ((p - 1) // 2)
    degs += [(p + 1) // 2] * 2 + [(p - 1) // 2] * 2
    return sorted(degs)


def all_perms(n):
    return list(itertools.permutations(range(n)))
