"""Exact counts of recurrence patterns and the combinatorial reformulations
behind them (triangle counts in a tripartite graph, hypergraph slices)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .functions import SubsetMask, _same_group
from .groups import CapExceeded, FiniteGroup

CUBIC_MAX_ORDER = 500
ITERATION_BUDGET = 10**9
DENSE_TUPLE_BUDGET = 10**8


class Pattern(enum.Enum):
    TRIPLE = "triple"                  # x, xg, gx in A
    TRIPLE_CHANGE_OF_VARIABLES = "triple-cov"
    RECURRENCE = "best-g"              # x, gx, xg in A for one fixed g
    SCHUR = "schur"                    # g in A, x in B, xg, gx in C
    MULTI = "multi"                    # k-dimensional, with conjugated block
    MULTI_PLAIN = "multi-plain"        # k-dimensional, without it


@dataclass(frozen=True)
class PatternCount:
    pattern: Pattern
    count: int
    normalizer: int
    distinct_count: int | None = None

    @property
    def density(self) -> float:
        return self.count / self.normalizer


def _cap(G: FiniteGroup, limit: int = CUBIC_MAX_ORDER) -> None:
    if G.order > limit:
        raise CapExceeded(f"cubic kernel needs |G| <= {limit}, got {G.order}")


def _table(G: FiniteGroup) -> np.ndarray:
    T = G.table
    if T is None:
        raise CapExceeded("pattern kernel needs a materialised Cayley table")
    return T.astype(np.intp)


def conjugation_matrix(G: FiniteGroup) -> np.ndarray:
    """conj[a, c] = a c a^-1."""
    T = _table(G)
    return T[T, G.inverse[:, None]]


# -- pairs (g, x) -------------------------------------------------------------------

def recurrence_counts(G: FiniteGroup, A: SubsetMask) -> np.ndarray:
    """|A ∩ g^-1 A ∩ A g^-1| = #{x in A : gx, xg in A} for every g."""
    _same_group(G, A.group)
    a = A.bits
    return np.array([np.count_nonzero(a & a[G.left(g)] & a[G.right(g)])
                     for g in range(G.order)], dtype=np.int64)


def count_triple_pattern(G: FiniteGroup, A: SubsetMask) -> PatternCount:
    """Pairs (g, x) with x, xg, gx in A."""
    total = int(recurrence_counts(G, A).sum())
    return PatternCount(Pattern.TRIPLE, total, G.order ** 2)


def triple_constraint_count(G: FiniteGroup, A: SubsetMask) -> int:
    """#{(a, b, c) : ab in A, aca^-1 in A, b^-1 c b in A}, summing over c last."""
    _same_group(G, A.group)
    _cap(G)
    T = _table(G)
    a = A.bits
    C = a[conjugation_matrix(G)].astype(np.int64)     # C[a, c] = [aca^-1 in A]
    inv = G.inverse
    # [b^-1 c b in A] is row b^-1 of C
    both = C @ C[inv].T                                # both[a, b] = #c with both
    return int((both * a[T]).sum())


def count_triple_via_change_of_variables(G: FiniteGroup, A: SubsetMask) -> PatternCount:
    """The same pair count, recovered from triples (a, b, c) through the
    |G|-to-one map (a, b, c) -> (x, g) = (ab, b^-1 c a^-1)."""
    n = G.order
    triples = triple_constraint_count(G, A)
    if triples % n:
        raise ArithmeticError(f"triple count {triples} is not divisible by |G| = {n}")
    return PatternCount(Pattern.TRIPLE_CHANGE_OF_VARIABLES, triples // n, n * n)


def best_recurrence_element(G: FiniteGroup, A: SubsetMask) -> tuple[int, int]:
    """Non-trivial g maximising |A ∩ g^-1 A ∩ A g^-1|; smallest index on ties."""
    if G.order == 1:
        raise ValueError("the trivial group has no non-trivial element")
    counts = recurrence_counts(G, A)[1:]
    g = int(np.argmax(counts)) + 1
    return g, int(counts[g - 1])


def count_schur_quadruples(G: FiniteGroup, A: SubsetMask, B: SubsetMask,
                           C: SubsetMask) -> PatternCount:
    """(g, x) with g in A, x in B, xg in C, gx in C; ``distinct_count`` also
    requires g, x, xg, gx pairwise distinct."""
    for S in (A, B, C):
        _same_group(G, S.group)
    a, b, c = A.bits, B.bits, C.bits
    xs = G._all
    count = distinct = 0
    for g in np.flatnonzero(a):
        xg, gx = G.right(g), G.left(g)
        hit = b & c[xg] & c[gx]
        count += int(np.count_nonzero(hit))
        ok = hit & (xs != g) & (xg != g) & (gx != g) & (xg != xs) & (gx != xs) & (xg != gx)
        distinct += int(np.count_nonzero(ok))
    return PatternCount(Pattern.SCHUR, count, G.order ** 2, distinct)


# -- subsets of G^k --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TupleSet:
    """A subset of G^k as a dense boolean array of shape (|G|,) * k."""

    group: FiniteGroup
    k: int
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (self.group.order,) * self.k:
            raise ValueError("tuple mask has the wrong shape")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_tuples(cls, G: FiniteGroup, k: int, tuples) -> "TupleSet":
        _dense_cap(G, k)
        bits = np.zeros((G.order,) * k, dtype=bool)
        for t in tuples:
            bits[tuple(t)] = True
        return cls(G, k, bits)

    @classmethod
    def from_subset(cls, A: SubsetMask) -> "TupleSet":
        return cls(A.group, 1, A.bits)

    @classmethod
    def full(cls, G: FiniteGroup, k: int) -> "TupleSet":
        _dense_cap(G, k)
        return cls(G, k, np.ones((G.order,) * k, dtype=bool))

    @classmethod
    def random(cls, G: FiniteGroup, k: int, density: float, rng) -> "TupleSet":
        _dense_cap(G, k)
        return cls(G, k, rng.random((G.order,) * k) < density)

    @property
    def size(self) -> int:
        return int(self.bits.sum())

    def tuples(self) -> set[tuple[int, ...]]:
        return {tuple(int(v) for v in t) for t in np.argwhere(self.bits)}


def _dense_cap(G: FiniteGroup, k: int) -> None:
    if G.order ** k > DENSE_TUPLE_BUDGET:
        raise CapExceeded(f"|G|^{k} = {G.order ** k} exceeds the tuple budget")


def _check_k(A: TupleSet, k: int | None) -> int:
    if k is not None and k != A.k:
        raise ValueError(f"k={k} but the tuple set lives in G^{A.k}")
    if A.k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    return A.k


def _grids(n: int, k: int) -> list[np.ndarray]:
    """Open-mesh index arrays for x_1..x_k."""
    return list(np.ix_(*([np.arange(n)] * k))) if k else []


def multi_pattern_mask(G: FiniteGroup, A: TupleSet, g: int, with_conjugated: bool) -> np.ndarray:
    """Boolean array over (x_1..x_k): all constraints hold for this g.

    Constraint i (0 <= i <= k) is (g x_1, ..., g x_i, x_{i+1}, ..., x_k) in A;
    the optional extra one is (g x_1 g^-1, ..., g x_k g^-1) in A.
    """
    k = A.k
    xs = _grids(G.order, k)
    gx = G.left(g)
    ok = np.ones((G.order,) * k, dtype=bool)
    for i in range(k + 1):
        idx = tuple(gx[xs[j]] if j < i else xs[j] for j in range(k))
        ok &= A.bits[idx]
    if with_conjugated:
        conj = G.right(G.inv(g))[gx]          # x -> g x g^-1
        ok &= A.bits[tuple(conj[x] for x in xs)]
    return ok


def count_multi_pattern(G: FiniteGroup, A: TupleSet, k: int | None = None,
                        with_conjugated: bool = True,
                        budget: int = ITERATION_BUDGET) -> PatternCount:
    """Tuples (g, x_1..x_k) meeting every recurrence constraint."""
    _same_group(G, A.group)
    k = _check_k(A, k)
    if G.order ** (k + 1) > budget:
        raise CapExceeded(f"|G|^{k + 1} exceeds the iteration budget {budget}")
    total = sum(int(np.count_nonzero(multi_pattern_mask(G, A, g, with_conjugated)))
                for g in range(G.order))
    kind = Pattern.MULTI if with_conjugated else Pattern.MULTI_PLAIN
    return PatternCount(kind, total, G.order ** (k + 1))


# -- tripartite graph -------------------------------------------------------------------

@dataclass
class TripartiteSummary:
    edges_12: int                # (a,1)-(b,2) when ab in A
    edges_13: int                # (a,1)-(c,3) when a c a^-1 in A
    edges_23: int                # (b,2)-(c,3) when b^-1 c b in A
    triangles: int
    family_size: int             # triangles (a,1),(b,2),(ba,3) with ab in A
    family_valid: bool
    family_edge_disjoint: bool


def build_tripartite_graph(G: FiniteGroup, A: SubsetMask) -> TripartiteSummary:
    """Tripartite graph on G x {1,2,3} whose triangles are the triples (a, b, c)
    with ab, aca^-1, b^-1 c b in A."""
    _same_group(G, A.group)
    _cap(G)
    T = _table(G)
    a = A.bits
    conj = conjugation_matrix(G)
    E12 = a[T]                         # [a, b]
    E13 = a[conj]                      # [a, c]
    E23 = a[conj[G.inverse]]           # [b, c]: b^-1 c b
    # count triangles by contracting over b, the opposite order to triple_constraint_count
    paths = E12.astype(np.int64) @ E23.astype(np.int64)     # [a, c]
    triangles = int((paths * E13).sum())

    fa, fb = np.nonzero(E12)
    fc = T[fb, fa]                     # ba
    valid = bool(np.all(E13[fa, fc]) and np.all(E23[fb, fc]))
    n = G.order
    disjoint = all(len(np.unique(u * n + v)) == len(fa)
                   for u, v in ((fa, fb), (fa, fc), (fb, fc)))
    return TripartiteSummary(int(E12.sum()), int(E13.sum()), int(E23.sum()), triangles,
                             len(fa), valid, disjoint)


# -- simplex slices ---------------------------------------------------------------------

@dataclass
class SliceSummary:
    k: int
    slice_sizes: list[int]
    intersection_count: int       # tuples (x_0..x_k) lying in every slice
    pattern_count: int            # tuples (g, y_1..y_k) meeting every constraint
    correspondence_holds: bool


def _slice_tuple(G: FiniteGroup, xs: list, i: int) -> list:
    """(x_0, x_0 x_1, ..., x_0..x_{i-1}, y_{i+1}, ..., y_k) where
    y_j = x_k^-1 ... x_j^-1; it does not involve x_i."""
    k = len(xs) - 1
    mul, inv = G.table.astype(np.intp), G.inverse
    out = []
    prefix = None
    for j in range(i):
        prefix = xs[0] if prefix is None else mul[prefix, xs[j]]
        out.append(prefix)
    suffix = []
    acc = None
    for j in range(k, i, -1):
        acc = inv[xs[k]] if acc is None else mul[acc, inv[xs[j]]]
        suffix.append(acc)
    return out + suffix[::-1]


def build_simplex_slices(G: FiniteGroup, A: TupleSet, k: int | None = None,
                         budget: int = ITERATION_BUDGET) -> SliceSummary:
    """Materialise the slices E_0..E_k of the (k+1)-partite hypergraph and check
    that (x_0..x_k) lies in all of them exactly when (g, y_1..y_k), with
    g = x_0..x_k and y_j = x_k^-1..x_j^-1, meets every plain recurrence constraint."""
    _same_group(G, A.group)
    k = _check_k(A, k)
    if k < 2:
        raise ValueError("simplex slices need k in {2, 3}")
    n = G.order
    if n ** (k + 1) > min(budget, DENSE_TUPLE_BUDGET):
        raise CapExceeded(f"|G|^{k + 1} exceeds the slice budget")
    _table(G)
    full = _grids(n, k + 1)
    slices = []
    for i in range(k + 1):
        # E_i lives on the k coordinates other than x_i
        coords = _grids(n, k)
        xs = coords[:i] + [None] + coords[i:]
        slices.append(A.bits[tuple(np.broadcast_arrays(*_slice_tuple(G, xs, i)))])
    in_all = np.ones((n,) * (k + 1), dtype=bool)
    for i, E in enumerate(slices):
        in_all &= np.expand_dims(E, axis=i)

    mul, inv = G.table.astype(np.intp), G.inverse
    g = full[0]
    for j in range(1, k + 1):
        g = mul[g, full[j]]
    ys = [None] * (k + 1)
    acc = inv[full[k]]
    ys[k] = acc
    for j in range(k - 1, 0, -1):
        acc = mul[acc, inv[full[j]]]
        ys[j] = acc
    g, *ys_b = np.broadcast_arrays(g, *ys[1:])
    pattern = np.ones(g.shape, dtype=bool)
    for i in range(k + 1):
        idx = tuple(mul[g, ys_b[j]] if j < i else ys_b[j] for j in range(k))
        pattern &= A.bits[idx]
    # the map (x_0..x_k) -> (g, y_1..y_k) must be a bijection of G^{k+1}
    flat = g
    for y in ys_b:
        flat = flat * n + y
    bijective = len(np.unique(flat)) == n ** (k + 1)
    plain = count_multi_pattern(G, A, k, with_conjugated=False).count
    holds = bool(bijective and np.array_equal(in_all, pattern)
                 and int(in_all.sum()) == plain)
    return SliceSummary(k, [int(E.sum()) for E in slices], int(in_all.sum()), plain, holds)


# -- exploratory colouring search ---------------------------------------------------------

def schur_colouring_scores(G: FiniteGroup, colours: int, trials: int, rng) -> list[float]:
    """For random colourings, the best colour class's density of pairs (x, g)
    with x, g, gx, xg all in that class. Exploratory only: nothing is asserted."""
    scores = []
    for _ in range(trials):
        labels = rng.integers(0, colours, size=G.order)
        best = 0
        for c in range(colours):
            S = SubsetMask(G, labels == c)
            best = max(best, count_schur_quadruples(G, S, S, S).count)
        scores.append(best / G.order ** 2)
    return scores
