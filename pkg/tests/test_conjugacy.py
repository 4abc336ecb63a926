from fractions import Fraction

import numpy as np
import pytest

from qrlab.conjugacy import (class_averages_exact, commuting_pairs, conjugacy_classes,
                             invariant_correlation, noncommutativity_bound, project_invariant)
from qrlab.functions import DensityFunction, SubsetMask, random_mean_zero, random_subset, rng_for
from qrlab.groups import parse_group

from conftest import oracle_classes

FLEET = ["cyclic:1", "cyclic:6", "sym:3", "sym:4", "alt:4", "alt:5", "sl2:2", "sl2:3", "sl2:5",
         "prod(cyclic:2,sym:3)"]


@pytest.mark.parametrize("desc", FLEET)
def test_classes_match_oracle(desc):
    G = parse_group(desc)
    C = conjugacy_classes(G)
    want, _, _ = oracle_classes(G)
    got = [frozenset(m.tolist()) for m in C.members]
    assert sorted(map(sorted, got)) == sorted(map(sorted, want))
    assert C.class_of[0] == 0 and C.class_sizes[0] == 1
    assert sum(C.class_sizes) == G.order
    # classes are numbered by their smallest element
    assert [min(m) for m in got] == sorted(min(m) for m in got)
    for k, m in enumerate(C.members):
        assert np.all(C.class_of[m] == k)


@pytest.mark.parametrize("desc", FLEET)
def test_burnside_against_brute_force(desc):
    G = parse_group(desc)
    _, T, _ = oracle_classes(G)
    brute = sum(1 for a in range(G.order) for b in range(G.order) if T[a][b] == T[b][a])
    assert commuting_pairs(G) == brute == G.order * conjugacy_classes(G).class_count


def test_frozen_class_data():
    assert conjugacy_classes(parse_group("sym:3")).class_count == 3
    assert conjugacy_classes(parse_group("sl2:5")).class_count == 9
    assert commuting_pairs(parse_group("sym:3")) == 18
    assert commuting_pairs(parse_group("sl2:5")) == 1080


def test_noncommutativity_bound_values():
    # |G| (1 + (|G| - 1) / D^2)
    assert noncommutativity_bound(parse_group("sl2:5"), 2) == 3690
    assert noncommutativity_bound(parse_group("alt:6"), 5) == Fraction(27648, 5)
    assert float(noncommutativity_bound(parse_group("alt:6"), 5)) == 5529.6
    with pytest.raises(ValueError):
        noncommutativity_bound(parse_group("sym:3"), 0)


def test_inverse_class():
    G = parse_group("alt:5")
    C = conjugacy_classes(G)
    for k, rep in enumerate(C.representatives):
        assert C.inverse_class[k] == C.class_of[G.inv(int(rep))]


def test_projection_is_idempotent_and_class_constant():
    G = parse_group("sl2:5")
    C = conjugacy_classes(G)
    f = random_mean_zero(G, rng_for(G.descriptor, 1, 0, "proj"))
    P = project_invariant(C, f)
    for m in C.members:
        assert np.ptp(P.values[m]) < 1e-12
    assert np.allclose(project_invariant(C, P).values, P.values, atol=1e-14)
    assert abs(P.mean() - f.mean()) < 1e-12


def test_class_averages_exact_for_indicators():
    G = parse_group("sym:4")
    C = conjugacy_classes(G)
    A = SubsetMask.from_elements(G, [0, 1, 2, 5, 7])
    avgs = class_averages_exact(C, DensityFunction.indicator(A))
    for k, m in enumerate(C.members):
        assert avgs[k] == Fraction(int(A.bits[m].sum()), len(m))


def _correlation_oracle(G, C, bits):
    return sum(Fraction(int(bits[m].sum()) ** 2, len(m) * G.order) for m in C.members)


@pytest.mark.parametrize("desc", ["sym:3", "alt:4", "cyclic:8", "prod(cyclic:2,sym:3)"])
def test_cauchy_schwarz_inequality_exhaustive(desc):
    # E[1_B E(1_B | conjugation invariant)] >= (|B| / |G|)^2 for every B
    G = parse_group(desc)
    C = conjugacy_classes(G)
    n = G.order
    for code in range(2 ** n):
        bits = np.array([(code >> i) & 1 for i in range(n)], dtype=bool)
        f = DensityFunction.indicator(SubsetMask(G, bits))
        lhs = invariant_correlation(C, f, f)
        assert lhs == _correlation_oracle(G, C, bits)
        assert lhs >= Fraction(int(bits.sum()), n) ** 2


@pytest.mark.parametrize("desc", ["sl2:5", "alt:5", "sl2:7"])
def test_cauchy_schwarz_inequality_random(desc):
    G = parse_group(desc)
    C = conjugacy_classes(G)
    for trial in range(1000 if G.order <= 120 else 200):
        rng = rng_for(G.descriptor, 3, trial, "cs")
        B = random_subset(G, rng.random(), rng)
        f = DensityFunction.indicator(B)
        assert invariant_correlation(C, f, f) >= Fraction(B.size, G.order) ** 2
