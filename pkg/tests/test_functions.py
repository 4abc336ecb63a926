from fractions import Fraction

import numpy as np
import pytest

from qrlab.functions import (DensityFunction, SubsetMask, load_subset, random_mean_zero,
                             random_signs, random_subset, rng_for)
from qrlab.groups import parse_group


def test_rng_for_is_keyed_and_repeatable():
    a = rng_for("sl2:5", 1, 0, "x").random(5)
    assert np.array_equal(a, rng_for("sl2:5", 1, 0, "x").random(5))
    for other in [("sl2:7", 1, 0, "x"), ("sl2:5", 2, 0, "x"), ("sl2:5", 1, 1, "x"), ("sl2:5", 1, 0, "y")]:
        assert not np.array_equal(a, rng_for(*other).random(5))


def test_exact_means_and_norms():
    G = parse_group("sym:3")
    f = DensityFunction(G, np.array([1, -1, 1, 1, -1, 1.0]))
    assert f.is_integral and f.mean_exact() == Fraction(1, 3)
    assert f.l2_norm_sq_exact() == 1 and f.l2_norm() == 1 and f.sup_norm == 1
    g = DensityFunction(G, np.full(6, 0.1))
    assert not g.is_integral and g.mean() == pytest.approx(0.1)
    assert abs(f.centered().mean()) < 1e-15


def test_function_arithmetic():
    G = parse_group("cyclic:3")
    f = DensityFunction(G, np.array([1.0, 2.0, 3.0]))
    assert (f * f).values.tolist() == [1, 4, 9]
    assert (f + 1).values.tolist() == [2, 3, 4]
    assert (f + f).values.tolist() == [2, 4, 6]
    with pytest.raises(ValueError):
        f * DensityFunction.constant(parse_group("sym:3"), 1.0)


def test_subset_mask_basics():
    G = parse_group("sym:3")
    A = SubsetMask.from_elements(G, [1, 3, 3])
    assert A.size == 2 and A.density == pytest.approx(1 / 3)
    assert A.elements().tolist() == [1, 3]
    assert SubsetMask.full(G).size == 6 and SubsetMask.empty(G).size == 0
    for h in range(6):
        conj = A.conjugate(h)
        assert set(conj.elements().tolist()) == {G.mul(G.mul(h, x), G.inv(h)) for x in (1, 3)}


def test_generators():
    G = parse_group("sl2:5")
    rng = rng_for(G.descriptor, 0, 0, "g")
    s = random_signs(G, rng)
    assert set(np.unique(s.values)) <= {-1.0, 1.0}
    assert abs(random_mean_zero(G, rng).mean()) < 1e-12
    assert random_subset(G, 0.3, rng).size == 36


def test_load_subset(tmp_path):
    G = parse_group("sym:3")
    p = tmp_path / "a.txt"
    p.write_text("# header\n0\n\n4  # trailing\n")
    assert load_subset(G, p).elements().tolist() == [0, 4]
    p.write_text("9\n")
    with pytest.raises(ValueError):
        load_subset(G, p)
