"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (visible even under
pytest's output capture) and then asserts. Run standalone with
``python tests/test_acceptance.py`` for just the eleven lines.
"""

import statistics
import sys
import time

import numpy as np
import pytest

from qrlab import patterns as pat
from qrlab.characters import UNBOUNDED, character_degrees
from qrlab.cli import main as cli_main
from qrlab.conjugacy import commuting_pairs, conjugacy_classes, noncommutativity_bound
from qrlab.functions import random_mean_zero, random_signs, random_subset, rng_for
from qrlab.groups import make_cyclic, parse_group
from qrlab.mixing import (convolution_operator_norm, four_function_deviation,
                          relative_mixing_deviation, weak_mixing_deviation)
from qrlab.spectral import abelian_character_norm, cayley_operator_norm

SEED = 20140101
FLEET = ([f"cyclic:{n}" for n in range(1, 13)]
         + ["sym:3", "sym:4", "sym:5", "alt:4", "alt:5", "alt:6", "alt:7"]
         + [f"sl2:{p}" for p in (2, 3, 5, 7, 11, 13)])
SL2_BIG = [f"sl2:{p}" for p in (5, 7, 11, 13)]

_capture = None


@pytest.fixture(autouse=True)
def _grab_capsys(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def report(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}" + (f"  [{detail}]" if detail else "")
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def test_c01_character_identities():
    worst, bad = 0.0, []
    for d in FLEET:
        G = parse_group(d)
        t = time.perf_counter()
        classes = conjugacy_classes(G)
        table = character_degrees(G, classes)
        elapsed = time.perf_counter() - t
        worst = max(worst, elapsed)
        if not (len(table.degrees) == classes.class_count and table.sum_of_squares() == G.order
                and elapsed < 5):
            bad.append(d)
    report(1, "degree count = class count and sum of squares = |G|", not bad,
           f"{len(FLEET)} groups, slowest {worst:.2f}s, failures {bad}")


def test_c02_quasirandomness_degrees():
    problems = []
    for n, want in ((6, 5), (7, 6)):
        D = character_degrees(parse_group(f"alt:{n}")).quasirandomness_degree
        if not (D >= n - 1 and D == want):
            problems.append(f"alt:{n} D={D}")
    t = time.perf_counter()
    for d in SL2_BIG:
        p = int(d.split(":")[1])
        D = character_degrees(parse_group(d)).quasirandomness_degree
        if not (2 * D >= p - 1 and 2 * D == p - 1):
            problems.append(f"{d} D={D}")
    sl2_13 = time.perf_counter()
    character_degrees(parse_group("sl2:13"))
    sl2_13 = time.perf_counter() - sl2_13
    if sl2_13 >= 30:
        problems.append(f"sl2:13 took {sl2_13:.1f}s")
    for d in [f"cyclic:{n}" for n in range(2, 13)] + ["prod(cyclic:2,cyclic:4)"]:
        if character_degrees(parse_group(d)).quasirandomness_degree != 1:
            problems.append(d)
    report(2, "D(A6)=5, D(A7)=6, D(SL2(p))=(p-1)/2, abelian D=1", not problems,
           f"sl2:13 in {sl2_13:.2f}s; problems {problems}")


def test_c03_burnside_and_commuting_bound():
    bad = []
    for d in FLEET:
        G = parse_group(d)
        cp = commuting_pairs(G)
        classes = conjugacy_classes(G)
        D = character_degrees(G, classes).quasirandomness_degree
        bound = G.order if D is UNBOUNDED else noncommutativity_bound(G, D)
        if cp != G.order * classes.class_count or cp > bound:
            bad.append(d)
    report(3, "commuting pairs = |G| * classes and <= |G|(1+(|G|-1)/D^2)", not bad,
           f"failures {bad}")


def test_c04_weak_mixing_bound():
    t = time.perf_counter()
    violations, markov_bad, worst_ratio = 0, 0, 0.0
    for d in SL2_BIG:
        G = parse_group(d)
        D = character_degrees(G).quasirandomness_degree
        for trial in range(32):
            rng = rng_for(d, SEED, trial, "acceptance:weak")
            r = weak_mixing_deviation(G, random_signs(G, rng), random_signs(G, rng), D)
            violations += r.deviation_mean > r.paper_bound + 1e-9
            markov_bad += r.exceptional_fraction > D ** -0.25
            worst_ratio = max(worst_ratio, r.deviation_mean / r.paper_bound)
    elapsed = time.perf_counter() - t
    report(4, "weak mixing <= D^-1/2 |f1||f2|, Markov fraction <= D^-1/4",
           violations == 0 and markov_bad == 0 and elapsed < 60,
           f"128 trials, {violations} violations, {markov_bad} Markov failures, "
           f"max dev/bound {worst_ratio:.3f}, {elapsed:.1f}s")


def test_c05_operator_norm_and_hilbert_schmidt():
    violations, hs_worst, worst_ratio = 0, 0.0, 0.0
    for d in SL2_BIG + ["alt:6"]:
        G = parse_group(d)
        D = character_degrees(G).quasirandomness_degree
        for trial in range(16):
            f2 = random_mean_zero(G, rng_for(d, SEED, trial, "acceptance:opnorm"))
            r = convolution_operator_norm(G, f2, D, seed=trial)
            violations += r.operator_norm > D ** -0.5 * f2.l2_norm() + 1e-9
            hs_worst = max(hs_worst, abs(r.hilbert_schmidt_norm - f2.l2_norm()))
            worst_ratio = max(worst_ratio, r.operator_norm / r.paper_bound)
    report(5, "operator norm <= D^-1/2 |f2| and HS norm = |f2| to 1e-10",
           violations == 0 and hs_worst <= 1e-10,
           f"80 trials, {violations} violations, max norm/bound {worst_ratio:.3f}, "
           f"HS error {hs_worst:.1e}")


def test_c06_four_function_bound():
    violations, worst = 0, 0.0
    for d in ("sl2:5", "alt:6"):
        G = parse_group(d)
        D = character_degrees(G).quasirandomness_degree
        for trial in range(8):
            rng = rng_for(d, SEED, trial, "acceptance:four")
            r = four_function_deviation(G, *(random_signs(G, rng) for _ in range(4)), D=D)
            violations += not r.bound_satisfied
            worst = max(worst, r.deviation_mean / r.paper_bound)
    report(6, "four-function average <= 3 D^-1/2", violations == 0,
           f"16 trials, max dev/bound {worst:.3f}")


def test_c07_counting_identities():
    groups = [f"cyclic:{n}" for n in range(2, 9)] + ["sym:3", "sym:4", "alt:4", "sl2:3"]
    bad = []
    for d in groups:
        G = parse_group(d)
        for trial in range(50):
            rng = rng_for(d, SEED, trial, "acceptance:count")
            A = random_subset(G, rng.random(), rng)
            direct = pat.count_triple_pattern(G, A).count
            graph = pat.build_tripartite_graph(G, A)
            if (pat.count_triple_via_change_of_variables(G, A).count != direct
                    or graph.triangles != G.order * direct):
                bad.append((d, trial))
    for d in ("cyclic:2", "cyclic:3", "sym:3"):
        G = parse_group(d)
        for k in (2, 3):
            A = pat.TupleSet.random(G, k, 0.6, rng_for(d, SEED, k, "acceptance:slices"))
            s = pat.build_simplex_slices(G, A, k)
            if not (s.correspondence_holds and s.intersection_count == s.pattern_count):
                bad.append((d, f"slices k={k}"))
    report(7, "change of variables, tripartite triangles, simplex slices exact", not bad,
           f"{len(groups)} groups x 50 sets + 6 slice cases, failures {bad}")


def test_c08_predicted_densities():
    t = time.perf_counter()
    G = parse_group("sl2:13")
    n = G.order
    ratios, schur = [], []
    for trial in range(3):
        A = random_subset(G, 0.3, rng_for(G.descriptor, SEED, trial, "acceptance:triple"))
        ratios.append(pat.count_triple_pattern(G, A).count / n ** 2 / 0.3 ** 3)
        B = random_subset(G, 0.4, rng_for(G.descriptor, SEED, trial, "acceptance:schur"))
        schur.append(pat.count_schur_quadruples(G, B, B, B).density / (0.4 ** 4 / 2))
    elapsed = time.perf_counter() - t
    ok = all(abs(r - 1) <= 0.15 for r in ratios) and all(s >= 1 for s in schur) and elapsed < 30
    report(8, "SL2(13) triple density within delta^3(1 +- 0.15), Schur >= delta^4/2", ok,
           f"ratios {[round(r, 4) for r in ratios]}, Schur/(d^4/2) {[round(s, 3) for s in schur]}, "
           f"{elapsed:.1f}s")


def test_c09_relative_mixing_trend():
    medians = []
    for p in (3, 5, 7, 11, 13):
        G = parse_group(f"sl2:{p}")
        classes = conjugacy_classes(G)
        devs = []
        for trial in range(32):
            rng = rng_for(G.descriptor, SEED, trial, "acceptance:relative")
            fs = [random_signs(G, rng) for _ in range(3)]
            devs.append(relative_mixing_deviation(G, *fs, classes=classes).deviation_mean)
        medians.append(statistics.median(devs))
    ok = all(a > b for a, b in zip(medians, medians[1:]))
    report(9, "median relative mixing deviation strictly decreasing in p", ok,
           " > ".join(f"{m:.4f}" for m in medians))


def test_c10_spectral_sanity():
    worst = 0.0
    for n in range(2, 33):
        G = make_cyclic(n)
        for a in range(n):
            for b in range(a, n):
                r = cayley_operator_norm(G, a, b)
                worst = max(worst, abs(r.operator_norm - abelian_character_norm(n, a, b)))
    identity_ok = all(cayley_operator_norm(parse_group(d), 0, 0).operator_norm == 1
                      for d in ("cyclic:7", "sym:4", "sl2:5"))
    # 20 pairs inside proper subgroups: cyclic subgroups of Z_n, A_n inside S_n,
    # and pairs of commuting elements of SL2(5)
    cases = []
    for n in (6, 8, 9, 10, 12, 14, 15, 16):
        cases.append((make_cyclic(n), 2 if n % 2 == 0 else 3, 0))
    S4 = parse_group("sym:4")
    A4 = parse_group("alt:4")
    even = [S4.index_of(np.array([A4.element(i)]))[0] for i in range(1, 12)]
    for i in range(0, 10, 2):
        cases.append((S4, int(even[i]), int(even[i + 1])))
    SL = parse_group("sl2:5")
    rng = np.random.default_rng(SEED)
    while len(cases) < 20:
        a = int(rng.integers(1, SL.order))
        cases.append((SL, a, SL.mul(a, a)))
    flagged = sum(not cayley_operator_norm(G, a, b).generated
                  and cayley_operator_norm(G, a, b).operator_norm == 1 for G, a, b in cases)
    ok = worst <= 1e-6 and identity_ok and flagged == 20
    report(10, "abelian character cross-check, identity pair, non-generating pairs", ok,
           f"max abelian error {worst:.1e}, identity ok {identity_ok}, flagged {flagged}/20")


def test_c11_verify_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv("QRLAB_CACHE_DIR", str(tmp_path / "cache"))
    outs = []
    for i in range(2):
        target = tmp_path / f"verify{i}.json"
        code = cli_main(["verify", "--out", str(target)])
        outs.append((code, target.read_bytes()))
    ok = outs[0] == outs[1] and outs[0][0] == 0
    report(11, "verify twice gives byte-identical output", ok,
           f"exit codes {outs[0][0]}/{outs[1][0]}, {len(outs[0][1])} bytes")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                if name == "test_c11_verify_is_deterministic":
                    import tempfile
                    from pathlib import Path
                    with tempfile.TemporaryDirectory() as d:
                        mp = pytest.MonkeyPatch()
                        fn(Path(d), mp)
                        mp.undo()
                else:
                    fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
