"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line; the lines are printed together in the
"acceptance criteria" section at the end of the pytest run.
"""

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from whitehead.autos import (
    all_relabelings,
    compose,
    enumerate_wh2,
    inner,
    is_simple,
    parse_automorphism,
    wh2_images,
)
from whitehead.cluster_lab import (
    ExperimentConfig,
    nearest_centroid_classify,
    run_experiment,
    separation,
)
from whitehead.core import (
    CyclicWord,
    cyclic_reduce,
    make_rng,
    reduced_words,
    sample_cyclically_reduced,
    sample_reduced,
)
from whitehead.currents import (
    check_invariance,
    euler_length,
    euler_word,
    length,
    rational_current,
    uniform_current,
)
from whitehead.graph import length_change, whitehead_graph
from whitehead.ideal import factorize, ideal_step, stretch_factor
from whitehead.minimizer import (
    Equivalence,
    automorphic_equivalence,
    is_strictly_minimal,
    minimize,
)

TRANSVECTION = "a->ab, b->b"

# all single Nielsen moves for k=2 and two 2-step compositions
TEN = [
    "a->ab", "a->aB", "a->ba", "a->Ba",
    "b->ba", "b->bA", "b->ab", "b->Ab",
    "a->abb", "a->ab * b->ba",
]


def A(text):
    return parse_automorphism(text, 2)


def test_1_euler_words(criterion):
    details = []
    ok = True
    for k, m in [(2, 2), (2, 3), (3, 2)]:
        w = euler_word(k, m).w
        n = len(w)
        letters = w.letters
        windows = Counter(tuple(letters[(i + j) % n] for j in range(m)) for i in range(n))
        good = (
            n == euler_length(k, m) == 2 * k * (2 * k - 1) ** (m - 1)
            and set(windows) == set(reduced_words(k, m))
            and set(windows.values()) == {1}
            and all(letters[i] != -letters[i - 1] for i in range(n))
        )
        ok &= good
        details.append(f"(k={k},m={m}) ||w||={n}")
    criterion("1 Euler word exactness", ok, ", ".join(details))
    assert ok


def test_2_length_change_oracle(criterion):
    rng = make_rng(2)
    checked = mismatches = 0
    for k in (2, 3):
        pairs = enumerate_wh2(k)
        for _ in range(500):
            w = sample_cyclically_reduced(int(rng.integers(1, 61)), rng, k)
            p = pairs[int(rng.integers(len(pairs)))]
            direct = wh2_images(p, k).cyclic_length_of(w) - len(w)
            mismatches += length_change(p, whitehead_graph(w, k)) != direct
            checked += 1
    ok = checked == 1000 and mismatches == 0
    criterion("2 length-change oracle", ok, f"{checked} pairs, {mismatches} mismatches")
    assert ok


def test_3_current_identities(criterion):
    nu = uniform_current(2, 4)
    ok = length(nu) == 1 and check_invariance(nu) == []
    ok &= all(nu.level_sum(m) == 1 for m in range(1, 5))
    rng = make_rng(3)
    worst = 0.0
    for _ in range(100):
        w = sample_cyclically_reduced(int(rng.integers(1, 200)), rng, 2)
        eta = rational_current(w, 4)
        ok &= length(eta) == len(w)
        ok &= check_invariance(eta) == []
        for m in range(1, 5):
            worst = max(worst, abs(eta.level_sum(m) - len(w)) / len(w))
    ok &= worst <= 1e-9
    criterion("3 current identities", ok, f"L(n_A)=1, 100 rational currents, max level-sum error {worst}")
    assert ok


def test_4_stretch_two_methods_agree(criterion):
    phi = A(TRANSVECTION)
    exact = stretch_factor(phi)
    ratios = {
        m: Fraction(phi.cyclic_length_of(euler_word(2, m).w), euler_length(2, m)) for m in (2, 3)
    }
    rng = make_rng(4)
    n = 10_000
    mc = np.mean(
        [len(cyclic_reduce(phi.apply(sample_reduced(n, rng)))[0]) / n for _ in range(100)]
    )
    rel = abs(mc - float(exact.value)) / float(exact.value)
    ok = exact.stabilized and ratios[2] == ratios[3] == exact.value and rel <= 0.01
    criterion(
        "4 stretch factor, Euler words vs Monte Carlo",
        ok,
        f"exact {exact.value} (||phi(w_2)||={phi.cyclic_length_of(euler_word(2, 2).w)}, "
        f"stable m=2,3), Monte Carlo {mc:.5f}, rel. diff {rel:.2e}",
    )
    assert ok


@pytest.mark.xfail(strict=True, reason="the literal target 4/3 (||phi(w_2)||=16) is not the true value 7/6")
def test_4_literal_four_thirds(criterion):
    phi = A(TRANSVECTION)
    lam = stretch_factor(phi).value
    image = phi.cyclic_length_of(euler_word(2, 2).w)
    ok = lam == Fraction(4, 3) and image == 16
    criterion("4 literal target lambda = 4/3", ok, f"computed {lam} with ||phi(w_2)|| = {image}")
    assert ok


def test_5_ideal_step_and_simple(criterion):
    ok = True
    drops = []
    for text in TEN:
        phi = A(text)
        tau = ideal_step(phi)
        before = stretch_factor(phi).value
        after = stretch_factor(compose(wh2_images(tau, 2), phi)).value
        ok &= after < before
        drops.append(f"{before}->{after}")
    rng = make_rng(5)
    simple = list(all_relabelings(2))
    for _ in range(20):
        simple.append(inner(sample_reduced(int(rng.integers(1, 6)), rng), 2))
    ones = [stretch_factor(s).value == 1 for s in simple]
    ok &= all(ones) and len(simple) == 28
    criterion("5 ideal step decreases lambda; simple => lambda=1", ok,
              f"{'; '.join(drops)}; {sum(ones)}/28 simple at 1")
    assert ok


def test_6_factorization(criterion):
    ok = True
    seqs = []
    for text in TEN:
        phi = A(text)
        f = factorize(phi)
        L = f.L_sequence
        ok &= f.reconstruct().images == phi.images
        ok &= is_simple(f.alpha)
        ok &= L[0] == 1 and all(a < b for a, b in zip(L, L[1:]))
        seqs.append("[" + ",".join(str(x) for x in L) + "]")
    criterion("6 factorization", ok, " ".join(seqs))
    assert ok


@pytest.fixture(scope="module")
def transvection_report():
    cfg = ExperimentConfig(
        k=2, sample_size=1000, word_length=1000, automorphisms=[TRANSVECTION],
        apply_probability=1.0, seed=0,
    )
    return run_experiment(cfg)


def test_7_cluster_at_predicted_centre(criterion, transvection_report):
    c = transvection_report.clusters[0]
    ok = c.fraction_reduced >= 0.99 and c.mean_distance <= 0.02 and c.p95_distance <= 0.05
    criterion(
        "7 transformed words cluster at phi n_A",
        ok,
        f"{c.size} transformed, reduced {c.fraction_reduced}, mean dist {c.mean_distance:.4f}, "
        f"p95 {c.p95_distance:.4f}",
    )
    assert ok


def test_8_clustering(criterion):
    cfg = ExperimentConfig(
        k=2, sample_size=1000, word_length=1000, automorphisms=[TRANSVECTION, "b->ba, a->a"],
        apply_probability=1.0, seed=0,
    )
    rep = run_experiment(cfg)
    acc = nearest_centroid_classify(rep)
    inter, intra = separation(rep)
    ok = acc >= 0.95 and inter > 3 * intra
    criterion("8 clustering", ok, f"accuracy {acc}, inter {inter:.4f} vs 3 x intra {3 * intra:.4f}")
    assert ok


def test_9_whitehead_sanity(criterion):
    C = CyclicWord.parse
    ok = len(minimize(C("abab"), 2).result) == 2
    ok &= len(minimize(C("abAB"), 2).result) == 4
    ok &= automorphic_equivalence(C("ab"), C("a"), k=2).verdict == Equivalence.EQUIVALENT
    ok &= automorphic_equivalence(C("abAB"), C("abab"), k=2).verdict == Equivalence.INEQUIVALENT
    criterion("9 Whitehead algorithm sanity", ok, "abab->2, abAB->4, ab~a, abAB!~abab")
    assert ok


def test_10_strict_minimality_generic(criterion):
    rng = make_rng(10)
    hits = sum(
        is_strictly_minimal(sample_cyclically_reduced(500, rng, 2), 2) for _ in range(1000)
    )
    ok = hits >= 990
    criterion("10 generic strict minimality", ok, f"{hits}/1000 strictly minimal")
    assert ok
