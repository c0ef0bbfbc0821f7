import pytest
from hypothesis import given

from whitehead.autos import (
    CharPair,
    all_relabelings,
    enumerate_wh2,
    is_inner_wh2,
    wh2_images,
)
from whitehead.core import CyclicWord, make_rng, sample_cyclically_reduced
from whitehead.currents import euler_word
from whitehead.minimizer import (
    Equivalence,
    automorphic_equivalence,
    is_minimal_by_wh2,
    is_strictly_minimal,
    minimize,
)

from conftest import cyclic_words


def C(s):
    return CyclicWord.parse(s)


def brute_min_change(w, k=2):
    return min(wh2_images(p, k).cyclic_length_of(w) - len(w) for p in enumerate_wh2(k))


class TestMinimize:
    def test_abab(self):
        tr = minimize(C("abab"), 2)
        assert len(tr.steps) == 1
        p, x = tr.steps[0]
        assert p == CharPair(frozenset({1, -2}), -2)
        assert str(x) == "aa"

    def test_commutator_is_minimal(self):
        tr = minimize(C("abAB"), 2)
        assert tr.steps == [] and tr.result == C("abAB")
        assert brute_min_change(C("abAB")) == 0

    def test_ab(self):
        tr = minimize(C("ab"), 2)
        assert len(tr.steps) == 1 and str(tr.result) == "a"

    def test_trace_json(self):
        d = minimize(C("abab"), 2).to_dict()
        assert d["result"] == "aa" and d["length"] == 2
        assert d["steps"][0]["tau"] == {"T": ["a", "B"], "m": "B"}

    @given(cyclic_words(2, max_size=25))
    def test_result_is_wh2_minimal(self, w):
        tr = minimize(w, 2)
        assert len(tr.result) <= len(w)
        assert brute_min_change(tr.result) >= 0
        lengths = [len(w)] + [len(x) for _, x in tr.steps]
        assert all(b < a for a, b in zip(lengths, lengths[1:]))
        assert tr.replay() == tr.result

    @given(cyclic_words(3, max_size=20))
    def test_rank3(self, w):
        tr = minimize(w, 3)
        assert brute_min_change(tr.result, 3) >= 0
        assert tr.replay() == tr.result

    def test_orbit_invariance(self):
        rng = make_rng(31)
        for _ in range(100):
            w = sample_cyclically_reduced(int(rng.integers(1, 30)), rng, 2)
            n = len(minimize(w, 2).result)
            for rel in all_relabelings(2):
                assert len(minimize(rel.apply_cyclic(w), 2).result) == n

    def test_rank_too_small(self):
        with pytest.raises(ValueError):
            minimize(C("abc"), 2)


class TestStrictMinimality:
    def test_examples(self):
        assert is_strictly_minimal(euler_word(2, 2).w, 2)
        assert not is_strictly_minimal(C("abAB"), 2)
        assert not is_strictly_minimal(C("a"), 2)
        assert is_minimal_by_wh2(C("abAB"), 2)
        assert not is_minimal_by_wh2(C("abab"), 2)

    @given(cyclic_words(2, max_size=20))
    def test_against_brute_force(self, w):
        expected = all(
            wh2_images(p, 2).cyclic_length_of(w) > len(w)
            for p in enumerate_wh2(2)
            if not is_inner_wh2(p, 2)
        )
        assert is_strictly_minimal(w, 2) == expected

    def test_euler_words_strictly_minimal(self):
        for k, m in [(2, 3), (3, 2)]:
            assert is_strictly_minimal(euler_word(k, m).w, k)


class TestEquivalence:
    @pytest.mark.parametrize(
        "u,v,verdict",
        [
            ("a", "b", Equivalence.EQUIVALENT),
            ("ab", "a", Equivalence.EQUIVALENT),
            ("abAB", "abab", Equivalence.INEQUIVALENT),
            ("abAB", "baBA", Equivalence.EQUIVALENT),
            ("aab", "abb", Equivalence.EQUIVALENT),
            ("aabb", "abab", Equivalence.INEQUIVALENT),
        ],
    )
    def test_examples(self, u, v, verdict):
        assert automorphic_equivalence(C(u), C(v), k=2).verdict == verdict

    def test_image_is_equivalent(self):
        rng = make_rng(8)
        pairs = enumerate_wh2(2)
        w = sample_cyclically_reduced(12, rng, 2)
        x = w
        for i in rng.integers(0, len(pairs), 3):
            x = wh2_images(pairs[int(i)], 2).apply_cyclic(x)
        assert automorphic_equivalence(w, x, k=2).verdict == Equivalence.EQUIVALENT

    def test_cap(self):
        res = automorphic_equivalence(C("aabAbb"), C("aabbAB"), node_cap=2, k=2)
        assert res.verdict in (Equivalence.CAP_EXCEEDED, Equivalence.INEQUIVALENT)
        if res.verdict == Equivalence.CAP_EXCEEDED:
            assert res.visited == 2
        assert res.to_dict()["verdict"] == res.verdict.value


@pytest.mark.slow
def test_generic_words_strictly_minimal():
    rng = make_rng(500)
    hits = sum(is_strictly_minimal(sample_cyclically_reduced(500, rng, 2), 2) for _ in range(1000))
    assert hits / 1000 >= 0.99
