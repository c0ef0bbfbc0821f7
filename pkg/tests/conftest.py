import pytest
from hypothesis import settings, strategies as st

from whitehead.core import CyclicWord, alphabet

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(name, ok, detail=""):
        ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


def letters(k):
    return st.sampled_from(alphabet(k))


@st.composite
def raw_words(draw, k=2, max_size=30):
    return draw(st.lists(letters(k), max_size=max_size))


@st.composite
def reduced_words(draw, k=2, min_size=0, max_size=30):
    n = draw(st.integers(min_size, max_size))
    out = []
    for _ in range(n):
        x = draw(letters(k).filter(lambda y: not out or y != -out[-1]))
        out.append(x)
    return tuple(out)


@st.composite
def cyclic_words(draw, k=2, min_size=1, max_size=30):
    w = draw(reduced_words(k, min_size, max_size).filter(
        lambda w: len(w) >= min_size and (len(w) == 1 or w[-1] != -w[0])))
    return CyclicWord(w)
