import numpy as np
import pytest

from qfh.gf2code import LinearCode, generate_random_linear_code
from qfh.qhash import FingerprintHash

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def bits_of(text):
    return [int(ch) for ch in text]


def hamming(a, b):
    return sum(x != y for x, y in zip(a, b))


def gf2_encode(generator, word):
    """Row-by-row GF(2) dot products in plain Python; test oracle."""
    bits = bits_of(word) if isinstance(word, str) else list(word)
    return [sum(int(g) & b for g, b in zip(row, bits)) % 2 for row in generator]


def all_words(m):
    return [format(v, f"0{m}b") for v in range(1 << m)]


@pytest.fixture(scope="session")
def code42():
    return generate_random_linear_code(4, 4, 42)


@pytest.fixture(scope="session")
def hash42(code42):
    return FingerprintHash(code42)


@pytest.fixture
def repetition_code():
    def make(l):
        return LinearCode(m=1, l=l, generator=np.ones((l, 1), dtype=np.uint8))
    return make



def orthogonal_instance(n, l=4, k=0):
    """epsilon = 0 setting: repetition code (m = 1), "1" at index k, "0" elsewhere."""
    code = LinearCode(m=1, l=l, generator=np.ones((l, 1), dtype=np.uint8))
    V = ["0"] * n
    V[k] = "1"
    return V, "1", FingerprintHash(code)
