import numpy as np
import pytest
from hypothesis import strategies as st

from trendlab import ModelParams

P1 = ModelParams(0.3, 0.2, 0.6, 0.1)
P2 = ModelParams(0.25, 0.5, 1.0, 0.0)
P3 = ModelParams(0.2, 0.6, 1.0, 0.0, 1, 0)
NEGATIVE = ModelParams(0.5, 0.3, 0.2, 0.6)


@st.composite
def valid_params(draw, max_seed=3):
    """Random admissible parameter sets (b <= a when beta > 0)."""
    a = draw(st.floats(0.0, 1.0))
    b = draw(st.floats(0.0, 1.0 - a))
    alpha = draw(st.floats(0.0, 1.0))
    beta = draw(st.floats(0.0, 1.0 - alpha))
    if beta > 0 and b > a:
        b = a * draw(st.floats(0.0, 1.0))
    n0 = draw(st.integers(0, max_seed))
    m0 = draw(st.integers(0 if n0 else 1, max_seed))
    return ModelParams(a, b, alpha, beta, n0, m0)


def random_diffusive(rng: np.random.Generator, count: int):
    """Diffusive parameter sets with lambda2 bounded away from 1/2."""
    out = []
    while len(out) < count:
        a = rng.uniform(0.0, 1.0)
        b = rng.uniform(0.0, 1.0 - a)
        alpha = rng.uniform(0.0, 1.0)
        beta = rng.uniform(0.0, 1.0 - alpha)
        if beta > 0 and b > a:
            continue
        p = ModelParams(a, b, alpha, beta)
        if p.lambda2 < 0.45:
            out.append(p)
    return out


@pytest.fixture
def p1():
    return P1


#: criterion -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split(".")[0])):
        passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
