import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stalab import algebra as ga
from stalab.boosts import rotor_from_velocity

ACCEPTANCE_LINES: list[str] = []

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
multivectors = arrays(np.float64, (ga.N_BLADES,), elements=finite)
velocities = st.floats(-0.95, 0.95, allow_nan=False)
angles = st.floats(-3.0, 3.0, allow_nan=False)


@st.composite
def rotors(draw):
    """Boost along g1 composed with a rotation in a random coordinate plane."""
    R = rotor_from_velocity(draw(velocities))
    i, j = draw(st.sampled_from([(2, 1), (3, 2), (1, 3)]))
    S = ga.exp_bivector(ga.blade(i, j, coeff=0.5 * draw(angles)))
    return ga.geometric_product(R, S)


def grade_part(k):
    return multivectors.map(lambda a: ga.grade_project(a, k))


@pytest.fixture
def events():
    """Events with |x⃗| >= 0.8, away from every shipped singular worldline."""
    rng = np.random.default_rng(12345)
    x = rng.uniform(-1.5, 1.5, size=(40, 4))
    x[:, 1:] += 0.8 * np.sign(x[:, 1:])
    return x


def record_acceptance(line: str) -> None:
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
