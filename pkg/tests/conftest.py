import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from slidegal.problem import BoundaryInfluence, ProblemSpec, ScalarField

settings.register_profile(
    "default", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

coef = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


@st.composite
def fields(draw, kinds=("poly", "cosine"), max_len=4):
    kind = draw(st.sampled_from(kinds))
    coeffs = draw(st.lists(coef, min_size=1, max_size=max_len))
    return ScalarField(kind, tuple(coeffs))


@st.composite
def gammas(draw, max_len=4):
    coeffs = draw(st.lists(coef, min_size=1, max_size=max_len))
    k = draw(st.integers(0, len(coeffs) - 1))
    if abs(coeffs[k]) < 0.1:
        coeffs[k] = 1.0
    return ScalarField.cosine(coeffs)


@st.composite
def boundaries(draw):
    gl = draw(st.floats(-2.0, 2.0))
    gr = draw(st.floats(-2.0, 2.0))
    if math.hypot(gl, gr) < 0.1:
        gr = 1.0
    return BoundaryInfluence(gl, gr)


@st.composite
def specs(draw, q_kinds=("poly", "cosine"), T=1.0):
    return ProblemSpec(
        q=draw(fields(q_kinds)),
        g=draw(boundaries()),
        gamma=draw(gammas()),
        y0=draw(fields()),
        horizon_T=T,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion and return the outcome."""
    def record(name: str, ok: bool, detail: str) -> bool:
        line = f"{name} {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
