import itertools
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hkforge.staircase import Ring, make_ideal  # noqa: E402

settings.register_profile(
    "hkforge", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("hkforge")

MAX_DEG = 6


def _exponents(n, max_deg=MAX_DEG):
    return [e for e in itertools.product(range(max_deg + 1), repeat=n) if sum(e) <= max_deg]


EXPONENTS = {n: _exponents(n) for n in (1, 2, 3)}


@st.composite
def rings(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    p = draw(st.sampled_from([2, 3]))
    return Ring.standard(p, n)


@st.composite
def ideals_in(draw, ring, min_size=1, max_size=4):
    gens = draw(st.lists(st.sampled_from(EXPONENTS[ring.nvars]), min_size=min_size,
                         max_size=max_size))
    return make_ideal(ring, gens)


@st.composite
def ring_and_ideal(draw, max_n=3, nonunit=False):
    R = draw(rings(max_n))
    I = draw(ideals_in(R))
    if nonunit:
        I = make_ideal(R, [g for g in I.gens if any(g)] or [(1,) + (0,) * (R.nvars - 1)])
    return R, I


@st.composite
def ring_and_two_ideals(draw, max_n=3):
    R = draw(rings(max_n))
    return R, draw(ideals_in(R)), draw(ideals_in(R))


@pytest.fixture
def R2():
    return Ring(2, ("x", "y"))


@pytest.fixture
def R3():
    return Ring(2, ("x", "y", "z"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
