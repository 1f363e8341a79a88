import hypothesis.strategies as st
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@st.composite
def polyominoes(draw, min_size=1, max_size=8):
    """Connected cell sets grown one random neighbour at a time."""
    size = draw(st.integers(min_size, max_size))
    cells = [(0, 0)]
    while len(cells) < size:
        base = draw(st.sampled_from(cells))
        dx, dy = draw(st.sampled_from(STEPS))
        nb = (base[0] + dx, base[1] + dy)
        if nb not in cells:
            cells.append(nb)
    return cells


@pytest.fixture
def plus():
    from netcon.experiments import PLUS
    return list(PLUS)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
