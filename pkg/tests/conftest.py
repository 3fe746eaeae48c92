import itertools

import numpy as np
import pytest

from nopurify import boxworld as bw

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def nonsignalling_vertices():
    """The 8 PR-type and 16 deterministic local extremal non-signalling boxes."""
    verts = [bw.deterministic_box(f, g) for f in bw.LOCAL_FUNCTIONS for g in bw.LOCAL_FUNCTIONS]
    for al, be, ga in itertools.product((0, 1), repeat=3):
        t = np.zeros((2, 2, 2, 2))
        for x, y, a, b in bw.XYAB:
            if a ^ b == (x & y) ^ (al & x) ^ (be & y) ^ ga:
                t[x, y, a, b] = 0.5
        verts.append(t)
    return verts


def random_nonsignalling_box(rng):
    verts = nonsignalling_vertices()
    w = rng.dirichlet(np.ones(len(verts)))
    return sum(wi * v for wi, v in zip(w, verts))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
