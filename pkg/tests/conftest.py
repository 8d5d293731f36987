import time

import numpy as np
import pytest

from bochner_forge.classify import build_pair, scan_family
from bochner_forge.darboux import search_factorizations
from bochner_forge.ops import DiffOp2
from bochner_forge.quad import identity_weight

LEGENDRE_D = DiffOp2(A11=-2.0 * np.eye(2), A10=np.zeros((2, 2)), A0=np.zeros((2, 2)))

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = {}
SCAN_SECONDS = {}
DARBOUX_SECONDS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])


@pytest.fixture(scope="session")
def legendre():
    return identity_weight(), LEGENDRE_D


@pytest.fixture(scope="session")
def scans():
    """Seed-0 scans, ten accepted points per family."""
    out = {}
    for f in ("I", "II", "III"):
        t0 = time.perf_counter()
        out[f] = scan_family(f, 10, seed=0)
        SCAN_SECONDS[f] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def pairs(scans):
    return {f: [build_pair(p) for p in s.accepted] for f, s in scans.items()}


@pytest.fixture(scope="session")
def darboux_search():
    t0 = time.perf_counter()
    res = search_factorizations(n_accept=5, seed=0)
    DARBOUX_SECONDS.append(time.perf_counter() - t0)
    return res


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
