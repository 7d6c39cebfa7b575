import itertools

import numpy as np
import pytest

# (criterion, passed, detail) lines collected by the acceptance suite
CRITERIA = []


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    CRITERIA.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERIA):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_statevector(sites):
    """Amplitudes Tr[A_j1 ... A_jn] by explicit enumeration."""
    sites = [np.asarray(a) for a in sites]
    d = sites[0].shape[0]
    out = []
    for js in itertools.product(range(d), repeat=len(sites)):
        m = np.eye(sites[0].shape[1], dtype=complex)
        for a, j in zip(sites, js):
            m = m @ a[j]
        out.append(np.trace(m))
    return np.array(out)


def pauli():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0 + 0j, -1.0])
    return x, y, z


def site_operator(op, site, n, d=2):
    """Dense operator acting with ``op`` on the 1-based ``site``."""
    mats = [np.eye(d)] * n
    mats[site - 1] = op
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def random_state_config(mode, n, d, D, rng, site=1):
    """StateConfig with random sites; in haar_split mode ``site`` is split."""
    from barrenbench.grad import StateConfig
    from barrenbench.unitary import HaarSplitSite, default_split_generator, haar_batch, random_param_site

    N = d * D
    if mode == "theta":
        sites = tuple(random_param_site(N, rng) for _ in range(n))
    elif mode == "haar_split":
        us = list(haar_batch(N, n + 1, rng))
        sites = list(us[:n])
        sites[site - 1] = HaarSplitSite(us[site - 1], us[n], default_split_generator(N))
    else:
        sites = tuple(rng.uniform(-0.5, 0.5, (d, D, D)) + 1j * rng.uniform(-0.5, 0.5, (d, D, D))
                      for _ in range(n))
    return StateConfig(mode, d, D, tuple(sites))
