import numpy as np
import pytest

from factorizable.matrix_core import haar_unitary

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, d):
    z = random_complex(rng, d, d)
    return (z + z.conj().T) / 2


def random_block_algebra_generators(rng, d):
    """Generators of ``v ((+)_j M_{m_j} (x) 1_{k_j}) v*`` for a random shape fitting in M_d."""
    parts = []
    left = d
    while left:
        m = int(rng.integers(1, min(left, 3) + 1))
        k = int(rng.integers(1, left // m + 1))
        parts.append((m, k))
        left -= m * k
    gens = []
    off = 0
    for m, k in parts:
        for _ in range(2):
            g = np.zeros((d, d), dtype=complex)
            g[off:off + m * k, off:off + m * k] = np.kron(random_complex(rng, m, m), np.eye(k))
            gens.append(g)
        off += m * k
    v = haar_unitary(d, rng)
    return [v @ g @ v.conj().T for g in gens], parts


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
