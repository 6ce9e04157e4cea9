"""Shared oracles for the test suite."""

import math

import numpy as np
import pytest

from rtspin.model import ModelSpec, pauli_string

# Acceptance verdicts, filled in by tests/test_acceptance.py and echoed once
# at the end of the session so each criterion gets a single pass/fail line.
ACCEPTANCE_LINES = {}


def reference_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Literal Kronecker-product assembly of the bond and field terms.

    Deliberately slow and independent of the bitwise builder: every term is
    a Pauli string with the coefficient read straight off the model
    definition.
    """
    n, J = spec.n_sites, spec.coupling_j
    a = spec.gamma if spec.kind.is_hermitian else 1j * spec.gamma
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    if spec.kind.is_long_range:
        pairs = []
        for i in range(1, n + 1):
            for j in range(i + 1, i + n // 2 + 1):
                d = min(j - i, n - (j - i))
                pairs.append((i, (j - 1) % n + 1, J / d ** spec.alpha))
    else:
        pairs = [(i, i % n + 1, J) for i in range(1, n + 1)]
    for i, j, c in pairs:
        H += c * (1 + a) / 4 * pauli_string(n, [(i, "x"), (j, "x")]).entries
        H += c * (1 - a) / 4 * pauli_string(n, [(i, "y"), (j, "y")]).entries
        H += c * spec.delta / 4 * pauli_string(n, [(i, "z"), (j, "z")]).entries
    for i in range(1, n + 1):
        h = (spec.lambda1 + (-1) ** i * spec.lambda2) * J
        H += h / 2 * pauli_string(n, [(i, "z")]).entries
    return H


def random_spec(rng, kind, n_sites):
    from rtspin.model import ModelKind

    kind = ModelKind.parse(kind)
    data = dict(
        kind=kind,
        n_sites=n_sites,
        coupling_j=float(rng.choice([-1.3, 0.7, 1.0])),
        gamma=float(rng.uniform(0, 1.5)),
        lambda1=float(rng.uniform(-2, 2)),
    )
    if kind.is_xyz:
        data["delta"] = float(rng.uniform(-1, 1.5))
    else:
        data["lambda2"] = float(rng.uniform(-1.5, 1.5))
    if kind.is_long_range:
        data["alpha"] = float(rng.uniform(0.5, 3))
    return ModelSpec(**data)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[name])


SQRT2 = math.sqrt(2)
