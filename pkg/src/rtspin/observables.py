"""
Zero-temperature (large-beta) states, two-site reductions and their
entanglement and parity diagnostics.

For a non-Hermitian H with real spectrum the canonical state
exp(-beta H) / Tr exp(-beta H) is built from right eigenvectors and the
inverse eigenvector matrix, so it is generally not Hermitian.  It is used
as is: no symmetrization anywhere in this module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .eig import DEFAULT_TOL, SpectrumReport, eigensystem
from .errors import NumericalError, SpecError
from .model import IDENTITY2, SIGMA, DenseOperator, parity_diagonal

DEFAULT_BETA = 200.0
CONDITION_LIMIT = 1e12
# relative Boltzmann weights below this are dropped from rho
WEIGHT_CUTOFF = 1e-20

AXES = ("x", "y", "z")
_PAULI = [SIGMA[a] for a in AXES]


@dataclass(frozen=True, eq=False)
class ThermalState:
    beta: float
    rho: np.ndarray
    trace_error: float
    condition: float = 1.0
    ill_conditioned: bool = False

    @property
    def n_sites(self) -> int:
        return self.rho.shape[0].bit_length() - 1


@dataclass(frozen=True, eq=False)
class TwoSiteState:
    """Two-site reduced state with its Pauli-basis coefficients.

    m, m_prime and c are complex in general; they are real whenever rho12 is
    Hermitian.
    """

    rho12: np.ndarray
    m: np.ndarray
    m_prime: np.ndarray
    c: np.ndarray
    source_sites: Tuple[int, int] = (1, 2)

    @classmethod
    def from_matrix(cls, rho12, source_sites=(1, 2)) -> "TwoSiteState":
        rho12 = np.asarray(rho12, dtype=complex)
        m, mp, c = pauli_coefficients(rho12)
        return cls(rho12, m, mp, c, tuple(source_sites))

    def rebuild(self) -> np.ndarray:
        return pauli_rebuild(self.m, self.m_prime, self.c)

    def coefficient(self, name: str) -> complex:
        """Look up e.g. ``'m_y'``, ``"m'_y"``, ``'C_xy'``."""
        if name.startswith("C_"):
            i, j = (AXES.index(a) for a in name[2:])
            return complex(self.c[i, j])
        axis = AXES.index(name[-1])
        vec = self.m_prime if name.startswith("m'") or name.startswith("mp") else self.m
        return complex(vec[axis])


def pauli_coefficients(rho12: np.ndarray):
    """m_i = Tr(rho s_i x I), m'_i = Tr(rho I x s_i), C_ij = Tr(rho s_i x s_j)."""
    m = np.array([np.trace(rho12 @ np.kron(s, IDENTITY2)) for s in _PAULI])
    mp = np.array([np.trace(rho12 @ np.kron(IDENTITY2, s)) for s in _PAULI])
    c = np.array([[np.trace(rho12 @ np.kron(si, sj)) for sj in _PAULI] for si in _PAULI])
    return m, mp, c


def pauli_rebuild(m, m_prime, c) -> np.ndarray:
    out = np.kron(IDENTITY2, IDENTITY2).astype(complex)
    for i, si in enumerate(_PAULI):
        out += m[i] * np.kron(si, IDENTITY2) + m_prime[i] * np.kron(IDENTITY2, si)
        for j, sj in enumerate(_PAULI):
            out += c[i, j] * np.kron(si, sj)
    return out / 4


def thermal_state(op: DenseOperator, beta: float = DEFAULT_BETA, tol: float = DEFAULT_TOL,
                  use_symmetry: bool = True, require_real: bool = True) -> ThermalState:
    """rho = V exp(-beta D) V^-1 / Z from the eigendecomposition of ``op``.

    Energies are shifted by the lowest one before exponentiation.  Only the
    real parts of the eigenvalues enter the weights; with ``require_real`` the
    precheck guarantees the imaginary parts are below the reality tolerance.
    ``require_real=False`` admits broken-phase spectra, where the weights
    become |exp(-beta E)| and each complex-conjugate pair enters with equal
    weight.
    """
    if not beta > 0:
        raise SpecError("beta must be > 0", "beta")
    systems = eigensystem(op, use_symmetry)
    report = SpectrumReport.from_eigenvalues(np.concatenate([w for _, w, _ in systems]), tol)
    if require_real and not report.is_real:
        raise NumericalError(f"thermal state needs a real spectrum (max |Im E| = {report.max_abs_imag:.3g})")

    e_min = min(float(w.real.min()) for _, w, _ in systems)
    dim = op.dim
    rho = np.zeros((dim, dim), dtype=complex)
    z = 0.0
    worst = 1.0
    for iso, w, v in systems:
        weights = np.exp(-beta * (w.real - e_min))
        z += weights.sum()
        keep = weights > WEIGHT_CUTOFF
        if not keep.any():
            continue
        worst = max(worst, np.linalg.cond(v))
        vinv = np.linalg.inv(v)
        block = (v[:, keep] * weights[keep]) @ vinv[keep, :]
        if iso is None:
            rho += block
        else:
            left = iso @ block  # dim x d
            rho += (iso.conj() @ left.T).T
    rho /= z
    tr = np.trace(rho)
    trace_error = float(abs(tr - 1))
    rho /= tr
    ill = worst > CONDITION_LIMIT
    if ill:
        warnings.warn(f"eigenvector matrix condition number {worst:.3g} exceeds {CONDITION_LIMIT:.0e}",
                      RuntimeWarning, stacklevel=2)
    return ThermalState(float(beta), rho, trace_error, float(worst), ill)


def partial_trace_two_site(rho, n_sites: int, site_a: int, site_b: int) -> TwoSiteState:
    """Reduce an N-site density matrix to sites a < b (1-indexed, site a first)."""
    rho = np.asarray(getattr(rho, "rho", rho))
    if rho.shape != (2 ** n_sites, 2 ** n_sites):
        raise SpecError(f"rho shape {rho.shape} does not match {n_sites} sites", "rho")
    if site_a == site_b:
        raise SpecError("site_a and site_b must differ", "site_b")
    if not (1 <= site_a <= n_sites and 1 <= site_b <= n_sites):
        raise SpecError(f"sites must lie in 1..{n_sites}", "site_a")
    if site_a > site_b:
        raise SpecError("expected site_a < site_b", "site_a")
    a, b = site_a - 1, site_b - 1
    rest = [s for s in range(n_sites) if s not in (a, b)]
    t = rho.reshape([2] * (2 * n_sites))
    order = [a, b] + rest + [n_sites + a, n_sites + b] + [n_sites + s for s in rest]
    r = 2 ** len(rest)
    t = t.transpose(order).reshape(4, r, 4, r)
    rho12 = np.trace(t, axis1=1, axis2=3)
    return TwoSiteState.from_matrix(rho12, (site_a, site_b))


def partial_transpose_b(state) -> np.ndarray:
    """Transpose on the second tensor factor of a 4x4 two-site matrix."""
    m = np.asarray(getattr(state, "rho12", state))
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def log_negativity(state, return_raw: bool = False):
    """log2 of the trace norm of the partial transpose, clipped at zero.

    The trace norm is the sum of singular values, which stays meaningful for
    the non-Hermitian reduced states of RT-symmetric chains.
    """
    sv = np.linalg.svd(partial_transpose_b(state), compute_uv=False)
    raw = float(np.log2(sv.sum()))
    value = max(raw, 0.0)
    return (value, raw) if return_raw else value


def parity_expectation(rho, n_sites: int) -> float:
    rho = np.asarray(getattr(rho, "rho", rho))
    val = np.sum(np.diagonal(rho) * parity_diagonal(n_sites))
    if abs(val.imag) > 1e-8:
        raise NumericalError(f"parity expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def state_parity(vec: np.ndarray, n_sites: int) -> float:
    """<psi|xi|psi> / <psi|psi> for a pure state vector."""
    p = parity_diagonal(n_sites)
    w = np.abs(vec) ** 2
    return float(np.sum(w * p) / np.sum(w))
