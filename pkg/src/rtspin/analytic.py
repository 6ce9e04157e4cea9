"""
Closed-form machinery for the nearest-neighbour iATXY chain and the
factorization-surface predictions for every model kind.

The single-particle problem at momentum k is the 4x4 block returned by
:func:`momentum_block`.  Its eigenvalues are +-E_+ and +-E_- with

    E_pm^2 = l1^2 + l2^2 + cos^2 k - g^2 sin^2 k
             pm 2 sqrt(l1^2 l2^2 + l1^2 cos^2 k - l2^2 g^2 sin^2 k)

(l = lambda, g = gamma).  The inner radicand can go negative for small l1,
in which case E_pm^2 is complex and the spectrum is certainly not real.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import SpecError
from .model import ModelKind


class ParitySector(str, Enum):
    EVEN = "even"  # mu = +1, k = 2 pi (p + 1/2) / N
    ODD = "odd"  # mu = -1, k = 2 pi p / N


@dataclass(frozen=True, eq=False)
class MomentumBlock:
    k: float
    entries: np.ndarray
    parity_sector: Optional[ParitySector] = None

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.entries)


@dataclass(frozen=True)
class SurfacePrediction:
    value: float
    kind: ModelKind
    inputs: dict = field(default_factory=dict)
    hermitian_value: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "hermitian_value": self.hermitian_value,
            "kind": self.kind.value,
            "inputs": dict(self.inputs),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _wrap(k: float) -> float:
    """Map k into (-pi, pi]."""
    k = math.remainder(k, 2 * math.pi)
    return math.pi if k == -math.pi else k


def momentum_block(k, lambda1, lambda2, gamma, parity_sector=None) -> MomentumBlock:
    c, s = math.cos(k), math.sin(k)
    l1, l2, g = lambda1, lambda2, gamma
    m = np.array(
        [
            [l1 + c, -g * s, 0, -l2],
            [g * s, -l1 - c, l2, 0],
            [0, l2, c - l1, -g * s],
            [-l2, 0, g * s, -c + l1],
        ],
        dtype=complex,
    )
    if parity_sector is not None:
        parity_sector = ParitySector(parity_sector)
    return MomentumBlock(_wrap(k), m, parity_sector)


def dispersion_squared(k, lambda1, lambda2, gamma):
    """(E_+^2, E_-^2) as complex numbers; accepts arrays for ``k``."""
    c2 = np.cos(k) ** 2
    s2 = np.sin(k) ** 2
    l1s, l2s, gs = lambda1 ** 2, lambda2 ** 2, gamma ** 2
    outer = l1s + l2s + c2 - gs * s2
    inner = np.sqrt(np.asarray(l1s * l2s + l1s * c2 - l2s * gs * s2, dtype=complex))
    return outer + 2 * inner, outer - 2 * inner


def dispersion(k, lambda1, lambda2, gamma):
    """(E_+, E_-), principal square roots of :func:`dispersion_squared`."""
    ep2, em2 = dispersion_squared(k, lambda1, lambda2, gamma)
    return np.sqrt(ep2), np.sqrt(em2)


def momentum_grid(n_sites: int, sector) -> np.ndarray:
    """Allowed momenta in (-pi, pi] for the given parity sector of an N-site ring."""
    sector = ParitySector(sector)
    p = np.arange(n_sites)
    shift = 0.5 if sector is ParitySector.EVEN else 0.0
    k = 2 * np.pi * (p + shift) / n_sites
    return np.array(sorted(_wrap(x) for x in k))


def grid_spectrum_is_real(n_sites, lambda1, lambda2, gamma, tol=1e-9) -> bool:
    """Reality test of the finite ring from the single-particle energies.

    Both parity sectors count, since the many-body spectrum is their union.
    """
    ks = np.concatenate([momentum_grid(n_sites, s) for s in ParitySector])
    ep2, em2 = dispersion_squared(ks, lambda1, lambda2, gamma)
    both = np.concatenate([ep2, em2])
    return bool(np.all(np.abs(both.imag) <= tol) and np.all(both.real >= -tol))


def min_dispersion_squared(lambda1, lambda2, gamma, n_scan=4001):
    """Continuum minimum over k in [0, pi] of Re E_-^2, returning ``(k, value)``."""
    ks = np.linspace(0.0, math.pi, n_scan)
    vals = dispersion_squared(ks, lambda1, lambda2, gamma)[1].real
    i = int(np.argmin(vals))
    lo, hi = ks[max(i - 1, 0)], ks[min(i + 1, n_scan - 1)]
    if lo == hi:
        return float(ks[i]), float(vals[i])

    def f(k):
        return float(dispersion_squared(k, lambda1, lambda2, gamma)[1].real)

    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    if res.fun <= vals[i]:
        return float(res.x), float(res.fun)
    return float(ks[i]), float(vals[i])


def extremal_momentum(lambda1, lambda2, gamma) -> Optional[float]:
    """Momentum in [0, pi] minimizing E_-^2, found numerically; None at an endpoint."""
    k, _ = min_dispersion_squared(lambda1, lambda2, gamma)
    if k < 1e-6 or k > math.pi - 1e-6:
        return None
    return k


def lattice_sum(alpha: float, n_sites: int) -> float:
    """sum_{d=1}^{N/2} d**-alpha, the per-site coupling weight of the long-range ring."""
    if n_sites < 2 or n_sites % 2:
        raise SpecError(f"n_sites must be even and >= 2, got {n_sites}", "n_sites")
    return float(sum(d ** -float(alpha) for d in range(1, n_sites // 2 + 1)))


def reality_threshold(kind, lambda2_or_delta, gamma, alpha=None, n_sites=None) -> SurfacePrediction:
    """Field above which the RT-symmetric spectrum is predicted real.

    The Hermitian factorization field of the same kind is reported alongside,
    or None when its radicand is negative.  Hermitian kinds are accepted and
    return the prediction for their RT-symmetric partner.
    """
    kind = ModelKind.parse(kind)
    x, g2 = float(lambda2_or_delta), float(gamma) ** 2
    base = (1 + x) ** 2 if kind.is_xyz else 1 + x ** 2

    scale = 1.0
    inputs = {"gamma": float(gamma)}
    inputs["delta" if kind.is_xyz else "lambda2"] = x
    if kind.is_long_range:
        if alpha is None or n_sites is None:
            missing = "alpha" if alpha is None else "n_sites"
            raise SpecError(f"{kind.value} prediction needs {missing}", missing)
        scale = lattice_sum(alpha, n_sites)
        inputs.update(alpha=float(alpha), n_sites=int(n_sites))

    value = math.sqrt(base + g2) * scale
    herm = base - g2
    hermitian_value = math.sqrt(herm) * scale if herm >= 0 else None
    return SurfacePrediction(value, kind, inputs, hermitian_value)


def in_unbroken_region(lambda1, lambda2, gamma) -> bool:
    """Predicted reality of the nearest-neighbour iATXY spectrum.

    Only the branch l1 >= sqrt(1 + l2^2 + g^2) with l1 > l2 is admissible; the
    would-be branch l1 < l2 needs l1^2 - l2^2 > 1 + g^2 and is empty.
    """
    threshold = math.sqrt(1 + lambda2 ** 2 + gamma ** 2)
    return lambda1 > abs(lambda2) and lambda1 >= threshold
