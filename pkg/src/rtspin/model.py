"""
Dense Hamiltonians for RT-symmetric spin chains and their Hermitian partners.

All chains are periodic.  Basis convention, fixed everywhere in the package:
computational basis, site 1 is the most significant bit, bit 0 is spin up
(sigma^z = +1).

The nearest-neighbour sum runs over bonds (i, i+1), i = 1..N, so an N = 2
ring carries its single bond twice.  The long-range sum runs over
j = i+1 .. i+N/2 with coupling J / d**alpha, d the ring distance; the pair at
d = N/2 is therefore visited from both ends and carries double weight.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionCapError, SpecError

DEFAULT_SITE_CAP = 14

LONG_RANGE_CONVENTION = "ring distance, j=i+1..i+N/2, pair at N/2 double weight"

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY2 = np.eye(2, dtype=complex)


class ModelKind(str, Enum):
    IATXY = "iatxy"
    IXYZ = "ixyz"
    IATXY_LR = "iatxy_lr"
    IXYZ_LR = "ixyz_lr"
    HERMITIAN_ATXY = "hermitian_atxy"
    HERMITIAN_XYZ = "hermitian_xyz"

    @property
    def is_hermitian(self) -> bool:
        return self in (ModelKind.HERMITIAN_ATXY, ModelKind.HERMITIAN_XYZ)

    @property
    def is_long_range(self) -> bool:
        return self in (ModelKind.IATXY_LR, ModelKind.IXYZ_LR)

    @property
    def is_xyz(self) -> bool:
        return self in (ModelKind.IXYZ, ModelKind.IXYZ_LR, ModelKind.HERMITIAN_XYZ)

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise SpecError(f"unknown kind {value!r} (choose from {choices})", "kind") from None


class Boundary(str, Enum):
    PERIODIC = "periodic"


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of one Hamiltonian instance.

    For XYZ kinds ``lambda1`` is the uniform field lambda = h/J.  ``gamma`` is
    the anisotropy magnitude; i-kinds use i*gamma in the xy couplings.
    """

    kind: ModelKind
    n_sites: int
    coupling_j: float = 1.0
    gamma: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    delta: float = 0.0
    alpha: Optional[float] = None
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        try:
            object.__setattr__(self, "boundary", Boundary(str(getattr(self.boundary, "value", self.boundary)).lower()))
        except ValueError:
            raise SpecError(f"unsupported boundary {self.boundary!r}", "boundary") from None

    def validate(self, site_cap: int = DEFAULT_SITE_CAP) -> "ModelSpec":
        n = self.n_sites
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise SpecError(f"n_sites must be an integer, got {n!r}", "n_sites")
        if n < 2 or n % 2:
            raise SpecError(f"n_sites must be even and >= 2, got {n}", "n_sites")
        if n > site_cap:
            raise DimensionCapError(f"n_sites={n} exceeds cap {site_cap}", "n_sites")
        for name in ("coupling_j", "gamma", "lambda1", "lambda2", "delta"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise SpecError(f"{name} must be finite", name)
        if self.coupling_j == 0:
            raise SpecError("coupling_j must be nonzero", "coupling_j")
        if self.gamma < 0:
            raise SpecError("gamma must be >= 0", "gamma")
        if self.kind.is_xyz and self.lambda2 != 0:
            raise SpecError(f"{self.kind.value} has no alternating field; lambda2 must be 0", "lambda2")
        if not self.kind.is_xyz and self.delta != 0:
            raise SpecError(f"{self.kind.value} has no zz coupling; delta must be 0", "delta")
        if self.kind.is_long_range:
            if self.alpha is None:
                raise SpecError(f"{self.kind.value} requires alpha", "alpha")
            if not (np.isfinite(self.alpha) and self.alpha > 0):
                raise SpecError("alpha must be > 0", "alpha")
        elif self.alpha is not None:
            raise SpecError(f"alpha is only valid for long-range kinds, not {self.kind.value}", "alpha")
        return self

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites

    def replace(self, **changes) -> "ModelSpec":
        data = self.to_dict()
        data.update(changes)
        return ModelSpec.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["boundary"] = self.boundary.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SpecError(f"unknown ModelSpec key(s): {', '.join(unknown)}", unknown[0])
        if "kind" not in data or "n_sites" not in data:
            missing = "kind" if "kind" not in data else "n_sites"
            raise SpecError(f"missing required key {missing!r}", missing)
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A dim x dim complex matrix, optionally tagged with the spec that built it."""

    entries: np.ndarray
    spec: Optional[ModelSpec] = None

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        d = m.shape[0]
        if d < 1 or d & (d - 1):
            raise ValueError(f"dimension {d} is not a power of two")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_sites(self) -> int:
        return self.dim.bit_length() - 1

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            return DenseOperator(self.entries @ other.entries)
        return self.entries @ other


def _check_sites(n_sites, site_cap):
    if isinstance(n_sites, bool) or not isinstance(n_sites, (int, np.integer)) or n_sites < 1:
        raise SpecError(f"n_sites must be a positive integer, got {n_sites!r}", "n_sites")
    if n_sites > site_cap:
        raise DimensionCapError(f"n_sites={n_sites} exceeds cap {site_cap}", "n_sites")


def site_spins(n_sites: int) -> np.ndarray:
    """(n_sites, 2**n_sites) array of sigma^z eigenvalues, row s-1 for site s."""
    b = np.arange(2 ** n_sites)
    shifts = n_sites - 1 - np.arange(n_sites)
    bits = (b[None, :] >> shifts[:, None]) & 1
    return 1 - 2 * bits


def pauli_string(n_sites: int, placements: Sequence, site_cap: int = DEFAULT_SITE_CAP) -> DenseOperator:
    """Kronecker product of Pauli matrices at the given 1-indexed sites.

    ``placements`` is a sequence of ``(site, axis)`` with axis in ``x, y, z``;
    unlisted sites carry the identity.  Site 1 is the leftmost factor.
    """
    _check_sites(n_sites, site_cap)
    factors = [IDENTITY2] * n_sites
    seen = set()
    for site, axis in placements:
        if not 1 <= site <= n_sites:
            raise SpecError(f"site {site} out of range 1..{n_sites}", "site")
        if site in seen:
            raise SpecError(f"duplicate site {site}", "site")
        if axis not in SIGMA:
            raise SpecError(f"axis must be one of x, y, z; got {axis!r}", "axis")
        seen.add(site)
        factors[site - 1] = SIGMA[axis]
    return DenseOperator(reduce(np.kron, factors))


def build_parity(n_sites: int, site_cap: int = DEFAULT_SITE_CAP) -> DenseOperator:
    """Product of sigma^z over all sites: (-1)**(number of down spins)."""
    _check_sites(n_sites, site_cap)
    return DenseOperator(np.diag(parity_diagonal(n_sites).astype(complex)))


def parity_diagonal(n_sites: int) -> np.ndarray:
    b = np.arange(2 ** n_sites)
    ones = np.zeros_like(b)
    for s in range(n_sites):
        ones += (b >> s) & 1
    return np.where(ones % 2, -1, 1)


def bond_list(spec: ModelSpec):
    """(site_i, site_j, weight) triples, 1-indexed, weight = J_ij / J."""
    n = spec.n_sites
    if not spec.kind.is_long_range:
        return [(i, i % n + 1, 1.0) for i in range(1, n + 1)]
    bonds = []
    for i in range(1, n + 1):
        for j in range(i + 1, i + n // 2 + 1):
            d = min(j - i, n - (j - i))
            bonds.append((i, (j - 1) % n + 1, 1.0 / d ** spec.alpha))
    return bonds


def build_hamiltonian(spec: ModelSpec, site_cap: int = DEFAULT_SITE_CAP) -> DenseOperator:
    """Dense matrix of the Hamiltonian described by ``spec``.

    Each bond contributes J_ij[(1+a)/4 xx + (1-a)/4 yy + delta/4 zz] with
    a = i*gamma (a = gamma for Hermitian kinds); site i gets the field
    (h1 + (-1)**i h2)/2 sigma^z with h_k = lambda_k * J.
    """
    spec.validate(site_cap)
    n, J = spec.n_sites, spec.coupling_j
    dim = spec.dim
    aniso = spec.gamma if spec.kind.is_hermitian else 1j * spec.gamma
    spins = site_spins(n)
    states = np.arange(dim)

    H = np.zeros((dim, dim), dtype=complex)
    diag = np.zeros(dim)
    for i, j, w in bond_list(spec):
        # xx + yy flip both spins; amplitude a/2 on aligned pairs, 1/2 on anti-aligned
        flipped = states ^ ((1 << (n - i)) | (1 << (n - j)))
        aligned = spins[i - 1] == spins[j - 1]
        H[flipped, states] += J * w * np.where(aligned, aniso / 2, 0.5)
        if spec.delta:
            diag += J * w * spec.delta / 4 * spins[i - 1] * spins[j - 1]
    h1, h2 = spec.lambda1 * J, spec.lambda2 * J
    for i in range(1, n + 1):
        diag += (h1 + (-1) ** i * h2) / 2 * spins[i - 1]
    H[states, states] += diag
    return DenseOperator(H, spec)


def rotation_operator(n_sites: int) -> DenseOperator:
    """R = exp(-i pi/4 sum_j sigma^z_j); diagonal in the computational basis."""
    mz = site_spins(n_sites).sum(axis=0)
    return DenseOperator(np.diag(np.exp(-1j * math.pi / 4 * mz)))


def rt_commutator_norm(op: DenseOperator) -> float:
    """max-norm of (RT)H - H(RT) with T complex conjugation, i.e. R H* - H R."""
    r = np.exp(-1j * math.pi / 4 * site_spins(op.n_sites).sum(axis=0))
    H = op.entries
    return float(np.abs(r[:, None] * H.conj() - H * r[None, :]).max())


def parity_commutator_norm(op: DenseOperator) -> float:
    p = parity_diagonal(op.n_sites)
    H = op.entries
    return float(np.abs(p[:, None] * H - H * p[None, :]).max())
