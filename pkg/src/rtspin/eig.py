"""
Full-spectrum diagonalization of (generally non-normal) chain Hamiltonians,
reality classification, onset detection sweeps and the long-range
sufficiency check.

Every eigenvalue of the matrix is computed with a dense LAPACK solver.  When
the operator leaves the parity x two-site-translation sectors invariant
(checked per call), the solver runs block by block; the union of the block
spectra is the full spectrum.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from .analytic import reality_threshold
from .errors import NumericalError, SpecError
from .model import DenseOperator, ModelSpec, build_hamiltonian
from .symmetry import block_decompose

DEFAULT_TOL = 1e-7
DEFAULT_STEP = 0.05
DEGENERACY_WINDOW = 1e-8

SWEEP_CSV_HEADER = "control,predicted,detected,difference,n_sites,gamma,step"


class SweepParam(str, Enum):
    LAMBDA1 = "lambda1"  # uniform field of ATXY kinds
    LAMBDA = "lambda"  # uniform field of XYZ kinds


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    max_abs_imag: float
    scale: float
    is_real: bool
    tol_used: float
    low_lying: Optional[int] = None

    @classmethod
    def from_eigenvalues(cls, ev, tol, low_lying=None) -> "SpectrumReport":
        """Classify ``ev``; with ``low_lying`` only that many lowest-Re values count."""
        ev = np.asarray(ev, dtype=complex)
        ev = ev[np.lexsort((ev.imag, ev.real))]
        judged = ev if low_lying is None else ev[: int(low_lying)]
        max_imag = float(np.abs(judged.imag).max()) if judged.size else 0.0
        scale = float(np.abs(ev).max()) if ev.size else 0.0
        ev.setflags(write=False)
        return cls(ev, max_imag, scale, max_imag <= tol * max(1.0, scale), float(tol), low_lying)

    def summary(self) -> dict:
        return {
            "n_eigenvalues": int(self.eigenvalues.size),
            "max_abs_imag": self.max_abs_imag,
            "scale": self.scale,
            "is_real": self.is_real,
            "tol_used": self.tol_used,
            "low_lying": self.low_lying,
        }

    def to_dict(self) -> dict:
        d = self.summary()
        d["eigenvalues"] = [[float(z.real), float(z.imag)] for z in self.eigenvalues]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class SweepRecord:
    control: float
    predicted: float
    detected: Optional[float]
    difference: Optional[float]
    n_sites: int
    gamma: float
    step: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def csv_row(self) -> str:
        def fmt(x):
            return "" if x is None else f"{x:.12g}"

        return ",".join(
            [fmt(self.control), fmt(self.predicted), fmt(self.detected), fmt(self.difference),
             str(self.n_sites), fmt(self.gamma), fmt(self.step)]
        )


def _eigvals(m: np.ndarray) -> np.ndarray:
    try:
        return sla.eigvals(m, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc


def _eig(m: np.ndarray):
    try:
        return sla.eig(m, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc


def sector_blocks(op: DenseOperator, use_symmetry: bool = True):
    """``[(isometry or None, block)]``; a single full block when sectors don't apply."""
    if use_symmetry and op.n_sites >= 2:
        blocks = block_decompose(op.entries)
        if blocks is not None:
            return [(sec.isometry, b) for sec, b in blocks]
    return [(None, np.array(op.entries))]


def diagonalize(op: DenseOperator, tol: float = DEFAULT_TOL, use_symmetry: bool = True,
                low_lying: Optional[int] = None) -> SpectrumReport:
    """All eigenvalues of ``op`` and whether they are real.

    The whole spectrum is always computed.  ``low_lying`` restricts the
    reality verdict to that many eigenvalues of smallest real part, which
    mimics what an extremal Krylov solver would see; leave it unset for the
    full-spectrum classification.
    """
    if not tol > 0:
        raise SpecError("tol must be > 0", "tol")
    if low_lying is not None and low_lying < 1:
        raise SpecError("low_lying must be >= 1", "low_lying")
    ev = np.concatenate([_eigvals(b) for _, b in sector_blocks(op, use_symmetry)])
    return SpectrumReport.from_eigenvalues(ev, tol, low_lying)


def eigensystem(op: DenseOperator, use_symmetry: bool = True):
    """Right eigenpairs per sector: list of ``(isometry or None, eigenvalues, vectors)``.

    Full-space eigenvectors are ``isometry @ vectors``.
    """
    out = []
    for iso, b in sector_blocks(op, use_symmetry):
        w, v = _eig(b)
        out.append((iso, w, v))
    return out


def ground_state(op: DenseOperator, tol: float = DEFAULT_TOL, use_symmetry: bool = True):
    """Eigenpair with the smallest real part, plus its degeneracy.

    Refuses non-real spectra.  The vector has unit Euclidean norm.
    """
    systems = eigensystem(op, use_symmetry)
    report = SpectrumReport.from_eigenvalues(np.concatenate([w for _, w, _ in systems]), tol)
    if not report.is_real:
        raise NumericalError(
            f"spectrum is not real (max |Im E| = {report.max_abs_imag:.3g}); "
            "use the thermal state instead"
        )
    best = None
    for iso, w, v in systems:
        i = int(np.argmin(w.real))
        if best is None or w[i].real < best[0].real:
            best = (w[i], iso, v[:, i])
    energy, iso, vec = best
    if iso is not None:
        vec = iso @ vec
    vec = vec / np.linalg.norm(vec)
    window = DEGENERACY_WINDOW * max(1.0, report.scale)
    degeneracy = int(np.sum(np.abs(report.eigenvalues - energy) <= window))
    return complex(energy), vec, degeneracy


def field_grid(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0:
        raise SpecError("step must be > 0", "step")
    if not stop > start:
        raise SpecError(f"empty sweep range [{start}, {stop}]", "stop")
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def _field_spec(template: ModelSpec, value: float) -> ModelSpec:
    return template.replace(lambda1=float(value))


def _prediction(template: ModelSpec):
    control = template.delta if template.kind.is_xyz else template.lambda2
    pred = reality_threshold(template.kind, control, template.gamma, template.alpha, template.n_sites)
    return control, pred


def _is_real_at(template, value, tol, use_symmetry, low_lying=None):
    try:
        return diagonalize(build_hamiltonian(_field_spec(template, value)), tol, use_symmetry, low_lying)
    except NumericalError as exc:
        raise NumericalError(f"{exc} at field={value!r}") from exc


def detect_onset(
    spec_template: ModelSpec,
    sweep_param=None,
    start: Optional[float] = None,
    stop: Optional[float] = None,
    step: float = DEFAULT_STEP,
    tol: float = DEFAULT_TOL,
    use_symmetry: bool = True,
    low_lying: Optional[int] = None,
) -> SweepRecord:
    """Smallest field on the grid from which the spectrum stays real up to ``stop``.

    The grid is scanned downward from ``stop``, which visits exactly the
    points needed to rule out re-entrant non-real windows above the onset.
    Defaults bracket the prediction: ``[max(0, pred - 1), pred + 2]``.
    """
    spec_template.validate()
    if sweep_param is not None:
        want = SweepParam.LAMBDA if spec_template.kind.is_xyz else SweepParam.LAMBDA1
        if SweepParam(sweep_param) is not want:
            raise SpecError(f"{spec_template.kind.value} sweeps {want.value}, not {sweep_param}", "sweep_param")
    control, pred = _prediction(spec_template)
    start = max(0.0, pred.value - 1.0) if start is None else float(start)
    stop = pred.value + 2.0 if stop is None else float(stop)
    grid = field_grid(start, stop, step)

    detected = None
    for value in grid[::-1]:
        if not _is_real_at(spec_template, value, tol, use_symmetry, low_lying).is_real:
            break
        detected = float(value)
    diff = None if detected is None else detected - pred.value
    return SweepRecord(float(control), pred.value, detected, diff, spec_template.n_sites,
                       float(spec_template.gamma), float(step))


def verify_sufficiency(
    spec_template: ModelSpec,
    n_points: int = 101,
    step: float = DEFAULT_STEP,
    tol: float = DEFAULT_TOL,
    offset: float = 0.0,
    use_symmetry: bool = True,
    low_lying: Optional[int] = None,
) -> Tuple[bool, List[dict]]:
    """Check reality at fields pred + offset + i*step, i < n_points (clipped at 0).

    With ``offset = 0`` this is the sufficiency check of the long-range
    prediction; a negative offset probes below the surface.
    """
    spec_template.validate()
    if not spec_template.kind.is_long_range:
        raise SpecError("verify_sufficiency expects a long-range kind", "kind")
    if n_points < 1:
        raise SpecError("n_points must be >= 1", "n_points")
    _, pred = _prediction(spec_template)
    first = max(0.0, pred.value + offset)
    points = []
    for i in range(n_points):
        value = first + i * step
        report = _is_real_at(spec_template, value, tol, use_symmetry, low_lying)
        points.append({"field": float(value), "max_abs_imag": report.max_abs_imag, "is_real": report.is_real})
    return all(p["is_real"] for p in points), points
