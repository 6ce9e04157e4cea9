"""
Command-line harness: ``rtspin <subcommand> [flags]``.

Subcommands
-----------
predict           surface prediction as JSON
scan              detection-vs-prediction sweep over lambda2 (ATXY) or delta (XYZ), CSV
verify-longrange  sufficiency check of the long-range prediction, JSON
entangle          two-site entanglement and parity at the surface, CSV
spectrum          single-point spectrum report, JSON

Settings come from ``--config FILE`` (a JSON RunConfig) with flags taking
precedence.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure.  CSV output starts with a ``#`` metadata line and a header; floats
use 12 significant digits.  Output contains no timestamps, so identical
configurations give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import numpy as np

from . import __version__
from .analytic import reality_threshold
from .eig import DEFAULT_STEP, DEFAULT_TOL, SWEEP_CSV_HEADER, detect_onset, diagonalize, verify_sufficiency
from .errors import NumericalError, SpecError
from .model import LONG_RANGE_CONVENTION, ModelKind, ModelSpec, build_hamiltonian
from .observables import (
    DEFAULT_BETA,
    log_negativity,
    parity_expectation,
    partial_trace_two_site,
    thermal_state,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

ENTANGLE_CSV_HEADER = "lambda2,gamma,n_sites,lambda1_eval,E12,parity,m_y,C_xy,C_yy"
DEFAULT_EVAL_OFFSET = 1e-3
SWEEP_KEYS = ("param", "start", "stop", "step")


def _fmt(x) -> str:
    return "" if x is None else f"{x:.12g}"


@dataclass
class RunConfig:
    """Everything one CLI invocation needs.

    ``model`` holds ModelSpec fields; its ``n_sites`` may be a list, in which
    case sweeps run once per size.  ``sweep`` is ``{param, start, stop, step}``
    for the control grid of ``scan`` and ``entangle``.
    """

    model: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    tolerance: float = DEFAULT_TOL
    beta: float = DEFAULT_BETA
    output_path: Optional[str] = None
    seed: int = 0
    field_step: float = DEFAULT_STEP
    n_points: int = 101
    offset: float = 0.0
    eval_offset: Optional[float] = None
    hermitian: bool = False
    low_lying: Optional[int] = None
    use_symmetry: bool = True

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise SpecError("config must be a JSON object", "config")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SpecError(f"unknown config key(s): {', '.join(unknown)}", unknown[0])
        cfg = cls(**data)
        cfg.model = dict(cfg.model or {})
        cfg.sweep = dict(cfg.sweep or {})
        spec_keys = {f.name for f in fields(ModelSpec)}
        bad = sorted(set(cfg.model) - spec_keys)
        if bad:
            raise SpecError(f"unknown model key(s): {', '.join(bad)}", f"model.{bad[0]}")
        bad = sorted(set(cfg.sweep) - set(SWEEP_KEYS))
        if bad:
            raise SpecError(f"unknown sweep key(s): {', '.join(bad)}", f"sweep.{bad[0]}")
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"config is not valid JSON: {exc}", "config") from None
        return cls.from_dict(data)

    # -- validation ----------------------------------------------------
    def validate(self) -> "RunConfig":
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise SpecError("tolerance must be > 0", "tolerance")
        if not (isinstance(self.beta, (int, float)) and self.beta > 0):
            raise SpecError("beta must be > 0", "beta")
        if not self.field_step > 0:
            raise SpecError("field_step must be > 0", "field_step")
        if not (isinstance(self.n_points, int) and self.n_points >= 1):
            raise SpecError("n_points must be an integer >= 1", "n_points")
        if self.low_lying is not None and not (isinstance(self.low_lying, int) and self.low_lying >= 1):
            raise SpecError("low_lying must be an integer >= 1", "low_lying")
        if "kind" not in self.model:
            raise SpecError("model.kind is required", "model.kind")
        ModelKind.parse(self.model["kind"])
        return self

    def sizes(self) -> List[Optional[int]]:
        n = self.model.get("n_sites")
        if n is None:
            return [None]
        return list(n) if isinstance(n, (list, tuple)) else [n]

    def spec(self, n_sites: int, **overrides) -> ModelSpec:
        data = {k: v for k, v in self.model.items() if k != "n_sites"}
        data["n_sites"] = n_sites
        data.update(overrides)
        try:
            return ModelSpec.from_dict(data).validate()
        except TypeError as exc:
            raise SpecError(str(exc), "model") from None

    def required_sizes(self) -> List[int]:
        sizes = self.sizes()
        if sizes == [None]:
            raise SpecError("model.n_sites is required for this command", "model.n_sites")
        return sizes

    def control_grid(self, default_stop: float) -> np.ndarray:
        start = float(self.sweep.get("start", 0.0))
        stop = float(self.sweep.get("stop", default_stop))
        step = float(self.sweep.get("step", DEFAULT_STEP))
        if not step > 0:
            raise SpecError("sweep step must be > 0", "sweep.step")
        if stop < start:
            raise SpecError(f"empty sweep range [{start}, {stop}]", "sweep.stop")
        n = int(math.floor((stop - start) / step + 1e-9))
        # rounding keeps grid labels like 0.3 free of accumulated float noise
        return np.round(start + step * np.arange(n + 1), 12)


# -- argument parsing -------------------------------------------------------

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON RunConfig file; flags override its values")
    p.add_argument("--kind", help="iatxy, ixyz, iatxy_lr, ixyz_lr, hermitian_atxy, hermitian_xyz")
    p.add_argument("--n", type=int, nargs="+", dest="n_sites", help="number of sites (several allowed for scan)")
    p.add_argument("--J", type=float, dest="coupling_j")
    p.add_argument("--gamma", type=float)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--tol", type=float, dest="tolerance")
    p.add_argument("--step", type=float, help="control-grid step (scan, entangle) or field step (verify-longrange)")
    p.add_argument("--out", dest="output_path", help="output file (default: stdout)")
    p.add_argument("--low-lying", type=int, dest="low_lying",
                   help="judge reality on this many lowest eigenvalues only (diagnostic)")
    p.add_argument("--no-symmetry", action="store_false", dest="use_symmetry", default=None,
                   help="diagonalize the full matrix instead of symmetry blocks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtspin", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="surface prediction (JSON)")
    _add_common(p)

    p = sub.add_parser("scan", help="detected vs predicted onset over a control grid (CSV)")
    _add_common(p)
    p.add_argument("--start", type=float, help="first control value (lambda2 or delta)")
    p.add_argument("--stop", type=float, help="last control value")
    p.add_argument("--field-step", type=float, dest="field_step", help="step of the detection sweep")

    p = sub.add_parser("verify-longrange", help="long-range sufficiency check (JSON)")
    _add_common(p)
    p.add_argument("--n-points", type=int, dest="n_points")
    p.add_argument("--offset", type=float, help="shift of the first field from the prediction")

    p = sub.add_parser("entangle", help="two-site entanglement at the surface (CSV)")
    _add_common(p)
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--hermitian", action="store_true", default=None,
                   help="Hermitian ATXY at its factorization field instead")
    p.add_argument("--eval-offset", type=float, dest="eval_offset",
                   help="evaluate at surface + offset (default 1e-3, 0 with --hermitian)")

    p = sub.add_parser("spectrum", help="single-point spectrum report (JSON)")
    _add_common(p)
    return parser


_MODEL_FLAGS = ("kind", "n_sites", "coupling_j", "gamma", "lambda1", "lambda2", "delta", "alpha")
_TOP_FLAGS = ("beta", "tolerance", "output_path", "low_lying", "use_symmetry", "field_step",
              "n_points", "offset", "hermitian", "eval_offset")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = RunConfig.from_json(fh.read())
        except OSError as exc:
            raise SpecError(f"cannot read config: {exc}", "config") from None
    else:
        cfg = RunConfig()
    for name in _MODEL_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            if name == "n_sites" and len(value) == 1:
                value = value[0]
            cfg.model[name] = value
    for name in _TOP_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    for name in ("start", "stop"):
        value = getattr(args, name, None)
        if value is not None:
            cfg.sweep[name] = value
    if getattr(args, "step", None) is not None:
        if args.command == "verify-longrange":
            cfg.field_step = args.step
        else:
            cfg.sweep["step"] = args.step
    if args.command == "entangle":
        cfg.model.setdefault("kind", ModelKind.HERMITIAN_ATXY.value if cfg.hermitian else ModelKind.IATXY.value)
    return cfg.validate()


# -- commands ---------------------------------------------------------------

def _metadata(command: str, cfg: RunConfig) -> str:
    meta = {
        "command": command,
        "model": cfg.model,
        "tolerance": cfg.tolerance,
        "version": __version__,
    }
    if command == "entangle":
        meta["beta"] = cfg.beta
    if cfg.low_lying is not None:
        meta["low_lying"] = cfg.low_lying
    if ModelKind.parse(cfg.model["kind"]).is_long_range:
        meta["long_range_convention"] = LONG_RANGE_CONVENTION
    return "# " + json.dumps(meta, sort_keys=True)


class _Emitter:
    """Line sink that writes through as lines arrive.

    The file is opened on the first line, so configuration errors raised
    before any output leave no file behind; a numerical failure mid-sweep
    leaves the rows computed so far.
    """

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self._fh = None
        self.count = 0

    def add(self, line: str):
        if self._fh is None:
            self._fh = open(self.path, "w", encoding="utf-8", newline="\n") if self.path else sys.stdout
        self._fh.write(line + "\n")
        self._fh.flush()
        self.count += 1

    def close(self):
        if self._fh is not None and self._fh is not sys.stdout:
            self._fh.close()


def cmd_predict(cfg: RunConfig, out: _Emitter):
    kind = ModelKind.parse(cfg.model["kind"])
    control = cfg.model.get("delta", 0.0) if kind.is_xyz else cfg.model.get("lambda2", 0.0)
    sizes = cfg.sizes()
    if len(sizes) > 1:
        raise SpecError("predict takes a single n_sites", "model.n_sites")
    pred = reality_threshold(kind, control, cfg.model.get("gamma", 0.0), cfg.model.get("alpha"), sizes[0])
    out.add(json.dumps(pred.to_dict(), sort_keys=True, indent=2))


def cmd_scan(cfg: RunConfig, out: _Emitter):
    kind = ModelKind.parse(cfg.model["kind"])
    control_name = "delta" if kind.is_xyz else "lambda2"
    param = cfg.sweep.get("param", control_name)
    if param != control_name:
        raise SpecError(f"{kind.value} scans {control_name}, not {param}", "sweep.param")
    sizes = cfg.required_sizes()
    grid = cfg.control_grid(1.0 if kind.is_xyz else 1.5)
    for n in sizes:  # validate everything before the first diagonalization
        cfg.spec(n, **{control_name: float(grid[0])})
    out.add(_metadata("scan", cfg))
    out.add(SWEEP_CSV_HEADER)
    for n in sizes:
        for value in grid:
            spec = cfg.spec(n, **{control_name: float(value)})
            rec = detect_onset(spec, step=cfg.field_step, tol=cfg.tolerance,
                               use_symmetry=cfg.use_symmetry, low_lying=cfg.low_lying)
            out.add(rec.csv_row())


def cmd_verify_longrange(cfg: RunConfig, out: _Emitter):
    sizes = cfg.required_sizes()
    if len(sizes) > 1:
        raise SpecError("verify-longrange takes a single n_sites", "model.n_sites")
    spec = cfg.spec(sizes[0])
    if not spec.kind.is_long_range:
        raise SpecError("verify-longrange needs a long-range kind", "model.kind")
    ok, points = verify_sufficiency(spec, cfg.n_points, cfg.field_step, cfg.tolerance, cfg.offset,
                                    cfg.use_symmetry, cfg.low_lying)
    control = spec.delta if spec.kind.is_xyz else spec.lambda2
    pred = reality_threshold(spec.kind, control, spec.gamma, spec.alpha, spec.n_sites)
    verdict = {
        "all_real": ok,
        "prediction": pred.value,
        "offset": cfg.offset,
        "step": cfg.field_step,
        "n_points": cfg.n_points,
        "tolerance": cfg.tolerance,
        "low_lying": cfg.low_lying,
        "model": spec.to_dict(),
        "long_range_convention": LONG_RANGE_CONVENTION,
        "version": __version__,
        "points": points,
    }
    out.add(json.dumps(verdict, sort_keys=True, indent=2))


def cmd_entangle(cfg: RunConfig, out: _Emitter):
    kind = ModelKind.HERMITIAN_ATXY if cfg.hermitian else ModelKind.parse(cfg.model["kind"])
    if kind not in (ModelKind.IATXY, ModelKind.HERMITIAN_ATXY):
        raise SpecError("entangle supports iatxy (or --hermitian)", "model.kind")
    cfg.model["kind"] = kind.value
    sizes = cfg.required_sizes()
    grid = cfg.control_grid(1.5)
    gamma = float(cfg.model.get("gamma", 0.0))
    offset = cfg.eval_offset
    if offset is None:
        offset = 0.0 if kind.is_hermitian else DEFAULT_EVAL_OFFSET

    jobs = []
    for n in sizes:
        for l2 in grid:
            pred = reality_threshold(kind, float(l2), gamma)
            surface = pred.hermitian_value if kind.is_hermitian else pred.value
            if surface is None:
                raise SpecError(f"no factorization field for lambda2={l2}, gamma={gamma}", "model.gamma")
            jobs.append(cfg.spec(n, lambda2=float(l2), lambda1=surface + offset))

    out.add(_metadata("entangle", cfg))
    out.add(ENTANGLE_CSV_HEADER)
    for spec in jobs:
        state = thermal_state(build_hamiltonian(spec), cfg.beta, cfg.tolerance, cfg.use_symmetry)
        two = partial_trace_two_site(state, spec.n_sites, 1, 2)
        row = [spec.lambda2, spec.gamma, spec.n_sites, spec.lambda1, log_negativity(two),
               parity_expectation(state, spec.n_sites), two.coefficient("m_y").real,
               two.coefficient("C_xy").real, two.coefficient("C_yy").real]
        out.add(",".join(str(x) if isinstance(x, int) else _fmt(x) for x in row))


def cmd_spectrum(cfg: RunConfig, out: _Emitter):
    sizes = cfg.required_sizes()
    if len(sizes) > 1:
        raise SpecError("spectrum takes a single n_sites", "model.n_sites")
    spec = cfg.spec(sizes[0])
    report = diagonalize(build_hamiltonian(spec), cfg.tolerance, cfg.use_symmetry, cfg.low_lying)
    payload = report.to_dict()
    payload["model"] = spec.to_dict()
    payload["version"] = __version__
    out.add(json.dumps(payload, sort_keys=True, indent=2))


COMMANDS = {
    "predict": cmd_predict,
    "scan": cmd_scan,
    "verify-longrange": cmd_verify_longrange,
    "entangle": cmd_entangle,
    "spectrum": cmd_spectrum,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except SpecError as exc:
        print(f"config error [{exc.field}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = _Emitter(cfg.output_path)
    try:
        COMMANDS[args.command](cfg, out)
    except SpecError as exc:
        print(f"config error [{exc.field}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        if out.count and args.command in ("scan", "entangle"):
            out.add(f"# INCOMPLETE: {exc}")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        out.close()
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
