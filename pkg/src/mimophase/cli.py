"""Command-line front end.

Commands::

    mimophase phases MATRIX            matrix phases, classification and arc
    mimophase bode MODEL               sweep data as CSV, JSON or SVG
    mimophase sector MODEL             Phi_inf by sweep, LMI bisection or both
    mimophase feedback G H             small phase / small gain verdicts
    mimophase certify MODEL ALPHA BETA sector certificate as JSON
    mimophase power-check MODEL        complex power against d^* G(j w0) d

Models are JSON files in the schema of :func:`mimophase.lti.model_from_json`;
matrices are JSON nested lists (real entries or ``[re, im]`` pairs),
optionally wrapped as ``{"matrix": ...}``.  Human-readable output is in
degrees and JSON output in radians (with degree copies).

Exit codes: 0 success, 2 hypothesis or classification failure, 3 solver or
convergence failure, 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import matrix_phase as mp
from .exceptions import (ClassificationError, ContourError, ConvergenceError,
                         HypothesisError, ModelParseError, NotApplicableError,
                         SingularityError, SolverError, UnsupportedBranchError)
from .feedback import DEFAULT_MARGIN_TOL, small_gain_check, small_phase_check
from .lti import evaluate, model_from_json
from .phase_response import (DEFAULT_EPS, DEFAULT_N_AXIS, DEFAULT_N_DETOUR,
                             curve_to_csv, phi_infty, sweep)
from .power import report_to_json, sinusoid_phase_shift_check
from .sectored_real import QUASI, SEMI, certificate_to_json, check_sector, phi_infty_lmi
from .svg import bode_svg

__all__ = ["RunConfig", "main", "build_parser"]

EXIT_OK, EXIT_HYPOTHESIS, EXIT_SOLVER, EXIT_PARSE = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    """Options shared by all commands."""

    command: str
    n_axis: int = DEFAULT_N_AXIS
    eps: float = DEFAULT_EPS
    n_detour: int = DEFAULT_N_DETOUR
    tol: float | None = None
    fmt: str = "text"
    seed: int = 0
    output: str | None = None

    @classmethod
    def from_args(cls, args):
        return cls(args.command, args.grid, args.eps, args.n_detour, args.tol,
                   args.format, args.seed, args.output)

    @property
    def grid(self):
        return dict(eps=self.eps, n_axis=self.n_axis, n_detour=self.n_detour)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_model(path):
    return model_from_json(_read(path))


def _load_matrix(path):
    text = _read(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"malformed JSON: {exc.msg}", line=exc.lineno,
                              column=exc.colno) from exc
    if isinstance(obj, dict):
        if "matrix" not in obj:
            raise ModelParseError("matrix file object needs a 'matrix' field")
        obj = obj["matrix"]
    try:
        return mp.matrix_from_json(obj)
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"invalid matrix: {exc}") from exc


def _deg(x):
    return [round(float(v), 6) for v in np.degrees(np.atleast_1d(x))]


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def cmd_phases(path, cfg):
    C = _load_matrix(path)
    tol = cfg.tol or mp.DEFAULT_TOL
    cls = mp.classify(C, tol)
    arc = mp.support_arc(C, tol)
    spec = mp.phases(C, tol) if cls.is_semi_sectorial else None
    if cfg.fmt == "json":
        out = {"classification": cls.kind, "numeric_rank": cls.numeric_rank,
               "support_arc": {"lo": _float(arc.theta_lo), "hi": _float(arc.theta_hi),
                               "field_angle": _float(arc.delta), "nonempty": arc.nonempty}}
        if spec is not None:
            out.update(phases=[float(p) for p in spec.phases],
                       phases_deg=_deg(spec.phases), center=float(spec.center))
        return _dumps(out)
    lines = [f"classification: {cls.kind} (rank {cls.numeric_rank})"]
    if spec is None:
        lines.append("phases: undefined (not semi-sectorial)")
    else:
        lines.append("phases (deg): " + ", ".join(f"{v:.6f}" for v in _deg(spec.phases)))
        lines.append("phases (rad): " + ", ".join(f"{v:.9f}" for v in spec.phases))
        lines.append(f"center: {math.degrees(spec.center):.6f} deg")
    if arc.nonempty:
        lines.append(f"support arc: ({math.degrees(arc.theta_lo):.6f}, "
                     f"{math.degrees(arc.theta_hi):.6f}) deg, field angle "
                     f"{math.degrees(arc.delta):.6f} deg")
    else:
        lines.append("support arc: empty")
    return "\n".join(lines) + "\n"


def cmd_bode(path, cfg):
    model = _load_model(path)
    curve = sweep(model, **cfg.grid)
    if cfg.fmt == "svg":
        return bode_svg(curve, model.label or path)
    if cfg.fmt == "json":
        sec = phi_infty(curve)
        return _dumps({"omega": curve.contour.param.tolist(),
                       "segment": curve.contour.kind.tolist(),
                       "phases": curve.phases.tolist(), "sigmas": curve.sigmas.tolist(),
                       "rank": curve.rank, "rank_constant": curve.rank_constant,
                       "phi_infty": [sec.lo, sec.hi], "phi_infty_deg": _deg([sec.lo, sec.hi])})
    return curve_to_csv(curve)


def cmd_sector(path, cfg, method, variant):
    model = _load_model(path)
    result = {}
    swept = None
    if method in ("sweep", "both"):
        swept = phi_infty(sweep(model, **cfg.grid))
        result["sweep"] = swept
    if method in ("lmi", "both"):
        result["lmi"] = phi_infty_lmi(model, tol=cfg.tol or 1e-4, variant=variant,
                                      sector=swept)
    if cfg.fmt == "json":
        out = {k: {"lo": v.lo, "hi": v.hi, "lo_deg": math.degrees(v.lo),
                   "hi_deg": math.degrees(v.hi)} for k, v in result.items()}
        if len(result) == 2:
            out["discrepancy"] = _discrepancy(result)
        return _dumps(out)
    lines = [f"{k:6s} Phi_inf = [{math.degrees(v.lo):.4f}, {math.degrees(v.hi):.4f}] deg"
             for k, v in result.items()]
    if len(result) == 2:
        lines.append(f"discrepancy: {math.degrees(_discrepancy(result)):.4f} deg")
    return "\n".join(lines) + "\n"


def _discrepancy(result):
    a, b = result["sweep"], result["lmi"]
    return max(abs(a.lo - b.lo), abs(a.hi - b.hi))


def cmd_feedback(path_g, path_h, cfg):
    G, H = _load_model(path_g), _load_model(path_h)
    hypothesis = None
    try:
        rep = small_phase_check(G, H, cfg.tol or DEFAULT_MARGIN_TOL, **cfg.grid)
    except HypothesisError as exc:
        hypothesis = f"{exc.theorem}: {exc}"
        rep = None
    gain = small_gain_check(G, H, with_oracle=rep is None, **cfg.grid)
    oracle = rep.oracle_stable if rep is not None else gain.oracle_stable
    well = rep.well_posed if rep is not None else gain.well_posed
    rows = {
        "small_phase": None if rep is None else rep.small_phase_pass,
        "small_gain": gain.small_gain_pass,
        "oracle_stable": oracle,
        "well_posed": well,
    }
    if cfg.fmt == "json":
        out = dict(rows)
        out["theorem"] = None if rep is None else rep.theorem
        out["hypothesis_failure"] = hypothesis
        out["swapped"] = None if rep is None else rep.swapped
        if rep is not None:
            out["phase_margin"] = _float(rep.min_margin)
            out["phase_margin_deg"] = _float(math.degrees(rep.min_margin))
            out["phase_worst_frequency"] = _float(rep.worst_frequency)
        out["gain_margin"] = _float(gain.min_margin)
        out["gain_worst_frequency"] = _float(gain.worst_frequency)
        return _dumps(out)
    lines = []
    if rep is not None:
        lines.append(f"theorem: {rep.theorem}" + (" (G and H swapped)" if rep.swapped else ""))
    else:
        lines.append(f"small phase hypotheses not met ({hypothesis})")
    for k, v in rows.items():
        verdict = "n/a" if v is None else ("pass" if v else "fail")
        if k in ("oracle_stable", "well_posed"):
            verdict = "n/a" if v is None else str(bool(v)).lower()
        lines.append(f"{k:14s} {verdict}")
    if rep is not None:
        lines.append(f"phase margin: {math.degrees(rep.min_margin):.4f} deg at omega = "
                     f"{rep.worst_frequency:.6g}")
    lines.append(f"gain margin: {gain.min_margin:.6g} at omega = {gain.worst_frequency:.6g}")
    return "\n".join(lines) + "\n"


def cmd_certify(path, alpha, beta, cfg, variant, degrees):
    model = _load_model(path)
    if degrees:
        alpha, beta = math.radians(alpha), math.radians(beta)
    cert = check_sector(model, alpha, beta, variant)
    if cfg.fmt == "json" or cfg.output:
        return certificate_to_json(cert) + "\n"
    lines = [f"sector ({math.degrees(alpha):.4f}, {math.degrees(beta):.4f}) deg, "
             f"variant {variant}: {'feasible' if cert.feasible else 'infeasible'}"]
    for e in cert.edges:
        lines.append(f"  eta = {math.degrees(e['eta']):.4f} deg  status {e['status']}  "
                     f"margin {e['margin']:.3e}")
    if cert.advisory:
        lines.append("  realization not minimal: certificate is advisory")
    return "\n".join(lines) + "\n"


def _direction(spec, m, rng):
    if spec is None:
        v = rng.normal(size=2 * m)
    else:
        parts = spec.split(";")
        if len(parts) != 2:
            raise ModelParseError("direction must look like 'a1,...,am;b1,...,bm'")
        try:
            v = np.array([float(x) for p in parts for x in p.split(",")])
        except ValueError as exc:
            raise ModelParseError(f"invalid direction: {exc}") from exc
        if v.size != 2 * m:
            raise ModelParseError(f"direction needs {m} cosine and {m} sine entries")
    n = np.linalg.norm(v)
    if n == 0:
        raise ModelParseError("direction must be nonzero")
    v = v * math.sqrt(2) / n
    return v[:m], v[m:]


def cmd_power_check(path, omega0, direction, count, cfg):
    model = _load_model(path)
    rng = np.random.default_rng(cfg.seed)
    phase = mp.phases(evaluate(model, 1j * omega0))
    reports = []
    for _ in range(1 if direction else count):
        a, b = _direction(direction, model.m, rng)
        reports.append(sinusoid_phase_shift_check(model, omega0, a, b))
    if cfg.fmt == "json":
        return _dumps({"phase_interval": [phase.phi_min, phase.phi_max],
                       "reports": [json.loads(report_to_json(r)) for r in reports]})
    lines = [f"matrix phases of G(j{omega0:g}): [{math.degrees(phase.phi_min):.4f}, "
             f"{math.degrees(phase.phi_max):.4f}] deg"]
    for r in reports:
        lines.append(f"angle S = {math.degrees(r.angle_power):.6f} deg, "
                     f"angle d*Gd = {math.degrees(r.angle_predicted):.6f} deg, "
                     f"discrepancy {r.discrepancy:.2e} rad")
    return "\n".join(lines) + "\n"


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=DEFAULT_N_AXIS,
                        help="axis points of the frequency sweep")
    common.add_argument("--eps", type=float, default=DEFAULT_EPS, help="detour radius")
    common.add_argument("--n-detour", type=int, default=DEFAULT_N_DETOUR,
                        help="points per detour arc")
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance (rank for phases, margin for feedback, "
                             "bisection for the LMI sector)")
    common.add_argument("--format", choices=("text", "csv", "json", "svg"), default=None,
                        help="output format")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("-o", "--output", default=None, help="write output to a file")

    p = argparse.ArgumentParser(prog="mimophase", description="MIMO phase analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phases", parents=[common], help="phases of a matrix")
    s.add_argument("matrix")
    s = sub.add_parser("bode", parents=[common], help="phase and gain response")
    s.add_argument("model")
    s = sub.add_parser("sector", parents=[common], help="phase sector Phi_inf")
    s.add_argument("model")
    s.add_argument("--method", choices=("sweep", "lmi", "both"), default="sweep")
    s.add_argument("--variant", choices=(QUASI, SEMI), default=QUASI)
    s = sub.add_parser("feedback", parents=[common], help="feedback stability tests")
    s.add_argument("g")
    s.add_argument("h")
    s = sub.add_parser("certify", parents=[common], help="LMI sector certificate")
    s.add_argument("model")
    s.add_argument("alpha", type=float)
    s.add_argument("beta", type=float)
    s.add_argument("--variant", choices=(QUASI, SEMI), default=QUASI)
    s.add_argument("--degrees", action="store_true", help="alpha and beta in degrees")
    s = sub.add_parser("power-check", parents=[common], help="complex power identity")
    s.add_argument("model")
    s.add_argument("--omega", type=float, required=True)
    s.add_argument("--direction", default=None, help="'a1,...,am;b1,...,bm'")
    s.add_argument("--count", type=int, default=1, help="random directions when none given")
    return p


_DEFAULT_FORMAT = {"bode": "csv"}


def _dispatch(args, cfg):
    if args.command == "phases":
        return cmd_phases(args.matrix, cfg)
    if args.command == "bode":
        return cmd_bode(args.model, cfg)
    if args.command == "sector":
        return cmd_sector(args.model, cfg, args.method, args.variant)
    if args.command == "feedback":
        return cmd_feedback(args.g, args.h, cfg)
    if args.command == "certify":
        return cmd_certify(args.model, args.alpha, args.beta, cfg, args.variant, args.degrees)
    return cmd_power_check(args.model, args.omega, args.direction, args.count, cfg)


def main(argv=None):
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = _DEFAULT_FORMAT.get(args.command, "text")
    cfg = RunConfig.from_args(args)
    try:
        text = _dispatch(args, cfg)
    except (ModelParseError, OSError) as exc:
        where = ""
        if isinstance(exc, ModelParseError) and exc.line is not None:
            where = f" (line {exc.line}, column {exc.column})"
        print(f"parse error{where}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SolverError, ConvergenceError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except NotApplicableError as exc:
        print(f"not applicable: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (HypothesisError, ClassificationError, ContourError, SingularityError,
            UnsupportedBranchError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run():
    """Console-script wrapper around :func:`main`."""
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream closed the pipe (for example ``| head``)
        sys.stderr.close()
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    run()
