"""Command-line surface: JSON matrix I/O and one subcommand per construction.

Matrix files carry {"blocks": [...]} with square row-major blocks of
[re, im] pairs. Every invocation writes exactly one JSON report to standard
output; human-readable errors go to standard error. Exit codes: 0 success,
1 mathematical rejection, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .core import (
    AlgebraElement,
    ToleranceConfig,
    adjoint,
    operator_norm,
    positive_sqrt,
)
from .errors import AlgebraError, NotNormal, TooManyPoints
from .lattice import (
    Subalgebra,
    closure_correspondence,
    generate_masa,
    monotone_closure,
    principal_angles,
)
from .order import build_certificate, verify_certificate
from .polar import (
    DEFAULT_LADDER_MAX,
    polar_direct,
    polar_regularized,
    resolvent_gap_inequality,
    spectral_cut,
    verify_polar,
)
from .selftest import run_all
from .spectral import SpectralFunction, check_regularity, integrate, is_normal, spectral_measure

ACCEPT_TOL = 1e-9


class MalformedInput(Exception):
    """Unreadable or schema-violating input file."""


def element_to_json(x: AlgebraElement) -> dict:
    return {
        "blocks": [
            [[[float(z.real), float(z.imag)] for z in row] for row in block]
            for block in x.blocks
        ]
    }


def element_from_json(doc) -> AlgebraElement:
    if not isinstance(doc, dict) or "blocks" not in doc:
        raise MalformedInput("matrix document needs a 'blocks' field")
    blocks = doc["blocks"]
    if not isinstance(blocks, list) or not blocks:
        raise MalformedInput("'blocks' must be a non-empty list")
    mats = []
    for b in blocks:
        try:
            arr = np.array(
                [[complex(entry[0], entry[1]) for entry in row] for row in b],
                dtype=complex,
            )
        except (TypeError, ValueError, IndexError) as exc:
            raise MalformedInput(f"block is not a matrix of [re, im] pairs: {exc}") from exc
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise MalformedInput("blocks must be square")
        if not np.all(np.isfinite(arr)):
            raise MalformedInput("blocks must contain finite numbers")
        mats.append(arr)
    return AlgebraElement(mats)


def load_matrix_file(path: str) -> AlgebraElement:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc
    return element_from_json(doc)


def _tolerances(args) -> ToleranceConfig:
    def pick(flag_value, env_name, default):
        if flag_value is not None:
            return flag_value
        env = os.environ.get(env_name)
        return float(env) if env is not None else default

    base = ToleranceConfig()
    return ToleranceConfig(
        pos_slack=pick(args.pos_slack, "AWKIT_POS_SLACK", base.pos_slack),
        cluster_tol=pick(args.cluster_tol, "AWKIT_CLUSTER_TOL", base.cluster_tol),
        rank_cutoff=pick(args.rank_cutoff, "AWKIT_RANK_CUTOFF", base.rank_cutoff),
    )


def _report(command, tol, *, seed=None, residuals=None, accepted=False, artifacts=None, error=None):
    doc = {
        "command": command,
        "seed": seed,
        "tolerances": {
            "pos_slack": tol.pos_slack,
            "cluster_tol": tol.cluster_tol,
            "rank_cutoff": tol.rank_cutoff,
            "jacobi_off_tol": tol.jacobi_off_tol,
            "max_sweeps": tol.max_sweeps,
        },
        "residuals": residuals or {},
        "accepted": bool(accepted),
        "artifacts": artifacts or {},
    }
    if error is not None:
        doc["error"] = error
    return doc


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _cmd_polar(args, tol):
    x = load_matrix_file(args.file)
    if args.method == "direct":
        res = polar_direct(x, tol)
    else:
        res = polar_regularized(x, n_max=args.nmax, tol=tol)
    scale = 1.0 + operator_norm(x, tol)
    u, ustar = res.u, adjoint(res.u)
    from .core import range_projection

    residuals = {
        "reconstruction_left": operator_norm(x - res.absxstar * u, tol) / scale,
        "reconstruction_right": operator_norm(x - u * res.absx, tol) / scale,
        "partial_isometry": operator_norm(u * ustar * u - u, tol),
        "initial_projection": operator_norm(
            ustar * u - range_projection(res.absx, tol).element, tol
        ),
        "final_projection": operator_norm(
            u * ustar - range_projection(res.absxstar, tol).element, tol
        ),
    }
    accepted = verify_polar(x, res.u, tol)
    artifacts = {
        "u": element_to_json(res.u),
        "absx": element_to_json(res.absx),
        "absxstar": element_to_json(res.absxstar),
        "diagnostics": [[n, gap] for n, gap in res.diagnostics],
        "method": args.method,
    }
    return _report("polar", tol, residuals=residuals, accepted=accepted, artifacts=artifacts), 0 if accepted else 1


def _cmd_spectral(args, tol):
    a = load_matrix_file(args.file)
    if not is_normal(a, tol):
        raise NotNormal("input is not normal")
    m = spectral_measure(a, tol)
    ident = SpectralFunction.identity(m.domain_spectrum)
    recon = operator_norm(integrate(ident, m) - a, tol) / (1.0 + operator_norm(a, tol))
    try:
        regular = check_regularity(m, tol)
    except TooManyPoints:
        regular = None
    artifacts = {
        "spectrum": [
            {"point": [p.real, p.imag], "multiplicity": mult}
            for p, mult in zip(m.domain_spectrum.points, m.domain_spectrum.multiplicities)
        ],
        "atoms": [
            {"point": [p.real, p.imag], "projection": element_to_json(m.atoms[p].element)}
            for p in m.domain_spectrum.points
        ],
        "regularity": regular,
    }
    accepted = recon <= ACCEPT_TOL and regular is not False
    return _report(
        "spectral", tol, residuals={"reconstruction": recon}, accepted=accepted, artifacts=artifacts
    ), 0 if accepted else 1


def _cmd_cut(args, tol):
    x = load_matrix_file(args.file)
    cut = spectral_cut(x, mu=args.mu, tol=tol)
    absxstar = positive_sqrt(x * adjoint(x), tol)
    p, a = cut.p.element, cut.a
    inner = a * (x * adjoint(x)) * a
    residuals = {
        "cut_identity": operator_norm(a * absxstar - p, tol),
        "sqrt_identity": operator_norm(positive_sqrt(inner, tol) - p, tol),
        "commutator_ap": operator_norm(a * p - p * a, tol),
        "commutator_a_absxstar": operator_norm(a * absxstar - absxstar * a, tol),
        "commutator_p_absxstar": operator_norm(p * absxstar - absxstar * p, tol),
    }
    nonzero = operator_norm(p, tol) > 0.5
    accepted = nonzero and all(v <= ACCEPT_TOL for v in residuals.values())
    artifacts = {
        "p": element_to_json(p),
        "a": element_to_json(a),
        "mu": cut.mu,
    }
    return _report("cut", tol, residuals=residuals, accepted=accepted, artifacts=artifacts), 0 if accepted else 1


def _cmd_closure(args, tol):
    g = load_matrix_file(args.file)
    if not is_normal(g, tol):
        raise NotNormal("input is not normal")
    b = Subalgebra.from_generators([g], tol)
    d1 = generate_masa([g], args.seed1, tol)
    d2 = generate_masa([g], args.seed2, tol)
    c1 = monotone_closure(b, d1, tol)
    c2 = monotone_closure(b, d2, tol)
    angles = principal_angles(c1, c2)
    angle = float(angles[-1]) if angles.size else 0.0
    corr = closure_correspondence(b, d1, d2, tol)
    delta = max(
        (operator_norm(p.element - q.element, tol) for p, q in corr.pairs), default=0.0
    )
    residuals = {"closure_span_angle": angle, "correspondence_delta": delta}
    accepted = angle <= 1e-8 and delta <= ACCEPT_TOL
    artifacts = {
        "closure_dim": c1.dim,
        "closure_basis_d1": [element_to_json(e) for e in c1.basis],
        "closure_basis_d2": [element_to_json(e) for e in c2.basis],
        "projection_pairs": len(corr.pairs),
    }
    return _report(
        "closure", tol, seed=[args.seed1, args.seed2], residuals=residuals,
        accepted=accepted, artifacts=artifacts,
    ), 0 if accepted else 1


def _cmd_certify(args, tol):
    directory = Path(args.dir)
    if not directory.is_dir():
        raise MalformedInput(f"{args.dir} is not a directory")
    files = sorted(p for p in directory.iterdir() if p.suffix == ".json")
    if not files:
        raise MalformedInput(f"{args.dir} holds no .json matrix files")
    seq = [load_matrix_file(str(p)) for p in files]
    limit = load_matrix_file(args.limit)
    cert = build_certificate(seq, limit, args.rate, tol)
    report = verify_certificate(cert, tol)
    residuals = {"worst": report.worst_residual}
    artifacts = {
        "terms": len(seq),
        "ordering": [p.name for p in files],
        "envelope": list(cert.envelope.eps),
        "tail_rate": cert.envelope.tail_rate,
        "failing_condition": report.failing_condition,
    }
    return _report(
        "certify", tol, residuals=residuals, accepted=report.accepted, artifacts=artifacts
    ), 0 if report.accepted else 1


def _cmd_ineq(args, tol):
    x = load_matrix_file(args.file)
    holds = resolvent_gap_inequality(x, args.n, args.m, tol)
    return _report(
        "ineq", tol, residuals={}, accepted=holds,
        artifacts={"n": args.n, "m": args.m},
    ), 0 if holds else 1


def _cmd_selftest(args, tol):
    results = run_all(trials=args.trials, seed=args.seed, dims=args.dims, tol=tol)
    residuals = {r.name: r.worst_residual for r in results}
    artifacts = {
        r.name: {"passed": r.passed, "trials": r.trials, "detail": r.detail}
        for r in results
    }
    accepted = all(r.passed for r in results)
    for r in results:
        sys.stderr.write(r.line() + "\n")
    return _report(
        "selftest", tol, seed=args.seed, residuals=residuals,
        accepted=accepted, artifacts=artifacts,
    ), 0 if accepted else 1


def _dims(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("dims must look like 1..8") from exc
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("dims must satisfy 1 <= lo <= hi")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--pos-slack", type=float, default=None)
    shared.add_argument("--cluster-tol", type=float, default=None)
    shared.add_argument("--rank-cutoff", type=float, default=None)
    parser = argparse.ArgumentParser(
        prog="awkit",
        description="Workbench for finite-dimensional *-algebras: polar and "
        "spectral decompositions, spectral cuts, monotone closures, and "
        "order-convergence certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[shared], **kwargs)

    p = add_parser("polar", help="polar decomposition of a matrix file")
    p.add_argument("file")
    p.add_argument("--nmax", type=int, default=DEFAULT_LADDER_MAX)
    p.add_argument("--method", choices=["regularized", "direct"], default="regularized")

    p = add_parser("spectral", help="spectral measure of a normal element")
    p.add_argument("file")

    p = add_parser("cut", help="spectral cut below a point")
    p.add_argument("file")
    p.add_argument("--mu", type=float, default=None)

    p = add_parser("closure", help="monotone closures in two seeded MASAs")
    p.add_argument("file")
    p.add_argument("--seed1", type=int, required=True)
    p.add_argument("--seed2", type=int, required=True)

    p = add_parser("certify", help="order-convergence certificate for a file sequence")
    p.add_argument("dir")
    p.add_argument("--limit", required=True)
    p.add_argument("--rate", type=float, required=True)

    p = add_parser("ineq", help="squared resolvent-gap inequality check")
    p.add_argument("file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add_parser("selftest", help="run every acceptance suite")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dims", type=_dims, default=(1, 8))
    return parser


_HANDLERS = {
    "polar": _cmd_polar,
    "spectral": _cmd_spectral,
    "cut": _cmd_cut,
    "closure": _cmd_closure,
    "certify": _cmd_certify,
    "ineq": _cmd_ineq,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances(args)
    except ValueError as exc:
        sys.stderr.write(f"bad tolerance: {exc}\n")
        _emit({"command": args.command, "accepted": False, "error": str(exc)})
        return 2
    try:
        report, code = _HANDLERS[args.command](args, tol)
    except MalformedInput as exc:
        sys.stderr.write(f"malformed input: {exc}\n")
        _emit(_report(args.command, tol, error=str(exc)))
        return 2
    except AlgebraError as exc:
        sys.stderr.write(f"rejected: {exc}\n")
        _emit(_report(args.command, tol, error=str(exc)))
        return 1
    _emit(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
