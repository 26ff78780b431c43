"""conelab: command-line front door for the cone order laboratory.

Reports are JSON-first (canonical byte-identical output for fixed inputs and
seeds) with an optional human-readable summary on stderr; exit codes are a
total function of the report content:

    0  success (classify/hypothesis: hypothesis holds; check-iso: affine)
    1  hypothesis fails, or check-iso passed the battery but is not affine
    2  parse/input error (bad files, bad flags, violated preconditions)
    3  operation needs a pointed cone
    4  check-iso battery violation (witness pair in the report)
    5  requested supremum/infimum/expression value does not exist
    6  matrix is not positive definite
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import psd as psd_mod
from .cones import PolyhedralCone
from .errors import (
    ConeOrderError,
    NotPositiveDefinite,
    NotPointed,
    ParseError,
    UndefinedLattice,
)
from .iso import (
    IsoSpec,
    check_additivity,
    check_affine_on,
    check_order_iso_sampled,
    check_parallelogram,
    check_positively_homogeneous,
    extract_g_r,
    halfline_image_check,
)
from .linalg import as_vec, is_zero_vec, vec_add, vec_scale
from .order import (
    classify_engaged,
    eval_infsup,
    hypothesis_check,
    infimum,
    order_unit_norm,
    supremum,
    CombinationCertificate,
)
from .sampling import cone_point, rng_for
from .serialize import (
    canonical_dumps,
    cone_report,
    fmt_rational,
    load_json,
    parse_cone,
    parse_expr,
    parse_iso,
    parse_matrix,
    parse_points,
    parse_rational,
    vec_to_json,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_NOT_POINTED = 3
EXIT_VIOLATION = 4
EXIT_UNDEFINED = 5
EXIT_NOT_PD = 6


def _parse_vec_arg(text: str, n: int):
    """Inline vector syntax: 'e1' for a basis vector or '1,0,-1/2'."""
    if text.startswith("e"):
        try:
            i = int(text[1:])
        except ValueError as exc:
            raise ParseError(f"bad vector spec {text!r}") from exc
        if not 1 <= i <= n:
            raise ParseError(f"basis index out of range in {text!r}")
        return [Fraction(1 if j == i - 1 else 0) for j in range(n)]
    parts = text.split(",")
    if len(parts) != n:
        raise ParseError(f"vector {text!r} has {len(parts)} entries, expected {n}")
    return [parse_rational(p.strip()) for p in parts]


def _parse_matrix_arg(text: str, n: int | None):
    """Inline matrix syntax: 'diag:a,b,...', 'eye', 'proj:<vec>', or a file path."""
    if text.startswith("diag:"):
        vals = [float(Fraction(p)) for p in text[5:].split(",")]
        if n is not None and len(vals) != n:
            raise ParseError(f"diag has {len(vals)} entries, expected {n}")
        return psd_mod.SymMatrix(np.diag(vals))
    if text == "eye":
        if n is None:
            raise ParseError("'eye' needs --n")
        return psd_mod.SymMatrix(np.eye(n))
    if text.startswith("proj:"):
        if n is None:
            raise ParseError("'proj:' needs --n")
        v = np.array([float(c) for c in _parse_vec_arg(text[5:], n)])
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ParseError("cannot project on the zero vector")
        return psd_mod.rank_one_projection(v / nrm)
    return parse_matrix(load_json(text))


def _sup_result_json(res):
    out = {"outcome": res.outcome}
    if res.value is not None:
        out["value"] = vec_to_json(res.value)
    if res.witnesses is not None:
        out["witnesses"] = [vec_to_json(w) for w in res.witnesses]
    return out


def _certificate_json(cert):
    if isinstance(cert, CombinationCertificate):
        return {"kind": "combination",
                "coefficients": {str(i): fmt_rational(c) for i, c in cert.coefficients}}
    return {"kind": "separating_functional", "functional": vec_to_json(cert.functional)}


# ---------------------------------------------------------------------------
# check-iso battery


def run_full_battery(cone: PolyhedralCone, spec: IsoSpec, samples: int, seed: int,
                     workers: int = 1) -> dict:
    """The full verification battery behind `conelab check-iso`.

    Composes the sampled order-isomorphism test with the half-line,
    parallelogram, additivity and scalar-extraction identities and the
    affinity/homogeneity verdicts.  Failures of theorem-backed identities
    count as battery violations; NotAffine alone does not.
    """
    a = spec.source_base
    src = spec.source_cone
    if not src.pointed:
        raise NotPointed("the verification battery needs a pointed source cone")
    gens = src.generators
    report: dict = {"seed": seed, "samples": samples, "exact": spec.exact}
    violations = 0

    battery = check_order_iso_sampled(spec, samples, seed, workers=workers)
    report["battery"] = {
        "verdict": battery.verdict,
        "samples_run": battery.samples_run,
        "order_preserving_violations": [
            [vec_to_json(x), vec_to_json(y)] for x, y in battery.order_preserving_violations[:5]
        ],
        "inverse_violations": [
            [vec_to_json(x), vec_to_json(y)] for x, y in battery.inverse_violations[:5]
        ],
    }
    if battery.verdict != "PassedSampling":
        violations += 1

    n_cfg = max(5, min(50, samples // 100))
    engaged = {i: rep.engaged for i, rep in enumerate(classify_engaged(src))}

    halfline = {"checked": 0, "passed": 0, "failures": []}
    lams = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)]
    for i, r in enumerate(gens):
        apex = vec_add(a, cone_point(src, rng_for(seed, "hl", i)))
        halfline["checked"] += 1
        try:
            ok = halfline_image_check(spec, apex, r, lams)
        except ConeOrderError:
            ok = False
        if ok:
            halfline["passed"] += 1
        else:
            halfline["failures"].append(i)
    report["halfline"] = halfline
    if halfline["failures"]:
        violations += 1

    par = {"checked": 0, "passed": 0, "witness": None}
    add = {"checked": 0, "passed": 0, "witness": None}
    if len(gens) >= 2:
        for i in range(n_cfg):
            rng = rng_for(seed, "par", i)
            x = vec_add(a, cone_point(src, rng))
            ri, si = rng.sample(range(len(gens)), 2)
            r = vec_scale(rng.randint(1, 3), gens[ri])
            s = vec_scale(rng.randint(1, 3), gens[si])
            par["checked"] += 1
            if check_parallelogram(spec, x, r, s):
                par["passed"] += 1
            elif par["witness"] is None:
                par["witness"] = [vec_to_json(x), vec_to_json(r), vec_to_json(s)]
            rng2 = rng_for(seed, "add", i)
            x2 = vec_add(a, cone_point(src, rng2))
            count = rng2.randint(2, min(4, len(gens)))
            idx = rng2.sample(range(len(gens)), count)
            ss = [vec_scale(rng2.randint(1, 3), gens[j]) for j in idx]
            add["checked"] += 1
            if check_additivity(spec, x2, ss):
                add["passed"] += 1
            elif add["witness"] is None:
                add["witness"] = [vec_to_json(x2)] + [vec_to_json(s) for s in ss]
    report["parallelogram"] = par
    report["additivity"] = add
    if par["witness"] is not None or add["witness"] is not None:
        violations += 1

    g_report = []
    g_lams = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]
    for i, r in enumerate(gens):
        basepoints = [vec_add(a, cone_point(src, rng_for(seed, "gr", i, t))) for t in range(3)]
        entry = {"ray_index": i, "engaged": engaged.get(i)}
        try:
            rows = extract_g_r(spec, r, basepoints, g_lams)
        except ConeOrderError as exc:
            entry["colinear"] = False
            entry["error"] = type(exc).__name__
            violations += 1
            g_report.append(entry)
            continue
        entry["colinear"] = True
        by_lam: dict = {}
        for row in rows:
            by_lam.setdefault(row.lam, []).append(row.value)
        indep = all(len(set(vals)) == 1 for vals in by_lam.values())
        ident = all(all(v == lam for v in vals) for lam, vals in by_lam.items())
        if engaged.get(i):
            entry["basepoint_independent"] = indep
            entry["identity"] = ident
            if not (indep and ident):
                violations += 1
        else:
            entry["basepoint_independent"] = indep
            entry["identity"] = ident if indep else None
        g_report.append(entry)
    report["g_r"] = g_report

    pts = []
    seen = set()
    for t in range(4 * src.dim + 12):
        p = vec_add(a, cone_point(src, rng_for(seed, "aff", t)))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    fit = check_affine_on(spec, pts)
    report["affine"] = {"affine": fit.affine, "max_residual": fmt_rational(fit.max_residual)}

    if is_zero_vec(spec.source_base) and is_zero_vec(spec.target_base):
        hom_samples = [vec_add(a, cone_point(src, rng_for(seed, "hom", t))) for t in range(8)]
        report["homogeneous"] = check_positively_homogeneous(
            spec, hom_samples, [Fraction(1, 2), Fraction(2), Fraction(3)])
    else:
        report["homogeneous"] = None

    if violations:
        report["verdict"] = "violation"
        report["exit_code"] = EXIT_VIOLATION
    elif fit.affine:
        report["verdict"] = "affine"
        report["exit_code"] = EXIT_OK
    else:
        report["verdict"] = "nonlinear"
        report["exit_code"] = EXIT_NEGATIVE
    return report


# ---------------------------------------------------------------------------
# command handlers: each returns (report_dict, exit_code)


def _cmd_extreme_rays(args):
    cone = parse_cone(load_json(args.cone))
    if not cone.pointed:
        raise NotPointed("cone is not pointed; extreme rays are undefined")
    report = {"command": "extreme-rays", "seed": args.seed, "samples": args.samples}
    report.update(cone_report(cone))
    return report, EXIT_OK


def _cmd_classify(args):
    cone = parse_cone(load_json(args.cone))
    reports = classify_engaged(cone)
    verdict = hypothesis_check(cone)
    payload = {
        "command": "classify",
        "seed": args.seed,
        "samples": args.samples,
        "rays": [
            {
                "ray_index": r.ray_index,
                "generator": vec_to_json(r.generator),
                "engaged": r.engaged,
                "certificate": _certificate_json(r.certificate),
            }
            for r in reports
        ],
        "hypothesis": {
            "directed": verdict.directed,
            "pointed": verdict.pointed,
            "all_extreme_rays_engaged": verdict.all_extreme_rays_engaged,
            "holds": verdict.holds,
            "disengaged_witness": verdict.disengaged_witness,
        },
    }
    return payload, EXIT_OK if verdict.holds else EXIT_NEGATIVE


def _cmd_hypothesis(args):
    cone = parse_cone(load_json(args.cone))
    verdict = hypothesis_check(cone)
    payload = {
        "command": "hypothesis",
        "seed": args.seed,
        "samples": args.samples,
        "directed": verdict.directed,
        "pointed": verdict.pointed,
        "all_extreme_rays_engaged": verdict.all_extreme_rays_engaged,
        "holds": verdict.holds,
        "disengaged_witness": verdict.disengaged_witness,
    }
    return payload, EXIT_OK if verdict.holds else EXIT_NEGATIVE


def _cmd_bound(args, kind: str):
    cone = parse_cone(load_json(args.cone))
    points = parse_points(load_json(args.points))
    res = supremum(cone, points) if kind == "supremum" else infimum(cone, points)
    payload = {"command": kind, "seed": args.seed, "samples": args.samples,
               "result": _sup_result_json(res)}
    return payload, EXIT_OK if res.exists else EXIT_UNDEFINED


def _cmd_evalexpr(args):
    cone = parse_cone(load_json(args.cone))
    expr = parse_expr(load_json(args.expr))
    base = {"command": "evalexpr", "seed": args.seed, "samples": args.samples}
    try:
        value = eval_infsup(cone, expr)
    except UndefinedLattice as exc:
        base["error"] = "undefined_lattice"
        base["path"] = list(exc.path)
        if exc.witnesses:
            base["witnesses"] = [vec_to_json(w) for w in exc.witnesses]
        return base, EXIT_UNDEFINED
    base["value"] = vec_to_json(value)
    return base, EXIT_OK


def _cmd_unitnorm(args):
    cone = parse_cone(load_json(args.cone))
    u = _parse_vec_arg(args.u, cone.dim)
    x = _parse_vec_arg(args.x, cone.dim)
    value = order_unit_norm(cone, u, x)
    payload = {"command": "unitnorm", "seed": args.seed, "samples": args.samples,
               "u": vec_to_json(as_vec(u)), "x": vec_to_json(as_vec(x)),
               "norm": fmt_rational(value)}
    return payload, EXIT_OK


def _cmd_check_iso(args):
    cone = parse_cone(load_json(args.cone))
    spec = parse_iso(load_json(args.iso))
    if spec.source_cone != cone:
        raise ParseError("iso source cone does not match the cone file")
    workers = args.workers if args.parallel else 1
    report = run_full_battery(cone, spec, args.samples, args.seed, workers=workers)
    report["command"] = "check-iso"
    return report, report["exit_code"]


def _cmd_psd(args):
    tol = psd_mod.PsdTolerance(eig_tol=args.tol, cmp_tol=args.tol) if args.tol else psd_mod.DEFAULT_TOL
    base = {"command": f"psd-{args.psd_command}", "seed": args.seed, "samples": args.samples}
    if args.psd_command == "witness":
        x = np.array([float(c) for c in _parse_vec_arg(args.x, args.n)])
        nrm = float(np.linalg.norm(x))
        if nrm == 0:
            raise ParseError("witness direction cannot be zero")
        w = psd_mod.engagement_witness(x / nrm, tol)
        base.update({
            "x": [float(c) for c in x / nrm],
            "y": [float(c) for c in w.y],
            "z": [float(c) for c in w.z],
            "w": [float(c) for c in w.w],
            "residual": w.residual,
        })
        return base, EXIT_OK
    if args.psd_command == "supcheck":
        b = _parse_matrix_arg(args.b, args.n)
        verdict = psd_mod.identity_sup_check(b.n, b, m=args.samples, seed=args.seed, tol=tol)
        base.update({
            "verdict": verdict.verdict,
            "lambda_min": verdict.lambda_min,
            "samples_used": verdict.samples,
        })
        if verdict.witness is not None:
            base["witness"] = [float(c) for c in verdict.witness]
        return base, EXIT_OK if verdict.verdict == psd_mod.CONSISTENT else EXIT_NEGATIVE
    if args.psd_command == "conj":
        a = _parse_matrix_arg(args.a, args.n)
        q = _parse_matrix_arg(args.q, a.n)
        t = psd_mod.conjugation_iso(a, tol)
        image = t.apply(q)
        back = t.invert(image)
        base.update({
            "image": [[float(v) for v in row] for row in image.array],
            "roundtrip_error": float(np.max(np.abs(back.array - q.array))),
        })
        return base, EXIT_OK
    if args.psd_command == "approx":
        a = _parse_matrix_arg(args.a, args.n)
        rows = psd_mod.infsup_approx(a, k_max=args.kmax, seed=args.seed)
        base["table"] = [{"k": r.k, "d_k": r.d_k, "e_k": r.e_k} for r in rows]
        base["csv"] = "k,d_k,e_k\n" + "".join(f"{r.k},{r.d_k!r},{r.e_k!r}\n" for r in rows)
        return base, EXIT_OK
    raise ParseError(f"unknown psd subcommand {args.psd_command!r}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all sampling")
    common.add_argument("--samples", type=int, default=10000, help="sampling count")
    common.add_argument("--tol", type=float, default=None, help="tolerance override (psd)")
    common.add_argument("--out", default=None, help="write the JSON report to this path")
    common.add_argument("--parallel", action="store_true",
                        help="fan the battery out across worker threads (same report)")
    common.add_argument("--workers", type=int, default=4, help="worker count for --parallel")
    common.add_argument("--summary", action="store_true",
                        help="also print a human-readable summary to stderr")

    p = argparse.ArgumentParser(prog="conelab",
                                description="exact cone order laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extreme-rays", parents=[common],
                       help="normalized extreme generators and facets")
    s.add_argument("cone")
    s = sub.add_parser("classify", parents=[common],
                       help="engaged/disengaged report plus hypothesis verdict")
    s.add_argument("cone")
    s = sub.add_parser("hypothesis", parents=[common],
                       help="linearity-theorem hypothesis verdict")
    s.add_argument("cone")
    s = sub.add_parser("supremum", parents=[common], help="least upper bound of a point set")
    s.add_argument("cone")
    s.add_argument("points")
    s = sub.add_parser("infimum", parents=[common], help="greatest lower bound of a point set")
    s.add_argument("cone")
    s.add_argument("points")
    s = sub.add_parser("evalexpr", parents=[common], help="evaluate an inf-sup expression")
    s.add_argument("cone")
    s.add_argument("expr")
    s = sub.add_parser("unitnorm", parents=[common], help="order-unit norm |x|_u")
    s.add_argument("cone")
    s.add_argument("-u", required=True, help="order unit, e.g. '1,1' or 'e1'")
    s.add_argument("-x", required=True, help="vector to measure")
    s = sub.add_parser("check-iso", parents=[common], help="full order-isomorphism battery")
    s.add_argument("cone")
    s.add_argument("iso")

    s = sub.add_parser("psd", help="PSD cone demonstrations")
    ps = s.add_subparsers(dest="psd_command", required=True)
    w = ps.add_parser("witness", parents=[common],
                      help="engagement identity P_x = P_y + P_z - P_w")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--x", required=True)
    sc = ps.add_parser("supcheck", parents=[common],
                       help="identity-as-supremum consistency check")
    sc.add_argument("--n", type=int, default=None)
    sc.add_argument("--b", required=True)
    cj = ps.add_parser("conj", parents=[common], help="conjugation isomorphism T_A(Q)")
    cj.add_argument("--n", type=int, default=None)
    cj.add_argument("--a", required=True)
    cj.add_argument("--q", required=True)
    ap = ps.add_parser("approx", parents=[common], help="inf/sup convergence table (CSV)")
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--a", required=True)
    ap.add_argument("--kmax", type=int, default=16)
    return p


_HANDLERS = {
    "extreme-rays": _cmd_extreme_rays,
    "classify": _cmd_classify,
    "hypothesis": _cmd_hypothesis,
    "supremum": lambda a: _cmd_bound(a, "supremum"),
    "infimum": lambda a: _cmd_bound(a, "infimum"),
    "evalexpr": _cmd_evalexpr,
    "unitnorm": _cmd_unitnorm,
    "check-iso": _cmd_check_iso,
    "psd": _cmd_psd,
}


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = _HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"conelab: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotPointed as exc:
        print(f"conelab: {exc}", file=sys.stderr)
        return EXIT_NOT_POINTED
    except NotPositiveDefinite as exc:
        print(f"conelab: {exc}", file=sys.stderr)
        return EXIT_NOT_PD
    except UndefinedLattice as exc:
        print(f"conelab: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except ConeOrderError as exc:
        print(f"conelab: input error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"conelab: invalid value: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if args.command == "psd" and getattr(args, "psd_command", None) == "approx" and args.out:
        _emit(args, report.pop("csv"))
        sys.stdout.write(canonical_dumps(report))
    else:
        _emit(args, canonical_dumps(report))
    if args.summary:
        verdict = report.get("verdict")
        if verdict is None and "hypothesis" in report:
            verdict = "hypothesis holds" if report["hypothesis"]["holds"] else "hypothesis fails"
        if verdict is None and "holds" in report:
            verdict = "hypothesis holds" if report["holds"] else "hypothesis fails"
        if verdict is None:
            verdict = report.get("result", {}).get("outcome", "ok")
        print(f"conelab {args.command}: {verdict} (exit {code})", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
