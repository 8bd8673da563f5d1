"""Command-line front end: JSON in, JSON report out, deterministic by seed.

Exit codes: 0 success or verdict pass, 1 verdict fail, 2 usage or input
error, 3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__
from .approx import ApproxResult, SeparableGram, approx_separable
from .blockpoly import BlockPolynomial
from .complexes import WeightedComplex, is_connected
from .decomposition import OmegaGDecomposition, symmetrize_free, blending_difference
from .errors import GuardExceeded, OmegaError
from .familycheck import LocalFamily, bounded_positivity_check
from .positivity import (
    GramRepresentation,
    caratheodory_bound,
    factorizability_solve,
    gram_map,
    invariant_sos_family,
)
from .radpoly import RadPoly
from .scalars import ONE
from .symmetry import SymmetryAction, free_refinement, is_blending, is_free
from .tensorbridge import DenseTensor, poly_from_tensor, separations_report, tensor_positivity

EXIT_OK = 0
EXIT_VERDICT_FAIL = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


class _Run:
    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}

    def read(self, path: str) -> dict:
        obj = _load_json(path)
        self.inputs[path] = _digest(path)
        return obj

    def report(self, command: str, result: dict, code: int = EXIT_OK) -> int:
        envelope = {
            "version": __version__,
            "command": command,
            "seed": getattr(self.args, "seed", 0),
            "inputs": self.inputs,
            "result": result,
        }
        print(json.dumps(envelope, sort_keys=True))
        return code

    def pretty(self, *lines: str) -> None:
        if getattr(self.args, "pretty", False):
            for line in lines:
                print(line, file=sys.stderr)


def _radpoly_obj(p: RadPoly) -> list[dict]:
    out = []
    for s, poly in p.parts:
        entry = {"poly": poly.to_obj()}
        if s != ONE:
            entry["scale"] = s.to_obj()
        out.append(entry)
    return out


def _load_bundle(run: _Run, path: str):
    obj = run.read(path)
    cplx = WeightedComplex.from_obj(obj["complex"])
    action = None
    if obj.get("action"):
        action = SymmetryAction.from_obj(cplx, obj["action"],
                                         max_group=run.args.max_group)
    return obj, cplx, action


def _cmd_complex(run: _Run) -> int:
    obj = run.read(run.args.file)
    cplx = WeightedComplex.from_obj(obj)
    result = {
        "complex": cplx.to_obj(),
        "vertex_count": cplx.vertex_count,
        "facet_count": len(cplx.facets),
        "multifacet_count": cplx.label_count,
        "connected": is_connected(cplx),
    }
    run.pretty(f"complex on {cplx.vertex_count} vertices, "
               f"{cplx.label_count} multifacet labels")
    return run.report(f"complex {run.args.subcmd}", result)


def _cmd_action(run: _Run) -> int:
    cobj = run.read(run.args.complex)
    cplx = WeightedComplex.from_obj(cobj)
    aobj = run.read(run.args.action)
    action = SymmetryAction.from_obj(cplx, aobj, max_group=run.args.max_group)
    if run.args.subcmd == "check":
        result = {
            "order": len(action),
            "free": is_free(action),
            "blending": is_blending(action, run.args.max_assignments),
            "label_orbits": action.label_orbits(),
            "vertex_orbits": action.vertex_orbits(),
        }
        run.pretty(f"group of order {len(action)}, free={result['free']}, "
                   f"blending={result['blending']}")
        return run.report("action check", result)
    refined = free_refinement(action)
    result = {"complex": refined.complex.to_obj(), "action": refined.to_obj(),
              "free": is_free(refined)}
    return run.report("action refine", result)


def _cmd_dec(run: _Run) -> int:
    if run.args.subcmd == "symmetrize":
        obj, cplx, action = _load_bundle(run, run.args.file)
        if action is None:
            raise OmegaError("symmetrize needs an action in the bundle")
        terms = [tuple(BlockPolynomial.from_obj(p) for p in term)
                 for term in obj["terms"]]
        if run.args.mode == "free":
            dec = symmetrize_free(terms, action)
            result = {"decomposition": dec.to_obj(), "index_size": dec.index_size}
        else:
            q1, q2 = blending_difference(terms, action)
            result = {"plus": q1.to_obj(), "minus": q2.to_obj(),
                      "minus_empty": q2.local_count() == 0}
        return run.report(f"dec symmetrize --mode {run.args.mode}", result)

    obj, cplx, action = _load_bundle(run, run.args.file)
    dec = OmegaGDecomposition.from_obj(cplx, action, obj["decomposition"])
    contraction = dec.contract(run.args.max_assignments)
    result: dict = {"contraction": _radpoly_obj(contraction),
                    "index_size": dec.index_size}
    code = EXIT_OK
    if run.args.subcmd == "verify":
        result["symmetry_ok"] = dec.check_symmetry(run.args.eq_tol)
        if not result["symmetry_ok"]:
            code = EXIT_VERDICT_FAIL
    if obj.get("expected") is not None:
        expected = RadPoly.from_poly(BlockPolynomial.from_obj(obj["expected"]))
        if contraction.mode == "rational" and expected.mode == "rational":
            matches = contraction == expected
        else:
            matches = contraction.allclose(expected, run.args.eq_tol)
        result["matches_expected"] = matches
        if not matches:
            code = EXIT_VERDICT_FAIL
    run.pretty(f"index {dec.index_size}, {dec.local_count()} stored locals")
    return run.report(f"dec {run.args.subcmd}", result, code)


def _cmd_pos(run: _Run) -> int:
    if run.args.subcmd == "bound":
        bound = caratheodory_bound(run.args.m, run.args.d, run.args.n, run.args.g)
        run.pretty(f"separable index bound: {bound}")
        return run.report("pos bound", {"bound": bound})
    if run.args.subcmd == "gram-map":
        gram = GramRepresentation.from_obj(run.read(run.args.file))
        return run.report("pos gram-map", {"polynomial": gram_map(gram).to_obj()})
    if run.args.subcmd == "factorizable":
        cplx = WeightedComplex.from_obj(run.read(run.args.complex))
        action = SymmetryAction.from_obj(cplx, run.read(run.args.action),
                                         max_group=run.args.max_group)
        sol = factorizability_solve(cplx, action, run.args.index_size,
                                    run.args.max_assignments)
        if sol is None:
            return run.report("pos factorizable", {"feasible": False},
                              EXIT_VERDICT_FAIL)
        values = {f"site{site}:{','.join(map(str, beta))}": v
                  for (site, beta), v in sorted(sol.values.items())}
        return run.report("pos factorizable",
                          {"feasible": True, "residual": sol.residual,
                           "constants": values})
    # sos-family
    gram = GramRepresentation.from_obj(run.read(run.args.gram))
    cplx = WeightedComplex.from_obj(run.read(run.args.complex))
    action = SymmetryAction.from_obj(cplx, run.read(run.args.action),
                                     max_group=run.args.max_group)
    family = invariant_sos_family(gram, action, run.args.psd_tol)
    target = gram_map(gram)
    recon = family.sum_squares()
    err = max((abs(recon.terms.get(k, 0.0) - target.terms.get(k, 0.0))
               for k in set(recon.terms) | set(target.terms)), default=0.0)
    result = {
        "members": {":".join(map(str, k)): q.to_obj() for k, q in
                    sorted(family.polys.items(), key=lambda kv: repr(kv[0]))},
        "sum_squares_error": err,
        "family_invariant": family.family_invariant(action, run.args.eq_tol),
    }
    return run.report("pos sos-family", result)


def _cmd_bridge(run: _Run) -> int:
    if run.args.subcmd == "to-poly":
        tensor = DenseTensor.from_obj(run.read(run.args.file))
        poly = poly_from_tensor(tensor)
        result = {"polynomial": poly.to_obj(),
                  "positivity": {k: (str(v) if k == "min_entry" else
                                     (list(v) if isinstance(v, tuple) else v))
                                 for k, v in tensor_positivity(tensor).items()}}
        return run.report("bridge to-poly", result)
    report = separations_report(run.args.m, seed=run.args.seed)
    run.pretty(f"m={run.args.m}: rank {report['bipartite_rank']}, "
               f"psd index {report['psd_index']}, "
               f"nn bounds [{report['nn_lower_bound']}, {report.get('nn_upper_bound', '?')}]")
    return run.report("bridge separations", report)


def _cmd_family(run: _Run) -> int:
    fam = LocalFamily.from_obj(run.read(run.args.file))
    report = bounded_positivity_check(fam, run.args.n_max, run.args.n_min,
                                      run.args.max_assignments)
    run.pretty(*(f"n={s.n}: min entry {s.min_entry} at {s.witness}"
                 for s in report.sizes))
    code = EXIT_VERDICT_FAIL if report.violation_found else EXIT_OK
    return run.report("family check", report.to_obj(), code)


def _cmd_approx(run: _Run) -> int:
    obj, cplx, action = _load_bundle(run, run.args.file)
    if action is None:
        raise OmegaError("approx needs an action in the bundle")
    gram = GramRepresentation.from_obj(obj["gram"])
    terms = [(t["weight"], [np.asarray(f, dtype=float).reshape(gram.D, gram.D)
                            for f in t["factors"]])
             for t in obj["witness"]]
    sg = SeparableGram(gram, terms)
    result: ApproxResult = approx_separable(sg, action, run.args.epsilon,
                                            seed=run.args.seed)
    run.pretty(f"error {result.error_schatten2:.4g} with "
               f"{result.terms_used} sampled terms")
    return run.report("approx run", result.to_obj())


def _cmd_accept(run: _Run) -> int:
    from .acceptance import run_all
    results = run_all(printer=lambda line: print(line, file=sys.stderr))
    result = {"criteria": [{"number": r.number, "name": r.name,
                            "passed": r.passed, "details": r.details}
                           for r in results],
              "all_passed": all(r.passed for r in results)}
    return run.report("accept", result,
                      EXIT_OK if result["all_passed"] else EXIT_VERDICT_FAIL)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omega", allow_abbrev=False,
                                     description="invariant polynomial decompositions")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--pretty", action="store_true",
                        help="human-readable summary on stderr")
    parser.add_argument("--psd-tol", dest="psd_tol", type=float, default=1e-9)
    parser.add_argument("--eq-tol", dest="eq_tol", type=float, default=1e-9)
    parser.add_argument("--max-assignments", dest="max_assignments", type=int,
                        default=10**7)
    parser.add_argument("--max-group", dest="max_group", type=int, default=10080)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complex")
    ps = p.add_subparsers(dest="subcmd", required=True)
    for name in ("build", "info"):
        q = ps.add_parser(name)
        q.add_argument("file")

    p = sub.add_parser("action")
    ps = p.add_subparsers(dest="subcmd", required=True)
    for name in ("check", "refine"):
        q = ps.add_parser(name)
        q.add_argument("complex")
        q.add_argument("action")

    p = sub.add_parser("dec")
    ps = p.add_subparsers(dest="subcmd", required=True)
    for name in ("contract", "verify"):
        q = ps.add_parser(name)
        q.add_argument("file")
    q = ps.add_parser("symmetrize")
    q.add_argument("file")
    q.add_argument("--mode", choices=("free", "blending"), required=True)

    p = sub.add_parser("pos")
    ps = p.add_subparsers(dest="subcmd", required=True)
    q = ps.add_parser("gram-map")
    q.add_argument("file")
    q = ps.add_parser("sos-family")
    q.add_argument("--gram", required=True)
    q.add_argument("--complex", required=True)
    q.add_argument("--action", required=True)
    q = ps.add_parser("factorizable")
    q.add_argument("--complex", required=True)
    q.add_argument("--action", required=True)
    q.add_argument("--index-size", dest="index_size", type=int, required=True)
    q = ps.add_parser("bound")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--g", type=int, required=True)

    p = sub.add_parser("bridge")
    ps = p.add_subparsers(dest="subcmd", required=True)
    q = ps.add_parser("to-poly")
    q.add_argument("file")
    q = ps.add_parser("separations")
    q.add_argument("--m", type=int, required=True)

    p = sub.add_parser("family")
    ps = p.add_subparsers(dest="subcmd", required=True)
    q = ps.add_parser("check")
    q.add_argument("file")
    q.add_argument("--n-max", dest="n_max", type=int, required=True)
    q.add_argument("--n-min", dest="n_min", type=int, default=1)

    p = sub.add_parser("approx")
    ps = p.add_subparsers(dest="subcmd", required=True)
    q = ps.add_parser("run")
    q.add_argument("file")
    q.add_argument("--epsilon", type=float, required=True)

    sub.add_parser("accept")
    return parser


_HANDLERS = {
    "complex": _cmd_complex,
    "action": _cmd_action,
    "dec": _cmd_dec,
    "pos": _cmd_pos,
    "bridge": _cmd_bridge,
    "family": _cmd_family,
    "approx": _cmd_approx,
    "accept": _cmd_accept,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    run = _Run(args)
    try:
        return _HANDLERS[args.command](run)
    except GuardExceeded as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True))
        return EXIT_GUARD
    except OmegaError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True))
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
