"""Command-line front end.

Every command prints one JSON document on stdout (``eval`` can print CSV for
grid sweeps). Exit codes: 0 ok, 1 a ``check`` case failed, 2 domain or input
error, 3 budget exhausted, 4 point on (or too close to) a pole.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .cache import ValueCache, make_key, resolve_path
from .coefficients import CoeffTable, L_n, hessenberg_det
from .errors import BudgetError, DomainError, PoleProximityError, SingularCoefficientError
from .kernel import QParam, as_args
from .matrices import KINDS, ContinuationPlan, auto_K, build_block, continue_eval
from .poles import HyperplaneId, pole_distance, pole_locus
from .residues import numeric_residue, residue_hjk
from .series import EvalResult, ModelKind, SumBudget, eval_series
from .suites import SUITES, run_suite
from .textio import ArgParseError, format_complex, format_vector, json_complex, json_number, parse_complex, parse_vector

EXIT_OK, EXIT_SUITE, EXIT_DOMAIN, EXIT_BUDGET, EXIT_POLE = 0, 1, 2, 3, 4


class CliFailure(Exception):
    def __init__(self, code: int, payload: dict):
        self.code = code
        self.payload = payload
        super().__init__(payload.get("message", ""))


@dataclass
class CliConfig:
    q: Optional[QParam]
    args: Optional[tuple]
    model: ModelKind
    tol: Optional[float]
    K: Optional[int]
    cache_path: Optional[str]
    seed: int
    output: str

    @classmethod
    def from_namespace(cls, ns) -> "CliConfig":
        args = getattr(ns, "args", None)
        return cls(
            q=QParam(ns.q),
            args=as_args(parse_vector(args)) if args and ";" not in args else None,
            model=ModelKind.parse(getattr(ns, "model", "sz")),
            tol=getattr(ns, "tol", None),
            K=getattr(ns, "K", None),
            cache_path=str(resolve_path(getattr(ns, "cache_path", None)) or "") or None,
            seed=getattr(ns, "seed", 0),
            output=getattr(ns, "output", "json"),
        )


def _q_arg(text: str) -> float:
    try:
        q = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"q must be a number, got {text!r}") from None
    if not 0.0 < q < 1.0:
        raise argparse.ArgumentTypeError(f"q must lie in (0, 1), got {q}")
    return q


def _hp_json(h: HyperplaneId) -> dict:
    return h.as_dict()


def _open_cache(ns) -> Optional[ValueCache]:
    if getattr(ns, "no_cache", False):
        return None
    path = resolve_path(getattr(ns, "cache_path", None))
    return ValueCache(path) if path else None


def _eval_one(model: ModelKind, s: tuple, t: Optional[tuple], q: float, budget: SumBudget,
              cache: Optional[ValueCache]) -> tuple:
    args_text = format_vector(s) + (";t=" + format_vector(t) if t else "")
    key = make_key(model.value, q, args_text, budget.tol)
    if cache is not None:
        rec = cache.get(key)
        if rec is not None:
            res = EvalResult(complex(rec.value_re, rec.value_im), rec.err_est, rec.terms, rec.converged)
            return res, True
    res = eval_series(model, s, q, budget, t_opt=t)
    if cache is not None and res.converged:
        cache.put(key, res.value, res.err_est, res.terms_used, res.converged)
    return res, False


def _result_doc(s, res: EvalResult, cached: bool) -> dict:
    return {"args": [format_complex(z) for z in s], "value": json_complex(res.value),
            "err_est": res.err_est, "terms": res.terms_used, "converged": res.converged,
            "cached": cached}


def cmd_eval(ns) -> dict | str:
    model = ModelKind.parse(ns.model)
    budget = SumBudget(max_outer_index=ns.max_terms, tol=ns.tol)
    cache = _open_cache(ns)
    points = [parse_vector(p) for p in ns.args.split(";") if p.strip()]
    t = parse_vector(ns.t) if ns.t else None
    grid = len(points) > 1 or ns.output == "csv"
    results = []
    for s in points:
        try:
            res, cached = _eval_one(model, s, t, ns.q, budget, cache)
        except DomainError as exc:
            raise CliFailure(EXIT_DOMAIN, {"type": "domain", "message": str(exc),
                                           "args": format_vector(s)}) from None
        if not res.converged:
            raise CliFailure(EXIT_BUDGET, {"type": "budget", "message": "series did not reach tol",
                                           "args": format_vector(s), "partial": _result_doc(s, res, False)})
        results.append((s, res, cached))
    if ns.output == "csv":
        depth = max(len(s) for s, _, _ in results)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = []
        for i in range(1, depth + 1):
            header += [f"re(s{i})", f"im(s{i})"]
        writer.writerow(header + ["re(value)", "im(value)", "err_est"])
        for s, res, _ in results:
            row = []
            for z in s:
                row += [repr(z.real), repr(z.imag)]
            row += [""] * (2 * depth - len(row))
            writer.writerow(row + [repr(res.value.real), repr(res.value.imag), repr(res.err_est)])
        return buf.getvalue()
    base = {"command": "eval", "model": model.value, "q": ns.q, "tol": ns.tol}
    if grid:
        base["points"] = [_result_doc(s, r, c) for s, r, c in results]
        return base
    s, res, cached = results[0]
    base.update(_result_doc(s, res, cached))
    return base


def _pole_failure(exc: PoleProximityError, q: float) -> CliFailure:
    dist, nearest = pole_distance(exc.point, q)
    return CliFailure(EXIT_POLE, {"type": "pole", "message": str(exc),
                                  "hyperplanes": [_hp_json(h) for h in exc.hyperplanes],
                                  "nearest": _hp_json(nearest), "distance": dist})


def cmd_continue(ns) -> dict:
    s = parse_vector(ns.args)
    plan = ContinuationPlan(K=ns.K, tail_tol=ns.tol)
    cache = _open_cache(ns)
    key = make_key("sz-continued", ns.q, format_vector(s) + (f";K={ns.K}" if ns.K else ""), ns.tol)
    if cache is not None:
        rec = cache.get(key)
        if rec is not None:
            return {"command": "continue", "q": ns.q, "args": [format_complex(z) for z in s],
                    "value": {"re": rec.value_re, "im": rec.value_im}, "err_est": rec.err_est,
                    "K": ns.K if ns.K is not None else auto_K(s), "cached": True, "stats": None}
    try:
        res = continue_eval(s, ns.q, plan)
    except PoleProximityError as exc:
        raise _pole_failure(exc, ns.q) from None
    except SingularCoefficientError as exc:
        raise CliFailure(EXIT_POLE, {"type": "pole", "message": str(exc)}) from None
    if cache is not None:
        cache.put(key, res.value, res.err_est, res.terms_used)
    info = res.info
    return {"command": "continue", "q": ns.q, "args": [format_complex(z) for z in s],
            "value": json_complex(res.value), "err_est": res.err_est, "K": info["K"], "cached": False,
            "stats": {"calls": info["calls"], "max_depth": info["max_depth_stack"],
                      "memo_hits": info["memo_hits"], "direct": info["direct"],
                      "tail_terms": info["tail_terms"]}}


def cmd_residue(ns) -> dict:
    s = parse_vector(ns.args)
    if ns.j is not None:
        if ns.k is None:
            raise CliFailure(EXIT_DOMAIN, {"type": "domain", "message": "--j needs --k"})
        hits = [HyperplaneId(ns.j, ns.k, ns.m)]
    else:
        hits = pole_locus(ModelKind.SZ, s, ns.q, ns.pole_tol)
        if not hits:
            raise CliFailure(EXIT_DOMAIN, {"type": "domain",
                                           "message": "point is not on a polar hyperplane; pass --j/--k"})
    out = []
    try:
        for h in hits:
            if not 1 <= h.j <= len(s):
                raise DomainError(f"j={h.j} out of range for depth {len(s)}")
            entry = {"hyperplane": _hp_json(h),
                     "value": json_complex(residue_hjk(h.j, h.k, s, ns.q, h.lattice_m)),
                     "method": "closed"}
            if ns.numeric:
                num = numeric_residue(h, s, ns.q)
                entry["numeric"] = {"value": json_complex(num.value), "err_est": num.err_est}
            out.append(entry)
    except (PoleProximityError, SingularCoefficientError) as exc:
        raise CliFailure(EXIT_POLE, {"type": "pole", "message": str(exc)}) from None
    return {"command": "residue", "q": ns.q, "args": [format_complex(z) for z in s], "residues": out}


def cmd_poles(ns) -> dict:
    model = ModelKind.parse(ns.model)
    s = parse_vector(ns.args)
    hits = pole_locus(model, s, ns.q, ns.pole_tol)
    doc = {"command": "poles", "model": model.value, "q": ns.q, "args": [format_complex(z) for z in s],
           "on_locus": bool(hits), "hyperplanes": [_hp_json(h) for h in hits]}
    if model is ModelKind.SZ:
        dist, nearest = pole_distance(s, ns.q)
        doc["nearest"] = {"hyperplane": _hp_json(nearest), "distance": dist}
    return doc


def cmd_coeff(ns) -> dict:
    t = parse_complex(ns.t)
    if ns.n < 1:
        raise CliFailure(EXIT_DOMAIN, {"type": "domain", "message": "--n must be >= 1"})
    try:
        table = CoeffTable.fill(t, ns.q, ns.n)
        doc = {"command": "coeff", "q": ns.q, "n": ns.n, "t": format_complex(t),
               "L_n": json_number(L_n(ns.n, t, ns.q, literal=ns.literal)),
               "R": json_number(table.R(ns.n)), "H": json_number(table.H(ns.n))}
        if ns.n >= 2:
            doc["hessenberg_det"] = json_number(hessenberg_det(ns.n, t, ns.q))
    except SingularCoefficientError as exc:
        raise CliFailure(EXIT_POLE, {"type": "pole", "message": str(exc)}) from None
    return doc


def cmd_matrix(ns) -> dict:
    t = parse_complex(ns.t)
    try:
        block = build_block(ns.which, t, ns.K, ns.J, ns.q, method=ns.method)
    except SingularCoefficientError as exc:
        raise CliFailure(EXIT_POLE, {"type": "pole", "message": str(exc)}) from None
    except ValueError as exc:
        raise CliFailure(EXIT_DOMAIN, {"type": "domain", "message": str(exc)}) from None
    rows = [[json_number(x) for x in row] for row in block.full()]
    return {"command": "matrix", "which": ns.which.upper(), "q": ns.q, "t": format_complex(t),
            "K": ns.K, "J": ns.J, "method": ns.method, "matrix": rows}


def cmd_check(ns) -> dict:
    cases = run_suite(ns.suite, ns.samples, ns.seed)
    failed = [c for c in cases if not c["passed"]]
    doc = {"command": "check", "suite": ns.suite, "samples": ns.samples, "seed": ns.seed,
           "passed": not failed, "n_cases": len(cases), "n_failed": len(failed), "cases": cases}
    if failed:
        raise CliFailure(EXIT_SUITE, dict(doc, type="suite", message=f"{len(failed)} case(s) failed"))
    return doc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=_q_arg, default=0.5, help="deformation parameter in (0, 1)")
    common.add_argument("--cache-path", help="JSON-lines value cache ($QMZ_CACHE overrides)")
    common.add_argument("--no-cache", action="store_true")

    p = argparse.ArgumentParser(prog="qmz", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qmz {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="direct series on the convergence domain")
    e.add_argument("--model", default="sz", help="sz, sz_star, bz or fq")
    e.add_argument("--args", required=True, help='comma-separated complex args; ";" separates grid points')
    e.add_argument("--t", help="second vector for --model fq")
    e.add_argument("--tol", type=float, default=1e-12)
    e.add_argument("--max-terms", type=int, default=10_000)
    e.add_argument("--output", choices=("json", "csv"), default="json")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("continue", parents=[common], help="analytic continuation of the SZ model")
    c.add_argument("--args", required=True)
    c.add_argument("--K", type=int, help="split index override")
    c.add_argument("--tol", type=float, default=1e-13, help="tail stopping threshold")
    c.set_defaults(func=cmd_continue)

    r = sub.add_parser("residue", parents=[common], help="residue along a polar hyperplane")
    r.add_argument("--args", required=True)
    r.add_argument("--j", type=int)
    r.add_argument("--k", type=int)
    r.add_argument("--m", type=int, default=0, help="imaginary lattice index")
    r.add_argument("--numeric", action="store_true", help="also report the extrapolated limit")
    r.add_argument("--pole-tol", type=float, default=1e-8)
    r.set_defaults(func=cmd_residue)

    po = sub.add_parser("poles", parents=[common], help="hyperplanes through a point")
    po.add_argument("--model", default="sz", help="sz or bz")
    po.add_argument("--args", required=True)
    po.add_argument("--pole-tol", type=float, default=1e-8)
    po.set_defaults(func=cmd_poles)

    co = sub.add_parser("coeff", parents=[common], help="L_n, R_{1,n} and H_{1,n} at t")
    co.add_argument("--n", type=int, required=True)
    co.add_argument("--t", required=True)
    co.add_argument("--literal", action="store_true", help="forward/backward arrangements only")
    co.set_defaults(func=cmd_coeff)

    m = sub.add_parser("matrix", parents=[common], help="truncated translation matrices")
    m.add_argument("--which", choices=KINDS + tuple(k.lower() for k in KINDS), required=True)
    m.add_argument("--t", required=True)
    m.add_argument("--K", type=int, required=True)
    m.add_argument("--J", type=int, default=0, help="extra columns beyond K")
    m.add_argument("--method", choices=("closed", "backsub"), default="closed")
    m.set_defaults(func=cmd_matrix)

    ch = sub.add_parser("check", parents=[common], help="randomized verification suites")
    ch.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    ch.add_argument("--samples", type=int, default=20)
    ch.add_argument("--seed", type=int, default=0)
    ch.set_defaults(func=cmd_check)
    return p


def _emit(doc, stream):
    if isinstance(doc, str):
        stream.write(doc)
    else:
        stream.write(json.dumps(doc, sort_keys=True) + "\n")


_VALUE_FLAGS = ("--args", "--t")


def _glue_negative_values(argv: Sequence[str]) -> list:
    """``--args -1,2`` -> ``--args=-1,2`` so argparse does not read the value as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = parser.parse_args(_glue_negative_values(argv))
    try:
        CliConfig.from_namespace(ns)
        doc = ns.func(ns)
    except CliFailure as exc:
        _emit({"error": exc.payload}, sys.stdout)
        return exc.code
    except ArgParseError as exc:
        _emit({"error": {"type": "parse", "message": str(exc), "text": exc.text,
                         "position": exc.position}}, sys.stdout)
        return EXIT_DOMAIN
    except DomainError as exc:
        _emit({"error": {"type": "domain", "message": str(exc)}}, sys.stdout)
        return EXIT_DOMAIN
    except BudgetError as exc:
        _emit({"error": {"type": "budget", "message": str(exc)}}, sys.stdout)
        return EXIT_BUDGET
    except PoleProximityError as exc:
        _emit({"error": {"type": "pole", "message": str(exc),
                         "hyperplanes": [_hp_json(h) for h in exc.hyperplanes]}}, sys.stdout)
        return EXIT_POLE
    _emit(doc, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
