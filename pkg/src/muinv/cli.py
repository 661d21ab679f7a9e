"""Command line entry point: ``muinv <subcommand> ...``.

Exit status: 0 on success, 1 on a computation error (reported as JSON) or a
failed acceptance criterion, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field

from . import census as cs
from . import characters as ch
from . import iwasawa as iw
from . import prationality as pr
from . import propgroups as pg
from . import suite
from ._json import SCHEMA_VERSION, dumps
from .errors import ComputationError, DomainError
from .numberfield import parse_field
from .padic import DEFAULT_PRECISION


@dataclass
class RunConfig:
    precision_N: int = DEFAULT_PRECISION
    truncation_M: int = iw.DEFAULT_M
    caps: dict = field(
        default_factory=lambda: {
            "enumeration": pg.ENUMERATION_CAP,
            "sieve": cs.SIEVE_CAP,
            "iwasawa_level": iw.LEVEL_CAP,
            "regularity": pr.REGULARITY_CAP,
        }
    )
    output: str = "text"
    cache_dir: str | None = None
    workers: int = 1
    assumptions: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def _emit(payload: dict, cfg: RunConfig, command: str, text_lines=None):
    if cfg.output == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg.to_dict(), "result": payload}
        print(dumps(doc))
    else:
        for line in text_lines if text_lines is not None else dumps(payload).splitlines():
            print(line)


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()] if text else []


# --- subcommands --------------------------------------------------------------------------


def cmd_prational(args, cfg):
    if args.survey:
        rep = pr.survey_quadratic(args.prime, args.bound, cfg.workers)
        if args.csv:
            print("\n".join(rep.csv_lines()))
            return 0
        c = rep.counts
        _emit(rep.to_dict(), cfg, "prational", [f"p = {args.prime}, |D| <= {args.bound}: {c}", f"proportion rational = {rep.proportion}"])
        return 0
    if not args.field:
        raise DomainError("--field is required unless --survey is given")
    K = parse_field(args.field)
    fn = pr.test_theoretical if args.method == "theoretical" else pr.test_numerical
    rep = fn(K, args.prime)
    d = rep.to_dict()
    verdict_text = {pr.RATIONAL: f"{args.prime}-rational", pr.NOT_RATIONAL: f"not {args.prime}-rational"}.get(rep.verdict, rep.verdict)
    d["verdict_text"] = verdict_text
    _emit(d, cfg, "prational", [f"{rep.field}, p = {rep.p} ({rep.method}): {verdict_text}", f"d_p A_m = {rep.dpAm}, r_2 + 1 = {rep.expected}"] + rep.notes)
    return 0


def _group_and_sigma(args):
    if args.group in ("gamma-s", "gamma"):
        G = pg.GammaGroup(args.p, args.s, pg.default_precision(args.s, args.level + 1))
        return G, pg.sigma_gamma(args.p, args.s, G.N), 3
    if args.group == "abelian":
        G = pg.AbelianGroup(args.p, args.d, max(args.level + 2, 2))
        neg = [tuple((-1 if i == j else 0) % G.mods[i] for i in range(G.d)) for j in range(G.d)]
        return G, pg.GroupAutomorphism(G, neg, "negation"), 2
    raise DomainError(f"unknown group {args.group!r}")


def cmd_fpf(args, cfg):
    if args.check == "order3":
        cert = pg.no_fpf_order3_search(args.p, args.d)
        payload = {
            "p": args.p,
            "d": args.d,
            "fpf_exists": cert.fpf_exists,
            "classes": [{"invariant_factors": [list(q) for q in inv], "fixed_point_free": f} for inv, f in cert.classes],
        }
        _emit(payload, cfg, "fpf", [f"GL_{args.d}(F_{args.p}): {len(cert.classes)} order-3 classes, fixed-point-free exists: {cert.fpf_exists}"])
        return 0
    if args.level < 1:
        raise DomainError("--level must be at least 1")
    G, sigma, m = _group_and_sigma(args)
    payload = {"group": repr(G), "level": args.level}
    if args.check == "uniform":
        res = pg.uniformity_check(G, args.level)
        payload.update(uniform=res.uniform, witness=res.witness, reason=res.reason, slice_dims=list(res.slice_dims))
        lines = [f"{G!r}: uniform = {res.uniform} {res.reason}".rstrip()]
    else:
        Q = pg.quotient_by_level(G, args.level - 1) if args.level > 1 else pg.FiniteQuotient(G, pg.Subgroup.whole(G), 0)
        if args.congruence:
            Q = pg.congruence_quotient(G, args.level)
        sigma = sigma.with_group(Q.G)
        payload["quotient_order"] = Q.order
        if args.check == "fixed":
            res = pg.fixed_points(Q, sigma, args.mode, levels=args.level)
            payload.update(fixed_order=res.order, mode=res.mode, slice_dims=list(res.slice_dims))
            lines = [f"|Q| = {Q.order}, |Fix| = {res.order} ({res.mode})"]
        elif args.check == "frobenius":
            res = pg.frobenius_check(Q, sigma, m)
            payload.update(asdict(res))
            lines = [f"|Q| = {Q.order}, Frobenius: {res.ok} (complements {res.complements})"]
        elif args.check == "nilpotency":
            c = pg.nilpotency_class(Q)
            payload["class"] = c
            lines = [f"|Q| = {Q.order}, nilpotency class {c}"]
        else:  # pragma: no cover - argparse restricts choices
            raise DomainError(args.check)
    _emit(payload, cfg, "fpf", lines)
    return 0


def cmd_iwasawa(args, cfg):
    X = iw.ModulePresentation.parse(args.module, args.p)
    table = iw.coinvariant_growth(X, range(0, args.levels + 1), cfg.workers)
    fit = iw.fit_invariants(table)
    payload = {"module": args.module, "presentation": X.to_dict(), "table": table.to_dict(), "fit": fit.to_dict()}
    if len(X.relations) == 1:
        w = iw.weierstrass_prepare(iw.LambdaSeries(args.p, cfg.precision_N, cfg.truncation_M, X.relations[0][0]))
        payload["weierstrass"] = {"mu": w.mu, "lambda": w.lam, "P": list(w.P), "P_precision": w.P_precision}
    lines = [f"n={r.n}: dim {r.dim}, log_p size {r.logsize}" for r in table.rows]
    lines.append(f"r = {fit.r}, mu = {fit.mu}, lambda = {fit.lam} (exact: {fit.r_exact and fit.mu_exact})")
    _emit(payload, cfg, "iwasawa", lines)
    return 0


def cmd_chars(args, cfg):
    if args.mirror:
        rel = ch.mirror_identity(args.r, args.m, args.w, args.s_split, args.s_inert, args.t_split, args.t_inert)
        payload = {"rhs": list(rel.rhs.mult), "m": args.m, "w": rel.w}
        if args.chi_AS_T:
            payload["chi_A_T^S"] = list(rel.solve_AT_S(ch.CharacterVec(args.m, _ints(args.chi_AS_T))).mult)
        if args.chi_AT_S:
            payload["chi_A_S^T"] = list(rel.solve_AS_T(ch.CharacterVec(args.m, _ints(args.chi_AT_S))).mult)
    elif args.koch_shafarevich:
        ks = ch.koch_shafarevich(args.r1, args.r2, args.S, args.T, args.dpA, args.local_degree_sum)
        payload = {"rank": ks.rank, "h2_bound": ks.h2_bound, "free": ks.free}
    elif args.realizability:
        v = ch.realizability_check(args.d, args.m, args.deg, args.p, args.n)
        payload = {"embeddable": v.embeddable, "ambient": list(v.ambient.mult), "binding_index": v.binding_index, "needed": v.needed, "available": v.available}
    else:
        raise DomainError("choose one of --mirror, --koch-shafarevich, --realizability")
    _emit(payload, cfg, "chars")
    return 0


def cmd_census(args, cfg):
    x = int(float(args.x))
    H = cs.parse_subgroup(args.conductor, args.subgroup)
    if args.csv:
        sys.stdout.write(cs.rows_to_csv(cs.census_rows(args.conductor, H, x)))
        return 0
    payload = {"conductor": args.conductor, "subgroup": sorted(H.elements), "x": x, "index": H.index}
    lines = []
    if x <= cs.SIEVE_CAP:
        summ = cs.census(args.conductor, H, x, cfg.workers)
        payload["census"] = summ.to_dict()
        lines.append(f"q <= {x}: split {summ.split}, not split {summ.not_split}, ramified {summ.ramified}")
    else:
        payload["census"] = None
        lines.append(f"x = {x} exceeds the sieve cap; only the x^(1/l) statistic is computed")
    if cs.is_prime(H.index) and x >= 100:
        st = cs.pi_split_statistic(x, H.index, args.conductor, H)
        payload["pi_split"] = st.to_dict()
        lines.append(f"inert q <= {st.bound}: {st.count}; x^(1/l)/log x = {st.reference:.4f}; ratio {st.ratio:.4f}")
    _emit(payload, cfg, "census", lines)
    return 0


def cmd_paper_suite(args, cfg):
    results = suite.run_all(quick=args.quick)
    if cfg.output == "json":
        _emit({"criteria": [r.to_dict() for r in results]}, cfg, "paper-suite")
    else:
        for r in results:
            print(r.line())
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} criteria passed")
    return 0 if all(r.passed for r in results) else 1


# --- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muinv", description="Exact checks for p-rationality, pro-p groups, Iwasawa growth and prime splitting.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="p-adic precision N")
    common.add_argument("--truncation", type=int, default=iw.DEFAULT_M, help="T-adic truncation M")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("prational", parents=[common], help="p-rationality of a number field")
    p.add_argument("--field", help="cyclotomic:<f> or quadratic:<d>")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--method", choices=["numerical", "theoretical"], default="numerical")
    p.add_argument("--survey", action="store_true", help="survey imaginary quadratic fields")
    p.add_argument("--bound", type=int, default=500)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_prational)

    f = sub.add_parser("fpf", parents=[common], help="fixed points, Frobenius checks and uniformity")
    f.add_argument("--group", choices=["gamma-s", "gamma", "abelian"], default="gamma-s")
    f.add_argument("--p", type=int, default=7)
    f.add_argument("--s", type=int, default=0)
    f.add_argument("--d", type=int, default=3)
    f.add_argument("--level", type=int, default=2, help="work in Gamma/Gamma_level")
    f.add_argument("--check", choices=["frobenius", "fixed", "uniform", "nilpotency", "order3"], default="fixed")
    f.add_argument("--mode", choices=["exhaustive", "algebraic"], default="exhaustive")
    f.add_argument("--congruence", action="store_true", help="use coordinates mod p^level instead")
    f.set_defaults(func=cmd_fpf)

    i = sub.add_parser("iwasawa", parents=[common], help="coinvariant growth of Lambda/(f_1, ..., f_k)")
    i.add_argument("--module", required=True)
    i.add_argument("--p", type=int, required=True)
    i.add_argument("--levels", type=int, default=5)
    i.set_defaults(func=cmd_iwasawa)

    c = sub.add_parser("chars", parents=[common], help="character identities and rank formulas")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--mirror", action="store_true")
    mode.add_argument("--koch-shafarevich", action="store_true")
    mode.add_argument("--realizability", action="store_true")
    c.add_argument("--r", type=int, default=1)
    c.add_argument("--m", type=int, default=3)
    c.add_argument("--w", type=int, default=1)
    for name in ("s-split", "s-inert", "t-split", "t-inert"):
        c.add_argument(f"--{name}", type=int, default=0)
    c.add_argument("--chi-AS-T", dest="chi_AS_T", help="comma-separated multiplicities")
    c.add_argument("--chi-AT-S", dest="chi_AT_S", help="comma-separated multiplicities")
    c.add_argument("--r1", type=int, default=0)
    c.add_argument("--r2", type=int, default=1)
    c.add_argument("--S", type=int, default=1)
    c.add_argument("--T", type=int, default=0)
    c.add_argument("--dpA", type=int, default=0)
    c.add_argument("--local-degree-sum", type=int, default=0)
    c.add_argument("--d", type=int, default=3)
    c.add_argument("--deg", type=int, default=2)
    c.add_argument("--p", type=int, default=7)
    c.add_argument("--n", type=int, default=1)
    c.set_defaults(func=cmd_chars)

    s = sub.add_parser("census", parents=[common], help="prime splitting statistics")
    s.add_argument("--conductor", type=int, required=True)
    s.add_argument("--subgroup", default="1")
    s.add_argument("--x", default="1e6")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_census)

    ps = sub.add_parser("paper-suite", parents=[common], help="run the acceptance battery")
    ps.add_argument("--quick", action="store_true")
    ps.set_defaults(func=cmd_paper_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 2
    cfg = RunConfig(
        precision_N=args.precision,
        truncation_M=args.truncation,
        output="json" if args.json else "text",
        cache_dir=str(cs.cache_dir()) if cs.cache_dir() else None,
        workers=max(1, args.workers),
    )
    try:
        return args.func(args, cfg)
    except ComputationError as exc:
        print(dumps({"schema_version": SCHEMA_VERSION, "command": args.command, "config": cfg.to_dict(), "error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
