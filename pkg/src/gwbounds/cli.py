"""Command-line front end: reproduces the reference tables, emits figure data,
runs the classifiers, and exposes the survival/bound/convergence/genetics
computations as deterministic CSV or JSON.

Exit codes: 0 success, 2 domain error, 3 applicability error, 1 anything else.
Errors are written to stderr as single-line JSON.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
from typing import List, Optional, Sequence

from .errors import ApplicabilityError, DomainError, GWError
from .pgf_core import (
    Binomial,
    FiniteThree,
    FractionalLinear,
    GeneralizedPoisson,
    NegBinomial,
    OffspringModel,
    Poisson,
    binomial_from_s,
    extinction_probability,
    fl_from_s,
    gp_from_s,
    iterate_extinction,
    moments,
    negbinomial_from_s,
    poisson_from_s,
    survival_curve,
)
from . import fl_bounds
from .fl_bounds import (
    bound_direction,
    matching_fl,
    sn_fl_bound,
    sn_pollak_bound,
    sn_simple_bound,
    t_eps_app,
    t_eps_exact,
    t_eps_fl,
)
from .classify_f3 import classify_f3, f3_region_volumes
from .classify_gp import classify_gp, gp_thresholds
from .sinf_estimates import dn_upper, quine_bounds, sinf_bounds_all, t_ser, t_simple
from .genetics import (
    TraitModel,
    WFModel,
    vg_inf,
    vg_tau,
    wf_fixation_a,
    wf_fixation_diffusion,
    wf_fixation_exact,
)

CRLF = "\r\n"


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(value, digits: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.{digits}g}"
    return str(value)


def _csv_quote(field: str) -> str:
    if any(ch in field for ch in (',', '"', '\r', '\n')):
        return '"' + field.replace('"', '""') + '"'
    return field


def render_csv(header: Sequence[str], rows: Sequence[Sequence], digits: int) -> str:
    lines = [",".join(_csv_quote(str(h)) for h in header)]
    for row in rows:
        lines.append(",".join(_csv_quote(_fmt(v, digits)) for v in row))
    return CRLF.join(lines) + CRLF


def write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gwb-tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Model construction from flags
# ---------------------------------------------------------------------------

def build_model(args) -> OffspringModel:
    dist = args.dist
    if dist == "poisson":
        if args.m is not None:
            return Poisson(m=args.m)
        if args.s is not None:
            return poisson_from_s(args.s)
        raise DomainError("poisson requires --m or --s")
    if dist == "binomial":
        if args.n is None:
            raise DomainError("binomial requires --n")
        if args.p is not None:
            return Binomial(n=args.n, p=args.p)
        if args.s is not None:
            return binomial_from_s(args.n, args.s)
        raise DomainError("binomial requires --p or --s")
    if dist == "negbinomial":
        if args.r is None:
            raise DomainError("negbinomial requires --r")
        if args.p is not None:
            return NegBinomial(r=args.r, p=args.p)
        if args.s is not None:
            return negbinomial_from_s(args.r, args.s)
        raise DomainError("negbinomial requires --p or --s")
    if dist == "fl":
        if args.pi is None:
            raise DomainError("fl requires --pi")
        if args.rho is not None:
            return FractionalLinear(pi=args.pi, rho=args.rho)
        if args.s is not None:
            return fl_from_s(args.pi, args.s)
        raise DomainError("fl requires --rho or --s")
    if dist == "f3":
        if args.p0 is None or args.p2 is None or args.p3 is None:
            raise DomainError("f3 requires --p0, --p2, --p3 (p1 is inferred)")
        p1 = 1.0 - args.p0 - args.p2 - args.p3
        return FiniteThree(p0=args.p0, p1=p1, p2=args.p2, p3=args.p3)
    if dist == "gp":
        if args.lam is None:
            raise DomainError("gp requires --lambda")
        if args.mu is not None:
            return GeneralizedPoisson(mu=args.mu, lam=args.lam)
        if args.s is not None:
            return gp_from_s(args.lam, args.s)
        raise DomainError("gp requires --mu or --s")
    raise DomainError(f"unknown distribution {dist!r}")


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

_TABLE1_MS = (1.5, 1.1, 1.02)
_TABLE1_NS = (1, 5, 10, 20, 50, 100)


def table1_rows() -> List[List]:
    """Relative errors (bound - S^(n))/S^(n) of the three Poisson S-bounds."""
    rows = []
    for m in _TABLE1_MS:
        model = Poisson(m=m)
        fp = extinction_probability(model)
        exact = {n: 1.0 - iterate_extinction(model, n) for n in _TABLE1_NS}
        for method, fn in (("simple", sn_simple_bound),
                           ("fl", sn_fl_bound),
                           ("pollak", sn_pollak_bound)):
            row: List = [m, method]
            for n in _TABLE1_NS:
                row.append((fn(model, n, fp) - exact[n]) / exact[n])
            rows.append(row)
    return rows


def cmd_table1(args) -> str:
    header = ["m", "method"] + [f"n{n}" for n in _TABLE1_NS]
    return render_csv(header, table1_rows(), args.digits)


_TABLE2_COLS = (
    ("bin_n5", lambda s: binomial_from_s(5, s)),
    ("nb_r5", lambda s: negbinomial_from_s(5, s)),
    ("gp_0.0", lambda s: gp_from_s(0.0, s)),
    ("gp_0.2", lambda s: gp_from_s(0.2, s)),
    ("gp_0.5", lambda s: gp_from_s(0.5, s)),
    ("gp_0.9", lambda s: gp_from_s(0.9, s)),
    ("fl_0.2", lambda s: fl_from_s(0.2, s)),
)


def cmd_table2(args) -> str:
    s = 0.2
    bounds = [sinf_bounds_all(make(s), s) for _, make in _TABLE2_COLS]
    header = ["quantity"] + [name for name, _ in _TABLE2_COLS]
    quantities = (
        ("beta", lambda b: b.beta),
        ("quine_lower", lambda b: b.quine_lower),
        ("sinf_exact", lambda b: b.exact),
        ("sinf_series3", lambda b: b.series3),
        ("dn_upper", lambda b: b.dn_upper),
        ("haldane_theta_s", lambda b: b.haldane),
    )
    rows = [[name] + [get(b) for b in bounds] for name, get in quantities]
    return render_csv(header, rows, args.digits)


_TABLE3_BLOCKS = (
    (0.01, (0.01,), (0.0, 0.1, 0.259, 0.5, 0.9)),
    (0.1, (0.1, 0.01, 1e-4), (0.0, 0.1, 0.276, 0.5, 0.9)),
    (0.3, (0.01,), (0.0, 0.2, 0.312, 0.5, 0.9)),
)


def cmd_table3(args) -> str:
    header = ["s", "eps", "model", "t_exact", "t_app", "t_ser"]
    rows: List[List] = []
    for s, eps_list, lams in _TABLE3_BLOCKS:
        models = [("bin_n5", binomial_from_s(5, s)), ("nb_r5", negbinomial_from_s(5, s))]
        models += [(f"gp_{lam:g}", gp_from_s(lam, s)) for lam in lams]
        for eps in eps_list:
            for name, model in models:
                fp = extinction_probability(model)
                rows.append([s, eps, name,
                             t_eps_exact(model, eps),
                             t_eps_app(fp, eps),
                             t_ser(model, s, eps)])
            t0 = t_simple(s, eps)
            rows.append([s, eps, "simple", t0, t0, t0])
    return render_csv(header, rows, args.digits)


def cmd_table(args) -> int:
    text = {1: cmd_table1, 2: cmd_table2, 3: cmd_table3}[args.id](args)
    write_output(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# Classifiers
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    if args.kind == "f3":
        if args.p0 is None or args.p2 is None or args.p3 is None:
            raise DomainError("classify f3 requires --p0, --p2, --p3")
        cls = classify_f3(args.p0, args.p2, args.p3)
        report = {
            "kind": "f3",
            "region": cls.region,
            "case_label": cls.case_label,
            "p_inf": cls.p_inf,
            "gamma": cls.gamma,
            "fl_pi": cls.fl.pi,
            "fl_rho": cls.fl.rho,
            "sign_profile": list(cls.sign_profile),
            "thresholds": dataclasses.asdict(cls.thresholds),
        }
        if cls.region == "Switches":
            model = FiniteThree(p0=args.p0, p1=1.0 - args.p0 - args.p2 - args.p3,
                                p2=args.p2, p3=args.p3)
            report["switch_n"] = fl_bounds.switch_generation(model)
    elif args.kind == "gp":
        if args.s is None or args.lam is None:
            raise DomainError("classify gp requires --s and --lambda")
        direction = classify_gp(args.s, args.lam)
        report = {
            "kind": "gp",
            "direction": direction.kind,
            "switch_n": direction.switch_n,
            "conjectured": direction.conjectured,
            "thresholds": dataclasses.asdict(gp_thresholds(args.s)),
        }
    else:
        raise DomainError(f"unknown classifier kind {args.kind!r}")
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return 0


# ---------------------------------------------------------------------------
# Survival / sinf / teps / genetics
# ---------------------------------------------------------------------------

def cmd_survival(args) -> int:
    model = build_model(args)
    fp = extinction_probability(model)
    curve = survival_curve(model, args.nmax)
    header = ["n", "s_n", "fl_bound", "simple_bound", "pollak_bound"]
    rows = []
    for n, s_n in enumerate(curve):
        rows.append([n, s_n,
                     sn_fl_bound(model, n, fp),
                     sn_simple_bound(model, n, fp),
                     sn_pollak_bound(model, n, fp)])
    write_output(render_csv(header, rows, args.digits), args.out)
    return 0


def cmd_sinf(args) -> int:
    model = build_model(args)
    fp = extinction_probability(model)
    mom = moments(model)
    s = mom.m - 1.0
    if args.strict:
        # Guaranteed-bound mode: raise (exit code 3) instead of reporting
        # values outside the bounds' validity conditions.
        quine_bounds(model)
        dn_upper(model)
    try:
        bounds = sinf_bounds_all(model, s)
        series3 = bounds.series3
        haldane = bounds.haldane
    except DomainError:
        bounds = None
        series3 = haldane = None
    note = ""
    if bounds is not None and bounds.dn_upper is None:
        note = "dn_upper not applicable: 8c(m-1) >= 3b^2"
    header = ["quantity", "value", "note"]
    rows = [
        ["m", mom.m, ""],
        ["variance", mom.var, ""],
        ["p_inf", fp.p_inf, ""],
        ["s_inf", fp.s_inf, ""],
        ["gamma", fp.gamma, ""],
        ["beta", bounds.beta if bounds else None, ""],
        ["quine_lower", bounds.quine_lower if bounds else None, ""],
        ["quine_upper", bounds.quine_upper if bounds else None, ""],
        ["dn_upper", bounds.dn_upper if bounds else None, note],
        ["sinf_series3", series3, ""],
        ["haldane_theta_s", haldane, ""],
    ]
    write_output(render_csv(header, rows, args.digits), args.out)
    return 0


def cmd_teps(args) -> int:
    model = build_model(args)
    fp = extinction_probability(model)
    s = moments(model).m - 1.0
    header = ["eps", "t_exact", "t_fl", "t_app", "t_ser", "t_simple"]
    rows = []
    for eps in args.eps:
        try:
            ts = t_ser(model, s, eps)
        except DomainError:
            ts = None
        rows.append([eps,
                     t_eps_exact(model, eps),
                     t_eps_fl(fp, eps),
                     t_eps_app(fp, eps),
                     ts,
                     t_simple(s, eps)])
    write_output(render_csv(header, rows, args.digits), args.out)
    return 0


def cmd_genetics(args) -> int:
    model = build_model(args)
    mom = moments(model)
    s_sel = args.s if args.s is not None else math.log(mom.m) / args.alpha
    tm = TraitModel(theta_mut=args.theta_mut, alpha=args.alpha,
                    s_sel=s_sel, pop_size=args.N)
    fp = extinction_probability(model)
    ne = args.Ne if args.Ne is not None else args.N / (mom.var / mom.m)
    wf = WFModel(pop_size=args.N, s_sel=s_sel, effective_size=ne)
    asymptotic = vg_inf(tm, model)
    header = ["quantity", "value"]
    rows = [
        ["s_inf", fp.s_inf],
        ["v1_inf", asymptotic.v1_inf],
        ["vg_inf_leading", asymptotic.leading],
        ["vg_inf_simple", asymptotic.simple],
        ["delta_mean", asymptotic.delta_mean],
        ["wf_fix_diffusion", wf_fixation_diffusion(wf)],
        ["wf_fix_improved", wf_fixation_a(args.N, s_sel)],
    ]
    if args.tau is not None:
        rows.insert(1, ["vg_tau", vg_tau(tm, model, args.tau)])
    if args.N <= 5000:
        rows.append(["wf_fix_exact", wf_fixation_exact(wf)])
    write_output(render_csv(header, rows, args.digits), args.out)
    return 0


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------

def cmd_figdata(args) -> int:
    fig = args.fig
    if fig == "1":
        header = ["m", "pi", "rho", "p_inf"]
        rows = []
        for i in range(101, 301):
            m = i / 100.0
            fp = extinction_probability(Poisson(m=m))
            fl = matching_fl(fp)
            rows.append([m, fl.pi, fl.rho, fp.p_inf])
        text = render_csv(header, rows, args.digits)
    elif fig == "2":
        s = 0.3
        lams = (0.30, 0.3145)
        header = ["x"] + [f"f_lambda_{lam:g}" for lam in lams]
        rows = []
        models = [gp_from_s(lam, s) for lam in lams]
        fls = [matching_fl(extinction_probability(mod)).to_model() for mod in models]
        from .pgf_core import pgf_eval
        for i in range(201):
            x = i / 200.0
            row: List = [x]
            for mod, fl in zip(models, fls):
                row.append(pgf_eval(mod, x) - pgf_eval(fl, x))
            rows.append(row)
        text = render_csv(header, rows, args.digits)
    elif fig == "3-volumes":
        fracs = f3_region_volumes(args.samples, args.seed)
        header = ["lower_bound_on_p", "switches", "upper_bound_on_p"]
        text = render_csv(header, [list(fracs)], args.digits)
    elif fig == "4":
        s = 0.1
        lams = (0.0, 0.1, 0.276, 0.5, 0.9)
        header = ["n"] + [f"relerr_lambda_{lam:g}" for lam in lams]
        models = [gp_from_s(lam, s) for lam in lams]
        fps = [extinction_probability(mod) for mod in models]
        rows = []
        iters = [0.0] * len(models)
        from .pgf_core import pgf_eval
        for n in range(1, 31):
            row: List = [n]
            for idx, (mod, fp) in enumerate(zip(models, fps)):
                iters[idx] = pgf_eval(mod, iters[idx])
                s_n = 1.0 - iters[idx]
                row.append((sn_fl_bound(mod, n, fp) - s_n) / s_n)
            rows.append(row)
        text = render_csv(header, rows, args.digits)
    else:
        raise DomainError(f"unknown figure {fig!r}")
    write_output(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dist", choices=["poisson", "binomial", "negbinomial",
                                           "fl", "f3", "gp"])
    parser.add_argument("--m", type=float)
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=float)
    parser.add_argument("--r", type=int)
    parser.add_argument("--pi", type=float)
    parser.add_argument("--rho", type=float)
    parser.add_argument("--p0", type=float)
    parser.add_argument("--p2", type=float)
    parser.add_argument("--p3", type=float)
    parser.add_argument("--mu", type=float)
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--s", type=float)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=["csv", "json"], default="csv")
    parser.add_argument("--digits", type=int, default=6)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwb",
        description="Survival-probability bounds for supercritical "
                    "Galton-Watson processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="emit a reference table as CSV")
    p_table.add_argument("id", type=int, choices=[1, 2, 3])
    _add_output_flags(p_table)
    p_table.set_defaults(func=cmd_table)

    p_cls = sub.add_parser("classify", help="bound-direction classification")
    p_cls.add_argument("kind", choices=["f3", "gp"])
    _add_model_flags(p_cls)
    _add_output_flags(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_surv = sub.add_parser("survival", help="survival curve and bounds")
    _add_model_flags(p_surv)
    p_surv.add_argument("--nmax", type=int, default=50)
    _add_output_flags(p_surv)
    p_surv.set_defaults(func=cmd_survival)

    p_sinf = sub.add_parser("sinf", help="eventual survival and its bounds")
    _add_model_flags(p_sinf)
    p_sinf.add_argument("--strict", action="store_true",
                        help="fail (exit 3) when a bound's validity condition "
                             "does not hold instead of reporting its value")
    _add_output_flags(p_sinf)
    p_sinf.set_defaults(func=cmd_sinf)

    p_teps = sub.add_parser("teps", help="convergence times T(eps)")
    _add_model_flags(p_teps)
    p_teps.add_argument("--eps", type=float, nargs="+", default=[0.01])
    _add_output_flags(p_teps)
    p_teps.set_defaults(func=cmd_teps)

    p_gen = sub.add_parser("genetics", help="trait-variance and fixation report")
    _add_model_flags(p_gen)
    p_gen.add_argument("--N", type=int, required=True)
    p_gen.add_argument("--Ne", type=float, default=None)
    p_gen.add_argument("--theta-mut", dest="theta_mut", type=float, default=1.0)
    p_gen.add_argument("--alpha", type=float, default=1.0)
    p_gen.add_argument("--tau", type=float, default=None)
    _add_output_flags(p_gen)
    p_gen.set_defaults(func=cmd_genetics)

    p_fig = sub.add_parser("figdata", help="emit plot-ready figure data")
    p_fig.add_argument("fig", choices=["1", "2", "3-volumes", "4"])
    p_fig.add_argument("--samples", type=int, default=1_000_000)
    p_fig.add_argument("--seed", type=int, default=0)
    _add_output_flags(p_fig)
    p_fig.set_defaults(func=cmd_figdata)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ApplicabilityError as exc:
        sys.stderr.write(json.dumps({
            "error": "applicability", "condition": exc.condition,
            "lhs": exc.lhs, "rhs": exc.rhs, "message": str(exc)}) + "\n")
        return 3
    except DomainError as exc:
        sys.stderr.write(json.dumps({"error": "domain", "message": str(exc)}) + "\n")
        return 2
    except GWError as exc:
        sys.stderr.write(json.dumps({
            "error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
