"""drinfeld-heights command line.

Exit status: 0 certified (or all checks passed), 1 error or failed check, 2 undecided.
"""

from __future__ import annotations

import argparse
import sys

from . import config as cf
from .errors import DrinfeldError, GlobalUndecided
from .fields import RationalFunction
from .heights import (compute_exception_sets, compute_thresholds, bound_margin,
                      find_escaping_multiplier, global_height, local_height)
from .lab import SUITES, reproduce_example_e1, reproduce_example_e2
from .twisted import apply

OK, ERROR, UNDECIDED = 0, 1, 2


def _range(text):
    """'2', '1..3' or '1,2,5'."""
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(s) for s in text.split(","))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (path, or - for stdin)")
    common.add_argument("--prec", type=int, default=None, help="relative precision (default 64)")
    common.add_argument("--budget", type=int, default=None, help="step budget override")
    common.add_argument("--seed", type=int, default=0)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    common.set_defaults(fmt="json")

    parser = argparse.ArgumentParser(prog="drinfeld-heights",
                                     description="Local and global canonical heights of Drinfeld modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("local-height", parents=[common], help="local height at one place")
    g = sub.add_parser("global-height", parents=[common], help="sum of local heights")
    g.add_argument("--parallel", action="store_true", help="evaluate places concurrently")
    g.add_argument("--check-scaling", action="store_true",
                   help="also compute h(phi_t x) and compare with q^r h(x)")

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--p", type=int, default=3)
    v.add_argument("--n", type=_range, default=(1, 2, 3))
    v.add_argument("--d", type=_range, default=(1, 2))
    v.add_argument("--q", type=int, default=None)
    v.add_argument("--dim", type=int, default=None)

    e = sub.add_parser("example", parents=[common], help="reproduce a worked example")
    e.add_argument("which", choices=("e1", "e2"))
    e.add_argument("--q", type=int, default=2)
    e.add_argument("--r", type=int, default=2)
    e.add_argument("--r0", type=int, default=1)
    e.add_argument("--m", type=_range, default=(2, 3, 4))
    e.add_argument("--p", type=int, default=3)
    e.add_argument("--d", type=_range, default=(1, 2))
    e.add_argument("--n", type=_range, default=(1, 2, 3))

    m = sub.add_parser("escape-multiplier", parents=[common],
                       help="least b in F_q[t] with phi_b(x) outside the exceptional set")
    m.add_argument("--nonpositive", action="store_true",
                   help="also require v(phi_b x) <= 0")
    sub.add_parser("thresholds", parents=[common], help="M_v, N_v, c_v0 and exceptional sets")
    return parser


class _Setup:
    def __init__(self, args, need_place=True, need_element=True):
        if not args.config:
            raise DrinfeldError("--config is required for this command")
        raw = cf.load(args.config, sys.stdin)
        self.module = cf.module_from_config(raw.get("module"))
        base = self.module.base
        self.model = None
        if need_place:
            place = raw.get("place")
            if place is None and raw.get("places"):
                place = raw["places"][0]
            self.model = cf.place_from_config(place, base)
        self.x = None
        if need_element:
            self.x = cf.element_from_config(raw.get("element"), base, self.model)


def _emit(obj, fmt, out):
    if fmt == "text":
        out.write("\n".join(cf.text_lines(obj)) + "\n")
    else:
        out.write(cf.dumps(obj) + "\n")


def cmd_local_height(args, out):
    s = _Setup(args)
    res = local_height(s.module, s.model, s.x, budget=args.budget, prec=args.prec)
    report = {**cf.place_summary(s.model), **cf.render_result(res)}
    if res.decided and res.value > 0:
        report["bounds"] = cf.render_value(bound_margin(s.module, s.model, s.x, res, prec=args.prec))
    _emit(report, args.fmt, out)
    return OK if res.decided else UNDECIDED


def cmd_global_height(args, out):
    s = _Setup(args, need_place=False)
    if not isinstance(s.x, RationalFunction):
        raise DrinfeldError("global heights need a rational function element")
    try:
        total, parts = global_height(s.module, s.x, budget=args.budget, prec=args.prec,
                                     parallel=args.parallel, breakdown=True)
    except GlobalUndecided as exc:
        _emit({"undecided_place": exc.place, **cf.render_result(exc.result)}, args.fmt, out)
        return UNDECIDED
    report = {"total": cf.render_value(total),
              "breakdown": [{**cf.place_summary(model), "value": cf.render_value(res.value),
                             "certificate": res.certificate} for model, res in parts]}
    status = OK
    if args.check_scaling:
        y = apply(s.module.phi_t, s.x)
        scaled = global_height(s.module, y, budget=args.budget, prec=args.prec,
                               parallel=args.parallel)
        expected = s.module.q ** s.module.r * total
        report["scaling"] = {"h(phi_t x)": cf.render_value(scaled),
                             "q^r h(x)": cf.render_value(expected),
                             "equal": scaled == expected}
        if scaled != expected:
            status = ERROR
    _emit(report, args.fmt, out)
    return status


def cmd_verify(args, out):
    name = args.suite
    kw = {}
    if name == "e2":
        kw = {"p": args.p, "ns": args.n, "ds": args.d}
    elif name != "e1":
        kw["seed"] = args.seed
        if args.trials is not None:
            kw["trials"] = args.trials
        if name == "subspace":
            kw.update(q=args.q, dim=args.dim)
    rep = SUITES[name](**kw)
    report = {"suite": rep.name, "passed": rep.passed, "total": rep.total,
              "status": "pass" if rep.ok else "fail"}
    if rep.counterexample is not None:
        report["counterexample"] = cf.render_value(rep.counterexample)
    if rep.notes:
        report["notes"] = cf.render_value(rep.notes)
    _emit(report, args.fmt, out)
    return OK if rep.ok else ERROR


def _row(row):
    return {k: cf.render_value(v) for k, v in row.items()}


def cmd_example(args, out):
    if args.which == "e1":
        rows = [_row(reproduce_example_e1(args.q, args.r, args.r0, m, prec=args.prec))
                for m in args.m]
    else:
        rows = [_row(reproduce_example_e2(args.p, d, n, prec=args.prec))
                for n in args.n for d in args.d]
    if args.fmt == "text":
        _table(rows, out)
    else:
        out.write(cf.dumps(rows) + "\n")
    return OK if all(r.get("matches", True) for r in rows) else ERROR


def _table(rows, out):
    if not rows:
        return
    keys = list(rows[0])
    cells = [[cf._inline(r.get(k, "")) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    out.write("  ".join(k.ljust(w) for k, w in zip(keys, widths)).rstrip() + "\n")
    for c in cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(c, widths)).rstrip() + "\n")


def cmd_escape(args, out):
    s = _Setup(args)
    b = find_escaping_multiplier(s.module, s.model, s.x, prec=args.prec,
                                 nonpositive=args.nonpositive)
    _emit({**cf.place_summary(s.model), "multiplier": repr(b), "degree": b.degree},
          args.fmt, out)
    return OK


def cmd_thresholds(args, out):
    s = _Setup(args, need_element=False)
    th = compute_thresholds(s.module, s.model)
    report = {**cf.place_summary(s.model), "M_v": th.M_v, "N_v": th.N_v, "in_S": th.in_S,
              "c_v0": th.c_v0, "m_steps": th.m_steps, "L_lcm": th.L_lcm,
              "coefficient_valuations": th.valuations}
    if th.in_S:
        sets = compute_exception_sets(s.module, s.model, th, prec=args.prec or 64)
        report.update(P_v=sorted(sets.P_v), P=sorted(sets.P), z=sets.z, f_cap=sets.f_cap,
                      R_v={str(a): sets.R_v[a] for a in sorted(sets.R_v)})
    _emit(cf.render_value(report), args.fmt, out)
    return OK


COMMANDS = {
    "local-height": cmd_local_height,
    "global-height": cmd_global_height,
    "verify": cmd_verify,
    "example": cmd_example,
    "escape-multiplier": cmd_escape,
    "thresholds": cmd_thresholds,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (DrinfeldError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
