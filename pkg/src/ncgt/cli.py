"""``ncgt`` command line.

Exit codes: 0 success, 1 a check failed, 2 unreadable input, 3 an invariant
was violated, 4 bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formats
from .graphs import GraphFormatError, complement, parse_graph
from .homomorphism import as_kraus, certificate_from_json, verify_hom
from .linalg import DimensionError, InvariantError, OrthonormalFamily
from .ncgraph import amplify, box_product, categorical_product, system_from_graph, traceless_from_graph
from .parameters import ESTIMATORS, sandwich_check
from .theta import theta_classical, theta_d

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_graph(path):
    try:
        with open(path) as fh:
            return parse_graph(fh.read())
    except OSError as exc:
        raise GraphFormatError(str(exc)) from None


def _read_json(path):
    try:
        return formats.load(path)
    except OSError as exc:
        raise formats.FormatError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise formats.FormatError(f"{path}: {exc}") from None


def _read_space(path):
    return formats.subspace_from_json(_read_json(path))


def _emit(obj, out_path=None):
    text = formats.dumps(obj) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_budget(args):
    if getattr(args, "budget", None) is not None and args.budget < 0:
        raise UsageError("--budget must be non-negative")
    if getattr(args, "d", None) is not None and args.d < 1:
        raise UsageError("--d must be at least 1")


# --------------------------------------------------------------------------


def cmd_build(args):
    g = _read_graph(args.graph)
    space = system_from_graph(g) if args.repr == "system" else traceless_from_graph(g)
    if args.complement:
        space = space.perp()
    _emit(formats.subspace_to_json(space), args.output)
    return EXIT_OK


def cmd_params(args):
    _check_budget(args)
    space = amplify(_read_space(args.space), args.d)
    names = list(ESTIMATORS) if args.param == "all" else [args.param]
    report = {}
    for name in names:
        est = ESTIMATORS[name](space, budget=args.budget, seed=args.seed)
        report[name] = est.to_json()
    if args.json:
        _emit(report)
    else:
        for name, r in report.items():
            fmt = lambda v: "inf" if v is None else str(v)  # noqa: E731
            print(f"{name:<7} [{fmt(r['lower'])}, {fmt(r['upper'])}]{'  exact' if r['exact'] else ''}")
    return EXIT_OK


def cmd_theta(args):
    _check_budget(args)
    space = _read_space(args.space)
    br = theta_d(space, args.d, budget=args.budget, seed=args.seed, bar=args.bar or None)
    out = {"lower": br.lower, "upper": br.upper, "exact": br.exact, "method": br.method}
    if args.json:
        out["witness_T"] = formats.matrix_to_json(br.witness_T)
        _emit(out)
    else:
        print(f"[{br.lower:.9f}, {br.upper:.9f}]{'  exact' if br.exact else ''}")
    return EXIT_OK


def cmd_theta_classical(args):
    print(f"{theta_classical(_read_graph(args.graph)):.9f}")
    return EXIT_OK


def cmd_sandwich(args):
    _check_budget(args)
    if args.graph:
        s = system_from_graph(_read_graph(args.graph))
    else:
        s = _read_space(args.space)
    rep = sandwich_check(s, args.d, budget=args.budget, seed=args.seed)
    v = rep.values
    fmt = lambda x: "inf" if x is None else (f"{x:.6f}" if isinstance(x, float) else str(x))  # noqa: E731
    print(f"{'PASS' if rep.passed else 'FAIL'} alpha in [{v['alpha_lower']}, {v['alpha_upper']}]"
          f" theta in [{fmt(v['theta_lower'])}, {fmt(v['theta_upper'])}]"
          f" chihat in [{fmt(v['chihat_lower'])}, {fmt(v['chihat_upper'])}]")
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_verify_hom(args):
    cert = as_kraus(certificate_from_json(_read_json(args.cert)))
    j, t = _read_space(getattr(args, "from")), _read_space(args.to)
    ok, resid = verify_hom(cert, j, t)
    print(f"{'PASS' if ok else 'FAIL'} max residual {resid:.3e}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_product(args):
    left, right = _read_space(args.left), _read_space(args.right)
    if args.op == "tensor":
        out = categorical_product(left, right)
    else:
        v = w = None
        if args.bases:
            obj = _read_json(args.bases)
            try:
                v = OrthonormalFamily([formats.vector_from_json(x) for x in obj["v"]])
                w = OrthonormalFamily([formats.vector_from_json(x) for x in obj["w"]])
            except (KeyError, TypeError) as exc:
                raise formats.FormatError(f"bad bases file: {exc}") from None
        out = box_product(left, right, v, w)
    _emit(formats.subspace_to_json(out), args.output)
    return EXIT_OK


def cmd_reproduce(args):
    from .reproduce import run

    if args.output:
        with open(args.output, "w") as fh:
            ok = run(args.suite, args.seed, fh)
    else:
        ok = run(args.suite, args.seed, sys.stdout)
    return EXIT_OK if ok else EXIT_CHECK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .reproduce import SUITES

    p = _Parser(prog="ncgt", description="Non-commutative graph parameters and checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="operator system or traceless space of a graph")
    b.add_argument("--graph", required=True)
    b.add_argument("--repr", choices=("system", "traceless"), required=True)
    b.add_argument("--complement", action="store_true", help="emit the orthogonal complement")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_build)

    def common(q, budget_default):
        q.add_argument("--d", type=int, default=1)
        q.add_argument("--budget", type=int, default=budget_default)
        q.add_argument("--seed", type=int, default=0)

    pr = sub.add_parser("params", help="bracket alpha, omega, chi, chi-hat, chi_0")
    pr.add_argument("--space", required=True)
    pr.add_argument("--param", choices=(*ESTIMATORS, "all"), default="all")
    pr.add_argument("--json", action="store_true")
    common(pr, 64)
    pr.set_defaults(func=cmd_params)

    th = sub.add_parser("theta", help="bracket theta(S) or theta-bar(J)")
    th.add_argument("--space", required=True)
    th.add_argument("--bar", action="store_true")
    th.add_argument("--json", action="store_true")
    common(th, 50)
    th.set_defaults(func=cmd_theta)

    tc = sub.add_parser("theta-classical", help="Lovász theta of a graph")
    tc.add_argument("--graph", required=True)
    tc.set_defaults(func=cmd_theta_classical)

    sw = sub.add_parser("sandwich", help="check alpha_d <= theta_d <= chi-hat_d of the complement")
    src = sw.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--space")
    common(sw, 64)
    sw.set_defaults(func=cmd_sandwich)

    vh = sub.add_parser("verify-hom", help="verify a homomorphism certificate")
    vh.add_argument("--cert", required=True)
    vh.add_argument("--from", required=True)
    vh.add_argument("--to", required=True)
    vh.set_defaults(func=cmd_verify_hom)

    pd = sub.add_parser("product", help="Cartesian (box) or categorical (tensor) product")
    pd.add_argument("--op", choices=("box", "tensor"), required=True)
    pd.add_argument("--left", required=True)
    pd.add_argument("--right", required=True)
    pd.add_argument("--bases")
    pd.add_argument("-o", "--output")
    pd.set_defaults(func=cmd_product)

    rp = sub.add_parser("reproduce", help="run the check suites")
    rp.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("-o", "--output")
    rp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ncgt: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, formats.FormatError) as exc:
        print(f"ncgt: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvariantError, DimensionError) as exc:
        print(f"ncgt: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
