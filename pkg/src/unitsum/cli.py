"""Command-line front end: ``unitsum <group> <command> [options]``.

Exit codes: 0 success, 1 domain error (error JSON on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import mpmath

from . import __version__, counting, criteria, matrix_units, polytope, unit_sums
from .errors import DomainError
from .quadratic import QuadraticOrder
from .ring_core import ring_from_name

MAP_REVISION = "r1"
SEED_ENV = "UNITSUM_SEED"
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return _seed(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc)) from None


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _count(text: str) -> int:
    """Integers, also in 1e7 notation."""
    try:
        value = float(text) if any(c in text for c in "eE.") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _real_list(text: str) -> list[float]:
    return [_real(t) for t in text.split(",")]


def parse_elt(order: QuadraticOrder, text: str):
    """``a,b`` means a + b*sqrt(d); a and b may be halves such as 1/2."""
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainError(f"element must be 'a,b' for a + b*sqrt(d): {text!r}")
    a, b = (Fraction(p.strip()) for p in parts)
    u, v = 2 * a, 2 * b
    if u.denominator != 1 or v.denominator != 1:
        raise DomainError(f"coordinates must be integers or halves: {text!r}")
    return order.elt(int(u), int(v))


# ---------------------------------------------------------------------------
# command handlers; each returns a JSON-compatible object (dict or list of rows)


def cmd_criteria_quadratic(args):
    return criteria.quadratic_usn(args.d).to_json()


def cmd_criteria_cubic(args):
    return criteria.cubic_usn(args.d).to_json()


def cmd_criteria_widmer(args):
    data = criteria.CubicFieldData(abs_disc=args.abs_disc, regulator_upper=mpmath.mpf(args.regulator))
    out = criteria.widmer_sufficient(data).to_json()
    out["bound"] = float(criteria.widmer_bound(data.regulator_upper))
    return out


def cmd_criteria_widmer_index(args):
    coeffs = args.minpoly
    data = criteria.cubic_data_from_unit(coeffs, args.abs_disc, prec=args.precision)
    if args.power != 1:
        data = criteria.power_data(data, args.power)
    return criteria.widmer_index_check(data).to_json()


def cmd_criteria_erdos(args):
    return criteria.erdos_family(args.n).to_json()


def cmd_criteria_power_basis(args):
    return criteria.power_basis_units(args.deg, args.m).to_json()


def _order_and_elt(args):
    order = QuadraticOrder(args.d)
    return order, parse_elt(order, args.elt)


def cmd_unitsum_find(args):
    _, alpha = _order_and_elt(args)
    return unit_sums.find_k_units(alpha, args.k, args.bound).to_json()


def cmd_unitsum_distinct(args):
    _, alpha = _order_and_elt(args)
    return unit_sums.find_distinct_units(alpha, args.bound, args.max_terms).to_json()


def cmd_unitsum_pad(args):
    _, alpha = _order_and_elt(args)
    rep = unit_sums.find_k_units(alpha, args.k, args.bound)
    if not rep:
        raise DomainError(f"no {args.k}-term representation within exponent bound {args.bound}")
    return unit_sums.pad_representation(rep, args.l, args.bound).to_json()


def _warn_low_hit(est, spec):
    rate = est.hit_rate
    if rate is None:
        return
    if rate == 0:
        guess = polytope.expected_hit_rate(spec)
        hint = f"; about {polytope.suggested_samples(guess)} samples needed" if guess else ""
        print(f"warning: no hits in {est.samples} samples{hint}", file=sys.stderr)
    elif rate < polytope.LOW_HIT_RATE:
        print(
            f"warning: hit rate {rate:.2e} is below {polytope.LOW_HIT_RATE:g}; "
            f"about {polytope.suggested_samples(rate)} samples give a 2% relative error",
            file=sys.stderr,
        )


def cmd_polytope_volume(args):
    spec = polytope.PolytopeSpec(args.n, args.s)
    est = polytope.mc_volume(spec, args.samples, args.seed, args.threads, args.method)
    if args.method == "box":
        _warn_low_hit(est, spec)
    exact = polytope.closed_form(args.n, args.s)
    out = {"n": args.n, "s": args.s, **est.to_json()}
    out["exact"] = None if exact is None else str(exact)
    out["z"] = None if exact is None else est.z_score(exact)
    return out


def cmd_polytope_region(args):
    K, L, M = args.klm
    est = polytope.region_volume_mc(args.n, K, L, M, args.case, args.samples, args.seed, args.threads)
    out = {"n": args.n, "klm": [K, L, M], "case": args.case, **est.to_json()}
    try:
        exact = polytope.region_exact(args.n, K, L, M, args.case)
        out["exact"] = str(exact)
        out["z"] = est.z_score(exact)
    except DomainError:
        out["exact"] = None
    return out


def cmd_polytope_table(args):
    import warnings

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = polytope.polytope_table(args.samples, args.big_samples, args.seed, args.threads)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = []
    for row in rows:
        j = row.to_json()
        mc = j.pop("mc")
        out.append({**j, "mc_mean": mc["mean"], "mc_std_error": mc["std_error"], "samples": mc["samples"],
                    "seed": mc["seed"], "hits": mc["hits"]})
    return out


def cmd_polytope_identity(args):
    return polytope.c_n2_identity_report(args.n, args.samples, args.seed, args.threads).to_json()


def _load_matrix(args):
    ring = ring_from_name(args.ring)
    try:
        if args.input == "-":
            obj = json.load(sys.stdin)
        elif args.input.lstrip().startswith("["):
            obj = json.loads(args.input)
        else:
            with open(args.input, encoding="utf-8") as fh:
                obj = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {args.input}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid matrix JSON: {exc.msg}") from None
    return matrix_units.RingMatrix.from_json(ring, obj)


def cmd_matrix_decompose(args):
    A = _load_matrix(args)
    dec = matrix_units.two_units_decompose(A)
    out = dec.to_json()
    if not args.words:
        for s in out["summands"]:
            s.pop("word", None)
    return out


def cmd_matrix_diagonalize(args):
    A = _load_matrix(args)
    return matrix_units.diagonalize(A).to_json()


def cmd_matrix_split(args):
    D = _load_matrix(args)
    if args.distinct:
        return [dec.to_json() for dec in matrix_units.distinct_split(D)]
    return matrix_units.diagonal_split(D).to_json()


def cmd_matrix_vamos(args):
    if args.ideal == "default":
        # the pair (2, 1 + sqrt(-d)); generally not a valid witness
        order = QuadraticOrder(-args.d)
        report = matrix_units.vamos_search(args.d, order.from_int(2), order.elt(2, 2), args.height)
    else:
        report = matrix_units.vamos_witness(args.d, args.height)
    return report.to_json()


def cmd_count_classes(args):
    ctx = counting.CountingContext.for_d(args.d)
    res = counting.count_unit_sum_classes(ctx, args.n, args.x, proper_only=args.proper_only)
    return res.to_json(with_list=args.list)


def cmd_count_rational(args):
    ctx = counting.CountingContext.for_d(args.d)
    values = counting.rational_k_sums(ctx, args.k, args.x)
    out = {"d": args.d, "k": args.k, "x": args.x, "count": len(values), "density": len(values) / args.x}
    if args.list:
        out["values"] = values
    return out


def cmd_count_compare(args):
    ctx = counting.CountingContext.for_d(args.d)
    return [{"d": args.d, "n": args.n, **row.to_json()} for row in counting.compare(ctx, args.n, args.x)]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--output", default=argparse.SUPPRESS, help="write to this file instead of stdout")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads for sampling")

    parser = argparse.ArgumentParser(prog="unitsum", description="Sums of units: criteria, searches, volumes, matrices.")
    parser.add_argument("--version", action="version", version=f"unitsum {__version__} (map {MAP_REVISION})")
    parser.add_argument("--format", choices=("json", "csv", "text"), default="json")
    parser.add_argument("--output", default=None)
    parser.add_argument("--threads", type=int, default=1)
    groups = parser.add_subparsers(dest="group", metavar="{criteria,unitsum,polytope,matrix,count}")

    def group(name, help_text):
        p = groups.add_parser(name, help=help_text)
        return p.add_subparsers(dest="command", metavar="command")

    def command(sub, name, handler, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(handler=handler)
        return p

    def seeded(p):
        p.add_argument("--seed", type=_seed, default=None, help=f"64-bit seed (default ${SEED_ENV} or {DEFAULT_SEED})")

    crit = group("criteria", "unit sum number criteria")
    p = command(crit, "quadratic", cmd_criteria_quadratic, "quadratic field criterion")
    p.add_argument("--d", type=int, required=True)
    p = command(crit, "cubic", cmd_criteria_cubic, "pure cubic field criterion")
    p.add_argument("--d", type=int, required=True)
    p = command(crit, "widmer", cmd_criteria_widmer, "discriminant versus regulator inequality")
    p.add_argument("--abs-disc", type=int, required=True)
    p.add_argument("--regulator", type=_real, required=True, help="an upper bound for the regulator")
    p = command(crit, "widmer-index", cmd_criteria_widmer_index, "index of Z[eta] from embeddings")
    p.add_argument("--minpoly", type=_int_list, required=True, help="monic coefficients, leading first")
    p.add_argument("--abs-disc", type=int, required=True)
    p.add_argument("--power", type=int, default=1, help="test eta^power instead of eta")
    p.add_argument("--precision", type=int, default=128, help="working precision in bits")
    p = command(crit, "erdos-family", cmd_criteria_erdos, "the family X^3 + N X + 1")
    p.add_argument("--n", type=int, required=True)
    p = command(crit, "power-basis", cmd_criteria_power_basis, "power basis of units for Z[m^(1/deg)]")
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    us = group("unitsum", "sums of units in quadratic orders")
    for name, handler, help_text in (
        ("find", cmd_unitsum_find, "sum of exactly k units"),
        ("distinct", cmd_unitsum_distinct, "sum of distinct units"),
        ("pad", cmd_unitsum_pad, "find a k-term sum and extend it to l terms"),
    ):
        p = command(us, name, handler, help_text)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--elt", required=True, help="a,b for a + b*sqrt(d); halves like 1/2 allowed")
        p.add_argument("--bound", type=int, default=8, help="exponent bound for real fields")
        if name in ("find", "pad"):
            p.add_argument("--k", type=int, required=True)
        if name == "pad":
            p.add_argument("--l", type=int, required=True)
        if name == "distinct":
            p.add_argument("--max-terms", type=int, default=24)

    poly = group("polytope", "volumes of {g < 1}")
    p = command(poly, "volume", cmd_polytope_volume, "Monte Carlo c_{n,s}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--samples", type=_count, default=10**6)
    p.add_argument("--method", choices=("box", "radial"), default="box")
    seeded(p)
    p = command(poly, "region", cmd_polytope_region, "Monte Carlo volume of a region V_{K,L,M} (s = 2)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--klm", type=_int_list, required=True, help="K,L,M")
    p.add_argument("--case", type=int, default=None, choices=range(1, 8), help="sign case 1..7")
    p.add_argument("--samples", type=_count, default=10**6)
    seeded(p)
    p = command(poly, "table", cmd_polytope_table, "reference c_{n,s} values with exact values and MC checks")
    p.add_argument("--samples", type=_count, default=10**7)
    p.add_argument("--big-samples", type=_count, default=10**8, help="samples for the (2, 4) entry")
    seeded(p)
    p = command(poly, "identity", cmd_polytope_identity, "both sides of the c_{n,2} assembly identity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=_count, default=10**6)
    seeded(p)

    mat = group("matrix", "matrices as sums of two units")
    for name, handler, help_text in (
        ("decompose", cmd_matrix_decompose, "A = M1 + M2 with M1, M2 invertible"),
        ("diagonalize", cmd_matrix_diagonalize, "U A V = D"),
        ("split", cmd_matrix_split, "split a diagonal matrix"),
    ):
        p = command(mat, name, handler, help_text)
        p.add_argument("--ring", default="z", help="z, fp[x], f<p>[x] or hurwitz")
        p.add_argument("--input", required=True, help="JSON file, '-' for stdin, or inline JSON")
        if name == "decompose":
            p.add_argument("--words", action="store_true", help="include generator words")
        if name == "split":
            p.add_argument("--distinct", action="store_true", help="two different splits")
    p = command(mat, "vamos", cmd_matrix_vamos, "bounded search against a non-2-good witness")
    p.add_argument("--d", type=int, required=True, help="positive d for Q(sqrt(-d))")
    p.add_argument("--height", type=int, default=10)
    p.add_argument("--ideal", choices=("prime", "default"), default="prime",
                   help="prime: non-principal prime of odd norm; default: the pair (2, 1 + sqrt(-d))")

    cnt = group("count", "counting unit sums")
    p = command(cnt, "classes", cmd_count_classes, "classes of n-unit sums with N(alpha) <= x")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=_real, required=True)
    p.add_argument("--list", action="store_true")
    p.add_argument("--proper-only", action="store_true", help="only proper subsums must not vanish")
    p = command(cnt, "rational", cmd_count_rational, "positive integers <= x that are sums of at most k units")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=_real, required=True)
    p.add_argument("--list", action="store_true")
    p = command(cnt, "compare", cmd_count_compare, "empirical count against the main term")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=_real_list, required=True, help="comma-separated x values")
    return parser


def _scalar(v):
    return json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v


def render(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    rows = obj if isinstance(obj, list) else [obj]
    if fmt == "csv":
        keys: list[str] = []
        for r in rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _scalar(r.get(k)) for k in keys})
        return buf.getvalue()
    blocks = []
    for r in rows:
        blocks.append("\n".join(f"{k}: {_scalar(v)}" for k, v in r.items()))
    return "\n\n".join(blocks) + "\n"


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        parser.print_usage(sys.stderr)
        print("unitsum: error: a group and command are required", file=sys.stderr)
        return 2
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
    except UsageError as exc:
        print(f"unitsum: error: {exc}", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("unitsum: error: --threads must be at least 1", file=sys.stderr)
        return 2
    fmt = args.format
    try:
        result = args.handler(args)
        code = 0
    except DomainError as exc:
        result = {"error": str(exc), "kind": type(exc).__name__}
        partial = getattr(exc, "partial", None)
        if partial is not None:
            result["partial"] = {str(k): (str(v) if not isinstance(v, (int, float)) else v) for k, v in
                                 (partial.items() if isinstance(partial, dict) else [("value", partial)])}
        fmt = "json"
        code = 1
    text = render(result, fmt)
    if args.output and code == 0:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(dispatch())
