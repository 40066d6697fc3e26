"""Command line front end: one subcommand per experiment, CSV or JSON out.

Exit status is 0 on success, 2 for bad arguments and 3 when a factorization
budget runs out.
"""
from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import time
from decimal import Decimal
from fractions import Fraction

from . import arith, cyclotomic, densities, fermat, stats
from .arith import FactorizationTimeout

EXIT_OK, EXIT_ARGS, EXIT_BUDGET = 0, 2, 3


class UsageError(ValueError):
    pass


def parse_int(text: str) -> int:
    """Integers written as 1000, 10**7, 10^7, 2e5, 2*10^5 or sums like 10^7+1009."""
    s = text.strip().replace("^", "**").replace("_", "")
    if "+" in s:
        return sum(parse_int(part) for part in s.split("+"))
    if re.fullmatch(r"\d+", s):
        return int(s)
    m = re.fullmatch(r"(\d+)\*(\d+)\*\*(\d+)", s)
    if m:
        return int(m[1]) * int(m[2]) ** int(m[3])
    m = re.fullmatch(r"(\d+)\*\*(\d+)", s)
    if m:
        return int(m[1]) ** int(m[2])
    m = re.fullmatch(r"(\d+(?:\.\d+)?)[eE](\d+)", s)
    if m:
        v = Fraction(m[1]) * 10 ** int(m[2])
        if v.denominator == 1:
            return int(v)
    raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def parse_int_list(text: str) -> list[int]:
    """Comma separated integers or inclusive ranges, e.g. 0-9,123-132."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if re.fullmatch(r"\d+-\d+", part):
            lo, hi = map(int, part.split("-"))
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(parse_int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".15g")
    if isinstance(v, Decimal):
        return format(v, ".15g")
    if isinstance(v, Fraction):
        return format(float(v), ".15g")
    return v


def _json_value(v):
    if isinstance(v, (Decimal, Fraction)):
        return float(fmt(v))
    if isinstance(v, float):
        return float(format(v, ".15g"))
    return v


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


def _prime(args):
    _need(args, "p")
    if len(args.p) != 1:
        raise UsageError("--p takes a single prime here")
    return arith.as_prime(args.p[0])


# each handler returns a list of row dicts; keys of the first row form the header

def cmd_quotient(a):
    _need(a, "a")
    r = fermat.fermat_quotient(a.a, _prime(a))
    return [{"a": r.a, "p": r.p, "q": r.q}]


def cmd_variants(a):
    _need(a, "a")
    r = fermat.quotient_variants(a.a, _prime(a))
    return [{"a": r.a, "p": r.p, "order": r.order, "t": r.t, "q": r.q, "q1": r.q1, "q2": r.q2, "agree": r.agree}]


def cmd_first_zero(a):
    _need(a, "a")
    if a.p is not None:
        return [{"a": a.a, "p": p, "zero": fermat.verify_pair(a.a, p)} for p in a.p]
    _need(a, "lo", "hi")
    hit = fermat.first_solution_search(
        a.a, a.lo, a.hi, threads=a.threads, checkpoint=a.checkpoint, verbose=a.progress
    )
    return [{"a": a.a, "lo": a.lo, "hi": a.hi, "p": "" if hit is None else hit}]


def cmd_solutions(a):
    p = _prime(a)
    return [{"p": p, "z": s.z, "d": s.order, "lambda": s.lam} for s in fermat.solutions_in_range(p)]


def cmd_lift(a):
    _need(a, "a")
    r = fermat.lift_to_solution(a.a, a.v[0] if a.v else 0, _prime(a))
    return [{"p": r.p, "z": r.z, "u": r.u, "Z": r.Z, "lambda": r.lam}]


def cmd_crt(a):
    _need(a, "p")
    s = fermat.crt_solutions(a.p)
    tag = "*".join(map(str, s.primes))
    return [{"primes": tag, "modulus": s.modulus, "A": A} for A in s.residues]


def cmd_orders_of_powers(a):
    _need(a, "a")
    p = _prime(a)
    return [{"g": a.a, "p": p, "i": i, "order": o} for i, o in enumerate(fermat.orders_of_powers(a.a, p), 1)]


def cmd_theta(a):
    _need(a, "a")
    p = _prime(a)
    return [{"a": a.a, "p": p, "j": j, "theta": t} for j, t in fermat.theta_offsets(a.a, p)]


def _window(a):
    _need(a, "lo", "hi")
    if a.hi <= a.lo:
        raise UsageError("need --lo < --hi")
    return a.lo, a.hi - a.lo


def cmd_classify(a):
    B, H = _window(a)
    c = stats.classify_primes(B, H, overrun=a.overrun, threads=a.threads)
    obs = c.proportions()
    names = ("zero", "at_least_1", "at_least_2", "at_least_3")
    return [
        {"B": B, "H": H, "N": c.n_total, "bucket": n, "observed": o, "model": m}
        for n, o, m in zip(names, obs, c.model)
    ] + [{"B": B, "H": H, "N": c.n_total, "bucket": f"N{i}", "observed": v, "model": ""}
         for i, v in enumerate((c.n0, c.n1, c.n2, c.n3_plus))]


def cmd_coverage(a):
    p = _prime(a)
    frac, missing = stats.value_coverage(p)
    return [{"p": p, "missing_fraction": frac, "missing_count": len(missing)}]


def cmd_lambda_stats(a):
    if a.p is not None:
        _need(a, "v")
        p = _prime(a)
        return [{"p": p, "v": v, "count": len(w), "z": " ".join(map(str, w))}
                for v in a.v for w in [stats.lambda_multiplicity(p, v)]]
    B, H = _window(a)
    if a.v is None:
        _need(a, "seed")
        r = stats.random_multiplicity_survey(B, H, n_values=a.n or 50, seed=a.seed, overrun=a.overrun)
    else:
        r = stats.multiplicity_survey(B, H, a.v, overrun=a.overrun)
    return [{"B": B, "H": H, "primes": r.n_primes, "v": v, "K": k, "ratio": r.ratio} for v, k in r.K]


def cmd_nt_equidist(a):
    _need(a, "bound", "t")
    nt, n, avg = stats.equidistribution_nt(a.bound, a.t, overrun=not a.strict)
    return [{"B": a.bound, "t": a.t, "N_t": nt, "N": n, "N_over_t": avg}]


def cmd_moments(a):
    _need(a, "n")
    r = stats.sigma_moment(_prime(a), a.n)
    return [{"p": r.p, "n": r.n, "sigma": r.sigma}]


def cmd_binom_tail(a):
    _need(a, "n")
    p = _prime(a)
    return [{"p": p, "n": a.n, "prob": stats.binomial_tail(p, a.n).prob}]


def cmd_ratio(a):
    _need(a, "a")
    p = _prime(a)
    lo, hi = stats.ratio_bounds(p, a.a)
    return [{"p": p, "a": a.a, "h": stats.log_height(p, a.a), "ratio": stats.ratio_encadre(p, a.a),
             "lower": lo, "upper": hi}]


def cmd_epsilon(a):
    _need(a, "a")
    p = _prime(a)
    prob, eps = stats.epsilon_exponent(p, a.a)
    return [{"p": p, "a": a.a, "prob": prob, "epsilon": eps}]


def cmd_cp(a):
    _need(a, "m")
    r = densities.c_p(a.m, _prime(a))
    return [{"m": r.m, "p": r.p, "c_p": r.c_p}]


def cmd_pm_product(a):
    _need(a, "m")
    r = densities.p_m_product(a.m, a.n or 2 * 10**6)
    return [{"m": a.m, "n_max": r.bound, "value": r.value, "primes": r.terms_used}]


def cmd_local_table(a):
    p = _prime(a)
    return [{"p": p, "A": A, "d": d} for A, d in densities.local_solution_table(p)]


def cmd_dp_product(a):
    _need(a, "x")
    r = densities.dp_product(a.x)
    return [{"x": a.x, "value": r.value, "reference": r.reference, "primes": r.terms_used, **r.extra}]


def cmd_crt_count(a):
    _need(a, "x")
    count, modulus = densities.crt_exact_count(a.x)
    return [{"x": a.x, "count": count, "modulus": modulus}]


def cmd_survey(a):
    _need(a, "y", "x")
    n = densities.survey_nonzero(a.y, a.x, overrun=a.overrun, threads=a.threads)
    return [{"y": a.y, "x": a.x, "count": n, "comparator": densities.survey_comparator(a.y, a.x)}]


def cmd_upsilon_eta(a):
    rows = []
    C = a.c if a.c is not None else 1.1
    _need(a, "p")
    for p in a.p:
        u = densities.upsilon(p)
        e = densities.eta(p, C)
        rows.append({"p": p, "C": C, "upsilon": u, "eta": e, "eta_minus_upsilon": e - u})
    return rows


def cmd_s_partial(a):
    _need(a, "x")
    r = densities.s_partial(a.x, threads=a.threads)
    return [{"x": a.x, "S": r.value, "half_loglog": r.reference, "primes": r.terms_used}]


def cmd_series(a):
    _need(a, "a", "bound")
    r = densities.series_sums(a.a, a.bound)
    return [{"a": r.a, "bound": r.bound, "binom_sum": r.binom_sum, "stirling_sum": r.stirling_sum,
             "full_tail_sum": r.full_tail_sum, "limit_weighted_sum": r.limit_weighted_sum}]


def cmd_p0(a):
    _need(a, "a", "c")
    return [{"a": a.a, "C": a.c, "p0": densities.p0_solver(a.a, a.c)}]


def cmd_avg_count(a):
    _need(a, "lo", "hi", "bound")
    mean = fermat.average_solution_count(a.lo, a.hi, a.bound, overrun=a.overrun, threads=a.threads)
    return [{"a_lo": a.lo, "a_hi": a.hi, "p_bound": a.bound, "mean": mean, "exact": str(mean)}]


def cmd_table_small(a):
    lo = a.lo if a.lo is not None else 2
    hi = a.hi if a.hi is not None else 14
    bound = a.bound if a.bound is not None else 100
    return [{"a": x, "p": p} for x, p in fermat.zero_pairs(lo, hi, bound)]


def cmd_cyclotomic(a):
    _need(a, "m", "a")
    ev = cyclotomic.reduce(a.m, a.a)
    row = {"m": ev.m, "a": ev.a, "value": ev.value, "gcd_with_m": ev.gcd_with_m, "reduced": ev.reduced}
    if a.m != 2:
        chk = cyclotomic.factor_congruence_check(a.m, a.a)
        row["factors"] = " ".join(f"{q}^{e}" if e > 1 else str(q) for q, e in chk.factors)
        row["unfactored"] = chk.unfactored
        row["all_1_mod_m"] = chk.holds
    return [row]


def cmd_coprime(a):
    _need(a, "a", "m")
    r = cyclotomic.pairwise_coprime_check(a.a, a.m)
    rows = [{"a": a.a, "m_max": a.m, "holds": r.holds, "m": "", "m2": "", "gcd": "", "kind": ""}]
    for kind, pairs in (("violation", r.bad_pairs), ("exception", r.exception_pairs)):
        rows += [{"a": a.a, "m_max": a.m, "holds": r.holds, "m": i, "m2": j, "gcd": g, "kind": kind}
                 for i, j, g in pairs]
    return rows


def cmd_wieferich(a):
    _need(a, "a")
    p = _prime(a)
    return [{"a": a.a, "p": p, "order": arith.multiplicative_order(a.a, p),
             "zero": cyclotomic.wieferich_equivalence_check(a.a, p)}]


def cmd_factor(a):
    _need(a, "n")
    f = arith.factorize(a.n)
    return [{"n": a.n, "prime": q, "exponent": e} for q, e in f.factors]


# subcommand -> (handler, library operations it exposes)
COMMANDS = {
    "quotient": (cmd_quotient, ["fermat.fermat_quotient", "arith.pow_mod"]),
    "variants": (cmd_variants, ["fermat.quotient_variants", "arith.multiplicative_order"]),
    "first-zero": (cmd_first_zero, ["fermat.first_solution_search", "fermat.verify_pair"]),
    "solutions": (cmd_solutions, ["fermat.solutions_in_range"]),
    "lift": (cmd_lift, ["fermat.lift_to_solution"]),
    "crt": (cmd_crt, ["fermat.crt_solutions", "fermat.solutions_mod_p2"]),
    "orders-of-powers": (cmd_orders_of_powers, ["fermat.orders_of_powers"]),
    "theta": (cmd_theta, ["fermat.theta_offsets"]),
    "classify": (cmd_classify, ["stats.classify_primes", "arith.prime_range"]),
    "coverage": (cmd_coverage, ["stats.value_coverage"]),
    "lambda-stats": (cmd_lambda_stats, ["stats.lambda_multiplicity", "stats.multiplicity_survey"]),
    "nt-equidist": (cmd_nt_equidist, ["stats.equidistribution_nt"]),
    "moments": (cmd_moments, ["stats.sigma_moment"]),
    "binom-tail": (cmd_binom_tail, ["stats.binomial_tail"]),
    "ratio": (cmd_ratio, ["stats.ratio_encadre"]),
    "epsilon": (cmd_epsilon, ["stats.epsilon_exponent"]),
    "cp": (cmd_cp, ["densities.c_p", "arith.euler_phi"]),
    "pm-product": (cmd_pm_product, ["densities.p_m_product"]),
    "local-table": (cmd_local_table, ["densities.local_solution_table"]),
    "dp-product": (cmd_dp_product, ["densities.dp_product"]),
    "crt-count": (cmd_crt_count, ["densities.crt_exact_count"]),
    "survey": (cmd_survey, ["densities.survey_nonzero"]),
    "upsilon-eta": (cmd_upsilon_eta, ["densities.upsilon", "densities.eta", "densities.eta_minus_upsilon",
                                      "arith.factorize", "arith.phi_squared_sum"]),
    "s-partial": (cmd_s_partial, ["densities.s_partial"]),
    "series": (cmd_series, ["densities.series_sums"]),
    "p0": (cmd_p0, ["densities.p0_solver"]),
    "avg-count": (cmd_avg_count, ["fermat.average_solution_count"]),
    "table-small": (cmd_table_small, ["fermat.zero_pairs"]),
    "cyclotomic": (cmd_cyclotomic, ["cyclotomic.phi_m_eval", "cyclotomic.reduce",
                                    "cyclotomic.factor_congruence_check"]),
    "coprime": (cmd_coprime, ["cyclotomic.pairwise_coprime_check"]),
    "wieferich": (cmd_wieferich, ["cyclotomic.wieferich_equivalence_check"]),
    "factor": (cmd_factor, ["arith.is_prime", "arith.divisors", "arith.moebius"]),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--a", type=parse_int)
    g.add_argument("--p", type=parse_int_list, help="prime, or comma list for crt / point checks")
    g.add_argument("--lo", type=parse_int)
    g.add_argument("--hi", type=parse_int)
    g.add_argument("--m", type=parse_int)
    g.add_argument("--n", type=parse_int)
    g.add_argument("--t", type=float)
    g.add_argument("--v", type=parse_int_list, help="residue list such as 0-9,123")
    g.add_argument("--y", type=parse_int)
    g.add_argument("--x", type=parse_int)
    g.add_argument("--c", type=float)
    g.add_argument("--bound", type=parse_int)
    r = common.add_argument_group("run")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--seed", type=int)
    r.add_argument("--checkpoint")
    r.add_argument("--overrun", action="store_true",
                   help="replay the original loop bounds (one extra prime past the range)")
    r.add_argument("--strict", action="store_true", help="nt-equidist: stop strictly below --bound")
    r.add_argument("--progress", action="store_true", help="progress lines on stderr")

    parser = argparse.ArgumentParser(prog="fermatq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _config(args) -> dict:
    skip = {"progress"}
    return {k: v for k, v in vars(args).items() if v is not None and v is not False and k not in skip}


def emit(rows: list[dict], args, elapsed: float, out=None) -> None:
    out = out or sys.stdout
    if args.format == "json":
        doc = {
            "config": _config(args),
            "rows": [{k: _json_value(v) for k, v in r.items()} for r in rows],
            "runtime_seconds": round(elapsed, 3),
        }
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    header = list(rows[0]) if rows else ["result"]
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(k, "")) for k in header])


def run(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    handler = COMMANDS[args.command][0]
    start = time.perf_counter()
    try:
        rows = handler(args)
    except FactorizationTimeout as exc:
        print(f"fermatq: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"fermatq {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    emit(rows, args, time.perf_counter() - start, out)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
