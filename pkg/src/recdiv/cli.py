"""Command-line front end. Every report carries a header that replays it exactly."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import DomainError, RecdivError
from .ffzeros import LemmaViolation, SparseInstance, check_instance, stress_lemma
from .polyzero import IntPolynomial, kronecker_statistic
from .quotient import (
    QuotientProblem,
    admissible,
    count_N,
    hl_count,
    hl_family,
    singular_series,
    split_diagnostic,
)
from .recurrence import fibonacci, from_json as recurrence_from_json, lucas_sequence, to_json as recurrence_to_json
from .sieve import (
    SieveSystem,
    build_sieve_system,
    fitted_constants,
    sieve_bound_shape,
    sieved_count,
)
from .wirsing import catalog, euler_constant_cg, wirsing_sum

SCHEMA_VERSION = 1
EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
_NOT_REPLAYED = {"--out", "--threads"}


class InputError(Exception):
    """Malformed input file or literal; maps to the usage exit code."""


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def parse_int(text: str) -> int:
    """Accept ``100000``, ``1e5`` and ``10**5``."""
    t = text.strip().replace("_", "")
    try:
        if "**" in t:
            base, exp = t.split("**")
            return int(base) ** int(exp)
        d = Decimal(t)
    except (ValueError, InvalidOperation):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(d)


def int_list(text: str) -> list[int]:
    return [parse_int(v) for v in text.split(",") if v.strip()]


def poly_arg(text: str) -> IntPolynomial:
    try:
        return IntPolynomial.parse(text)
    except (DomainError, json.JSONDecodeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _problem(args) -> QuotientProblem:
    inverted = tuple(args.invert_primes or ())
    if args.hl_family:
        return hl_family(args.hl_family)
    if args.problem:
        data = load_json(args.problem)
        try:
            return QuotientProblem(
                recurrence_from_json(data["F"]),
                IntPolynomial.from_json(data["G"]),
                tuple(int(p) for p in data.get("invert_primes", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise InputError(f"{args.problem}: malformed problem file ({exc})") from exc
    if args.fib:
        F = fibonacci()
    elif args.lucas:
        a, b = args.lucas
        F = lucas_sequence(a, b)
    elif args.recurrence:
        try:
            F = recurrence_from_json(load_json(args.recurrence))
        except (KeyError, TypeError) as exc:
            raise InputError(f"{args.recurrence}: malformed recurrence file ({exc})") from exc
    else:
        raise InputError("choose a problem: --fib, --lucas a,b, --hl-family t, --recurrence FILE or --problem FILE")
    if args.g is None:
        raise InputError("--g is required with this problem source")
    return QuotientProblem(F, args.g, inverted)


def _problem_json(prob: QuotientProblem) -> dict:
    return {"F": recurrence_to_json(prob.F), "G": prob.G.to_json(), "invert_primes": list(prob.inverted)}


# ---------------------------------------------------------------------------
# subcommands: each returns (result for JSON, rows for CSV)
# ---------------------------------------------------------------------------

def cmd_count(args):
    prob = _problem(args)
    report = count_N(prob, args.x, retain_members=not args.no_members, mode=args.mode,
                     threads=args.threads, seed=args.seed)
    result = {"problem": _problem_json(prob), **report.to_json()}
    rows = [{"x": report.x, "count": report.count, "bound_shape": report.bound_shape, "ratio": report.fitted_constant}]
    return result, rows


def cmd_split(args):
    prob = _problem(args)
    rep = split_diagnostic(prob, args.x, args.y, args.z, mode=args.mode, threads=args.threads)
    result = {"problem": _problem_json(prob), **rep.to_json()}
    rows = [{"p": p, "count": c, "shape": rep.shapes[p], "ratio": c / rep.shapes[p]} for p, c in sorted(rep.histogram.items())]
    return result, rows


def cmd_kronecker(args):
    res = kronecker_statistic(args.poly, args.x, args.points, threads=args.threads)
    result = {
        "poly": res.poly.to_json(),
        "x": res.x,
        "h": res.h,
        "slope": res.slope,
        "intercept": res.intercept,
        "slope_error": res.slope_error,
        "max_residual": res.max_residual,
        "excluded_primes": res.excluded_primes,
        "table": [{"t": t, "S": s, "residual": r} for t, s, r in zip(res.points, res.sums, res.residuals)],
    }
    rows = [{"t": t, "S": s, "residual": r} for t, s, r in zip(res.points, res.sums, res.residuals)]
    return result, rows


def cmd_sieve(args):
    xs = args.x
    rows = []
    systems = []
    for x in xs:
        if args.system:
            system = SieveSystem.from_json(load_json(args.system))
        else:
            if args.gtilde is None:
                raise InputError("--gtilde or --system is required")
            z = args.z if args.z is not None else math.isqrt(x) if args.z_power is None else int(x ** args.z_power)
            system = build_sieve_system(args.gtilde, args.roots or (), args.invert_primes or (), args.y, z)
        h = args.h if args.h is not None else system.h
        count = sieved_count(x, system, threads=args.threads)
        shape = sieve_bound_shape(x, max(system.y, 2), h)
        rows.append({"x": x, "y": system.y, "z": system.z, "h": h, "count": count, "shape": shape, "ratio": count / shape})
        systems.append(system)
    if args.save_system:
        Path(args.save_system).write_text(systems[-1].dumps())
    constants, spread = fitted_constants([r["count"] for r in rows], [r["shape"] for r in rows])
    result = {"rows": rows, "fitted_constants": constants, "spread": spread,
              "exclusions": {str(p): v for p, v in sorted(systems[-1].exclusions.items())}}
    return result, rows


def cmd_wirsing(args):
    if args.omega_system:
        from .sieve import gy_from_system

        g = gy_from_system(SieveSystem.from_json(load_json(args.omega_system)))
    else:
        g = catalog(args.g)
    rows_raw = wirsing_sum(g, args.x)
    c = euler_constant_cg(g, args.h, args.truncation)
    rows = [{"x": r.x, "sum": r.sum, "ratio": r.ratio} for r in rows_raw]
    result = {
        "g": g.name,
        "h": g.h if args.h is None else args.h,
        "rows": rows,
        "abs_ratios": [r.abs_ratio for r in rows_raw],
        "c_g": c.value,
        "truncation": c.truncation,
        "c_g_tail_bound": c.tail_bound,
    }
    return result, rows


def cmd_ffzeros(args):
    if args.instance:
        data = load_json(args.instance)
        try:
            inst = SparseInstance.from_json(data)
        except (KeyError, TypeError) as exc:
            raise InputError(f"{args.instance}: malformed instance ({exc})") from exc
        rec = check_instance(inst)
        return {"instance": inst.to_json(), **rec}, [rec]
    if not args.stress:
        raise InputError("pass --stress or --instance FILE")
    rep = stress_lemma(args.q_max, args.r, args.trials, args.seed, threads=args.threads)
    return rep, rep["records"]


def cmd_hl(args):
    tup = args.tuple
    ok, witness = admissible(tup)
    result: dict[str, Any] = {"tuple": tup, "admissible": ok, "witness": witness}
    if args.x is not None:
        result["hl_count"] = hl_count(tup, args.x)
        result["x"] = args.x
    if ok:
        s = singular_series(tup, args.truncation)
        result["singular_series"] = s.value
        result["truncation"] = s.truncation
        result["singular_series_tail_bound"] = s.tail_bound
        if len(tup) <= 4:
            fam = hl_family(tup)
            result["family"] = _problem_json(fam)
    rows = [{k: v for k, v in result.items() if not isinstance(v, (list, dict))}]
    return result, rows


COMMANDS = {
    "count-quotients": cmd_count,
    "split": cmd_split,
    "kronecker": cmd_kronecker,
    "sieve-count": cmd_sieve,
    "wirsing": cmd_wirsing,
    "ffzeros": cmd_ffzeros,
    "hl": cmd_hl,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="worker processes; never changes the output")
    p.add_argument("--seed", type=int, default=0)


def _problem_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--fib", action="store_true", help="F = Fibonacci numbers")
    src.add_argument("--lucas", type=int_list, metavar="A,B", help="F(n+2) = A F(n+1) + B F(n), F(0)=0, F(1)=1")
    src.add_argument("--hl-family", type=int_list, metavar="TUPLE")
    src.add_argument("--recurrence", metavar="FILE", help="recurrence JSON file")
    src.add_argument("--problem", metavar="FILE", help='problem JSON file {"F":..., "G":..., "invert_primes":[...]}')
    p.add_argument("--g", type=poly_arg, help='G as "x^2+1" or a JSON coefficient list')
    p.add_argument("--invert-primes", type=int_list, metavar="P,Q")
    p.add_argument("--mode", choices=("exact", "modular"), default="exact")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recdiv", description=__doc__)
    parser.add_argument("--version", action="version", version=f"recdiv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count-quotients", help="enumerate n <= x with F(n)/G(n) in Z[1/S]")
    _problem_flags(p)
    p.add_argument("--x", type=parse_int, required=True)
    p.add_argument("--no-members", action="store_true")
    _common(p)

    p = sub.add_parser("split", help="N1/N2 decomposition with the per-prime histogram")
    _problem_flags(p)
    p.add_argument("--x", type=parse_int, required=True)
    p.add_argument("--y", type=parse_int)
    p.add_argument("--z", type=parse_int)
    _common(p)

    p = sub.add_parser("kronecker", help="sum of eta_f(p) log p / p and its slope")
    p.add_argument("--poly", type=poly_arg, required=True)
    p.add_argument("--x", type=parse_int, required=True)
    p.add_argument("--points", type=int_list)
    _common(p)

    p = sub.add_parser("sieve-count", help="exact sieved counts against x (log y / log x)^h")
    p.add_argument("--gtilde", type=poly_arg)
    p.add_argument("--roots", type=int_list)
    p.add_argument("--invert-primes", type=int_list)
    p.add_argument("--x", type=int_list, required=True, help="one or more thresholds, comma separated")
    p.add_argument("--y", type=parse_int, default=2)
    p.add_argument("--z", type=parse_int)
    p.add_argument("--z-power", type=float, help="z = x**power for each x (default: sqrt x)")
    p.add_argument("--h", type=int)
    p.add_argument("--system", metavar="FILE", help="load a saved sieve system")
    p.add_argument("--save-system", metavar="FILE")
    _common(p)

    p = sub.add_parser("wirsing", help="partial sums of a multiplicative function and c_g")
    p.add_argument("--g", default="mu2_over_n", help="catalog name, e.g. mu2_over_n, squarefree_k_over_n:2")
    p.add_argument("--omega-system", metavar="FILE", help="use g_y built from a saved sieve system")
    p.add_argument("--x", type=int_list, required=True)
    p.add_argument("--h", type=float)
    p.add_argument("--truncation", type=parse_int, default=10**5)
    _common(p)

    p = sub.add_parser("ffzeros", help="zeros of sum c_i a_i^m over F_q against the bound")
    p.add_argument("--stress", action="store_true")
    p.add_argument("--instance", metavar="FILE")
    p.add_argument("--trials", type=parse_int, default=1000)
    p.add_argument("--q-max", type=parse_int, default=1 << 12)
    p.add_argument("--r", type=int_list, default=[2, 3, 4])
    _common(p)

    p = sub.add_parser("hl", help="admissibility, T_h(x), singular series and the quotient family")
    p.add_argument("--tuple", type=int_list, required=True)
    p.add_argument("--x", type=parse_int)
    p.add_argument("--truncation", type=parse_int, default=10**6)
    _common(p)

    p = sub.add_parser("replay", help="rerun the command recorded in a report header")
    p.add_argument("report")
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)
    return parser


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def replay_argv(argv: Sequence[str]) -> list[str]:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        name = tok.split("=", 1)[0]
        if name in _NOT_REPLAYED:
            skip = "=" not in tok
            continue
        out.append(tok)
    return out


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return json.dumps(v)


def render(meta: dict, result: dict, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "result": result}, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    columns: list[str] = []
    for row in rows:
        for k in row:
            if k not in columns:
                columns.append(k)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def read_meta(text: str) -> dict:
    if text.startswith("# "):
        return json.loads(text.splitlines()[0][2:])
    return json.loads(text)["meta"]


def _fail(code: int, kind: str, message: str, extra: dict | None = None) -> int:
    record = {"error": kind, "message": message, **(extra or {})}
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "replay":
        try:
            meta = read_meta(Path(args.report).read_text())
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            return _fail(EXIT_USAGE, "parse", f"{args.report}: no replayable header ({exc})")
        extra = ["--threads", str(args.threads)] + (["--out", args.out] if args.out else [])
        return main(list(meta["argv"]) + extra)
    try:
        result, rows = COMMANDS[args.command](args)
    except InputError as exc:
        return _fail(EXIT_USAGE, "parse", str(exc))
    except LemmaViolation as exc:
        return _fail(EXIT_DOMAIN, "violation", str(exc), {"instance": exc.instance})
    except RecdivError as exc:
        return _fail(EXIT_DOMAIN, type(exc).__name__, str(exc))
    meta = {
        "schema_version": SCHEMA_VERSION,
        "tool": "recdiv",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "argv": replay_argv(argv),
    }
    text = render(meta, result, rows, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
