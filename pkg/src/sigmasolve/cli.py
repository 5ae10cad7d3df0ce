"""Command-line front end.

Records go to stdout (text or JSON lines, one record per line), progress
and diagnostics to stderr.  Big integers are always emitted as decimal
strings in JSON so downstream consumers cannot truncate them to 64 bits.

Exit codes: 0 run completed (with or without solutions), 2 invalid
equation or arguments, 3 resource failure (factorization budget or oracle
ceiling).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import engine, oracle
from .engine import SolutionReport
from .model import (
    Constraints,
    Equation,
    InfiniteFamily,
    InvalidEquationError,
    Solution,
    UnsatisfiableConstraintsError,
)
from .numtheory import (
    FactorizationBudgetError,
    factorize,
    sigma,
    smallest_with_tau,
    tau,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _json_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


class _Emitter:
    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout

    def emit(self, record: dict) -> None:
        if self.fmt == "json":
            print(_json_line(record), file=self.out)
        else:
            kind = record["type"]
            fields = " ".join(
                f"{k}={v}" for k, v in record.items() if k != "type"
            )
            print(f"{kind} {fields}", file=self.out)


def _solution_record(sol: Solution) -> dict:
    return {
        "type": "solution" if sol.within_bound else "extra",
        "n": str(sol.n),
        "node": str(sol.node_m),
        "method": sol.method,
    }


def _family_record(fam: InfiniteFamily) -> dict:
    return {
        "type": "family",
        "multiplier": str(fam.multiplier),
        "p_min": str(fam.p_min),
        "excluded": [str(p) for p in sorted(fam.excluded_primes)],
    }


def _summary_record(report: SolutionReport, strict: bool, workers: int) -> dict:
    return {
        "type": "summary",
        "equation": {
            "a": str(report.equation.a),
            "b": str(report.equation.b),
            "c": str(report.equation.c),
        },
        "limit": str(report.equation.limit),
        "strict": strict,
        "solutions": len(report.solutions),
        "extras": len(report.extras),
        "families": len(report.families),
        "nodes": report.stats.nodes,
        "legendre_pruned": report.stats.legendre_pruned,
        "wall_time_s": round(report.stats.wall_time_s, 3),
        "workers": workers,
    }


def _emit_report(report: SolutionReport, emitter: _Emitter, strict: bool, workers: int) -> None:
    for sol in report.solutions:
        emitter.emit(_solution_record(sol))
    for sol in report.extras:
        emitter.emit(_solution_record(sol))
    for fam in report.families:
        emitter.emit(_family_record(fam))
    emitter.emit(_summary_record(report, strict, workers))


def _parse_range(text: str) -> tuple[int | None, int | None]:
    """MIN, MIN:MAX, or :MAX."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo) if lo else None, int(hi) if hi else None)
    return int(text), None


def _constraints_from_args(args) -> Constraints:
    omega_min = omega_max = bigomega_min = bigomega_max = None
    if args.omega:
        omega_min, omega_max = _parse_range(args.omega)
    if args.bigomega:
        bigomega_min, bigomega_max = _parse_range(args.bigomega)
    return Constraints(
        squarefree=args.squarefree,
        even_only=args.even_only,
        coprime_to=args.coprime_to,
        omega_min=omega_min,
        omega_max=omega_max,
        bigomega_min=bigomega_min,
        bigomega_max=bigomega_max,
        numdiv=args.numdiv,
    )


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--limit", "-U", type=int, required=True, help="search bound U")
    strictness = sub.add_mutually_exclusive_group()
    strictness.add_argument(
        "--strict", dest="strict", action="store_true", default=True,
        help="report only n <= U (default)",
    )
    strictness.add_argument(
        "--no-strict", dest="strict", action="store_false",
        help="also report shortcut solutions above U",
    )
    sub.add_argument("--squarefree", action="store_true", help="require n squarefree")
    sub.add_argument("--even-only", action="store_true", help="require n even")
    sub.add_argument("--coprime-to", type=int, default=1, metavar="N",
                     help="require gcd(n, N) = 1")
    sub.add_argument("--omega", metavar="MIN[:MAX]", default=None,
                     help="bounds on the number of distinct prime factors")
    sub.add_argument("--bigomega", metavar="MIN[:MAX]", default=None,
                     help="bounds on the number of prime factors with multiplicity")
    sub.add_argument("--numdiv", type=int, default=None, metavar="D",
                     help="require exactly D divisors")
    sub.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: SIGMASOLVE_WORKERS or core count)")
    sub.add_argument("--output", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigmasolve",
        description="Find all n <= U with a*sigma(n) = b*n + c.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_solve = subs.add_parser("solve", help="solve a*sigma(n) = b*n + c")
    p_solve.add_argument("a", type=int)
    p_solve.add_argument("b", type=int)
    p_solve.add_argument("c", type=int)
    _add_common_flags(p_solve)

    p_ab = subs.add_parser("abundance", help="sigma(n) = 2n + d")
    p_ab.add_argument("d", type=int)
    _add_common_flags(p_ab)

    p_hyper = subs.add_parser("hyperperfect", help="n = 1 + k(sigma(n) - n - 1)")
    p_hyper.add_argument("k", type=int)
    _add_common_flags(p_hyper)

    p_fp = subs.add_parser(
        "fperfect", help="2 f(n) = sum of f over divisors, f(x) = u*x + v"
    )
    p_fp.add_argument("u", type=int)
    p_fp.add_argument("v", type=int)
    _add_common_flags(p_fp)

    p_verify = subs.add_parser("verify", help="check one n against the equation")
    p_verify.add_argument("a", type=int)
    p_verify.add_argument("b", type=int)
    p_verify.add_argument("c", type=int)
    p_verify.add_argument("n", type=int)
    p_verify.add_argument("--output", choices=("text", "json"), default="text")

    p_oracle = subs.add_parser("oracle", help="brute-force scan for spot checks")
    p_oracle.add_argument("a", type=int)
    p_oracle.add_argument("b", type=int)
    p_oracle.add_argument("c", type=int)
    _add_common_flags(p_oracle)

    return parser


def _resolve_workers(args) -> int:
    if getattr(args, "workers", None):
        return max(1, args.workers)
    return engine.default_workers()


def _run_solve(eq: Equation, args, emitter: _Emitter) -> int:
    cons = _constraints_from_args(args)
    workers = _resolve_workers(args)
    report = engine.solve(eq, cons, strict=args.strict, workers=workers)
    _emit_report(report, emitter, args.strict, workers)
    return EXIT_OK


def _run_fperfect(args, emitter: _Emitter) -> int:
    u, v, limit = args.u, args.v, args.limit
    if u == 0:
        raise InvalidEquationError("u must be nonzero for f(x) = u*x + v")
    cons = _constraints_from_args(args)
    workers = _resolve_workers(args)
    feasible = [
        d for d in range(1, 2 * int(limit**0.5) + 2)
        if smallest_with_tau(d, limit=limit) is not None
    ]
    print(f"fperfect: {len(feasible)} feasible divisor counts", file=sys.stderr)
    merged = engine.PartialReport()
    for d in feasible:
        a, b, c = u, 2 * u, v * (2 - d)
        if a < 0:
            a, b, c = -a, -b, -c
        sub_cons = replace(cons, numdiv=d)
        report = engine.solve(
            Equation(a, b, c, limit), sub_cons, strict=args.strict, workers=workers
        )
        for sol in report.solutions + report.extras:
            # re-verify against the f-perfect definition itself
            fact = factorize(sol.n)
            if 2 * (u * sol.n + v) != u * sigma(fact) + v * tau(fact):
                raise AssertionError(f"f-perfect re-verification failed for {sol.n}")
            merged.record(sol)
        for fam in report.families:
            merged.record_family(fam)
        merged.stats = merged.stats.add(report.stats)
    final = SolutionReport(
        equation=Equation(u, 2 * u, 0, limit),
        solutions=tuple(sorted(merged.solutions.values(), key=Solution.sort_key)),
        extras=tuple(sorted(merged.extras.values(), key=Solution.sort_key)),
        families=tuple(
            sorted(merged.families.values(), key=lambda f: (f.multiplier, f.p_min))
        ),
        stats=merged.stats,
    )
    _emit_report(final, emitter, args.strict, workers)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(name)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    emitter = _Emitter(args.output)
    try:
        if args.command == "solve":
            return _run_solve(Equation(args.a, args.b, args.c, args.limit), args, emitter)
        if args.command == "abundance":
            return _run_solve(Equation(1, 2, args.d, args.limit), args, emitter)
        if args.command == "hyperperfect":
            k = args.k
            if k < 1:
                raise InvalidEquationError("hyperperfect requires k >= 1")
            return _run_solve(Equation(k, k + 1, k - 1, args.limit), args, emitter)
        if args.command == "fperfect":
            return _run_fperfect(args, emitter)
        if args.command == "verify":
            result = engine.verify(Equation(args.a, args.b, args.c, max(args.n, 1)), args.n)
            emitter.emit(
                {
                    "type": "verify",
                    "n": str(result.n),
                    "holds": result.holds,
                    "sigma": str(result.sigma_n),
                    "lhs": str(result.lhs),
                    "rhs": str(result.rhs),
                }
            )
            return EXIT_OK
        if args.command == "oracle":
            cons = _constraints_from_args(args)
            values = oracle.brute_solve(Equation(args.a, args.b, args.c, args.limit), cons)
            for n in values:
                emitter.emit({"type": "solution", "n": str(n), "method": "oracle"})
            emitter.emit(
                {"type": "summary", "solutions": len(values), "limit": str(args.limit)}
            )
            return EXIT_OK
        parser.error(f"unknown command {args.command}")
    except (InvalidEquationError, UnsatisfiableConstraintsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (FactorizationBudgetError, oracle.OracleCeilingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
