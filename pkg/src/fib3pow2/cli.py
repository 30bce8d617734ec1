"""Command line entry point.

Exit codes: 0 when the requested check passes, 1 on a mathematical failure,
2 on usage errors, unreadable files or exhausted precision.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

from .realint import Ambiguous, PrecisionContext, Undecidable

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ENV_BITS = "FIB3POW2_BITS"


@dataclass(frozen=True)
class Config:
    n_max: int = 550
    bits: int = 256
    bits_max: int = 65536
    M_override: int | None = None
    output: str | None = None
    format: str = "text"

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("--n-max must be at least 2")
        if self.bits > self.bits_max:
            raise ValueError("--bits must not exceed --bits-max")

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.bits, self.bits_max)


class UsageError(Exception):
    pass


def _big(s: str) -> int:
    """Integer argument; accepts ``9e28``-style exact decimals."""
    from fractions import Fraction
    try:
        v = Fraction(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if v.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    return int(v)


def _emit(cfg: Config, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, default=str) + "\n"


# -- subcommands ----------------------------------------------------------

def cmd_search(args, cfg: Config) -> int:
    from .search import enumerate_solutions
    sols = enumerate_solutions(cfg.n_max, jobs=args.jobs)
    if cfg.format == "json":
        _emit(cfg, _json({"n_max": cfg.n_max, "count": len(sols),
                          "solutions": [list(s.astuple()) for s in sols]}))
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "m", "l", "a"])
        w.writerows(s.astuple() for s in sols)
        _emit(cfg, buf.getvalue())
    else:
        lines = [f"{s.n} {s.m} {s.l} {s.a}" for s in sols]
        lines.append(f"# {len(sols)} solutions, max n = {max(s.n for s in sols)}, "
                     f"max a = {max(s.a for s in sols)}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_PASS


def cmd_verify_table(args, cfg: Config) -> int:
    from .search import verify_table
    diff = verify_table(args.table, cfg.n_max)
    if cfg.format == "json":
        _emit(cfg, _json(diff.to_dict()))
    else:
        d = diff.to_dict()
        out = [f"table rows: {d['table_count']}  search: {d['search_count']}  "
               f"{'MATCH' if diff.ok else 'MISMATCH'}"]
        for key in ("missing", "extra", "duplicates", "not_solutions"):
            if d[key]:
                out.append(f"{key}: " + ", ".join("(" + ",".join(map(str, t)) + ")" for t in d[key]))
        _emit(cfg, "\n".join(out) + "\n")
    return EXIT_PASS if diff.ok else EXIT_FAIL


def cmd_contfrac(args, cfg: Config) -> int:
    from .contfrac import cf_expand, legendre_lower_bound
    cf = cf_expand(args.name, args.k, cfg.ctx)
    d = {"name": cf.name, "bits": cf.bits, "quotients": list(cf.quotients),
         "q": [str(q) for q in cf.q]}
    if args.legendre is not None:
        leg = legendre_lower_bound(args.name, args.legendre, cfg.ctx)
        d["legendre"] = {"M": leg.M, "N": leg.N, "a_M": leg.a_M, "argmax": leg.argmax}
    if cfg.format == "json":
        _emit(cfg, _json(d))
    else:
        out = [f"{cf.name} = [{cf.quotients[0]}; {', '.join(map(str, cf.quotients[1:]))}]"]
        out += [f"q_{k} = {q}" for k, q in enumerate(cf.q)]
        if "legendre" in d:
            g = d["legendre"]
            out.append(f"first q_N > M: N = {g['N']}; a_M = {g['a_M']} at index {g['argmax']}")
        _emit(cfg, "\n".join(out) + "\n")
    return EXIT_PASS


def cmd_first_bound(args, cfg: Config) -> int:
    from .linforms import derive_first_bounds
    rep = derive_first_bounds(cfg.ctx)
    if cfg.format == "json":
        _emit(cfg, _json(rep.to_dict()))
    else:
        out = [f"{e.verdict:11s} {e.name}: {e.statement}" for e in rep.audit]
        out.append(f"a < {rep.a_bound:.4e}  n < {rep.n_bound:.4e}")
        _emit(cfg, "\n".join(out) + "\n")
    return EXIT_PASS if rep.ok else EXIT_FAIL


def _outcome_dict(o) -> dict:
    return {"convergent_index": o.convergent_index, "q": str(o.q),
            "epsilon": None if o.epsilon is None else list(o.epsilon.decimal_bounds(30)),
            "w_bound": o.w_bound, "failure_reason": o.failure_reason, "tried": o.tried}


def cmd_reduce(args, cfg: Config) -> int:
    from .reduction import ReductionInstance, dp_reduce, real_expr
    try:
        inst = ReductionInstance(args.gamma, real_expr(args.mu), real_expr(args.A),
                                 real_expr(args.B), args.M)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from None
    o = dp_reduce(inst, cfg.ctx, retries=args.retries)
    if cfg.format == "json":
        _emit(cfg, _json(_outcome_dict(o)))
    elif o.ok:
        _emit(cfg, f"q_{o.convergent_index} = {o.q}\nepsilon = {o.epsilon}\n"
                   f"no solution with w >= {o.w_bound}\n")
    else:
        _emit(cfg, f"FAILED ({o.failure_reason}) after convergents {o.tried}\n")
    return EXIT_PASS if o.ok else EXIT_FAIL


def cmd_sweep(args, cfg: Config) -> int:
    from .reduction import stage2_sweep
    sw = stage2_sweep(args.gap_max, args.M, cfg.ctx, jobs=args.jobs)
    d = {"gap_max": sw.gap_max, "M": sw.M, "special_pairs": sw.special_pairs,
         "numeric_nonpositive": sw.numeric_nonpositive, "failures": sw.failures,
         "n_max": sw.n_max, "ok": sw.ok}
    if cfg.format == "json":
        d["pairs"] = {f"{t},{s}": (None if p.special else p.outcome.w_bound)
                      for (t, s), p in sw.pairs.items()}
        _emit(cfg, _json(d))
    else:
        _emit(cfg, f"special: {sw.special_pairs}\nfailures: {sw.failures}\n"
                   f"largest n from non-special pairs: {sw.n_max}\n")
    return EXIT_PASS if sw.ok else EXIT_FAIL


def cmd_prove(args, cfg: Config) -> int:
    from .reduction import ProofConfig, run_full_proof
    pc = ProofConfig(n_max=cfg.n_max, bits=cfg.bits, bits_max=cfg.bits_max,
                     expect_count=args.expect_count, tighten=args.tighten,
                     m_override=cfg.M_override, table=args.table, jobs=args.jobs)
    cert = run_full_proof(pc)
    if cfg.format == "json":
        _emit(cfg, cert.to_json())
    else:
        out = [f"{s['verdict']:5s} {s['name']}" + (f"  ({s['note']})" if s.get("note") else "")
               for s in cert.stages]
        out.append(cert.verdict)
        _emit(cfg, "\n".join(out) + "\n")
    return EXIT_PASS if cert.verdict == "PASS" else EXIT_FAIL


def cmd_check(args, cfg: Config) -> int:
    from .checker import main as check_main
    argv = [args.certificate] + (["--table", args.table] if args.table else [])
    return check_main(argv)


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    env_bits = os.environ.get(ENV_BITS)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=int, default=550)
    common.add_argument("--bits", type=int, default=int(env_bits) if env_bits else 256,
                        help=f"working precision (default 256, or ${ENV_BITS})")
    common.add_argument("--bits-max", type=int, default=65536)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--jobs", type=int, default=1)

    ap = argparse.ArgumentParser(prog="fib3pow2", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[common], help="enumerate all solutions up to --n-max")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("verify-table", parents=[common], help="compare a table file with the search")
    p.add_argument("--table", help="CSV with header n,m,l,a (default: the shipped table)")
    p.set_defaults(fn=cmd_verify_table)

    p = sub.add_parser("contfrac", parents=[common], help="continued fraction of a constant")
    p.add_argument("name", nargs="?", default="gamma")
    p.add_argument("-k", type=int, default=40, help="number of partial quotients")
    p.add_argument("--legendre", type=_big, metavar="M", help="also report Legendre data for M")
    p.set_defaults(fn=cmd_contfrac)

    p = sub.add_parser("first-bound", parents=[common], help="Matveev bounds on a and n")
    p.set_defaults(fn=cmd_first_bound)

    p = sub.add_parser("reduce", parents=[common], help="one Dujella-Petho reduction")
    p.add_argument("--gamma", default="log2/logAlpha")
    p.add_argument("--mu", default="mu", help="mu, mu_psi(t,s), or a rational")
    p.add_argument("--A", default="4sqrt5/logAlpha")
    p.add_argument("--B", default="alpha")
    p.add_argument("--M", type=_big, default=9 * 10**28)
    p.add_argument("--retries", type=int, default=10)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("sweep", parents=[common], help="reduce every gap pair")
    p.add_argument("--gap-max", type=int, default=157)
    p.add_argument("--M", type=_big, default=None, help="bound on a (default: from stage 1)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("prove", parents=[common], help="run the whole argument, emit a certificate")
    p.add_argument("--tighten", action="store_true", help="feed the certified first bound to stage 1")
    p.add_argument("--table", help="table file compared against the search")
    p.add_argument("--expect-count", type=int, default=214)
    p.add_argument("--m-override", type=_big, help="bound on a used by the sweep")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("check", help="re-validate a certificate independently")
    p.add_argument("certificate")
    p.add_argument("--table")
    p.set_defaults(fn=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS
    if args.command == "check":
        return cmd_check(args, None)
    try:
        cfg = Config(n_max=args.n_max, bits=args.bits, bits_max=args.bits_max,
                     M_override=getattr(args, "m_override", None), output=args.out,
                     format=args.format)
        if args.command == "sweep" and args.M is None:
            from .reduction import stage1_reduce
            args.M = stage1_reduce(ctx=cfg.ctx).a_bound_after
        return args.fn(args, cfg)
    except (UsageError, ValueError) as e:
        print(f"fib3pow2: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"fib3pow2: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (Undecidable, Ambiguous) as e:
        print(f"fib3pow2: precision exhausted: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
