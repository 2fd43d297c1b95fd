"""Command-line interface: every toolkit operation with machine-readable output.

Output formats: ``json`` (compact, deterministic), ``csv`` (tabular commands
only: hist, count-f), ``plain`` (human-readable lines).  Exit codes: 0 ok,
1 domain error, 2 cap or budget exhausted, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import analysis, bounds, counting, family
from .core import format_chain, read_chain_file
from .errors import (
    BudgetExhausted,
    CapExceeded,
    ChainError,
    DomainError,
    InvariantViolation,
    MTooSmall,
    OverflowRisk,
    PrecisionEscalation,
)
from .search import SearchConfig, ell, ell_oracle

USAGE_EXIT = 64
DOMAIN_EXIT = 1
CAP_EXIT = 2

_TABULAR = {"hist", "count-f"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(USAGE_EXIT)


def _parse_r(text: str, m: int) -> float:
    """Real r, either a decimal or ``c/logm:<c>`` meaning c*m/log m."""
    if text.startswith("c/logm:"):
        c = float(text.split(":", 1)[1])
        return c * m / math.log(m)
    return float(text)


def _global_flags(parser):
    parser.add_argument(
        "--format",
        choices=["json", "csv", "plain"],
        default=argparse.SUPPRESS,
        help="output format (default json)",
    )
    parser.add_argument(
        "--threads", type=int, default=argparse.SUPPRESS,
        help="parallelism bound for count-f (default 1)",
    )
    parser.add_argument(
        "--cache", default=argparse.SUPPRESS, help="ell cache file path"
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="addchain", description=__doc__)
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ell", parents=[], help="exact minimal chain length")
    p.add_argument("n", type=int)
    p.add_argument("--no-schonhage", action="store_true",
                   help="disable the popcount-based starting depth")
    p.add_argument("--no-gamma", action="store_true",
                   help="disable the golden-ratio growth budget")
    p.add_argument("--budget", type=int, default=None,
                   help="node budget (error 2 when exhausted)")
    p.add_argument("--stats", action="store_true",
                   help="include node and pruning statistics")
    _global_flags(p)

    p = sub.add_parser("oracle", help="minimally pruned ground-truth length")
    p.add_argument("n", type=int)
    _global_flags(p)

    p = sub.add_parser("bounds", help="classical bound report for n")
    p.add_argument("n", type=int)
    p.add_argument("--with-ell", action="store_true",
                   help="also compute the exact length")
    _global_flags(p)

    p = sub.add_parser("count-h", help="integers reachable within k steps")
    p.add_argument("k", type=int)
    p.add_argument("--list", action="store_true", dest="list_reachable")
    _global_flags(p)

    p = sub.add_parser("count-f", help="interval count of small minimal lengths")
    p.add_argument("m", type=int)
    p.add_argument("r", help="decimal or c/logm:<c> for r = c*m/log m")
    _global_flags(p)

    p = sub.add_parser("hist", help="minimal-length histogram over [2^m, 2^(m+1))")
    p.add_argument("m", type=int)
    _global_flags(p)

    p = sub.add_parser("classify", help="label chain steps A/B/C/D")
    p.add_argument("chainfile")
    p.add_argument("--m", type=int, required=True)
    _global_flags(p)

    p = sub.add_parser("blocks", help="additive block structure of chains")
    p.add_argument("chainfile")
    p.add_argument("--m", type=int, required=True)
    _global_flags(p)

    p = sub.add_parser("dominates", help="does chain A dominate chain B")
    p.add_argument("fileA")
    p.add_argument("fileB")
    _global_flags(p)

    p = sub.add_parser("marked", help="marked steps of chains")
    p.add_argument("chainfile")
    _global_flags(p)

    p = sub.add_parser("family", help="constructive chain family")
    fsub = p.add_subparsers(dest="family_command", required=True)
    for name in ("gen", "enum", "size"):
        fp = fsub.add_parser(name)
        fp.add_argument("--digits", type=int, required=True)
        fp.add_argument("--u", type=int, required=True)
        fp.add_argument("--k", type=int, required=True)
        fp.add_argument("--r", type=float, default=None, dest="budget_r")
        if name == "gen":
            fp.add_argument("--s", type=int, nargs="*", default=None)
            fp.add_argument("--U", type=int, nargs="+", required=True)
        _global_flags(fp)
    fp = fsub.add_parser("auto")
    fp.add_argument("--m", type=int, required=True)
    fp.add_argument("--c", type=float, required=True)
    _global_flags(fp)

    p = sub.add_parser("scholz", help="Scholz conjecture instance check")
    p.add_argument("n", type=int)
    _global_flags(p)

    p = sub.add_parser("envelope", help="asymptotic interval-count envelope")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--exact", action="store_true",
                   help="also compute the exact count (m <= 14 or warm cache)")
    _global_flags(p)

    return parser


# --- command handlers -------------------------------------------------------


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        use_schonhage_pruning=not getattr(args, "no_schonhage", False),
        use_gamma_pruning=not getattr(args, "no_gamma", False),
        node_budget=getattr(args, "budget", None),
    )


def _cmd_ell(args, _cache):
    res = ell(args.n, _search_config(args))
    out = {"n": res.n, "ell": res.ell, "witness": list(res.witness.values)}
    if args.stats:
        out["nodes_expanded"] = res.nodes_expanded
        out["prunings_applied"] = list(res.prunings_applied)
        out["exact"] = res.exact
    return out


def _cmd_oracle(args, _cache):
    return {"n": args.n, "ell": ell_oracle(args.n)}


def _cmd_bounds(args, _cache):
    actual = ell(args.n).ell if args.with_ell else None
    rep = bounds.bound_report(args.n, actual)
    return {
        "n": rep.n,
        "nu": rep.nu_n,
        "log2_n": rep.log2_n,
        "binary_ub": rep.binary_ub,
        "brauer_ub": rep.brauer_ub,
        "schonhage_lb": rep.schonhage_lb,
        "thurber_lb": rep.thurber_lb,
        "actual_ell": rep.actual_ell,
    }


def _cmd_count_h(args, _cache):
    res = counting.count_H(args.k, collect=args.list_reachable)
    out = {"k": res.k, "h": res.h}
    if args.list_reachable:
        out["reachable"] = list(res.reachable)
    return out


def _cmd_count_f(args, cache):
    r = _parse_r(args.r, args.m)
    res = counting.count_F(args.m, r, cache, threads=args.threads)
    return {"m": res.m, "r": res.r, "f": res.f}


def _cmd_hist(args, cache):
    hist = counting.ell_histogram(args.m, cache, threads=args.threads)
    return {"m": args.m, "histogram": {str(k): v for k, v in hist.items()}}


def _cmd_classify(args, _cache):
    out = []
    for chain in read_chain_file(args.chainfile):
        tax = analysis.classify_steps(chain, args.m)
        out.append(
            {
                "chain": format_chain(chain, annotate=False),
                "m": tax.m,
                "delta": tax.delta,
                "kinds": list(tax.kinds),
                "counts": {
                    "A": tax.doubling,
                    "B": tax.large,
                    "C": tax.midsize,
                    "D": tax.small,
                },
            }
        )
    return out


def _cmd_blocks(args, _cache):
    out = []
    for chain in read_chain_file(args.chainfile):
        bs = analysis.block_structure(chain, args.m)
        out.append(
            {
                "chain": format_chain(chain, annotate=False),
                "m": args.m,
                "blocks": [
                    {
                        "start": b.start,
                        "length": b.length,
                        "d_count": b.d_count,
                        "bc_count": b.bc_count,
                        "type": b.block_type,
                        "marked": b.marked,
                    }
                    for b in bs.blocks
                ],
                "num_blocks": bs.num_blocks,
                "num_type1": bs.num_type1,
                "num_type2": bs.num_type2,
            }
        )
    return out


def _cmd_dominates(args, _cache):
    a = read_chain_file(args.fileA)[0]
    b = read_chain_file(args.fileB)[0]
    verdict = analysis.dominates(a, b)
    return {
        "dominates": verdict.dominates,
        "first_strict_index": verdict.first_strict_index,
        "reason": verdict.reason,
    }


def _cmd_marked(args, _cache):
    return [
        {
            "chain": format_chain(chain, annotate=False),
            "marked": list(analysis.find_marked_steps(chain)),
        }
        for chain in read_chain_file(args.chainfile)
    ]


def _family_params(args) -> family.FamilyParams:
    return family.FamilyParams(
        digits=args.digits, u=args.u, k=args.k, budget_r=args.budget_r
    )


def _cmd_family(args, _cache):
    if args.family_command == "auto":
        params = family.choose_params(args.m, args.c)
        return {
            "m": args.m,
            "c": args.c,
            "params": {
                "digits": params.digits,
                "u": params.u,
                "k": params.k,
                "budget_r": params.budget_r,
            },
            "violations": list(params.violations()),
        }
    params = _family_params(args)
    if args.family_command == "size":
        size = family.family_size(params)
        return {
            "digits": params.digits,
            "u": params.u,
            "k": params.k,
            "total": size.total,
            "window_choices": size.window_choices,
            "gap_solutions": size.gap_solutions,
            "gap_solutions_alt": size.gap_solutions_alt,
        }
    if args.family_command == "gen":
        gaps = args.s if args.s is not None else []
        inst = family.generate_chain(params, gaps, args.U)
        return inst.to_dict()
    instances = [inst.to_dict() for inst in family.enumerate_family(params)]
    return {
        "digits": params.digits,
        "u": params.u,
        "k": params.k,
        "count": len(instances),
        "instances": instances,
    }


def _cmd_scholz(args, _cache):
    rep = bounds.scholz_check(args.n)
    return {"n": rep.n, "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds}


def _cmd_envelope(args, cache):
    env = bounds.envelope(args.m, args.c, args.eps)
    out = {
        "m": env.m,
        "c": env.c,
        "epsilon": env.epsilon,
        "log_upper": env.log_upper,
        "log_lower": env.log_lower,
    }
    if args.exact:
        r = args.c * args.m / math.log(args.m)
        res = counting.count_F(args.m, r, cache, threads=args.threads)
        out["exact_f"] = res.f
        out["exact_log_f"] = math.log(res.f)
    return out


_HANDLERS = {
    "ell": _cmd_ell,
    "oracle": _cmd_oracle,
    "bounds": _cmd_bounds,
    "count-h": _cmd_count_h,
    "count-f": _cmd_count_f,
    "hist": _cmd_hist,
    "classify": _cmd_classify,
    "blocks": _cmd_blocks,
    "dominates": _cmd_dominates,
    "marked": _cmd_marked,
    "family": _cmd_family,
    "scholz": _cmd_scholz,
    "envelope": _cmd_envelope,
}


# --- output -----------------------------------------------------------------


def _emit_json(payload, stream):
    stream.write(json.dumps(payload, separators=(",", ":")) + "\n")


def _emit_csv(command, payload, stream):
    if command == "hist":
        stream.write("ell,count\n")
        for k, v in payload["histogram"].items():
            stream.write(f"{k},{v}\n")
    elif command == "count-f":
        stream.write("m,r,f\n")
        stream.write(f"{payload['m']},{payload['r']},{payload['f']}\n")


def _emit_plain(payload, stream, indent=""):
    if isinstance(payload, list):
        for i, item in enumerate(payload):
            stream.write(f"{indent}[{i}]\n")
            _emit_plain(item, stream, indent + "  ")
        return
    if isinstance(payload, dict):
        for k, v in payload.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                stream.write(f"{indent}{k}:\n")
                _emit_plain(v, stream, indent + "  ")
            else:
                stream.write(f"{indent}{k}: {_plain_scalar(v)}\n")
        return
    stream.write(f"{indent}{_plain_scalar(payload)}\n")


def _is_flat(v):
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    if isinstance(v, dict):
        return all(not isinstance(x, (dict, list)) for x in v.values())
    return True


def _plain_scalar(v):
    if isinstance(v, list):
        return "[" + ",".join(str(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={x}" for k, x in v.items()) + "}"
    return str(v)


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "json")
    args.threads = getattr(args, "threads", 1)
    cache_path = getattr(args, "cache", None)

    if fmt == "csv" and args.command not in _TABULAR:
        stderr.write(
            f"error: --format csv is only available for: "
            f"{', '.join(sorted(_TABULAR))}\n"
        )
        return USAGE_EXIT

    try:
        cache = counting.EllCache(cache_path) if cache_path else None
        payload = _HANDLERS[args.command](args, cache)
    except BudgetExhausted as exc:
        stderr.write(f"error: {exc}\n")
        if exc.best is not None:
            stderr.write(
                f"best known: ell({exc.best.n}) <= {exc.best.ell} "
                f"(inexact; proven >= {exc.proven_lower})\n"
            )
        return CAP_EXIT
    except CapExceeded as exc:
        stderr.write(f"error: {exc}\n")
        return CAP_EXIT
    except (
        DomainError,
        ChainError,
        InvariantViolation,
        OverflowRisk,
        MTooSmall,
        PrecisionEscalation,
        ValueError,
        OSError,
    ) as exc:
        stderr.write(f"error: {exc}\n")
        return DOMAIN_EXIT

    if fmt == "json":
        _emit_json(payload, stdout)
    elif fmt == "csv":
        _emit_csv(args.command, payload, stdout)
    else:
        _emit_plain(payload, stdout)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
