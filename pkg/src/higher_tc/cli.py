"""Command-line interface: decide, nonorient, zcl, report, selftest.

Exit codes: 0 verdict computed, 2 method inapplicable, 1 usage or internal error.
Output is a result envelope whose digest hashes everything except the wall time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shlex
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .bounds import CITATIONS, ManifoldSpec, davis_zcl, report_bounds
from .chains import ChainError
from .cyclic import GroupSpecError, parse_group
from .nonorientable import (DEFAULT_BUDGET, BudgetExceeded, DComplexSpec,
                            InapplicableError, decide_nonorientable)
from .orientable import decide_orientable, parse_class
from .zcl import (RingError, TensorPower, exhaustive_zcl_tiny, full_kernel_pool,
                  lens_ring, projective_ring, search_zcl_lower, validate_witness,
                  default_pool)

TOOL = "higher-tc"
EXIT_OK, EXIT_ERROR, EXIT_INAPPLICABLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _untimed(obj):
    if isinstance(obj, dict):
        return {k: _untimed(v) for k, v in obj.items() if k != "wall_time_ms"}
    if isinstance(obj, list):
        return [_untimed(v) for v in obj]
    return obj


def digest(obj) -> str:
    """sha256 of the canonical payload with every wall-time field removed."""
    return hashlib.sha256(canonical_json(_untimed(obj)).encode()).hexdigest()


def envelope(inputs: dict, verdict: dict, citations, wall_ms: int) -> dict:
    body = {"tool": TOOL, "version": __version__, "input": inputs, "verdict": verdict,
            "citations": sorted(set(citations))}
    return dict(body, wall_time_ms=wall_ms, digest=digest(body))


def parse_s_values(text: str) -> list:
    """'4', '2-6' or '3,5,7'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 2:
        raise UsageError(f"--s needs values >= 2, got {text!r}")
    return out


def build_parser() -> _Parser:
    p = _Parser(prog=TOOL, description="Obstruction and bound calculator for higher TC.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    p.add_argument("--jobs", metavar="FILE", help="batch file, one job per line ('#' comments)")
    p.add_argument("--parallel", type=int, default=1, help="worker processes for --jobs / selftest")
    p.add_argument("--format", choices=("json", "tsv", "text"), default="json")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--format", choices=("json", "tsv", "text"), default=argparse.SUPPRESS)

    d = sub.add_parser("decide", help="orientable obstruction for an abelian fundamental group")
    d.add_argument("--group", required=True)
    d.add_argument("--dim", type=int, required=True)
    d.add_argument("--s", required=True)
    d.add_argument("--class", dest="klass", help="fundamental class chain, e.g. '[0,5]+[5,0]'")
    common(d)

    n = sub.add_parser("nonorient", help="non-orientable Z_2 obstruction for even s")
    g = n.add_mutually_exclusive_group(required=True)
    g.add_argument("--r", type=int, help="use n = 2^(r+1) - 2")
    g.add_argument("--dim", type=int, help="any even n (outside n = 2^(r+1)-2 results are raw)")
    n.add_argument("--s", type=int, required=True)
    n.add_argument("--oracle", action="store_true", help="also solve the boundary equation over Z")
    n.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common(n)

    z = sub.add_parser("zcl", help="zero-divisor cup length search")
    z.add_argument("--space", choices=("projective", "lens"), default="projective")
    z.add_argument("--dim", type=int, required=True, help="n of P^n, or n of L^(2n+1)")
    z.add_argument("--prime", type=int, default=3, help="prime for lens spaces")
    z.add_argument("--s", type=int, required=True)
    z.add_argument("--pool", choices=("default", "kernel"), default="default")
    z.add_argument("--exhaustive", action="store_true", help="exact search (total dimension <= 100)")
    common(z)

    r = sub.add_parser("report", help="per-s bound table")
    r.add_argument("--group", required=True)
    r.add_argument("--dim", type=int, required=True)
    r.add_argument("--s", required=True)
    o = r.add_mutually_exclusive_group()
    o.add_argument("--orientable", dest="orientable", action="store_true", default=True)
    o.add_argument("--non-orientable", dest="orientable", action="store_false")
    r.add_argument("--no-cat-max", dest="cat_max", action="store_false",
                   help="do not assume cat = dim")
    r.add_argument("--class", dest="klass")
    r.add_argument("--divisor", choices=("p", "s"), default="p",
                   help="divisor in the lens admissibility condition")
    common(r)

    st = sub.add_parser("selftest", help="run the acceptance criteria")
    st.add_argument("--quick", action="store_true")
    st.add_argument("--parallel", type=int, default=argparse.SUPPRESS)
    common(st)
    return p


# -- subcommands --------------------------------------------------------------------

def cmd_decide(a) -> tuple:
    g = parse_group(a.group)
    f = parse_class(g, a.dim, a.klass)
    rows, cites = [], []
    for s in parse_s_values(a.s):
        v = decide_orientable(f, s)
        rows.append(v.as_dict())
        cites += v.citations
    inputs = {"command": "decide", "group": g.name, "dim": a.dim, "s": parse_s_values(a.s),
              "class": str(f.chain)}
    return inputs, {"results": rows}, cites, EXIT_OK


def cmd_nonorient(a) -> tuple:
    spec = DComplexSpec.from_r(a.r, a.s) if a.r is not None else DComplexSpec(a.dim, a.s)
    v = decide_nonorientable(spec, oracle=a.oracle, budget=a.budget)
    inputs = {"command": "nonorient", "n": spec.n, "s": spec.s, "oracle": a.oracle}
    return inputs, v.as_dict(), list(v.citations), EXIT_OK


def cmd_zcl(a) -> tuple:
    ring = projective_ring(a.dim) if a.space == "projective" else lens_ring(a.dim, a.prime)
    tp = TensorPower(ring, a.s)
    if a.exhaustive:
        res = exhaustive_zcl_tiny(tp)
        pool = full_kernel_pool(tp)
    else:
        pool = default_pool(tp) if a.pool == "default" else full_kernel_pool(tp)
        res = search_zcl_lower(tp, pool)
    out = res.as_dict()
    out["ring"] = ring.name
    out["witness_factors"] = [tp.format(pool[i]) for i in res.witness]
    out["witness_valid"] = validate_witness(tp, pool, res.witness)
    cites = ["zcl-search"]
    if a.space == "projective" and a.s >= 3:
        dz = davis_zcl(a.dim, a.s)
        out["closed_form"] = dz
        out["pool_limited"] = res.length < dz
    inputs = {"command": "zcl", "space": a.space, "dim": a.dim, "s": a.s, "pool": a.pool,
              "exhaustive": a.exhaustive}
    if a.space == "lens":
        inputs["prime"] = a.prime
    return inputs, out, cites, EXIT_OK


def cmd_report(a) -> tuple:
    m = ManifoldSpec(parse_group(a.group), a.dim, a.orientable, a.cat_max, a.klass)
    rep = report_bounds(m, parse_s_values(a.s), a.divisor)
    d = rep.as_dict()
    inputs = {"command": "report", "divisor": a.divisor, "s": parse_s_values(a.s),
              **m.as_dict()}
    return inputs, d, list(d["citations"]), EXIT_OK, rep


def cmd_selftest(a) -> tuple:
    from .selftest import run_selftest
    workers = getattr(a, "parallel", 1)
    res = run_selftest(workers=workers, quick=a.quick)
    code = EXIT_OK if res["passed"] else EXIT_ERROR
    inputs = {"command": "selftest", "quick": a.quick}
    return inputs, res, [], code


COMMANDS = {"decide": cmd_decide, "nonorient": cmd_nonorient, "zcl": cmd_zcl,
            "report": cmd_report, "selftest": cmd_selftest}


def _render(env: dict, fmt: str, extra=None) -> str:
    if fmt == "json":
        return json.dumps(env, sort_keys=True, indent=2) + "\n"
    if env["input"].get("command") == "selftest":
        v = env["verdict"]
        sep = "\t" if fmt == "tsv" else "  "
        lines = [sep.join(("criterion", "result", "ms", "limit_s"))]
        for r in v["criteria"]:
            res = "pass" if r["passed"] and r["within_time"] else "FAIL"
            lines.append(sep.join(str(x) for x in (r["criterion"], res, r["wall_time_ms"],
                                                   r.get("time_limit_s", "-"))))
        lines.append(f"suite_digest{sep}{v['suite_digest']}")
        return "\n".join(lines) + "\n"
    if fmt == "tsv":
        if extra is not None and hasattr(extra, "tsv"):
            return extra.tsv()
        return "".join(f"{k}\t{canonical_json(v) if isinstance(v, (dict, list)) else v}\n"
                       for k, v in sorted(_flatten(env["verdict"]).items()))
    lines = [f"{TOOL} {env['version']}  {env['input'].get('command', '')}"]
    for k, v in sorted(_flatten(env["verdict"]).items()):
        lines.append(f"  {k}: {v}")
    if env["citations"]:
        lines.append("  citations:")
        lines += [f"    {c}: {CITATIONS.get(c, '')}" for c in env["citations"]]
    lines.append(f"  digest: {env['digest']}")
    return "\n".join(lines) + "\n"


def _flatten(d, prefix="") -> dict:
    out = {}
    if isinstance(d, dict):
        for k, v in d.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(d, list) and d and all(isinstance(x, dict) for x in d):
        for i, v in enumerate(d):
            out.update(_flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = d
    return out


def execute(argv: list) -> tuple:
    """Run one job; returns (exit code, envelope or error dict, renderer extra)."""
    t0 = time.perf_counter()
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if a.command is None:
            raise UsageError("a subcommand is required")
        res = COMMANDS[a.command](a)
        inputs, verdict, cites, code = res[:4]
        extra = res[4] if len(res) > 4 else None
        ms = int((time.perf_counter() - t0) * 1000)
        return code, envelope(inputs, verdict, cites, ms), extra, a.format
    except InapplicableError as e:
        return EXIT_INAPPLICABLE, _error("inapplicable", str(e), argv), None, "json"
    except (UsageError, GroupSpecError, ChainError, RingError, BudgetExceeded, ValueError) as e:
        return EXIT_ERROR, _error("error", str(e), argv), None, "json"


def _error(kind: str, message: str, argv) -> dict:
    body = {"tool": TOOL, "version": __version__, "input": {"argv": list(argv)},
            "verdict": {"status": kind, "message": message}, "citations": []}
    return dict(body, wall_time_ms=0, digest=digest(body))


def _run_job(line: str) -> tuple:
    code, env, _, _ = execute(shlex.split(line))
    return code, env


def run_batch(path: str, workers: int) -> tuple:
    jobs = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                jobs.append(line)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_job, jobs))       # map keeps input order
    else:
        results = [_run_job(j) for j in jobs]
    codes = [c for c, _ in results]
    code = EXIT_ERROR if EXIT_ERROR in codes else (EXIT_INAPPLICABLE if EXIT_INAPPLICABLE in codes
                                                   else EXIT_OK)
    return code, [env for _, env in results]


def run(argv: list | None = None, out=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    if "--jobs" in argv:
        try:
            a, rest = build_parser().parse_known_args(argv)
        except UsageError as e:
            out.write(json.dumps(_error("error", str(e), argv), sort_keys=True) + "\n")
            return EXIT_ERROR
        if a.command is not None or rest:
            out.write(json.dumps(_error("error", "--jobs cannot be combined with a subcommand",
                                        argv), sort_keys=True) + "\n")
            return EXIT_ERROR
        try:
            code, envs = run_batch(a.jobs, a.parallel)
        except OSError as e:
            out.write(json.dumps(_error("error", str(e), argv), sort_keys=True) + "\n")
            return EXIT_ERROR
        for env in envs:
            out.write(canonical_json(env) + "\n")
        return code
    code, env, extra, fmt = execute(argv)
    out.write(_render(env, fmt, extra))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
