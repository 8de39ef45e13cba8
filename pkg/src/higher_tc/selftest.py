"""Acceptance suite: one function per criterion, each returning (passed, detail).

Details hold only exact data, so the suite digest is independent of timing
and of how criteria are scheduled across workers.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations

from .binary import m_defect, maximality_threshold
from .bounds import ManifoldSpec, davis_zcl, report_bounds
from .chains import verify_chain_map
from .cyclic import (GroupSpec, PLAIN, complex_c, complex_c_tilde, complex_free_z,
                     diagonal_map, diagonal_terms, group_complex, inversion_map, parse_group,
                     pontryagin_map, structure_map)
from .nonorientable import (DComplexSpec, aggregate_obstruction, d_complex,
                            is_odd_label, parity_certificate_brute,
                            parity_certificate_dp, rewrite_even_to_odd)
from .orientable import (FundamentalClassSpec, decide_orientable, default_class,
                         free_times_cyclic_vanishing, obstruction_chain, parse_class,
                         power_complex)
from .smith import homology, is_boundary
from .zcl import (TensorPower, exhaustive_zcl_tiny, projective_ring, search_zcl_lower,
                  validate_witness, default_pool)

# seconds; the acceptance limits
TIME_LIMITS = {0: 60, 1: 60, 2: 120, 3: 60, 4: 1, 5: 600, 6: 300, 7: 60, 8: 10, 9: 900}


def _alpha_oracle(q: int) -> int:
    # pairs 0 <= i < j < q: the N-type sum in the equivariant diagonal, augmented
    return sum(1 for _ in combinations(range(q), 2))


def check_structure(quick: bool = False) -> tuple:
    """Structure constants against an independent table, then the chain-map law."""
    bad = [q for q in range(2, 8)
           if any(c != (_alpha_oracle(q) if k % 2 and l % 2 else 1)
                  for p in range(9) for (k, l), c in diagonal_terms(q, p).items())]
    if bad:
        return False, {"alpha_mismatch": bad}
    deg = 8 if quick else 11
    maps = 0
    for q in (2, 3, 4, 5, 6):
        for f in (diagonal_map(q, PLAIN, deg + 1), pontryagin_map(q, PLAIN, deg + 1),
                  inversion_map(q, deg + 1)):
            if not verify_chain_map(f, deg):
                return False, {"failed_map": f.name}
            maps += 1
    for v in ("twist_left", "twist_right"):
        if not verify_chain_map(diagonal_map(2, v, deg + 1), deg):
            return False, {"failed_map": f"diagonal {v}"}
        maps += 1
    for gs in ("Z_3 x Z_3", "Z x Z_2", "Z_2 x Z_4"):
        for kind in ("delta", "wedge", "j", "chi"):
            f = structure_map(parse_group(gs), kind, 7 if quick else 9)
            if not verify_chain_map(f, 6 if quick else 8):
                return False, {"failed_map": f"{gs} {kind}"}
            maps += 1
    return True, {"alpha": [diagonal_terms(q, 2)[(1, 1)] for q in range(2, 8)],
                  "chain_maps_checked": maps}


def criterion_1(quick: bool = False) -> tuple:
    bad, count = [], 0
    for q in (2, 3, 4, 5, 6):
        g = GroupSpec((q,))
        for n in (3, 5, 7, 9):
            for s in (2, 3, 4, 5):
                for lam in (1, 2):
                    z = obstruction_chain(FundamentalClassSpec(g, n, default_class(g, n, lam)), s)
                    count += 1
                    if z:
                        bad.append([q, n, s, lam])
    return not bad, {"cases": count, "nonzero": bad}


def criterion_2(quick: bool = False) -> tuple:
    f = parse_class("Z_3 x Z_3", 5, "[0,5]+[5,0]")
    z = obstruction_chain(f, 3)
    comp = {lab: v % 3 for lab, v in z.items() if lab[:2] == (5, 1) and v % 3}
    sign = None
    if set(comp) == {(5, 1, 5, 4)}:
        sign = 1 if comp[(5, 1, 5, 4)] == 1 else -1
    v = decide_orientable(f, 3)
    ok = sign is not None and v.status == "nonzero-class" and v.conclusion == "TC_s = sn" \
        and v.s * v.n == 15
    return ok, {"component_5_1": {str(list(k)): c for k, c in sorted(comp.items())},
                "sign_mod_3": sign, "status": v.status, "conclusion": v.conclusion,
                "certified_mod": v.modulus, "obstruction_terms": len(z)}


def criterion_3(quick: bool = False) -> tuple:
    bad, checked = [], 0
    for r in range(1, 5):
        for s in range(2, 5):
            for n in range(1, 5):
                if s * n <= (s - 1) * r:
                    continue
                h = homology(power_complex(GroupSpec((0,) * r), s - 1, s * n + 1), s * n)
                checked += 1
                if h.free_rank:
                    bad.append([r, s, n])
    mixed = {}
    for q in (2, 3):
        for s in (2, 3):
            res = free_times_cyclic_vanishing(1, q, 3, s)
            mixed[f"q={q},s={s}"] = sorted(res)
            if not all(res.values()):
                bad.append(["mixed", q, s])
    return not bad, {"free_cases": checked, "failures": bad, "mixed_classes": mixed}


def criterion_4(quick: bool = False) -> tuple:
    got = {
        "m_defect_6": [m_defect(6, s) for s in range(3, 11)],
        "threshold": {n: maximality_threshold(n) for n in (2, 4, 6, 8, 10, 14)},
        "davis_6_6": davis_zcl(6, 6), "davis_2_3": davis_zcl(2, 3),
        "davis_5": [davis_zcl(5, s) for s in range(3, 13)],
    }
    ok = (got["m_defect_6"] == [max(0, 7 - s) for s in range(3, 11)]
          and got["threshold"] == {2: 3, 4: 3, 6: 7, 8: 3, 10: 3, 14: 15}
          and got["davis_6_6"] == 35 and got["davis_2_3"] == 6
          and got["davis_5"] == [5 * s - 1 for s in range(3, 13)])
    got["threshold"] = {str(k): v for k, v in got["threshold"].items()}
    return ok, got


def criterion_5(quick: bool = False) -> tuple:
    tiny = exhaustive_zcl_tiny(TensorPower(projective_ring(2), 3)).length
    rows, ok = [], tiny == 6
    grid = [(n, s) for n in (2, 4, 6) for s in (3, 4)]
    if quick:
        grid = [(n, s) for n, s in grid if n * s <= 18]
    for n, s in grid:
        tp = TensorPower(projective_ring(n), s)
        pool = default_pool(tp)
        res = search_zcl_lower(tp, pool)
        valid = validate_witness(tp, pool, res.witness)
        dz = davis_zcl(n, s)
        ok = ok and valid and res.length <= dz and len(res.witness) == res.length
        rows.append({"n": n, "s": s, "search": res.length, "davis": dz, "witness_valid": valid})
    return ok, {"exhaustive_P2_s3": tiny, "grid": rows}


def criterion_6(quick: bool = False) -> tuple:
    dp_fail = []
    rmax = 4 if quick else 6
    for r in range(1, rmax + 1):
        n = (1 << (r + 1)) - 2
        for s in range(2, n + 1, 2):
            if not parity_certificate_dp(DComplexSpec(n, s)):
                dp_fail.append([r, s])
    brute_cases = [(1, 2), (1, 4), (1, 6), (2, 2), (2, 4), (2, 6), (3, 2), (3, 4)]
    disagree = [[r, s] for r, s in brute_cases
                if parity_certificate_brute(DComplexSpec.from_r(r, s))
                != parity_certificate_dp(DComplexSpec.from_r(r, s))]
    oracle = []
    for r, s in ((1, 2), (2, 2), (2, 4)):
        spec = DComplexSpec.from_r(r, s)
        agg = aggregate_obstruction(spec)
        d = d_complex(spec, agg.degree + 1)
        x = is_boundary(d, agg)
        exact = x is not None and d.boundary(x) == agg
        c2, w = rewrite_even_to_odd(spec, agg, d)
        rewrite_ok = all(is_odd_label(lab) for lab, _ in c2.items()) \
            and d.boundary(w) == agg - c2
        oracle.append({"r": r, "s": s, "aggregate_terms": len(agg), "boundary": exact,
                       "rewrite_odd_terms": len(c2), "rewrite_verified": rewrite_ok})
    ok = not dp_fail and not disagree and all(o["boundary"] and o["rewrite_verified"]
                                              for o in oracle)
    return ok, {"dp_failures": dp_fail, "dp_r_max": rmax, "brute_disagreements": disagree,
                "oracle": oracle}


def criterion_7(quick: bool = False) -> tuple:
    fails = []
    for q in (2, 3, 4, 5, 6):
        c = complex_c(q, 11)
        for k in range(11):
            h = homology(c, k)
            want = (1, ()) if k == 0 else ((0, (q,)) if k % 2 else (0, ()))
            if (h.free_rank, h.torsion) != want:
                fails.append(["Z_q", q, k, str(h)])
    ct = complex_c_tilde(13)
    for k in range(13):
        h = homology(ct, k)
        if (h.free_rank, h.torsion) != ((0, (2,)) if k % 2 == 0 else (0, ())):
            fails.append(["C~", k, str(h)])
    g33 = group_complex(GroupSpec((3, 3)), 9)
    dims = [homology(g33, k, modulus=3).dimension for k in range(9)]
    if dims != [k + 1 for k in range(9)]:
        fails.append(["F3", dims])
    complexes = [complex_c(q, 12) for q in range(2, 7)] + [complex_c_tilde(12), complex_free_z(6)]
    for gs in ("Z_3 x Z_3", "Z x Z_2", "Z^2 x Z_4", "Z^3"):
        complexes.append(group_complex(parse_group(gs), 9))
    complexes.append(power_complex(GroupSpec((3,)), 2, 10))
    for r, s in ((1, 2), (2, 4)):
        complexes.append(d_complex(DComplexSpec.from_r(r, s)))
    dd = 0
    for c in complexes:
        if not c.check_d_squared():
            fails.append(["dd", c.name])
        dd += 1
    return not fails, {"failures": fails, "F3_dims": dims, "d_squared_complexes": dd}


def _report_rows(group: str, dim: int, s_values, orientable: bool = True) -> list:
    rep = report_bounds(ManifoldSpec(parse_group(group), dim, orientable), s_values)
    return [r.as_dict() for r in rep.rows]


def criterion_8(quick: bool = False) -> tuple:
    out, ok = {}, True
    a = _report_rows("Z_2", 5, range(3, 10))
    out["a"] = [[r["s"], r["lower"], r["upper"]] for r in a]
    ok &= all(r["exact"] and r["value"] == 5 * r["s"] - 1 and len(r["citations"]) == 2 for r in a)
    b = _report_rows("Z_2", 6, [4, 6, 7, 8, 9, 10], orientable=False)
    out["b"] = [[r["s"], r["lower"], r["upper"]] for r in b]
    by_s = {r["s"]: r for r in b}
    ok &= by_s[4]["upper"] <= 23 and "twisted-parity-certificate" in by_s[4]["citations"]
    ok &= by_s[6]["exact"] and by_s[6]["value"] == 35
    ok &= all(by_s[s]["exact"] and by_s[s]["value"] == 6 * s for s in (7, 8, 9, 10))
    c_rows = {}
    for p, k in ((3, 1), (5, 2), (3, 3), (7, 1)):
        dim = 2 * k + 1
        rows = _report_rows(f"Z_{p}", dim, range(2, 7))
        c_rows[f"p={p},dim={dim}"] = [[r["s"], r["lower"], r["upper"]] for r in rows]
        ok &= all(r["exact"] and r["value"] == r["s"] * dim - 1
                  and "lens-weighted-bound" in r["citations"] for r in rows)
    out["c"] = c_rows
    return bool(ok), out


CRITERIA = {0: check_structure, 1: criterion_1, 2: criterion_2, 3: criterion_3,
            4: criterion_4, 5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def _run_one(args: tuple) -> dict:
    key, quick = args
    t0 = time.perf_counter()
    try:
        passed, detail = CRITERIA[key](quick)
    except Exception as e:              # a crash is a failure with its message recorded
        passed, detail = False, {"exception": f"{type(e).__name__}: {e}"}
    ms = int((time.perf_counter() - t0) * 1000)
    return {"criterion": key, "passed": bool(passed), "detail": detail, "wall_time_ms": ms}


def suite_digest(results: list) -> str:
    body = [{k: r[k] for k in ("criterion", "passed", "detail")} for r in results]
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":"))
                          .encode()).hexdigest()


def run_criteria(keys, workers: int = 1, quick: bool = False) -> list:
    jobs = [(k, quick) for k in keys]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def criterion_9(quick: bool = False) -> tuple:
    """Suite digests at 1, 2 and 8 workers must agree."""
    keys = sorted(CRITERIA)
    digests = {w: suite_digest(run_criteria(keys, w, quick=quick)) for w in (1, 2, 8)}
    return len(set(digests.values())) == 1, {"digests": {str(w): d for w, d in digests.items()}}


def run_selftest(workers: int = 1, quick: bool = False) -> dict:
    """Structure check first, then criteria 1-8 (possibly in parallel), then determinism."""
    results = run_criteria(sorted(CRITERIA), workers, quick)
    results.append(_run_one_9(quick))
    for r in results:
        lim = TIME_LIMITS.get(r["criterion"])
        r["time_limit_s"] = lim
        r["within_time"] = lim is None or r["wall_time_ms"] <= lim * 1000
    first_fail = next((r["criterion"] for r in results if not r["passed"]), None)
    table = [{"criterion": r["criterion"], "passed": r["passed"], "wall_time_ms": r["wall_time_ms"],
              "time_limit_s": r["time_limit_s"], "within_time": r["within_time"],
              "detail": r["detail"]} for r in results]
    return {"passed": first_fail is None and all(r["within_time"] for r in results),
            "first_failure": first_fail, "quick": quick,
            "suite_digest": suite_digest(results[:-1]), "criteria": table}


def _run_one_9(quick: bool) -> dict:
    t0 = time.perf_counter()
    try:
        passed, detail = criterion_9(quick)
    except Exception as e:
        passed, detail = False, {"exception": f"{type(e).__name__}: {e}"}
    return {"criterion": 9, "passed": passed, "detail": detail,
            "wall_time_ms": int((time.perf_counter() - t0) * 1000)}
