"""Command-line interface: q-expansions, lattice queries, tables, verification.

Exit codes: 0 success, 1 a verification suite found a failure, 2 usage or
resource errors (unknown form, insufficient order, budget exceeded).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .catalog import (
    REGISTRY,
    CatalogError,
    build,
    dimension_bound_table,
    holomorphic_subspace,
    pullback_max_table,
    rank_series,
    solve_cascade,
    verify_free_module,
    _D,
    _E,
    _mf,
)
from .e8 import (
    BUDGET_ENV,
    BudgetError,
    DominantWeight,
    max_coset_min_norm,
    shell,
)
from .invring import sigma_label
from .jacobi import (
    check_quasi_periodicity,
    classify,
    jf_mul,
    jf_scale,
    theta_e8,
    weight0_identity,
)
from .qseries import format_rational, sigma_pow

__all__ = ["main"]


def _emit_json(payload) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(", ", ": ")))


def _frac_str(x: Fraction) -> str:
    return format_rational(x)


# ---------------------------------------------------------------------------
# commands


def _cmd_expand(args) -> int:
    order = args.order if args.order is not None else None
    form = build(args.form, order)
    if args.format == "json":
        _emit_json(
            {
                "name": args.form,
                "form": form.to_json(),
                "display": {
                    str(n): form.term(n).display_str()
                    for n in range(form.order + 1)
                },
            }
        )
    else:
        for n in range(form.order + 1):
            print(f"q^{n}: {form.term(n).display_str()}")
    return 0


def _cmd_orbits(args) -> int:
    two_n = args.norm
    reps = shell(two_n)
    rows = [
        {"fw": list(m.fw), "size": size, "label": sigma_label(m)}
        for m, size in reps
    ]
    total = sum(r["size"] for r in rows)
    if args.format == "json":
        _emit_json({"norm": two_n, "orbits": rows, "total": total})
    else:
        for r in rows:
            print(f"{r['label']}: fw={tuple(r['fw'])} size={r['size']}")
        print(f"total {total}")
    return 0


def _cmd_coset_minima(args) -> int:
    value = max_coset_min_norm(args.t)
    if args.format == "json":
        _emit_json({"t": args.t, "max_min_norm": value})
    else:
        print(value)
    return 0


def _cmd_rank(args) -> int:
    r = rank_series(args.max)[1:]
    if args.format == "json":
        _emit_json({"max": args.max, "ranks": r})
    else:
        print(" ".join(str(x) for x in r))
    return 0


def _cmd_bounds(args) -> int:
    table = dimension_bound_table(args.max)
    if args.format == "json":
        _emit_json(
            {
                "max": args.max,
                "rows": [
                    {"weight": k, "bound": b, "note": note}
                    for k, b, note in table
                ],
            }
        )
    else:
        for k, b, note in table:
            line = f"{k}: {b}"
            if note:
                line += f"  ({note})"
            print(line)
    return 0


def _cmd_pullback_max(args) -> int:
    table = pullback_max_table()
    if args.format == "json":
        _emit_json({"rows": [{"label": lab, "max": v} for lab, v in table]})
    else:
        for lab, v in table:
            print(f"{lab}: {v}")
    return 0


def _cmd_solve_cascade(args) -> int:
    norms = [int(x) for x in args.norms.split(",")]
    sys_ = solve_cascade(args.t, args.w0, norms)
    if args.format == "json":
        _emit_json(
            {
                "t": sys_.index,
                "w0": sys_.start_weight,
                "norms": list(sys_.norms),
                "matrix": [
                    [_frac_str(x) for x in row] for row in sys_.matrix
                ],
                "nullspace": [list(v) for v in sys_.nullspace],
            }
        )
    else:
        if not sys_.nullspace:
            print("nullspace: trivial")
        for v in sys_.nullspace:
            print("nullspace:", " ".join(str(x) for x in v))
    return 0


# ---------------------------------------------------------------------------
# verification suites: each returns a list of (check name, ok, detail)

_C = Fraction


def _check_displays(suite, expectations) -> list[tuple[str, bool, str]]:
    out = []
    for name, n, expected in expectations:
        form = build(name)
        got = form.term(n).display_map()
        want = {lab: _C(c) for lab, c in expected.items()}
        ok = got == want
        detail = "" if ok else f"got {form.term(n).display_str()!r}"
        out.append((f"{suite}: {name} q^{n}", ok, detail))
    return out


_INDEX2_DISPLAYS = [
    ("phi_-4_2", 0, {"Σ_2": 2, "Σ_4": -1, None: -240}),
    ("phi_-2_2", 0, {"Σ_2": 1, "Σ_4": 1, None: -480}),
    ("phi_0_2", 0, {"Σ_2": 1, None: 120}),
    ("x2", 0, {None: 1}),
    ("x2", 1, {"Σ_4": 1}),
    ("b2", 0, {None: 1}),
    ("b2", 1, {"Σ_2": _C(-8, 5), "Σ_4": _C(-3, 5), None: 24}),
    ("b2", 2, {"Σ_{8''}": 1, "Σ_{8'}": _C(-24, 5), "Σ_6": _C(-224, 5),
               "Σ_4": _C(-72, 5), "Σ_2": _C(-32, 5), None: 24}),
    ("u12_2", 1, {"Σ_2": 1, None: 120}),
    ("v14_2", 1, {"Σ_2": 1, None: -240}),
    ("w16_2", 1, {"Σ_2": 1, None: -240}),
]

_INDEX3_DISPLAYS = [
    ("b_-2_3", 0, {"Σ_2": 3, "Σ_4": 3, "Σ_6": 5, None: -2640}),
    ("phi_-4_3", 0, {"Σ_2": 1, "Σ_4": 1, "Σ_6": -1, None: -240}),
    ("a0_3", 0, {"Σ_2": 2, "Σ_4": -1, None: -240}),
    ("phi_-2_3", 0, {"Σ_2": 1, "Σ_6": 1, None: -480}),
    ("phi_0_3", 0, {"Σ_2": 1}),
    ("phi_-8_3", 0, {"Σ_{8'}": 1, "Σ_6": -4, "Σ_4": 6, "Σ_2": -4, None: 240}),
    ("phi_-6_3", 0, {"Σ_{8'}": 1, "Σ_4": -6, "Σ_2": 8, None: -720}),
    ("x3", 1, {"Σ_6": 1}),
    ("b3", 1, {"Σ_6": _C(-7, 20), "Σ_4": _C(-27, 20), "Σ_2": _C(-9, 20),
               None: 12}),
    ("u10_3", 1, {"Σ_4": 1, "Σ_2": _C(-2, 3), None: -80}),
    ("u12_3", 1, {"Σ_4": 1, "Σ_2": -2, None: 240}),
    ("v12_3", 1, {"Σ_2": 1}),
    ("u14_3", 1, {"Σ_4": 1, "Σ_2": 2, None: -720}),
    ("u16_3", 1, {}),
]

_INDEX4_DISPLAYS = [
    ("phi_-16_4", 0, {"Σ_{16'}": 1, "Σ_{14'}": -8, "Σ_{12}": 28,
                      "Σ_{10}": -56, "Σ_{8''}": 14, "Σ_{8'}": 56,
                      "Σ_6": -56, "Σ_4": 28, "Σ_2": -8, None: 240}),
    ("phi_-14_4", 0, {"Σ_{16'}": 1, "Σ_{14'}": -2, "Σ_{12}": -14,
                      "Σ_{10}": 70, "Σ_{8''}": -28, "Σ_{8'}": -112,
                      "Σ_6": 154, "Σ_4": -98, "Σ_2": 34, None: -1200}),
    ("phi_-12_4", 0, {"Σ_{14'}": 1, "Σ_{12}": -4, "Σ_{10}": 3,
                      "Σ_{8''}": 2, "Σ_{8'}": 8, "Σ_6": -25, "Σ_4": 24,
                      "Σ_2": -11, None: 480}),
    ("phi_-10_4", 0, {"Σ_{12}": 1, "Σ_{10}": -4, "Σ_{8''}": 1, "Σ_{8'}": 4,
                      "Σ_4": -5, "Σ_2": 4, None: -240}),
    ("phi_-8_4", 0, {"Σ_{10}": 1, "Σ_{8''}": _C(-7, 10),
                     "Σ_{8'}": _C(-14, 5), "Σ_6": 4, "Σ_4": -1, "Σ_2": -1,
                     None: 120}),
    ("phi_-6_4", 0, {"Σ_{8''}": 1, "Σ_{8'}": 4, "Σ_6": -14, "Σ_4": 12,
                     "Σ_2": -2, None: -240}),
    ("phi_-4_4", 0, {"Σ_6": 1, "Σ_4": -2, "Σ_2": 1}),
    ("phi_-2_4", 0, {"Σ_4": -7, "Σ_2": 8, None: -240}),
    ("phi_0_4", 0, {"Σ_2": 2, None: -120}),
    ("psi_-8_4", 0, {"Σ_{8'}": 1, "Σ_{8''}": -1}),
    ("a4", 0, {None: 1}),
    ("a4", 1, {"Σ_{8''}": 1}),
    ("b4", 1, {"Σ_{8''}": _C(1, 15), "Σ_6": _C(-28, 15), "Σ_2": _C(-4, 15),
               None: -8}),
]


def _suite_index2():
    return _check_displays("index2", _INDEX2_DISPLAYS)


def _suite_index3():
    return _check_displays("index3", _INDEX3_DISPLAYS)


def _suite_index4():
    out = _check_displays("index4", _INDEX4_DISPLAYS)
    for name in ("u10_4", "u12_4", "cusp_8_4", "cusp_10_4", "cusp_12_4"):
        f = build(name)
        m16 = DominantWeight.from_fw((2, 0, 0, 0, 0, 0, 0, 0))
        ok = f.term(2).coeff(m16) == 0
        out.append((f"index4: {name} q² Σ_{{16'}} cancelled", ok,
                    "" if ok else "survived"))
    return out


def _suite_systems():
    cases = [
        ((3, -8, (0, 2, 4, 6, 8)), ((1, -4, 6, -4, 1),)),
        ((4, -16, tuple(range(0, 18, 2))),
         ((1, -8, 28, -56, 70, -56, 28, -8, 1),)),
        ((3, -10, (0, 2, 4, 6, 8)), ()),
        ((3, -6, (0, 2, 4, 6)), ()),
        ((4, -18, tuple(range(0, 18, 2))), ()),
        ((4, -14, tuple(range(0, 16, 2))), ()),
    ]
    out = []
    for (t, w0, norms), want in cases:
        got = solve_cascade(t, w0, norms).nullspace
        ok = got == want
        out.append((f"systems: ({t}, {w0})", ok, "" if ok else f"got {got}"))
    return out


def _suite_identities():
    N = 10
    th = theta_e8(N)
    p4, p2, p0 = (build(x, N) for x in ("phi_-4_2", "phi_-2_2", "phi_0_2"))
    inner = (
        jf_scale(p0, _E(4, N)).scale(3)
        - jf_scale(p4, _mf(2, 0, N))
        - jf_scale(p2, _E(6, N))
    )
    rhs = jf_scale(inner, _E(4, N)).scale(Fraction(1, 1080)) + jf_scale(
        p4, _D(N)
    )
    ok = jf_mul(th, th) == rhs
    return [("identities: θ² relation through q^10", ok,
             "" if ok else "mismatch")]


def _suite_lf():
    out = []
    for name in ("phi_0_2", "a0_3", "phi_0_3", "phi_0_4"):
        ok = weight0_identity(build(name))
        out.append((f"lf: weight-0 identity for {name}", ok,
                    "" if ok else "2t·f(0) != 3·norm moment"))
    for name, entry in sorted(REGISTRY.items()):
        if not entry.buildable:
            continue
        f = build(name)
        ok, bad = f.term(0).t_support_check(f.index)
        out.append((f"lf: q^0 support T(m) <= {f.index} for {name}", ok,
                    "" if ok else f"violated at fw={bad[0].fw}"))
    return out


def _suite_lattice():
    out = []
    expected_reps = {
        2: [(0, 0, 0, 0, 0, 0, 0, 1)],
        4: [(1, 0, 0, 0, 0, 0, 0, 0)],
        6: [(0, 0, 0, 0, 0, 0, 1, 0)],
        8: [(0, 0, 0, 0, 0, 0, 0, 2), (0, 1, 0, 0, 0, 0, 0, 0)],
        10: [(1, 0, 0, 0, 0, 0, 0, 1)],
        12: [(0, 0, 0, 0, 0, 1, 0, 0)],
        14: [(0, 0, 1, 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, 0, 1, 1)],
        16: [(2, 0, 0, 0, 0, 0, 0, 0), (0, 1, 0, 0, 0, 0, 0, 1)],
        18: [(1, 0, 0, 0, 0, 0, 1, 0), (0, 0, 0, 0, 0, 0, 0, 3)],
        20: [(0, 0, 0, 0, 1, 0, 0, 0), (1, 0, 0, 0, 0, 0, 0, 2)],
        22: [(0, 0, 0, 0, 0, 1, 0, 1), (1, 1, 0, 0, 0, 0, 0, 0)],
        24: [(0, 0, 0, 0, 0, 0, 2, 0), (0, 0, 1, 0, 0, 0, 0, 1)],
    }
    for two_n, reps in expected_reps.items():
        got = shell(two_n)
        ok_reps = sorted(m.fw for m, _ in got) == sorted(reps)
        total = sum(s for _, s in got)
        ok_total = total == 240 * sigma_pow(two_n // 2, 3)
        ok = ok_reps and ok_total
        out.append((f"lattice: shell {two_n}", ok,
                    "" if ok else f"reps {[m.fw for m, _ in got]} total {total}"))
    for t, want in ((2, 4), (3, 8), (4, 16), (5, 22)):
        got = max_coset_min_norm(t)
        out.append((f"lattice: coset maxima t={t}", got == want,
                    "" if got == want else f"got {got}"))
    return out


def _suite_bounds():
    out = []
    r = rank_series(14)[1:]
    want_r = [1, 3, 5, 10, 15, 27, 39, 63, 90, 135, 187, 270, 364, 505]
    out.append(("bounds: rank table", r == want_r,
                "" if r == want_r else f"got {r}"))
    want_b = [1, 0, 1, 1, 2, 1, 3, 2, 4, 4, 6, 5, 9, 8, 12, 13, 17, 17, 24]
    got_b = [b for _, b, _ in dimension_bound_table(40)]
    out.append(("bounds: dimension bounds 4..40", got_b == want_b,
                "" if got_b == want_b else f"got {got_b}"))
    want_p = [2, 4, 4, 5, 4, 6, 6, 7, 6, 8, 7, 8, 6, 8, 8, 9, 8, 8, 9, 10,
              9, 10, 10, 11, 10, 12]
    got_p = [v for _, v in pullback_max_table()]
    out.append(("bounds: pullback maxima", got_p == want_p,
                "" if got_p == want_p else f"got {got_p}"))
    return out


def _suite_structure():
    out = []
    for t, want in ((1, 1), (2, 1), (3, 1), (4, 2)):
        got = len(holomorphic_subspace(4, t, 2))
        out.append((f"structure: dim weight-4 holomorphic, t={t}",
                    got == want, "" if got == want else f"got {got}"))
    for t in (1, 2, 3, 4):
        rep = verify_free_module(t, 16)
        bad = [r for r in rep.rows if not r[3]]
        out.append((f"structure: free module t={t} through weight 16",
                    rep.ok, "" if rep.ok else f"failures {bad}"))
    return out


def _suite_properties():
    out = []
    for name, entry in sorted(REGISTRY.items()):
        if not entry.buildable:
            continue
        f = build(name)
        kind = classify(f).kind
        ok = kind == entry.expected_class
        out.append((f"properties: classify {name}", ok,
                    "" if ok else f"got {kind}, registered {entry.expected_class}"))
        try:
            done = check_quasi_periodicity(f, samples=20, seed=7)
            out.append((f"properties: quasi-periodicity {name} ({done} checks)",
                        True, ""))
        except AssertionError as exc:
            out.append((f"properties: quasi-periodicity {name}", False,
                        str(exc)))
    return out


_SUITES = {
    "index2": _suite_index2,
    "index3": _suite_index3,
    "index4": _suite_index4,
    "systems": _suite_systems,
    "identities": _suite_identities,
    "lf": _suite_lf,
    "lattice": _suite_lattice,
    "bounds": _suite_bounds,
    "structure": _suite_structure,
    "properties": _suite_properties,
}


def _cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    checks = []
    for nm in names:
        checks.extend(_SUITES[nm]())
    ok_all = all(ok for _, ok, _ in checks)
    if args.format == "json":
        _emit_json(
            {
                "suite": args.suite,
                "ok": ok_all,
                "checks": [
                    {"name": nm, "ok": ok, "detail": detail}
                    for nm, ok, detail in checks
                ],
            }
        )
    else:
        for nm, ok, detail in checks:
            mark = "ok  " if ok else "FAIL"
            line = f"{mark} {nm}"
            if detail:
                line += f" — {detail}"
            print(line)
        print(f"{sum(ok for _, ok, _ in checks)}/{len(checks)} checks passed")
    return 0 if ok_all else 1


# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="e8jac",
        description="Exact q-expansions of W(E8)-invariant Jacobi forms.",
    )
    p.add_argument(
        "--budget",
        type=int,
        default=None,
        help=f"orbit/coset enumeration element budget (default 2000000; "
             f"mirrors ${BUDGET_ENV})",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("expand", help="print a catalog form's q-expansion")
    sp.add_argument("--form", required=True, help="registry name, e.g. phi_-4_2")
    sp.add_argument("--order", type=int, default=None,
                    help="truncation order (default 3, or 2 at index 4)")
    fmt(sp)
    sp.set_defaults(fn=_cmd_expand)

    sp = sub.add_parser("orbits", help="orbit decomposition of a shell")
    sp.add_argument("--norm", type=int, required=True, help="shell norm 2n")
    fmt(sp)
    sp.set_defaults(fn=_cmd_orbits)

    sp = sub.add_parser("coset-minima",
                        help="max over E8/tE8 cosets of the minimal norm")
    sp.add_argument("--t", type=int, required=True)
    fmt(sp)
    sp.set_defaults(fn=_cmd_coset_minima)

    sp = sub.add_parser("rank", help="free-module ranks r(1)..r(max)")
    sp.add_argument("--max", type=int, default=14)
    fmt(sp)
    sp.set_defaults(fn=_cmd_rank)

    sp = sub.add_parser("bounds", help="dimension upper bounds for even weights")
    sp.add_argument("--max", type=int, default=40)
    fmt(sp)
    sp.set_defaults(fn=_cmd_bounds)

    sp = sub.add_parser("pullback-max",
                        help="largest norm-4-shell pairing per dictionary orbit")
    fmt(sp)
    sp.set_defaults(fn=_cmd_pullback_max)

    sp = sub.add_parser("solve-cascade",
                        help="q^0 cascade linear system and its nullspace")
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--w0", type=int, required=True)
    sp.add_argument("--norms", required=True,
                    help="comma-separated even norms starting at 0")
    fmt(sp)
    sp.set_defaults(fn=_cmd_solve_cascade)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", choices=sorted(_SUITES) + ["all"],
                    required=True)
    fmt(sp)
    sp.set_defaults(fn=_cmd_verify)

    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.budget is not None:
        os.environ[BUDGET_ENV] = str(args.budget)
    try:
        return args.fn(args)
    except (BudgetError, CatalogError, KeyError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
