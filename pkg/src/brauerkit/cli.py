"""Command-line front end: parse flags, dispatch to the library drivers,
emit deterministic JSON reports and SVG charts.

Every JSON report carries the short digests of the curated data files it
could have consumed, so a run is reproducible against a pinned data
directory (overridable through the BRAUERKIT_DATA environment variable).
Exit codes: 2 for parse/input errors, 3 when a needed fact is missing or a
computation stays undecided, 4 when an extension problem is ambiguous.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .abelian import FgAbGroup, smith_normal_form
from .charp import TruncatedCharPModule, operator_cokernel_basis, operator_kernel, parse_operator
from .cyccoh import group_cohomology, sign, trivial
from .errors import (
    AmbiguousExtension,
    DensityUnknown,
    NoExtension,
    NoFact,
    NotStabilized,
    OutOfRange,
    UnmatchedRule,
    WindowTooSmall,
)
from .kofam import SHIPPED_RINGS, EtaleRingDescriptor, lbr_ko, pic_ko
from .numbrauer import (
    brauer_laurent,
    brauer_localized_integers,
    h1_qz_report,
    places_from_json,
)
from .sheaftab import data_dir
from .tmffam import TmfPageData, lbr_m_o, lbr_tmf, pic_tmf_c4inv, pic_tmf_global, pic_tmf_r, run_pic_tmf

EXIT_PARSE = 2
EXIT_NOFACT = 3
EXIT_AMBIGUOUS = 4

_NOFACT_ERRORS = (NoFact, DensityUnknown, NotStabilized, OutOfRange,
                  UnmatchedRule, WindowTooSmall, NoExtension, KeyError,
                  FileNotFoundError)


def data_file_versions() -> dict:
    """Short content digests of the curated data files in force."""
    out = {}
    for path in sorted(data_dir().glob("*.json")):
        digest = hashlib.sha256(path.read_bytes()).hexdigest()[:12]
        out[path.name] = digest
    return out


def _monomial(degree: int, coeff: int) -> str:
    base = "1" if degree == 0 else ("j" if degree == 1 else f"j^{degree}")
    return base if coeff == 1 else f"{coeff}*{base}"


def _poly_str(poly) -> str:
    return " + ".join(_monomial(d, c) for d, c in poly)


# ---------------------------------------------------------------------------
# verb handlers (each returns a JSON-serializable report dict)
# ---------------------------------------------------------------------------


def _cmd_snf(args) -> dict:
    matrix = json.loads(args.matrix)
    u, d, v = smith_normal_form(matrix)
    return {
        "U": u, "D": d, "V": v,
        "diagonal": [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))],
    }


def _cmd_cohomology(args) -> dict:
    group = FgAbGroup.from_orders(json.loads(args.orders))
    module = (sign if args.action == "sign" else trivial)(group, args.n)
    value = group_cohomology(module, args.s)
    return {"group": str(value), "structure": value.to_json(),
            "s": args.s, "action": args.action}


def _cmd_artin_schreier(args) -> dict:
    op = parse_operator(args.op, args.p)
    window = (-args.window, args.window) if args.laurent else (0, args.window)
    module = TruncatedCharPModule(args.p, window, laurent=args.laurent)
    basis, stabilized = operator_kernel(op, module)
    report = {
        "operator": str(op), "p": args.p, "laurent": args.laurent,
        "window": list(window),
        "kernel": [_poly_str(poly) for poly in basis],
        "kernel_rank": len(basis),
        "stabilized": stabilized,
    }
    if args.cokernel:
        degrees, prefix = operator_cokernel_basis(op, module)
        report["cokernel_basis"] = [_monomial(d, 1) for d in degrees]
        report["cokernel_prefix"] = prefix
    return report


def _cmd_cech(args) -> dict:
    from .charp import punctured_affine_cohomology
    got = punctured_affine_cohomology(args.n_vars, args.window)
    return {
        "n_vars": got.n_vars, "degree": got.degree, "window": got.window,
        "basis": [list(v) for v in got.basis],
        "affine": got.affine, "note": got.note,
    }


def _cmd_br_number_ring(args) -> dict:
    places = places_from_json(args.places)
    desc = brauer_localized_integers(places)
    return {"group": str(desc), "descriptor": desc.to_json(),
            "places": [{"kind": p.kind, "label": p.label} for p in places]}


def _cmd_h1_qz(args) -> dict:
    primes = json.loads(args.primes)
    rep = h1_qz_report(primes)
    out = {"primes": sorted(primes), "computed": str(rep.computed),
           "discrepancy": rep.discrepancy, "note": rep.note}
    if rep.stated is not None:
        out["stated"] = str(rep.stated)
    return out


def _cmd_br_laurent(args) -> dict:
    places = places_from_json(args.places)
    primes = json.loads(args.primes)
    desc = brauer_laurent(places, primes)
    return {"group": str(desc), "descriptor": desc.to_json(),
            "inverted_primes": sorted(primes)}


def _load_ring(spec: str) -> EtaleRingDescriptor:
    if spec in SHIPPED_RINGS:
        return SHIPPED_RINGS[spec]
    path = Path(spec)
    if not path.exists():
        raise NoFact(f"no shipped ring or descriptor file named {spec!r}")
    with open(path) as fh:
        return EtaleRingDescriptor.from_json(json.load(fh))


def _cmd_pic_ko(args) -> dict:
    r = _load_ring(args.ring)
    res = pic_ko(r, d3_21=args.d3_21)
    return {
        "ring": r.name,
        "group": str(res.group), "structure": res.group.to_json(),
        "graded": [{"s": s, "group": str(g)} for s, g in res.graded],
        "sections": str(res.sections),
        "witness_order": res.witness_order,
        "notes": list(res.notes),
    }


def _cmd_lbr_ko(args) -> dict:
    rep = lbr_ko()
    return {
        "group": str(rep.lbr), "structure": rep.lbr.to_json(),
        "exact": rep.exact,
        "terms": [{"name": name, "value": str(v)} for name, v in rep.terms],
        "notes": list(rep.notes),
    }


def _tmf_citations(data: TmfPageData) -> list:
    cites = [item["citation"] for item in data.column0]
    cites += [rule["citation"] for rule in data.special_rules]
    return sorted(set(cites))


def _cmd_pic_tmf(args) -> dict:
    data = TmfPageData.load()
    if args.ring:
        rep = pic_tmf_r(_load_ring(args.ring), data)
        return {
            "ring": rep.ring,
            "pic_r": str(rep.pic_r),
            "quotient": str(rep.quotient),
            "h0_ideal_order": rep.h0_ideal_order,
            "sections_order": rep.sections_order,
            "total_order": rep.total_order,
            "notes": list(rep.notes),
            "citations": _tmf_citations(data),
        }
    column = run_pic_tmf(data)
    local = pic_tmf_global(data=data)
    return {
        "column0": [{"s": g.s, "local": g.local, "value": g.display(),
                     "exact": g.exact, "assumed": list(g.assumed)}
                    for g in column.stages],
        "gr_above_7": 0,
        "local_groups": {str(p): str(g) for p, g in local.items()},
        "citations": _tmf_citations(data),
    }


def _cmd_pic_tmf_c4inv(args) -> dict:
    data = TmfPageData.load()
    group = pic_tmf_c4inv(data=data)
    return {"group": str(group), "structure": group.to_json(),
            "citations": [data.c4inv["citation"]]}


def _cmd_lbr_tmf(args) -> dict:
    data = TmfPageData.load()
    rep = lbr_tmf(args.window, data=data)
    return {
        "window": rep.window,
        "three_torsion": str(rep.three_torsion),
        "p_gt_3_torsion": str(rep.p_gt_3_torsion),
        "two_local_basis": list(rep.two_local_basis),
        "certified_prefix": rep.certified_prefix,
        "split_surjection": rep.split_surjection,
        "kernel_finite": rep.kernel_finite,
        "kernel_order_bound": rep.kernel_order_bound,
        "br_pi0_zero": rep.br_pi0_zero,
        "assumed": list(rep.assumed),
        "citations": _tmf_citations(data),
    }


def _cmd_lbr_mo(args) -> dict:
    data = TmfPageData.load()
    rep = lbr_m_o(args.window, data=data)
    return {
        "window": rep.window,
        "two_local_kernel_order": rep.two_local_kernel_order,
        "kernel_footnote": rep.kernel_footnote,
        "two_local_basis": list(rep.two_local_basis),
        "three_local": str(rep.three_local),
        "iso_after_inverting_2": rep.iso_after_inverting_2,
        "cokernel_order_bound": rep.cokernel_order_bound,
        "injection_distinct": rep.injection_distinct,
        "assumed": list(rep.assumed),
        "citations": [data.lbr_mo["citation"]],
    }


def _cmd_ss_run(args) -> dict:
    from .ssengine import page_from_json, page_to_json, turn_page
    with open(args.page) as fh:
        page, rules = page_from_json(fh.read())
    nxt = turn_page(page, rules)
    return json.loads(page_to_json(nxt))


def _cmd_ss_chart(args) -> str:
    from .ssengine import chart_svg, page_from_json
    with open(args.page) as fh:
        page, _ = page_from_json(fh.read())
    return chart_svg(page)


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brauerkit",
        description="Picard and Brauer group computations for KO, TMF and number rings.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--output", help="write the report to this path instead of stdout")
        return p

    p = add("snf", _cmd_snf, "Smith normal form of an integer matrix")
    p.add_argument("--matrix", required=True, help="JSON list of rows")

    p = add("cohomology", _cmd_cohomology, "cyclic group cohomology H^s(C_n; M)")
    p.add_argument("--orders", required=True, help="JSON cyclic orders of M (0 for Z)")
    p.add_argument("--action", choices=["trivial", "sign"], default="trivial")
    p.add_argument("--n", type=int, default=2, help="order of the acting cyclic group")
    p.add_argument("--s", type=int, required=True)

    p = add("artin-schreier", _cmd_artin_schreier,
            "kernel (and cokernel) of a semilinear operator on F_p[j] or F_p[j^±1]")
    p.add_argument("--p", type=int, required=True, choices=[2, 3])
    p.add_argument("--op", required=True, help='operator text, e.g. "x + j*x^2"')
    p.add_argument("--laurent", action="store_true")
    p.add_argument("--window", type=int, default=16)
    p.add_argument("--cokernel", action="store_true")

    p = add("cech", _cmd_cech, "cohomology of punctured affine space")
    p.add_argument("--n-vars", type=int, required=True)
    p.add_argument("--window", type=int, required=True)

    p = add("br-number-ring", _cmd_br_number_ring,
            "Brauer group of a number-ring localization from its places")
    p.add_argument("--places", required=True, help="JSON list of place specs")

    p = add("h1-qz", _cmd_h1_qz, "H^1(-; Q/Z) of a localization of Spec Z")
    p.add_argument("--primes", required=True, help="JSON list of inverted primes")

    p = add("br-laurent", _cmd_br_laurent, "Brauer group of S[j^±1]")
    p.add_argument("--places", default='[{"kind":"real"}]')
    p.add_argument("--primes", default="[]")

    p = add("pic-ko", _cmd_pic_ko, "Picard group of KO over an étale Z-algebra")
    p.add_argument("--ring", default="Z", help="shipped ring name or descriptor file")
    p.add_argument("--d3-21", dest="d3_21", choices=["zero", "nonzero", "unknown"],
                   default="zero")

    add("lbr-ko", _cmd_lbr_ko, "local Brauer group of KO")

    p = add("pic-tmf", _cmd_pic_tmf, "Picard sheaf filtration and Pic(TMF) localizations")
    p.add_argument("--ring", help="shipped ring name or descriptor file")

    add("pic-tmf-c4inv", _cmd_pic_tmf_c4inv, "Pic of TMF with c4 inverted")

    p = add("lbr-tmf", _cmd_lbr_tmf, "local Brauer group of TMF")
    p.add_argument("--window", type=int, default=32)

    p = add("lbr-mo", _cmd_lbr_mo, "local Brauer group of the sheaf-level theory")
    p.add_argument("--window", type=int, default=32)

    p = add("ss-run", _cmd_ss_run, "turn one page of a serialized spectral sequence")
    p.add_argument("--page", required=True, help="page JSON file (entries + rules)")

    p = add("ss-chart", _cmd_ss_chart, "SVG chart of a serialized page")
    p.add_argument("--page", required=True, help="page JSON file")

    return parser


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else 0
    try:
        report = args.handler(args)
    except AmbiguousExtension as exc:
        print(f"error: ambiguous extension: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except _NOFACT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOFACT
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if isinstance(report, str):  # SVG artifact
        _emit(report, args.output)
        return 0
    report["data_files"] = data_file_versions()
    _emit(json.dumps(report, sort_keys=True, indent=1) + "\n", args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
