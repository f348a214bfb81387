"""Bigraded spectral-sequence pages with rule-driven differentials.

Pages use Adams indexing: an entry sits at (s, t), charts are drawn in the
(t - s, s)-plane, and the page-r differential goes (s, t) -> (s+r, t+r-1).
Entries are finitely generated abelian groups, symbolic sheaves, or
truncated characteristic-p modules; differentials are declared as rules
(zero, isomorphism, explicit matrix, semilinear operator, imported from a
parallel additive sequence, or unresolved) and `turn_page` replaces each
entry by kernel-mod-image.  Everything absent from the sparse entry map is
zero, and page-turning only ever shrinks entries, so stabilization of a
column is decidable by inspecting which later differentials could still
connect two nonzero positions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .abelian import (
    ExtensionWitness,
    FgAbGroup,
    GroupHom,
    hom_cokernel,
    hom_kernel,
    homology,
    resolve_extension,
    resolve_extension_by_order,
)
from .charp import SemilinearOperator, TruncatedCharPModule, operator_kernel, parse_operator
from .errors import AmbiguousExtension, NoFact, NotStabilized, OutOfRange, UnmatchedRule
from .sheaftab import (
    FactTable,
    SheafSymbol,
    default_fact_table,
    sheaf_display,
    sheaf_from_json,
    sheaf_to_json,
)


@dataclass(frozen=True)
class CharPRef:
    """An operator-module pair standing in for a characteristic-p entry."""

    name: str
    module: TruncatedCharPModule


EntryValue = Union[FgAbGroup, SheafSymbol, CharPRef]


@dataclass(frozen=True)
class Entry:
    """A page entry with bookkeeping for index-two classes ("2□") and for
    unresolved differentials assumed to vanish."""

    value: EntryValue
    label: str = ""
    index: int = 1
    assumed: Tuple[str, ...] = ()

    def is_zero(self) -> bool:
        return isinstance(self.value, FgAbGroup) and self.value.is_zero()

    def display(self) -> str:
        if isinstance(self.value, FgAbGroup):
            body = str(self.value)
        elif isinstance(self.value, CharPRef):
            body = self.value.name
        else:
            body = sheaf_display(self.value)
        if self.label:
            body = f"{self.label} = {body}" if self.index == 1 else f"{self.label}"
        if self.index != 1:
            body = f"{body} (index {self.index})"
        if self.assumed:
            body += " [assuming " + ", ".join(self.assumed) + " = 0]"
        return body


@dataclass(frozen=True)
class SSPage:
    r: int
    entries: Dict[Tuple[int, int], Entry]
    vanishing_line: Optional[Callable[[int, int], bool]] = None  # True => certified zero

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("pages start at r = 2")
        cleaned = {pos: e for pos, e in self.entries.items() if not e.is_zero()}
        if self.vanishing_line:
            for (s, t) in cleaned:
                if self.vanishing_line(s, t):
                    raise ValueError(f"nonzero entry at ({s},{t}) inside the vanishing region")
        object.__setattr__(self, "entries", cleaned)

    def entry(self, s: int, t: int) -> Optional[Entry]:
        return self.entries.get((s, t))

    def target_of(self, s: int, t: int) -> Tuple[int, int]:
        return (s + self.r, t + self.r - 1)

    def source_of(self, s: int, t: int) -> Tuple[int, int]:
        return (s - self.r, t - self.r + 1)


@dataclass(frozen=True)
class DifferentialRule:
    """A declared d_r out of one source position (or a region of them).

    kind: zero | iso | matrix | operator | unresolved.  Matrix rules carry a
    GroupHom; operator rules a SemilinearOperator plus a surjectivity flag
    that removes the target entry; unresolved rules name the open
    differential, which is then assumed zero with a visible marker.
    """

    r: int
    source: Union[Tuple[int, int], Callable[[int, int], bool]]
    kind: str
    hom: Optional[GroupHom] = None
    operator: Optional[SemilinearOperator] = None
    surjective: bool = False
    name: str = ""
    provenance: str = ""
    relabel: str = ""

    def __post_init__(self):
        if self.kind not in ("zero", "iso", "matrix", "operator", "unresolved"):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == "matrix" and self.hom is None:
            raise ValueError("matrix rules need a GroupHom")
        if self.kind == "operator" and self.operator is None:
            raise ValueError("operator rules need a SemilinearOperator")
        if self.kind == "unresolved" and not self.name:
            raise ValueError("unresolved rules must be named")
        if not self.provenance:
            raise ValueError("every rule carries provenance")

    def matches(self, s: int, t: int) -> bool:
        if callable(self.source):
            return self.source(s, t)
        return self.source == (s, t)


def _validate_rules(page: SSPage, rules: Sequence[DifferentialRule]) -> None:
    for rule in rules:
        if rule.r != page.r:
            raise ValueError(f"rule for page {rule.r} applied to page {page.r}")
        if isinstance(rule.source, tuple) and page.entry(*rule.source) is None:
            raise UnmatchedRule(f"rule source {rule.source} is a zero entry")
    # d∘d = 0: a matrix rule chained after another matrix rule must compose
    # to the zero map (same-page composites vanish positionally, so only
    # check explicitly provided homs that happen to chain)
    explicit = {rule.source: rule for rule in rules
                if isinstance(rule.source, tuple) and rule.kind == "matrix"}
    for (s, t), rule in explicit.items():
        nxt = explicit.get((s + rule.r, t + rule.r - 1))
        if nxt is not None and not nxt.hom.compose(rule.hom).is_zero_hom():
            raise ValueError(f"d∘d ≠ 0 at ({s},{t}) on page {rule.r}")


def _rule_for(rules: Sequence[DifferentialRule], s: int, t: int) -> Optional[DifferentialRule]:
    found = [rule for rule in rules if rule.matches(s, t)]
    if len(found) > 1:
        raise ValueError(f"multiple rules match ({s},{t})")
    return found[0] if found else None


def _index_multiplier(hom: GroupHom) -> int:
    """Order of the image of a matrix differential (target must be finite)."""
    if not hom.target.is_finite():
        return 1
    cok, _ = hom_cokernel(hom)
    return hom.target.order() // cok.order()


def turn_page(page: SSPage, rules: Sequence[DifferentialRule],
              table: Optional[FactTable] = None) -> SSPage:
    """Replace every entry by ker(outgoing d_r)/im(incoming d_r)."""
    _validate_rules(page, rules)
    table = table or default_fact_table()
    killed: set = set()
    new_entries: Dict[Tuple[int, int], Entry] = {}
    for (s, t), entry in sorted(page.entries.items()):
        out_rule = _rule_for(rules, s, t)
        in_pos = page.source_of(s, t)
        in_rule = _rule_for(rules, *in_pos) if page.entry(*in_pos) else None
        new = _evolve_entry(page, entry, (s, t), out_rule, in_rule, table, killed)
        if new is not None and not new.is_zero():
            new_entries[(s, t)] = new
    for pos in killed:
        new_entries.pop(pos, None)
    return SSPage(page.r + 1, new_entries, page.vanishing_line)


def _evolve_entry(page, entry, pos, out_rule, in_rule, table, killed):
    s, t = pos
    assumed = entry.assumed
    # incoming differential
    if in_rule is not None and in_rule.kind == "iso":
        return None  # killed by the incoming isomorphism
    if in_rule is not None and in_rule.kind == "unresolved":
        assumed = assumed + (in_rule.name,)
    in_hom = in_rule.hom if in_rule is not None and in_rule.kind == "matrix" else None
    # outgoing differential
    if out_rule is None or out_rule.kind == "zero":
        return _mod_image(entry, in_hom, assumed)
    if out_rule.kind == "iso":
        killed.add(page.target_of(s, t))
        return None
    if out_rule.kind == "unresolved":
        return _mod_image(replace(entry, assumed=assumed + (out_rule.name,)), in_hom, None)
    if out_rule.kind == "operator":
        new = _operator_kernel_entry(entry, out_rule, table)
        if out_rule.surjective:
            killed.add(page.target_of(s, t))
        return replace(new, assumed=assumed)
    # matrix rule
    if not isinstance(entry.value, FgAbGroup):
        raise NoFact(f"matrix rule on a non-group entry at ({s},{t})")
    hom = out_rule.hom
    if not hom.source.same_structure(entry.value):
        raise ValueError(f"rule at ({s},{t}) does not match the entry group")
    if in_hom is not None:
        value = homology(hom, in_hom)
    else:
        value, _ = hom_kernel(hom)
    index = entry.index * _index_multiplier(hom)
    label = out_rule.relabel or entry.label
    return Entry(value, label=label, index=index, assumed=assumed)


def _mod_image(entry: Entry, in_hom: Optional[GroupHom], assumed) -> Entry:
    if assumed is None:
        assumed = entry.assumed
    if in_hom is None:
        return replace(entry, assumed=assumed)
    if not isinstance(entry.value, FgAbGroup):
        raise NoFact("matrix image hitting a non-group entry")
    cok, _ = hom_cokernel(in_hom)
    return Entry(cok, label=entry.label, index=entry.index, assumed=assumed)


def _operator_kernel_entry(entry: Entry, rule: DifferentialRule, table: FactTable) -> Entry:
    op = rule.operator
    if isinstance(entry.value, CharPRef):
        basis, _ = operator_kernel(op, entry.value.module)
        group = FgAbGroup.from_orders([op.p] * len(basis))
        return Entry(group, label=entry.label, index=entry.index)
    if isinstance(entry.value, SheafSymbol):
        kernel = table.kernel_sheaf(str(op), sheaf_display(entry.value))
        return Entry(kernel, label=entry.label, index=entry.index)
    raise NoFact("operator rule on a plain group entry")


# ---------------------------------------------------------------------------
# comparison imports
# ---------------------------------------------------------------------------


def comparison_import(additive_rules: Sequence[DifferentialRule],
                      r: int, s: int, t: int) -> DifferentialRule:
    """Copy the additive d_r^{s, t-1} into the multiplicative sequence at
    (s, t); only valid in the range 2 <= r <= t - 1."""
    if not 2 <= r <= t - 1:
        raise OutOfRange(
            f"d_{r} at ({s},{t}) is outside the comparison range 2 <= r <= t-1; "
            "supply a universal-formula rule instead")
    match = [rule for rule in additive_rules if rule.r == r and rule.matches(s, t - 1)]
    if len(match) > 1:
        raise ValueError("ambiguous additive rule")
    if not match:
        return DifferentialRule(r, (s, t), "zero",
                                provenance="comparison tool: additive differential absent")
    src = match[0]
    return replace(src, source=(s, t), provenance=f"comparison tool: {src.provenance}")


# ---------------------------------------------------------------------------
# columns and abutments
# ---------------------------------------------------------------------------


def column_filtration(pages: Sequence[SSPage], column: int,
                      bound: Optional[int] = None) -> List[Tuple[int, Entry]]:
    """Nonzero E∞ entries (s, gr^s) with t - s = column, ascending s.

    The last supplied page must be stable along the column: no later
    differential may connect a column entry to another nonzero entry.  A
    `bound` certifies that rules with r > bound vanish.
    """
    if not pages:
        raise ValueError("need at least one page")
    last = pages[-1]
    out = []
    for (s, t), entry in sorted(last.entries.items()):
        if t - s != column:
            continue
        _check_stable(last, s, t, bound)
        out.append((s, entry))
    return out


def _check_stable(page: SSPage, s: int, t: int, bound: Optional[int]) -> None:
    for (s2, t2) in page.entries:
        if (s2, t2) == (s, t):
            continue
        for src, tgt in (((s2, t2), (s, t)), ((s, t), (s2, t2))):
            r = tgt[0] - src[0]
            if r >= page.r and tgt[1] - src[1] == r - 1:
                if bound is not None and r > bound:
                    continue
                if page.vanishing_line and (page.vanishing_line(*src) or page.vanishing_line(*tgt)):
                    continue
                raise NotStabilized(
                    f"a d_{r} could still connect {src} to {tgt}; "
                    "supply a bound or a vanishing certificate")


@dataclass(frozen=True)
class AbutmentReport:
    """Symbolic answer when some graded piece is sheaf-valued."""

    stages: Tuple[Tuple[int, str], ...]


def assemble_abutment(gr: Sequence[Tuple[int, Entry]],
                      witnesses: Sequence[ExtensionWitness]):
    """Iterated extension resolution of a finite column, deepest stage first.

    The filtration is decreasing: gr^0 is the top quotient of the abutment
    and the running total G/fil^s grows downward, so resolution starts at
    the lowest s and each deeper stage enters as the subgroup of the next
    extension.  Witness orders are clamped to the running group order (the
    witness element's image in a quotient cannot have larger order).
    Returns an AbutmentReport when any stage is sheaf- or operator-valued.
    """
    if not gr:
        return FgAbGroup.zero()
    if any(not isinstance(e.value, FgAbGroup) for _, e in gr):
        return AbutmentReport(tuple((s, e.display()) for s, e in gr))
    stages = sorted(gr, key=lambda se: se[0])
    total = stages[0][1].value
    for i, (s, entry) in enumerate(stages[1:]):
        witness = witnesses[i] if i < len(witnesses) else (witnesses[-1] if witnesses else None)
        if witness is not None:
            clamp = min(witness.witness_order, total.order() * entry.value.order())
            witness = ExtensionWitness(clamp, witness.maps_to_generator_of_quotient)
        try:
            total = resolve_extension(entry.value, total, witness)
        except AmbiguousExtension as exc:
            raise AmbiguousExtension(f"stage s = {s}: {exc}", stage=s) from exc
    return total


def assemble_abutment_by_orders(orders_deepest_first: Sequence[int],
                                witness: ExtensionWitness) -> FgAbGroup:
    """Order-chain assembly when only the orders of the quotient stages are
    known.  The deepest stage must have squarefree-determined structure
    (order 1, a prime, or resolved earlier); subsequent stages add known
    orders via `resolve_extension_by_order` with the witness clamped."""
    orders = [n for n in orders_deepest_first if n != 1]
    if not orders:
        return FgAbGroup.zero()
    first = orders[0]
    candidates = [g for g in _groups_of_order(first)]
    if len(candidates) != 1:
        raise AmbiguousExtension(f"deepest stage of order {first} is not unique")
    total = candidates[0]
    for n in orders[1:]:
        clamp = min(witness.witness_order, total.order() * n)
        total = resolve_extension_by_order(
            total, n, ExtensionWitness(clamp, witness.maps_to_generator_of_quotient))
    return total


def _groups_of_order(n: int) -> List[FgAbGroup]:
    from .abelian import abelian_groups_of_order
    return abelian_groups_of_order(n)


# ---------------------------------------------------------------------------
# serialization and charts
# ---------------------------------------------------------------------------


def _entry_value_to_json(v: EntryValue) -> Dict:
    if isinstance(v, FgAbGroup):
        return {"kind": "group", "group": v.to_json()}
    if isinstance(v, CharPRef):
        lo, hi = v.module.window
        return {"kind": "charp", "name": v.name, "p": v.module.p,
                "window": [lo, hi], "laurent": v.module.laurent}
    return {"kind": "sheaf", "sheaf": sheaf_to_json(v)}


def _entry_value_from_json(d: Dict) -> EntryValue:
    if d["kind"] == "group":
        return FgAbGroup.from_json(d["group"])
    if d["kind"] == "charp":
        return CharPRef(d["name"], TruncatedCharPModule(d["p"], tuple(d["window"]), d["laurent"]))
    return sheaf_from_json(d["sheaf"])


def _rule_to_json(rule: DifferentialRule) -> Dict:
    if callable(rule.source):
        raise ValueError("predicate-sourced rules do not serialize")
    out: Dict = {"r": rule.r, "s": rule.source[0], "t": rule.source[1],
                 "kind": rule.kind, "provenance": rule.provenance}
    if rule.kind == "operator":
        out["operator"] = str(rule.operator)
        out["p"] = rule.operator.p
        out["surjective"] = rule.surjective
    if rule.kind == "matrix":
        out["matrix"] = [list(row) for row in rule.hom.matrix]
        out["source_group"] = rule.hom.source.to_json()
        out["target_group"] = rule.hom.target.to_json()
    if rule.kind == "unresolved":
        out["name"] = rule.name
    if rule.relabel:
        out["relabel"] = rule.relabel
    return out


def _rule_from_json(d: Dict) -> DifferentialRule:
    kind = d["kind"]
    hom = operator = None
    if kind == "matrix":
        hom = GroupHom(FgAbGroup.from_json(d["source_group"]),
                       FgAbGroup.from_json(d["target_group"]),
                       tuple(tuple(row) for row in d["matrix"]))
    if kind == "operator":
        operator = parse_operator(d["operator"], d["p"])
    return DifferentialRule(d["r"], (d["s"], d["t"]), kind, hom=hom, operator=operator,
                            surjective=d.get("surjective", False), name=d.get("name", ""),
                            provenance=d["provenance"], relabel=d.get("relabel", ""))


def page_to_json(page: SSPage, rules: Sequence[DifferentialRule] = ()) -> str:
    data = {
        "r": page.r,
        "entries": [{"s": s, "t": t, "entry": _entry_value_to_json(e.value),
                     "label": e.label, "index": e.index, "assumed": list(e.assumed)}
                    for (s, t), e in sorted(page.entries.items())],
        "rules": [_rule_to_json(rule) for rule in rules],
    }
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def page_from_json(text: str) -> Tuple[SSPage, List[DifferentialRule]]:
    data = json.loads(text)
    entries = {}
    for item in data["entries"]:
        entries[(item["s"], item["t"])] = Entry(
            _entry_value_from_json(item["entry"]), label=item.get("label", ""),
            index=item.get("index", 1), assumed=tuple(item.get("assumed", ())))
    rules = [_rule_from_json(d) for d in data.get("rules", [])]
    return SSPage(data["r"], entries), rules


_LEGEND = [
    ("■", "finitely generated abelian group"),
    ("□", "index-two class inside a copy of Z"),
    ("◆", "quasi-coherent sheaf"),
    ("●", "closed-point pushforward"),
    ("▲", "Artin-Schreier kernel sheaf k_*v_!Z/2"),
    ("◇", "R^1j_*G_m"),
    ("✦", "extension of sheaves"),
]


def chart_svg(page: SSPage) -> str:
    """Deterministic SVG chart of a page in the (t-s, s)-plane."""
    if page.entries:
        xs = [t - s for (s, t) in page.entries]
        ys = [s for (s, _) in page.entries]
        x0, x1 = min(xs + [0]), max(xs + [0])
        y0, y1 = min(ys + [0]), max(ys + [0])
    else:
        x0 = y0 = 0
        x1 = y1 = 1
    cell = 90
    pad = 40
    width = (x1 - x0 + 1) * cell + 2 * pad
    height = (y1 - y0 + 1) * cell + 2 * pad + 20 * len(_LEGEND) + 30
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="11">',
        f'<text x="{pad}" y="20">E_{page.r} page ((t-s, s)-plane)</text>',
    ]
    def cx(x):
        return pad + (x - x0) * cell + cell // 2
    def cy(y):
        return pad + (y1 - y) * cell + cell // 2
    for x in range(x0, x1 + 1):
        for y in range(y0, y1 + 1):
            lines.append(f'<rect x="{cx(x) - cell // 2}" y="{cy(y) - cell // 2}" '
                         f'width="{cell}" height="{cell}" fill="none" stroke="#ccc"/>')
    for (s, t), e in sorted(page.entries.items()):
        lines.append(f'<text x="{cx(t - s)}" y="{cy(s)}" text-anchor="middle">'
                     f'{_escape(e.display())}</text>')
    ly = pad + (y1 - y0 + 1) * cell + pad
    lines.append(f'<text x="{pad}" y="{ly}">legend:</text>')
    for i, (glyph, meaning) in enumerate(_LEGEND):
        lines.append(f'<text x="{pad}" y="{ly + 20 * (i + 1)}">{glyph} {_escape(meaning)}</text>')
    lines.append("</svg>")
    return "\n".join(lines)


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
