"""Symbolic étale sheaves on Spec Z, Spec F_p, and the affine j-line.

Cohomology is evaluated by a small rule set backed by a versioned fact table
(data/sheaf_facts.json), never by computing on actual sites:

  R1  closed pushforwards compute on the residue site;
  R2  H^s(Spec F_q; A) = A for s in {0, 1} and 0 above (trivial action);
  R3  H^1 of a constant finite sheaf on Spec Z (or the affine line over it)
      vanishes, stored per modulus in the fact table;
  R4  quasi-coherent sheaves on affines have no higher cohomology;
  R5  the Artin-Schreier kernel sheaf k_*v_!Z/2 has H^0 = 0 and H^1 an
      infinite F_2-space with truncated monomial basis, both via `charp`;
  R6  extensions assemble through the long exact sequence, but only when
      vanishing (or a witness) decides the connecting maps.

Whenever no rule applies the answer is Unknown(reason) — never a guess.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .abelian import ExtensionWitness, FgAbGroup, resolve_extension
from .charp import TruncatedCharPModule, operator_cokernel_basis, operator_kernel, parse_operator
from .errors import AmbiguousExtension, InconsistentPoint, NoFact
from .numbrauer import DivisibleGroupDescriptor


# ---------------------------------------------------------------------------
# sheaf symbols
# ---------------------------------------------------------------------------


class SheafSymbol:
    """Base class of the tagged union; concrete symbols are dataclasses."""


@dataclass(frozen=True)
class Constant(SheafSymbol):
    group: FgAbGroup


@dataclass(frozen=True)
class ClosedPush(SheafSymbol):
    """Pushforward of a constant sheaf from a closed point or closed copy
    of Spec Z; `residue_site` says where the fibre cohomology happens."""

    point: str
    group: FgAbGroup
    residue_site: str  # "SpecF2", "SpecF3", or "SpecZ"


_QC_NAMES = ("O", "O/2", "O/(2,j)", "O/(3,j)", "omega2")


@dataclass(frozen=True)
class QuasiCoherent(SheafSymbol):
    name: str

    def __post_init__(self):
        if self.name not in _QC_NAMES:
            raise ValueError(f"unknown quasi-coherent symbol {self.name!r}")

    @property
    def canonical_name(self) -> str:
        # omega2 is isomorphic to O/2 (square-zero Witt story out of scope)
        return "O/2" if self.name == "omega2" else self.name


@dataclass(frozen=True)
class KStarVShriek(SheafSymbol):
    """k_*v_!Z/2 on the affine j-line in characteristic 2."""


@dataclass(frozen=True)
class R1jGm(SheafSymbol):
    """First derived pushforward of G_m along the coarse map to the j-line."""


@dataclass(frozen=True)
class DirectSum(SheafSymbol):
    summands: Tuple[SheafSymbol, ...]


@dataclass(frozen=True)
class SheafExtension(SheafSymbol):
    sub: SheafSymbol
    quot: SheafSymbol
    nontrivial: bool = False
    witness: Optional[ExtensionWitness] = None


def canonical_r1jgm() -> SheafExtension:
    """R^1j_*G_m presented as an extension of the constant sheaf Z/2 by
    skyscrapers Z/3 at j = 0 and Z/2 at j = 1728 (pushed from Spec Z)."""
    sub = DirectSum((
        ClosedPush("j=0", FgAbGroup.cyclic(3), "SpecZ"),
        ClosedPush("j=1728", FgAbGroup.cyclic(2), "SpecZ"),
    ))
    return SheafExtension(sub, Constant(FgAbGroup.cyclic(2)), nontrivial=True,
                          witness=ExtensionWitness(12, maps_to_generator_of_quotient=True))


# --- JSON (used by spectral-sequence page files) ---------------------------


def sheaf_to_json(f: SheafSymbol) -> Dict:
    if isinstance(f, Constant):
        return {"type": "constant", "group": f.group.to_json()}
    if isinstance(f, ClosedPush):
        return {"type": "closed_push", "point": f.point,
                "group": f.group.to_json(), "residue_site": f.residue_site}
    if isinstance(f, QuasiCoherent):
        return {"type": "quasi_coherent", "name": f.name}
    if isinstance(f, KStarVShriek):
        return {"type": "kstar_vshriek"}
    if isinstance(f, R1jGm):
        return {"type": "r1jgm"}
    if isinstance(f, DirectSum):
        return {"type": "direct_sum", "summands": [sheaf_to_json(g) for g in f.summands]}
    if isinstance(f, SheafExtension):
        out: Dict = {"type": "extension", "sub": sheaf_to_json(f.sub),
                     "quot": sheaf_to_json(f.quot), "nontrivial": f.nontrivial}
        if f.witness is not None:
            out["witness"] = {"order": f.witness.witness_order,
                              "generates_quotient": f.witness.maps_to_generator_of_quotient}
        return out
    raise TypeError(f"not a sheaf symbol: {f!r}")


def sheaf_from_json(data: Dict) -> SheafSymbol:
    t = data["type"]
    if t == "constant":
        return Constant(FgAbGroup.from_json(data["group"]))
    if t == "closed_push":
        return ClosedPush(data["point"], FgAbGroup.from_json(data["group"]),
                          data["residue_site"])
    if t == "quasi_coherent":
        return QuasiCoherent(data["name"])
    if t == "kstar_vshriek":
        return KStarVShriek()
    if t == "r1jgm":
        return R1jGm()
    if t == "direct_sum":
        return DirectSum(tuple(sheaf_from_json(g) for g in data["summands"]))
    if t == "extension":
        w = data.get("witness")
        witness = ExtensionWitness(w["order"], w.get("generates_quotient", False)) if w else None
        return SheafExtension(sheaf_from_json(data["sub"]), sheaf_from_json(data["quot"]),
                              data.get("nontrivial", False), witness)
    raise ValueError(f"unknown sheaf symbol type {t!r}")


def sheaf_display(f: SheafSymbol) -> str:
    if isinstance(f, Constant):
        return str(f.group)
    if isinstance(f, ClosedPush):
        return f"i[{f.point}]_*({f.group})"
    if isinstance(f, QuasiCoherent):
        return f.name
    if isinstance(f, KStarVShriek):
        return "k_*v_!Z/2"
    if isinstance(f, R1jGm):
        return "R1j_*Gm"
    if isinstance(f, DirectSum):
        return " ⊕ ".join(sheaf_display(g) for g in f.summands)
    if isinstance(f, SheafExtension):
        tag = "!" if f.nontrivial else ""
        return f"ext{tag}({sheaf_display(f.sub)}; {sheaf_display(f.quot)})"
    return repr(f)


# ---------------------------------------------------------------------------
# fact table
# ---------------------------------------------------------------------------


_DATA_DIR = Path(__file__).resolve().parent / "data"


def data_dir() -> Path:
    override = os.environ.get("BRAUERKIT_DATA")
    return Path(override) if override else _DATA_DIR


class FactTable:
    """Immutable store of cohomology facts keyed by (sheaf, site, degree)."""

    def __init__(self, entries: List[Dict]):
        self._facts: Dict[Tuple[str, str, int], Dict] = {}
        for e in entries:
            for key in ("sheaf", "site", "degree", "value", "citation"):
                if key not in e:
                    raise ValueError(f"fact entry missing {key!r}: {e}")
            self._facts[(e["sheaf"], e["site"], e["degree"])] = e

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "FactTable":
        path = path or (data_dir() / "sheaf_facts.json")
        with open(path) as fh:
            return cls(json.load(fh))

    def lookup(self, sheaf: str, site: str, degree: int):
        """Group-valued fact, or None if absent."""
        e = self._facts.get((sheaf, site, degree))
        if e is None:
            return None
        v = e["value"]
        if v == 0:
            return FgAbGroup.zero()
        if isinstance(v, dict) and "symbol" not in v:
            return FgAbGroup.from_json(v)
        return v

    def kernel_sheaf(self, operator_text: str, sheaf_name: str) -> SheafSymbol:
        """Sheaf-level kernel of a semilinear operator, from the fact table."""
        e = self._facts.get((f"ker({operator_text} | {sheaf_name})", "A1", 0))
        if e is None:
            raise NoFact(f"no kernel fact for {operator_text} on {sheaf_name}")
        return sheaf_from_json(e["value"]["symbol"])

    def citation(self, sheaf: str, site: str, degree: int) -> str:
        e = self._facts.get((sheaf, site, degree))
        return e["citation"] if e else ""


_DEFAULT_TABLE: Optional[FactTable] = None


def default_fact_table() -> FactTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = FactTable.load()
    return _DEFAULT_TABLE


# ---------------------------------------------------------------------------
# cohomology evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Unknown:
    reason: str
    rule: str = ""


Value = Union[FgAbGroup, DivisibleGroupDescriptor, Unknown]


@dataclass(frozen=True)
class CohomologyAnswer:
    value: Value

    def is_known(self) -> bool:
        return not isinstance(self.value, Unknown)

    def is_zero(self) -> bool:
        return self.is_known() and self.value.is_zero()

    def group(self) -> FgAbGroup:
        if not isinstance(self.value, FgAbGroup):
            raise NoFact(f"answer is not a finite group: {self.value}")
        return self.value


def _sum_values(values: List[Value]) -> Value:
    for v in values:
        if isinstance(v, Unknown):
            return v
    group = FgAbGroup.zero()
    descriptor = DivisibleGroupDescriptor.zero()
    infinite = False
    for v in values:
        if isinstance(v, FgAbGroup):
            group = group.direct_sum(v)
        else:
            descriptor = descriptor.direct_sum(v)
            infinite = True
    if not infinite:
        return group
    return descriptor.direct_sum(DivisibleGroupDescriptor.finite(group))


def cohomology(f: SheafSymbol, s: int, base: str,
               table: Optional[FactTable] = None) -> CohomologyAnswer:
    """H^s(base; F) by the rules R1-R6; Unknown carries the failing rule."""
    if s < 0:
        raise ValueError("degree must be nonnegative")
    table = table or default_fact_table()
    return CohomologyAnswer(_coh(f, s, base, table))


def _coh(f: SheafSymbol, s: int, base: str, table: FactTable) -> Value:
    if isinstance(f, DirectSum):
        return _sum_values([_coh(g, s, base, table) for g in f.summands])
    if isinstance(f, ClosedPush):  # R1
        return _coh(Constant(f.group), s, f.residue_site, table)
    if isinstance(f, Constant):
        return _constant_cohomology(f.group, s, base, table)
    if isinstance(f, QuasiCoherent):  # R4
        if s > 0:
            return FgAbGroup.zero()
        fact = table.lookup(f.canonical_name, base, 0)
        if fact is None:
            return Unknown(f"no global-sections fact for {f.name} on {base}", rule="R4")
        return fact
    if isinstance(f, KStarVShriek):  # R5
        return _kstar_vshriek_cohomology(s)
    if isinstance(f, R1jGm):
        return _coh(canonical_r1jgm(), s, base, table)
    if isinstance(f, SheafExtension):  # R6
        return _extension_cohomology(f, s, base, table)
    raise TypeError(f"not a sheaf symbol: {f!r}")


def _constant_cohomology(group: FgAbGroup, s: int, base: str, table: FactTable) -> Value:
    if base in ("SpecF2", "SpecF3"):  # R2: Galois group Z-hat, trivial action
        if not group.is_finite():
            return Unknown("infinite coefficients over a finite field", rule="R2")
        return group if s in (0, 1) else FgAbGroup.zero()
    if s == 0:  # all shipped sites are connected
        return group
    if base in ("SpecZ", "A1") and s == 1 and group.is_finite():  # R3
        if all(table.lookup(f"Z/{m}", base, 1) is not None
               for m in group.invariant_factors):
            return FgAbGroup.zero()
        return Unknown(f"H^1({base}; {group}) not in the fact table", rule="R3")
    return Unknown(f"no rule for H^{s} of a constant sheaf on {base}",
                   rule="R3" if s == 1 else "R2")


_KSTAR_WINDOW = 32


def _kstar_vshriek_cohomology(s: int) -> Value:
    op = parse_operator("x + j*x^2", 2)
    m = TruncatedCharPModule(2, (0, _KSTAR_WINDOW))
    if s == 0:
        basis, _ = operator_kernel(op, m)
        return FgAbGroup.zero() if not basis else Unknown("unexpected kernel", rule="R5")
    if s == 1:
        degrees = kstar_vshriek_h1_basis(_KSTAR_WINDOW)
        return DivisibleGroupDescriptor(
            infinite_f2=True,
            infinite_f2_basis=", ".join(f"j^{d}" for d in degrees[:4]) + ", …")
    return FgAbGroup.zero()


def kstar_vshriek_h1_basis(window: int) -> List[int]:
    """Certified independent monomial degrees {2k : k >= 1} in H^1.

    The polynomial cokernel of x + jx^2 contains the even monomials; the
    constant class is supported at j = 0 and dies after the extension by
    zero, so the shipped basis starts at j^2.
    """
    op = parse_operator("x + j*x^2", 2)
    basis, prefix = operator_cokernel_basis(op, TruncatedCharPModule(2, (0, window)))
    return [d for d in basis if d >= 1 and d <= prefix]


def _value_zero(v: Value) -> Optional[bool]:
    return None if isinstance(v, Unknown) else v.is_zero()


def _extension_cohomology(f: SheafExtension, s: int, base: str, table: FactTable) -> Value:
    # an extension concentrated at one closed point is the pushforward of the
    # resolved extension of stalks (pushforward along a closed immersion is
    # exact), so compute it on the residue site
    if (isinstance(f.sub, ClosedPush) and isinstance(f.quot, ClosedPush)
            and f.sub.point == f.quot.point
            and f.sub.residue_site == f.quot.residue_site
            and f.witness is not None
            and f.sub.group.is_finite() and f.quot.group.is_finite()):
        try:
            resolved = resolve_extension(f.sub.group, f.quot.group, f.witness)
        except AmbiguousExtension:
            return Unknown("witness does not pin down the stalk extension", rule="R6")
        return _coh(ClosedPush(f.sub.point, resolved, f.sub.residue_site), s, base, table)
    a_s = _coh(f.sub, s, base, table)
    b_s = _coh(f.quot, s, base, table)
    if _value_zero(a_s) and _value_zero(b_s):
        return FgAbGroup.zero()
    b_prev_zero = True if s == 0 else _value_zero(_coh(f.quot, s - 1, base, table))
    a_next_zero = _value_zero(_coh(f.sub, s + 1, base, table))
    if _value_zero(b_s):
        # ... -> H^{s-1}(quot) -> H^s(sub) -> H^s(F) -> 0
        if b_prev_zero:
            return a_s
        return Unknown("connecting map into the sub-term undecided", rule="R6")
    if _value_zero(a_s):
        # 0 -> H^s(F) -> H^s(quot) -> H^{s+1}(sub)
        if a_next_zero:
            return b_s
        return Unknown("connecting map out of the quotient-term undecided", rule="R6")
    if b_prev_zero and a_next_zero:
        if isinstance(a_s, FgAbGroup) and isinstance(b_s, FgAbGroup) \
                and a_s.is_finite() and b_s.is_finite():
            if f.witness is None:
                return Unknown("short exact but no witness to resolve the extension",
                               rule="R6")
            try:
                return resolve_extension(a_s, b_s, f.witness)
            except AmbiguousExtension:
                return Unknown("witness does not pin down the extension", rule="R6")
        return Unknown("short exact with an infinite term", rule="R6")
    return Unknown("long exact sequence does not collapse", rule="R6")


def cohomology_order(f: SheafSymbol, s: int, base: str,
                     table: Optional[FactTable] = None) -> int:
    """Order of H^s even when the group structure stays ambiguous.

    For an extension whose long exact sequence collapses to a short exact
    sequence of finite groups, the order is the product of the outer orders
    regardless of the unresolved extension class.
    """
    table = table or default_fact_table()
    ans = _coh(f, s, base, table)
    if isinstance(ans, FgAbGroup) and ans.is_finite():
        return ans.order()
    if isinstance(f, SheafExtension):
        a_s = _coh(f.sub, s, base, table)
        b_s = _coh(f.quot, s, base, table)
        b_prev_zero = True if s == 0 else _value_zero(_coh(f.quot, s - 1, base, table))
        a_next_zero = _value_zero(_coh(f.sub, s + 1, base, table))
        if b_prev_zero and a_next_zero and isinstance(a_s, FgAbGroup) \
                and isinstance(b_s, FgAbGroup) and a_s.is_finite() and b_s.is_finite():
            return a_s.order() * b_s.order()
    raise NoFact(f"order of H^{s}({base}; {sheaf_display(f)}) is not decided")


# ---------------------------------------------------------------------------
# R^1 j_* G_m
# ---------------------------------------------------------------------------


def r1jgm_stalk(char: int, j_class: str) -> FgAbGroup:
    """Stalk of R^1j_*G_m at a point of the j-line.

    The automorphism group of the fibre is C_2 generically, C_4 at j = 1728,
    C_6 at j = 0 (away from 2 and 3), and gives Z/12 at j = 0 in
    characteristics 2 and 3, where j = 0 and j = 1728 coincide.
    """
    if char < 0 or char == 1:
        raise ValueError("char must be 0 or a prime")
    if j_class not in ("0", "1728", "other"):
        raise ValueError("j_class must be one of '0', '1728', 'other'")
    if j_class == "other":
        return FgAbGroup.cyclic(2)
    if char in (2, 3):
        if j_class == "1728":
            raise InconsistentPoint(
                f"in characteristic {char} the points j = 0 and j = 1728 coincide; "
                "request j_class '0'")
        return FgAbGroup.cyclic(12)
    return FgAbGroup.cyclic(4) if j_class == "1728" else FgAbGroup.cyclic(6)


def r1jgm_global(s: int, site: str = "A1",
                 table: Optional[FactTable] = None) -> FgAbGroup:
    """H^s of R^1j_*G_m on the j-line, or on the site with j and j - 1728
    inverted (which kills both skyscraper subsheaves)."""
    if s not in (0, 1):
        raise ValueError("only degrees 0 and 1 are catalogued")
    if site == "A1":
        ans = cohomology(R1jGm(), s, "A1", table)
        return ans.group()
    if site == "A1-minus-0-1728":
        # the extension restricts to its constant quotient Z/2
        if s != 0:
            raise NoFact("only global sections are catalogued on the punctured line")
        return FgAbGroup.cyclic(2)
    raise ValueError(f"unknown site {site!r}")
