"""Pic(KO_R) and LBr(KO) for étale Z-algebras via C_2 fixed-point spectral
sequences.

The additive sequence has E_2^{s,t} = H^s(C_2; pi_t KU) with pi_t the Bott
classes (trivial action for t ≡ 0 mod 4, sign action for t ≡ 2 mod 4, zero
in odd degrees) and a d_3 pattern that is an isomorphism on the torsion
classes eta^s beta^k with k odd and a surjection with kernel 2Z when s = 0.
The Picard sequence shares that data one degree up, has the universal
Artin-Schreier differential d_3(x) = x + x^2 on R/2 in position (3,3), and
abuts to Pic(KO_R) through a filtration with graded pieces Z/2, units[2],
and (Z/2)^d where d is the number of residue factors of R/2; the suspension
class of order 8 (order 4 when d = 0) resolves all extensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .abelian import ExtensionWitness, FgAbGroup, GroupHom
from .charp import TruncatedCharPModule, operator_kernel, parse_operator
from .cyccoh import group_cohomology, trivial
from .errors import NoFact
from .numbrauer import DivisibleGroupDescriptor
from .sheaftab import ClosedPush, cohomology
from .ssengine import (
    DifferentialRule,
    Entry,
    SSPage,
    assemble_abutment,
    column_filtration,
    turn_page,
)


@dataclass(frozen=True)
class EtaleRingDescriptor:
    """Arithmetic data of an étale Z-algebra R used by the KO drivers."""

    name: str
    units: FgAbGroup
    pic: FgAbGroup
    residue_field_degrees_at_2: Tuple[int, ...]  # R/2 = prod F_{2^m_i}
    h1_z2: FgAbGroup
    h2_gm: FgAbGroup
    connected: bool = True
    inverted_primes: Tuple[int, ...] = ()

    def __post_init__(self):
        if 2 in self.inverted_primes and self.residue_field_degrees_at_2:
            raise ValueError("a ring with 2 inverted has no residue fields at 2")
        object.__setattr__(self, "residue_field_degrees_at_2",
                           tuple(self.residue_field_degrees_at_2))
        object.__setattr__(self, "inverted_primes", tuple(sorted(self.inverted_primes)))

    @property
    def d(self) -> int:
        return len(self.residue_field_degrees_at_2)

    def to_json(self) -> Dict:
        return {
            "name": self.name,
            "units": self.units.to_json(),
            "pic": self.pic.to_json(),
            "residue_field_degrees_at_2": list(self.residue_field_degrees_at_2),
            "h1_z2": self.h1_z2.to_json(),
            "h2_gm": self.h2_gm.to_json(),
            "connected": self.connected,
            "inverted_primes": list(self.inverted_primes),
        }

    @classmethod
    def from_json(cls, data: Dict) -> "EtaleRingDescriptor":
        return cls(
            data["name"],
            FgAbGroup.from_json(data["units"]),
            FgAbGroup.from_json(data["pic"]),
            tuple(data.get("residue_field_degrees_at_2", ())),
            FgAbGroup.from_json(data["h1_z2"]),
            FgAbGroup.from_json(data["h2_gm"]),
            data.get("connected", True),
            tuple(data.get("inverted_primes", ())),
        )


def _g(*orders: int) -> FgAbGroup:
    return FgAbGroup.from_orders(list(orders))


SHIPPED_RINGS: Dict[str, EtaleRingDescriptor] = {
    "Z": EtaleRingDescriptor(
        "Z", units=_g(2), pic=_g(), residue_field_degrees_at_2=(1,),
        h1_z2=_g(2), h2_gm=_g()),
    "Z[w][1/17]": EtaleRingDescriptor(
        "Z[w][1/17]", units=FgAbGroup(1, (6,)), pic=_g(),
        residue_field_degrees_at_2=(1, 1), h1_z2=_g(2, 2), h2_gm=_g(),
        inverted_primes=(17,)),
    "Z[1/2,zeta4]": EtaleRingDescriptor(
        "Z[1/2,zeta4]", units=FgAbGroup(1, (4,)), pic=_g(),
        residue_field_degrees_at_2=(), h1_z2=_g(2), h2_gm=_g(),
        inverted_primes=(2,)),
    "Z[1/3,zeta3]": EtaleRingDescriptor(
        "Z[1/3,zeta3]", units=FgAbGroup(1, (6,)), pic=_g(),
        residue_field_degrees_at_2=(2,), h1_z2=_g(2), h2_gm=_g(),
        inverted_primes=(3,)),
}


# ---------------------------------------------------------------------------
# the additive sequence
# ---------------------------------------------------------------------------


def _bott_power(s: int, t: int) -> Optional[int]:
    """k with eta^s beta^k in position (s, t), or None if no class sits there."""
    if t % 2 or (t - 2 * s) % 4:
        return None
    return (t - 2 * s) // 4


def ku_additive_pages(r: EtaleRingDescriptor, s_max: int = 10,
                      t_range: Tuple[int, int] = (0, 12)) -> List[SSPage]:
    """[E_2, E_3, E_4] of the additive C_2 fixed-point sequence for KO_r.

    Only the rank-one (Z-span) Bott pattern is encoded; étale descriptors
    enter through the Picard driver, not here.
    """
    if not r.connected:
        raise ValueError("additive pages are built componentwise")
    entries: Dict[Tuple[int, int], Entry] = {}
    t_lo, t_hi = t_range
    for t in range(t_lo, t_hi + 1):
        if t % 2:
            continue
        module = trivial(FgAbGroup.free(1)) if t % 4 == 0 \
            else _sign_module()
        for s in range(0, s_max + 1):
            h = group_cohomology(module, s)
            if h.is_zero():
                continue
            k = _bott_power(s, t)
            label = _class_label(s, k)
            entries[(s, t)] = Entry(h, label=label)
    e2 = SSPage(2, entries)
    e3 = turn_page(e2, [])  # d_2 vanishes: no odd rows
    rules = ku_additive_d3_rules(e3)
    e4 = turn_page(e3, rules)
    return [e2, e3, e4]


def _sign_module():
    from .cyccoh import sign
    return sign(FgAbGroup.free(1))


def _class_label(s: int, k: Optional[int]) -> str:
    if k is None:
        return ""
    eta = "" if s == 0 else ("η" if s == 1 else f"η^{s}")
    beta = "" if k == 0 else ("β" if k == 1 else f"β^{k}")
    return (eta + beta) or "1"


def ku_additive_d3_rules(e3: SSPage) -> List[DifferentialRule]:
    """The d_3 pattern: d_3(eta^s beta^k) = k * eta^{s+3} beta^{k-1}.

    Nonzero exactly when k is odd; an isomorphism for s >= 1 and a
    surjection Z -> Z/2 with kernel 2Z (the index-two class) for s = 0.
    Composites vanish automatically because k drops parity.
    """
    rules = []
    for (s, t) in sorted(e3.entries):
        k = _bott_power(s, t)
        if k is None or k % 2 == 0:
            continue
        if s == 0:
            hom = GroupHom(FgAbGroup.free(1), FgAbGroup.cyclic(2), ((1,),))
            relabel = "2□" if k == 1 else f"2β^{k}"
            rules.append(DifferentialRule(
                3, (s, t), "matrix", hom=hom, relabel=relabel,
                provenance="Bott-pattern d3 on beta^k, k odd: surjection with kernel 2Z"))
        else:
            rules.append(DifferentialRule(
                3, (s, t), "iso",
                provenance="Bott-pattern d3 on eta^s beta^k, k odd: isomorphism"))
    return rules


# ---------------------------------------------------------------------------
# the Picard sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PicKOResult:
    group: FgAbGroup
    graded: Tuple[Tuple[int, FgAbGroup], ...]
    sections: FgAbGroup  # H^0(Spec R; pi_0 pic), the column-0 abutment
    witness_order: int
    d3_21: str
    notes: Tuple[str, ...] = ()


def _artin_schreier_kernel_rank_per_factor() -> int:
    """Solutions of x^2 = x in any F_{2^m} are exactly F_2 (one F_2-line),
    certified by the Artin-Schreier kernel computation in degree window 0."""
    op = parse_operator("x + x^2", 2)
    basis, _ = operator_kernel(op, TruncatedCharPModule(2, (0, 0)))
    return len(basis)


def pic_ko(r: EtaleRingDescriptor, d3_21: str = "zero") -> PicKOResult:
    """Pic(KO_r) from the Picard fixed-point sequence.

    Column 0 of the abutment carries gr^0 = Z/2, gr^1 = H^1(C_2; units)
    (trivial action, so the 2-torsion of the units), and gr^3 = (Z/2)^d cut
    out by d_3(x) = x + x^2 on R/2; the suspension class of order 8 (4 when
    d = 0) resolves the extensions, and Pic(R) splits off.  The d3_21 knob
    never reaches column 0, which is asserted rather than assumed.
    """
    if d3_21 not in ("zero", "nonzero", "unknown"):
        raise ValueError("d3_21 must be 'zero', 'nonzero', or 'unknown'")
    if not r.connected:
        raise ValueError("pic_ko handles connected rings; sum components")
    gr0 = FgAbGroup.cyclic(2)
    gr1 = group_cohomology(trivial(r.units), 1)
    rank = sum(_artin_schreier_kernel_rank_per_factor()
               for _ in r.residue_field_degrees_at_2)
    gr3 = FgAbGroup.from_orders([2] * rank)
    graded = [(0, gr0), (1, gr1), (3, gr3)]
    witness_order = 8 if r.d >= 1 else 4
    witness = ExtensionWitness(witness_order, maps_to_generator_of_quotient=True)
    sections = assemble_abutment(
        [(s, Entry(g)) for s, g in graded if not g.is_zero()], [witness])
    notes = []
    if d3_21 == "unknown":
        notes.append("d3_21 left unresolved; column 0 is disjoint from its "
                     "source and target, so the answer is unaffected")
    if r.pic.is_zero():
        total = sections
    elif r.pic.order() % 2:
        total = r.pic.direct_sum(sections)  # odd-order kernel splits off
        notes.append("Pic(R) has odd order and splits off the 2-power part")
    else:
        from .abelian import resolve_extension
        total = resolve_extension(r.pic, sections, ExtensionWitness(witness_order))
    return PicKOResult(total, tuple((s, g) for s, g in graded), sections,
                       witness_order, d3_21, tuple(notes))


# ---------------------------------------------------------------------------
# LBr(KO)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OmniReport:
    """The six-term exact-sequence data H^1(Gm) -> ... -> H^3(Gm) with the
    local Brauer group extracted when the connecting data is decided."""

    terms: Tuple[Tuple[str, Union[FgAbGroup, DivisibleGroupDescriptor]], ...]
    lbr: Optional[FgAbGroup]
    exact: bool
    notes: Tuple[str, ...] = ()


def omni_assemble(h1_gm, h0_pi1, h2_gm, h1_pi1, h3_gm,
                  pic_r_surjects: bool = True, d2: str = "zero",
                  d2_hom: Optional[GroupHom] = None) -> OmniReport:
    """Assemble 0 -> H^2(Gm) -> LBr -> ker(d2: H^1(pi_1) -> H^3(Gm)) -> 0.

    The short exact sequence is only available when the Picard sheaf map is
    surjective; LBr is returned exactly when one outer term vanishes (or the
    coefficients are coprime), otherwise symbolically as the two outer terms.
    """
    terms = (("H1(Gm)", h1_gm), ("H0(pi1)", h0_pi1), ("H2(Gm)", h2_gm),
             ("H1(pi1)", h1_pi1), ("H3(Gm)", h3_gm))
    notes: List[str] = []
    if not pic_r_surjects:
        return OmniReport(terms, None, False,
                          ("Picard sheaf map not surjective; no short exact sequence",))
    if d2 == "zero":
        ker_d2 = h1_pi1
    elif d2 == "matrix":
        if d2_hom is None:
            raise ValueError("d2 = 'matrix' needs d2_hom")
        from .abelian import hom_kernel
        ker_d2, _ = hom_kernel(d2_hom)
    elif d2 == "unknown":
        ker_d2 = h1_pi1
        notes.append("d2 unresolved: kernel bounded above by H1(pi1) (assumed full)")
    else:
        raise ValueError("d2 must be 'zero', 'matrix', or 'unknown'")
    if h2_gm.is_zero():
        return OmniReport(terms, ker_d2, True, tuple(notes))
    if ker_d2.is_zero():
        return OmniReport(terms, h2_gm, True, tuple(notes))
    return OmniReport(terms, None, False,
                      tuple(notes) + ("both outer terms nonzero; extension undecided",))


def lbr_ko() -> OmniReport:
    """LBr(KO) = Z/2: H^2(Spec Z; Gm) = Br(Z) = 0 and the kernel term is
    H^1(Spec Z; i_*Z/2) = H^1(Spec F_2; Z/2) = Z/2 with vanishing d2."""
    zero = FgAbGroup.zero()
    h1_pi1 = cohomology(ClosedPush("(2)", FgAbGroup.cyclic(2), "SpecF2"),
                        1, "SpecZ").group()
    return omni_assemble(h1_gm=zero, h0_pi1=FgAbGroup.cyclic(2), h2_gm=zero,
                         h1_pi1=h1_pi1, h3_gm=zero, pic_r_surjects=True, d2="zero")


@dataclass(frozen=True)
class SplittingReport:
    splits: bool
    faithful: bool
    kills_per_cover: Tuple[Tuple[str, bool], ...]
    partial: bool
    note: str = ""


def lbr_ko_splitting_check(covers: Sequence[EtaleRingDescriptor]) -> SplittingReport:
    """Does the étale cover family kill the nontrivial class of LBr(KO)?

    A cover kills the class when 2 is inverted (the class lives at the prime
    2) or when every residue field of R/2 has even degree over F_2 (the
    class restricts to H^1(F_{2^m}; Z/2) along the degree-m extension, where
    an even-degree field absorbs the nontrivial F_2-torsor).  The family
    must also be faithful: no prime may be inverted by every cover.
    """
    if not covers:
        raise NoFact("splitting check needs at least one cover")
    kills = []
    for r in covers:
        if 2 in r.inverted_primes:
            kills.append((r.name, True))
        elif r.residue_field_degrees_at_2 and \
                all(m % 2 == 0 for m in r.residue_field_degrees_at_2):
            kills.append((r.name, True))
        else:
            kills.append((r.name, False))
    all_kill = all(k for _, k in kills)
    inverted = set(covers[0].inverted_primes)
    for r in covers[1:]:
        inverted &= set(r.inverted_primes)
    faithful = not inverted
    partial = all_kill and not faithful
    note = ""
    if partial:
        note = ("every cover kills the class, but the primes "
                f"{sorted(inverted)} are inverted throughout, so the family "
                "is only faithful away from them")
    return SplittingReport(all_kill and faithful, faithful, tuple(kills), partial, note)
