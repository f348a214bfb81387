"""Cohomology of cyclic groups via the standard 2-periodic resolution.

For a C_n-module M with generator acting by sigma, the complex
    M --(sigma-1)--> M --N--> M --(sigma-1)--> ...
with N = 1 + sigma + ... + sigma^{n-1} computes H^s(C_n; M).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .abelian import FgAbGroup, GroupHom, hom_kernel, homology
from .errors import NotAnAction


@dataclass(frozen=True)
class CyclicModule:
    group: FgAbGroup
    sigma: GroupHom
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise NotAnAction("the acting group must have positive order")
        if not (self.sigma.source.same_structure(self.group)
                and self.sigma.target.same_structure(self.group)):
            raise NotAnAction("sigma must be an endomorphism of the module")
        if not self.sigma.power(self.n).equals(GroupHom.identity(self.group)):
            raise NotAnAction(f"sigma^{self.n} is not the identity")


def trivial(group: FgAbGroup, n: int = 2) -> CyclicModule:
    """The module with trivial C_n-action."""
    return CyclicModule(group, GroupHom.identity(group), n)


def sign(group: FgAbGroup, n: int = 2) -> CyclicModule:
    """The module where the generator acts by -1 (n must be even or the
    action trivial on 2-torsion for this to define an action)."""
    return CyclicModule(group, GroupHom.scalar(group, -1), n)


def _norm(m: CyclicModule) -> GroupHom:
    total = GroupHom.zero_map(m.group, m.group)
    power = GroupHom.identity(m.group)
    for _ in range(m.n):
        total = total.add(power)
        power = m.sigma.compose(power)
    return total


def group_cohomology(m: CyclicModule, s: int) -> FgAbGroup:
    """H^s(C_n; M) from the 2-periodic resolution."""
    if s < 0:
        raise ValueError("cohomological degree must be nonnegative")
    sm1 = m.sigma.sub(GroupHom.identity(m.group))
    if s == 0:
        ker, _ = hom_kernel(sm1)
        return ker
    nm = _norm(m)
    if s % 2:  # odd: ker(N)/im(sigma-1)
        return homology(nm, sm1)
    return homology(sm1, nm)  # even >= 2: ker(sigma-1)/im(N)


def cohomology_row(m: CyclicModule, s_max: int) -> List[FgAbGroup]:
    """[H^0, ..., H^{s_max}]; entries for s >= 1 are 2-periodic."""
    if s_max < 0:
        raise ValueError("s_max must be nonnegative")
    out = [group_cohomology(m, s) for s in range(min(s_max, 2) + 1)]
    while len(out) < s_max + 1:
        out.append(out[-2])
    return out
