"""Exact arithmetic of finitely generated abelian groups.

Groups are kept in normal form (free rank plus a dividing chain of
invariant factors), homomorphisms are integer matrices between chosen
generator bases, and every kernel/cokernel/extension question is reduced
to Smith normal form over arbitrary-precision integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import AmbiguousExtension, NoExtension

# ---------------------------------------------------------------------------
# integer matrix helpers
# ---------------------------------------------------------------------------


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> List[List[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = [[0] * cols for _ in range(len(A))]
    for i, row in enumerate(A):
        for k, a in enumerate(row):
            if a == 0:
                continue
            brow = B[k]
            orow = out[i]
            for j in range(cols):
                orow[j] += a * brow[j]
    return out


def _mat_vec(A: Sequence[Sequence[int]], v: Sequence[int]) -> List[int]:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def _transpose(A: Sequence[Sequence[int]]) -> List[List[int]]:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def _columns(A: Sequence[Sequence[int]]) -> List[List[int]]:
    return _transpose(A)


def _from_columns(cols: Sequence[Sequence[int]], nrows: int) -> List[List[int]]:
    if not cols:
        return [[] for _ in range(nrows)]
    return [[col[i] for col in cols] for i in range(nrows)]


def _snf_ext(M: Sequence[Sequence[int]]):
    """Smith normal form with tracked transforms and their inverses.

    Returns (U, D, V, Uinv, Vinv) with U*M*V = D, U and V unimodular,
    and the diagonal of D a nonnegative dividing chain.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    A = [list(row) for row in M]
    U, Uinv = _identity(m), _identity(m)
    V, Vinv = _identity(n), _identity(n)

    def row_swap(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]
        for r in Uinv:
            r[i], r[k] = r[k], r[i]

    def row_add(i, k, q):
        # row i += q * row k
        for j in range(n):
            A[i][j] += q * A[k][j]
        for j in range(m):
            U[i][j] += q * U[k][j]
        for r in Uinv:
            r[k] -= q * r[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    def col_swap(j, k):
        for r in A:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]
        Vinv[j], Vinv[k] = Vinv[k], Vinv[j]

    def col_add(j, k, q):
        # col j += q * col k
        for r in A:
            r[j] += q * r[k]
        for r in V:
            r[j] += q * r[k]
        for i in range(n):
            Vinv[k][i] -= q * Vinv[j][i]

    t = 0
    limit = min(m, n)
    while t < limit:
        # locate a pivot of minimal absolute value in the trailing block
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a != 0 and (best is None or abs(a) < best):
                    best = abs(a)
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        if i0 != t:
            row_swap(t, i0)
        if j0 != t:
            col_swap(t, j0)
        # clear row and column t
        dirty = False
        for i in range(t + 1, m):
            if A[i][t]:
                q = A[i][t] // A[t][t]
                row_add(i, t, -q)
                if A[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if A[t][j]:
                q = A[t][j] // A[t][t]
                col_add(j, t, -q)
                if A[t][j]:
                    dirty = True
        if dirty:
            continue
        # enforce divisibility of the remaining block by the pivot
        d = A[t][t]
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_add(t, offender, 1)
            continue
        if d < 0:
            row_neg(t)
        t += 1

    D = [[A[i][j] if i == j else 0 for j in range(n)] for i in range(m)]
    return U, D, V, Uinv, Vinv


def smith_normal_form(M: Sequence[Sequence[int]]):
    """Return (U, D, V) with U*M*V = D in Smith normal form."""
    U, D, V, _, _ = _snf_ext(M)
    return U, D, V


def _diag(D: Sequence[Sequence[int]]) -> List[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def _kernel_columns(M: Sequence[Sequence[int]], ncols: int) -> List[List[int]]:
    """Basis of the integer kernel lattice of M, as columns of length ncols."""
    if not M or not M[0]:
        return [list(col) for col in _identity(ncols)]
    _, D, V, _, _ = _snf_ext(M)
    diag = _diag(D)
    rank = sum(1 for d in diag if d)
    return [[V[i][j] for i in range(ncols)] for j in range(rank, ncols)]


def _lattice_basis(cols: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    """Reduce a generating set of columns to a lattice basis in Z^n."""
    cols = [c for c in cols if any(c)]
    if not cols:
        return []
    A = _from_columns(cols, n)
    _, D, _, Uinv, _ = _snf_ext(A)
    diag = _diag(D)
    basis = []
    for j, d in enumerate(diag):
        if d:
            basis.append([Uinv[i][j] * d for i in range(n)])
    return basis


def _solve_columns(B_cols: Sequence[Sequence[int]], C_cols: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    """Solve B*X = C column-wise where the columns of B are independent.

    Raises ArithmeticError if some column of C is not in the column lattice.
    """
    r = len(B_cols)
    if r == 0:
        if any(any(c) for c in C_cols):
            raise ArithmeticError("inconsistent lattice containment")
        return [[] for _ in C_cols]
    B = _from_columns(B_cols, n)
    U, D, V, _, _ = _snf_ext(B)
    diag = _diag(D)
    xs = []
    for c in C_cols:
        uc = _mat_vec(U, c)
        y = []
        for j in range(r):
            d = diag[j] if j < len(diag) else 0
            if d == 0:
                if uc[j]:
                    raise ArithmeticError("inconsistent lattice containment")
                y.append(0)
            else:
                if uc[j] % d:
                    raise ArithmeticError("inconsistent lattice containment")
                y.append(uc[j] // d)
        for j in range(r, n):
            if uc[j]:
                raise ArithmeticError("inconsistent lattice containment")
        xs.append(_mat_vec(V, y))
    return xs  # list of columns of X (length r each)


# ---------------------------------------------------------------------------
# groups
# ---------------------------------------------------------------------------


def _factorize(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FgAbGroup:
    """A finitely generated abelian group in invariant-factor normal form."""

    free_rank: int = 0
    invariant_factors: Tuple[int, ...] = ()
    generator_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        facs = tuple(self.invariant_factors)
        for d in facs:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(facs, facs[1:]):
            if b % a:
                raise ValueError("invariant factors must form a dividing chain")
        object.__setattr__(self, "invariant_factors", facs)
        if self.generator_labels is not None:
            labels = tuple(self.generator_labels)
            if len(labels) != self.num_generators:
                raise ValueError("one label per cyclic summand required")
            object.__setattr__(self, "generator_labels", labels)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "FgAbGroup":
        return FgAbGroup(0, ())

    @staticmethod
    def free(n: int) -> "FgAbGroup":
        return FgAbGroup(n, ())

    @staticmethod
    def cyclic(n: int) -> "FgAbGroup":
        if n < 0:
            raise ValueError("cyclic order must be nonnegative")
        if n == 0:
            return FgAbGroup(1, ())
        if n == 1:
            return FgAbGroup(0, ())
        return FgAbGroup(0, (n,))

    @staticmethod
    def from_orders(orders: Iterable[int], labels: Optional[Sequence[str]] = None) -> "FgAbGroup":
        """Normalize a list of cyclic orders (0 meaning Z) to invariant factors."""
        free = 0
        by_prime: dict = {}
        for d in orders:
            if d < 0:
                raise ValueError("orders must be nonnegative")
            if d == 0:
                free += 1
                continue
            for p, e in _factorize(d).items():
                by_prime.setdefault(p, []).append(e)
        width = max((len(v) for v in by_prime.values()), default=0)
        factors = []
        for slot in range(width):
            f = 1
            for p, exps in by_prime.items():
                exps_sorted = sorted(exps, reverse=True)
                if slot < len(exps_sorted):
                    f *= p ** exps_sorted[slot]
            factors.append(f)
        factors = [f for f in factors if f > 1]
        factors.reverse()  # ascending dividing chain
        return FgAbGroup(free, tuple(factors), tuple(labels) if labels else None)

    # -- structure ---------------------------------------------------------

    @property
    def num_generators(self) -> int:
        return self.free_rank + len(self.invariant_factors)

    def generator_orders(self) -> List[int]:
        """Orders of the chosen generators; 0 stands for infinite order."""
        return [0] * self.free_rank + list(self.invariant_factors)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def is_cyclic(self) -> bool:
        return self.num_generators <= 1

    def order(self) -> Optional[int]:
        """Group order, or None for infinite groups."""
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def exponent(self) -> Optional[int]:
        if self.free_rank:
            return None
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def torsion(self, n: int) -> "FgAbGroup":
        """The n-torsion subgroup (free part contributes nothing)."""
        return FgAbGroup.from_orders([gcd(d, n) for d in self.invariant_factors])

    def primary_part(self, p: int) -> "FgAbGroup":
        orders = []
        for d in self.invariant_factors:
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            if q > 1:
                orders.append(q)
        return FgAbGroup(self.free_rank, ()).direct_sum(FgAbGroup.from_orders(orders))

    def direct_sum(self, *others: "FgAbGroup") -> "FgAbGroup":
        orders = self.generator_orders()
        for g in others:
            orders += g.generator_orders()
        return FgAbGroup.from_orders(orders)

    def same_structure(self, other: "FgAbGroup") -> bool:
        return (self.free_rank, self.invariant_factors) == (other.free_rank, other.invariant_factors)

    # -- presentation ------------------------------------------------------

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "factors": list(self.invariant_factors)}

    @staticmethod
    def from_json(obj: dict) -> "FgAbGroup":
        return FgAbGroup(int(obj.get("free_rank", 0)), tuple(int(d) for d in obj.get("factors", ())))


def _reduce_matrix(matrix, target: FgAbGroup):
    orders = target.generator_orders()
    out = []
    for i, row in enumerate(matrix):
        d = orders[i]
        out.append(tuple(x % d if d else x for x in row))
    return tuple(out)


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism of FgAbGroups as an integer matrix on generators.

    The matrix has one row per target generator and one column per source
    generator; entries are reduced modulo the target generator orders.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        nt, ns = self.target.num_generators, self.source.num_generators
        mat = [list(row) for row in self.matrix]
        if len(mat) != nt or any(len(row) != ns for row in mat):
            raise ValueError(f"matrix must be {nt}x{ns}")
        mat = _reduce_matrix(mat, self.target)
        object.__setattr__(self, "matrix", mat)
        # columns must respect source relations
        src_orders = self.source.generator_orders()
        tgt_orders = self.target.generator_orders()
        for j, d in enumerate(src_orders):
            if d == 0:
                continue
            for i, e in enumerate(tgt_orders):
                v = d * self.matrix[i][j]
                if (v % e if e else v) != 0:
                    raise ValueError("matrix does not respect source relations")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_columns(source: FgAbGroup, target: FgAbGroup, cols: Sequence[Sequence[int]]) -> "GroupHom":
        return GroupHom(source, target, tuple(zip(*cols)) if cols else tuple(() for _ in range(target.num_generators)))

    @staticmethod
    def identity(g: FgAbGroup) -> "GroupHom":
        return GroupHom(g, g, tuple(tuple(r) for r in _identity(g.num_generators)))

    @staticmethod
    def zero_map(source: FgAbGroup, target: FgAbGroup) -> "GroupHom":
        return GroupHom(source, target, tuple(tuple(0 for _ in range(source.num_generators)) for _ in range(target.num_generators)))

    @staticmethod
    def scalar(g: FgAbGroup, c: int) -> "GroupHom":
        n = g.num_generators
        return GroupHom(g, g, tuple(tuple(c if i == j else 0 for j in range(n)) for i in range(n)))

    # -- algebra -----------------------------------------------------------

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other."""
        if other.target.num_generators != self.source.num_generators:
            raise ValueError("composition shape mismatch")
        return GroupHom(other.source, self.target, tuple(tuple(r) for r in _mat_mul(self.matrix, other.matrix)))

    def add(self, other: "GroupHom") -> "GroupHom":
        mat = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)]
        return GroupHom(self.source, self.target, tuple(tuple(r) for r in mat))

    def sub(self, other: "GroupHom") -> "GroupHom":
        mat = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)]
        return GroupHom(self.source, self.target, tuple(tuple(r) for r in mat))

    def power(self, k: int) -> "GroupHom":
        out = GroupHom.identity(self.source)
        for _ in range(k):
            out = self.compose(out)
        return out

    def is_zero_hom(self) -> bool:
        return all(all(x == 0 for x in row) for row in self.matrix)

    def equals(self, other: "GroupHom") -> bool:
        return (self.source.same_structure(other.source)
                and self.target.same_structure(other.target)
                and self.matrix == other.matrix)


def _relation_columns(g: FgAbGroup) -> List[List[int]]:
    n = g.num_generators
    cols = []
    for i, d in enumerate(g.generator_orders()):
        if d:
            col = [0] * n
            col[i] = d
            cols.append(col)
    return cols


def _subquotient(l_cols: Sequence[Sequence[int]], r_cols: Sequence[Sequence[int]], n: int):
    """Structure of (lattice spanned by l_cols+r_cols) / (lattice of r_cols).

    Returns (group, generator_vectors) with one ambient column vector in Z^n
    per cyclic summand of the quotient, ordered free-then-torsion.
    """
    basis = _lattice_basis(list(l_cols) + list(r_cols), n)
    r = len(basis)
    if r == 0:
        return FgAbGroup.zero(), []
    rel = [c for c in r_cols if any(c)]
    if rel:
        xcols = _solve_columns(basis, rel, n)
        X = _from_columns(xcols, r)
        _, D, _, U1inv, _ = _snf_ext(X)
        diag = _diag(D)
    else:
        U1inv = _identity(r)
        diag = []
    entries = []
    for j in range(r):
        d = diag[j] if j < len(diag) else 0
        if d == 1:
            continue
        gen = [sum(basis[k][i] * U1inv[k][j] for k in range(r)) for i in range(n)]
        entries.append((d, gen))
    # free summands first, then torsion ascending (SNF already ascending)
    entries.sort(key=lambda e: (e[0] != 0, e[0]))
    orders = [d for d, _ in entries]
    gens = [g for _, g in entries]
    return FgAbGroup.from_orders(orders), gens


def hom_kernel(f: GroupHom):
    """Kernel of f with its inclusion into f.source."""
    ns = f.source.num_generators
    nt = f.target.num_generators
    rt = _relation_columns(f.target)
    if nt == 0:
        k_cols = [list(c) for c in _identity(ns)]
    else:
        A = [list(row) + [c[i] for c in rt] for i, row in enumerate(f.matrix)]
        full = _kernel_columns(A, ns + len(rt))
        k_cols = [c[:ns] for c in full]
    group, gens = _subquotient(k_cols, _relation_columns(f.source), ns)
    incl = GroupHom.from_columns(group, f.source, gens)
    return group, incl


def hom_cokernel(f: GroupHom):
    """Cokernel of f with the projection from f.target."""
    nt = f.target.num_generators
    cols = _columns(f.matrix) + _relation_columns(f.target)
    cols = [c for c in cols if any(c)]
    if nt == 0:
        return FgAbGroup.zero(), GroupHom.zero_map(f.target, FgAbGroup.zero())
    if not cols:
        group = FgAbGroup.from_orders(f.target.generator_orders())
        return group, GroupHom.identity(f.target)
    X = _from_columns(cols, nt)
    U1, D, _, _, _ = _snf_ext(X)
    diag = _diag(D)
    rows = []
    for j in range(nt):
        d = diag[j] if j < len(diag) else 0
        if d == 1:
            continue
        rows.append((d, U1[j]))
    rows.sort(key=lambda e: (e[0] != 0, e[0]))
    orders = [d for d, _ in rows]
    group = FgAbGroup.from_orders(orders)
    proj = GroupHom(f.target, group, tuple(tuple(r) for _, r in rows))
    return group, proj


def homology(f: GroupHom, g: GroupHom) -> FgAbGroup:
    """ker(f)/im(g) for composable maps with f∘g = 0."""
    if not f.compose(g).is_zero_hom():
        raise ValueError("homology requires f∘g = 0")
    mid = f.source
    n = mid.num_generators
    rt = _relation_columns(f.target)
    nt = f.target.num_generators
    if nt == 0:
        k_cols = [list(c) for c in _identity(n)]
    else:
        A = [list(row) + [c[i] for c in rt] for i, row in enumerate(f.matrix)]
        full = _kernel_columns(A, n + len(rt))
        k_cols = [c[:n] for c in full]
    denom = _columns(g.matrix) + _relation_columns(mid)
    group, _ = _subquotient(k_cols, denom, n)
    return group


# ---------------------------------------------------------------------------
# extension resolution by exhaustive enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtensionWitness:
    witness_order: int
    maps_to_generator_of_quotient: bool = False

    def __post_init__(self):
        if self.witness_order < 1:
            raise ValueError("witness order must be positive")


@dataclass(frozen=True)
class ExtensionTrace:
    """Exhaustive search record certifying uniqueness."""

    order: int
    accepted: Tuple[FgAbGroup, ...]
    rejected: Tuple[Tuple[FgAbGroup, str], ...]


def _partitions(k: int):
    if k == 0:
        yield ()
        return
    def rec(k, mx):
        if k == 0:
            yield ()
            return
        for first in range(min(k, mx), 0, -1):
            for rest in rec(k - first, first):
                yield (first,) + rest
    yield from rec(k, k)


def abelian_groups_of_order(n: int) -> List[FgAbGroup]:
    """All abelian groups of order n, deterministically ordered."""
    if n < 1:
        raise ValueError("order must be positive")
    per_prime = []
    for p, e in sorted(_factorize(n).items()):
        per_prime.append([[p ** x for x in part] for part in _partitions(e)])
    out = []
    for combo in itertools.product(*per_prime) if per_prime else [()]:
        orders = [q for block in combo for q in block]
        out.append(FgAbGroup.from_orders(orders))
    out.sort(key=lambda g: g.invariant_factors)
    return out


def _element_order(vec, cyc) -> int:
    out = 1
    for a, c in zip(vec, cyc):
        out = out * (c // gcd(c, a)) // gcd(out, c // gcd(c, a))
    return out


def _closure(h: frozenset, e: tuple, cyc) -> frozenset:
    out = set(h)
    cur = e
    ordr = _element_order(e, cyc)
    for _ in range(ordr - 1):
        for x in h:
            out.add(tuple((a + b) % c for a, b, c in zip(x, cur, cyc)))
        cur = tuple((a + b) % c for a, b, c in zip(cur, e, cyc))
    return frozenset(out)


def _subgroups_of_order(cyc: Sequence[int], k: int) -> List[frozenset]:
    zero = tuple(0 for _ in cyc)
    if k == 1:
        return [frozenset({zero})]
    elements = [e for e in itertools.product(*(range(c) for c in cyc))
                if k % _element_order(e, cyc) == 0]
    seen = {frozenset({zero})}
    frontier = [frozenset({zero})]
    while frontier:
        h = frontier.pop()
        for e in elements:
            if e in h:
                continue
            h2 = _closure(h, e, cyc)
            if k % len(h2) == 0 and h2 not in seen:
                seen.add(h2)
                frontier.append(h2)
    return [h for h in seen if len(h) == k]


def _set_structure(h: frozenset, cyc: Sequence[int]) -> FgAbGroup:
    n = len(cyc)
    rel_cols = []
    for i, c in enumerate(cyc):
        col = [0] * n
        col[i] = c
        rel_cols.append(col)
    group, _ = _subquotient([list(v) for v in sorted(h)], rel_cols, n)
    return group


def _quotient_structure(h: frozenset, cyc: Sequence[int]) -> FgAbGroup:
    n = len(cyc)
    cols = [list(v) for v in sorted(h)]
    for i, c in enumerate(cyc):
        col = [0] * n
        col[i] = c
        cols.append(col)
    cols = [c for c in cols if any(c)]
    if not cols:
        return FgAbGroup.from_orders(cyc)
    X = _from_columns(cols, n)
    _, D, _, _, _ = _snf_ext(X)
    diag = _diag(D)
    orders = [diag[j] if j < len(diag) else 0 for j in range(n)]
    return FgAbGroup.from_orders([d for d in orders if d != 1])


def _coset_order(g: tuple, h: frozenset, cyc: Sequence[int]) -> int:
    cur = g
    k = 1
    while cur not in h:
        cur = tuple((a + b) % c for a, b, c in zip(cur, g, cyc))
        k += 1
    return k


def _candidate_matches(cand: FgAbGroup, sub: FgAbGroup, quot: Optional[FgAbGroup],
                       witness: Optional[ExtensionWitness]) -> Tuple[bool, str]:
    cyc = list(cand.invariant_factors)
    if witness is not None:
        elements = list(itertools.product(*(range(c) for c in cyc))) if cyc else [()]
        orders = {_element_order(e, cyc) for e in elements}
        if witness.witness_order not in orders:
            return False, f"no element of order {witness.witness_order}"
    sub_order = sub.order()
    need_generator = witness is not None and witness.maps_to_generator_of_quotient
    if need_generator and quot is not None and not quot.is_cyclic():
        raise ValueError("generator witness requires a cyclic quotient")
    for h in _subgroups_of_order(cyc, sub_order):
        if not _set_structure(h, cyc).same_structure(sub):
            continue
        if quot is not None and not _quotient_structure(h, cyc).same_structure(quot):
            continue
        if not need_generator:
            return True, "subgroup and quotient matched"
        qorder = (cand.order() // sub_order)
        for e in itertools.product(*(range(c) for c in cyc)):
            if _element_order(e, cyc) == witness.witness_order and _coset_order(e, h, cyc) == qorder:
                return True, "witness maps to a quotient generator"
    return False, "no subgroup with the required quotient"


def _resolve(sub: FgAbGroup, quot: Optional[FgAbGroup], total: int,
             witness: Optional[ExtensionWitness]):
    accepted, rejected = [], []
    for cand in abelian_groups_of_order(total):
        ok, why = _candidate_matches(cand, sub, quot, witness)
        if ok:
            accepted.append(cand)
        else:
            rejected.append((cand, why))
    trace = ExtensionTrace(total, tuple(accepted), tuple(rejected))
    if not accepted:
        raise NoExtension(f"no abelian group of order {total} satisfies the constraints")
    if len(accepted) > 1:
        raise AmbiguousExtension(
            f"{len(accepted)} isomorphism classes satisfy the constraints: "
            + ", ".join(str(g) for g in accepted),
            candidates=accepted)
    return accepted[0], trace


def resolve_extension(sub: FgAbGroup, quot: FgAbGroup,
                      witness: Optional[ExtensionWitness] = None,
                      with_trace: bool = False):
    """The unique finite abelian extension of quot by sub passing the witness test."""
    if not sub.is_finite() or not quot.is_finite():
        raise ValueError("extension resolution requires finite groups")
    total = sub.order() * quot.order()
    if witness is not None and total % witness.witness_order:
        raise NoExtension(f"witness order {witness.witness_order} does not divide {total}")
    group, trace = _resolve(sub, quot, total, witness)
    return (group, trace) if with_trace else group


def resolve_extension_by_order(sub: FgAbGroup, quot_order: int,
                               witness: Optional[ExtensionWitness] = None,
                               with_trace: bool = False):
    """Like resolve_extension but constraining only the order of the quotient."""
    if not sub.is_finite():
        raise ValueError("extension resolution requires finite groups")
    total = sub.order() * quot_order
    group, trace = _resolve(sub, None, total, witness)
    return (group, trace) if with_trace else group
