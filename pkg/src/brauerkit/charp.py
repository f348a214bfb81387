"""Kernels and cokernels of semilinear operators in characteristic 2 and 3.

An operator is a sum of terms c*j^k*x^(p^e) acting on a degree window of
F_p[j] or F_p[j^{±1}].  Everything is additive over F_p, so on coefficient
vectors each term sends the degree-d monomial to c*j^(k + d*p^e); kernels
and cokernels reduce to F_p linear algebra.  A degree-growth (top-Frobenius
dominance) argument certifies when the window already sees the full answer.

The module also computes the Cech cohomology of punctured affine space on
the standard chart cover.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import WindowTooSmall


@dataclass(frozen=True)
class TruncatedCharPModule:
    p: int
    window: Tuple[int, int]
    laurent: bool = False

    def __post_init__(self):
        if self.p not in (2, 3):
            raise ValueError("only characteristics 2 and 3 are supported")
        lo, hi = self.window
        if not (lo <= 0 <= hi):
            raise ValueError("window must contain degree 0")
        if not self.laurent and lo != 0:
            raise ValueError("polynomial modules start at degree 0")
        object.__setattr__(self, "window", (lo, hi))

    def degrees(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def enlarged(self, by: int = 1) -> "TruncatedCharPModule":
        lo, hi = self.window
        return TruncatedCharPModule(self.p, (lo - by if self.laurent else 0, hi + by), self.laurent)


@dataclass(frozen=True)
class SemilinearOperator:
    """x |-> sum of c * j^k * x^(p^e) terms."""

    p: int
    terms: Tuple[Tuple[int, int, int], ...]  # (c, k, e)

    def __post_init__(self):
        merged: Dict[Tuple[int, int], int] = {}
        for c, k, e in self.terms:
            if e < 0:
                raise ValueError("frobenius power must be nonnegative")
            merged[(k, e)] = (merged.get((k, e), 0) + c) % self.p
        terms = tuple(sorted((c, k, e) for (k, e), c in merged.items() if c))
        if not terms:
            raise ValueError("operator must have at least one nonzero term")
        object.__setattr__(self, "terms", terms)

    def __str__(self) -> str:
        parts = []
        for c, k, e in self.terms:
            bits = []
            if c != 1:
                bits.append(str(c))
            if k:
                bits.append("j" if k == 1 else f"j^{k}")
            bits.append("x" if e == 0 else f"x^{self.p ** e}")
            parts.append("*".join(bits))
        return " + ".join(parts)


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?(?:j(?:\^(-?\d+))?\*?)?([a-ik-z])(?:\^(\d+))?$")


def parse_operator(text: str, p: int) -> SemilinearOperator:
    """Parse strings like "x + j*x^2" or "x - x^3" into an operator."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty operator")
    # split into signed terms; a '-' directly after '^' is a negative exponent
    chunks = []
    cur = ""
    for i, ch in enumerate(s):
        if ch in "+-" and cur and not cur.endswith("^"):
            chunks.append(cur)
            cur = ch if ch == "-" else ""
        else:
            cur += ch
    if cur:
        chunks.append(cur)
    terms = []
    for chunk in chunks:
        sign = 1
        if chunk[0] == "+":
            chunk = chunk[1:]
        elif chunk[0] == "-":
            sign = -1
            chunk = chunk[1:]
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError(f"cannot parse operator term {chunk!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        k = int(m.group(2)) if m.group(2) else (1 if "j" in chunk else 0)
        power = int(m.group(4)) if m.group(4) else 1
        e = 0
        while power > 1:
            if power % p:
                raise ValueError(f"exponent {power} is not a power of {p}")
            power //= p
            e += 1
        terms.append(((sign * coeff) % p, k, e))
    return SemilinearOperator(p, tuple(terms))


# ---------------------------------------------------------------------------
# F_p linear algebra on degree-indexed vectors
# ---------------------------------------------------------------------------


def _operator_matrix(op: SemilinearOperator, degrees: Sequence[int]):
    """Columns indexed by input degrees, rows by every reachable output degree."""
    out_degrees = sorted({k + d * op.p ** e for d in degrees for _, k, e in op.terms})
    row_of = {d: i for i, d in enumerate(out_degrees)}
    cols = []
    for d in degrees:
        col = [0] * len(out_degrees)
        for c, k, e in op.terms:
            col[row_of[k + d * op.p ** e]] = (col[row_of[k + d * op.p ** e]] + c) % op.p
        cols.append(col)
    return cols, out_degrees


def _kernel_basis_fp(cols: List[List[int]], p: int) -> List[List[int]]:
    """Kernel of the matrix with the given columns, canonical RREF basis."""
    ncols = len(cols)
    if ncols == 0:
        return []
    nrows = len(cols[0])
    rows = [[cols[j][i] for j in range(ncols)] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        sel = next((i for i in range(r, nrows) if rows[i][c] % p), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-rows[i][fcol]) % p
        basis.append(v)
    return basis


def _dominance_region(op: SemilinearOperator) -> Optional[Tuple[Optional[int], Optional[int]]]:
    """Degree interval that can support kernel elements.

    Returns (lo, hi) where lo may be None (unbounded below, impossible here)
    and hi likewise; returns an empty marker (1, 0) style via hi < lo when the
    operator is plainly injective (a single Frobenius level).
    """
    p = op.p
    e_star = max(e for _, _, e in op.terms)
    lower_terms = [(c, k, e) for c, k, e in op.terms if e < e_star]
    if not lower_terms:
        return (1, 0)  # injective: j^k-multiple of a Frobenius twist
    k_top = max(k for _, k, e in op.terms if e == e_star)
    k_bot = min(k for _, k, e in op.terms if e == e_star)
    his, los = [], []
    for _, k, e in lower_terms:
        delta = p ** e_star - p ** e
        his.append((k - k_top) // delta)  # floor: largest non-dominated top degree
        los.append(-((k_bot - k) // delta))  # ceil((k - k_bot)/delta): smallest non-dominated bottom degree
    return (min(los), max(his))


def operator_kernel(op: SemilinearOperator, m: TruncatedCharPModule):
    """(basis, stabilized): F_p-basis of the certified kernel on the window.

    Basis elements are lists of (degree, coefficient) pairs, increasing degree.
    Raises WindowTooSmall if the degree-growth analysis cannot confine all
    kernel elements to the window.
    """
    if op.p != m.p:
        raise ValueError("operator and module characteristics differ")
    lo, hi = m.window
    region = _dominance_region(op)
    rlo, rhi = region
    if not m.laurent:
        rlo = max(rlo, 0)
    if rlo <= rhi:  # nonempty support region must fit in the window
        if rlo < lo or rhi > hi:
            raise WindowTooSmall(
                f"kernel support region [{rlo},{rhi}] exceeds window [{lo},{hi}]")
    degrees = list(m.degrees())
    cols, _ = _operator_matrix(op, degrees)
    basis_vecs = _kernel_basis_fp(cols, op.p)
    basis = []
    for v in basis_vecs:
        poly = [(degrees[i], coef) for i, coef in enumerate(v) if coef]
        basis.append(tuple(sorted(poly)))
    basis.sort()
    return basis, True


def operator_cokernel_basis(op: SemilinearOperator, m: TruncatedCharPModule):
    """(monomial degrees, stable_prefix_degree) for coker(op) by row reduction.

    The returned degrees represent a basis of the cokernel in degrees up to
    the stable prefix, certified unchanged under window enlargement.
    """
    if op.p != m.p:
        raise ValueError("operator and module characteristics differ")
    lo, hi = m.window
    region = _dominance_region(op)
    rlo, rhi = region
    if not m.laurent:
        rlo = max(rlo, 0)
    if rlo <= rhi and (rlo < lo or rhi > hi):
        raise WindowTooSmall(
            f"support region [{rlo},{rhi}] exceeds window [{lo},{hi}]")
    p = op.p
    # a window-(hi+1) input can reach down to this output degree; below it the
    # image, hence the cokernel, can no longer change
    prefix = min(k + (hi + 1) * p ** e for _, k, e in op.terms) - 1
    if m.laurent:
        low_cut = max(k + (lo - 1) * p ** e for _, k, e in op.terms) + 1
    else:
        low_cut = 0
    if prefix < low_cut:
        raise WindowTooSmall("no certified cokernel prefix for this window")
    degrees = list(m.degrees())
    cols, out_degrees = _operator_matrix(op, degrees)
    # column echelon with pivots at the highest-degree entry of each column
    work = [list(c) for c in cols]
    pivot_rows = set()
    for _ in range(len(work)):
        # pick the unused column whose top nonzero entry has the largest degree
        best = None
        for idx, col in enumerate(work):
            top = next((i for i in range(len(col) - 1, -1, -1) if col[i] % p), None)
            if top is None:
                continue
            if top in pivot_rows:
                continue
            if best is None or top > best[1]:
                best = (idx, top)
        if best is None:
            break
        idx, top = best
        inv = pow(work[idx][top], -1, p)
        work[idx] = [(x * inv) % p for x in work[idx]]
        for jdx, col in enumerate(work):
            if jdx != idx and col[top] % p:
                f = col[top]
                work[jdx] = [(a - f * b) % p for a, b in zip(col, work[idx])]
        pivot_rows.add(top)
    pivot_degrees = {out_degrees[i] for i in pivot_rows}
    basis = [d for d in range(low_cut, prefix + 1) if d not in pivot_degrees]
    return basis, prefix


# ---------------------------------------------------------------------------
# punctured affine space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PuncturedAffineCohomology:
    n_vars: int
    window: int
    degree: int  # cohomological degree n-1
    basis: Tuple[Tuple[int, ...], ...]
    affine: bool = False
    note: str = ""


def punctured_affine_cohomology(n_vars: int, window: int) -> PuncturedAffineCohomology:
    """Monomial basis of H^{n-1}(A^n \\ 0; O) down to total degree -window.

    For n >= 2 these are exactly the monomials with every exponent <= -1;
    A^1 \\ 0 is affine and has no higher cohomology.
    """
    if n_vars < 1:
        raise ValueError("need at least one variable")
    if window < n_vars:
        raise ValueError("window must be at least the number of variables")
    if n_vars == 1:
        return PuncturedAffineCohomology(
            1, window, 0, (), affine=True,
            note="A^1 minus 0 is affine with coordinate ring F[x^{±1}]; only H^0 is nonzero")
    basis = []
    for total in range(n_vars, window + 1):
        # exponent vectors a with a_i <= -1 and sum = -total
        for extra in _compositions(total - n_vars, n_vars):
            basis.append(tuple(-(1 + x) for x in extra))
    basis_sorted = tuple(sorted(basis, key=lambda a: (-sum(a), a)))
    return PuncturedAffineCohomology(n_vars, window, n_vars - 1, basis_sorted)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
