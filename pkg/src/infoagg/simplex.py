"""Dense two-phase simplex over exact rationals with Bland's rule.

Solves ``max c.x  s.t.  A x <= b,  x >= 0``. Intended for the handful of
variables and constraints the outcome LPs produce; no attempt at sparsity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class LPResult:
    x: list[Fraction]
    value: Fraction


class _Tableau:
    # rows: constraint rows [coeffs..., rhs]; obj: reduced costs row (maximize)
    def __init__(self, rows, basis, obj):
        self.rows = rows
        self.basis = basis
        self.obj = obj

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            self.rows[r] = row = [v / piv for v in row]
        for rr, other in enumerate(self.rows):
            if rr != r and other[c] != 0:
                f = other[c]
                self.rows[rr] = [a - f * b for a, b in zip(other, row)]
        if self.obj[c] != 0:
            f = self.obj[c]
            self.obj = [a - f * b for a, b in zip(self.obj, row)]
        self.basis[r] = c

    def run(self, allowed):
        # obj[j] > 0 means increasing column j improves the objective
        while True:
            entering = next((j for j in allowed if self.obj[j] > 0), None)
            if entering is None:
                return
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                raise Unbounded("objective is unbounded")
            self.pivot(best[1], entering)


def maximize(c, A, b) -> LPResult:
    """Exact optimum of ``max c.x`` subject to ``A x <= b`` and ``x >= 0``."""
    c = [Fraction(v) for v in c]
    n = len(c)
    m = len(A)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("inconsistent LP dimensions")

    # columns: x (n), slacks (m), artificials (one per negative-rhs row)
    neg = [r for r in range(m) if b[r] < 0]
    n_art = len(neg)
    width = n + m + n_art
    rows, basis = [], []
    art_col = {}
    for r in range(m):
        row = A[r] + [Fraction(0)] * (m + n_art) + [b[r]]
        row[n + r] = Fraction(1)
        if b[r] < 0:
            row = [-v for v in row]
            col = n + m + len(art_col)
            art_col[r] = col
            row[col] = Fraction(1)
            basis.append(col)
        else:
            basis.append(n + r)
        rows.append(row)

    tab = _Tableau(rows, basis, [Fraction(0)] * (width + 1))
    if n_art:
        # phase 1: maximize -(sum of artificials)
        obj = [Fraction(0)] * (width + 1)
        for r, col in art_col.items():
            obj = [o + v for o, v in zip(obj, rows[r])]
        for col in art_col.values():
            obj[col] = Fraction(0)
        tab.obj = obj
        tab.run(range(width))
        if tab.obj[-1] != 0:
            raise Infeasible("no point satisfies the constraints")
        # drive any remaining artificial out of the basis
        for r, col in enumerate(tab.basis):
            if col >= n + m:
                swap = next((j for j in range(n + m) if tab.rows[r][j] != 0), None)
                if swap is not None:
                    tab.pivot(r, swap)

    obj = c + [Fraction(0)] * (m + n_art) + [Fraction(0)]
    for r, col in enumerate(tab.basis):
        if obj[col] != 0:
            f = obj[col]
            obj = [o - f * v for o, v in zip(obj, tab.rows[r])]
    tab.obj = obj
    tab.run(range(n + m))

    x = [Fraction(0)] * n
    for r, col in enumerate(tab.basis):
        if col < n:
            x[col] = tab.rows[r][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(x=x, value=value)
