"""Exact linear algebra over rational-function fields.

Two workhorses: an incremental membership tester used when enumerating
monomials against a growing staircase, and batch kernel/solve routines
used by the telescoping ansatz.  Everything is exact; the batch
routines clear denominators and eliminate fraction-free with per-row
content removal to keep intermediate entries small.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import NoSolution
from .polys import Poly, Rat, gcd_many, poly_gcd

_WORD_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579,
                2147483563, 2147483549, 2147483543, 2147483497)


def _poly_at(poly, point, prime):
    acc = 0
    for e, c in poly.terms.items():
        t = (c.numerator * pow(c.denominator, prime - 2, prime)
             if isinstance(c, Fraction) else c) % prime
        for j, ex in enumerate(e):
            if ex:
                t = t * pow(point[j], ex, prime) % prime
        acc = (acc + t) % prime
    return acc


class _Shadow:
    """Mod-p image of the inserted vectors in echelon form.

    A shadow stays alive only while every inserted vector evaluated
    cleanly and contributed a fresh pivot, i.e. while the specialized
    matrix has full rank.  In an alive shadow a nonzero residual proves
    independence over the function field: a true dependency would have
    finite coefficients at a full-rank specialization.
    """

    __slots__ = ("prime", "point", "rows", "alive")

    def __init__(self, prime, point):
        self.prime = prime
        self.point = point
        self.rows = []  # (pivot_col, normalized residue list)
        self.alive = True

    def _evaluate(self, vec):
        p = self.prime
        out = []
        for a in vec:
            d = _poly_at(a.den, self.point, p)
            if d == 0:
                return None
            out.append(_poly_at(a.num, self.point, p) * pow(d, p - 2, p) % p)
        return out

    def residual(self, vec):
        res = self._evaluate(vec)
        if res is None:
            self.alive = False
            return None
        p = self.prime
        for piv, row in self.rows:
            c = res[piv]
            if c:
                res = [(x - c * y) % p for x, y in zip(res, row)]
        return res

    def insert(self, vec):
        res = self.residual(vec)
        if res is None:
            return
        piv = next((i for i, x in enumerate(res) if x), None)
        if piv is None:
            self.alive = False  # rank dropped at this point; stop trusting it
            return
        inv = pow(res[piv], self.prime - 2, self.prime)
        self.rows.append((piv, [x * inv % self.prime for x in res]))
        self.rows.sort(key=lambda t: t[0])


class IncrementalBasis:
    """Growing vector collection with exact membership queries.

    ``add`` either inserts an independent vector (returns None) or, for a
    dependent one, returns the coefficients expressing it over the
    previously inserted independent vectors, in insertion order.

    Exact elimination over the coefficient field is run only when needed:
    modular shadows of the raw vectors answer the far more common
    "independent" case outright, and a dependency reported by every
    shadow is confirmed — and its coefficients extracted — by one small
    fraction-free solve against the original entries.
    """

    def __init__(self, table, dim):
        self.table = table
        self.dim = dim
        self.size = 0
        self._raw = []
        self._rng = random.Random(0x1BA5E ^ dim)
        self._generation = 0
        self._shadows = []
        self._spawn()

    def _spawn(self):
        """Start a fresh pair of shadows, replaying the stored vectors."""
        while self._generation * 2 < len(_WORD_PRIMES):
            primes = _WORD_PRIMES[self._generation * 2:self._generation * 2 + 2]
            self._generation += 1
            shadows = []
            for p in primes:
                s = _Shadow(p, [self._rng.randrange(1, p)
                                for _ in self.table.names])
                for v in self._raw:
                    if not s.alive:
                        break
                    s.insert(v)
                if s.alive:
                    shadows.append(s)
            if shadows:
                self._shadows = shadows
                return
        self._shadows = []  # out of luck; every query goes the exact way

    def _alive(self):
        shadows = [s for s in self._shadows if s.alive]
        if not shadows and self._generation * 2 < len(_WORD_PRIMES):
            self._spawn()
            shadows = [s for s in self._shadows if s.alive]
        return shadows

    def _exact_dependency(self, vec):
        """Coefficients of vec over the stored vectors, or None."""
        if not self._raw:
            return [] if all(a.is_zero() for a in vec) else None
        rows = [[v[i] for v in self._raw] for i in range(self.dim)]
        try:
            return solve(rows, vec, self.size, self.table)
        except NoSolution:
            return None

    def add(self, vec):
        vec = list(vec)
        if len(vec) != self.dim:
            raise ValueError("vector length mismatch")
        independent = False
        for s in self._alive():
            res = s.residual(vec)
            if res is not None and any(res):
                independent = True
                break
        if not independent:
            lam = self._exact_dependency(vec)
            if lam is not None:
                return lam
        self._raw.append(vec)
        self.size += 1
        for s in self._shadows:
            if s.alive:
                s.insert(vec)
        return None

    def contains(self, vec):
        vec = list(vec)
        if len(vec) != self.dim:
            raise ValueError("vector length mismatch")
        for s in self._alive():
            res = s.residual(vec)
            if res is not None and any(res):
                return False
        return self._exact_dependency(vec) is not None


def _to_poly_rows(rows, table):
    """Clear denominators and contents; returns integer-primitive Poly rows."""
    out = []
    for row in rows:
        rats = []
        for a in row:
            if isinstance(a, Rat):
                rats.append(a)
            elif isinstance(a, Poly):
                rats.append(Rat.from_poly(a))
            else:
                rats.append(Rat.const(table, a))
        den = Poly.const(table, 1)
        for a in rats:
            if not a.is_zero() and not a.den.is_one():
                g = poly_gcd(den, a.den)
                den = den * a.den.exact_div(g)
        polys = [a.num * den.exact_div(a.den) if not a.is_zero() else Poly.zero(table)
                 for a in rats]
        out.append(_strip_content(polys, table))
    return out


def _strip_content(polys, table):
    g = gcd_many(polys)
    if g is None or g.is_one():
        return polys
    return [p.exact_div(g) if not p.is_zero() else p for p in polys]


def _eliminate(rows, ncols, table):
    """Fraction-free forward elimination.

    Pivots take the first row (top to bottom) with a nonzero entry in the
    leftmost unprocessed column.  Returns (echelon_rows, pivot_cols).
    """
    rows = [r for r in rows if any(not p.is_zero() for p in r)]
    echelon = []
    pivot_cols = []
    col = 0
    while col < ncols and rows:
        pr = next((i for i, r in enumerate(rows) if not r[col].is_zero()), None)
        if pr is None:
            col += 1
            continue
        prow = rows.pop(pr)
        a = prow[col]
        new_rows = []
        for r in rows:
            b = r[col]
            if b.is_zero():
                new_rows.append(r)
                continue
            r2 = [a * x - b * y for x, y in zip(r, prow)]
            if any(not p.is_zero() for p in r2):
                new_rows.append(_strip_content(r2, table))
        rows = new_rows
        echelon.append(prow)
        pivot_cols.append(col)
        col += 1
    return echelon, pivot_cols


def nullspace(rows, ncols, table):
    """Basis of the right kernel of a matrix with Rat/Poly/int entries.

    Returns a list of Rat vectors, one per free column, each normalized to
    integer-primitive entries whose first nonzero coordinate is positive.
    """
    prows = _to_poly_rows(rows, table)
    echelon, pivot_cols = _eliminate(prows, ncols, table)
    free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
    basis = []
    for f in free_cols:
        x = [Rat.zero(table)] * ncols
        x[f] = Rat.one(table)
        for i in range(len(echelon) - 1, -1, -1):
            pc = pivot_cols[i]
            if pc > f:
                continue
            row = echelon[i]
            s = Rat.zero(table)
            for c in range(pc + 1, ncols):
                if not row[c].is_zero() and not x[c].is_zero():
                    s = s + Rat.from_poly(row[c]) * x[c]
            x[pc] = -s / Rat.from_poly(row[pc])
        basis.append(_normalize_vector(x, table))
    return basis


def _normalize_vector(x, table):
    den = Poly.const(table, 1)
    for a in x:
        if not a.is_zero() and not a.den.is_one():
            g = poly_gcd(den, a.den)
            den = den * a.den.exact_div(g)
    polys = [a.num * den.exact_div(a.den) if not a.is_zero() else Poly.zero(table)
             for a in x]
    polys = _strip_content(polys, table)
    lead = next((p for p in polys if not p.is_zero()), None)
    if lead is not None and lead.lex_lead()[1] < 0:
        polys = [-p for p in polys]
    return [Rat.from_poly(p) for p in polys]


def solve(rows, rhs, ncols, table):
    """One exact solution of A x = b (free variables set to zero).

    Raises NoSolution if the system is inconsistent.
    """
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    prows = _to_poly_rows(aug, table)
    echelon, pivot_cols = _eliminate(prows, ncols + 1, table)
    if ncols in pivot_cols:
        raise NoSolution("inconsistent linear system")
    x = [Rat.zero(table)] * ncols
    for i in range(len(echelon) - 1, -1, -1):
        pc = pivot_cols[i]
        row = echelon[i]
        s = Rat.from_poly(row[ncols])
        for c in range(pc + 1, ncols):
            if not row[c].is_zero() and not x[c].is_zero():
                s = s - Rat.from_poly(row[c]) * x[c]
        x[pc] = s / Rat.from_poly(row[pc])
    return x


# -- plain Fraction versions (fast numeric probes) --------------------


def frac_eliminate(rows, ncols):
    rows = [list(r) for r in rows if any(r)]
    echelon = []
    pivot_cols = []
    col = 0
    while col < ncols and rows:
        pr = next((i for i, r in enumerate(rows) if r[col]), None)
        if pr is None:
            col += 1
            continue
        prow = rows.pop(pr)
        a = prow[col]
        prow = [x / a for x in prow]
        rows = [r if not r[col] else
                [x - r[col] * y for x, y in zip(r, prow)]
                for r in rows]
        rows = [r for r in rows if any(r)]
        echelon.append(prow)
        pivot_cols.append(col)
        col += 1
    return echelon, pivot_cols


def frac_nullspace(rows, ncols):
    """Kernel basis over plain Fractions; one vector per free column."""
    echelon, pivot_cols = frac_eliminate(rows, ncols)
    free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
    basis = []
    for f in free_cols:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i in range(len(echelon) - 1, -1, -1):
            pc = pivot_cols[i]
            if pc > f:
                continue
            row = echelon[i]
            x[pc] = -sum((row[c] * x[c] for c in range(pc + 1, ncols) if x[c]),
                         Fraction(0))
        basis.append(x)
    return basis
