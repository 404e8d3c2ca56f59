"""Left Groebner bases for operator ideals.

Reduction and completion work over the rational-function coefficient
field, so normal forms are exact.  The only subtlety versus the
commutative case is that multiplying a basis element by an operator
monomial twists its leading coefficient by the shift part of the
monomial; nothing else about Buchberger's procedure changes.  Pair
criteria that rely on commutativity (coprime leading monomials) are not
valid here and are not used.
"""

from __future__ import annotations

import itertools

from .errors import AlgebraError, NotDFiniteError
from .ore import (OreAlgebra, OrePolynomial, mono_div, mono_divides, mono_lcm,
                  mono_mul)

DEGREE_CAP = 20


def _prep(basis):
    """[(lead_mono, op)] sorted ascending by leading monomial."""
    out = []
    for g in basis:
        if g.is_zero():
            continue
        out.append((g.lead_mono(), g))
    if not out:
        return out
    alg = out[0][1].algebra
    out.sort(key=lambda t: alg.key(t[0]))
    return out


def left_reduce(op, basis):
    """Total normal form of ``op`` modulo a list of operators.

    Every term of the result is divisible by no leading monomial of the
    basis.  Reduction always uses the first eligible basis element in
    ascending lead order, so the result is deterministic; over a
    coefficient field it is the exact normal form.
    """
    prepped = basis if isinstance(basis, list) and basis and isinstance(basis[0], tuple) \
        else _prep(basis)
    if not prepped:
        return op
    algebra = op.algebra
    rem = op
    tail = {}
    while rem.terms:
        e, c = rem.lead()
        hit = None
        for lead, g in prepped:
            if mono_divides(lead, e):
                hit = (lead, g)
                break
        if hit is None:
            tail[e] = c
            rem = OrePolynomial(algebra, {k: v for k, v in rem.terms.items() if k != e})
            continue
        lead, g = hit
        m = mono_div(e, lead)
        shifted = g.lmul_mono(m) if any(m) else g
        factor = c / shifted.terms[e]
        rem = rem - shifted.scale(factor)
    return OrePolynomial(algebra, tail)


def spoly(f, g):
    ef, cf = f.lead()
    eg, cg = g.lead()
    L = mono_lcm(ef, eg)
    F = f.lmul_mono(mono_div(L, ef))
    G = g.lmul_mono(mono_div(L, eg))
    return F - G.scale(F.terms[L] / G.terms[L])


def buchberger_left(gens, degree_cap=DEGREE_CAP):
    """Complete a generating set to a reduced left Groebner basis."""
    basis = [g for g in gens if not g.is_zero()]
    if not basis:
        return []
    algebra = basis[0].algebra
    pairs = {(i, j) for i, j in itertools.combinations(range(len(basis)), 2)}
    while pairs:
        i, j = min(pairs, key=lambda ij: algebra.key(
            mono_lcm(basis[ij[0]].lead_mono(), basis[ij[1]].lead_mono())))
        pairs.discard((i, j))
        s = spoly(basis[i], basis[j])
        r = left_reduce(s, basis)
        if r.is_zero():
            continue
        if r.order() > degree_cap:
            raise AlgebraError(
                f"basis completion exceeded operator order {degree_cap}")
        k = len(basis)
        basis.append(r)
        pairs.update((t, k) for t in range(k))
    return interreduce(basis)


def interreduce(basis):
    """Reduce every element modulo the others; returns the reduced basis,
    normalized and sorted ascending by leading monomial."""
    basis = [g for g in basis if not g.is_zero()]
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            g = basis[i]
            if g is None:
                continue
            others = [h for j, h in enumerate(basis) if j != i and h is not None]
            r = left_reduce(g, others)
            if r.is_zero():
                basis[i] = None
                changed = True
            elif r.terms != g.terms:
                basis[i] = r
                changed = True
    out = [g.normalized() for g in basis if g is not None]
    out.sort(key=lambda g: g.algebra.key(g.lead_mono()))
    return out


def staircase(basis):
    """Monomials below the stairs of a Groebner basis, sorted ascending.

    These monomials form a basis of the quotient by the left ideal.
    Raises NotDFiniteError when the quotient is infinite-dimensional,
    i.e. when some generator has no pure power among the leading
    monomials.
    """
    if not basis:
        raise NotDFiniteError("empty basis generates the zero ideal")
    algebra = basis[0].algebra
    leads = [g.lead_mono() for g in basis]
    if any(not any(e) for e in leads):
        return ()  # a unit in the ideal: only the zero solution
    ngens = len(algebra.gens)
    caps = []
    for i in range(ngens):
        cap = None
        for e in leads:
            if e[i] and all(x == 0 for j, x in enumerate(e) if j != i):
                k = e[i]
                cap = k if cap is None else min(cap, k)
        if cap is None:
            raise NotDFiniteError(
                f"no pure power of {algebra.gens[i].name} among the leading "
                "monomials; the quotient has infinite rank")
        caps.append(cap)
    cells = []
    for mono in itertools.product(*(range(c + 1) for c in caps)):
        if any(mono_divides(lead, mono) for lead in leads):
            continue
        cells.append(mono)
    cells.sort(key=algebra.key)
    return tuple(cells)


class AnnihilatingIdeal:
    """A left ideal held as a reduced Groebner basis with a finite
    staircase; the staircase monomials index the solution-space
    coordinates used by the closure constructions."""

    __slots__ = ("algebra", "basis", "_staircase")

    def __init__(self, algebra, basis, _trusted=False):
        if not _trusted:
            basis = buchberger_left(list(basis))
        else:
            basis = list(basis)
        self.algebra = algebra
        self.basis = tuple(basis)
        self._staircase = None

    @classmethod
    def from_generators(cls, algebra, gens, degree_cap=DEGREE_CAP):
        basis = buchberger_left(list(gens), degree_cap=degree_cap)
        return cls(algebra, basis, _trusted=True)

    @classmethod
    def from_groebner(cls, algebra, basis):
        """Wrap an already reduced Groebner basis (normalized, ascending)."""
        return cls(algebra, basis, _trusted=True)

    def staircase(self):
        if self._staircase is None:
            self._staircase = staircase(list(self.basis))
        return self._staircase

    def rank(self):
        return len(self.staircase())

    def leads(self):
        return tuple(g.lead_mono() for g in self.basis)

    def normal_form(self, op):
        return left_reduce(op, list(self.basis))

    def contains(self, op):
        return self.normal_form(op).is_zero()

    def contains_ideal(self, other):
        return all(self.contains(g) for g in other.basis)

    def __eq__(self, other):
        if not isinstance(other, AnnihilatingIdeal):
            return NotImplemented
        return self.algebra == other.algebra and self.basis == other.basis

    def __hash__(self):
        return hash((self.algebra, self.basis))

    def __repr__(self):
        return (f"AnnihilatingIdeal(rank={self.rank()}, "
                f"basis={len(self.basis)} operators)")

    def __str__(self):
        return "\n".join(str(g) for g in self.basis)
