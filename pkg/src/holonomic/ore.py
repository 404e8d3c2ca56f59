"""Noncommutative operator algebras over rational-function coefficients.

An algebra fixes a coefficient variable table and an ordered list of
generators, each either a derivation in a continuous variable or a
forward shift in a discrete one.  Generators commute with each other;
moving a generator past a coefficient applies the usual rewrite
(product rule for derivations, argument shift for shifts).  Operators
keep their coefficients written on the left of the operator monomial.

The monomial order is degree-lexicographic: higher total degree wins,
ties break lexicographically with the earlier-listed generator more
significant.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import AlgebraError
from .polys import Poly, Rat, VariableTable, gcd_many, poly_gcd

DERIVATION = "derivation"
SHIFT = "shift"


class GeneratorSpec:
    """One operator generator: a name, a kind, and the variable acted on."""

    __slots__ = ("name", "kind", "var")

    def __init__(self, name, kind, var):
        if kind not in (DERIVATION, SHIFT):
            raise AlgebraError(f"unknown generator kind {kind!r}")
        self.name = name
        self.kind = kind
        self.var = var

    def __eq__(self, other):
        return (isinstance(other, GeneratorSpec) and self.name == other.name
                and self.kind == other.kind and self.var == other.var)

    def __hash__(self):
        return hash((self.name, self.kind, self.var))

    def __repr__(self):
        return f"GeneratorSpec({self.name}, {self.kind}, {self.var})"


def derivation(name, var):
    return GeneratorSpec(name, DERIVATION, var)


def shift(name, var):
    return GeneratorSpec(name, SHIFT, var)


class OreAlgebra:
    __slots__ = ("table", "gens", "_gen_index")

    def __init__(self, table, gens):
        gens = tuple(gens)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate generator name")
        for g in gens:
            if g.var not in table:
                raise AlgebraError(f"generator {g.name} acts on unknown variable {g.var!r}")
            kind = table.kind(g.var)
            if g.kind == DERIVATION and kind != "continuous":
                raise AlgebraError(f"derivation {g.name} needs a continuous variable")
            if g.kind == SHIFT and kind != "discrete":
                raise AlgebraError(f"shift {g.name} needs a discrete variable")
        self.table = table
        self.gens = gens
        self._gen_index = {g.name: i for i, g in enumerate(gens)}

    def __eq__(self, other):
        return (isinstance(other, OreAlgebra) and self.table == other.table
                and self.gens == other.gens)

    def __hash__(self):
        return hash((self.table, self.gens))

    def __repr__(self):
        gens = ", ".join(g.name for g in self.gens)
        return f"OreAlgebra<{gens}>"

    def __len__(self):
        return len(self.gens)

    def gen_index(self, name):
        try:
            return self._gen_index[name]
        except KeyError:
            raise AlgebraError(f"unknown generator {name!r}") from None

    def gen_names(self):
        return tuple(g.name for g in self.gens)

    def unit_mono(self, name):
        e = [0] * len(self.gens)
        e[self.gen_index(name)] = 1
        return tuple(e)

    def key(self, mono):
        """Sort key implementing the monomial order."""
        return (sum(mono), mono)

    def mono_str(self, mono):
        parts = []
        for g, k in zip(self.gens, mono):
            if k == 1:
                parts.append(g.name)
            elif k > 1:
                parts.append(f"{g.name}^{k}")
        return "*".join(parts)

    # -- element constructors ----------------------------------------

    def zero(self):
        return OrePolynomial(self, {})

    def one(self):
        return OrePolynomial(self, {(0,) * len(self.gens): Rat.one(self.table)})

    def const(self, c):
        c = Rat.const(self.table, c) if isinstance(c, (int, Fraction)) else c
        if isinstance(c, Poly):
            c = Rat.from_poly(c)
        if c.is_zero():
            return self.zero()
        return OrePolynomial(self, {(0,) * len(self.gens): c})

    def coeff_var(self, name):
        return self.const(Rat.var(self.table, name))

    def gen(self, name):
        return OrePolynomial(self, {self.unit_mono(name): Rat.one(self.table)})

    def from_terms(self, terms):
        clean = {}
        for e, c in terms.items():
            if isinstance(c, (int, Fraction)):
                c = Rat.const(self.table, c)
            elif isinstance(c, Poly):
                c = Rat.from_poly(c)
            if not c.is_zero():
                clean[tuple(e)] = c
        return OrePolynomial(self, clean)


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    """Does monomial a divide b?"""
    return all(x <= y for x, y in zip(a, b))


def mono_div(b, a):
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _acc(out, e, c):
    s = out.get(e)
    s = c if s is None else s + c
    if s.is_zero():
        out.pop(e, None)
    else:
        out[e] = s


def _apply_gen_left(algebra, gi, terms):
    """Multiply the generator with index gi from the left onto a term dict."""
    spec = algebra.gens[gi]
    out = {}
    if spec.kind == SHIFT:
        for e, c in terms.items():
            e2 = e[:gi] + (e[gi] + 1,) + e[gi + 1:]
            _acc(out, e2, c.shift(spec.var, 1))
    else:
        for e, c in terms.items():
            e2 = e[:gi] + (e[gi] + 1,) + e[gi + 1:]
            _acc(out, e2, c)
            d = c.derivative(spec.var)
            if not d.is_zero():
                _acc(out, e, d)
    return out


class OrePolynomial:
    """Element of an OreAlgebra: {monomial exponent tuple: Rat coefficient}."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = terms
        self._hash = None

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def order(self):
        """Total degree in the generators (-1 for the zero operator)."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in_gen(self, name):
        if not self.terms:
            return -1
        i = self.algebra.gen_index(name)
        return max(e[i] for e in self.terms)

    def lead(self):
        if not self.terms:
            raise ValueError("zero operator has no leading term")
        e = max(self.terms, key=self.algebra.key)
        return e, self.terms[e]

    def lead_mono(self):
        return self.lead()[0]

    def sorted_terms(self, reverse=True):
        return sorted(self.terms.items(), key=lambda t: self.algebra.key(t[0]),
                      reverse=reverse)

    def __eq__(self, other):
        if not isinstance(other, OrePolynomial):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.algebra, frozenset(self.terms.items())))
            self._hash = h
        return h

    def __neg__(self):
        return OrePolynomial(self.algebra, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Poly, Rat)):
            other = self.algebra.const(other)
        if not isinstance(other, OrePolynomial):
            return NotImplemented
        if self.algebra != other.algebra:
            raise AlgebraError("mixed algebras")
        out = dict(self.terms)
        for e, c in other.terms.items():
            _acc(out, e, c)
        return OrePolynomial(self.algebra, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Poly, Rat)):
            other = self.algebra.const(other)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def scale(self, c):
        """Left multiplication by a coefficient (field element)."""
        if isinstance(c, (int, Fraction)):
            c = Rat.const(self.algebra.table, c)
        elif isinstance(c, Poly):
            c = Rat.from_poly(c)
        if c.is_zero():
            return self.algebra.zero()
        return OrePolynomial(self.algebra,
                             {e: c * v for e, v in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Poly, Rat)):
            return self.scale(other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly, Rat)):
            other = self.algebra.const(other)
        if not isinstance(other, OrePolynomial):
            return NotImplemented
        if self.algebra != other.algebra:
            raise AlgebraError("mixed algebras")
        algebra = self.algebra
        out = {}
        for e1, c1 in self.terms.items():
            cur = other.terms
            for gi, k in enumerate(e1):
                for _ in range(k):
                    cur = _apply_gen_left(algebra, gi, cur)
            for e2, c2 in cur.items():
                _acc(out, e2, c1 * c2)
        return OrePolynomial(algebra, out)

    def lmul_mono(self, mono):
        """Multiply by the operator monomial ``mono`` from the left."""
        if not any(mono):
            return self
        cur = self.terms
        for gi, k in enumerate(mono):
            for _ in range(k):
                cur = _apply_gen_left(self.algebra, gi, cur)
        return OrePolynomial(self.algebra, dict(cur))

    def map_coefficients(self, fn):
        out = {}
        for e, c in self.terms.items():
            c2 = fn(c)
            if not c2.is_zero():
                out[e] = c2
        return OrePolynomial(self.algebra, out)

    def shift_coeff_var(self, var, offset):
        """Shift a coefficient variable: a(v) -> a(v + offset)."""
        return self.map_coefficients(lambda c: c.shift(var, offset))

    def transport(self, new_algebra, gen_rename=None, coeff_rename=None):
        """Move to another algebra by renaming generators/variables.

        Every generator appearing in a monomial must exist (post-rename)
        in the target algebra; coefficients are transported verbatim.
        """
        gen_rename = gen_rename or {}
        width = len(new_algebra.gens)
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * width
            for i, k in enumerate(e):
                if not k:
                    continue
                name = gen_rename.get(self.algebra.gens[i].name,
                                      self.algebra.gens[i].name)
                e2[new_algebra.gen_index(name)] = k
            c2 = c.transport(new_algebra.table, coeff_rename)
            _acc(out, tuple(e2), c2)
        return OrePolynomial(new_algebra, out)

    # -- normalization ------------------------------------------------

    def normalized(self):
        """Primitive integer-coefficient form with a canonical sign.

        Clears denominators, removes common polynomial and integer
        content from the coefficients, and flips the overall sign so the
        leading coefficient's lexicographically leading term is positive.
        """
        if not self.terms:
            return self
        table = self.algebra.table
        den = Poly.const(table, 1)
        for c in self.terms.values():
            if not c.den.is_one():
                g = poly_gcd(den, c.den)
                den = den * c.den.exact_div(g)
        polys = {e: c.num * den.exact_div(c.den) for e, c in self.terms.items()}
        g = gcd_many(polys.values())
        if g is not None and not g.is_one():
            polys = {e: p.exact_div(g) for e, p in polys.items()}
        lead = max(polys, key=self.algebra.key)
        if polys[lead].lex_lead()[1] < 0:
            polys = {e: -p for e, p in polys.items()}
        return OrePolynomial(self.algebra,
                             {e: Rat.from_poly(p) for e, p in polys.items()})

    def monic(self):
        """Divide by the leading coefficient."""
        if not self.terms:
            return self
        _, lc = self.lead()
        inv = lc.inverse()
        return self.map_coefficients(lambda c: c * inv)

    # -- printing -----------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = self.algebra.mono_str(e)
            body, neg = _format_coeff(c, mono)
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self):
        return f"Ore({self})"


def _format_coeff(c, mono):
    """Render coefficient*monomial; returns (body, negated)."""
    if not mono:
        if c.is_polynomial() and len(c.num.terms) > 1:
            return f"({c})", False
        s = str(c)
        if s.startswith("-"):
            return s[1:], True
        return s, False
    if c.is_polynomial():
        p = c.poly()
        if len(p.terms) == 1:
            (e, coef), = p.terms.items()
            neg = coef < 0
            if neg:
                coef = -coef
            factor = str(Poly(p.table, {e: coef}))
            if factor == "1":
                return mono, neg
            return f"{factor}*{mono}", neg
        return f"({p})*{mono}", False
    return f"({c})*{mono}", False
