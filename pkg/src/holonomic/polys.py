"""Exact coefficient arithmetic.

Sparse multivariate polynomials over Q and canonical rational functions,
both tied to a fixed :class:`VariableTable`.  Monomials are exponent
tuples indexed by table position.  Two monomial orders are used
throughout: lexicographic (sign normalization) and degree-lexicographic
(printing, commutative reduction); in both, the variable listed first in
the table is the most significant.
"""

from __future__ import annotations

import random
from fractions import Fraction
from heapq import heapify, heappop, heappush
from math import gcd as _igcd
from operator import add as _tadd

from .errors import DivisionError, PoleError

CONTINUOUS = "continuous"
DISCRETE = "discrete"
PARAMETER = "parameter"
_KINDS = (CONTINUOUS, DISCRETE, PARAMETER)


class VariableTable:
    """Ordered list of named variables with kinds.

    The order is fixed at construction and never changes; it defines
    monomial significance (position 0 is most significant), printing
    order, and the sign normalization of leading coefficients.
    """

    __slots__ = ("names", "kinds", "_index")

    def __init__(self, names, kinds):
        names = tuple(names)
        kinds = tuple(kinds)
        if len(names) != len(kinds):
            raise ValueError("names and kinds differ in length")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable name")
        for k in kinds:
            if k not in _KINDS:
                raise ValueError(f"unknown kind {k!r}")
        self.names = names
        self.kinds = kinds
        self._index = {n: i for i, n in enumerate(names)}

    @classmethod
    def make(cls, **kind_by_name):
        return cls(tuple(kind_by_name), tuple(kind_by_name.values()))

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def kind(self, name):
        return self.kinds[self.index(name)]

    def __eq__(self, other):
        return (isinstance(other, VariableTable)
                and self.names == other.names and self.kinds == other.kinds)

    def __hash__(self):
        return hash((self.names, self.kinds))

    def __repr__(self):
        inner = ", ".join(f"{n}:{k[0]}" for n, k in zip(self.names, self.kinds))
        return f"VariableTable({inner})"

    def without(self, *drop):
        """New table with the given names removed."""
        keep = [(n, k) for n, k in zip(self.names, self.kinds) if n not in drop]
        return VariableTable([n for n, _ in keep], [k for _, k in keep])

    def extended(self, names, kinds):
        return VariableTable(self.names + tuple(names), self.kinds + tuple(kinds))


def _deglex_key(expt):
    return (sum(expt), expt)


def _normalize_coeff(c):
    # canonical representation: integral values are plain ints
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Poly:
    """Sparse multivariate polynomial over Q.

    ``terms`` maps exponent tuples (one slot per table variable) to
    nonzero rational coefficients; integral coefficients are stored as
    plain ints so equal values have identical representations.
    """

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table, terms):
        self.table = table
        self.terms = terms
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def make(cls, table, terms):
        """Build from a possibly messy {expt: coeff} mapping."""
        clean = {}
        for e, c in terms.items():
            c = _normalize_coeff(c)
            if c:
                clean[tuple(e)] = c
        return cls(table, clean)

    @classmethod
    def zero(cls, table):
        return cls(table, {})

    @classmethod
    def const(cls, table, c):
        c = _normalize_coeff(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
        if not c:
            return cls(table, {})
        return cls(table, {(0,) * len(table): c})

    @classmethod
    def var(cls, table, name, power=1):
        e = [0] * len(table)
        e[table.index(name)] = power
        return cls(table, {tuple(e): 1})

    # -- predicates / queries ----------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def constant_value(self):
        if not self.terms:
            return 0
        (e, c), = self.terms.items()
        if any(e):
            raise ValueError("not a constant")
        return c

    def is_one(self):
        return self.is_constant() and not self.is_zero() and self.constant_value() == 1

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name):
        if not self.terms:
            return -1
        i = self.table.index(name)
        return max(e[i] for e in self.terms)

    def uses(self, name):
        i = self.table.index(name)
        return any(e[i] for e in self.terms)

    def used_indices(self):
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return used

    def lex_lead(self):
        """(exponent, coeff) of the lexicographically greatest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    def deglex_lead(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_deglex_key)
        return e, self.terms[e]

    # -- arithmetic ---------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.table, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.table, frozenset(self.terms.items())))
            self._hash = h
        return h

    def __neg__(self):
        return Poly(self.table, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.table, other)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.table != other.table:
            raise ValueError("mixed variable tables")
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = _normalize_coeff(out.get(e, 0) + c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly(self.table, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.table, other)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _normalize_coeff(other)
            if not other:
                return Poly.zero(self.table)
            if other == 1:
                return self
            return Poly(self.table,
                        {e: _normalize_coeff(c * other) for e, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        if self.table != other.table:
            raise ValueError("mixed variable tables")
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        get = out.get
        if all(type(c) is int for c in a.values()) and \
                all(type(c) is int for c in b.values()):
            # pure integer arithmetic; no coefficient normalization needed
            for ea, ca in a.items():
                for eb, cb in b.items():
                    e = tuple(map(_tadd, ea, eb))
                    s = get(e, 0) + ca * cb
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
            return Poly(self.table, out)
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(map(_tadd, ea, eb))
                s = _normalize_coeff(get(e, 0) + ca * cb)
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.table, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def exact_div(self, d):
        """Exact quotient self/d; raises DivisionError if not divisible."""
        if isinstance(d, (int, Fraction)):
            if not d:
                raise DivisionError("division by zero")
            return Poly(self.table,
                        {e: _normalize_coeff(Fraction(c) / d) for e, c in self.terms.items()})
        if d.is_zero():
            raise DivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        if d.is_constant():
            return self.exact_div(d.constant_value())
        rem = dict(self.terms)
        ed, cd = d.deglex_lead()
        dterms = d.terms
        qterms = {}
        # lazy-deletion heap keeps lead extraction cheap; subtraction tails
        # only ever push monomials below the current lead, so pops come out
        # in strictly decreasing deglex order
        heap = [(-sum(e), tuple(-x for x in e), e) for e in rem]
        heapify(heap)
        while heap:
            e = heappop(heap)[2]
            c = rem.get(e)
            if c is None:
                continue
            eq = tuple(x - y for x, y in zip(e, ed))
            if any(x < 0 for x in eq):
                raise DivisionError("not exactly divisible")
            if type(c) is int and type(cd) is int:
                q, rm = divmod(c, cd)
                cq = q if not rm else Fraction(c, cd)
            else:
                cq = _normalize_coeff(Fraction(c, 1) / cd)
            qterms[eq] = cq
            for et, ct in dterms.items():
                ee = tuple(map(_tadd, eq, et))
                old = rem.get(ee)
                s = (0 if old is None else old) - cq * ct
                if type(s) is not int:
                    s = _normalize_coeff(s)
                if s:
                    if old is None:
                        heappush(heap, (-sum(ee), tuple(-x for x in ee), ee))
                    rem[ee] = s
                else:
                    rem.pop(ee, None)
        if rem:
            raise DivisionError("not exactly divisible")
        return Poly(self.table, qterms)

    def divides(self, other):
        try:
            other.exact_div(self)
            return True
        except DivisionError:
            return False

    # -- content / normalization -------------------------------------

    def content_primitive(self):
        """Split into (content, primitive) with ``self = content * primitive``.

        The primitive part has coprime integer coefficients and positive
        lexicographic leading coefficient; the content (a Fraction or int,
        possibly negative) absorbs the rest.  Zero splits as (0, 0).
        """
        if not self.terms:
            return 0, self
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                num_gcd = _igcd(num_gcd, abs(c.numerator))
                den_lcm = den_lcm * c.denominator // _igcd(den_lcm, c.denominator)
            else:
                num_gcd = _igcd(num_gcd, abs(c))
        content = Fraction(num_gcd, den_lcm)
        prim = {e: _normalize_coeff(c / content) for e, c in self.terms.items()}
        p = Poly(self.table, prim)
        _, lc = p.lex_lead()
        if lc < 0:
            p = -p
            content = -content
        return _normalize_coeff(content), p

    def primitive(self):
        return self.content_primitive()[1]

    # -- calculus / substitution -------------------------------------

    def derivative(self, name):
        i = self.table.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if not k:
                continue
            e2 = e[:i] + (k - 1,) + e[i + 1:]
            s = _normalize_coeff(out.get(e2, 0) + c * k)
            if s:
                out[e2] = s
            else:
                out.pop(e2, None)
        return Poly(self.table, out)

    def shift(self, name, offset):
        """Substitute ``name -> name + offset``."""
        if not offset:
            return self
        i = self.table.index(name)
        deg = self.degree_in(name)
        if deg <= 0:
            return self
        # binomial expansion per power of the shifted variable
        out = Poly.zero(self.table)
        v_plus = Poly.var(self.table, name) + Poly.const(self.table, offset)
        powers = {0: Poly.const(self.table, 1)}
        for k in range(1, deg + 1):
            powers[k] = powers[k - 1] * v_plus
        for e, c in self.terms.items():
            k = e[i]
            base = Poly(self.table, {e[:i] + (0,) + e[i + 1:]: c})
            out = out + base * powers[k]
        return out

    def subs_const(self, name, value):
        """Substitute an exact rational constant for one variable."""
        i = self.table.index(name)
        value = _normalize_coeff(Fraction(value) if not isinstance(value, (int, Fraction)) else value)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            c2 = _normalize_coeff(c * value ** k) if k else c
            if not c2:
                continue
            e2 = e[:i] + (0,) + e[i + 1:]
            s = _normalize_coeff(out.get(e2, 0) + c2)
            if s:
                out[e2] = s
            else:
                out.pop(e2, None)
        return Poly(self.table, out)

    def subs_poly(self, name, g):
        """Substitute a polynomial for one variable (Horner in that variable)."""
        i = self.table.index(name)
        deg = self.degree_in(name)
        if deg <= 0:
            return self
        slices = [Poly.zero(self.table) for _ in range(deg + 1)]
        for e, c in self.terms.items():
            k = e[i]
            slices[k] = slices[k] + Poly(self.table, {e[:i] + (0,) + e[i + 1:]: c})
        out = slices[deg]
        for k in range(deg - 1, -1, -1):
            out = out * g + slices[k]
        return out

    def transport(self, new_table, rename=None):
        """Re-express over another table.

        Every used variable must exist in the new table (after optional
        renaming via the ``rename`` mapping).
        """
        rename = rename or {}
        mapping = []
        for i, n in enumerate(self.table.names):
            n2 = rename.get(n, n)
            mapping.append(new_table._index.get(n2, -1))
        out = {}
        width = len(new_table)
        for e, c in self.terms.items():
            e2 = [0] * width
            for i, k in enumerate(e):
                if not k:
                    continue
                j = mapping[i]
                if j < 0:
                    raise ValueError(
                        f"variable {self.table.names[i]!r} not present in target table")
                e2[j] += k
            t = tuple(e2)
            s = _normalize_coeff(out.get(t, 0) + c)
            if s:
                out[t] = s
            else:
                out.pop(t, None)
        return Poly(new_table, out)

    def evaluate(self, point):
        """Float evaluation; ``point`` maps variable names to numbers."""
        vals = []
        for n in self.table.names:
            vals.append(point.get(n))
        total = 0.0
        for e, c in self.terms.items():
            x = float(c)
            for i, k in enumerate(e):
                if k:
                    v = vals[i]
                    if v is None:
                        raise KeyError(f"no value for variable {self.table.names[i]!r}")
                    x *= float(v) ** k
            total += x
        return total

    # -- printing -----------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: _deglex_key(t[0]), reverse=True)
        parts = []
        for e, c in items:
            mono = "*".join(
                f"{self.table.names[i]}^{k}" if k > 1 else self.table.names[i]
                for i, k in enumerate(e) if k)
            neg = c < 0
            ac = -c if neg else c
            if mono:
                body = mono if ac == 1 else f"{ac}*{mono}"
            else:
                body = str(ac)
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self):
        return f"Poly({self})"


# -- gcd machinery ----------------------------------------------------


def _fraction_gcd(a, b):
    a, b = Fraction(a), Fraction(b)
    if not a:
        return abs(b)
    if not b:
        return abs(a)
    return Fraction(_igcd(a.numerator, b.numerator),
                    (a.denominator * b.denominator)
                    // _igcd(a.denominator, b.denominator))


def _as_univar(p, i):
    """View p as univariate in table slot i: dict degree -> Poly (slot zeroed)."""
    out = {}
    for e, c in p.terms.items():
        k = e[i]
        e2 = e[:i] + (0,) + e[i + 1:]
        coeff = out.get(k)
        if coeff is None:
            out[k] = Poly(p.table, {e2: c})
        else:
            out[k] = coeff + Poly(p.table, {e2: c})
    return {k: v for k, v in out.items() if not v.is_zero()}


def _from_univar(table, i, coeffs):
    out = {}
    for k, p in coeffs.items():
        for e, c in p.terms.items():
            e2 = e[:i] + (k,) + e[i + 1:]
            out[e2] = c
    return Poly(table, out)


def _uni_content(coeffs):
    g = None
    for p in sorted(coeffs.values(), key=lambda q: len(q.terms)):
        g = p.primitive() if g is None else poly_gcd(g, p)
        if g.is_one():
            return g
    return g


def _uni_scale(coeffs, p):
    return {k: v * p for k, v in coeffs.items()}


def _uni_prem(A, B):
    """Pseudo-remainder lc(B)^(deg A - deg B + 1) * A mod B of univariate views."""
    da, db = max(A), max(B)
    lb = B[db]
    needed = da - db + 1
    steps = 0
    while A and max(A) >= db:
        da = max(A)
        la = A[da]
        steps += 1
        # A <- lb*A - la*x^(da-db)*B
        newA = {}
        for k, v in A.items():
            if k == da:
                continue
            newA[k] = v * lb
        for k, v in B.items():
            if k == db:
                continue
            kk = k + da - db
            w = newA.get(kk)
            prod = v * la
            newA[kk] = (w - prod) if w is not None else -prod
        A = {k: v for k, v in newA.items() if not v.is_zero()}
    if steps < needed and A:
        scale = lb ** (needed - steps)
        A = {k: v * scale for k, v in A.items()}
    return A


_SCREEN_PRIME = 2147483647
_screen_rng = random.Random(0x5EED)


def _spec_all_mod(poly, point, p, idxs):
    """Univariate images of ``poly`` mod p, one per index in ``idxs``.

    For each distinguished index vi all other variables are evaluated at
    ``point``; a single pass computes the full monomial value and then
    divides back out the vi-power, so the cost is shared across all
    requested indices.  Returns {vi: (coeff dict by degree, deg_vi)} with
    the degree taken before reduction (coefficients are nonzero ints).
    """
    pw = {}

    def power(j, e):
        v = pw.get((j, e))
        if v is None:
            pw[(j, e)] = v = pow(point[j], e, p)
        return v

    inv = {}

    def ipower(j, e):
        v = inv.get((j, e))
        if v is None:
            inv[(j, e)] = v = pow(power(j, e), p - 2, p)
        return v

    out = {vi: {} for vi in idxs}
    deg = dict.fromkeys(idxs, 0)
    for e, c in poly.terms.items():
        t = c % p
        for j, ex in enumerate(e):
            if ex:
                t = t * power(j, ex) % p
        for vi in idxs:
            d = e[vi]
            if d:
                if d > deg[vi]:
                    deg[vi] = d
                val = t * ipower(vi, d) % p
            else:
                val = t
            o = out[vi]
            o[d] = (o.get(d, 0) + val) % p
    return {vi: ({k: v for k, v in out[vi].items() if v}, deg[vi])
            for vi in idxs}


def _uni_gcd_deg_mod(u, v, p):
    """Degree of gcd of two univariate coefficient dicts mod p (mutates)."""
    while v:
        dv = max(v)
        linv = pow(v[dv], p - 2, p)
        while u and max(u) >= dv:
            du = max(u)
            c = u.pop(du) * linv % p
            for k, w in v.items():
                if k == dv:
                    continue
                kk = k + du - dv
                x = (u.get(kk, 0) - c * w) % p
                if x:
                    u[kk] = x
                else:
                    u.pop(kk, None)
        u, v = v, u
    return max(u) if u else -1


def _constant_gcd_screen(pa, pb, shared):
    """Cheap certificate that gcd(pa, pb) is constant (inputs primitive).

    Per shared variable: when a specialization of the others preserves
    deg_v(pa) mod p, the leading coefficient of the true gcd — a divisor
    of lc_v(pa) — survives too, so a univariate gcd of degree zero
    proves the gcd is free of v.  True is a proof; False only means the
    exact path runs.
    """
    p = _SCREEN_PRIME
    n = len(pa.table.names)
    pending = set(shared)
    for _ in range(3):
        point = [_screen_rng.randrange(1, p) for _ in range(n)]
        sa = _spec_all_mod(pa, point, p, pending)
        sb = _spec_all_mod(pb, point, p, pending)
        for vi in tuple(pending):
            ua, da = sa[vi]
            if not ua or max(ua) != da:
                continue  # leading coefficient vanished; redraw
            d = _uni_gcd_deg_mod(ua, sb[vi][0], p)
            if d != 0:
                return False
            pending.discard(vi)
        if not pending:
            return True
    return False


# -- modular multivariate gcd ----------------------------------------
#
# Pseudo-remainder sequences explode on five or more variables, so the
# main gcd path computes images modulo word primes with Brown's dense
# interpolation and verifies the lifted candidate by trial division.
# The PRS code below stays as the fallback for bad luck.

_GCD_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579)


def _m_const(n, c):
    return {(0,) * n: c} if c else {}


def _m_is_const(T):
    return all(not any(e) for e in T)


def _m_deg(T, vi):
    return max((e[vi] for e in T), default=-1)


def _m_vars(T):
    out = set()
    for e in T:
        for i, k in enumerate(e):
            if k:
                out.add(i)
    return out


def _m_eval(T, vi, val, p):
    out = {}
    pw = {}
    for e, c in T.items():
        k = e[vi]
        if k:
            v = pw.get(k)
            if v is None:
                pw[k] = v = pow(val, k, p)
            c = c * v % p
            e = e[:vi] + (0,) + e[vi + 1:]
        x = (out.get(e, 0) + c) % p
        if x:
            out[e] = x
        elif e in out:
            del out[e]
    return out


def _m_grouped(T, vi):
    """[(k, [(zeroed exponent, coeff)])] — one tuple surgery per term,
    shared by every later evaluation at the same variable."""
    groups = {}
    for e, c in T.items():
        k = e[vi]
        groups.setdefault(k, []).append(
            (e[:vi] + (0,) + e[vi + 1:] if k else e, c))
    return sorted(groups.items())


def _m_eval_g(groups, val, p):
    out = {}
    w = 1
    kprev = 0
    for k, items in groups:
        if k:
            w = w * pow(val, k - kprev, p) % p
            kprev = k
        for e, c in items:
            x = (out.get(e, 0) + (c * w if k else c)) % p
            if x:
                out[e] = x
            elif e in out:
                del out[e]
    return out


def _m_lc(T, xi):
    d = _m_deg(T, xi)
    return {e[:xi] + (0,) + e[xi + 1:]: c for e, c in T.items() if e[xi] == d}


def _m_scale(T, s, p):
    return {e: c * s % p for e, c in T.items()}


def _m_add(A, B, p):
    out = dict(A)
    for e, c in B.items():
        x = (out.get(e, 0) + c) % p
        if x:
            out[e] = x
        elif e in out:
            del out[e]
    return out


def _m_mul(A, B, p):
    out = {}
    get = out.get
    for ea, ca in A.items():
        for eb, cb in B.items():
            e = tuple(map(_tadd, ea, eb))
            x = (get(e, 0) + ca * cb) % p
            if x:
                out[e] = x
            elif e in out:
                del out[e]
    return out


def _m_mul_lin(T, vi, beta, p):
    """T * (x_vi - beta) mod p."""
    shifted = {e[:vi] + (e[vi] + 1,) + e[vi + 1:]: c for e, c in T.items()}
    return _m_add(shifted, _m_scale(T, (-beta) % p, p), p)


def _m_uni_gcd(A, B, xi, p):
    """Monic gcd of two nonzero univariate term dicts."""
    u = {e[xi]: c for e, c in A.items()}
    v = {e[xi]: c for e, c in B.items()}
    while v:
        dv = max(v)
        inv = pow(v[dv], p - 2, p)
        while u and max(u) >= dv:
            du = max(u)
            c = u.pop(du) * inv % p
            for k, w in v.items():
                if k == dv:
                    continue
                kk = k + du - dv
                x = (u.get(kk, 0) - c * w) % p
                if x:
                    u[kk] = x
                else:
                    u.pop(kk, None)
        u, v = v, u
    d = max(u)
    inv = pow(u[d], p - 2, p)
    n = len(next(iter(A)))
    zero = (0,) * n
    return {zero[:xi] + (k,) + zero[xi + 1:]: c * inv % p
            for k, c in u.items()}


def _m_div(A, B, p):
    """Exact division of term dicts mod p; None when not divisible."""
    if not B:
        return None
    lead = max(B, key=_deglex_key)
    binv = pow(B[lead], p - 2, p)
    R = dict(A)
    Q = {}
    heap = [(-sum(e), tuple(-x for x in e), e) for e in R]
    heapify(heap)
    while heap:
        er = heappop(heap)[2]
        if er not in R:
            continue
        e = tuple(x - y for x, y in zip(er, lead))
        if any(x < 0 for x in e):
            return None
        q = R[er] * binv % p
        Q[e] = q
        for eb, cb in B.items():
            ee = tuple(x + y for x, y in zip(e, eb))
            old = R.get(ee)
            x = ((0 if old is None else old) - q * cb) % p
            if x:
                if old is None:
                    heappush(heap, (-sum(ee), tuple(-x for x in ee), ee))
                R[ee] = x
            else:
                R.pop(ee, None)
    return Q


_M_ONE = object()  # brown's signal: the primitive-part gcd is trivial


def _m_spec_all(T, point, p, idxs):
    """Univariate images of a term dict, one per index, in a single pass."""
    pw = {}

    def power(j, e):
        v = pw.get((j, e))
        if v is None:
            pw[(j, e)] = v = pow(point[j], e, p)
        return v

    inv = {}

    def ipower(j, e):
        v = inv.get((j, e))
        if v is None:
            inv[(j, e)] = v = pow(power(j, e), p - 2, p)
        return v

    out = {vi: {} for vi in idxs}
    deg = dict.fromkeys(idxs, 0)
    for e, c in T.items():
        t = c
        for j, ex in enumerate(e):
            if ex:
                t = t * power(j, ex) % p
        for vi in idxs:
            d = e[vi]
            if d:
                if d > deg[vi]:
                    deg[vi] = d
                val = t * ipower(vi, d) % p
            else:
                val = t
            o = out[vi]
            o[d] = (o.get(d, 0) + val) % p
    return {vi: ({k: v for k, v in out[vi].items() if v}, deg[vi])
            for vi in idxs}


def _m_brown(A, B, G, aux, xi, p, rng, bounds):
    """Interpolated image with lc_xi equal to G; None on bad luck.

    Contract: returns G * gcd(A, B) / lc(gcd) for generic evaluations,
    built by dense Newton interpolation one auxiliary variable at a time,
    or _M_ONE as soon as any valid image proves the gcd free of xi.
    Points that drop the degree of either leading coefficient — or of G —
    are skipped; among survivors only minimal-degree images count.
    ``bounds`` caps the gcd degree per variable (upper estimates from the
    caller's probe); the grid scales with the gcd, not the operands.
    """
    if not aux:
        g = _m_uni_gcd(A, B, xi, p)
        if _m_deg(g, xi) == 0:
            return _M_ONE
        return _m_scale(g, next(iter(G.values())), p)
    vi = aux[-1]
    rest = aux[:-1]
    gdeg = min(_m_deg(A, vi), _m_deg(B, vi))
    if vi in bounds and bounds[vi] < gdeg:
        gdeg = bounds[vi]
    need = gdeg + max(_m_deg(G, vi), 0) + 1
    dA = _m_deg(A, xi)
    dB = _m_deg(B, xi)
    gA = _m_grouped(A, vi)
    gB = _m_grouped(B, vi)
    gG = _m_grouped(G, vi)
    seen = set()
    dgx = None
    pts = []
    imgs = []
    tried = 0
    while len(pts) < need and tried < need + 60:
        tried += 1
        beta = rng.randrange(p)
        if beta in seen:
            continue
        seen.add(beta)
        # degree preservation in the image is exactly lc survival at beta
        Ab = _m_eval_g(gA, beta, p)
        if _m_deg(Ab, xi) != dA:
            continue
        Bb = _m_eval_g(gB, beta, p)
        if _m_deg(Bb, xi) != dB:
            continue
        Gb = _m_eval_g(gG, beta, p)
        if not Gb:
            continue
        img = _m_brown(Ab, Bb, Gb, rest, xi, p, rng, bounds)
        if img is None:
            continue
        if img is _M_ONE:
            return _M_ONE
        d = _m_deg(img, xi)
        if dgx is None or d < dgx:
            dgx, pts, imgs = d, [beta], [img]
        elif d == dgx:
            pts.append(beta)
            imgs.append(img)
    if len(pts) < need:
        return None
    H = imgs[0]
    n = len(next(iter(A)))
    M = _m_mul_lin(_m_const(n, 1), vi, pts[0], p)
    for j in range(1, len(pts)):
        bj = pts[j]
        Hv = _m_eval(H, vi, bj, p)
        Mv = 1
        for bk in pts[:j]:
            Mv = Mv * (bj - bk) % p
        delta = _m_add(imgs[j], _m_scale(Hv, p - 1, p), p)
        if delta:
            H = _m_add(H, _m_mul(_m_scale(delta, pow(Mv, p - 2, p), p), M, p), p)
        M = _m_mul_lin(M, vi, bj, p)
    return H


def _m_content(A, xi, p, rng):
    """Gcd of the xi-coefficients of A; None on bad luck."""
    groups = {}
    for e, c in A.items():
        groups.setdefault(e[xi], {})[e[:xi] + (0,) + e[xi + 1:]] = c
    cont = None
    for d in sorted(groups, key=lambda d: len(groups[d])):
        cont = groups[d] if cont is None else _m_gcd_terms(cont, groups[d], p, rng)
        if cont is None or _m_is_const(cont):
            break
    return cont


def _m_gcd_terms(A, B, p, rng):
    """Full modular gcd of nonzero term dicts; None on bad luck.

    Result is normalized only up to a scalar — callers rescale.
    A one-point probe first bounds the gcd degree variable by variable
    (sound whenever the specialization preserves the operand degree);
    variables proved absent shrink the interpolation grid, and a gcd
    free of every shared variable is settled on the spot.
    """
    n = len(next(iter(A)))
    if _m_is_const(A) or _m_is_const(B):
        return _m_const(n, 1)
    if len(A) == 1 or len(B) == 1:
        # gcd with a monomial: per-variable minimum exponent
        emin = [min(min(e[i] for e in A), min(e[i] for e in B))
                for i in range(n)]
        return {tuple(emin): 1}
    va = _m_vars(A)
    vb = _m_vars(B)
    shared = va & vb
    if not shared:
        return _m_const(n, 1)
    bounds = {}  # per-variable upper estimates for the gcd degree
    for _ in range(2):
        point = [rng.randrange(1, p) for _ in range(n)]
        sa = _m_spec_all(A, point, p, shared)
        sb = _m_spec_all(B, point, p, shared)
        undecided = False
        for v in shared:
            if v in bounds:
                continue
            ua, da = sa[v]
            ub, db = sb[v]
            if not ua or max(ua) != da or not ub or max(ub) != db:
                undecided = True  # degree dropped; this point proves nothing
                continue
            bounds[v] = _uni_gcd_deg_mod(dict(ua), dict(ub), p)
        if not undecided:
            break
    live = {v for v in shared if bounds.get(v, 1) != 0}
    if not live:
        return _m_const(n, 1)
    # the main variable's degree costs Euclid steps, not grid points, so
    # spend the largest expected gcd degree there
    xi = max(live, key=lambda i: bounds.get(i, min(_m_deg(A, i), _m_deg(B, i))))
    contA = _m_content(A, xi, p, rng)
    contB = _m_content(B, xi, p, rng)
    if contA is None or contB is None:
        return None
    if not _m_is_const(contA):
        A = _m_div(A, contA, p)
        if A is None:
            return None
    if not _m_is_const(contB):
        B = _m_div(B, contB, p)
        if B is None:
            return None
    if _m_is_const(contA) or _m_is_const(contB):
        cont = _m_const(n, 1)
    else:
        cont = _m_gcd_terms(contA, contB, p, rng)
        if cont is None:
            return None
    G = _m_gcd_terms(_m_lc(A, xi), _m_lc(B, xi), p, rng)
    if G is None:
        return None
    aux = sorted((_m_vars(A) | _m_vars(B)) - {xi})
    H = _m_brown(A, B, G, aux, xi, p, rng, bounds)
    if H is None:
        return None
    if H is _M_ONE:
        return cont
    if not H:
        return None
    hcont = _m_content(H, xi, p, rng)
    if hcont is None:
        return None
    if not _m_is_const(hcont):
        H = _m_div(H, hcont, p)
        if H is None:
            return None
    return H if _m_is_const(cont) else _m_mul(H, cont, p)


def _modular_gcd(pa, pb):
    """Primitive gcd over Z by modular images, or None to use the PRS.

    Per prime the image is scaled so its deglex-leading coefficient
    matches gcd(lead(pa), lead(pb)) — an integer multiple of the true
    leading coefficient — making images of different primes consistent
    for CRT.  Every candidate is verified by trial division, so wrong
    answers are impossible, only retries.
    """
    rng = random.Random(0xB0B5EED)
    lstar = _igcd(abs(pa.deglex_lead()[1]), abs(pb.deglex_lead()[1]))
    acc = None       # (residues dict, modulus, deglex lead exponent)
    for p in _GCD_PRIMES:
        if lstar % p == 0:
            continue
        A = {e: c % p for e, c in pa.terms.items() if c % p}
        B = {e: c % p for e, c in pb.terms.items() if c % p}
        if not A or not B:
            continue
        g = _m_gcd_terms(A, B, p, rng)
        if g is None or _m_is_const(g):
            continue
        lead = max(g, key=_deglex_key)
        g = _m_scale(g, lstar * pow(g[lead], p - 2, p) % p, p)
        if acc is None or _deglex_key(lead) < _deglex_key(acc[2]):
            acc = (g, p, lead)
        elif lead == acc[2] and set(g) <= set(acc[0]) | set(g):
            old, m, _ = acc
            minv = pow(m % p, p - 2, p)
            merged = {}
            for e in set(old) | set(g):
                c1 = old.get(e, 0)
                c2 = g.get(e, 0)
                merged[e] = c1 + m * ((c2 - c1) * minv % p)
            acc = (merged, m * p, lead)
        else:
            continue
        res, m, _ = acc
        half = m // 2
        cand = Poly(pa.table, {e: c - m if c > half else c
                               for e, c in res.items() if c % m}).primitive()
        try:
            pa.exact_div(cand)
            pb.exact_div(cand)
        except DivisionError:
            continue
        return cand
    return None


def poly_gcd(a, b):
    """Gcd over Q, normalized primitive with positive lex leading sign.

    Integer contents contribute their integer gcd, so gcd(6, 4) == 2.
    Implemented as a primitive pseudo-remainder sequence, recursing on
    the coefficient ring.
    """
    if a.is_zero() and b.is_zero():
        return a
    if a.is_zero():
        c, p = b.content_primitive()
        return p * _fraction_gcd(c, 0)
    if b.is_zero():
        c, p = a.content_primitive()
        return p * _fraction_gcd(c, 0)
    ca, pa = a.content_primitive()
    cb, pb = b.content_primitive()
    cg = _fraction_gcd(ca, cb)
    g = _primitive_gcd(pa, pb)
    return g * cg


_GCD_CACHE = {}


def _primitive_gcd(pa, pb):
    if pa == pb:
        return pa
    if pa.is_constant() or pb.is_constant():
        return Poly.const(pa.table, 1)
    ia, ib = pa.used_indices(), pb.used_indices()
    shared = ia & ib
    if not shared:
        return Poly.const(pa.table, 1)
    if len(pa.terms) == 1 or len(pb.terms) == 1:
        mono, other = (pa, pb) if len(pa.terms) == 1 else (pb, pa)
        (em, _), = mono.terms.items()
        mins = list(em)
        for e in other.terms:
            mins = [min(x, y) for x, y in zip(mins, e)]
        return Poly(pa.table, {tuple(mins): 1})
    # elimination chains ask for the same denominator pairs over and over
    hit = _GCD_CACHE.get((pa, pb))
    if hit is not None:
        return hit
    g = _primitive_gcd_compute(pa, pb, shared)
    if len(_GCD_CACHE) > 4000:
        _GCD_CACHE.clear()
    _GCD_CACHE[(pa, pb)] = _GCD_CACHE[(pb, pa)] = g
    return g


def _divisor_probe(small, big, shared):
    """One-point check that small could divide big; False is a proof."""
    p = _SCREEN_PRIME
    point = [_screen_rng.randrange(1, p) for _ in range(len(small.table.names))]
    ss = _spec_all_mod(small, point, p, shared)
    sb = _spec_all_mod(big, point, p, shared)
    for v in shared:
        us, ds = ss[v]
        ub, db = sb[v]
        if not us or max(us) != ds or not ub or max(ub) != db:
            continue
        if _uni_gcd_deg_mod(dict(us), dict(ub), p) < ds:
            return False
    return True


def _primitive_gcd_compute(pa, pb, shared):
    if _constant_gcd_screen(pa, pb, shared):
        return Poly.const(pa.table, 1)
    # denominators divide numerators often enough that one cheap trial
    # division is worth it before interpolating
    small, big = (pa, pb) if len(pa.terms) <= len(pb.terms) else (pb, pa)
    if small.used_indices() <= big.used_indices() and \
            _divisor_probe(small, big, shared):
        try:
            big.exact_div(small)
            return small
        except DivisionError:
            pass
    g = _modular_gcd(pa, pb)
    if g is not None:
        return g
    i = min(shared)
    A = _as_univar(pa, i)
    B = _as_univar(pb, i)
    contA = _uni_content(A)
    contB = _uni_content(B)
    cont = poly_gcd(contA, contB)
    A = {k: v.exact_div(contA) for k, v in A.items()}
    B = {k: v.exact_div(contB) for k, v in B.items()}
    if max(A) < max(B):
        A, B = B, A
    if max(B) == 0:
        return cont
    # subresultant pseudo-remainder sequence: exact divisions by g*h^delta
    # keep intermediate coefficient growth polynomial
    one = Poly.const(pa.table, 1)
    g_, h_ = one, one
    while True:
        da, db = max(A), max(B)
        delta = da - db
        R = _uni_prem(A, B)
        if not R:
            cB = _uni_content(B)
            if not cB.is_one():
                B = {k: v.exact_div(cB) for k, v in B.items()}
            g = _from_univar(pa.table, i, B)
            break
        if max(R) == 0:
            g = Poly.const(pa.table, 1)
            break
        divisor = g_ * h_ ** delta
        A, B = B, {k: v.exact_div(divisor) for k, v in R.items()}
        g_ = A[max(A)]
        if delta == 1:
            h_ = g_
        elif delta > 1:
            h_ = (g_ ** delta).exact_div(h_ ** (delta - 1))
    g = (g.primitive() * cont).primitive()
    return g


def poly_lcm(a, b):
    if a.is_zero() or b.is_zero():
        return Poly.zero(a.table)
    g = poly_gcd(a, b)
    return (a * b).exact_div(g).primitive()


def gcd_many(polys):
    """Gcd of a collection (zeros skipped); None when all are zero.

    Small elements are folded first so an early gcd of 1 short-circuits.
    """
    g = None
    for p in sorted((p for p in polys if not p.is_zero()),
                    key=lambda q: len(q.terms)):
        if g is None:
            c, pr = p.content_primitive()
            g = pr * (-c if c < 0 else c)
        else:
            g = poly_gcd(g, p)
        if g.is_one():
            break
    return g


# -- rational functions ----------------------------------------------


class Rat:
    """Canonical rational function: a reduced fraction of two integer
    primitive polynomials with coprime contents and a positive leading
    denominator sign (lexicographic).  Equal values compare equal
    structurally."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den):
        # trusted constructor; use Rat.of for canonicalization
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def of(cls, num, den=None):
        if den is None:
            den = Poly.const(num.table, 1)
        if den.is_zero():
            raise DivisionError("zero denominator")
        if num.is_zero():
            return cls(num, Poly.const(num.table, 1))
        cn, pn = num.content_primitive()
        cd, pd = den.content_primitive()
        g = _primitive_gcd(pn, pd) if not (pn.is_constant() or pd.is_constant()) \
            else Poly.const(num.table, 1)
        if not g.is_one():
            pn = pn.exact_div(g)
            pd = pd.exact_div(g)
        c = Fraction(cn) / Fraction(cd)
        # distribute the rational constant: numerator gets c's numerator,
        # denominator gets c's denominator
        pn = pn * c.numerator
        pd = pd * c.denominator
        if pd.lex_lead()[1] < 0:
            pn, pd = -pn, -pd
        return cls(pn, pd)

    @classmethod
    def from_poly(cls, p):
        cn, pn = p.content_primitive()
        if isinstance(cn, Fraction):
            return cls(pn * cn.numerator, Poly.const(p.table, cn.denominator))
        return cls(pn * cn, Poly.const(p.table, 1))

    @classmethod
    def _normalized(cls, num, den):
        """Canonicalize contents and sign only; the polynomial parts must
        already share no common factor."""
        if num.is_zero():
            return cls(num, Poly.const(num.table, 1))
        cn, pn = num.content_primitive()
        cd, pd = den.content_primitive()
        c = Fraction(cn) / Fraction(cd)
        return cls(pn * c.numerator, pd * c.denominator)

    @classmethod
    def zero(cls, table):
        return cls(Poly.zero(table), Poly.const(table, 1))

    @classmethod
    def one(cls, table):
        return cls(Poly.const(table, 1), Poly.const(table, 1))

    @classmethod
    def const(cls, table, c):
        c = Fraction(c)
        return cls(Poly.const(table, c.numerator), Poly.const(table, c.denominator))

    @classmethod
    def var(cls, table, name):
        return cls(Poly.var(table, name), Poly.const(table, 1))

    @property
    def table(self):
        return self.num.table

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return Fraction(self.num.constant_value(), self.den.constant_value())

    def poly(self):
        """The underlying polynomial; requires a trivial denominator."""
        if not self.den.is_constant():
            raise DivisionError("denominator is not constant")
        d = self.den.constant_value()
        return self.num if d == 1 else self.num.exact_div(d)

    def is_polynomial(self):
        return self.den.is_constant()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Rat.const(self.table, other)
        if not isinstance(other, Rat):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.num, self.den))
            self._hash = h
        return h

    def __bool__(self):
        return bool(self.num)

    def __neg__(self):
        return Rat(-self.num, self.den)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Rat.const(self.table, other)
        elif isinstance(other, Poly):
            other = Rat.from_poly(other)
        if not isinstance(other, Rat):
            return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        d1, d2 = self.den, other.den
        if d1 == d2:
            t = self.num + other.num
            if t.is_zero():
                return Rat.zero(self.table)
            h = poly_gcd(t, d1)
            if h.is_constant():
                return Rat._normalized(t, d1)
            return Rat._normalized(t.exact_div(h), d1.exact_div(h))
        g = poly_gcd(d1, d2)
        if g.is_constant():
            return Rat._normalized(self.num * d2 + other.num * d1, d1 * d2)
        d2r = d2.exact_div(g)
        t = self.num * d2r + other.num * d1.exact_div(g)
        if t.is_zero():
            return Rat.zero(self.table)
        h = poly_gcd(t, g)
        if h.is_constant():
            return Rat._normalized(t, d1 * d2r)
        return Rat._normalized(t.exact_div(h), d1.exact_div(h) * d2r)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Rat.const(self.table, other)
        elif isinstance(other, Poly):
            other = Rat.from_poly(other)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Rat.const(self.table, other)
        elif isinstance(other, Poly):
            other = Rat.from_poly(other)
        if not isinstance(other, Rat):
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return Rat.zero(self.table)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if not (n1.is_constant() or d2.is_constant()):
            g1 = poly_gcd(n1, d2)
            if not g1.is_constant():
                n1 = n1.exact_div(g1)
                d2 = d2.exact_div(g1)
        if not (n2.is_constant() or d1.is_constant()):
            g2 = poly_gcd(n2, d1)
            if not g2.is_constant():
                n2 = n2.exact_div(g2)
                d1 = d1.exact_div(g2)
        return Rat._normalized(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Rat.const(self.table, other)
        elif isinstance(other, Poly):
            other = Rat.from_poly(other)
        if not isinstance(other, Rat):
            return NotImplemented
        if other.num.is_zero():
            raise DivisionError("division by zero")
        return self.__mul__(Rat(other.den, other.num))

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Rat.const(self.table, other)
        return other.__truediv__(self)

    def __pow__(self, k):
        if k == 0:
            return Rat.one(self.table)
        if k < 0:
            base = self.inverse()
            k = -k
        else:
            base = self
        # coprimality and canonical form are preserved by powering
        return Rat(base.num ** k, base.den ** k)

    def inverse(self):
        if self.num.is_zero():
            raise DivisionError("inverse of zero")
        n, d = self.den, self.num
        if d.lex_lead()[1] < 0:
            n, d = -n, -d
        return Rat(n, d)

    # -- calculus / substitution -------------------------------------

    def derivative(self, name):
        n, d = self.num, self.den
        if not d.uses(name):
            return Rat.of(n.derivative(name), d)
        t = n.derivative(name) * d - n * d.derivative(name)
        return Rat.of(t, d * d)

    def shift(self, name, offset):
        if not offset:
            return self
        # shifting is a ring automorphism, so coprimality is preserved
        return Rat._normalized(self.num.shift(name, offset),
                               self.den.shift(name, offset))

    def subs_const(self, name, value):
        d = self.den.subs_const(name, value)
        if d.is_zero():
            raise PoleError(f"denominator vanishes at {name} = {value}")
        return Rat.of(self.num.subs_const(name, value), d)

    def subs_many(self, new_table, mapping, rename=None):
        """Substitute rational functions (over ``new_table``) for variables.

        ``mapping`` maps variable names to Rat values over the new table;
        unmapped variables must exist in the new table (after ``rename``).
        """
        num = _poly_subs_many(self.num, new_table, mapping, rename)
        den = _poly_subs_many(self.den, new_table, mapping, rename)
        if den.is_zero():
            raise DivisionError("substitution produced a zero denominator")
        return num / den

    def transport(self, new_table, rename=None):
        return Rat.of(self.num.transport(new_table, rename),
                      self.den.transport(new_table, rename))

    def evaluate(self, point, eps_den=1e-300):
        d = self.den.evaluate(point)
        if abs(d) <= eps_den:
            raise PoleError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    # -- printing -----------------------------------------------------

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        ns = str(self.num)
        ds = str(self.den)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        if len(self.den.terms) > 1 or not self.den.is_constant():
            # single-term non-constant denominators still need parens when
            # they contain a product; be uniformly explicit
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"Rat({self})"


def _poly_subs_many(p, new_table, mapping, rename=None):
    """Polynomial -> Rat-valued substitution helper, returning a Rat."""
    rename = rename or {}
    out = Rat.zero(new_table)
    cache = {}
    for e, c in p.terms.items():
        term = Rat.const(new_table, c)
        for i, k in enumerate(e):
            if not k:
                continue
            name = p.table.names[i]
            key = (name, k)
            f = cache.get(key)
            if f is None:
                if name in mapping:
                    f = mapping[name] ** k
                else:
                    n2 = rename.get(name, name)
                    f = Rat.of(Poly.var(new_table, n2, k))
                cache[key] = f
            term = term * f
        out = out + term
    return out
