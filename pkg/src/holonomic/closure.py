"""Closure constructions for finite-rank systems.

Every construction here follows one scheme: model the target function
as a vector in a finite-dimensional space over the coefficient field
(coordinates indexed by explicit labels), teach each generator how to
act on coordinates, then enumerate operator monomials in ascending
order and harvest the linear dependencies among their vectors.  A
dependency found for monomial ``m`` against the staircase below it is
exactly a reduced-basis element with lead ``m``; the harvested set is
completed/validated before being returned.

Soundness does not depend on the labels being independent as actual
functions: mapping formal coordinates onto functions commutes with the
generator actions, so any formal dependency annihilates the real
function.  Degenerate label sets can only make the computed rank an
overestimate, never an unsound relation.
"""

from __future__ import annotations

import heapq
import warnings

from .errors import AlgebraError, ZeroFunctionWarning
from .groebner import AnnihilatingIdeal
from .linalg import IncrementalBasis
from .ore import SHIFT, OrePolynomial, mono_divides
from .polys import Rat

# -- models -----------------------------------------------------------


class IdealModel:
    """The quotient by an annihilating ideal, coordinates over the
    staircase; the modeled function is the residue class of a given
    operator (the identity by default)."""

    def __init__(self, ideal, start_op=None):
        self.ideal = ideal
        self.algebra = ideal.algebra
        self.table = ideal.algebra.table
        self.labels = ideal.staircase()
        self._index = {b: i for i, b in enumerate(self.labels)}
        self._columns = {}
        self._start_op = start_op

    def _coords(self, op):
        vec = [Rat.zero(self.table) for _ in self.labels]
        for e, c in op.terms.items():
            vec[self._index[e]] = c
        return vec

    def start_vector(self):
        if self._start_op is None:
            one = (0,) * len(self.algebra.gens)
            return self._coords(OrePolynomial(self.algebra,
                                              {one: Rat.one(self.table)}))
        return self._coords(self.ideal.normal_form(self._start_op))

    def column(self, gi, label):
        """Coordinates of generator(gi) applied to the basis element."""
        key = (gi, label)
        col = self._columns.get(key)
        if col is None:
            mono = label[:gi] + (label[gi] + 1,) + label[gi + 1:]
            if mono in self._index:
                col = [Rat.zero(self.table) for _ in self.labels]
                col[self._index[mono]] = Rat.one(self.table)
            else:
                op = OrePolynomial(self.algebra, {mono: Rat.one(self.table)})
                col = self._coords(self.ideal.normal_form(op))
            self._columns[key] = col
        return col

    def apply(self, gen_name, vec):
        gi = self.algebra.gen_index(gen_name)
        spec = self.algebra.gens[gi]
        zero = Rat.zero(self.table)
        if spec.kind == SHIFT:
            twisted = [c.shift(spec.var, 1) for c in vec]
            out = [zero] * len(self.labels)
        else:
            twisted = vec
            out = [c.derivative(spec.var) for c in vec]
        for b, c in zip(self.labels, twisted):
            if c.is_zero():
                continue
            col = self.column(gi, b)
            out = [o + c * a if not a.is_zero() else o
                   for o, a in zip(out, col)]
        return out

    def observe(self, vec):
        return vec

    @property
    def observe_table(self):
        return self.table

    @property
    def observe_dim(self):
        return len(self.labels)


class _Combined:
    """Shared plumbing for models built out of component models."""

    def observe(self, vec):
        return vec

    @property
    def observe_table(self):
        return self.table

    @property
    def observe_dim(self):
        return len(self.labels)

    def _unit_columns(self, model, gen_name):
        cache = self._colcache.setdefault((id(model), gen_name), {})
        if not cache:
            zero = Rat.zero(self.table)
            for j, lab in enumerate(model.labels):
                unit = [zero] * len(model.labels)
                unit[j] = Rat.one(self.table)
                cache[lab] = model.apply(gen_name, unit)
        return cache


class ProductModel(_Combined):
    """Coordinates for a product of two functions over paired labels."""

    def __init__(self, m1, m2):
        if m1.algebra != m2.algebra:
            raise AlgebraError("product factors live in different algebras")
        self.algebra = m1.algebra
        self.table = m1.table
        self.m1 = m1
        self.m2 = m2
        self.labels = tuple((a, b) for a in m1.labels for b in m2.labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._colcache = {}

    def start_vector(self):
        s1 = self.m1.start_vector()
        s2 = self.m2.start_vector()
        return [a * b for a in s1 for b in s2]

    def apply(self, gen_name, vec):
        gi = self.algebra.gen_index(gen_name)
        spec = self.algebra.gens[gi]
        zero = Rat.zero(self.table)
        cols1 = self._unit_columns(self.m1, gen_name)
        cols2 = self._unit_columns(self.m2, gen_name)
        i1 = {lab: i for i, lab in enumerate(self.m1.labels)}
        i2 = {lab: i for i, lab in enumerate(self.m2.labels)}
        out = [zero] * len(self.labels)
        if spec.kind == SHIFT:
            for k, (l1, l2) in enumerate(self.labels):
                c = vec[k]
                if c.is_zero():
                    continue
                c = c.shift(spec.var, 1)
                col1, col2 = cols1[l1], cols2[l2]
                for j1, a in enumerate(col1):
                    if a.is_zero():
                        continue
                    ca = c * a
                    base = j1 * len(self.m2.labels)
                    for j2, b in enumerate(col2):
                        if not b.is_zero():
                            out[base + j2] = out[base + j2] + ca * b
        else:
            n2 = len(self.m2.labels)
            for k, (l1, l2) in enumerate(self.labels):
                c = vec[k]
                if c.is_zero():
                    continue
                d = c.derivative(spec.var)
                if not d.is_zero():
                    out[k] = out[k] + d
                j1 = i1[l1]
                j2 = i2[l2]
                for jj, a in enumerate(cols1[l1]):
                    if not a.is_zero():
                        idx = jj * n2 + j2
                        out[idx] = out[idx] + c * a
                for jj, b in enumerate(cols2[l2]):
                    if not b.is_zero():
                        idx = j1 * n2 + jj
                        out[idx] = out[idx] + c * b
        return out


class SumModel(_Combined):
    """Direct-sum coordinates for a sum of two functions."""

    def __init__(self, m1, m2):
        if m1.algebra != m2.algebra:
            raise AlgebraError("sum terms live in different algebras")
        self.algebra = m1.algebra
        self.table = m1.table
        self.m1 = m1
        self.m2 = m2
        self.labels = tuple([(0, lab) for lab in m1.labels]
                            + [(1, lab) for lab in m2.labels])
        self._colcache = {}

    def start_vector(self):
        return list(self.m1.start_vector()) + list(self.m2.start_vector())

    def apply(self, gen_name, vec):
        n1 = len(self.m1.labels)
        left = self.m1.apply(gen_name, vec[:n1])
        right = self.m2.apply(gen_name, vec[n1:])
        return list(left) + list(right)


class SymmetricSquareModel(_Combined):
    """Coordinates for the square of a function over unordered label pairs."""

    def __init__(self, model):
        self.algebra = model.algebra
        self.table = model.table
        self.inner = model
        labs = model.labels
        self.labels = tuple((labs[i], labs[j])
                            for i in range(len(labs)) for j in range(i, len(labs)))
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._pos = {lab: i for i, lab in enumerate(labs)}
        self._colcache = {}

    def _fold(self, l1, l2):
        if self._pos[l1] <= self._pos[l2]:
            return self._index[(l1, l2)]
        return self._index[(l2, l1)]

    def start_vector(self):
        s = self.inner.start_vector()
        zero = Rat.zero(self.table)
        out = [zero] * len(self.labels)
        for i, a in enumerate(s):
            if a.is_zero():
                continue
            for j, b in enumerate(s[i:], start=i):
                if b.is_zero():
                    continue
                k = self._index[(self.inner.labels[i], self.inner.labels[j])]
                term = a * b
                out[k] = out[k] + (term + term if j > i else term)
        return out

    def apply(self, gen_name, vec):
        gi = self.algebra.gen_index(gen_name)
        spec = self.algebra.gens[gi]
        zero = Rat.zero(self.table)
        cols = self._unit_columns(self.inner, gen_name)
        labs = self.inner.labels
        out = [zero] * len(self.labels)
        if spec.kind == SHIFT:
            for k, (l1, l2) in enumerate(self.labels):
                c = vec[k]
                if c.is_zero():
                    continue
                c = c.shift(spec.var, 1)
                col1, col2 = cols[l1], cols[l2]
                for j1, a in enumerate(col1):
                    if a.is_zero():
                        continue
                    ca = c * a
                    for j2, b in enumerate(col2):
                        if not b.is_zero():
                            t = self._fold(labs[j1], labs[j2])
                            out[t] = out[t] + ca * b
        else:
            for k, (l1, l2) in enumerate(self.labels):
                c = vec[k]
                if c.is_zero():
                    continue
                d = c.derivative(spec.var)
                if not d.is_zero():
                    out[k] = out[k] + d
                for jj, a in enumerate(cols[l1]):
                    if not a.is_zero():
                        t = self._fold(labs[jj], l2)
                        out[t] = out[t] + c * a
                for jj, b in enumerate(cols[l2]):
                    if not b.is_zero():
                        t = self._fold(l1, labs[jj])
                        out[t] = out[t] + c * b
        return out


class DiagonalModel:
    """Identify one discrete variable with another: f -> f with
    ``var_from`` set equal to ``var_to``.

    Raw coordinates stay over the source table so generator actions are
    exact; the dependency test sees the specialized coordinates.  A
    target shift on ``var_to`` lifts to the product of both source
    shifts when the source algebra shifts ``var_from``; every other
    generator lifts to its source namesake.
    """

    def __init__(self, ideal, var_from, var_to, target_algebra):
        src = ideal.algebra
        if var_from not in src.table or var_to not in src.table:
            raise AlgebraError("unknown variable for identification")
        if var_from in target_algebra.table:
            raise AlgebraError(
                f"target table must not retain {var_from!r}")
        self.inner = IdealModel(ideal)
        self.algebra = target_algebra
        self.table = src.table
        self.var_from = var_from
        self.var_to = var_to
        self.labels = self.inner.labels
        self._lifts = {}
        from_shift = None
        for g in src.gens:
            if g.kind == SHIFT and g.var == var_from:
                from_shift = g.name
        for g in target_algebra.gens:
            if g.name not in {h.name for h in src.gens}:
                raise AlgebraError(
                    f"target generator {g.name} has no source counterpart")
            if g.kind == SHIFT and g.var == var_to and from_shift is not None:
                self._lifts[g.name] = (from_shift, g.name)
            else:
                self._lifts[g.name] = (g.name,)

    def start_vector(self):
        return self.inner.start_vector()

    def apply(self, gen_name, vec):
        for name in self._lifts[gen_name]:
            vec = self.inner.apply(name, vec)
        return vec

    def observe(self, vec):
        target = self.algebra.table
        sub = {self.var_from: Rat.var(target, self.var_to)}
        return [c.subs_many(target, sub) for c in vec]

    @property
    def observe_table(self):
        return self.algebra.table

    @property
    def observe_dim(self):
        return len(self.labels)


# -- the enumeration driver -------------------------------------------


def harvest(model, algebra=None):
    """Run the monomial enumeration over a model; returns the ideal of
    all harvested relations."""
    algebra = algebra or model.algebra
    ngens = len(algebra.gens)
    zero_mono = (0,) * ngens
    tester = IncrementalBasis(model.observe_table, model.observe_dim)
    vecs = {}
    staircase = []
    leads = []
    relations = []
    heap = [(algebra.key(zero_mono), zero_mono, None, None)]
    seen = {zero_mono}
    while heap:
        _, mono, parent, gi = heapq.heappop(heap)
        if any(mono_divides(lead, mono) for lead in leads):
            continue
        if parent is None:
            vec = model.start_vector()
        else:
            vec = model.apply(algebra.gens[gi].name, vecs[parent])
        lam = tester.add(model.observe(vec))
        if lam is None:
            staircase.append(mono)
            vecs[mono] = vec
            for i in range(ngens):
                child = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                if child not in seen:
                    seen.add(child)
                    heapq.heappush(heap, (algebra.key(child), child, mono, i))
        else:
            terms = {mono: Rat.one(model.observe_table)}
            for b, c in zip(staircase, lam):
                if not c.is_zero():
                    terms[b] = -c
            relations.append(OrePolynomial(algebra, terms))
            leads.append(mono)
    return AnnihilatingIdeal.from_generators(algebra, relations)


# -- public constructions ---------------------------------------------


def dfinite_times(ideal1, ideal2):
    """Annihilator of a product from annihilators of the factors."""
    out = harvest(ProductModel(IdealModel(ideal1), IdealModel(ideal2)))
    assert out.rank() <= ideal1.rank() * ideal2.rank()
    return out


def dfinite_plus(ideal1, ideal2):
    """Annihilator of a sum from annihilators of the terms."""
    out = harvest(SumModel(IdealModel(ideal1), IdealModel(ideal2)))
    assert out.rank() <= ideal1.rank() + ideal2.rank()
    return out


def dfinite_symmetric_square(ideal):
    """Annihilator of the square of a function."""
    r = ideal.rank()
    out = harvest(SymmetricSquareModel(IdealModel(ideal)))
    assert out.rank() <= r * (r + 1) // 2
    return out


def ore_action(ideal, op):
    """Annihilator of P(f) given the annihilator of f and the operator P."""
    if op.algebra != ideal.algebra:
        raise AlgebraError("operator and ideal live in different algebras")
    nf = ideal.normal_form(op)
    if nf.is_zero():
        warnings.warn("the operator maps the function to zero; the result "
                      "annihilates everything", ZeroFunctionWarning,
                      stacklevel=2)
        return AnnihilatingIdeal.from_generators(
            ideal.algebra, [ideal.algebra.one()])
    out = harvest(IdealModel(ideal, start_op=op))
    assert out.rank() <= ideal.rank()
    return out


def substitute_discrete(ideal, var_from, var_to, target_algebra):
    """Annihilator of the diagonal f with ``var_from = var_to``."""
    model = DiagonalModel(ideal, var_from, var_to, target_algebra)
    out = harvest(model, target_algebra)
    assert out.rank() <= ideal.rank()
    return out
