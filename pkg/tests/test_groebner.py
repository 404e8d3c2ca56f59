import random

import pytest

from holonomic.errors import NotDFiniteError
from holonomic.groebner import (AnnihilatingIdeal, buchberger_left,
                                left_reduce, spoly, staircase)
from holonomic.ore import OreAlgebra, derivation, shift
from holonomic.polys import Poly, Rat, VariableTable


TL = VariableTable(("a", "n", "x"), ("discrete", "discrete", "continuous"))
AL = OreAlgebra(TL, (shift("Sn", "n"), shift("Sa", "a"), derivation("Dx", "x")))


def _v(name):
    return Rat.var(TL, name)


def laguerre_system():
    a, n, x = _v("a"), _v("n"), _v("x")
    g1 = AL.from_terms({(0, 1, 0): Rat.one(TL), (0, 0, 1): Rat.one(TL),
                        (0, 0, 0): Rat.const(TL, -1)})
    g2 = AL.from_terms({(1, 0, 0): n + 1, (0, 0, 1): -x,
                        (0, 0, 0): -a - n + x - 1})
    g3 = AL.from_terms({(0, 0, 2): x, (0, 0, 1): a - x + 1, (0, 0, 0): n})
    return [g1, g2, g3]


def test_orthogonal_family_system_is_groebner():
    gens = laguerre_system()
    basis = buchberger_left(gens)
    assert len(basis) == 3
    assert [g.lead_mono() for g in basis] == [(0, 1, 0), (1, 0, 0), (0, 0, 2)]
    # already reduced: completion returns the same operators (normalized)
    assert basis == [g.normalized() for g in gens]


def test_staircase_of_family_system():
    basis = buchberger_left(laguerre_system())
    assert staircase(basis) == ((0, 0, 0), (0, 0, 1))


def test_ideal_rank():
    ideal = AnnihilatingIdeal.from_generators(AL, laguerre_system())
    assert ideal.rank() == 2
    assert ideal.leads() == ((0, 1, 0), (1, 0, 0), (0, 0, 2))


def rand_op(rng, algebra, max_ord=1):
    terms = {}
    for _ in range(rng.randint(1, 2)):
        e = tuple(rng.randint(0, max_ord) for _ in range(len(algebra.gens)))
        p = Poly.make(algebra.table,
                      {tuple(rng.randint(0, 1) for _ in range(3)): rng.randint(-2, 2)
                       for _ in range(2)})
        if not p.is_zero():
            terms[e] = Rat.from_poly(p)
    return algebra.from_terms(terms)


def test_left_multiples_are_members():
    ideal = AnnihilatingIdeal.from_generators(AL, laguerre_system())
    rng = random.Random(13)
    for _ in range(6):
        q = rand_op(rng, AL)
        g = ideal.basis[rng.randrange(len(ideal.basis))]
        assert ideal.contains(q * g)


def test_normal_form_is_projection():
    ideal = AnnihilatingIdeal.from_generators(AL, laguerre_system())
    rng = random.Random(29)
    for _ in range(6):
        op = rand_op(rng, AL, max_ord=2)
        nf = ideal.normal_form(op)
        assert ideal.normal_form(nf) == nf
        assert ideal.contains(op - nf)
        # the normal form only involves staircase monomials
        stairs = set(ideal.staircase())
        assert set(nf.terms) <= stairs


def test_spoly_reduces_for_groebner_basis():
    basis = buchberger_left(laguerre_system())
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            s = spoly(basis[i], basis[j])
            assert left_reduce(s, basis).is_zero()


def test_completion_discovers_unit_ideal():
    # x*Dx + 1 and x*Dx^2 generate the whole algebra
    T = VariableTable(("x",), ("continuous",))
    A = OreAlgebra(T, (derivation("Dx", "x"),))
    x = Rat.var(T, "x")
    g1 = A.from_terms({(1,): x, (0,): Rat.one(T)})
    g2 = A.from_terms({(2,): x})
    basis = buchberger_left([g1, g2])
    assert len(basis) == 1
    assert basis[0] == A.one()
    ideal = AnnihilatingIdeal.from_groebner(A, basis)
    assert ideal.rank() == 0


def test_completion_mixed_shift_derivation():
    # exp(x): Dx - 1 and Sn - 1 (constant in n); spoly closes without
    # new elements
    T = VariableTable(("n", "x"), ("discrete", "continuous"))
    A = OreAlgebra(T, (shift("Sn", "n"), derivation("Dx", "x")))
    g1 = A.from_terms({(0, 1): Rat.one(T), (0, 0): Rat.const(T, -1)})
    g2 = A.from_terms({(1, 0): Rat.one(T), (0, 0): Rat.const(T, -1)})
    basis = buchberger_left([g1, g2])
    assert [g.lead_mono() for g in basis] == [(0, 1), (1, 0)]
    assert staircase(basis) == ((0, 0),)


def test_infinite_rank_detected():
    T = VariableTable(("n", "x"), ("discrete", "continuous"))
    A = OreAlgebra(T, (shift("Sn", "n"), derivation("Dx", "x")))
    op = A.from_terms({(1, 1): Rat.one(T)})
    with pytest.raises(NotDFiniteError):
        staircase([op])


def test_reduction_by_nonmonic_basis():
    # leading coefficients stay in the field; reduction divides exactly
    T = VariableTable(("n",), ("discrete",))
    A = OreAlgebra(T, (shift("Sn", "n"),))
    n = Rat.var(T, "n")
    g = A.from_terms({(1,): n + 1, (0,): -(n + 3)})
    op = A.from_terms({(2,): Rat.one(T)})
    nf = left_reduce(op, [g])
    assert set(nf.terms) == {(0,)}
    # S^2 = ((n+4)/(n+2)) * ((n+3)/(n+1)) modulo g
    assert nf.terms[(0,)] == (n + 4) * (n + 3) / ((n + 2) * (n + 1))


def test_zero_ideal_staircase_raises():
    with pytest.raises(NotDFiniteError):
        staircase([])
