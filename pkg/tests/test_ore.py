import random
from fractions import Fraction

import pytest

from holonomic.errors import AlgebraError
from holonomic.ore import (OreAlgebra, OrePolynomial, derivation, mono_divides,
                           mono_div, mono_lcm, shift)
from holonomic.polys import Poly, Rat, VariableTable


T = VariableTable(("n", "x", "a"), ("discrete", "continuous", "parameter"))
A = OreAlgebra(T, (shift("Sn", "n"), derivation("Dx", "x")))


def test_algebra_validation():
    with pytest.raises(AlgebraError):
        OreAlgebra(T, (derivation("Dn", "n"),))
    with pytest.raises(AlgebraError):
        OreAlgebra(T, (shift("Sx", "x"),))
    with pytest.raises(AlgebraError):
        OreAlgebra(T, (shift("S", "n"), derivation("S", "x")))


def test_derivation_commutation():
    Dx = A.gen("Dx")
    x = A.coeff_var("x")
    lhs = Dx * x
    # Dx*x = x*Dx + 1
    expected = A.from_terms({(0, 1): Rat.var(T, "x"), (0, 0): Rat.one(T)})
    assert lhs == expected


def test_shift_commutation():
    Sn = A.gen("Sn")
    n = A.coeff_var("n")
    lhs = Sn * n
    expected = A.from_terms({(1, 0): Rat.from_poly(Poly.var(T, "n") + 1)})
    assert lhs == expected


def test_parameter_commutes():
    Dx, Sn = A.gen("Dx"), A.gen("Sn")
    a = A.coeff_var("a")
    assert Dx * a == a * Dx
    assert Sn * a == a * Sn


def test_generators_commute():
    Dx, Sn = A.gen("Dx"), A.gen("Sn")
    assert Dx * Sn == Sn * Dx


def test_higher_derivation_leibniz():
    Dx = A.gen("Dx")
    x = A.coeff_var("x")
    # Dx^2 * x = x*Dx^2 + 2*Dx
    lhs = Dx * (Dx * x)
    expected = A.from_terms({(0, 2): Rat.var(T, "x"), (0, 1): Rat.const(T, 2)})
    assert lhs == expected


def rand_op(rng, algebra, max_ord=2):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        e = (rng.randint(0, max_ord), rng.randint(0, max_ord))
        coeff_terms = {}
        for _ in range(rng.randint(1, 2)):
            ce = (rng.randint(0, 1), rng.randint(0, 2), rng.randint(0, 1))
            coeff_terms[ce] = rng.randint(-3, 3)
        p = Poly.make(T, coeff_terms)
        if not p.is_zero():
            terms[e] = Rat.from_poly(p)
    return OrePolynomial(algebra, terms)


def test_associativity_random():
    rng = random.Random(42)
    for _ in range(12):
        P, Q, R = (rand_op(rng, A) for _ in range(3))
        assert (P * Q) * R == P * (Q * R)


def test_distributivity_random():
    rng = random.Random(17)
    for _ in range(10):
        P, Q, R = (rand_op(rng, A) for _ in range(3))
        assert P * (Q + R) == P * Q + P * R
        assert (P + Q) * R == P * R + Q * R


def test_lead_of_product():
    rng = random.Random(5)
    for _ in range(10):
        P, Q = rand_op(rng, A), rand_op(rng, A)
        if P.is_zero() or Q.is_zero():
            continue
        ep, _ = P.lead()
        eq, _ = Q.lead()
        er, _ = (P * Q).lead()
        assert er == tuple(i + j for i, j in zip(ep, eq))


def test_monomial_order():
    # degree first, then earlier generator more significant
    k = A.key
    assert k((0, 2)) > k((1, 0))           # higher total degree wins
    assert k((1, 1)) > k((0, 2))           # same degree: Sn beats Dx^2
    assert k((2, 0)) > k((1, 1))
    assert A.zero().algebra.key((0, 0)) == (0, (0, 0))


def test_lead_and_order():
    op = A.from_terms({(1, 1): Rat.one(T), (0, 2): Rat.one(T), (2, 0): Rat.one(T)})
    assert op.lead_mono() == (2, 0)
    assert op.order() == 2
    assert op.degree_in_gen("Dx") == 2


def test_normalized_clears_denominators():
    n = Rat.var(T, "n")
    op = A.from_terms({(1, 0): n / (n + 1), (0, 0): Rat.one(T)})
    nop = op.normalized()
    assert nop.terms[(1, 0)] == n
    assert nop.terms[(0, 0)] == n + 1


def test_normalized_removes_content_and_sign():
    x = Poly.var(T, "x")
    op = A.from_terms({(0, 1): Rat.from_poly(-2 * x), (0, 0): Rat.from_poly(-4 * x * x)})
    nop = op.normalized()
    # common content 2*x is removed, then the sign flips to make the
    # leading coefficient positive
    assert nop.terms[(0, 1)] == Rat.one(T)
    assert nop.terms[(0, 0)] == Rat.from_poly(2 * x)


def test_normalized_sign_by_leading_lex_term():
    x = Poly.var(T, "x")
    op = A.from_terms({(0, 2): Rat.from_poly(-x * x), (0, 0): Rat.one(T)})
    nop = op.normalized()
    assert nop.terms[(0, 2)] == Rat.from_poly(x * x)
    assert nop.terms[(0, 0)] == Rat.const(T, -1)


def test_monic():
    x = Rat.var(T, "x")
    op = A.from_terms({(0, 1): x, (0, 0): x * x})
    m = op.monic()
    assert m.terms[(0, 1)] == Rat.one(T)
    assert m.terms[(0, 0)] == x


def test_scale_matches_left_const_mul():
    rng = random.Random(3)
    P = rand_op(rng, A)
    c = Rat.var(T, "x") + 2
    assert P.scale(c) == A.const(c) * P


def test_lmul_mono():
    rng = random.Random(8)
    P = rand_op(rng, A)
    assert P.lmul_mono((1, 2)) == A.gen("Sn") * A.gen("Dx") * A.gen("Dx") * P


def test_shift_coeff_var():
    n = Rat.var(T, "n")
    op = A.from_terms({(1, 0): n, (0, 0): n * n})
    s = op.shift_coeff_var("n", 2)
    assert s.terms[(1, 0)] == n + 2
    assert s.terms[(0, 0)] == (n + 2) * (n + 2)


def test_transport_rename():
    T2 = VariableTable(("m", "x"), ("discrete", "continuous"))
    A2 = OreAlgebra(T2, (shift("Sm", "m"), derivation("Dx", "x")))
    n = Rat.var(T, "n")
    op = A.from_terms({(1, 0): n, (0, 1): Rat.one(T)})
    op2 = op.transport(A2, gen_rename={"Sn": "Sm"}, coeff_rename={"n": "m"})
    assert op2.terms[(1, 0)] == Rat.var(T2, "m")
    assert op2.terms[(0, 1)] == Rat.one(T2)


def test_mono_helpers():
    assert mono_divides((1, 0), (2, 1))
    assert not mono_divides((1, 2), (2, 1))
    assert mono_div((2, 1), (1, 0)) == (1, 1)
    assert mono_lcm((1, 2), (2, 1)) == (2, 2)


def test_str_roundtrip_shape():
    n = Rat.var(T, "n")
    x = Rat.var(T, "x")
    op = A.from_terms({(1, 0): n + 1, (0, 1): -x, (0, 0): x - n - 1})
    s = str(op)
    assert s == "(n + 1)*Sn - x*Dx + (-n + x - 1)"
    assert str(A.zero()) == "0"
    assert str(A.one()) == "1"


def test_str_descending_term_order():
    op = A.from_terms({(0, 0): Rat.one(T), (2, 0): Rat.one(T), (0, 1): Rat.one(T)})
    assert str(op) == "Sn^2 + Dx + 1"
