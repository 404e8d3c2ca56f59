import warnings

import pytest

from holonomic.closure import (
    dfinite_plus,
    dfinite_symmetric_square,
    dfinite_times,
    ore_action,
    substitute_discrete,
)
from holonomic.errors import ZeroFunctionWarning
from holonomic.groebner import AnnihilatingIdeal
from holonomic.ore import OreAlgebra, derivation, shift
from holonomic.polys import Rat, VariableTable


def cont_algebra():
    T = VariableTable(("x",), ("continuous",))
    return OreAlgebra(T, (derivation("Dx", "x"),))


def disc_algebra():
    T = VariableTable(("n",), ("discrete",))
    return OreAlgebra(T, (shift("Sn", "n"),))


def ideal_of(algebra, *ops):
    return AnnihilatingIdeal.from_generators(algebra, list(ops))


def exp_ideal(A, c):
    # annihilator of exp(c*x)
    return ideal_of(A, A.gen("Dx") - A.const(c))


def test_product_of_exponentials():
    A = cont_algebra()
    out = dfinite_times(exp_ideal(A, 1), exp_ideal(A, 2))
    assert out.basis == (A.gen("Dx") - A.const(3),)


def test_sum_of_exponentials():
    A = cont_algebra()
    out = dfinite_plus(exp_ideal(A, 1), exp_ideal(A, 2))
    # e^x + e^{2x} satisfies (D-1)(D-2) = D^2 - 3D + 2
    D = A.gen("Dx")
    assert out.basis == ((D * D - 3 * D + A.const(2)).normalized(),)


def test_sum_with_common_solution_keeps_rank_bound():
    A = cont_algebra()
    i1 = exp_ideal(A, 1)
    out = dfinite_plus(i1, i1)  # e^x + e^x = 2e^x: rank collapses to 1
    assert out.rank() == 1
    assert out.basis == i1.basis


def test_square_of_exponential():
    A = cont_algebra()
    out = dfinite_symmetric_square(exp_ideal(A, 1))
    assert out.basis == (A.gen("Dx") - A.const(2),)


def test_square_of_airy():
    A = cont_algebra()
    D = A.gen("Dx")
    x = A.coeff_var("x")
    airy = ideal_of(A, D * D - x)
    out = dfinite_symmetric_square(airy)
    # classical: y = f^2 with f'' = xf satisfies y''' = 4xy' + 2y
    expected = (D * D * D - 4 * x * D - A.const(2)).normalized()
    assert out.basis == (expected,)
    assert out.rank() == 3


def test_product_of_geometric_sequences():
    A = disc_algebra()
    S = A.gen("Sn")
    out = dfinite_times(ideal_of(A, S - A.const(2)), ideal_of(A, S - A.const(3)))
    assert out.basis == (S - A.const(6),)


def test_sum_of_geometric_sequences():
    A = disc_algebra()
    S = A.gen("Sn")
    out = dfinite_plus(ideal_of(A, S - A.const(2)), ideal_of(A, S - A.const(3)))
    expected = (S * S - 5 * S + A.const(6)).normalized()
    assert out.basis == (expected,)


def test_product_with_factorial_twist():
    A = disc_algebra()
    S = A.gen("Sn")
    n = A.coeff_var("n")
    # S - (n+1) annihilates n!, S - 2 annihilates 2^n; product: S - 2(n+1)
    out = dfinite_times(ideal_of(A, S - (n + A.const(1))),
                        ideal_of(A, S - A.const(2)))
    assert out.basis == ((S - 2 * (n + A.const(1))).normalized(),)


def test_ore_action_preserves_membership():
    # key exactness property: every element T of ann(P(f)) satisfies T*P in ann(f)
    T = VariableTable(("n", "x"), ("discrete", "continuous"))
    A = OreAlgebra(T, (shift("Sn", "n"), derivation("Dx", "x")))
    D, S = A.gen("Dx"), A.gen("Sn")
    x = A.coeff_var("x")
    # annihilator of x^n * sin(x): S - x together with ((D - n/x)^2 + 1)
    nx = A.from_terms({(0, 0): Rat.var(T, "n") / Rat.var(T, "x")})
    ideal = ideal_of(A, S - x, (D - nx) * (D - nx) + A.one())
    assert ideal.rank() == 2
    P = A.const(2) + x * D + S
    out = ore_action(ideal, P)
    assert 1 <= out.rank() <= ideal.rank()
    for g in out.basis:
        assert ideal.normal_form(g * P).is_zero()


def test_ore_action_derivative_of_sine_family():
    A = cont_algebra()
    D = A.gen("Dx")
    sine = ideal_of(A, D * D + A.const(1))
    out = ore_action(sine, D)  # cos satisfies the same equation
    assert out.basis == sine.basis


def test_ore_action_on_annihilated_operator_warns():
    A = cont_algebra()
    D = A.gen("Dx")
    ideal = exp_ideal(A, 1)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        out = ore_action(ideal, D - A.const(1))
    assert any(issubclass(w.category, ZeroFunctionWarning) for w in rec)
    assert out.rank() == 0  # unit ideal: everything annihilates 0


def test_diagonal_of_two_geometrics():
    T = VariableTable(("m", "n"), ("discrete", "discrete"))
    A = OreAlgebra(T, (shift("Sm", "m"), shift("Sn", "n")))
    ideal = ideal_of(A, A.gen("Sm") - A.const(2), A.gen("Sn") - A.const(3))
    Tt = VariableTable(("n",), ("discrete",))
    B = OreAlgebra(Tt, (shift("Sn", "n"),))
    out = substitute_discrete(ideal, "m", "n", B)
    # 2^m 3^n at m=n is 6^n
    assert out.basis == (B.gen("Sn") - B.const(6),)


def test_diagonal_with_identity_lifts_only():
    # f(m,n,x) = x^(m+n); target keeps only Dx, so h(n,x) = x^(2n)
    T = VariableTable(("m", "n", "x"), ("discrete", "discrete", "continuous"))
    A = OreAlgebra(T, (shift("Sm", "m"), shift("Sn", "n"), derivation("Dx", "x")))
    x = A.coeff_var("x")
    m, n = A.coeff_var("m"), A.coeff_var("n")
    ideal = ideal_of(A, A.gen("Sm") - x, A.gen("Sn") - x,
                     x * A.gen("Dx") - (m + n))
    Tt = VariableTable(("n", "x"), ("discrete", "continuous"))
    B = OreAlgebra(Tt, (derivation("Dx", "x"),))
    out = substitute_discrete(ideal, "m", "n", B)
    xb = B.coeff_var("x")
    nb = B.coeff_var("n")
    assert out.basis == ((xb * B.gen("Dx") - 2 * nb).normalized(),)


def test_product_rank_bound_holds_with_mixed_generators():
    T = VariableTable(("n", "x"), ("discrete", "continuous"))
    A = OreAlgebra(T, (shift("Sn", "n"), derivation("Dx", "x")))
    D, S = A.gen("Dx"), A.gen("Sn")
    n = A.coeff_var("n")
    i1 = ideal_of(A, S - (n + A.const(1)), D)          # n!
    i2 = ideal_of(A, S - A.const(1), D * D + A.const(1))  # sin-type in x
    out = dfinite_times(i1, i2)
    assert out.rank() <= 2
    # (n! * f(x)): Sn - (n+1) still annihilates, as does D^2 + 1
    assert out.contains((S - (n + A.const(1))).normalized())
    assert out.contains((D * D + A.const(1)).normalized())
