import random
import warnings

import pytest

from holonomic.atoms import (
    annihilator,
    build_algebra,
    hyperatom_annihilator,
    laguerre_annihilator,
    parse_expression,
    standard_generator,
)
from holonomic.errors import (
    AlgebraError,
    UnsupportedExpression,
    ZeroFunctionWarning,
)
from holonomic.ore import DERIVATION, SHIFT
from holonomic.textio import parse_operator

PREFACTOR_SQ = ("a^4*beta^3*Factorial(n)/(gamma*GammaQ(n+2*nu))"
                "*(2*a*beta*r)^(2*nu-2)*Exp(-2*a*beta*r)")


def leads_by_name(ideal):
    out = set()
    for g in ideal.basis:
        out.add(ideal.algebra.mono_str(g.lead_mono()) or "1")
    return out


# -- surface validation -----------------------------------------------


def test_parse_rejects_unknown_function():
    with pytest.raises(UnsupportedExpression):
        parse_expression("Bessel(0, x)")


def test_parse_rejects_nonaffine_index():
    with pytest.raises(UnsupportedExpression):
        parse_expression("LaguerreL(n^2, a, x)")


def test_parse_rejects_fractional_index():
    with pytest.raises(UnsupportedExpression):
        parse_expression("LaguerreL(n/2, a, x)")


def test_parse_accepts_pipeline_inputs():
    parse_expression("LaguerreL(n-1, 2*nu, 2*a*beta*r)^2")
    parse_expression("r^(p+2)")
    parse_expression(PREFACTOR_SQ)


def test_standard_generator_inference():
    s = standard_generator("Sn")
    assert s.kind == SHIFT and s.var == "n"
    d = standard_generator("Dr")
    assert d.kind == DERIVATION and d.var == "r"
    with pytest.raises(AlgebraError):
        standard_generator("Xq")


def test_build_algebra_sorts_parameters_after_generator_variables():
    A = build_algebra(parse_expression("nu*beta*x + kappa"), ["Dx"])
    assert A.table.names == ("x", "beta", "kappa", "nu")
    assert A.table.kind("x") == "continuous"
    assert A.table.kind("nu") == "parameter"


# -- hyperexponential atoms -------------------------------------------


def test_power_atom():
    out = hyperatom_annihilator("r^(p+2)", ["Dr", "Sp"])
    A = out.algebra
    assert out.basis == (
        parse_operator("Sp - r", A),
        parse_operator("r*Dr - p - 2", A),
    )


def test_exponential_atom():
    out = hyperatom_annihilator("Exp(-a*beta*r)", ["Dr"])
    A = out.algebra
    assert out.basis == (parse_operator("Dr + a*beta", A),)


def test_prefactor_square_ideal():
    out = hyperatom_annihilator(PREFACTOR_SQ + "*r^(p+2)",
                                ["Sn", "Dr", "Sp"])
    A = out.algebra
    expected = {
        parse_operator("(n+2*nu)*Sn - (n+1)", A),
        parse_operator("r*Dr + 2*a*beta*r - 2*nu - p", A),
        parse_operator("Sp - r", A),
    }
    assert set(out.basis) == expected
    assert out.rank() == 1


def test_normalization_constants_drop_out():
    # gamma and pure constants never reach the operators
    out = hyperatom_annihilator(PREFACTOR_SQ, ["Sn", "Dr"])
    for g in out.basis:
        for c in g.terms.values():
            assert not c.num.uses("gamma") and not c.den.uses("gamma")


def test_sqrt_of_continuous_base():
    out = hyperatom_annihilator("Sqrt(1+x)", ["Dx"])
    A = out.algebra
    assert out.basis == (parse_operator("(2*x+2)*Dx - 1", A),)


def test_sqrt_of_shifting_factor_rejected():
    # odd prefactor powers: the n-quotient of Sqrt(Factorial(n)) is irrational
    with pytest.raises(UnsupportedExpression):
        hyperatom_annihilator("Sqrt(Factorial(n))", ["Sn"])


def test_gamma_quotient_two_arguments():
    out = hyperatom_annihilator("GammaQ(n+3, n)", ["Sn"])
    A = out.algebra
    # Gamma(n+3)/Gamma(n) = n(n+1)(n+2), shift quotient (n+3)/n
    assert out.basis == (parse_operator("n*Sn - n - 3", A),)


def test_gamma_with_continuous_argument_rejected():
    with pytest.raises(UnsupportedExpression):
        hyperatom_annihilator("GammaQ(x)", ["Dx"])


def test_exp_with_discrete_argument_rejected():
    with pytest.raises(UnsupportedExpression):
        hyperatom_annihilator("Exp(n)", ["Sn"])


def test_hyperatom_rejects_laguerre():
    with pytest.raises(UnsupportedExpression):
        hyperatom_annihilator("LaguerreL(n, a, x)", ["Sn", "Dx"])


def test_merged_certificate_equals_closure_product():
    rng = random.Random(7)
    atoms = ["r^(p+2)", "Exp(-2*a*beta*r)", "(2*a*beta*r)^(2*nu-2)",
             "Factorial(n)", "GammaQ(n+2*nu)^(-1)", "r^3", "Exp(r)"]
    gens = ["Sn", "Dr", "Sp"]
    for _ in range(4):
        f, g = rng.sample(atoms, 2)
        merged = hyperatom_annihilator(f + "*" + g, gens)
        assert merged.rank() == 1
        via_annihilator = annihilator(f + "*" + g, gens)
        assert via_annihilator.basis == merged.basis


# -- Laguerre systems -------------------------------------------------


def test_classical_laguerre_basis():
    out = annihilator("LaguerreL(n, a, x)", ["Sn", "Sa", "Dx"])
    A = out.algebra
    assert out.basis == (
        parse_operator("Sa + Dx - 1", A),
        parse_operator("(n+1)*Sn - x*Dx + (-a-n+x-1)", A),
        parse_operator("x*Dx^2 + (a-x+1)*Dx + n", A),
    )
    assert out.rank() == 2


def test_laguerre_annihilator_direct_call():
    out = laguerre_annihilator("n", "a", "x", ["Sn", "Sa", "Dx"])
    assert out.rank() == 2
    assert len(out.basis) == 3


def test_laguerre_constant_index():
    # L_0 = 1; every basis element must annihilate the constant function:
    # derivation terms give zero, shift terms reproduce their coefficient
    out = laguerre_annihilator("0", "a", "x", ["Sa", "Dx"])
    A = out.algebra
    assert out.contains(parse_operator("x*Dx^2 + (a+1-x)*Dx", A))
    deriv = [i for i, s in enumerate(A.gens) if s.kind == DERIVATION]
    for g in out.basis:
        acc = None
        for e, c in g.terms.items():
            if all(e[i] == 0 for i in deriv):
                acc = c if acc is None else acc + c
        assert acc is None or acc.is_zero()


def test_laguerre_scaled_argument():
    out = annihilator("LaguerreL(n-1, 2*nu, 2*a*beta*r)", ["Sn", "Dr"])
    A = out.algebra
    assert out.rank() == 2
    target = parse_operator(
        "r*Dr^2 + (2*nu+1-2*a*beta*r)*Dr + 2*a*beta*n - 2*a*beta", A)
    assert out.contains(target)


def test_laguerre_constant_argument_rejected():
    with pytest.raises(UnsupportedExpression):
        annihilator("LaguerreL(n, a, 5)", ["Sn"])


def test_laguerre_quadratic_argument_rejected():
    with pytest.raises(UnsupportedExpression):
        laguerre_annihilator("n", "a", "x^2", ["Sn", "Dx"])


def test_laguerre_nonunit_index_slope_rejected():
    with pytest.raises(UnsupportedExpression):
        laguerre_annihilator("2*n", "a", "x", ["Sn", "Dx"])


# -- dispatch ---------------------------------------------------------


def test_sum_dispatch():
    out = annihilator("Exp(x) + Exp(2*x)", ["Dx"])
    A = out.algebra
    assert out.basis == (parse_operator("Dx^2 - 3*Dx + 2", A),)


def test_square_of_hyper_atom_stays_rank_one():
    out = annihilator("Square(Exp(x))", ["Dx"])
    A = out.algebra
    assert out.basis == (parse_operator("Dx - 2", A),)


def test_constant_one():
    out = annihilator("1", ["Dr", "Sp"])
    A = out.algebra
    assert set(out.basis) == {parse_operator("Dr", A),
                              parse_operator("Sp - 1", A)}


def test_zero_expression_warns():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        out = annihilator("0", ["Dx"])
    assert any(issubclass(w.category, ZeroFunctionWarning) for w in rec)
    assert out.rank() == 0


def test_zero_factor_in_product_warns():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        out = annihilator("0 * LaguerreL(n, a, x)", ["Sn", "Dx"])
    assert any(issubclass(w.category, ZeroFunctionWarning) for w in rec)
    assert out.rank() == 0


def test_squared_laguerre_structure():
    out = annihilator("LaguerreL(n-1, 2*nu, 2*a*beta*r)^2",
                      ["Sn", "Dr", "Sp"])
    A = out.algebra
    assert out.rank() == 3
    assert out.basis[0] == parse_operator("Sp - 1", A)
    assert leads_by_name(out) == {"Sp", "Dr^2", "Sn*Dr", "Sn^2"}
    stair = [A.mono_str(m) or "1" for m in out.staircase()]
    assert stair == ["1", "Dr", "Sn"]


def test_laguerre_product_structure():
    out = annihilator(
        "LaguerreL(m-1, 2*nu, 2*a*beta*r)*LaguerreL(n-1, 2*nu, 2*a*beta*r)",
        ["Sm", "Sn", "Dr", "Sp"])
    A = out.algebra
    assert out.rank() == 4
    mixed = parse_operator(
        "m*Sm + n*Sn - r*Dr + 4*a*beta*r - m - 4*nu - n", A)
    assert mixed in out.basis
    stair = [A.mono_str(m) or "1" for m in out.staircase()]
    assert stair == ["1", "Dr", "Sn", "Dr^2"]


def test_product_of_laguerre_and_hyper():
    out = annihilator("Exp(-x)*LaguerreL(n, a, x)", ["Sn", "Dx"])
    assert out.rank() == 2
    # D-lead equation transported by the exponential twist must survive:
    # if y = e^{-x} L, then L = e^x y reinserts into the classical ODE
    A = out.algebra
    twisted = parse_operator(
        "x*Dx^2 + (a+x+1)*Dx + a + n + 1", A)
    assert out.contains(twisted)
