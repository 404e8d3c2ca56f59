"""Annihilating ideals for building-block expressions.

Two sources of first principles live here.  Hyperexponential atoms
(powers, exponentials, Gamma/factorial quotients) are summarized by a
certificate — one logarithmic derivative per continuous variable, one
shift quotient per discrete variable — giving a rank-1 ideal of
first-order operators.  Laguerre polynomials carry a fixed classical
rank-2 system that gets transported through index offsets and affine
argument changes.  The top-level `annihilator` walks the expression
tree and combines the pieces with the closure constructions.
"""

from __future__ import annotations

import warnings
from fractions import Fraction

from . import textio
from .closure import (
    dfinite_plus,
    dfinite_symmetric_square,
    dfinite_times,
)
from .errors import (
    AlgebraError,
    DegenerateScale,
    DivisionError,
    UnsupportedExpression,
    ZeroFunctionWarning,
)
from .groebner import AnnihilatingIdeal
from .ore import DERIVATION, SHIFT, GeneratorSpec, OreAlgebra
from .polys import Rat, VariableTable
from .textio import Add, Call, Mul, Num, Pow, Sym

_FUNCTIONS = {
    "Exp": 1,
    "Sqrt": 1,
    "Square": 1,
    "Factorial": 1,
    "GammaQ": (1, 2),
    "LaguerreL": (3, 3),
}


class _NotRational(Exception):
    pass


class _NotHyper(Exception):
    pass


class _ZeroFunction(Exception):
    pass


# -- surface syntax ---------------------------------------------------


def parse_expression(src):
    """Parse DSL text and validate the structural invariants."""
    ast = textio.parse_expression(src)
    _validate(ast)
    return ast


def _validate(e):
    if isinstance(e, Call):
        arity = _FUNCTIONS.get(e.func)
        if arity is None:
            raise UnsupportedExpression(f"unknown function {e.func!r}")
        lo, hi = (arity, arity) if isinstance(arity, int) else arity
        if not lo <= len(e.args) <= hi:
            raise UnsupportedExpression(
                f"{e.func} expects {lo}"
                + (f"..{hi}" if hi != lo else "") + " arguments")
        if e.func == "LaguerreL":
            _check_integer_affine(e.args[0], "LaguerreL index")
        for a in e.args:
            _validate(a)
    elif isinstance(e, (Add, Mul)):
        for a in e.args:
            _validate(a)
    elif isinstance(e, Pow):
        _validate(e.base)
        _validate(e.exponent)


def _check_integer_affine(e, what):
    names = sorted(_symbols(e))
    table = VariableTable(tuple(names), ("parameter",) * len(names))
    try:
        val = _expr_to_rat(e, table)
    except _NotRational:
        raise UnsupportedExpression(f"{what} must be integer-affine") from None
    if not val.is_polynomial():
        raise UnsupportedExpression(f"{what} must be integer-affine")
    for expt, coeff in val.poly().terms.items():
        if sum(expt) > 1 or Fraction(coeff).denominator != 1:
            raise UnsupportedExpression(f"{what} must be integer-affine")


def _symbols(e, acc=None):
    if acc is None:
        acc = set()
    if isinstance(e, Sym):
        acc.add(e.name)
    elif isinstance(e, (Add, Mul)):
        for a in e.args:
            _symbols(a, acc)
    elif isinstance(e, Pow):
        _symbols(e.base, acc)
        _symbols(e.exponent, acc)
    elif isinstance(e, Call):
        for a in e.args:
            _symbols(a, acc)
    return acc


def _expr_to_rat(e, table):
    if isinstance(e, Num):
        return Rat.const(table, e.value)
    if isinstance(e, Sym):
        if e.name not in table:
            raise _NotRational(e.name)
        return Rat.var(table, e.name)
    if isinstance(e, Add):
        out = Rat.zero(table)
        for a in e.args:
            out = out + _expr_to_rat(a, table)
        return out
    if isinstance(e, Mul):
        out = Rat.one(table)
        for a in e.args:
            out = out * _expr_to_rat(a, table)
        return out
    if isinstance(e, Pow):
        ev = _expr_to_rat(e.exponent, table)
        if not ev.is_constant():
            raise _NotRational("symbolic exponent")
        k = ev.constant_value()
        if Fraction(k).denominator != 1:
            raise _NotRational("fractional exponent")
        base = _expr_to_rat(e.base, table)
        k = int(k)
        if k < 0 and base.is_zero():
            raise _NotRational("zero to a negative power")
        return base ** k
    raise _NotRational(type(e).__name__)


# -- hyperexponential certificates ------------------------------------


class HyperAtomCertificate:
    """Log-derivatives (continuous) and shift quotients (discrete) of a
    single nonzero term; combines multiplicatively."""

    def __init__(self, table, logder, quotient):
        self.table = table
        self.logder = logder      # name -> Rat
        self.quotient = quotient  # name -> Rat

    @classmethod
    def trivial(cls, table):
        ld = {}
        q = {}
        for name in table.names:
            kind = table.kind(name)
            if kind == "continuous":
                ld[name] = Rat.zero(table)
            elif kind == "discrete":
                q[name] = Rat.one(table)
        return cls(table, ld, q)

    def times(self, other):
        ld = {v: self.logder[v] + other.logder[v] for v in self.logder}
        q = {v: self.quotient[v] * other.quotient[v] for v in self.quotient}
        return HyperAtomCertificate(self.table, ld, q)

    def power(self, k):
        if isinstance(k, Fraction) and k.denominator != 1:
            for v, q in self.quotient.items():
                if not q.is_one():
                    raise UnsupportedExpression(
                        f"fractional power makes the {v}-shift quotient "
                        "irrational")
            ld = {v: d * k for v, d in self.logder.items()}
            return HyperAtomCertificate(self.table, ld, dict(self.quotient))
        k = int(k)
        ld = {v: d * k for v, d in self.logder.items()}
        q = {v: r ** k for v, r in self.quotient.items()}
        return HyperAtomCertificate(self.table, ld, q)


def _rat_certificate(u, table):
    if u.is_zero():
        raise _ZeroFunction
    cert = HyperAtomCertificate.trivial(table)
    for v in cert.logder:
        cert.logder[v] = u.derivative(v) / u
    for v in cert.quotient:
        cert.quotient[v] = u.shift(v, 1) / u
    return cert


def _pow_certificate(u, e, table):
    """Certificate of u^e for rational u and a symbolic exponent e."""
    if u.is_zero():
        if e.is_constant() and Fraction(e.constant_value()) <= 0:
            raise DivisionError("zero base with a nonpositive exponent")
        raise _ZeroFunction
    for name in table.names:
        if table.kind(name) == "continuous" and _uses(e, name):
            raise UnsupportedExpression(
                f"exponent must not involve the continuous variable {name}")
    cert = HyperAtomCertificate.trivial(table)
    for v in cert.logder:
        cert.logder[v] = e * u.derivative(v) / u
    for v in cert.quotient:
        step = e.shift(v, 1) - e
        if not step.is_constant():
            raise UnsupportedExpression(
                f"exponent must be affine in the discrete variable {v}")
        d = Fraction(step.constant_value())
        su = u.shift(v, 1)
        if su == u:
            if d == 0:
                continue
            if d.denominator != 1:
                raise UnsupportedExpression(
                    f"{v}-step of the exponent must be an integer")
            cert.quotient[v] = u ** int(d)
        else:
            # base moves with v: only a constant integer exponent keeps
            # the shift quotient rational
            if not e.is_constant():
                raise UnsupportedExpression(
                    f"base and exponent both depend on {v}")
            k = Fraction(e.constant_value())
            if k.denominator != 1:
                raise UnsupportedExpression(
                    f"fractional power of a {v}-dependent base")
            cert.quotient[v] = (su / u) ** int(k)
    return cert


def _gamma_certificate(u, table):
    for name in table.names:
        if table.kind(name) == "continuous" and _uses(u, name):
            raise UnsupportedExpression(
                "GammaQ argument must not involve continuous variables")
    cert = HyperAtomCertificate.trivial(table)
    for v in cert.quotient:
        step = u.shift(v, 1) - u
        if not step.is_constant():
            raise UnsupportedExpression(
                f"GammaQ argument must be affine in {v}")
        d = Fraction(step.constant_value())
        if d.denominator != 1:
            raise UnsupportedExpression(
                f"GammaQ argument must move by integers in {v}")
        d = int(d)
        if d > 0:
            q = Rat.one(table)
            for j in range(d):
                q = q * (u + j)
            cert.quotient[v] = q
        elif d < 0:
            q = Rat.one(table)
            for j in range(1, -d + 1):
                q = q * (u - j)
            cert.quotient[v] = q.inverse()
    return cert


def _uses(rat, name):
    return rat.num.uses(name) or rat.den.uses(name)


def _certificate(e, table):
    """Hyper-atom certificate of an expression, or _NotHyper."""
    try:
        return _rat_certificate(_expr_to_rat(e, table), table)
    except _NotRational:
        pass
    if isinstance(e, Mul):
        cert = None
        for a in e.args:
            c = _certificate(a, table)
            cert = c if cert is None else cert.times(c)
        return cert
    if isinstance(e, Pow):
        try:
            ev = _expr_to_rat(e.exponent, table)
        except _NotRational:
            raise UnsupportedExpression(
                "exponent must be a rational expression") from None
        try:
            u = _expr_to_rat(e.base, table)
        except _NotRational:
            base = _certificate(e.base, table)
            if not ev.is_constant():
                raise UnsupportedExpression(
                    "symbolic power of a non-rational base") from None
            return base.power(Fraction(ev.constant_value()))
        return _pow_certificate(u, ev, table)
    if isinstance(e, Call):
        if e.func == "Exp":
            g = _call_arg_rat(e, 0, table)
            cert = HyperAtomCertificate.trivial(table)
            for v in cert.quotient:
                if g.shift(v, 1) != g:
                    raise UnsupportedExpression(
                        f"Exp argument must not involve the discrete "
                        f"variable {v}")
            for v in cert.logder:
                cert.logder[v] = g.derivative(v)
            return cert
        if e.func == "Sqrt":
            return _certificate(Pow(e.args[0], Num(Fraction(1, 2))), table)
        if e.func == "Factorial":
            u = _call_arg_rat(e, 0, table)
            return _gamma_certificate(u + 1, table)
        if e.func == "GammaQ":
            u = _call_arg_rat(e, 0, table)
            cert = _gamma_certificate(u, table)
            if len(e.args) == 2:
                w = _call_arg_rat(e, 1, table)
                cert = cert.times(_gamma_certificate(w, table).power(-1))
            return cert
        if e.func == "Square":
            return _certificate(e.args[0], table).power(2)
        raise _NotHyper(e.func)
    raise _NotHyper(type(e).__name__)


def _call_arg_rat(e, i, table):
    try:
        return _expr_to_rat(e.args[i], table)
    except _NotRational:
        raise UnsupportedExpression(
            f"argument {i + 1} of {e.func} must be a rational "
            "expression") from None


def _certificate_ideal(cert, algebra):
    ops = []
    for spec in algebra.gens:
        g = algebra.gen(spec.name)
        if spec.kind == DERIVATION:
            rhs = cert.logder[spec.var]
        else:
            rhs = cert.quotient[spec.var]
        ops.append((g - algebra.from_terms(
            {(0,) * len(algebra.gens): rhs})).normalized())
    return AnnihilatingIdeal.from_generators(algebra, ops)


# -- the classical Laguerre system ------------------------------------


def _laguerre_ideal(index, order, argument, algebra):
    table = algebra.table
    shift_vars = {g.var: g.name for g in algebra.gens if g.kind == SHIFT}
    deriv_vars = {g.var: g.name for g in algebra.gens if g.kind == DERIVATION}

    idx = _arg_rat(index, table, "LaguerreL index")
    if not idx.is_polynomial():
        raise UnsupportedExpression("LaguerreL index must be integer-affine")
    idx_var = None
    for v in shift_vars:
        step = idx.shift(v, 1) - idx
        if step.is_zero():
            continue
        if not (step.is_constant() and step.constant_value() == 1):
            raise UnsupportedExpression(
                "LaguerreL index must have unit slope in its discrete "
                "variable")
        if idx_var is not None:
            raise UnsupportedExpression(
                "LaguerreL index must involve a single discrete variable")
        idx_var = v
    if idx_var is None and not idx.is_constant():
        raise UnsupportedExpression(
            "LaguerreL index must be integer-affine in a shifted variable")

    arg = _arg_rat(argument, table, "LaguerreL argument")
    arg_var = None
    for name in table.names:
        if table.kind(name) == "continuous" and _uses(arg, name):
            if arg_var is not None:
                raise UnsupportedExpression(
                    "LaguerreL argument must involve a single continuous "
                    "variable")
            arg_var = name
    if arg_var is None or arg_var not in deriv_vars:
        raise UnsupportedExpression(
            "LaguerreL argument needs a continuous variable with a "
            "derivation")
    slope = arg.derivative(arg_var)
    if _uses(slope, arg_var) or _uses(arg - slope * Rat.var(table, arg_var),
                                      arg_var):
        raise UnsupportedExpression("LaguerreL argument must be affine")
    for v in shift_vars:
        if arg.shift(v, 1) != arg:
            raise UnsupportedExpression(
                f"LaguerreL argument must not involve the shifted "
                f"variable {v}")
    if slope.is_zero():
        raise DegenerateScale("LaguerreL argument has zero slope")

    order_rat = _arg_rat(order, table, "LaguerreL order")
    order_var = None
    for v in shift_vars:
        if order_rat == Rat.var(table, v):
            order_var = v
            break
    if order_var is None:
        for name in table.names:
            if table.kind(name) != "parameter" and _uses(order_rat, name):
                raise UnsupportedExpression(
                    "LaguerreL order must be a parameter expression or a "
                    "shifted variable")

    D = algebra.gen(deriv_vars[arg_var])
    li = slope.inverse()
    ops = []
    used = {deriv_vars[arg_var]}
    # transported second-order equation in the argument direction
    ops.append(((D * D).scale(arg * li * li)
                + D.scale((order_rat - arg + 1) * li)
                + algebra.from_terms({(0,) * len(algebra.gens): idx}))
               .normalized())
    if idx_var is not None:
        S = algebra.gen(shift_vars[idx_var])
        used.add(shift_vars[idx_var])
        ops.append((S.scale(idx + 1) - D.scale(arg * li)
                    + algebra.from_terms(
                        {(0,) * len(algebra.gens): arg - order_rat - idx - 1}))
                   .normalized())
    if order_var is not None:
        So = algebra.gen(shift_vars[order_var])
        used.add(shift_vars[order_var])
        ops.append((So + D.scale(li) - algebra.one()).normalized())
    for spec in algebra.gens:
        if spec.name in used:
            continue
        g = algebra.gen(spec.name)
        ops.append(g - algebra.one() if spec.kind == SHIFT else g)
    return AnnihilatingIdeal.from_generators(algebra, ops)


def _arg_rat(value, table, what):
    if isinstance(value, Rat):
        return value
    if isinstance(value, str):
        value = parse_expression(value)
    try:
        return _expr_to_rat(value, table)
    except _NotRational:
        raise UnsupportedExpression(
            f"{what} must be a rational expression") from None


# -- public constructors ----------------------------------------------


def build_algebra(e, gens):
    """Ore algebra for an expression: generator variables keep their
    declared kinds, every other symbol is a parameter."""
    specs = tuple(standard_generator(g) if isinstance(g, str) else g
                  for g in gens)
    names = []
    kinds = []
    for s in specs:
        if s.var not in names:
            names.append(s.var)
            kinds.append("continuous" if s.kind == DERIVATION else "discrete")
    syms = _symbols(e) if not isinstance(e, (list, tuple)) else \
        set().union(*(_symbols(x) for x in e))
    for name in sorted(syms):
        if name not in names:
            names.append(name)
            kinds.append("parameter")
    table = VariableTable(tuple(names), tuple(kinds))
    return OreAlgebra(table, specs)


def standard_generator(name):
    """S<var> is the shift on <var>, D<var> the derivation on <var>."""
    if len(name) > 1 and name[0] == "S":
        return GeneratorSpec(name, SHIFT, name[1:])
    if len(name) > 1 and name[0] == "D":
        return GeneratorSpec(name, DERIVATION, name[1:])
    raise AlgebraError(
        f"cannot infer the action of generator {name!r}; expected an S- or "
        "D-prefixed name")


def _as_ast(e):
    return parse_expression(e) if isinstance(e, str) else e


def _unit_ideal(algebra):
    return AnnihilatingIdeal.from_generators(algebra, [algebra.one()])


def hyperatom_annihilator(e, gens):
    """Rank-1 ideal for a product of hyperexponential atoms."""
    e = _as_ast(e)
    algebra = gens if isinstance(gens, OreAlgebra) else build_algebra(e, gens)
    try:
        cert = _certificate(e, algebra.table)
    except _ZeroFunction:
        warnings.warn("expression is identically zero",
                      ZeroFunctionWarning, stacklevel=2)
        return _unit_ideal(algebra)
    except _NotHyper as exc:
        raise UnsupportedExpression(
            f"not a hyperexponential atom: {exc.args[0]}") from None
    return _certificate_ideal(cert, algebra)


def laguerre_annihilator(index, order, argument, gens):
    """Annihilator of LaguerreL(index, order, argument)."""
    asts = [_as_ast(x) if isinstance(x, str) else x
            for x in (index, order, argument)]
    if isinstance(gens, OreAlgebra):
        algebra = gens
    else:
        exprs = [x for x in asts if not isinstance(x, Rat)]
        algebra = build_algebra(exprs, gens)
    return _laguerre_ideal(asts[0], asts[1], asts[2], algebra)


def annihilator(e, gens):
    """Annihilating ideal of a DSL expression over the given generators."""
    e = _as_ast(e)
    algebra = gens if isinstance(gens, OreAlgebra) else build_algebra(e, gens)
    return _dispatch(e, algebra)


def _dispatch(e, algebra):
    try:
        cert = _certificate(e, algebra.table)
        return _certificate_ideal(cert, algebra)
    except _ZeroFunction:
        warnings.warn("expression is identically zero",
                      ZeroFunctionWarning, stacklevel=3)
        return _unit_ideal(algebra)
    except _NotHyper:
        pass
    if isinstance(e, Add):
        out = None
        for a in e.args:
            ideal = _dispatch(a, algebra)
            out = ideal if out is None else dfinite_plus(out, ideal)
        return out
    if isinstance(e, Mul):
        hypers = []
        specials = []
        try:
            for a in e.args:
                try:
                    hypers.append(_certificate(a, algebra.table))
                except _NotHyper:
                    specials.append(a)
        except _ZeroFunction:
            warnings.warn("expression is identically zero",
                          ZeroFunctionWarning, stacklevel=3)
            return _unit_ideal(algebra)
        ideals = []
        if hypers:
            cert = hypers[0]
            for c in hypers[1:]:
                cert = cert.times(c)
            ideals.append(_certificate_ideal(cert, algebra))
        ideals.extend(_dispatch(a, algebra) for a in specials)
        out = ideals[0]
        for ideal in ideals[1:]:
            out = dfinite_times(out, ideal)
        return out
    if isinstance(e, Pow) or (isinstance(e, Call) and e.func == "Square"):
        if isinstance(e, Call):
            base, k = e.args[0], 2
        else:
            base = e.base
            try:
                kv = _expr_to_rat(e.exponent, algebra.table)
            except _NotRational:
                kv = None
            if kv is None or not kv.is_constant() \
                    or Fraction(kv.constant_value()).denominator != 1:
                raise UnsupportedExpression(
                    "power of a non-atom needs a nonnegative integer "
                    "exponent")
            k = int(kv.constant_value())
        if k < 0:
            raise UnsupportedExpression(
                "negative power of a non-atom is not finite-rank")
        if k == 0:
            return _certificate_ideal(
                HyperAtomCertificate.trivial(algebra.table), algebra)
        if k == 1:
            return _dispatch(base, algebra)
        if k == 2:
            return dfinite_symmetric_square(_dispatch(base, algebra))
        return dfinite_times(_dispatch(base, algebra),
                             _dispatch(Pow(base, Num(k - 1)), algebra))
    if isinstance(e, Call) and e.func == "LaguerreL":
        return _laguerre_ideal(e.args[0], e.args[1], e.args[2], algebra)
    raise UnsupportedExpression(f"cannot annihilate {e!r}")
