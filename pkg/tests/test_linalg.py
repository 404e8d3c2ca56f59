import random
from fractions import Fraction

import pytest

from holonomic.errors import NoSolution
from holonomic.linalg import (IncrementalBasis, frac_nullspace, nullspace,
                              solve)
from holonomic.polys import Poly, Rat, VariableTable


T = VariableTable(("n", "p"), ("discrete", "discrete"))


def C(x):
    return Rat.const(T, x)


def V(name):
    return Rat.var(T, name)


def test_incremental_basis_detects_dependence():
    ib = IncrementalBasis(T, 3)
    assert ib.add([C(1), C(0), C(1)]) is None
    assert ib.add([C(0), C(1), C(1)]) is None
    lam = ib.add([C(2), C(3), C(5)])
    assert lam == [C(2), C(3)]
    assert ib.size == 2


def test_incremental_basis_insertion_order_independence():
    # vectors whose pivots arrive out of order; single-pass reduction must
    # still see a clean echelon
    ib = IncrementalBasis(T, 3)
    assert ib.add([C(0), C(0), C(1)]) is None
    assert ib.add([C(1), C(2), C(3)]) is None
    lam = ib.add([C(2), C(4), C(1)])
    # 2*(1,2,3) - 5*(0,0,1)
    assert lam == [C(-5), C(2)]


def test_incremental_basis_rational_entries():
    n = V("n")
    ib = IncrementalBasis(T, 2)
    assert ib.add([n, C(1)]) is None
    lam = ib.add([n * n, n])
    assert lam == [n]
    assert ib.contains([n * 3, C(3)])
    assert not ib.contains([C(1), C(0)])


def test_incremental_basis_random_consistency():
    rng = random.Random(9)
    for _ in range(10):
        dim = 4
        ib = IncrementalBasis(T, dim)
        stored = []
        for _ in range(8):
            vec = [C(rng.randint(-3, 3)) for _ in range(dim)]
            lam = ib.add(vec)
            if lam is None:
                stored.append(vec)
            else:
                # expansion must reproduce the vector
                acc = [C(0)] * dim
                for c, v in zip(lam, stored):
                    acc = [a + c * b for a, b in zip(acc, v)]
                assert acc == vec


def test_nullspace_simple():
    # x + y = 0 over a 2-dim space
    basis = nullspace([[C(1), C(1)]], 2, T)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] == C(0)
    assert not v[0].is_zero()


def test_nullspace_rational_coefficients():
    n = V("n")
    rows = [[n, C(1), C(0)], [C(0), n, C(-1)]]
    basis = nullspace(rows, 3, T)
    assert len(basis) == 1
    v = basis[0]
    for row in rows:
        s = sum((a * b for a, b in zip(row, v)), C(0))
        assert s.is_zero()


def test_nullspace_full_rank():
    rows = [[C(1), C(0)], [C(0), C(1)]]
    assert nullspace(rows, 2, T) == []


def test_nullspace_random_annihilation():
    rng = random.Random(31)
    for _ in range(8):
        nrow, ncol = rng.randint(1, 4), rng.randint(2, 5)
        rows = [[C(rng.randint(-4, 4)) for _ in range(ncol)] for _ in range(nrow)]
        basis = nullspace(rows, ncol, T)
        for v in basis:
            for row in rows:
                s = sum((a * b for a, b in zip(row, v)), C(0))
                assert s.is_zero()


def test_solve_unique():
    rows = [[C(2), C(1)], [C(1), C(-1)]]
    x = solve(rows, [C(4), C(-1)], 2, T)
    assert x == [C(1), C(2)]


def test_solve_underdetermined_sets_free_to_zero():
    x = solve([[C(1), C(1)]], [C(3)], 2, T)
    assert x == [C(3), C(0)]


def test_solve_inconsistent():
    rows = [[C(1), C(1)], [C(2), C(2)]]
    with pytest.raises(NoSolution):
        solve(rows, [C(1), C(3)], 2, T)


def test_solve_rational_entries():
    n = V("n")
    rows = [[n, C(1)], [C(0), n]]
    x = solve(rows, [n * n + C(1), n], 2, T)
    assert x == [n, C(1)]


def test_frac_nullspace():
    rows = [[Fraction(1), Fraction(2), Fraction(0)],
            [Fraction(0), Fraction(1), Fraction(1)]]
    basis = frac_nullspace(rows, 3)
    assert len(basis) == 1
    v = basis[0]
    for row in rows:
        assert sum(a * b for a, b in zip(row, v)) == 0


def test_frac_nullspace_matches_symbolic():
    rng = random.Random(4)
    for _ in range(6):
        nrow, ncol = rng.randint(1, 3), rng.randint(2, 5)
        data = [[rng.randint(-4, 4) for _ in range(ncol)] for _ in range(nrow)]
        sym = nullspace([[C(x) for x in row] for row in data], ncol, T)
        num = frac_nullspace([[Fraction(x) for x in row] for row in data], ncol)
        assert len(sym) == len(num)
