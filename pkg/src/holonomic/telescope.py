"""Creative telescoping for parametrized integrals.

The input ideal lives in an algebra with a derivation D in the
integration variable and a shift S in the recursion variable.  A
telescoper/certificate pair satisfies

    T + D*C  in  I,      T = sum_i t_i S^i,

with every t_i free of the integration variable.  Integrating the
identity over the halfline turns T into a recurrence for the integral;
D*C contributes only boundary values, which must be checked to vanish
before the recurrence may be called homogeneous.

The search reduces T + D*C to normal form and equates all staircase
coordinates to zero.  For a staircase element whose D-bump stays inside
the staircase, the bumped coordinate equation determines that element's
certificate coefficient from the one above it in the D-chain; those
unknowns are eliminated exactly, so only the chain tops get an explicit
numerator ansatz u(r)/w(r), with w the squarefree part (in the
integration variable) of the basis leading coefficients (retries square
it).  The remaining equations are assembled once, denominator-free, at
full ansatz width; a candidate (order, degree) cell is a column slice.
Cells are screened modulo a word-sized prime at two random parameter
points before any symbolic elimination runs, and within one order the
minimal viable degree is found by bisection (column sets grow with the
degree, so viability is monotone).
"""

from __future__ import annotations

import random

from .closure import IdealModel
from .errors import (AlgebraError, InhomogeneousResidual, InvalidCertificate,
                     SearchExhausted)
from .linalg import nullspace
from .ore import DERIVATION, SHIFT, OrePolynomial, mono_mul
from .polys import Poly, Rat, poly_gcd, poly_lcm


class TelescopingResult:
    """A telescoper T and certificate C with T + D*C in the ideal."""

    def __init__(self, telescoper, certificate, int_var, rec_var,
                 d_name, s_name):
        self.telescoper = telescoper
        self.certificate = certificate
        self.int_var = int_var
        self.rec_var = rec_var
        self.d_name = d_name
        self.s_name = s_name

    @property
    def order(self):
        return self.telescoper.degree_in_gen(self.s_name)

    def combination(self):
        """The member T + D*C of the ideal."""
        alg = self.telescoper.algebra
        return self.telescoper + alg.gen(self.d_name) * self.certificate

    def __str__(self):
        return f"T = {self.telescoper}\nC = {self.certificate}"


class Recurrence:
    """sum_j coefficients[j] * A(var + j) = inhomogeneity.

    Leading and trailing coefficients are nonzero; ``inhomogeneity`` is
    None for a homogeneous recurrence, otherwise a marker describing the
    unevaluated residual (e.g. a boundary term).
    """

    def __init__(self, order, coefficients, var, inhomogeneity=None):
        if len(coefficients) != order + 1:
            raise ValueError("need order + 1 coefficients")
        if order and (coefficients[0].is_zero() or coefficients[-1].is_zero()):
            raise ValueError("leading/trailing coefficient vanished")
        self.order = order
        self.coefficients = tuple(coefficients)
        self.var = var
        self.inhomogeneity = inhomogeneity

    def solved_coefficients(self):
        """Right side of A(var+1) = sum_j out[j-1] * A(var+1-j).

        The recurrence is shifted so its top index is var+1 and divided
        by the leading coefficient.
        """
        s = self.order - 1
        lead = self.coefficients[-1].shift(self.var, -s)
        out = []
        for j in range(1, self.order + 1):
            c = self.coefficients[self.order - j].shift(self.var, -s)
            out.append(-(c / lead))
        return out

    def __str__(self):
        v = self.var
        if self.order == 0:
            return f"A({v}) = 0"
        parts = []
        for j, c in enumerate(self.solved_coefficients(), start=1):
            if c.is_zero():
                continue
            off = 1 - j
            arg = f"{v}{off:+d}" if off else v
            parts.append(f"({c})*A({arg})")
        rhs = " + ".join(parts) if parts else "0"
        if self.inhomogeneity is not None:
            rhs += f" + [{self.inhomogeneity}]"
        return f"A({v}+1) = {rhs}"


# -- coordinate equations ---------------------------------------------


class _Linear:
    """Linear form in the telescoper unknowns t_i and the k-th
    derivatives of the chain-top certificate coefficients."""

    __slots__ = ("t", "c")

    def __init__(self, t=None, c=None):
        self.t = {} if t is None else t
        self.c = {} if c is None else c

    @staticmethod
    def _acc(d, key, f):
        g = d.get(key)
        g = f if g is None else g + f
        if g.is_zero():
            d.pop(key, None)
        else:
            d[key] = g

    def plus(self, other):
        t, c = dict(self.t), dict(self.c)
        for k, f in other.t.items():
            self._acc(t, k, f)
        for k, f in other.c.items():
            self._acc(c, k, f)
        return _Linear(t, c)

    def negated(self):
        return _Linear({k: -f for k, f in self.t.items()},
                       {k: -f for k, f in self.c.items()})

    def deriv(self, var):
        t, c = {}, {}
        for k, f in self.t.items():
            fd = f.derivative(var)
            if not fd.is_zero():
                t[k] = fd
        for (tp, k), f in self.c.items():
            fd = f.derivative(var)
            if not fd.is_zero():
                self._acc(c, (tp, k), fd)
            self._acc(c, (tp, k + 1), f)
        return _Linear(t, c)


def _gen_for(algebra, kind, var, what):
    for g in algebra.gens:
        if g.kind == kind and g.var == var:
            return g.name
    raise AlgebraError(f"algebra has no {what} acting on {var!r}")


def _chain_equations(model, int_var, s_name, d_name, max_order):
    """Eliminate chained certificate coefficients.

    Returns (equations, tops, cmap) where cmap gives every staircase
    coefficient as a _Linear in the surviving unknowns.
    """
    algebra = model.algebra
    table = algebra.table
    di = algebra.gen_index(d_name)
    e_d = algebra.unit_mono(d_name)
    B = model.labels
    index = {b: i for i, b in enumerate(B)}

    vvecs = [model.start_vector()]
    for _ in range(max_order):
        vvecs.append(model.apply(s_name, vvecs[-1]))

    tops = [b for b in B if mono_mul(b, e_d) not in index]
    tpos = {b: j for j, b in enumerate(tops)}
    acols = {b: model.column(di, b) for b in tops}
    one = Rat.one(table)

    def row_terms(ix):
        lin = _Linear()
        for i, vv in enumerate(vvecs):
            if not vv[ix].is_zero():
                lin.t[i] = vv[ix]
        for b in tops:
            f = acols[b][ix]
            if not f.is_zero():
                _Linear._acc(lin.c, (tpos[b], 0), f)
        return lin

    cmap = {}

    def c_expr(b):
        out = cmap.get(b)
        if out is not None:
            return out
        if b in tpos:
            out = _Linear(c={(tpos[b], 0): one})
        else:
            bp = mono_mul(b, e_d)
            lin = row_terms(index[bp]).plus(c_expr(bp).deriv(int_var))
            out = lin.negated()
        cmap[b] = out
        return out

    eqs = [row_terms(index[b]).plus(c_expr(b).deriv(int_var))
           for b in B if not b[di]]
    for b in B:
        c_expr(b)
    return eqs, tops, cmap


# -- the denominator guess and the full linear system -----------------


def _certificate_denominator(ideal, eqs, int_var):
    table = ideal.algebra.table
    acc = Poly.const(table, 1)
    for g in ideal.basis:
        acc = poly_lcm(acc, g.lead()[1].num)
    for lin in eqs:
        for f in list(lin.t.values()) + list(lin.c.values()):
            if not f.den.is_constant():
                acc = poly_lcm(acc, f.den)
    d = acc.derivative(int_var)
    if d.is_zero():
        return Poly.const(table, 1)
    sqf = acc.exact_div(poly_gcd(acc, d))
    if not sqf.uses(int_var):
        return Poly.const(table, 1)
    return sqf.primitive()


def _full_rows(eqs, ntops, w, mpow, kmax, max_order, max_degree,
               table, int_var):
    """Sparse denominator-free rows of the full-width system.

    Columns 0..max_order are the t_i; column (max_order+1) + tp*(max_degree+1)
    + j is the coefficient of r^j in the top-tp numerator.  Every equation
    is multiplied by its coefficient-denominator lcm and by w^(mpow+kmax),
    then split into one row per power of the integration variable, so all
    entries are polynomials free of it.  A cell (order d, degree N) of the
    search is a column slice of these rows.
    """
    ri = table.index(int_var)
    r = Poly.var(table, int_var)
    wd = w.derivative(int_var)
    wpow = [Poly.const(table, 1)]
    for _ in range(kmax + 1):
        wpow.append(wpow[-1] * w)
    # gnum[j][k] * w^-(mpow+k) is the k-th derivative of r^j / w^mpow
    gnum = []
    rj = Poly.const(table, 1)
    for _ in range(max_degree + 1):
        row = [rj]
        for k in range(kmax):
            g = row[-1]
            row.append(g.derivative(int_var) * w - g * wd * (mpow + k))
        gnum.append(row)
        rj = rj * r
    wfull = wpow[kmax] * w ** mpow

    tcols = max_order + 1
    ncols = tcols + ntops * (max_degree + 1)
    rows = []
    for lin in eqs:
        den = Poly.const(table, 1)
        for f in list(lin.t.values()) + list(lin.c.values()):
            if not f.den.is_constant():
                den = poly_lcm(den, f.den)
        cols = {}
        for i, f in lin.t.items():
            if i <= max_order:
                cols[i] = f.num * den.exact_div(f.den) * wfull
        for (tp, k), f in lin.c.items():
            fh = f.num * den.exact_div(f.den) * wpow[kmax - k]
            base = tcols + tp * (max_degree + 1)
            for j in range(max_degree + 1):
                p = fh * gnum[j][k]
                c = base + j
                cols[c] = cols[c] + p if c in cols else p
        bypow = {}
        for c, p in cols.items():
            if p.is_zero():
                continue
            for e, cf in p.terms.items():
                e2 = e[:ri] + (0,) + e[ri + 1:]
                bypow.setdefault(e[ri], {}).setdefault(c, {})[e2] = cf
        for s in sorted(bypow):
            rows.append({c: Poly.make(table, terms)
                         for c, terms in bypow[s].items()})
    return rows, ncols


# -- modular screening ------------------------------------------------

_PRIMES = (2147483647, 2147483629)


def _poly_mod(p, vals, prime):
    acc = 0
    for e, c in p.terms.items():
        t = c % prime
        for idx, ex in enumerate(e):
            if ex:
                t = t * pow(vals[idx], ex, prime) % prime
        acc = (acc + t) % prime
    return acc


def _mod_matrix(rows, vals, prime):
    out = []
    for row in rows:
        out.append({c: v for c, p in row.items()
                    if (v := _poly_mod(p, vals, prime))})
    return out


def _mod_nullspace(rows, ncols, prime):
    rows = [r for r in (list(r) for r in rows) if any(r)]
    echelon, pivots = [], []
    col = 0
    while col < ncols and rows:
        pr = next((i for i, r in enumerate(rows) if r[col]), None)
        if pr is None:
            col += 1
            continue
        prow = rows.pop(pr)
        inv = pow(prow[col], prime - 2, prime)
        prow = [x * inv % prime for x in prow]
        nxt = []
        for r in rows:
            b = r[col]
            if b:
                r = [(x - b * y) % prime for x, y in zip(r, prow)]
            if any(r):
                nxt.append(r)
        rows = nxt
        echelon.append(prow)
        pivots.append(col)
        col += 1
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for i in range(len(echelon) - 1, -1, -1):
            pc = pivots[i]
            if pc > f:
                continue
            row = echelon[i]
            x[pc] = -sum(row[c] * x[c] for c in range(pc + 1, ncols)
                         if x[c]) % prime
        basis.append(x)
    return basis


def _probe_cell(matrices, sel, nt, prime_of):
    """Does some probe see a kernel vector with a nonzero t-part?

    Returns (viable, support) with support in local column positions;
    a cell is only discarded when every probe rejects it, so a single
    unlucky evaluation cannot hide a solution.
    """
    viable = False
    support = set()
    for mat, prime in zip(matrices, prime_of):
        rows = []
        for row in mat:
            r = [row.get(c, 0) for c in sel]
            if any(r):
                rows.append(r)
        for v in _mod_nullspace(rows, len(sel), prime):
            if any(v[:nt]):
                viable = True
            support.update(i for i, x in enumerate(v) if x)
    return viable, support


# -- the search -------------------------------------------------------


def _cell_columns(d, N, ntops, max_order, max_degree):
    sel = list(range(d + 1))
    tcols = max_order + 1
    for tp in range(ntops):
        base = tcols + tp * (max_degree + 1)
        sel.extend(range(base, base + N + 1))
    return sel


def _materialize(algebra, tvals, uvals, tops, cmap, w, mpow, kmax,
                 N, int_var, rec_var, d_name, s_name):
    table = algebra.table
    si = algebra.gen_index(s_name)
    width = len(algebra.gens)
    tterms = {}
    for i, f in tvals.items():
        if not f.is_zero():
            mono = tuple(i if g == si else 0 for g in range(width))
            tterms[mono] = f
    telescoper = OrePolynomial(algebra, tterms)

    rrat = Rat.var(table, int_var)
    wrat = Rat.from_poly(w ** mpow)
    topfns = []
    for tp in range(len(tops)):
        u = Rat.zero(table)
        rp = Rat.one(table)
        for j in range(N + 1):
            f = uvals.get((tp, j))
            if f is not None and not f.is_zero():
                u = u + f * rp
            rp = rp * rrat
        derivs = [u / wrat]
        for _ in range(kmax):
            derivs.append(derivs[-1].derivative(int_var))
        topfns.append(derivs)

    cterms = {}
    for b, lin in cmap.items():
        val = Rat.zero(table)
        for i, f in lin.t.items():
            tv = tvals.get(i)
            if tv is not None and not tv.is_zero():
                val = val + f * tv
        for (tp, k), f in lin.c.items():
            g = topfns[tp][k]
            if not g.is_zero():
                val = val + f * g
        if not val.is_zero():
            cterms[b] = val
    certificate = OrePolynomial(algebra, cterms)
    return TelescopingResult(telescoper, certificate, int_var, rec_var,
                             d_name, s_name)


def _solve_cell(ideal, rows, sel, d, N, tops, cmap, w, mpow, kmax,
                support, max_order, max_degree, int_var, rec_var,
                d_name, s_name):
    algebra = ideal.algebra
    table = algebra.table
    zero = Rat.zero(table)
    attempts = []
    if support is not None and len(support) < len(sel):
        attempts.append(sorted(set(range(d + 1)) | support))
    attempts.append(list(range(len(sel))))
    tcols = max_order + 1
    for local in attempts:
        cols = [sel[i] for i in local]
        srows = []
        for row in rows:
            rr = [Rat.from_poly(row[c]) if c in row else zero for c in cols]
            if any(not x.is_zero() for x in rr):
                srows.append(rr)
        for vec in nullspace(srows, len(cols), table):
            tvals, uvals = {}, {}
            for pos, f in zip(cols, vec):
                if f.is_zero():
                    continue
                if pos < tcols:
                    tvals[pos] = f
                else:
                    tp, j = divmod(pos - tcols, max_degree + 1)
                    uvals[(tp, j)] = f
            if not tvals:
                continue
            if any(f.num.uses(int_var) or f.den.uses(int_var)
                   for f in tvals.values()):
                continue
            res = _materialize(algebra, tvals, uvals, tops, cmap, w, mpow,
                               kmax, N, int_var, rec_var, d_name, s_name)
            # an order-0 pair with a certificate only states "the integral
            # is zero"; it carries no recursion and is treated as trivial
            if res.order == 0 and not res.certificate.is_zero():
                continue
            if ideal.normal_form(res.combination()).is_zero():
                return res
    return None


def find_creative_telescoping(ideal, int_var="r", rec_var="p",
                              max_order=4, max_degree=30, seed=7):
    """Search for a telescoper of minimal shift order.

    Orders are tried from 0 up; for a viable order the least certificate
    degree is located by bisection and solved exactly, with the probe
    support used to prune columns (and a full retry if pruning was too
    eager).  Raises SearchExhausted when the caps are hit.
    """
    algebra = ideal.algebra
    table = algebra.table
    d_name = _gen_for(algebra, DERIVATION, int_var, "derivation")
    s_name = _gen_for(algebra, SHIFT, rec_var, "shift")
    if not ideal.rank():
        return TelescopingResult(algebra.one(), algebra.zero(),
                                 int_var, rec_var, d_name, s_name)

    model = IdealModel(ideal)
    eqs, tops, cmap = _chain_equations(model, int_var, s_name, d_name,
                                       max_order)
    kmax = max((k for lin in eqs for (_, k) in lin.c), default=0)
    base = _certificate_denominator(ideal, eqs, int_var)
    rng = random.Random(seed)
    ri = table.index(int_var)

    for mpow in (1, 2, 4):
        if mpow > 1 and base.is_one():
            break
        w = base
        rows, ncols = _full_rows(eqs, len(tops), w, mpow, kmax,
                                 max_order, max_degree, table, int_var)
        matrices = []
        for prime in _PRIMES:
            vals = [0 if i == ri else rng.randrange(2, prime - 2)
                    for i in range(len(table.names))]
            matrices.append(_mod_matrix(rows, vals, prime))

        def cell(d, N):
            return _cell_columns(d, N, len(tops), max_order, max_degree)

        for d in range(max_order + 1):
            viable, _ = _probe_cell(matrices, cell(d, max_degree),
                                    d + 1, _PRIMES)
            if not viable:
                continue
            lo, hi = 0, max_degree
            while lo < hi:
                mid = (lo + hi) // 2
                ok, _ = _probe_cell(matrices, cell(d, mid), d + 1, _PRIMES)
                if ok:
                    hi = mid
                else:
                    lo = mid + 1
            for N in (lo, max_degree):
                sel = cell(d, N)
                _, support = _probe_cell(matrices, sel, d + 1, _PRIMES)
                res = _solve_cell(ideal, rows, sel, d, N, tops, cmap, w,
                                  mpow, kmax, support, max_order,
                                  max_degree, int_var, rec_var,
                                  d_name, s_name)
                if res is not None:
                    return res
                if lo == max_degree:
                    break
    raise SearchExhausted(
        f"no telescoper with order <= {max_order} and certificate "
        f"degree <= {max_degree}")


# -- checking and the recurrence --------------------------------------


def verify_telescoping(ideal, result, models=(), r_small=1e-3,
                       r_large=200.0, boundary_tol=1e-6):
    """Exact membership plus numeric boundary samples.

    Membership of T + D*C is checked by exact reduction; failure raises
    InvalidCertificate.  Each model must expose ``apply_operator`` and
    ``eval_at``; the magnitude of (C f)(r) is sampled near both ends of
    the halfline and reported, since vanishing boundary values are what
    make the telescoped recurrence homogeneous.
    """
    if not ideal.normal_form(result.combination()).is_zero():
        raise InvalidCertificate(
            "telescoper + D*certificate is not in the ideal")
    report = {"membership": True, "order": result.order, "boundary": [],
              "boundary_ok": None}
    for model in models:
        cf = model.apply_operator(result.certificate)
        report["boundary"].append((abs(cf.eval_at(r_small)),
                                   abs(cf.eval_at(r_large))))
    if report["boundary"]:
        report["boundary_ok"] = all(max(lo, hi) < boundary_tol
                                    for lo, hi in report["boundary"])
    return report


def recurrence_from_telescoper(result, boundary_ok=True):
    """Recurrence satisfied by the integral, from the telescoper alone.

    With vanishing boundary values the recurrence is homogeneous;
    otherwise an InhomogeneousResidual is raised carrying the recurrence
    with its boundary marker attached.
    """
    algebra = result.telescoper.algebra
    si = algebra.gen_index(result.s_name)
    by_i = {}
    for e, c in result.telescoper.terms.items():
        if any(x for g, x in enumerate(e) if g != si):
            raise InvalidCertificate("telescoper is not a pure shift operator")
        by_i[e[si]] = c
    imin = min(by_i)
    imax = max(by_i)
    var = result.rec_var
    zero = Rat.zero(algebra.table)
    coeffs = [by_i.get(imin + j, zero).shift(var, -imin)
              for j in range(imax - imin + 1)]
    rec = Recurrence(imax - imin, coeffs, var,
                     None if boundary_ok else "boundary residual")
    if not boundary_ok:
        raise InhomogeneousResidual(
            "boundary values do not vanish; the telescoped identity is "
            "inhomogeneous", recurrence=rec)
    return rec
