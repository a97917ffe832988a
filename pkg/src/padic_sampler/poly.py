"""Exact multivariate polynomials and their p-adic companions.

`MultiPoly` keeps arbitrary-size integer coefficients so variety
specifications stay exact and prime-independent; conversion to Q_p
happens only at evaluation or substitution time, producing `PadicPoly`
objects whose coefficients are capped-precision scalars.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .context import PadicContext
from .errors import (
    NegativeValuationCoefficientError,
    NotHomogeneousError,
    PolySyntaxError,
    UnknownVariableError,
)
from .scalar import PadicScalar
from .vectors import PadicVector


class MultiPoly:
    """Polynomial with integer coefficients in named variables.

    Stored in expanded canonical form: a map from exponent vectors to
    nonzero coefficients.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        if terms:
            arity = len(self.variables)
            for exps, c in terms.items():
                if len(exps) != arity:
                    raise ValueError("exponent vector arity mismatch")
                if c:
                    clean[tuple(exps)] = c
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, variables, c: int) -> "MultiPoly":
        zero = (0,) * len(variables)
        return cls(variables, {zero: c} if c else {})

    @classmethod
    def variable(cls, variables, name: str) -> "MultiPoly":
        i = list(variables).index(name)
        e = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, {e: 1})

    # -- ring operations -------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.variables != other.variables:
            raise ValueError("polynomials use different variable lists")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return MultiPoly(self.variables, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly(self.variables, terms)

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative exponent")
        out = MultiPoly.constant(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: int) -> "MultiPoly":
        return MultiPoly(self.variables, {e: c * v for e, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Degree of the zero polynomial is reported as 0."""
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    __hash__ = None

    # -- calculus and evaluation ------------------------------------------

    def partial(self, i: int) -> "MultiPoly":
        """Formal partial derivative in the i-th variable."""
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            e2 = tuple(x - 1 if j == i else x for j, x in enumerate(e))
            terms[e2] = terms.get(e2, 0) + c * e[i]
        return MultiPoly(self.variables, terms)

    def eval_int(self, values) -> int:
        """Exact evaluation at integer arguments (oracle-friendly)."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(values, e):
                t *= x**k
            total += t
        return total

    def eval_fraction(self, values) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            t = Fraction(c)
            for x, k in zip(values, e):
                t *= Fraction(x) ** k
            total += t
        return total

    def eval_padic(self, x: PadicVector) -> PadicScalar:
        """Evaluate at a p-adic point, nesting variable by variable."""
        if len(x) != len(self.variables):
            raise ValueError("point arity does not match polynomial")
        return _eval_nested(self.terms, x.entries, 0, x.ctx)

    def substitute_int_linear(self, matrix, new_variables=None) -> "MultiPoly":
        """x_i -> sum_j matrix[i][j] * y_j with exact integer entries."""
        nv = tuple(new_variables) if new_variables else self.variables
        forms = [
            MultiPoly(nv, {tuple(1 if t == j else 0 for t in range(len(nv))): m for j, m in enumerate(row) if m})
            for row in matrix
        ]
        out = MultiPoly(nv, {})
        cache = [{} for _ in forms]
        for e, c in self.terms.items():
            t = MultiPoly.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    t = t * _cached_power(forms[i], k, cache[i])
            out = out + t
        return out

    def reduce_mod(self, modulus: int) -> "MultiPoly":
        """Coefficientwise reduction into Z/modulus (kept in [0, modulus))."""
        return MultiPoly(self.variables, {e: c % modulus for e, c in self.terms.items()})

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0]))):
            factors = []
            if abs(c) != 1 or not any(e):
                factors.append(str(abs(c)))
            for name, k in zip(self.variables, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            term = "*".join(factors)
            chunks.append(("- " if c < 0 else "+ ") + term)
        text = " ".join(chunks)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    __repr__ = __str__


def _cached_power(poly, k, cache):
    if k not in cache:
        cache[k] = poly if k == 1 else _cached_power(poly, k - 1, cache) * poly
    return cache[k]


def _eval_nested(terms, point, depth, ctx):
    """Horner-by-variable evaluation of a term map at p-adic arguments."""
    if not terms:
        return ctx.zero()
    if depth == len(point):
        return ctx.integer(sum(terms.values()))
    groups = {}
    for e, c in terms.items():
        groups.setdefault(e[depth], {})[e] = c
    result = ctx.zero()
    x = point[depth]
    for k in sorted(groups, reverse=True):
        inner = _eval_nested(groups[k], point, depth + 1, ctx)
        if k and not x.is_zero():
            xp = x
            for _ in range(k - 1):
                xp = xp * x
            inner = inner * xp
        elif k:
            inner = ctx.zero()
        result = result + inner
    return result


# ---------------------------------------------------------------------------
# expression parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([()+\-*^]))")


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip():
                bad = pos + len(rest) - len(rest.lstrip())
                raise PolySyntaxError(f"unexpected character {text[bad]!r}", bad)
            break
        num, name, op = m.groups()
        if num is not None:
            out.append(("int", int(num), m.start(1)))
        elif name is not None:
            out.append(("name", name, m.start(2)))
        else:
            out.append(("op", op, m.start(3)))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.i = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expr(self) -> MultiPoly:
        kind, val, pos = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.next()
            negate = val == "-"
        node = self.term()
        if negate:
            node = -node
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                node = node + rhs if val == "+" else node - rhs
            else:
                return node

    def term(self) -> MultiPoly:
        node = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.next()
                node = node * self.factor()
            else:
                return node

    def factor(self) -> MultiPoly:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val, pos = self.next()
            if kind != "int":
                raise PolySyntaxError("exponent must be a nonnegative integer literal", pos)
            return base**val
        return base

    def atom(self) -> MultiPoly:
        kind, val, pos = self.next()
        if kind == "int":
            return MultiPoly.constant(self.variables, val)
        if kind == "name":
            if val not in self.variables:
                raise UnknownVariableError(f"unknown variable {val!r}")
            return MultiPoly.variable(self.variables, val)
        if kind == "op" and val == "(":
            node = self.expr()
            kind, val, pos = self.next()
            if not (kind == "op" and val == ")"):
                raise PolySyntaxError("expected ')'", pos)
            return node
        if kind == "op" and val == "-":
            return -self.atom()
        raise PolySyntaxError(f"unexpected token {val!r}", pos)


def parse_poly(text: str, variables) -> MultiPoly:
    """Parse an integer-coefficient expression over the given variables.

    Grammar: integers, variable names, `+ - * ^` and parentheses, with
    `^` taking nonnegative integer literals only.
    """
    parser = _Parser(_tokenize(text), variables)
    node = parser.expr()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise PolySyntaxError(f"trailing input {val!r}", pos)
    return node


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------


class PolySystem:
    """A list of polynomials over shared variables."""

    __slots__ = ("polys", "homogeneous")

    def __init__(self, polys, homogeneous: bool | None = None):
        polys = list(polys)
        if not polys:
            raise ValueError("a system needs at least one polynomial")
        vs = polys[0].variables
        if any(p.variables != vs for p in polys):
            raise ValueError("system polynomials use different variables")
        all_hom = all(p.is_homogeneous() for p in polys)
        if homogeneous and not all_hom:
            raise NotHomogeneousError("system declared homogeneous but is not")
        self.polys = polys
        self.homogeneous = all_hom if homogeneous is None else homogeneous

    @property
    def variables(self):
        return self.polys[0].variables

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    def eval_padic(self, x: PadicVector):
        return [p.eval_padic(x) for p in self.polys]

    def reduce_mod(self, modulus: int) -> "PolySystem":
        return PolySystem([p.reduce_mod(modulus) for p in self.polys], homogeneous=None)


def jacobian(sys: PolySystem):
    """r x N matrix of formal partial derivatives (as MultiPoly)."""
    n = len(sys.variables)
    return [[p.partial(j) for j in range(n)] for p in sys.polys]


def jacobian_at(jac_rows, x: PadicVector):
    """Evaluate a formal Jacobian at a point, as a PadicMatrix."""
    from .matrices import PadicMatrix

    return PadicMatrix(x.ctx, [[q.eval_padic(x) for q in row] for row in jac_rows])


def homogenize(sys: PolySystem, new_variable: str) -> PolySystem:
    """Standard homogenization with a fresh variable appended."""
    if new_variable in sys.variables:
        raise ValueError(f"variable {new_variable!r} already in use")
    nv = sys.variables + (new_variable,)
    out = []
    for p in sys.polys:
        d = p.total_degree()
        terms = {e + (d - sum(e),): c for e, c in p.terms.items()}
        out.append(MultiPoly(nv, terms))
    return PolySystem(out, homogeneous=True)


def dehomogenize(sys: PolySystem, chart_index: int) -> PolySystem:
    """Set the chart variable to 1 and drop it."""
    if not sys.homogeneous:
        raise NotHomogeneousError("dehomogenization requires a homogeneous system")
    vs = sys.variables
    if not (0 <= chart_index < len(vs)):
        raise ValueError("chart index out of range")
    nv = vs[:chart_index] + vs[chart_index + 1 :]
    out = []
    for p in sys.polys:
        terms = {}
        for e, c in p.terms.items():
            e2 = e[:chart_index] + e[chart_index + 1 :]
            terms[e2] = terms.get(e2, 0) + c
        out.append(MultiPoly(nv, terms))
    return PolySystem(out, homogeneous=None)


# ---------------------------------------------------------------------------
# polynomials with p-adic coefficients (substituted slice systems)
# ---------------------------------------------------------------------------


class PadicPoly:
    """Polynomial in `nvars` unnamed variables with PadicScalar coefficients."""

    __slots__ = ("ctx", "nvars", "terms")

    def __init__(self, ctx: PadicContext, nvars: int, terms=None):
        self.ctx = ctx
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                if not c.is_zero():
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def constant(cls, ctx, nvars, c: PadicScalar) -> "PadicPoly":
        return cls(ctx, nvars, {(0,) * nvars: c})

    @classmethod
    def linear_form(cls, ctx, nvars, constant: PadicScalar, coeffs) -> "PadicPoly":
        """constant + sum_j coeffs[j] * t_j."""
        terms = {(0,) * nvars: constant}
        for j, c in enumerate(coeffs):
            terms[tuple(1 if t == j else 0 for t in range(nvars))] = c
        return cls(ctx, nvars, terms)

    def __add__(self, other: "PadicPoly") -> "PadicPoly":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return PadicPoly(self.ctx, self.nvars, terms)

    def __mul__(self, other: "PadicPoly") -> "PadicPoly":
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t = c1 * c2
                terms[e] = terms[e] + t if e in terms else t
        return PadicPoly(self.ctx, self.nvars, terms)

    def scale_int(self, c: int) -> "PadicPoly":
        return PadicPoly(self.ctx, self.nvars, {e: s.mul_int(c) for e, s in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def eval(self, point) -> PadicScalar:
        """Evaluate at a tuple of PadicScalar arguments."""
        total = self.ctx.zero()
        cache = {}
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        xp = point[i]
                        for _ in range(k - 1):
                            xp = xp * point[i]
                        cache[key] = xp
                    t = t * cache[key]
            total = total + t
        return total

    def min_window(self) -> int:
        """Smallest (valuation + carried digits) over the coefficients.

        This is the number of digits to which the reduction of the
        polynomial is pinned down; the context precision when empty.
        """
        w = self.ctx.precision
        for c in self.terms.values():
            w = min(w, c.v + c.prec)
        return w

    def residue_terms(self, level: int) -> dict:
        """Exponent -> integer coefficient modulo p^level.

        Coefficients must lie in Z_p.
        """
        out = {}
        for e, c in self.terms.items():
            if c.v < 0:
                raise NegativeValuationCoefficientError(
                    f"coefficient with valuation {c.v} < 0"
                )
            r = c.residue(level)
            if r:
                out[e] = r
        return out


def substitute_affine(sys: PolySystem, u, W) -> list[PadicPoly]:
    """The system evaluated along x = u + W t, expanded in t.

    `u` is a PadicVector of length N, `W` an N x m direction matrix;
    result polynomials live in m variables with p-adic coefficients.
    """
    ctx = u.ctx
    m = W.ncols
    forms = [
        PadicPoly.linear_form(ctx, m, u[i], [W[i, j] for j in range(m)])
        for i in range(len(u))
    ]
    return compose_with_forms(sys, forms, ctx, m)


def compose_with_forms(sys: PolySystem, forms, ctx, m) -> list[PadicPoly]:
    """Substitute arbitrary PadicPoly forms for the system variables."""
    out = []
    caches = [{} for _ in forms]
    one = PadicPoly.constant(ctx, m, ctx.one())
    for p in sys.polys:
        acc = PadicPoly(ctx, m, {})
        for e, c in p.terms.items():
            t = one
            for i, k in enumerate(e):
                if k:
                    t = t * _cached_power(forms[i], k, caches[i])
            acc = acc + t.scale_int(c)
        out.append(acc)
    return out
