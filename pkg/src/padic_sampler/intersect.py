"""Zero-dimensional solving over Z_p and slice intersection drivers.

Roots are found by enumerating residues mod p, lifting candidates with
an invertible mod-p Jacobian by Newton iteration (digit count doubles
per step), and refining candidates that are singular mod p by digit
branching with a depth cap. A slice whose candidates cannot be resolved
is flagged degenerate; callers resample it, which leaves the sampling
law unchanged because such slices form a measure-zero set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .context import PadicContext
from .errors import (
    DegenerateRootError,
    PrecisionExhausted,
    RankDeficientError,
)
from .matrices import PadicMatrix, orthonormal_kernel_basis, smith_normal_form, solve_affine_in_O
from .poly import MultiPoly, PadicPoly, PolySystem, compose_with_forms, substitute_affine
from .scalar import PadicScalar
from .vectors import PadicVector

# Refinement levels before a candidate is declared degenerate. Deep
# enough that two genuinely distinct roots colliding to this depth is a
# ~p^-10 event, i.e. resampling bias is far below Monte Carlo noise.
DEFAULT_MAX_REFINE_DEPTH = 10

_MIN_BRANCH_DIGITS = 2


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficients live modulo p^level)
# ---------------------------------------------------------------------------


def _wp_eval(terms, point, mod):
    total = 0
    cache = {}
    for e, c in terms.items():
        t = c
        for i, k in enumerate(e):
            if k:
                key = (i, k)
                xp = cache.get(key)
                if xp is None:
                    xp = pow(point[i], k, mod)
                    cache[key] = xp
                t = t * xp
        total += t
    return total % mod


def _wp_partial(terms, i):
    out = {}
    for e, c in terms.items():
        if e[i] == 0:
            continue
        e2 = tuple(x - 1 if j == i else x for j, x in enumerate(e))
        out[e2] = out.get(e2, 0) + c * e[i]
    return out


def _wp_shift(terms, center, p, mod, m):
    """Substitute x_i = center_i + p * s_i, coefficients mod `mod`."""
    out = terms
    for i in range(m):
        nxt = {}
        for e, c in out.items():
            k = e[i]
            base = e[:i] + (0,) + e[i + 1 :]
            # (center + p s)^k expanded by binomials
            coeff = c
            for t in range(k + 1):
                e2 = base[:i] + (t,) + base[i + 1 :]
                term = coeff * _binom(k, t) * pow(center[i], k - t, mod) * pow(p, t, mod) % mod
                if term:
                    nxt[e2] = (nxt.get(e2, 0) + term) % mod
        out = {e: c for e, c in nxt.items() if c}
    return out


_BINOM_CACHE = {}


def _binom(n, k):
    key = (n, k)
    if key not in _BINOM_CACHE:
        import math

        _BINOM_CACHE[key] = math.comb(n, k)
    return _BINOM_CACHE[key]


def _valp_bounded(n, p, cap):
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _det_mod(rows, mod):
    n = len(rows)
    if n == 1:
        return rows[0][0] % mod
    if n == 2:
        return (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]) % mod
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        s = rows[0][j] * _det_mod(minor, mod)
        total += -s if j % 2 else s
    return total % mod


def _solve_linear_unit(J, rhs, mod, p):
    """Solve J d = rhs mod `mod`; J must be invertible mod p."""
    n = len(J)
    A = [row[:] + [r] for row, r in zip(J, rhs)]
    for k in range(n):
        piv = next(i for i in range(k, n) if A[i][k] % p)
        A[k], A[piv] = A[piv], A[k]
        inv = pow(A[k][k], -1, mod)
        A[k] = [x * inv % mod for x in A[k]]
        for i in range(n):
            if i != k and A[i][k]:
                f = A[i][k]
                A[i] = [(x - f * y) % mod for x, y in zip(A[i], A[k])]
    return [A[i][n] for i in range(n)]


def _newton_lift(sub_terms, jac_terms, x0, level, ctx):
    """Lift a residue point with unit Jacobian to `level` digits."""
    p = ctx.p
    x = list(x0)
    c = 1
    while c < level:
        c2 = min(2 * c, level)
        mod = ctx.pw(c2)
        g = [_wp_eval(t, x, mod) for t in sub_terms]
        J = [[_wp_eval(d, x, mod) for d in row] for row in jac_terms]
        delta = _solve_linear_unit(J, [(-gi) % mod for gi in g], mod, p)
        x = [(xi + di) % mod for xi, di in zip(x, delta)]
        c = c2
    return x


# ---------------------------------------------------------------------------
# the branching residue solver
# ---------------------------------------------------------------------------


@dataclass
class _BranchResult:
    roots: list = field(default_factory=list)  # (coords mod p^digits, digits)
    degenerate: bool = False
    tried: int = 0


def _branch_roots(systems, m, level, ctx, depth, max_depth):
    """All Z_p roots of `systems` (list of term maps mod p^level) in m vars."""
    p = ctx.p
    res = _BranchResult()
    jac = [[_wp_partial(t, i) for i in range(m)] for t in systems]
    r = len(systems)
    for cand in product(range(p), repeat=m):
        if any(_wp_eval(t, cand, p) for t in systems):
            continue
        res.tried += 1
        J_modp = [[_wp_eval(d, cand, p) for d in row] for row in jac]
        sub = None
        for comb in combinations(range(r), m):
            if _det_mod([J_modp[i] for i in comb], p) % p:
                sub = comb
                break
        if sub is not None:
            x = _newton_lift(
                [systems[i] for i in sub], [jac[i] for i in sub], cand, level, ctx
            )
            mod = ctx.pw(level)
            if all(_wp_eval(t, x, mod) == 0 for t in systems):
                res.roots.append((tuple(x), level))
            continue
        # singular mod p: branch on the next digit
        if depth >= max_depth:
            res.degenerate = True
            continue
        shifted = []
        drop = level
        for t in systems:
            h = _wp_shift(t, cand, p, ctx.pw(level), m)
            if not h:
                continue  # identically zero at carried precision
            e = min(_valp_bounded(c, p, level) for c in h.values())
            hh = {ex: c // ctx.pw(e) for ex, c in h.items()}
            shifted.append((hh, e))
            drop = min(drop, level - e)
        if len(shifted) < m or drop < _MIN_BRANCH_DIGITS:
            res.degenerate = True
            continue
        sub_level = drop
        mod_sub = ctx.pw(sub_level)
        sub_systems = [{e: c % mod_sub for e, c in hh.items()} for hh, _ in shifted]
        sub_systems = [{e: c for e, c in s.items() if c} for s in sub_systems]
        if any(not s for s in sub_systems):
            res.degenerate = True
            continue
        inner = _branch_roots(sub_systems, m, sub_level, ctx, depth + 1, max_depth)
        res.tried += inner.tried
        res.degenerate |= inner.degenerate
        for coords, digits in inner.roots:
            lifted = tuple((c + p * s) % ctx.pw(digits + 1) for c, s in zip(cand, coords))
            res.roots.append((lifted, digits + 1))
    return res


def _roots_to_scalars(ctx, roots):
    out = []
    for coords, digits in sorted(roots):
        point = []
        for c in coords:
            if c == 0:
                point.append(ctx.zero())
            else:
                v = _valp_bounded(c, ctx.p, digits)
                point.append(PadicScalar(ctx, v, c // ctx.pw(v), digits - v))
        out.append(tuple(point))
    return out


def solve_zero_dim_in_O(polys, max_refine_depth: int = DEFAULT_MAX_REFINE_DEPTH):
    """All solutions in Z_p^m of a zero-dimensional system.

    `polys` is a list of PadicPoly in m shared variables with
    coefficients in Z_p. Returns (roots, degenerate, candidates_tried)
    where roots are tuples of PadicScalar sorted by residue encoding.
    """
    if not polys:
        raise ValueError("empty system")
    ctx = polys[0].ctx
    m = polys[0].nvars
    if len(polys) < m:
        raise ValueError("need at least as many equations as unknowns")
    level = min(ctx.precision, min(q.min_window() for q in polys))
    systems = [q.residue_terms(level) for q in polys]
    if any(not s for s in systems):
        # an equation vanished identically at carried precision
        return [], True, 0
    res = _branch_roots(systems, m, level, ctx, 0, max_refine_depth)
    return _roots_to_scalars(ctx, res.roots), res.degenerate, res.tried


# ---------------------------------------------------------------------------
# univariate conveniences
# ---------------------------------------------------------------------------


def _to_padic_poly(g, ctx) -> PadicPoly:
    if isinstance(g, PadicPoly):
        return g
    if isinstance(g, MultiPoly):
        if len(g.variables) != 1:
            raise ValueError("univariate polynomial expected")
        return PadicPoly(ctx, 1, {e: ctx.integer(c) for e, c in g.terms.items()})
    raise TypeError(f"cannot interpret {type(g).__name__} as a polynomial")


def lift_simple_root(g, r0: int, ctx: PadicContext) -> PadicScalar:
    """Newton-lift a residue r0 with g(r0) = 0, g'(r0) != 0 mod p."""
    q = _to_padic_poly(g, ctx)
    level = min(ctx.precision, q.min_window())
    terms = q.residue_terms(level)
    dterms = _wp_partial(terms, 0)
    p = ctx.p
    if _wp_eval(terms, (r0,), p) % p:
        raise ValueError("r0 is not a root modulo p")
    if _wp_eval(dterms, (r0,), p) % p == 0:
        raise ValueError("r0 is not a simple root modulo p")
    x = _newton_lift([terms], [[dterms]], (r0,), level, ctx)
    c = x[0]
    if c == 0:
        return ctx.zero()
    v = _valp_bounded(c, p, level)
    return PadicScalar(ctx, v, c // ctx.pw(v), level - v)


def univariate_roots_in_O(g, ctx: PadicContext, max_refine_depth: int = DEFAULT_MAX_REFINE_DEPTH):
    """All roots in Z_p of a univariate polynomial over Z_p.

    Raises DegenerateRootError when refinement cannot separate roots
    (e.g. genuinely multiple roots).
    """
    q = _to_padic_poly(g, ctx)
    if q.is_zero():
        raise ValueError("zero polynomial")
    roots, degenerate, _ = solve_zero_dim_in_O([q], max_refine_depth)
    if degenerate:
        raise DegenerateRootError("root refinement hit its depth cap")
    return [t[0] for t in roots]


# ---------------------------------------------------------------------------
# slice intersection drivers
# ---------------------------------------------------------------------------


@dataclass
class SliceIntersection:
    """The finite set X meets slice, with solver diagnostics."""

    points: list
    degenerate: bool
    residue_candidates_tried: int


def intersect_affine(X, A: PadicMatrix, b: PadicVector, max_refine_depth: int = DEFAULT_MAX_REFINE_DEPTH) -> SliceIntersection:
    """Enumerate X meet {Ax = b} meet Z_p^N.

    Raises RankDeficientError when A drops rank (caller resamples); a
    degenerate flag in the result likewise signals a resample.
    """
    from .variety import VarietyPoint, on_variety

    if X.ambient != "affine":
        raise ValueError("affine intersection requires an affine variety")
    par = solve_affine_in_O(A, b)
    if par is None:
        return SliceIntersection([], False, 0)
    subbed = substitute_affine(X.system, par.u, par.directions)
    roots, degenerate, tried = solve_zero_dim_in_O(subbed, max_refine_depth)
    ctx = A.ctx
    level = ctx.precision // 2
    points = []
    for t in roots:
        x = par.u + (par.directions @ PadicVector(ctx, t))
        if not on_variety(X, x, level) or not _on_slice(A, b, x, level):
            raise PrecisionExhausted("intersection point failed residual checks")
        points.append(VarietyPoint(x, residual_ok=True))
    return SliceIntersection(points, degenerate, tried)


def _on_slice(A, b, x, level):
    return all(
        _row_residual_ok(row, x, bi, level) for row, bi in zip(A.rows, b)
    )


def _row_residual_ok(row, x, target, level):
    """Whether row . x = target to p^-level, tolerating window-limited zeros."""
    try:
        acc = None
        for a, xi in zip(row, x):
            t = a * xi
            acc = t if acc is None else acc + t
        if target is not None:
            acc = acc - target
    except PrecisionExhausted:
        return True  # the sum cancelled through the whole carried window
    return acc.is_zero() or acc.valuation >= level


def intersect_projective(X, A: PadicMatrix, max_refine_depth: int = DEFAULT_MAX_REFINE_DEPTH) -> SliceIntersection:
    """Enumerate the projective slice {Ax = 0} meet X, canonicalized.

    Charts partition P^(M-1)(Q_p) by the position of the first unit
    coordinate in the kernel parametrization, so no point is missed or
    duplicated.
    """
    from .variety import VarietyPoint, canonical_representative, on_variety

    if X.ambient != "projective":
        raise ValueError("projective intersection requires a projective variety")
    ctx = A.ctx
    n, N = A.nrows, A.ncols
    dec = smith_normal_form(A)
    if dec.rank < n or dec.precision_flagged:
        raise RankDeficientError("slice matrix is rank deficient at precision")
    K = orthonormal_kernel_basis(A)
    M = K.ncols
    m = M - 1
    level = ctx.precision // 2
    one, zero, p_scalar = ctx.one(), ctx.zero(), ctx.uniformizer_power(1)

    points = []
    degenerate = False
    tried = 0
    for chart in range(M):
        forms = []
        for row in range(N):
            coeffs = []
            for q in range(m):
                j = q if q < chart else q + 1
                c = K[row, j]
                coeffs.append(c * p_scalar if j < chart else c)
            forms.append(PadicPoly.linear_form(ctx, m, K[row, chart], coeffs))
        subbed = compose_with_forms(X.system, forms, ctx, m)
        roots, degen, cand = solve_zero_dim_in_O(subbed, max_refine_depth)
        degenerate |= degen
        tried += cand
        for t in roots:
            s = []
            for j in range(M):
                if j == chart:
                    s.append(one)
                elif j < chart:
                    s.append(t[j] * p_scalar)
                else:
                    s.append(t[j - 1])
            x = K @ PadicVector(ctx, s)
            rep = canonical_representative(x)
            if not on_variety(X, rep, level) or not _on_projective_slice(A, rep, level):
                raise PrecisionExhausted("projective point failed residual checks")
            points.append(VarietyPoint(rep, residual_ok=True))
    points.sort(key=lambda pt: pt.coords.residues(2))
    return SliceIntersection(points, degenerate, tried)


def _on_projective_slice(A, x, level):
    return all(_row_residual_ok(row, x, None, level) for row in A.rows)
