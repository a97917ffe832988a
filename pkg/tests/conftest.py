"""Shared fixtures and the independent oracles used across the suite.

Oracles here deliberately avoid the code paths they check: determinants
come from cofactor expansion, intersections from digit-by-digit residue
scans, distributions from chi-square tests against theory class sets.
"""

from itertools import product

import pytest

from padic_sampler import PadicContext, PadicMatrix, PadicVector
from padic_sampler.specfile import builtin_variety


@pytest.fixture
def ctx():
    return PadicContext(5, 32, seed=12345)


@pytest.fixture
def ctx_small():
    return PadicContext(5, 12, seed=777)


@pytest.fixture
def elliptic():
    return builtin_variety("elliptic")


@pytest.fixture
def sl2():
    return builtin_variety("sl2")


@pytest.fixture
def pline():
    return builtin_variety("pline")


@pytest.fixture
def conic():
    return builtin_variety("conic")


def cofactor_det(rows):
    """Exact determinant of a small scalar matrix by cofactor expansion."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * cofactor_det(minor)
        term = -term if j % 2 else term
        total = term if total is None else total + term
    return total


def residues_of_matrix(M: PadicMatrix, level: int):
    return [[e.residue(level) for e in row] for row in M.rows]


def residues_of_vector(v: PadicVector, level: int):
    return [e.residue(level) for e in v]


def brute_affine_slice_scan(X, A, b, depth: int, p: int):
    """Digit-by-digit residue scan of {system = 0, Ax = b} up to p^depth.

    Returns the set of surviving residue vectors mod p^2. Pure integer
    arithmetic; independent of the solver.
    """
    N = X.ambient_vars
    polys = [q for q in X.system]
    A_res = residues_of_matrix(A, depth)
    b_res = residues_of_vector(b, depth)

    def all_zero(x, mod):
        for q in polys:
            if q.eval_int(x) % mod:
                return False
        for row, bi in zip(A_res, b_res):
            if (sum(a * xi for a, xi in zip(row, x)) - bi) % mod:
                return False
        return True

    states = [x for x in product(range(p), repeat=N) if all_zero(x, p)]
    mod = p
    for level in range(2, depth + 1):
        mod *= p
        nxt = []
        step = mod // p
        for x in states:
            for delta in product(range(p), repeat=N):
                y = tuple(xi + di * step for xi, di in zip(x, delta))
                if all_zero(y, mod):
                    nxt.append(y)
        states = nxt
    return {tuple(xi % p**2 for xi in x) for x in states}


def brute_projective_slice_scan(X, A, depth: int, p: int):
    """Canonical-representative residue scan of {system = 0, Ax = 0}.

    Enumerates canonical forms chart by chart (leading unit 1, earlier
    coordinates divisible by p) and extends digits; returns survivors
    reduced mod p^2 in canonical form.
    """
    N = X.ambient_vars
    polys = [q for q in X.system]
    A_res = residues_of_matrix(A, depth)

    def all_zero(x, mod):
        for q in polys:
            if q.eval_int(x) % mod:
                return False
        for row in A_res:
            if sum(a * xi for a, xi in zip(row, x)) % mod:
                return False
        return True

    states = []
    for chart in range(N):
        frees = N - chart - 1
        for tail in product(range(p), repeat=frees):
            x = (0,) * chart + (1,) + tail
            if all_zero(x, p):
                states.append((chart, x))
    mod = p
    for level in range(2, depth + 1):
        mod *= p
        step = mod // p
        nxt = []
        for chart, x in states:
            slots = [i for i in range(N) if i != chart]
            for delta in product(range(p), repeat=len(slots)):
                y = list(x)
                for i, d in zip(slots, delta):
                    y[i] += d * step
                y = tuple(y)
                if all_zero(y, mod):
                    nxt.append((chart, y))
        states = nxt
    return {tuple(xi % p**2 for xi in x) for _, x in states}


def product_is_small(M, K, level):
    """Whether every entry of M K vanishes to p^-level, tolerating
    sums that cancel through their whole carried window."""
    from padic_sampler.errors import PrecisionExhausted

    cols = list(zip(*K.rows))
    for row in M.rows:
        for col in cols:
            try:
                acc = None
                for a, b in zip(row, col):
                    t = a * b
                    acc = t if acc is None else acc + t
            except PrecisionExhausted:
                continue
            if not (acc.is_zero() or acc.valuation >= level):
                return False
    return True


def affine_residual_ok(A, x, b, level):
    """Whether A x = b holds to p^-level, tolerant of window-limited zeros."""
    from padic_sampler.errors import PrecisionExhausted

    for row, bi in zip(A.rows, b):
        try:
            acc = None
            for a, xi in zip(row, x):
                t = a * xi
                acc = t if acc is None else acc + t
            acc = acc - bi
        except PrecisionExhausted:
            continue
        if not (acc.is_zero() or acc.valuation >= level):
            return False
    return True


def chi_square_pvalue(counts, expected):
    """One-sample chi-square against the given expected counts."""
    from scipy.stats import chi2

    stat = sum((o - e) ** 2 / e for o, e in zip(counts, expected))
    dof = len(counts) - 1
    return float(chi2.sf(stat, dof)), stat


def two_sample_chi_square(counts_a, counts_b, classes):
    """Two-sample chi-square over a shared class list (equal sizes)."""
    from scipy.stats import chi2

    stat = 0.0
    dof = 0
    for c in classes:
        o1, o2 = counts_a.get(c, 0), counts_b.get(c, 0)
        if o1 + o2 == 0:
            continue
        stat += (o1 - o2) ** 2 / (o1 + o2)
        dof += 1
    return float(chi2.sf(stat, dof - 1)), stat
