"""Matrix algebra over Q_p: Smith normal form and lattice solves.

The Smith decomposition M = U D V (U, V unimodular over Z_p, D diagonal
with powers of p) drives everything here: absolute determinants,
orthonormal kernel bases, and parametrizations of affine slices that
respect the standard lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import PadicContext
from .errors import PrecisionExhausted, RankDeficientError, ZeroVectorError
from .scalar import PadicScalar
from .vectors import PadicVector


class PadicMatrix:
    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: PadicContext, rows):
        self.ctx = ctx
        self.rows = [list(r) for r in rows]

    @classmethod
    def from_ints(cls, ctx: PadicContext, rows) -> "PadicMatrix":
        return cls(ctx, [[ctx.integer(m) for m in r] for r in rows])

    @classmethod
    def identity(cls, ctx: PadicContext, n: int) -> "PadicMatrix":
        one, zero = ctx.one(), ctx.zero()
        return cls(ctx, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, ctx: PadicContext, entries) -> "PadicMatrix":
        n = len(entries)
        zero = ctx.zero()
        return cls(ctx, [[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> PadicScalar:
        i, j = ij
        return self.rows[i][j]

    def copy(self) -> "PadicMatrix":
        return PadicMatrix(self.ctx, self.rows)

    def transpose(self) -> "PadicMatrix":
        return PadicMatrix(self.ctx, list(map(list, zip(*self.rows))))

    def column(self, j: int) -> PadicVector:
        return PadicVector(self.ctx, tuple(r[j] for r in self.rows))

    def take_columns(self, idx) -> "PadicMatrix":
        return PadicMatrix(self.ctx, [[r[j] for j in idx] for r in self.rows])

    def hstack(self, other: "PadicMatrix") -> "PadicMatrix":
        return PadicMatrix(self.ctx, [a + b for a, b in zip(self.rows, other.rows)])

    def __matmul__(self, other):
        if isinstance(other, PadicVector):
            return PadicVector(self.ctx, tuple(_dot(r, other.entries) for r in self.rows))
        cols = list(zip(*other.rows))
        return PadicMatrix(
            self.ctx, [[_dot(r, c) for c in cols] for r in self.rows]
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    __hash__ = None

    def __repr__(self):
        return f"PadicMatrix({self.rows!r})"

    def encode(self) -> list:
        return [[e.encode() for e in r] for r in self.rows]


def _dot(xs, ys):
    acc = None
    for a, b in zip(xs, ys):
        t = a * b
        acc = t if acc is None else acc + t
    return acc


@dataclass
class SmithDecomposition:
    """M = U D V with U, V unimodular over Z_p.

    divisor_valuations follow the convention that absolute values are
    nondecreasing: infinite valuations (exact-zero divisors) first, then
    finite valuations in decreasing order. `rank` counts the finite ones.
    `precision_flagged` is set when a pivot search met only exact zeros,
    i.e. the infinite divisors are a statement at carried precision.
    """

    U: PadicMatrix
    divisor_valuations: list
    V: PadicMatrix
    rank: int
    precision_flagged: bool
    _u_inv: PadicMatrix
    _v_inv: PadicMatrix

    def d_matrix(self) -> PadicMatrix:
        ctx = self.U.ctx
        a, b = self.U.nrows, self.V.nrows
        zero = ctx.zero()
        rows = [[zero] * b for _ in range(a)]
        for i, v in enumerate(self.divisor_valuations):
            if v is not None:
                rows[i][i] = ctx.uniformizer_power(v)
        return PadicMatrix(ctx, rows)

    def reconstruct(self) -> PadicMatrix:
        return self.U @ self.d_matrix() @ self.V


def smith_normal_form(M: PadicMatrix, want_transforms: bool = True) -> SmithDecomposition:
    """Smith normal form over Z_p by minimal-valuation pivoting.

    Pivots take the first minimal-valuation entry in row-major order, so
    runs are deterministic. Divisors hidden behind exact zeros are
    reported as infinite (None) with `precision_flagged` set.
    """
    ctx = M.ctx
    a, b = M.nrows, M.ncols
    E = [list(r) for r in M.rows]
    k_max = min(a, b)
    if want_transforms:
        U = PadicMatrix.identity(ctx, a)
        Uinv = PadicMatrix.identity(ctx, a)
        V = PadicMatrix.identity(ctx, b)
        Vinv = PadicMatrix.identity(ctx, b)

    divisors_asc = []
    flagged = False
    for k in range(k_max):
        pi = pj = -1
        best = None
        for i in range(k, a):
            row = E[i]
            for j in range(k, b):
                e = row[j]
                if e.u and (best is None or e.v < best):
                    best, pi, pj = e.v, i, j
        if best is None:
            flagged = True
            break

        if pi != k:
            E[k], E[pi] = E[pi], E[k]
            if want_transforms:
                _swap_cols(U, k, pi)
                Uinv.rows[k], Uinv.rows[pi] = Uinv.rows[pi], Uinv.rows[k]
        if pj != k:
            for row in E:
                row[k], row[pj] = row[pj], row[k]
            if want_transforms:
                V.rows[k], V.rows[pj] = V.rows[pj], V.rows[k]
                _swap_cols(Vinv, k, pj)

        pivot = E[k][k]
        w_inv = PadicScalar(ctx, 0, pivot.u, pivot.prec).invert()
        if w_inv != ctx.one():
            E[k] = [w_inv * e for e in E[k]]
            if want_transforms:
                w = PadicScalar(ctx, 0, pivot.u, pivot.prec)
                for r in U.rows:
                    r[k] = r[k] * w
                Uinv.rows[k] = [w_inv * e for e in Uinv.rows[k]]
        pk = ctx.uniformizer_power(best)

        zero = ctx.zero()
        for i in range(k + 1, a):
            e = E[i][k]
            if not e.u:
                continue
            f = e.shift(-best)  # in Z_p by pivot minimality
            row_i, row_k = E[i], E[k]
            for j in range(k + 1, b):
                y = row_k[j]
                if y.u:
                    row_i[j] = row_i[j] - f * y
            row_i[k] = zero  # cancels exactly by construction
            if want_transforms:
                for r in U.rows:
                    r[k] = r[k] + f * r[i]
                Uinv.rows[i] = [x - f * y for x, y in zip(Uinv.rows[i], Uinv.rows[k])]
        for j in range(k + 1, b):
            e = E[k][j]
            if not e.u:
                continue
            g = e.shift(-best)
            # column k below the pivot is already zero, so the only
            # entry the column operation changes is the forced one
            E[k][j] = zero
            if want_transforms:
                V.rows[k] = [x + g * y for x, y in zip(V.rows[k], V.rows[j])]
                for r in Vinv.rows:
                    r[j] = r[j] - g * r[k]
        E[k][k] = pk
        divisors_asc.append(best)

    rank = len(divisors_asc)
    divisors = [None] * (k_max - rank) + divisors_asc[::-1]
    if not want_transforms:
        return SmithDecomposition(None, divisors, None, rank, flagged, None, None)

    # reorder so D carries the divisors as listed (largest valuation first)
    perm = [k_max - 1 - i if i < k_max else i for i in range(max(a, b))]
    U = U.take_columns([perm[j] for j in range(a)])
    Uinv = PadicMatrix(ctx, [Uinv.rows[perm[i]] for i in range(a)])
    V = PadicMatrix(ctx, [V.rows[perm[i]] for i in range(b)])
    Vinv = Vinv.take_columns([perm[j] for j in range(b)])
    return SmithDecomposition(U, divisors, V, rank, flagged, Uinv, Vinv)


def _swap_cols(M: PadicMatrix, i: int, j: int):
    for r in M.rows:
        r[i], r[j] = r[j], r[i]


def absolute_det(M: PadicMatrix) -> Fraction:
    """Product of the absolute values of the elementary divisors.

    Returns 0 when a divisor is infinite; equals |det M| for square
    full-rank M.
    """
    dec = smith_normal_form(M, want_transforms=False)
    if any(v is None for v in dec.divisor_valuations):
        return Fraction(0)
    s = sum(dec.divisor_valuations)
    p = M.ctx.p
    return Fraction(1, p**s) if s >= 0 else Fraction(p ** (-s))


def orthonormal_kernel_basis(M: PadicMatrix) -> PadicMatrix:
    """Columns in Z_p^N spanning ker(M), extendable to a basis of Z_p^N.

    The output has every Smith divisor valuation equal to 0.
    """
    dec = smith_normal_form(M)
    k_max = min(M.nrows, M.ncols)
    idx = [i for i, v in enumerate(dec.divisor_valuations) if v is None]
    idx += list(range(k_max, M.ncols))
    return dec._v_inv.take_columns(idx)


def unimodular_transport(x: PadicVector) -> PadicMatrix:
    """U in GL(N, Z_p) with U x = (0, ..., 0, p^val(x))^T."""
    if x.is_zero():
        raise ZeroVectorError("cannot transport the zero vector")
    ctx = x.ctx
    n = len(x)
    v = int(x.val())
    y = [e.shift(-v) for e in x.entries]  # primitive: some entry is a unit
    i_star = next(i for i, e in enumerate(y) if e.u and e.v == 0)
    y[i_star], y[n - 1] = y[n - 1], y[i_star]

    w_inv = y[n - 1].invert()
    rows = []
    zero, one = ctx.zero(), ctx.one()
    for i in range(n - 1):
        row = [zero] * n
        row[i] = one
        row[n - 1] = -(y[i] * w_inv)
        rows.append(row)
    last = [zero] * n
    last[n - 1] = w_inv
    rows.append(last)
    # fold in the initial swap: U = E . D . P acts on original coordinates
    if i_star != n - 1:
        for row in rows:
            row[i_star], row[n - 1] = row[n - 1], row[i_star]
    return PadicMatrix(ctx, rows)


@dataclass
class AffineParametrization:
    """L_{A,b} meets Z_p^N exactly in u + directions . t, t in Z_p^(N-n)."""

    u: PadicVector
    directions: PadicMatrix


def solve_affine_in_O(A: PadicMatrix, b: PadicVector):
    """Lattice-respecting parametrization of {x : A x = b}.

    Returns an AffineParametrization, or None when the slice misses
    Z_p^N entirely. Raises RankDeficientError when A drops rank at
    carried precision (callers resample).
    """
    ctx = A.ctx
    n, N = A.nrows, A.ncols
    dec = smith_normal_form(A)
    if dec.rank < n or dec.precision_flagged:
        raise RankDeficientError(f"slice matrix has rank {dec.rank} < {n} at precision")
    c = dec._u_inv @ b
    y = []
    for i, d in enumerate(dec.divisor_valuations):
        ci = c[i]
        if ci.is_zero():
            y.append(ci)
            continue
        if ci.v < d:
            return None  # the affine space misses the lattice
        y.append(ci.shift(-d))
    y += [ctx.zero()] * (N - n)
    u = dec._v_inv @ PadicVector(ctx, y)
    directions = dec._v_inv.take_columns(range(n, N))
    return AffineParametrization(u, directions)


def coordinates_in_basis(K: PadicMatrix, x: PadicVector, tol_level: int | None = None):
    """Solve K a = x for K with orthonormal columns; None if x is outside.

    `tol_level`: residual digits required to accept (defaults to half the
    carried precision).
    """
    ctx = K.ctx
    c = K.ncols
    if tol_level is None:
        tol_level = ctx.precision // 2
    dec = smith_normal_form(K)
    if dec.rank < c:
        raise RankDeficientError("basis matrix is rank deficient")
    if any(v != 0 for v in dec.divisor_valuations):
        raise ValueError("matrix columns are not orthonormal")
    w = dec._u_inv @ x
    for i in range(c, K.nrows):
        if w[i].u and w[i].v < tol_level:
            return None
    alpha = dec._v_inv @ PadicVector(ctx, w.entries[:c])
    return alpha
