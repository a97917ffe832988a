"""Arithmetic context for Q_p and seedable digit streams.

A context fixes the prime p, the number of significant base-p digits
carried per scalar, and the RNG seed. Uniform draws from Z_p are the
pushforward of Haar measure truncated to the carried digits; they are
produced from a counter-based Philox generator so that worker streams
with distinct ids are independent and the whole run is reproducible
from (seed, worker count).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import PrecisionExhausted

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n below 3.3e24."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PadicContext:
    """Prime, carried precision, and seed for a family of scalars."""

    __slots__ = ("p", "precision", "seed", "_pw")

    def __init__(self, p: int, precision: int = 32, seed: int = 0):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if p > 2**31 - 1:
            raise ValueError("p must fit in 31 bits")
        if precision < 2:
            raise ValueError("precision must be at least 2")
        if not (0 <= seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.p = p
        self.precision = precision
        self.seed = seed
        self._pw = [1, p]

    def pw(self, k: int) -> int:
        """p**k with memoization (k >= 0)."""
        t = self._pw
        while len(t) <= k:
            t.append(t[-1] * self.p)
        return t[k]

    def same_arith(self, other: "PadicContext") -> bool:
        return self is other or (self.p == other.p and self.precision == other.precision)

    # -- scalar constructors (implementations live in scalar.py) --------

    def zero(self):
        from .scalar import PadicScalar

        return PadicScalar(self, 0, 0, self.precision)

    def one(self):
        from .scalar import PadicScalar

        return PadicScalar(self, 0, 1, self.precision)

    def integer(self, m: int):
        """Inject an exact integer at full carried precision."""
        from .scalar import PadicScalar

        if m == 0:
            return self.zero()
        v = 0
        while m % self.p == 0:
            m //= self.p
            v += 1
        return PadicScalar(self, v, m % self.pw(self.precision), self.precision)

    def fraction(self, fr) -> "PadicScalar":
        from .scalar import PadicScalar

        fr = Fraction(fr)
        if fr == 0:
            return self.zero()
        num, den = fr.numerator, fr.denominator
        a = 0
        while num % self.p == 0:
            num //= self.p
            a += 1
        b = 0
        while den % self.p == 0:
            den //= self.p
            b += 1
        m = self.pw(self.precision)
        u = num * pow(den, -1, m) % m
        return PadicScalar(self, a - b, u, self.precision)

    def uniformizer_power(self, k: int):
        """The scalar p**k, exact."""
        from .scalar import PadicScalar

        return PadicScalar(self, k, 1, self.precision)

    def stream(self, worker_id: int = 0) -> "PadicRng":
        return PadicRng(self, worker_id)

    def __repr__(self):
        return f"PadicContext(p={self.p}, precision={self.precision}, seed={self.seed})"


class PadicRng:
    """One worker's stream of uniform base-p digits and derived draws.

    Streams for distinct worker ids use distinct Philox keys, hence are
    statistically independent; a stream is owned by a single worker and
    must not be shared.
    """

    __slots__ = ("ctx", "worker_id", "_gen")

    def __init__(self, ctx: PadicContext, worker_id: int = 0):
        if not (0 <= worker_id < 2**32):
            raise ValueError("worker_id must be below 2**32")
        self.ctx = ctx
        self.worker_id = worker_id
        key = (ctx.seed << 64) | worker_id
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def digits(self, count: int) -> list[int]:
        """`count` independent uniform digits in [0, p)."""
        return self._gen.integers(0, self.ctx.p, size=count).tolist()

    def uniform(self) -> float:
        """Uniform float in [0, 1), for accept/reject decisions."""
        return float(self._gen.random())

    def scalar(self):
        return self._scalar_from_digits(self.digits(self.ctx.precision))

    def _scalar_from_digits(self, digs):
        from .scalar import PadicScalar

        ctx = self.ctx
        p = ctx.p
        value = 0
        for d in reversed(digs):
            value = value * p + d
        if value == 0:
            return ctx.zero()
        v = 0
        while value % p == 0:
            value //= p
            v += 1
        # one Haar draw carries precision digits total; a leading zero
        # digit shifts the window, it does not add information
        return PadicScalar(ctx, v, value, ctx.precision - v)

    def vector(self, n: int):
        from .vectors import PadicVector

        k = self.ctx.precision
        digs = self.digits(n * k)
        return PadicVector(
            self.ctx,
            tuple(self._scalar_from_digits(digs[i * k : (i + 1) * k]) for i in range(n)),
        )

    def matrix(self, nrows: int, ncols: int):
        from .matrices import PadicMatrix

        k = self.ctx.precision
        digs = self.digits(nrows * ncols * k)
        rows = []
        pos = 0
        for _ in range(nrows):
            row = []
            for _ in range(ncols):
                row.append(self._scalar_from_digits(digs[pos : pos + k]))
                pos += k
            rows.append(row)
        return PadicMatrix(self.ctx, rows)

    def unimodular(self, n: int):
        """Uniform element of GL(n, Z_p): rejection on unit determinant."""
        from .matrices import absolute_det

        while True:
            m = self.matrix(n, n)
            if absolute_det(m) == 1:
                return m


def sample_uniform_O(ctx_or_rng, shape=None):
    """Uniform draw from Z_p (scalar), Z_p^N (vector) or Z_p^{a x b} (matrix).

    `shape` may be None, an int N, or a pair (a, b). Accepts a context
    (uses worker 0 of its seed: one-shot convenience) or an existing stream.
    """
    rng = ctx_or_rng if isinstance(ctx_or_rng, PadicRng) else ctx_or_rng.stream(0)
    if shape is None:
        return rng.scalar()
    if isinstance(shape, int):
        return rng.vector(shape)
    a, b = shape
    return rng.matrix(a, b)


def split_stream(ctx: PadicContext, worker_id: int) -> PadicRng:
    """Independent digit stream for the given worker id."""
    return ctx.stream(worker_id)
