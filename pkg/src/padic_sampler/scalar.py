"""Capped-precision elements of Q_p.

A nonzero scalar is u * p^v with unit u (u % p != 0) known modulo
p^prec, i.e. the number is pinned down modulo p^(v + prec). The
canonical zero is encoded by u == 0 and is the only value whose
zero-ness is exact. Cancellation shrinks the precision window of a
result; an operation that would leave no significant digit raises
PrecisionExhausted instead of silently fabricating a zero.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .context import PadicContext
from .errors import PrecisionExhausted

INF = math.inf


def _valp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicScalar:
    __slots__ = ("ctx", "v", "u", "prec")

    def __init__(self, ctx: PadicContext, v: int, u: int, prec: int):
        self.ctx = ctx
        self.v = v
        self.u = u
        self.prec = prec

    # -- predicates and views -------------------------------------------

    def is_zero(self) -> bool:
        return self.u == 0

    @property
    def valuation(self):
        """val(x); math.inf for the canonical zero."""
        return INF if self.u == 0 else self.v

    def abs_value(self) -> Fraction:
        """|x| = p^(-val x) as an exact rational; 0 for zero."""
        if self.u == 0:
            return Fraction(0)
        return Fraction(1, self.ctx.pw(self.v)) if self.v >= 0 else Fraction(self.ctx.pw(-self.v))

    def unit_part(self) -> int:
        return self.u

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, one per carried digit."""
        out = []
        u, p = self.u, self.ctx.p
        for _ in range(self.prec):
            u, d = divmod(u, p)
            out.append(d)
        return out

    def residue(self, j: int) -> int:
        """The value modulo p^j as an integer in [0, p^j).

        Requires val >= 0 and the carried window to reach level j.
        """
        if self.u == 0:
            return 0
        if self.v < 0:
            raise ValueError("residue undefined for negative valuation")
        if self.v >= j:
            return 0
        if self.prec < j - self.v:
            raise PrecisionExhausted(f"scalar carries {self.prec} digits, level {j} requested")
        ctx = self.ctx
        return self.u % ctx.pw(j - self.v) * ctx.pw(self.v)

    def to_fraction(self) -> Fraction:
        """u * p^v as an exact rational (interprets the unit literally)."""
        if self.u == 0:
            return Fraction(0)
        if self.v >= 0:
            return Fraction(self.u * self.ctx.pw(self.v))
        return Fraction(self.u, self.ctx.pw(-self.v))

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "PadicScalar"):
        if self.ctx is not other.ctx and not self.ctx.same_arith(other.ctx):
            raise ValueError("operands use different p-adic contexts")

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        a, b = self, other
        if a.u == 0:
            return b
        if b.u == 0:
            return a
        if b.v < a.v:
            a, b = b, a
        shift = b.v - a.v
        if shift >= a.prec:
            return a
        ctx = a.ctx
        window = min(a.prec, shift + b.prec)
        s = (a.u + b.u * ctx.pw(shift)) % ctx.pw(window)
        if s == 0:
            # shift == 0 here since otherwise s is a unit mod p
            if window >= ctx.precision:
                return ctx.zero()
            raise PrecisionExhausted("cancellation consumed all carried digits")
        j = _valp(s, ctx.p)
        return PadicScalar(ctx, a.v + j, s // ctx.pw(j), window - j)

    def __neg__(self) -> "PadicScalar":
        if self.u == 0:
            return self
        m = self.ctx.pw(self.prec)
        return PadicScalar(self.ctx, self.v, m - self.u, self.prec)

    def __sub__(self, other: "PadicScalar") -> "PadicScalar":
        return self + (-other)

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        if self.u == 0 or other.u == 0:
            return self.ctx.zero()
        prec = min(self.prec, other.prec)
        u = self.u * other.u % self.ctx.pw(prec)
        return PadicScalar(self.ctx, self.v + other.v, u, prec)

    def mul_int(self, c: int) -> "PadicScalar":
        """Multiply by an exact integer (no precision cost beyond own)."""
        if c == 0 or self.u == 0:
            return self.ctx.zero()
        j = _valp(c, self.ctx.p)
        u = self.u * (c // self.ctx.pw(j)) % self.ctx.pw(self.prec)
        return PadicScalar(self.ctx, self.v + j, u, self.prec)

    def invert(self) -> "PadicScalar":
        if self.u == 0:
            raise ZeroDivisionError("inverting the zero scalar")
        m = self.ctx.pw(self.prec)
        return PadicScalar(self.ctx, -self.v, pow(self.u, -1, m), self.prec)

    def __truediv__(self, other: "PadicScalar") -> "PadicScalar":
        return self * other.invert()

    def shift(self, k: int) -> "PadicScalar":
        """Multiply by p^k, exact."""
        if self.u == 0:
            return self
        return PadicScalar(self.ctx, self.v + k, self.u, self.prec)

    # -- comparison ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if self.u == 0 or other.u == 0:
            return self.u == other.u == 0
        if self.v != other.v:
            return False
        m = self.ctx.pw(min(self.prec, other.prec))
        return (self.u - other.u) % m == 0

    __hash__ = None

    def __repr__(self):
        if self.u == 0:
            return "PadicScalar(0)"
        return f"PadicScalar({self.u}*{self.ctx.p}^{self.v}, prec={self.prec})"

    # -- text encoding ---------------------------------------------------

    def encode(self) -> dict:
        """JSON-friendly encoding: {"v": int, "digits": [...]}; zero is {"v": null}."""
        if self.u == 0:
            return {"v": None}
        return {"v": self.v, "digits": self.digits()}


def decode_scalar(ctx: PadicContext, payload: dict) -> PadicScalar:
    if payload["v"] is None:
        return ctx.zero()
    digs = payload["digits"]
    if not digs or digs[0] % ctx.p == 0:
        raise ValueError("scalar encoding must carry a unit leading digit")
    u = 0
    for d in reversed(digs):
        u = u * ctx.p + d
    return PadicScalar(ctx, payload["v"], u, len(digs))
