"""Vectors over Q_p with the max-norm of the standard lattice."""

from __future__ import annotations

import math
from fractions import Fraction

from .context import PadicContext
from .scalar import PadicScalar, decode_scalar


class PadicVector:
    __slots__ = ("ctx", "entries")

    def __init__(self, ctx: PadicContext, entries):
        self.ctx = ctx
        self.entries = tuple(entries)

    @classmethod
    def from_ints(cls, ctx: PadicContext, values) -> "PadicVector":
        return cls(ctx, tuple(ctx.integer(m) for m in values))

    @classmethod
    def from_fractions(cls, ctx: PadicContext, values) -> "PadicVector":
        return cls(ctx, tuple(ctx.fraction(m) for m in values))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> PadicScalar:
        return self.entries[i]

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def val(self):
        """min over entries of val(x_i); math.inf for the zero vector."""
        return min((e.valuation for e in self.entries), default=math.inf)

    def norm(self) -> Fraction:
        """max_i |x_i| as an exact rational power of p."""
        v = self.val()
        if v == math.inf:
            return Fraction(0)
        v = int(v)
        return Fraction(1, self.ctx.pw(v)) if v >= 0 else Fraction(self.ctx.pw(-v))

    def __add__(self, other: "PadicVector") -> "PadicVector":
        return PadicVector(self.ctx, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "PadicVector") -> "PadicVector":
        return PadicVector(self.ctx, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, s: PadicScalar) -> "PadicVector":
        return PadicVector(self.ctx, tuple(s * e for e in self.entries))

    def shift(self, k: int) -> "PadicVector":
        """Multiply every entry by p^k."""
        return PadicVector(self.ctx, tuple(e.shift(k) for e in self.entries))

    def residues(self, j: int) -> tuple:
        """Entrywise reduction modulo p^j (entries must lie in Z_p)."""
        return tuple(e.residue(j) for e in self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicVector):
            return NotImplemented
        return len(self) == len(other) and all(a == b for a, b in zip(self, other))

    __hash__ = None

    def __repr__(self):
        return f"PadicVector({list(self.entries)})"

    def encode(self) -> list:
        return [e.encode() for e in self.entries]


def vec_val_norm(x: PadicVector):
    """(valuation, norm) of a vector; (inf, 0) for the zero vector."""
    return x.val(), x.norm()


def decode_vector(ctx: PadicContext, payload) -> PadicVector:
    return PadicVector(ctx, tuple(decode_scalar(ctx, e) for e in payload))
