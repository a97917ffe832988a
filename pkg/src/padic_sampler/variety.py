"""Variety specifications and the local invariants behind slice weights.

The weight of a point corrects for how the random slice distribution
sees that point; it is constant on lattice points and grows with the
distance from the standard lattice, through the `lattice_distortion`
invariant (an absolute determinant of a transported tangent frame).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NotOnVarietyError,
    PrecisionExhausted,
    SingularPointError,
    ZeroVectorError,
)
from .matrices import (
    PadicMatrix,
    absolute_det,
    coordinates_in_basis,
    orthonormal_kernel_basis,
    smith_normal_form,
    unimodular_transport,
)
from .poly import MultiPoly, PolySystem, jacobian, jacobian_at
from .vectors import PadicVector


@dataclass
class VarietySpec:
    """A variety given by integer polynomials, with declared dimension.

    `ambient` is "affine" (X in A^N) or "projective" (X in P^(N-1)),
    where N is the number of variables. Dimension and irreducibility are
    declared by the user, not verified. The degree bound defaults to the
    product of the total degrees and only affects rejection-sampling
    efficiency, never correctness, as long as it is an upper bound.
    """

    name: str
    ambient: str
    system: PolySystem
    dim: int
    degree_bound: int = 0

    def __post_init__(self):
        if self.ambient not in ("affine", "projective"):
            raise ValueError(f"unknown ambient {self.ambient!r}")
        N = len(self.system.variables)
        n, r = self.dim, len(self.system)
        if self.ambient == "affine":
            if not 1 <= n < N:
                raise ValueError(f"affine dimension must satisfy 1 <= {n} < {N}")
            codim = N - n
        else:
            if not self.system.homogeneous:
                raise ValueError("projective varieties need homogeneous systems")
            if not 1 <= n < N - 1:
                raise ValueError(f"projective dimension must satisfy 1 <= {n} < {N - 1}")
            codim = N - 1 - n
        if r < codim:
            raise ValueError(f"need at least {codim} equations, got {r}")
        if self.degree_bound == 0:
            bezout = 1
            for q in self.system:
                bezout *= max(1, q.total_degree())
            self.degree_bound = bezout
        if self.degree_bound < 1:
            raise ValueError("degree bound must be positive")

    @property
    def ambient_vars(self) -> int:
        return len(self.system.variables)

    def jacobian_rows(self):
        return jacobian(self.system)


@dataclass
class VarietyPoint:
    """A point with residual bookkeeping; projective points are canonical."""

    coords: PadicVector
    residual_ok: bool = True

    def encode(self):
        return self.coords.encode()


def scalars_congruent(a, b, level: int) -> bool:
    """Whether a = b modulo p^level, given the carried windows."""
    try:
        d = a - b
    except PrecisionExhausted:
        return True  # cancelled through the whole shared window
    return d.is_zero() or d.valuation >= level


def weight_constant(p: int, n: int) -> Fraction:
    """(1 - q^-(n+1)) / (1 - q^-1): the weight on lattice points."""
    q = Fraction(p)
    return (1 - q ** -(n + 1)) / (1 - q**-1)


def _as_vector(X, x) -> PadicVector:
    vec = x.coords if isinstance(x, VarietyPoint) else x
    if X is not None and X.ambient == "projective":
        return canonical_representative(vec)
    return vec


def on_variety(X: VarietySpec, x, check_level: int | None = None) -> bool:
    """All defining polynomials vanish to p^-check_level at x."""
    vec = _as_vector(X, x)
    if check_level is None:
        check_level = vec.ctx.precision // 2
    for q in X.system:
        try:
            val = q.eval_padic(vec)
        except PrecisionExhausted:
            continue  # the value is zero to the full carried window
        if not (val.is_zero() or val.valuation >= check_level):
            return False
    return True


def is_smooth_point(X: VarietySpec, x, level: int | None = None) -> bool:
    """Jacobian keeps full rank at precision (codim-many small divisors)."""
    vec = _as_vector(X, x)
    if level is None:
        level = vec.ctx.precision // 2
    J = jacobian_at(X.jacobian_rows(), vec)
    codim = X.ambient_vars - X.dim - (0 if X.ambient == "affine" else 1)
    dec = smith_normal_form(J, want_transforms=False)
    finite = [v for v in dec.divisor_valuations if v is not None]
    if len(finite) < codim:
        return False
    return sum(sorted(finite)[:codim]) < level


def tangent_basis(X: VarietySpec, x) -> PadicMatrix:
    """Orthonormal basis (as columns) of the tangent space at x.

    Affine: the kernel of the Jacobian. Projective: an orthonormal
    complement of the line through x inside the tangent space of the
    affine cone, obtained by expressing the canonical representative in
    the cone's kernel basis and dropping the column carrying its unit
    coordinate (the remaining columns stay jointly orthonormal with x).
    """
    vec = _as_vector(X, x)
    if not on_variety(X, vec):
        raise NotOnVarietyError(f"point is not on {X.name} at tolerance")
    J = jacobian_at(X.jacobian_rows(), vec)
    W = orthonormal_kernel_basis(J)
    if X.ambient == "affine":
        if W.ncols != X.dim:
            raise SingularPointError(
                f"tangent space has dimension {W.ncols}, expected {X.dim}"
            )
        return W
    if W.ncols != X.dim + 1:
        raise SingularPointError(
            f"cone tangent space has dimension {W.ncols}, expected {X.dim + 1}"
        )
    alpha = coordinates_in_basis(W, vec)
    if alpha is None:
        raise SingularPointError("point does not lie in its tangent cone at precision")
    j_star = next((j for j, a in enumerate(alpha) if a.u and a.v == 0), None)
    if j_star is None:
        raise SingularPointError("no unit coordinate when splitting off the ray")
    return W.take_columns([j for j in range(W.ncols) if j != j_star])


def lattice_distortion(X: VarietySpec, x) -> Fraction:
    """Absolute determinant of the transported tangent frame at x.

    Equals 1 exactly on lattice points; independent of the choices of
    transport matrix and tangent basis. The zero point is handled as an
    ordinary lattice point.
    """
    vec = x.coords if isinstance(x, VarietyPoint) else x
    if X.ambient != "affine":
        raise ValueError("lattice distortion is an affine-variety invariant")
    if vec.is_zero():
        return Fraction(1)
    U = unimodular_transport(vec)
    W = tangent_basis(X, vec)
    UW = U @ W
    v = int(vec.val())
    if v < 0:
        # the diagonal correction scales the last row by p^(-val)
        UW.rows[-1] = [e.shift(-v) for e in UW.rows[-1]]
    return absolute_det(UW)


def slice_weight(X: VarietySpec, x) -> Fraction:
    """The weight correcting slice sampling at x, as an exact rational.

    On lattice points this is weight_constant(p, dim) with no further
    computation; off the lattice the distortion invariant enters.
    """
    vec = x.coords if isinstance(x, VarietyPoint) else x
    C = weight_constant(vec.ctx.p, X.dim)
    v = vec.val()
    if v >= 0 or v == math.inf:
        return C
    return C * vec.norm() ** X.dim / lattice_distortion(X, vec)


def rescale_variety(X: VarietySpec, r: int, p: int) -> VarietySpec:
    """Defining equations of p^r X, with denominators cleared.

    Substitutes x -> p^-r x and multiplies each polynomial by the
    minimal power of p making its coefficients integral. Sampling the
    rescaled variety's lattice points and dividing coordinates by p^r
    samples the p^-r ball portion of X.
    """
    if X.ambient != "affine":
        raise ValueError("rescaling applies to affine varieties")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return X
    out = []
    for q in X.system:
        s = max(
            (r * sum(e) - _int_valp(c, p) for e, c in q.terms.items()),
            default=0,
        )
        s = max(0, s)
        terms = {}
        for e, c in q.terms.items():
            k = s - r * sum(e)
            if k >= 0:
                terms[e] = c * p**k
            else:
                c2, rem = divmod(c, p**-k)
                if rem:
                    raise AssertionError("clearing denominators failed")
                terms[e] = c2
        out.append(MultiPoly(q.variables, terms))
    return VarietySpec(
        name=f"{X.name}_scaled_p{r}",
        ambient="affine",
        system=PolySystem(out),
        dim=X.dim,
        degree_bound=X.degree_bound,
    )


def _int_valp(c: int, p: int) -> int:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def canonical_representative(x: PadicVector) -> PadicVector:
    """Scale a nonzero vector so its norm is 1 and its first unit is 1.

    This is the canonical section of the quotient onto projective space:
    invariant under scaling and idempotent.
    """
    if x.is_zero():
        raise ZeroVectorError("the zero vector has no projective image")
    v = int(x.val())
    y = [e.shift(-v) for e in x.entries]
    lead = next(e for e in y if e.u and e.v == 0)
    inv = lead.invert()
    return PadicVector(x.ctx, tuple(inv * e for e in y))


def fubini_study_distance(x: PadicVector, y: PadicVector) -> Fraction:
    """max |x_i y_j - x_j y_i| over pairs, for canonical representatives."""
    best = Fraction(0)
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                m = x[i] * y[j] - x[j] * y[i]
            except PrecisionExhausted:
                continue  # minor vanishes to the carried window
            a = m.abs_value()
            if a > best:
                best = a
    return best
