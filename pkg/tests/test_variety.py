"""Tangent frames, the distortion invariant, weights, projective helpers."""

import math
from fractions import Fraction

import pytest

from padic_sampler import (
    NotOnVarietyError,
    PadicContext,
    PadicMatrix,
    PadicVector,
    PolySystem,
    SingularPointError,
    VarietySpec,
    ZeroVectorError,
    absolute_det,
    canonical_representative,
    fubini_study_distance,
    is_smooth_point,
    lattice_distortion,
    lift_simple_root,
    on_variety,
    parse_poly,
    rescale_variety,
    slice_weight,
    tangent_basis,
    weight_constant,
)
from padic_sampler.variety import _as_vector
from conftest import product_is_small


def _line(ctx=None):
    return VarietySpec("diag", "affine", PolySystem([parse_poly("x - y", ["x", "y"])]), 1)


def _elliptic_off_lattice_point(ctx):
    # x = 1/25, y = sqrt(1 + 5^-6) / ... : solve (5^3 y)^2 = 5^6 (x^3 + 1)
    g = parse_poly("t^2 - 15626", ["t"])
    y = lift_simple_root(g, 1, ctx).shift(-3)
    return PadicVector(ctx, (ctx.fraction(Fraction(1, 25)), y))


def test_spec_validation():
    f = parse_poly("y^2 - x^3 - 1", ["x", "y"])
    X = VarietySpec("e", "affine", PolySystem([f]), 1)
    assert X.degree_bound == 3  # Bezout default
    with pytest.raises(ValueError):
        VarietySpec("bad", "affine", PolySystem([f]), 2)
    with pytest.raises(ValueError):
        VarietySpec("bad", "projective", PolySystem([f]), 1)
    hom = PolySystem([parse_poly("x0 + x1 + x2", ["x0", "x1", "x2"])], homogeneous=True)
    with pytest.raises(ValueError):
        VarietySpec("bad", "projective", hom, 2)


def test_on_variety_and_smooth(ctx, elliptic):
    p01 = PadicVector.from_ints(ctx, [0, 1])
    assert on_variety(elliptic, p01) and is_smooth_point(elliptic, p01)
    pm10 = PadicVector.from_ints(ctx, [-1, 0])
    assert on_variety(elliptic, pm10) and is_smooth_point(elliptic, pm10)
    assert not on_variety(elliptic, PadicVector.from_ints(ctx, [0, 0]))


def test_tangent_fixed_cases(ctx, elliptic):
    W = tangent_basis(elliptic, PadicVector.from_ints(ctx, [0, 1]))
    assert W.shape == (2, 1)
    # kernel of (0, 2): spanned by (1, 0)
    assert W[0, 0].valuation == 0 and W[1, 0].is_zero()

    line = _line()
    Wl = tangent_basis(line, PadicVector.from_ints(ctx, [3, 3]))
    assert Wl.shape == (2, 1)
    assert all(v == 0 for v in __import__("padic_sampler").smith_normal_form(Wl).divisor_valuations)

    W23 = tangent_basis(elliptic, PadicVector.from_ints(ctx, [2, 3]))
    J = PadicMatrix.from_ints(ctx, [[-12, 6]])
    assert product_is_small(J, W23, ctx.precision // 2)


def test_tangent_rejects_bad_points(ctx, elliptic):
    with pytest.raises(NotOnVarietyError):
        tangent_basis(elliptic, PadicVector.from_ints(ctx, [1, 0]))
    # node of y^2 = x^3 + x^2 at the origin: Jacobian vanishes
    nodal = VarietySpec(
        "nodal", "affine", PolySystem([parse_poly("y^2 - x^3 - x^2", ["x", "y"])]), 1
    )
    with pytest.raises(SingularPointError):
        tangent_basis(nodal, PadicVector.from_ints(ctx, [0, 0]))


def test_distortion_is_one_on_lattice_points(ctx, elliptic):
    for coords in [(0, 1), (2, 3), (-1, 0)]:
        x = PadicVector.from_ints(ctx, coords)
        assert lattice_distortion(elliptic, x) == 1
    # the origin of a variety through zero counts as a lattice point
    line = _line()
    assert lattice_distortion(line, PadicVector.from_ints(ctx, [0, 0])) == 1


def test_distortion_off_lattice_values(ctx):
    line = _line()
    x = PadicVector.from_fractions(ctx, [Fraction(1, 5), Fraction(1, 5)])
    assert lattice_distortion(line, x) == Fraction(1, 5)
    y = _elliptic_off_lattice_point(ctx)
    from padic_sampler.specfile import builtin_variety

    assert lattice_distortion(builtin_variety("elliptic"), y) == Fraction(1, 5)


def test_distortion_independent_of_choices(ctx):
    # recompute with rerandomized transport and tangent frames
    line = _line()
    rng = ctx.stream(41)
    from padic_sampler import unimodular_transport

    for coords in [(Fraction(1, 5), Fraction(1, 5)), (Fraction(2, 25), Fraction(2, 25))]:
        x = PadicVector.from_fractions(ctx, coords)
        target = lattice_distortion(line, x)
        U = unimodular_transport(x)
        W = tangent_basis(line, x)
        N = len(x)
        for _ in range(5):
            # block matrix fixing p^v e_N: upper-left unimodular, last row free
            A_block = rng.unimodular(N - 1)
            z = [rng.scalar() for _ in range(N - 1)]
            rows = []
            for i in range(N - 1):
                rows.append(list(A_block.rows[i]) + [ctx.zero()])
            rows.append(z + [ctx.one()])
            B = PadicMatrix(ctx, rows)
            U2 = B @ U
            V = rng.unimodular(W.ncols)
            W2 = W @ V
            UW = U2 @ W2
            v = int(x.val())
            if v < 0:
                UW.rows[-1] = [e.shift(-v) for e in UW.rows[-1]]
            assert absolute_det(UW) == target


def test_distortion_lower_bound_on_random_line_points(ctx):
    line = _line()
    for k in range(4):
        x = PadicVector.from_fractions(ctx, [Fraction(3, 5**k), Fraction(3, 5**k)])
        nr = lattice_distortion(line, x)
        norm = x.norm()
        assert nr >= min(Fraction(1), 1 / norm)


def test_weight_constants(ctx, elliptic):
    assert weight_constant(5, 1) == Fraction(6, 5)
    assert weight_constant(5, 2) == Fraction(31, 25)
    assert weight_constant(5, 3) == Fraction(156, 125)
    for coords in [(0, 1), (2, 3)]:
        assert slice_weight(elliptic, PadicVector.from_ints(ctx, coords)) == Fraction(6, 5)


def test_weight_off_lattice(ctx):
    X = __import__("padic_sampler").builtin_variety("elliptic")
    y = _elliptic_off_lattice_point(ctx)
    # norm 5^3, distortion 1/5: C * 125 * 5 = 750
    assert slice_weight(X, y) == Fraction(750)


def test_weight_gl_equivariance(ctx):
    # integer shear and its exact inverse
    f = parse_poly("y^2 - x^3 - 1", ["x", "y"])
    X = VarietySpec("e", "affine", PolySystem([f]), 1)
    shear = [[1, 2], [0, 1]]
    shear_inv = [[1, -2], [0, 1]]
    g = f.substitute_int_linear(shear_inv)
    Xg = VarietySpec("e_sheared", "affine", PolySystem([g]), 1)
    for coords in [(0, 1), (2, 3)]:
        x = PadicVector.from_ints(ctx, coords)
        gx = PadicVector.from_ints(
            ctx,
            [
                shear[0][0] * coords[0] + shear[0][1] * coords[1],
                shear[1][0] * coords[0] + shear[1][1] * coords[1],
            ],
        )
        assert on_variety(Xg, gx)
        assert slice_weight(Xg, gx) == slice_weight(X, x)


def test_rescale_variety(ctx, elliptic):
    assert rescale_variety(elliptic, 0, 5) is elliptic
    line = _line()
    scaled_line = rescale_variety(line, 1, 5)
    assert scaled_line.system[0] == parse_poly("x - y", ["x", "y"])

    scaled = rescale_variety(elliptic, 1, 5)
    assert scaled.system[0] == parse_poly("5*y^2 - x^3 - 125", ["x", "y"])
    # matched points: (x, y) on 5X iff (x/5, y/5) on X
    x_on_scaled = PadicVector.from_ints(ctx, [0, 5])  # from (0,1)
    assert on_variety(scaled, x_on_scaled)


def test_canonical_representative(ctx):
    v = canonical_representative(PadicVector.from_ints(ctx, [5, 10]))
    assert v == PadicVector.from_ints(ctx, [1, 2])
    w = canonical_representative(PadicVector.from_ints(ctx, [0, 3]))
    assert w == PadicVector.from_ints(ctx, [0, 1])
    with pytest.raises(ZeroVectorError):
        canonical_representative(PadicVector.from_ints(ctx, [0, 0]))


def test_canonical_scaling_invariance(ctx):
    rng = ctx.stream(42)
    for _ in range(40):
        x = rng.vector(3)
        if x.is_zero():
            continue
        lam = rng.scalar()
        while lam.is_zero() or lam.valuation != 0:
            lam = rng.scalar()
        a = canonical_representative(x)
        b = canonical_representative(x.scale(lam))
        assert all(u == v for u, v in zip(a, b))
        assert all(u == v for u, v in zip(a, canonical_representative(a)))


def test_fubini_study_fixed(ctx):
    e0 = PadicVector.from_ints(ctx, [1, 0])
    e1 = PadicVector.from_ints(ctx, [0, 1])
    assert fubini_study_distance(e0, e1) == 1
    near = PadicVector.from_ints(ctx, [1, 5])
    assert fubini_study_distance(e0, near) == Fraction(1, 5)
    assert fubini_study_distance(e0, e0) == 0


def test_fubini_study_ultrametric(ctx):
    rng = ctx.stream(43)
    for _ in range(60):
        pts = []
        while len(pts) < 3:
            v = rng.vector(3)
            if not v.is_zero():
                pts.append(canonical_representative(v))
        x, y, z = pts
        dxy = fubini_study_distance(x, y)
        assert dxy == fubini_study_distance(y, x)
        assert dxy <= max(fubini_study_distance(x, z), fubini_study_distance(z, y))


def test_projective_tangent_and_weight_helpers(ctx, conic):
    x = canonical_representative(PadicVector.from_ints(ctx, [1, 2, 4]))
    assert on_variety(conic, x)
    W = tangent_basis(conic, x)
    assert W.shape == (3, 1)
    # tangent columns lie in the cone's tangent space and extend x to an
    # orthonormal family
    joint = PadicMatrix(ctx, [[xi] + list(row) for xi, row in zip(x, W.rows)])
    from padic_sampler import smith_normal_form

    assert all(v == 0 for v in smith_normal_form(joint).divisor_valuations)
