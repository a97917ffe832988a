"""Scalar arithmetic, valuations, uniform lattice draws, stream splitting."""

import json
import math
from fractions import Fraction

import pytest

from padic_sampler import (
    PadicContext,
    PadicVector,
    PrecisionExhausted,
    decode_scalar,
    is_prime,
    sample_uniform_O,
    split_stream,
    vec_val_norm,
)
from conftest import chi_square_pvalue


def test_context_rejects_non_primes():
    for bad in (1, 4, 9, 100, 2**31):
        with pytest.raises(ValueError):
            PadicContext(bad)
    for good in (2, 3, 5, 7, 2147483647):
        PadicContext(good)


def test_context_rejects_tiny_precision():
    with pytest.raises(ValueError):
        PadicContext(5, precision=1)


def test_is_prime_desk_values():
    primes = {2, 3, 5, 7, 11, 13, 101, 7919, 2147483647}
    for n in range(2, 120):
        assert is_prime(n) == all(n % d for d in range(2, n)), n
    assert all(is_prime(n) for n in primes)


def test_base_p_carry(ctx):
    # 1 + 4 carries into valuation 1, i.e. the scalar 5
    s = ctx.integer(1) + ctx.integer(4)
    assert s.v == 1 and s.u == 1


def test_invert_two_identity(ctx):
    inv2 = ctx.integer(2).invert()
    assert inv2.v == 0
    assert ctx.integer(2) * inv2 == ctx.one()


def test_invert_two_explicit_unit():
    # extended Euclid mod 5^4: 2 * 313 = 626 = 1 mod 625
    ctx = PadicContext(5, 4)
    inv2 = ctx.integer(2).invert()
    assert inv2.u == 313
    assert (2 * inv2.u) % 625 == 1


def test_cancellation_of_exact_negatives_gives_zero(ctx):
    a = ctx.integer(7)
    assert (a + (-a)).is_zero()
    assert (a - a).is_zero()


def test_cancellation_below_window_raises(ctx):
    # a sampled scalar with positive valuation carries fewer digits;
    # cancelling it entirely cannot be certified as zero
    rng = ctx.stream(0)
    s = rng.scalar()
    while s.is_zero() or s.prec == ctx.precision:
        s = rng.scalar()
    with pytest.raises(PrecisionExhausted):
        _ = s - s


def test_division_by_zero(ctx):
    with pytest.raises(ZeroDivisionError):
        ctx.zero().invert()


def test_valuation_laws_on_random_pairs(ctx):
    rng = ctx.stream(1)
    for _ in range(300):
        a, b = rng.scalar(), rng.scalar()
        if a.is_zero() or b.is_zero():
            continue
        ab = a * b
        assert ab.valuation == a.valuation + b.valuation
        assert ab.abs_value() == a.abs_value() * b.abs_value()
        try:
            s = a + b
        except PrecisionExhausted:
            continue
        assert s.valuation >= min(a.valuation, b.valuation)
        if a.valuation != b.valuation:
            assert s.valuation == min(a.valuation, b.valuation)


def test_fraction_injection_and_values(ctx):
    x = ctx.fraction(Fraction(7, 10))
    assert x.v == -1
    assert x * ctx.integer(10) == ctx.integer(7)
    assert ctx.fraction(Fraction(0)).is_zero()


def test_vector_val_norm(ctx):
    x = PadicVector.from_fractions(ctx, [5, 25, Fraction(1, 5)])
    assert vec_val_norm(x) == (-1, Fraction(5))
    z = PadicVector.from_ints(ctx, [0, 0])
    assert vec_val_norm(z) == (math.inf, Fraction(0))
    y = PadicVector.from_ints(ctx, [2, 10])
    assert vec_val_norm(y) == (0, Fraction(1))


def test_digit_stream_positional_encoding():
    ctx = PadicContext(5, 3, seed=1)
    rng = ctx.stream(0)
    s = rng._scalar_from_digits([2, 0, 4])
    assert s.v == 0 and s.u == 102  # 2 + 0*5 + 4*25


def test_all_zero_digits_give_exact_zero():
    ctx = PadicContext(5, 4, seed=1)
    s = ctx.stream(0)._scalar_from_digits([0, 0, 0, 0])
    assert s.is_zero()


def test_uniform_sampler_valuation_frequency(ctx):
    # P(v >= 1) = 1/p; binomial check within 4 standard errors
    rng = ctx.stream(2)
    m = 20000
    hits = sum(1 for _ in range(m) if rng.scalar().valuation >= 1)
    p_hat = hits / m
    se = math.sqrt(0.2 * 0.8 / m)
    assert abs(p_hat - 0.2) < 4 * se


@pytest.mark.parametrize("j", [1, 2, 3])
def test_uniform_sampler_residue_equidistribution(ctx, j):
    rng = ctx.stream(3 + j)
    m = 4000 * 5**j
    counts = {}
    for _ in range(m):
        r = rng.scalar().residue(j)
        counts[r] = counts.get(r, 0) + 1
    k = 5**j
    pval, _ = chi_square_pvalue(
        [counts.get(i, 0) for i in range(k)], [m / k] * k
    )
    assert pval > 1e-3


def test_stream_determinism_and_split(ctx):
    a = [split_stream(ctx, 0).scalar() for _ in range(4)]
    b = [split_stream(ctx, 0).scalar() for _ in range(4)]
    # a stream restarted from the same (seed, worker) replays exactly
    assert all((x.is_zero() and y.is_zero()) or (x == y) for x, y in zip(a, b))
    d0 = split_stream(ctx, 0).digits(16)
    d1 = split_stream(ctx, 1).digits(16)
    assert d0 != d1


def test_sample_uniform_shapes(ctx):
    assert sample_uniform_O(ctx) is not None
    assert len(sample_uniform_O(ctx, 3)) == 3
    assert sample_uniform_O(ctx, (2, 4)).shape == (2, 4)


def test_encode_decode_round_trip(ctx):
    rng = ctx.stream(5)
    for _ in range(200):
        s = rng.scalar()
        payload = json.loads(json.dumps(s.encode()))
        t = decode_scalar(ctx, payload)
        if s.is_zero():
            assert t.is_zero()
        else:
            assert (t.v, t.u, t.prec) == (s.v, s.u, s.prec)
    neg = ctx.fraction(Fraction(-3, 25))
    assert decode_scalar(ctx, neg.encode()) == neg
