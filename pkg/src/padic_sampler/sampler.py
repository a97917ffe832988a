"""Monte Carlo integration and exact-density sampling by random slicing.

The affine estimator draws (A, b) uniformly from the lattice, sums
weight * density over the finite slice intersection, and averages; its
expectation is the integral of the density over the variety. Sampling
runs rejection on slices (accept with probability fbar/M) and then picks
a point of the accepted slice with probability proportional to its
weighted density, which yields the target law exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .context import PadicContext
from .errors import (
    BoundViolationError,
    DegenerateSliceError,
    PrecisionExhausted,
    RankDeficientError,
)
from .intersect import intersect_affine, intersect_projective
from .variety import VarietySpec, slice_weight, weight_constant


@dataclass
class DensitySpec:
    """A (possibly unnormalized) density on variety points.

    `evaluate` of None means the uniform indicator of lattice points
    (affine) or the constant 1 (projective). Custom densities must
    supply a finite `f_max` and, in the affine case, have support inside
    p^-support_radius times the lattice; the integrate/sample entry
    points require support_radius 0, so rescale the variety first.
    Unknown normalization is fine: only ratios f/f_max enter.
    """

    evaluate: Optional[Callable] = None
    f_max: Fraction | float = Fraction(1)
    support_radius: int = 0
    label: str = "uniform"


UNIFORM = DensitySpec()


@dataclass
class SliceContribution:
    value: Fraction | float
    terms: list  # (VarietyPoint, weight, density value)
    candidates: int


@dataclass
class IntegralEstimate:
    value: float
    samples: int
    std_error: float
    chebyshev_bound: float
    resamples: int

    def __str__(self):
        return (
            f"{self.value:.6f} (std error {self.std_error:.2e}, "
            f"95% Chebyshev half-width {self.chebyshev_bound:.2e}, "
            f"{self.samples} slices, {self.resamples} resampled)"
        )


@dataclass
class SampleBatch:
    points: list
    weights_used: list
    slices_tried: int
    accepted: int
    resamples: int
    seed: int
    workers: int
    extras: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.slices_tried if self.slices_tried else 0.0


def _density_value(density: DensitySpec, point):
    if density.evaluate is None:
        return 1
    return density.evaluate(point)


def slice_sum_affine(X: VarietySpec, density: DensitySpec, A, b) -> SliceContribution:
    """Sum of weight(x) * density(x) over the slice intersection.

    Zero for an empty slice; raises DegenerateSliceError when the solver
    could not certify the intersection (callers resample).
    """
    inter = intersect_affine(X, A, b)
    if inter.degenerate:
        raise DegenerateSliceError("unresolved slice candidates")
    total = 0
    terms = []
    for pt in inter.points:
        f = _density_value(density, pt)
        if f < 0:
            raise ValueError("densities must be nonnegative")
        if f:
            w = slice_weight(X, pt)
            total += w * f
            terms.append((pt, w, f))
    return SliceContribution(total, terms, inter.residue_candidates_tried)


def slice_sum_projective(X: VarietySpec, density: DensitySpec, A) -> SliceContribution:
    """Sum of density(x) over the projective slice (no weights enter)."""
    inter = intersect_projective(X, A)
    if inter.degenerate:
        raise DegenerateSliceError("unresolved slice candidates")
    total = 0
    terms = []
    for pt in inter.points:
        f = _density_value(density, pt)
        if f < 0:
            raise ValueError("densities must be nonnegative")
        if f:
            total += f
            terms.append((pt, Fraction(1), f))
    return SliceContribution(total, terms, inter.residue_candidates_tried)


def rejection_bound(X: VarietySpec, density: DensitySpec, p: int) -> Fraction:
    """A-priori bound M with fbar <= M almost surely.

    Affine: d * q^((n+1) r) * C * f_max with C the lattice weight
    constant. Projective: d * f_max (the weight constant is absorbed in
    the normalization). Users may override with a tighter bound.
    """
    if X.ambient == "projective":
        return Fraction(X.degree_bound) * Fraction(density.f_max)
    return affine_rejection_bound(X, density, p)


def chebyshev_sample_size(f_max, d, n, q, eps, delta) -> int:
    """Smallest m with f_max^2 d^2 C^2 / (eps^2 m) <= delta."""
    if min(f_max, d, eps, delta) <= 0 or n < 1 or q < 2:
        raise ValueError("all parameters must be positive")
    C = weight_constant(q, n)
    bound = Fraction(f_max) ** 2 * d**2 * C**2
    return math.ceil(bound / (Fraction(eps) ** 2 * Fraction(delta)))


def _chebyshev_half_width(f_max, d, n, q, m, delta=0.05) -> float:
    C = weight_constant(q, n)
    return float(f_max) * d * float(C) / math.sqrt(delta * m)


def _worker_counts(total: int, workers: int):
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _draw_affine_slice(rng, n, N):
    return rng.matrix(n, N), rng.vector(n)


_RESAMPLE_ERRORS = (RankDeficientError, DegenerateSliceError, PrecisionExhausted)


def integrate_affine(
    X: VarietySpec,
    density: DensitySpec,
    samples: int,
    ctx: PadicContext,
    workers: int = 1,
) -> IntegralEstimate:
    """Monte Carlo estimate of the integral of `density` over X.

    Requires the density support inside the lattice (support_radius 0);
    rescale the variety first otherwise. Deterministic given
    (ctx.seed, workers).
    """
    if X.ambient != "affine":
        raise ValueError("integrate_affine needs an affine variety")
    if density.support_radius:
        raise ValueError("rescale the variety; direct support_radius > 0 unsupported")
    n, N = X.dim, X.ambient_vars
    acc = acc2 = 0.0
    resamples = 0
    for w, m_w in enumerate(_worker_counts(samples, workers)):
        rng = ctx.stream(w)
        got = 0
        while got < m_w:
            A, b = _draw_affine_slice(rng, n, N)
            try:
                contrib = slice_sum_affine(X, density, A, b)
            except _RESAMPLE_ERRORS:
                resamples += 1
                continue
            v = float(contrib.value)
            acc += v
            acc2 += v * v
            got += 1
    mean = acc / samples
    var = max(0.0, (acc2 - samples * mean * mean) / max(1, samples - 1))
    return IntegralEstimate(
        value=mean,
        samples=samples,
        std_error=math.sqrt(var / samples),
        chebyshev_bound=_chebyshev_half_width(
            float(density.f_max), X.degree_bound, n, ctx.p, samples
        ),
        resamples=resamples,
    )


def integrate_projective(
    X: VarietySpec,
    density: DensitySpec,
    samples: int,
    ctx: PadicContext,
    workers: int = 1,
) -> IntegralEstimate:
    """Estimate of the integral over a projective variety.

    Each draw contributes total_measure(P^n) * fbar(A), whose mean is
    the integral.
    """
    if X.ambient != "projective":
        raise ValueError("integrate_projective needs a projective variety")
    n, N = X.dim, X.ambient_vars
    scale = float(weight_constant(ctx.p, n))
    acc = acc2 = 0.0
    resamples = 0
    for w, m_w in enumerate(_worker_counts(samples, workers)):
        rng = ctx.stream(w)
        got = 0
        while got < m_w:
            A = rng.matrix(n, N)
            try:
                contrib = slice_sum_projective(X, density, A)
            except _RESAMPLE_ERRORS:
                resamples += 1
                continue
            v = scale * float(contrib.value)
            acc += v
            acc2 += v * v
            got += 1
    mean = acc / samples
    var = max(0.0, (acc2 - samples * mean * mean) / max(1, samples - 1))
    return IntegralEstimate(
        value=mean,
        samples=samples,
        std_error=math.sqrt(var / samples),
        chebyshev_bound=_chebyshev_half_width(
            float(density.f_max), X.degree_bound, n, ctx.p, samples
        ),
        resamples=resamples,
    )


def _rejection_loop(X, density, count, ctx, workers, draw, summax, bound):
    points, weights = [], []
    tried = accepted = resamples = 0
    slice_ids = []
    for w, c_w in enumerate(_worker_counts(count, workers)):
        rng = ctx.stream(w)
        got = 0
        k = 0
        while got < c_w:
            args = draw(rng)
            try:
                contrib = summax(X, density, *args)
            except _RESAMPLE_ERRORS:
                resamples += 1
                continue
            tried += 1
            k += 1
            fb = contrib.value
            if fb > bound:
                raise BoundViolationError(
                    f"slice sum {float(fb):.6g} exceeds bound {float(bound):.6g}; "
                    "check degree bound and f_max"
                )
            if not fb:
                continue
            if rng.uniform() * float(bound) >= float(fb):
                continue
            accepted += 1
            u = rng.uniform() * float(fb)
            cum = 0.0
            chosen = contrib.terms[-1]
            for term in contrib.terms:
                cum += float(term[1] * term[2])
                if u < cum:
                    chosen = term
                    break
            points.append(chosen[0])
            weights.append(chosen[1] * chosen[2])
            slice_ids.append((w, k - 1))
            got += 1
    return points, weights, tried, accepted, resamples, slice_ids


def sample_affine(
    X: VarietySpec,
    density: DensitySpec,
    count: int,
    ctx: PadicContext,
    workers: int = 1,
    bound: Fraction | float | None = None,
) -> SampleBatch:
    """Draw `count` points on X with law proportional to the density.

    Rejection on slices with the a-priori bound M, then a point of the
    accepted slice with probability weight * density / fbar. Support
    must lie inside the lattice; rescale the variety first otherwise.
    """
    if X.ambient != "affine":
        raise ValueError("sample_affine needs an affine variety")
    if density.support_radius:
        raise ValueError("rescale the variety; direct support_radius > 0 unsupported")
    n, N = X.dim, X.ambient_vars
    M = rejection_bound(X, density, ctx.p) if bound is None else bound
    points, weights, tried, accepted, resamples, ids = _rejection_loop(
        X,
        density,
        count,
        ctx,
        workers,
        lambda rng: _draw_affine_slice(rng, n, N),
        slice_sum_affine,
        M,
    )
    return SampleBatch(
        points, weights, tried, accepted, resamples, ctx.seed, workers,
        extras={"slice_ids": ids, "bound": float(M)},
    )


def sample_projective(
    X: VarietySpec,
    density: DensitySpec,
    count: int,
    ctx: PadicContext,
    workers: int = 1,
    bound: Fraction | float | None = None,
) -> SampleBatch:
    """Projective analogue of sample_affine; point chosen with f/fbar."""
    if X.ambient != "projective":
        raise ValueError("sample_projective needs a projective variety")
    n, N = X.dim, X.ambient_vars
    M = rejection_bound(X, density, ctx.p) if bound is None else bound
    points, weights, tried, accepted, resamples, ids = _rejection_loop(
        X,
        density,
        count,
        ctx,
        workers,
        lambda rng: (rng.matrix(n, N),),
        slice_sum_projective,
        M,
    )
    return SampleBatch(
        points, weights, tried, accepted, resamples, ctx.seed, workers,
        extras={"slice_ids": ids, "bound": float(M)},
    )


def affine_rejection_bound(X: VarietySpec, density: DensitySpec, p: int) -> Fraction:
    """d * q^((n+1)r) * C * f_max: the closed-form slice-sum bound."""
    if X.ambient != "affine":
        raise ValueError("affine bound requested for a projective variety")
    C = weight_constant(p, X.dim)
    r = density.support_radius
    return (
        Fraction(X.degree_bound)
        * Fraction(p) ** ((X.dim + 1) * r)
        * C
        * Fraction(density.f_max)
    )
