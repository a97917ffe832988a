"""Command-line front end: sample, integrate, volume, stats, examples.

Exit codes: 0 on success, 2 on spec/validation errors, 3 when a slice
exceeds its rejection bound (wrong degree bound or density maximum).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from scipy.stats import chi2

from .context import PadicContext
from .errors import (
    BoundViolationError,
    PadicError,
    PolySyntaxError,
    SpecFileError,
    UnknownVariableError,
)
from .sampler import (
    DensitySpec,
    integrate_affine,
    integrate_projective,
    sample_affine,
    sample_projective,
)
from .specfile import (
    BUILTIN_EXAMPLES,
    RunManifest,
    builtin_variety,
    emit_example,
    load_density,
    load_variety,
    read_sample_file,
    write_sample_file,
)
from .variety import VarietyPoint, rescale_variety


def _resolve_variety(arg: str):
    path = Path(arg)
    if path.exists():
        return load_variety(path)
    if arg in BUILTIN_EXAMPLES:
        return builtin_variety(arg)
    raise SpecFileError(f"variety file {arg!r} not found and not a built-in name")


def _resolve_density(args, ctx, X):
    if args.density == "uniform":
        return DensitySpec(support_radius=args.support_radius)
    density = load_density(args.density, ctx, X.ambient_vars)
    if args.support_radius and args.support_radius != density.support_radius:
        raise SpecFileError(
            f"--support-radius {args.support_radius} conflicts with density file "
            f"radius {density.support_radius}"
        )
    return density


def _prepare(X, density, p):
    """Apply the rescaling trick for supports beyond the lattice."""
    r = density.support_radius
    if r == 0:
        return X, density, 0
    if X.ambient != "affine":
        raise SpecFileError("support radius applies to affine varieties only")
    X_scaled = rescale_variety(X, r, p)
    inner = DensitySpec(
        evaluate=density.evaluate,
        f_max=density.f_max,
        support_radius=0,
        label=density.label,
    )
    return X_scaled, inner, r


def cmd_sample(args) -> int:
    ctx = PadicContext(args.prime, args.precision, args.seed)
    X = _resolve_variety(args.variety)
    density = _resolve_density(args, ctx, X)
    if density.f_max <= 0:
        raise SpecFileError("density is identically zero; nothing to sample")
    X_run, density_run, r = _prepare(X, density, ctx.p)
    start = time.perf_counter()
    if X.ambient == "affine":
        batch = sample_affine(X_run, density_run, args.count, ctx, args.workers)
    else:
        batch = sample_projective(X_run, density_run, args.count, ctx, args.workers)
    elapsed = time.perf_counter() - start
    points = batch.points
    if r:
        points = [VarietyPoint(pt.coords.shift(-r), pt.residual_ok) for pt in points]
    header = {
        "variety": X.name,
        "ambient": X.ambient,
        "prime": ctx.p,
        "precision": ctx.precision,
        "seed": ctx.seed,
        "workers": args.workers,
        "count": args.count,
        "support_radius": r,
        "density": args.density,
        "slices_tried": batch.slices_tried,
        "accepted": batch.accepted,
        "resamples": batch.resamples,
    }
    write_sample_file(args.out, header, points, batch.extras["slice_ids"])
    manifest = RunManifest(
        command=_command_list(args),
        seed=ctx.seed,
        prime=ctx.p,
        precision=ctx.precision,
        workers=args.workers,
        resamples=batch.resamples,
        slices_tried=batch.slices_tried,
        accepted=batch.accepted,
        wall_time_s=elapsed,
        outputs={"points": str(args.out)},
    )
    manifest.write(args.manifest or f"{args.out}.manifest.json")
    print(
        f"wrote {len(points)} points to {args.out} "
        f"({batch.slices_tried} slices tried, {batch.accepted} accepted, "
        f"{batch.resamples} resampled)"
    )
    return 0


def _command_list(args):
    return [str(a) for a in args._raw_argv]


def cmd_integrate(args, uniform_only: bool = False) -> int:
    ctx = PadicContext(args.prime, args.precision, args.seed)
    X = _resolve_variety(args.variety)
    if uniform_only:
        density = DensitySpec(support_radius=args.support_radius)
    else:
        density = _resolve_density(args, ctx, X)
    X_run, density_run, r = _prepare(X, density, ctx.p)
    if X.ambient == "affine":
        est = integrate_affine(X_run, density_run, args.samples, ctx, args.workers)
        if r:
            scale = float(ctx.p) ** (r * X.dim)
            est.value *= scale
            est.std_error *= scale
            est.chebyshev_bound *= scale
    else:
        if r:
            raise SpecFileError("support radius applies to affine varieties only")
        est = integrate_projective(X_run, density_run, args.samples, ctx, args.workers)
    print(f"value           {est.value:.6f}")
    print(f"std_error       {est.std_error:.6e}")
    print(f"chebyshev_95    {est.chebyshev_bound:.6e}")
    print(f"samples         {est.samples}")
    print(f"resamples       {est.resamples}")
    return 0


def cmd_volume(args) -> int:
    return cmd_integrate(args, uniform_only=True)


def cmd_stats(args) -> int:
    header, points = read_sample_file(args.samples)
    p = header["prime"]
    precision = header["precision"]
    modulus = args.modulus
    j = 0
    m = 1
    while m < modulus:
        m *= p
        j += 1
    if m != modulus or j < 1:
        raise SpecFileError(f"modulus {modulus} is not a positive power of p = {p}")
    if j > precision:
        raise SpecFileError(f"modulus exponent {j} exceeds carried precision {precision}")
    r = header.get("support_radius", 0)
    counts = {}
    for vec in points:
        lifted = vec.shift(r) if r else vec
        key = lifted.residues(j)
        counts[key] = counts.get(key, 0) + 1
    total = sum(counts.values())
    print(f"{total} points in {len(counts)} residue classes mod {p}^{j}")
    for key in sorted(counts):
        print(f"  {key}: {counts[key]}")
    k = len(counts)
    if k >= 2:
        expected = total / k
        stat = sum((c - expected) ** 2 / expected for c in counts.values())
        dof = k - 1
        pval = float(chi2.sf(stat, dof))
    else:
        stat, dof, pval = 0.0, 0, 1.0
    print(f"chi_square      {stat:.4f}")
    print(f"dof             {dof}")
    print(f"p_value         {pval:.6f}")
    return 0


def cmd_examples(args) -> int:
    if args.action == "list":
        for name in sorted(BUILTIN_EXAMPLES):
            print(name)
        return 0
    if not args.name:
        raise SpecFileError("examples emit requires a NAME")
    out = args.out or f"{args.name}.json"
    emit_example(args.name, out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="padic-sampler",
        description="Sample points and estimate integrals on p-adic varieties "
        "by random linear slicing.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp, samples: bool):
        sp.add_argument("--variety", required=True, help="variety JSON file or built-in name")
        sp.add_argument("--prime", type=int, required=True)
        sp.add_argument("--precision", type=int, default=32)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--support-radius", type=int, default=0)
        if samples:
            sp.add_argument("--samples", type=int, required=True)
        else:
            sp.add_argument("--count", type=int, required=True)

    sp = sub.add_parser("sample", help="draw points with a prescribed density")
    common(sp, samples=False)
    sp.add_argument("--density", default="uniform", help="'uniform' or a density JSON file")
    sp.add_argument("--out", required=True)
    sp.add_argument("--manifest", default=None)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("integrate", help="Monte Carlo integral of a density")
    common(sp, samples=True)
    sp.add_argument("--density", default="uniform")
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("volume", help="integrate the uniform indicator")
    common(sp, samples=True)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("stats", help="residue histogram and chi-square report")
    sp.add_argument("--samples", required=True, help="sample file from the sample command")
    sp.add_argument("--modulus", type=int, required=True, help="p^j to reduce by")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("examples", help="list or emit built-in variety files")
    sp.add_argument("action", choices=["list", "emit"])
    sp.add_argument("name", nargs="?", default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_examples)

    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._raw_argv = argv
    try:
        return args.func(args)
    except BoundViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SpecFileError, PolySyntaxError, UnknownVariableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PadicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
