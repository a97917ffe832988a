"""Variety and density files, built-in example specs, run manifests.

Variety files are JSON with polynomials as expression strings, so the
coefficients stay exact integers and no computer algebra system is
needed to author them. Custom densities are step functions on residue
classes, which keeps their maximum and support computable.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .context import PadicContext
from .errors import PadicError, SpecFileError
from .poly import PolySystem, parse_poly
from .sampler import DensitySpec
from .scalar import decode_scalar
from .variety import VarietyPoint, VarietySpec
from .vectors import PadicVector

BUILTIN_EXAMPLES = {
    "elliptic": {
        "name": "elliptic",
        "ambient": {"type": "affine", "n_vars": 2},
        "variables": ["x", "y"],
        "polynomials": ["y^2 - x^3 - 1"],
        "dimension": 1,
        "degree": 3,
    },
    "sl2": {
        "name": "sl2",
        "ambient": {"type": "affine", "n_vars": 4},
        "variables": ["a", "b", "c", "d"],
        "polynomials": ["a*d - b*c - 1"],
        "dimension": 3,
        "degree": 2,
    },
    "pline": {
        "name": "pline",
        "ambient": {"type": "projective", "n_vars": 3},
        "variables": ["x0", "x1", "x2"],
        "polynomials": ["x0 + x1 + x2"],
        "dimension": 1,
        "degree": 1,
    },
    "conic": {
        "name": "conic",
        "ambient": {"type": "projective", "n_vars": 3},
        "variables": ["x0", "x1", "x2"],
        "polynomials": ["x0*x2 - x1^2"],
        "dimension": 1,
        "degree": 2,
    },
}


def variety_from_payload(payload: dict) -> VarietySpec:
    try:
        ambient = payload["ambient"]
        kind = ambient["type"]
        n_vars = int(ambient["n_vars"])
        variables = list(payload["variables"])
        exprs = list(payload["polynomials"])
        dim = int(payload["dimension"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFileError(f"malformed variety file: {exc}") from exc
    if kind not in ("affine", "projective"):
        raise SpecFileError(f"ambient type must be affine or projective, got {kind!r}")
    if len(variables) != n_vars:
        raise SpecFileError(
            f"ambient declares {n_vars} variables but {len(variables)} are listed"
        )
    if not exprs:
        raise SpecFileError("variety file lists no polynomials")
    try:
        polys = [parse_poly(e, variables) for e in exprs]
        system = PolySystem(polys, homogeneous=True if kind == "projective" else None)
        return VarietySpec(
            name=str(payload.get("name", "variety")),
            ambient=kind,
            system=system,
            dim=dim,
            degree_bound=int(payload.get("degree", 0) or 0),
        )
    except PadicError:
        raise
    except ValueError as exc:
        raise SpecFileError(str(exc)) from exc


def load_variety(path) -> VarietySpec:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFileError(f"cannot read variety file {path}: {exc}") from exc
    return variety_from_payload(payload)


def builtin_variety(name: str) -> VarietySpec:
    if name not in BUILTIN_EXAMPLES:
        raise SpecFileError(
            f"unknown example {name!r}; available: {', '.join(sorted(BUILTIN_EXAMPLES))}"
        )
    return variety_from_payload(BUILTIN_EXAMPLES[name])


def emit_example(name: str, path) -> None:
    if name not in BUILTIN_EXAMPLES:
        raise SpecFileError(f"unknown example {name!r}")
    Path(path).write_text(json.dumps(BUILTIN_EXAMPLES[name], indent=2) + "\n")


# ---------------------------------------------------------------------------
# step densities on residue classes
# ---------------------------------------------------------------------------


def density_from_payload(payload: dict, ctx: PadicContext, n_vars: int) -> DensitySpec:
    """Step density: weight per residue class mod p^j, zero elsewhere.

    With a positive support radius r, the residue vectors refer to the
    coordinates of the rescaled point p^r * x, which lie in the lattice.
    """
    try:
        j = int(payload["modulus_exponent"])
        classes = payload["classes"]
        r = int(payload.get("support_radius", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFileError(f"malformed density file: {exc}") from exc
    if j < 1 or j > ctx.precision:
        raise SpecFileError(f"modulus exponent {j} outside [1, {ctx.precision}]")
    table = {}
    mod = ctx.pw(j)
    for entry in classes:
        try:
            res = tuple(int(v) % mod for v in entry["residues"])
            w = Fraction(entry["weight"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFileError(f"malformed density class: {exc}") from exc
        if len(res) != n_vars:
            raise SpecFileError(f"residue vector arity {len(res)} != {n_vars}")
        if w < 0:
            raise SpecFileError("density weights must be nonnegative")
        table[res] = w
    f_max = max(table.values(), default=Fraction(0))

    def evaluate(point: VarietyPoint):
        return table.get(point.coords.residues(j), Fraction(0))

    return DensitySpec(
        evaluate=evaluate,
        f_max=f_max,
        support_radius=r,
        label=payload.get("label", "step"),
    )


def load_density(path, ctx: PadicContext, n_vars: int) -> DensitySpec:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFileError(f"cannot read density file {path}: {exc}") from exc
    return density_from_payload(payload, ctx, n_vars)


# ---------------------------------------------------------------------------
# sample files and manifests
# ---------------------------------------------------------------------------


@dataclass
class RunManifest:
    command: list
    seed: int
    prime: int
    precision: int
    workers: int
    resamples: int = 0
    slices_tried: int = 0
    accepted: int = 0
    wall_time_s: float = 0.0
    outputs: dict = field(default_factory=dict)

    def write(self, path):
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))


def write_sample_file(path, header: dict, points, slice_ids) -> None:
    """Line-delimited records: one header, then one record per point."""
    lines = [json.dumps({"type": "header", **header}, sort_keys=True)]
    for pt, sid in zip(points, slice_ids):
        lines.append(
            json.dumps(
                {"type": "point", "slice": list(sid), "coords": pt.encode()},
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_sample_file(path):
    """(header dict, list of PadicVector) from a sample file."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SpecFileError(f"empty sample file {path}")
    header = json.loads(lines[0])
    if header.get("type") != "header":
        raise SpecFileError("sample file must start with a header record")
    ctx = PadicContext(header["prime"], header["precision"], header.get("seed", 0))
    points = []
    for line in lines[1:]:
        rec = json.loads(line)
        if rec.get("type") != "point":
            continue
        points.append(
            PadicVector(ctx, tuple(decode_scalar(ctx, e) for e in rec["coords"]))
        )
    return header, points
