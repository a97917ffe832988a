"""Draw uniform points on the curve y^2 = x^3 + 1 over Z_5 and look at
how they spread across residue classes.

The sampler cuts the curve with random affine lines A x = b drawn from
the lattice, keeps a line with probability proportional to the weighted
number of intersection points, and then picks one of those points.
"""

from collections import Counter

from padic_sampler import PadicContext, UNIFORM, sample_affine
from padic_sampler.specfile import builtin_variety

ctx = PadicContext(p=5, precision=32, seed=2024)
curve = builtin_variety("elliptic")

batch = sample_affine(curve, UNIFORM, count=2000, ctx=ctx)
print(f"accepted {batch.accepted} of {batch.slices_tried} slices "
      f"(rate {batch.acceptance_rate:.3f}, expected 1/3.6 = {1/3.6:.3f})")

print("\nfirst five points (x, y):")
for pt in batch.points[:5]:
    x, y = pt.coords
    print(f"  x = {x.unit_part() * 5**x.v % 5**6} ..., "
          f"y = {y.unit_part() * 5**y.v % 5**6} ...  (mod 5^6)")

counts = Counter(pt.coords.residues(1) for pt in batch.points)
print("\nresidue classes mod 5 (the curve has 5 smooth points over F_5):")
for cls, cnt in sorted(counts.items()):
    print(f"  {cls}: {cnt}  ({cnt / len(batch.points):.3f}, expect 0.200)")
