"""Why the {+-Id} construction uses the l4 base instead of the disk.

On the euclidean disk the manufactured points sit on a single line,
so the reflection across that line is an isometry of the pimple norm.
The tip search rejects it because of the second, tiny pimple, but the
falsifier sees a map that almost preserves the norm.  With the l4 base
and a generic base point the residual is two orders of magnitude larger.

Run: python3 demos/euclidean_c2_diagnostic.py
"""
from renorm import isometry_group_report
from renorm.corpus import factory_c2, factory_c2_euclidean

for label, make in [("euclidean disk, x0 = e1", factory_c2_euclidean), ("l4 ball, generic x0", factory_c2)]:
    spec, fam = make()
    rep = isometry_group_report(spec, starts=40, steps=300)
    f = rep.falsifier
    print(f"{label}: candidate order {rep.order}, lambdas {spec.lambdas.round(12).tolist()}, "
          f"falsifier residual {f.best_residual:.2e} at distance {f.best_distance:.2e}")
