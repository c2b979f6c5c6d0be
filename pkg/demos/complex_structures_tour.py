"""Complex structures of a C4 pimple norm and of a complexified square.

Run: python3 demos/complex_structures_tour.py
"""
import numpy as np

from renorm import complex_structure_report, complexify_norm, enumerate_tip_candidates, group_closure
from renorm.corpus import factory_c4
from renorm.norms import WeightedLp

spec, _ = factory_c4()
G = group_closure(enumerate_tip_candidates(spec))
rep = complex_structure_report(G)
print(f"C4 pimple norm: isometry group of order {G.order}, {len(rep.roots)} roots of -Id "
      f"in {len(rep.classes)} classes")
for J in rep.roots:
    print(np.round(J, 12))

norm, J, c = complexify_norm(WeightedLp(3, [1.0, 2.0]))
sq = complex_structure_report(group_closure([J, c]), norm)
print(f"complexified square: {len(sq.roots)} roots in {len(sq.classes)} class; "
      f"c J c = -J: {np.array_equal(c @ J @ c, -J)}")
