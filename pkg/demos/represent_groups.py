"""End-to-end: abstract group -> matrices -> norm -> verified isometry group.

Run: python3 demos/represent_groups.py
"""
from renorm.pipeline import represent

for group, dim in [("cyclic4", 2), ("quaternion8", 4), ("cyclic3", 6)]:
    rep = represent(group, dim, starts=20, steps=300)
    print(f"{group} on R^{dim}: target {rep['target']} (order {rep['target_order']}), "
          f"found order {rep['isometry_order']}, isomorphic {rep['isomorphic']}, "
          f"falsifier residual {rep['isometry_group']['falsifier']['best_residual']:.2e}")
