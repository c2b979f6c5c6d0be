"""Draw the unit ball of a C4 pimple norm and list its tips.

Run: python3 demos/pimple_ball.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np

from renorm import pimple_norm, tips
from renorm.corpus import interacting_c4, two_orbits_euclidean
from renorm.render import radius_maxima, render_ball_2d

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
for name, spec in [("square", interacting_c4(0.8)), ("two_orbits", two_orbits_euclidean())]:
    norm = pimple_norm(spec)
    r = render_ball_2d(norm, 1440)
    (out / f"{name}.svg").write_text(r.to_svg())
    idx = radius_maxima(r)
    print(f"{name}: {len(tips(spec))} tips, radius maxima at angles",
          np.round(r.theta[idx], 4).tolist(), "with radii", np.round(r.radius[idx], 6).tolist())
