"""Static SVG and CSV renders of two-dimensional unit balls."""
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


@dataclass(frozen=True)
class BallRender:
    """Boundary samples of a planar unit ball.

    Attributes
    ----------
    theta, radius : ndarray
        Angles and radii r(theta) = 1 / N(cos theta, sin theta).
    marks : list of (str, ndarray)
        Labelled distinguished points (tips, pimple points).
    """

    theta: np.ndarray
    radius: np.ndarray
    marks: list

    @property
    def points(self):
        return self.radius[:, None] * np.column_stack([np.cos(self.theta), np.sin(self.theta)])

    def to_csv(self):
        rows = ["theta,radius"]
        rows += [f"{t:.17g},{r:.17g}" for t, r in zip(self.theta, self.radius)]
        return "\n".join(rows) + "\n"

    def to_svg(self, size=400):
        """SVG 1.1 document: boundary path, axes and one glyph style per mark label."""
        P = self.points
        extent = max([float(np.max(np.abs(P)))] + [float(np.max(np.abs(m))) for _, m in self.marks if len(m)])
        scale = 0.45 * size / extent
        c = size / 2.0
        xy = lambda p: (c + scale * p[0], c - scale * p[1])
        d = " ".join(("M" if i == 0 else "L") + "{:.4f},{:.4f}".format(*xy(p)) for i, p in enumerate(P)) + " Z"
        out = ['<?xml version="1.0" encoding="UTF-8"?>',
               f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
               f'viewBox="0 0 {size} {size}">',
               f'<line x1="0" y1="{c}" x2="{size}" y2="{c}" stroke="#bbb" stroke-width="0.5"/>',
               f'<line x1="{c}" y1="0" x2="{c}" y2="{size}" stroke="#bbb" stroke-width="0.5"/>',
               f'<path d="{d}" fill="none" stroke="#000" stroke-width="1"/>']
        for j, (label, pts) in enumerate(self.marks):
            for p in pts:
                x, y = xy(p)
                if j % 2 == 0:
                    out.append(f'<circle class="{label}" cx="{x:.4f}" cy="{y:.4f}" r="3" fill="#c00"/>')
                else:
                    out.append(f'<rect class="{label}" x="{x - 2.5:.4f}" y="{y - 2.5:.4f}" width="5" '
                               f'height="5" fill="none" stroke="#00c"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def render_ball_2d(norm, resolution=360):
    """Sample the unit sphere of a norm on R^2 at ``resolution`` equally spaced angles.

    Tips of pimple norms are marked with filled circles and the pimple
    points themselves with squares.

    Raises
    ------
    ArgumentError
        If the norm is not two-dimensional or ``resolution < 64``.
    """
    if norm.dim != 2:
        raise ArgumentError(f"render needs a norm on R^2, got dimension {norm.dim}")
    if int(resolution) < 64:
        raise ArgumentError("resolution must be at least 64")
    theta = 2 * np.pi * np.arange(int(resolution)) / int(resolution)
    U = np.column_stack([np.cos(theta), np.sin(theta)])
    radius = 1.0 / norm.eval_many(U)
    marks = []
    spec = getattr(norm, "spec", None)
    if spec is not None and hasattr(spec, "points"):
        from .pimple import tips
        marks.append(("tip", tips(spec)))
        marks.append(("point", np.vstack([spec.points, -spec.points])))
    return BallRender(theta, radius, marks)


def radius_maxima(render, rel_tol=1e-12):
    """Indices of strict-or-flat local maxima of the radius over the closed curve."""
    r = render.radius
    prev, nxt = np.roll(r, 1), np.roll(r, -1)
    tol = rel_tol * np.max(r)
    return np.nonzero((r >= prev - tol) & (r >= nxt - tol) & ((r > prev + tol) | (r > nxt + tol)))[0]
