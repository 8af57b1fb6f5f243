"""Deterministic SVG figures of the cover in spiral coordinates.

The cross-section is the plane of the first two sphere coordinates. A cover
point (x, theta) with x = (cos psi, sin psi, 0, ...) is drawn at radius
exp(RATE * theta) and angle psi. RATE < 1 keeps several deck translates on
one page.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from .cover import alpha, base_point, chart_origin, sphere_dist
from .quadric import FormContext
from .unipotent import LiftedElement, act

RATE = 0.25
KINDS = ("lightcone", "photon", "domain")
SVG_SALT = "einkit"
STYLE = {
    "svg.hashsalt": SVG_SALT,
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.linewidth": 0.6,
    "lines.linewidth": 1.0,
}


def spiral_xy(psi: np.ndarray, theta: np.ndarray, rate: float = RATE) -> tuple[np.ndarray, np.ndarray]:
    r = np.exp(rate * np.asarray(theta))
    return r * np.cos(psi), r * np.sin(psi)


def _plane_points(ctx: FormContext, psi: np.ndarray) -> np.ndarray:
    x = np.zeros((psi.size, ctx.n))
    x[:, 0] = np.cos(psi)
    x[:, 1] = np.sin(psi)
    return x


def _new_axes(title: str):
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot(1, 1, 1)
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    return fig, ax


def draw_photon(ctx: FormContext, turns: float = 2.0):
    """The standard photon: a single logarithmic spiral."""
    fig, ax = _new_axes("photon")
    phi = np.linspace(-turns * math.pi, turns * math.pi, 1601)
    ax.plot(*spiral_xy(phi, phi), color="C0")
    for j in range(-int(turns), int(turns) + 1):
        ax.plot(*spiral_xy(np.array([j * math.pi]), np.array([j * math.pi])), "o", color="k", ms=3)
    return fig


def draw_lightcone(ctx: FormContext, shells: int = 2):
    """Lightcone of the base point: theta = +-d + 2 pi k, nested loops through its alpha-translates."""
    fig, ax = _new_axes("lightcone")
    p0 = base_point(ctx)
    psi = np.linspace(-math.pi, math.pi, 801)
    d = sphere_dist(_plane_points(ctx, psi), p0.x)
    for k in range(-shells, shells + 1):
        for sgn, style in ((1, "-"), (-1, "--")):
            th = p0.theta + sgn * d + 2 * math.pi * k
            ax.plot(*spiral_xy(psi, th), style, color="C1")
    for j in range(-2 * shells, 2 * shells + 1):
        q = alpha(p0, j)
        ax.plot(*spiral_xy(np.array([math.atan2(q.x[1], q.x[0])]), np.array([q.theta])), "o", color="k", ms=3)
    return fig


def draw_domain(ctx: FormContext, gamma: LiftedElement):
    """Bottom boundary dJ+(q0) and top boundary dI-(alpha gamma q0) of the fundamental domain."""
    fig, ax = _new_axes("fundamental domain")
    q0 = chart_origin(ctx)
    top = alpha(act(gamma, q0), 1)
    psi = np.linspace(-math.pi, math.pi, 801)
    x = _plane_points(ctx, psi)
    lo = q0.theta + sphere_dist(x, q0.x)
    hi = top.theta - sphere_dist(x, top.x)
    inside = hi > lo
    ax.plot(*spiral_xy(psi, lo), color="C0", label="J+(q0)")
    ax.plot(*spiral_xy(psi, hi), color="C3", label="I-(alpha gamma q0)")
    lx, ly = spiral_xy(psi, lo)
    hx, hy = spiral_xy(psi, hi)
    for a, b in _runs(inside):
        ax.fill(np.concatenate([lx[a:b], hx[a:b][::-1]]), np.concatenate([ly[a:b], hy[a:b][::-1]]),
                color="C2", alpha=0.3, lw=0)
    p0 = base_point(ctx)
    for j in (-1, 1):
        q = alpha(p0, j)
        ax.plot(*spiral_xy(np.array([math.atan2(q.x[1], q.x[0])]), np.array([q.theta])), "o", color="k", ms=3)
    ax.legend(loc="upper right", frameon=False)
    return fig


def draw_orbit(indices: np.ndarray, d_plus: np.ndarray, d_minus: np.ndarray):
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot(1, 1, 1)
    ax.semilogy(indices, d_plus, label="to alpha p0")
    ax.semilogy(indices, d_minus, label="to alpha^-1 p0")
    ax.set_xlabel("i")
    ax.set_ylabel("distance")
    ax.legend(frameon=False)
    return fig


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    edges = np.flatnonzero(np.diff(np.concatenate([[0], mask.astype(int), [0]])))
    return list(zip(edges[::2], edges[1::2]))


def save_svg(fig, path: str | Path) -> Path:
    """Write an SVG whose bytes depend only on the figure content."""
    path = Path(path)
    with matplotlib.rc_context(STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def render(kind: str, ctx: FormContext, out: str | Path, gamma: LiftedElement | None = None) -> Path:
    with matplotlib.rc_context(STYLE):
        if kind == "photon":
            fig = draw_photon(ctx)
        elif kind == "lightcone":
            fig = draw_lightcone(ctx)
        elif kind == "domain":
            if gamma is None:
                raise ValueError("domain figure needs a generator")
            fig = draw_domain(ctx, gamma)
        else:
            raise ValueError(f"unknown figure kind {kind!r}")
        return save_svg(fig, out)
