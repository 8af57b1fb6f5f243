"""Causal relations between points of the universal cover.

With d = d(x_p, x_q) on the sphere and delta = theta_q - theta_p:

    q in J+(p)  iff  delta >= d
    q in I+(p)  iff  delta >  d

Every predicate uses the margin delta - d against a band of width tol, so
equality cases are decided consistently across functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .cover import CoverPoint, LiftedPhoton, alpha, sphere_dist
from .errors import NotTangent
from .quadric import EinPoint, FormContext, bilinear


class CausalKind(str, Enum):
    CHRONOLOGICAL = "chronological"
    NULL = "causal_strict_null"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


class Relation(NamedTuple):
    """Kind of relation plus direction: +1 if q is in the future of p, -1 if in the past, 0 otherwise."""

    kind: CausalKind
    sign: int


def margin(p: CoverPoint, q: CoverPoint) -> float:
    """theta_q - theta_p - d(x_p, x_q); nonnegative iff q is in J+(p)."""
    return float(q.theta - p.theta - sphere_dist(p.x, q.x))


def margins(px: np.ndarray, pth: np.ndarray, qx: np.ndarray, qth: np.ndarray) -> np.ndarray:
    """Array version of margin."""
    return np.asarray(qth) - np.asarray(pth) - sphere_dist(px, qx)


def relate(ctx: FormContext, p: CoverPoint, q: CoverPoint) -> Relation:
    tol = ctx.tol
    d = float(sphere_dist(p.x, q.x))
    delta = q.theta - p.theta
    if d <= tol and abs(delta) <= tol:
        return Relation(CausalKind.EQUAL, 0)
    sign = 1 if delta > 0 else -1
    gap = abs(delta) - d
    if gap > tol:
        return Relation(CausalKind.CHRONOLOGICAL, sign)
    if gap >= -tol:
        return Relation(CausalKind.NULL, sign)
    return Relation(CausalKind.INCOMPARABLE, 0)


def in_future(ctx: FormContext, p: CoverPoint, q: CoverPoint, strict: bool = False) -> bool:
    """q in I+(p) if strict, else q in J+(p)."""
    m = margin(p, q)
    return m > ctx.tol if strict else m >= -ctx.tol


def in_past(ctx: FormContext, p: CoverPoint, q: CoverPoint, strict: bool = False) -> bool:
    """q in I-(p) if strict, else q in J-(p)."""
    return in_future(ctx, q, p, strict)


def in_min(ctx: FormContext, p: CoverPoint, base: CoverPoint, side: str) -> bool:
    """Membership of p in Min+(base) = I+(base) & I-(alpha^2 base)
    or Min-(base) = I+(alpha^-1 base) & I-(alpha base)."""
    if side == "plus":
        lo, hi = base, alpha(base, 2)
    elif side == "minus":
        lo, hi = alpha(base, -1), alpha(base, 1)
    else:
        raise ValueError("side must be 'plus' or 'minus'")
    return in_future(ctx, lo, p, strict=True) and in_past(ctx, hi, p, strict=True)


def on_lightcone_lift(ctx: FormContext, p: CoverPoint, base: CoverPoint) -> bool:
    """p lies on the preimage of the lightcone of the projection of base.

    That preimage is {theta - theta_0 = +-d mod 2 pi}, a union of shells.
    """
    d = float(sphere_dist(p.x, base.x))
    delta = p.theta - base.theta
    for s in (d, -d):
        r = math.remainder(delta - s, 2 * math.pi)
        if abs(r) <= ctx.tol:
            return True
    return False


@dataclass(frozen=True)
class Segment:
    """Piece of the lightcone of a photon point between alpha^a p and alpha^b p.

    With `photon_only` the segment is restricted to the photon itself.
    """

    photon: LiftedPhoton
    base_theta: float
    a: int
    b: int
    open_left: bool = True
    open_right: bool = True
    photon_only: bool = False

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError("segment endpoints must satisfy a < b")

    def endpoint(self, j: int) -> CoverPoint:
        return alpha(self.photon.at(self.base_theta), j)


def on_segment(ctx: FormContext, p: CoverPoint, seg: Segment) -> bool:
    """p lies on L[alpha^a q, alpha^b q] (or its open variants), q the segment's base point."""
    lo, hi = seg.endpoint(seg.a), seg.endpoint(seg.b)
    if seg.photon_only:
        if not seg.photon.contains(p, ctx.tol):
            return False
    elif not on_lightcone_lift(ctx, p, lo):
        return False
    if not (in_future(ctx, lo, p) and in_past(ctx, hi, p)):
        return False
    if seg.open_left and lo.distance(p) <= ctx.tol:
        return False
    if seg.open_right and hi.distance(p) <= ctx.tol:
        return False
    return True


def time_vector(ctx: FormContext, x: np.ndarray) -> np.ndarray:
    """Time-orienting field at a null vector x.

    (x_0 - x_{n+1})(e_1 - e_n) + (x_n - x_1)(e_0 - e_{n+1}); it is twice the
    theta-derivative of the cover parametrisation.
    """
    n = ctx.n
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    a = x[..., 0] - x[..., n + 1]
    b = x[..., n] - x[..., 1]
    out[..., 1] += a
    out[..., n] -= a
    out[..., 0] += b
    out[..., n + 1] -= b
    return out


def time_orientation_pairing(ctx: FormContext, p: EinPoint, tangent: np.ndarray) -> float:
    """B(tangent, time vector at p). Negative means future-pointing.

    `tangent` is an ambient vector representing a tangent vector at p; it must
    satisfy B(tangent, p) = 0. The value depends on the representative of p
    through its scale only, and p is stored with unit norm.
    """
    tangent = np.asarray(tangent, dtype=float)
    rep = p.rep
    if abs(float(bilinear(ctx, tangent, rep))) > ctx.tol * max(1.0, float(np.linalg.norm(tangent))):
        raise NotTangent("vector is not orthogonal to the point")
    return float(bilinear(ctx, tangent, time_vector(ctx, rep)))


def tau_field(ctx: FormContext, x: np.ndarray) -> np.ndarray:
    """Generator x_n e_0 - x_{n+1} e_1 of the null translation flow."""
    n = ctx.n
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[..., 0] = x[..., n]
    out[..., 1] = -x[..., n + 1]
    return out
