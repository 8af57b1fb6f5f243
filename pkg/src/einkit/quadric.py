"""The quadric q_{n,2}, its null cone, and the affine Minkowski chart.

Ambient vectors live in R^{n+2} with indices 0..n+1 and

    q(x) = 2 x_0 x_{n+1} + 2 x_1 x_n + sum_{i=2}^{n-1} x_i^2.

Minkowski vectors live in R^n; array slot k holds the coordinate x_{k+1}, so
slot 0 is x_1 and slot n-1 is x_n, with q(x) = 2 x_1 x_n + sum x_i^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import NotInPatch, NotNull, OnPhoton


@dataclass(frozen=True)
class FormContext:
    """Dimension and numerical tolerance shared by every operation."""

    n: int
    tol: float = 1e-9

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"n must be an integer >= 3, got {self.n}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    @property
    def dim(self) -> int:
        return self.n + 2

    @cached_property
    def gram(self) -> np.ndarray:
        """Gram matrix of q_{n,2}; it is symmetric and squares to the identity."""
        n = self.n
        Q = np.zeros((n + 2, n + 2))
        Q[0, n + 1] = Q[n + 1, 0] = 1.0
        Q[1, n] = Q[n, 1] = 1.0
        for i in range(2, n):
            Q[i, i] = 1.0
        return Q

    @cached_property
    def minkowski_gram(self) -> np.ndarray:
        n = self.n
        J = np.zeros((n, n))
        J[0, n - 1] = J[n - 1, 0] = 1.0
        for i in range(1, n - 1):
            J[i, i] = 1.0
        return J

    def e(self, i: int) -> np.ndarray:
        """Ambient basis vector e_i."""
        v = np.zeros(self.n + 2)
        v[i] = 1.0
        return v

    def me(self, i: int) -> np.ndarray:
        """Minkowski basis vector e_i for i in 1..n."""
        v = np.zeros(self.n)
        v[i - 1] = 1.0
        return v


class CausalType(str, Enum):
    TIMELIKE = "timelike"
    NULL = "null"
    SPACELIKE = "spacelike"


def bilinear(ctx: FormContext, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Polar form of q_{n,2}. Broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.einsum("...i,ij,...j->...", u, ctx.gram, v)


def quad(ctx: FormContext, u: np.ndarray) -> np.ndarray:
    return bilinear(ctx, u, u)


def minkowski_bilinear(ctx: FormContext, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Polar form of q_{n-1,1} on R^n."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.einsum("...i,ij,...j->...", x, ctx.minkowski_gram, y)


def minkowski_quad(ctx: FormContext, x: np.ndarray) -> np.ndarray:
    return minkowski_bilinear(ctx, x, x)


def causal_type(ctx: FormContext, x: np.ndarray) -> CausalType:
    """Sign of q_{n-1,1}(x) with a band of width tol*|x|^2 counted as null."""
    x = np.asarray(x, dtype=float)
    val = float(minkowski_quad(ctx, x))
    scale = max(float(x @ x), 1.0)
    if abs(val) <= ctx.tol * scale:
        return CausalType.NULL
    return CausalType.TIMELIKE if val < 0 else CausalType.SPACELIKE


def canonical_rep(vec: np.ndarray) -> np.ndarray:
    """Unit representative whose largest-magnitude entry is positive.

    Ties go to the lowest index, which is what np.argmax does.
    """
    vec = np.asarray(vec, dtype=float)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("zero vector has no projective class")
    out = vec / norm
    if out[np.argmax(np.abs(out))] < 0:
        out = -out
    return out


@dataclass(frozen=True, eq=False)
class EinPoint:
    """A point of Ein^{n,1}: the projective class of a nonzero null vector."""

    rep: np.ndarray

    def __post_init__(self) -> None:
        rep = canonical_rep(self.rep)
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    @classmethod
    def from_vector(cls, ctx: FormContext, vec: np.ndarray) -> "EinPoint":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (ctx.dim,):
            raise ValueError(f"expected a vector of length {ctx.dim}, got {vec.shape}")
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("zero vector")
        if abs(float(quad(ctx, vec))) > ctx.tol * norm * norm * 10:
            raise NotNull(f"q(v)/|v|^2 = {float(quad(ctx, vec)) / norm**2:.3e}")
        return cls(vec)

    def distance(self, other: "EinPoint") -> float:
        """Projective chordal distance; insensitive to the sign of either representative."""
        a, b = self.rep, other.rep
        return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))

    def isclose(self, other: "EinPoint", tol: float = 1e-9) -> bool:
        return self.distance(other) <= tol

    def __repr__(self) -> str:
        return f"EinPoint({np.array2string(self.rep, precision=6)})"


def minkowski_chart(ctx: FormContext, x: np.ndarray) -> EinPoint:
    """Affine chart iota(x) = [-q(x)/2 : x_1 : ... : x_n : 1]."""
    return EinPoint(chart_vector(ctx, x))


def chart_vector(ctx: FormContext, x: np.ndarray) -> np.ndarray:
    """Representative of iota(x) with last coordinate 1. Broadcasts over rows."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != ctx.n:
        raise ValueError(f"expected Minkowski vectors of length {ctx.n}")
    head = -0.5 * minkowski_quad(ctx, x)
    ones = np.ones(x.shape[:-1])
    return np.concatenate([head[..., None], x, ones[..., None]], axis=-1)


def chart_inverse(ctx: FormContext, p: EinPoint | np.ndarray) -> np.ndarray:
    """Inverse of the Minkowski chart. Raises NotInPatch on the lightcone of [e_0]."""
    rep = p.rep if isinstance(p, EinPoint) else np.asarray(p, dtype=float)
    last = rep[..., -1]
    if np.any(np.abs(last) <= ctx.tol * np.linalg.norm(rep, axis=-1)):
        raise NotInPatch("point lies on the lightcone of [e_0]")
    return rep[..., 1:-1] / last[..., None]


def on_lightcone(ctx: FormContext, p: EinPoint, q: EinPoint) -> bool:
    """True iff q lies on the lightcone of p, i.e. B(p, q) = 0."""
    return abs(float(bilinear(ctx, p.rep, q.rep))) <= ctx.tol


@dataclass(frozen=True, eq=False)
class Photon:
    """A projectivised totally isotropic 2-plane, stored with a Euclidean-orthonormal basis."""

    u: np.ndarray
    v: np.ndarray
    ctx: FormContext = field(repr=False)

    @classmethod
    def span(cls, ctx: FormContext, a: np.ndarray, b: np.ndarray) -> "Photon":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        basis, r = np.linalg.qr(np.stack([a, b], axis=1))
        if abs(r[1, 1]) <= ctx.tol * max(abs(r[0, 0]), 1.0):
            raise ValueError("vectors are linearly dependent")
        u, v = basis[:, 0], basis[:, 1]
        iso = max(abs(float(quad(ctx, u))), abs(float(quad(ctx, v))), abs(float(bilinear(ctx, u, v))))
        if iso > 10 * ctx.tol:
            raise NotNull("plane is not totally isotropic")
        return cls(u, v, ctx)

    def contains(self, p: EinPoint) -> bool:
        r = p.rep
        resid = r - self.u * (self.u @ r) - self.v * (self.v @ r)
        return float(np.linalg.norm(resid)) <= self.ctx.tol


def standard_photon(ctx: FormContext) -> Photon:
    """The photon P(span{e_0, e_1})."""
    return Photon.span(ctx, ctx.e(0), ctx.e(1))


def rho_bar(ctx: FormContext, photon: Photon, p: EinPoint) -> EinPoint:
    """Projection [<x,v>u - <x,u>v] of Ein minus the photon onto the photon."""
    x = p.rep
    img = bilinear(ctx, x, photon.v) * photon.u - bilinear(ctx, x, photon.u) * photon.v
    if np.linalg.norm(img) <= ctx.tol:
        raise OnPhoton("point lies on the photon")
    return EinPoint(img)


def param_lightcone(ctx: FormContext, t: float, y: np.ndarray) -> EinPoint:
    """Point [t : -|y|^2/2 : y_2 ... y_{n-1} : 1 : 0] of the lightcone of [e_0]."""
    return EinPoint(lightcone_vector(ctx, t, y))


def lightcone_vector(ctx: FormContext, t: float, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (ctx.n - 2,):
        raise ValueError(f"expected y of length {ctx.n - 2}")
    out = np.zeros(ctx.dim)
    out[0] = t
    out[1] = -0.5 * float(y @ y)
    out[2 : ctx.n] = y
    out[ctx.n] = 1.0
    return out


def lightcone_inverse(ctx: FormContext, p: EinPoint) -> tuple[float, np.ndarray]:
    """Inverse of param_lightcone on points with x_{n+1} = 0 and x_n != 0."""
    r = p.rep
    if abs(r[-1]) > ctx.tol or abs(r[ctx.n]) <= ctx.tol:
        raise NotInPatch("point is not in the lightcone chart")
    r = r / r[ctx.n]
    return float(r[0]), r[2 : ctx.n].copy()
