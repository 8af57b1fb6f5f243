"""The universal cover S^{n-1} x R of Ein^{n,1}.

A cover point is a pair (x, theta) with x on the unit sphere. It projects to

    x_1 S_1 + ... + x_n S_n + cos(theta) T_1 + sin(theta) T_2

where T_1, T_2 span a negative definite plane and S_1..S_n a positive definite
complement, all orthonormal for both q_{n,2} (up to sign) and the Euclidean
product. The deck generator is alpha(x, theta) = (-x, theta + pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import Ambiguous, NotInPatch
from .quadric import EinPoint, FormContext, Photon, standard_photon

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class DiagBasis:
    """Columns of `matrix` are T_1, T_2, S_1, ..., S_n."""

    matrix: np.ndarray

    @property
    def T1(self) -> np.ndarray:
        return self.matrix[:, 0]

    @property
    def T2(self) -> np.ndarray:
        return self.matrix[:, 1]

    @property
    def S(self) -> np.ndarray:
        return self.matrix[:, 2:]


@lru_cache(maxsize=None)
def _diag_matrix(n: int) -> np.ndarray:
    P = np.zeros((n + 2, n + 2))
    h = 1.0 / math.sqrt(2.0)
    P[0, 0], P[n + 1, 0] = h, -h  # T1 = (e_0 - e_{n+1}) / sqrt 2
    P[1, 1], P[n, 1] = h, -h  # T2 = (e_1 - e_n) / sqrt 2
    P[0, 2], P[n + 1, 2] = h, h  # S1 = (e_0 + e_{n+1}) / sqrt 2
    P[1, 3], P[n, 3] = h, h  # S2 = (e_1 + e_n) / sqrt 2
    for i in range(2, n):
        P[i, i + 2] = 1.0
    P.setflags(write=False)
    return P


def diag_basis(ctx: FormContext) -> DiagBasis:
    return DiagBasis(_diag_matrix(ctx.n))


@dataclass(frozen=True, eq=False)
class CoverPoint:
    x: np.ndarray
    theta: float

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float)
        nx = np.linalg.norm(x)
        if nx == 0:
            raise ValueError("x must be nonzero")
        if abs(nx - 1.0) > 1e-6:
            raise ValueError(f"x must be a unit vector, |x| = {nx}")
        x = x / nx
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def distance(self, other: "CoverPoint") -> float:
        """Product metric: sphere angle combined with |delta theta|."""
        d = float(sphere_dist(self.x, other.x))
        return math.hypot(d, self.theta - other.theta)

    def __repr__(self) -> str:
        return f"CoverPoint(x={np.array2string(self.x, precision=6)}, theta={self.theta:.9g})"


def sphere_dist(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Great-circle distance, accurate near 0 and pi. Broadcasts over rows."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.linalg.norm(x - y, axis=-1)
    b = np.linalg.norm(x + y, axis=-1)
    return 2.0 * np.arctan2(a, b)


def project_vectors(ctx: FormContext, xs: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Null representatives for arrays of cover points, shape (..., n+2)."""
    xs = np.asarray(xs, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    coords = np.concatenate([np.cos(thetas)[..., None], np.sin(thetas)[..., None], xs], axis=-1)
    return coords @ _diag_matrix(ctx.n).T


def project(ctx: FormContext, p: CoverPoint) -> EinPoint:
    return EinPoint(project_vectors(ctx, p.x, p.theta))


def cover_coords(ctx: FormContext, vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One preimage (x, theta) per null vector, theta in (-pi, pi].

    The returned theta is the angle of the vector's T-part, so a continuous
    path of vectors (not just of lines) gives a continuous angle up to wrapping.
    """
    w = np.asarray(vecs, dtype=float) @ _diag_matrix(ctx.n)
    r = np.hypot(w[..., 0], w[..., 1])
    theta = np.arctan2(w[..., 1], w[..., 0])
    return w[..., 2:] / r[..., None], theta


def alpha(p: CoverPoint, k: int = 1) -> CoverPoint:
    """k-th power of the deck generator."""
    k = int(k)
    sign = -1.0 if k % 2 else 1.0
    return CoverPoint(sign * p.x, p.theta + k * math.pi)


def spiral_coords(p: CoverPoint) -> np.ndarray:
    """Diffeomorphism S^{n-1} x R -> R^n minus 0, (x, theta) -> e^theta x."""
    return math.exp(p.theta) * p.x


def lift_near(ctx: FormContext, e: EinPoint, ref: CoverPoint) -> CoverPoint:
    """Preimage of `e` closest to `ref`.

    Preimages come in a single alpha-orbit. The sign of x is fixed by requiring
    d(x, x_ref) <= pi/2 - tol; the branch is then the theta nearest theta_ref.
    If neither sign qualifies the theta-nearest preimage overall is used.
    Exact ties raise Ambiguous.
    """
    x0, th0 = cover_coords(ctx, e.rep)
    th0 = float(th0)
    c = float(x0 @ ref.x)
    margin = math.sin(ctx.tol)
    if c >= margin or c <= -margin:
        parity = 0 if c > 0 else 1
        base = th0 + parity * math.pi
        f = (ref.theta - base) / TWO_PI
        k = math.floor(f + 0.5)
        if abs(f - math.floor(f) - 0.5) * TWO_PI <= ctx.tol:
            raise Ambiguous("theta_ref is halfway between two preimages")
        j = parity + 2 * k
    else:
        f = (ref.theta - th0) / math.pi
        if abs(f - math.floor(f) - 0.5) * math.pi <= ctx.tol:
            raise Ambiguous("theta_ref is halfway between two preimages")
        j = math.floor(f + 0.5)
    return alpha(CoverPoint(x0, th0), j)


class Region(str, Enum):
    MIN_PLUS_EVEN = "min_plus_even"
    MIN_PLUS_ODD = "min_plus_odd"
    LIGHTCONE_SHELL = "lightcone_shell"


class PatchIndex(NamedTuple):
    """Location of a point relative to the alpha-orbit of a base point.

    min_plus_even: the point is in Min+(alpha^{2k} base).
    min_plus_odd: the point is in Min+(alpha^{2k-1} base).
    lightcone_shell: the point is on L[alpha^{2k} base, alpha^{2k+2} base].
    """

    k: int
    region: Region


def patch_offsets(d: np.ndarray, delta: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised core of patch_index. Returns (k, code, r) with code 0 even, 1 odd, 2 shell."""
    k = np.floor((delta - d + tol) / TWO_PI)
    r = delta - TWO_PI * k
    code = np.full(np.shape(d), 2, dtype=int)
    even = (r > d + tol) & (r < TWO_PI - d - tol)
    code[even] = 0
    odd = r > TWO_PI - d + tol
    code[odd] = 1
    k = np.where(odd, k + 1, k)
    return k.astype(int), code, r


def patch_index(ctx: FormContext, p: CoverPoint, base: CoverPoint) -> PatchIndex:
    d = sphere_dist(p.x, base.x)
    k, code, _ = patch_offsets(np.asarray(d), np.asarray(p.theta - base.theta), ctx.tol)
    region = (Region.MIN_PLUS_EVEN, Region.MIN_PLUS_ODD, Region.LIGHTCONE_SHELL)[int(code)]
    return PatchIndex(int(k), region)


def lift_to_patch(ctx: FormContext, e: EinPoint, base: CoverPoint, side: str = "minus") -> CoverPoint:
    """The unique preimage of `e` in Min+(base) (side='plus') or Min-(base) (side='minus')."""
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    x0, th0 = cover_coords(ctx, e.rep)
    p = CoverPoint(x0, float(th0))
    k, region = patch_index(ctx, p, base)
    if region is Region.LIGHTCONE_SHELL:
        raise NotInPatch("point lies on the lightcone of the base point")
    shift = -2 * k if region is Region.MIN_PLUS_EVEN else -(2 * k - 1)
    if side == "minus":
        shift -= 1
    return alpha(p, shift)


def lift_many_to_patch(
    ctx: FormContext, vecs: np.ndarray, base: CoverPoint, side: str = "minus"
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Array version of lift_to_patch. Returns (xs, thetas, ok) where ok flags non-shell rows."""
    xs, ths = cover_coords(ctx, vecs)
    d = sphere_dist(xs, base.x)
    k, code, _ = patch_offsets(d, ths - base.theta, ctx.tol)
    shift = np.where(code == 0, -2 * k, -(2 * k - 1))
    if side == "minus":
        shift = shift - 1
    sign = np.where(shift % 2 == 0, 1.0, -1.0)
    return xs * sign[:, None], ths + shift * math.pi, code != 2


@dataclass(frozen=True, eq=False)
class LiftedPhoton:
    """Preimage of a photon in the cover.

    The preimage is connected and is the graph of a unit-speed map theta -> x(theta).
    `at(theta)` returns its point over theta; alpha shifts theta by pi.
    """

    photon: Photon
    frame: np.ndarray  # 2 x (n+2): vectors of the plane whose T-parts are T_1 and T_2

    @classmethod
    def of(cls, photon: Photon) -> "LiftedPhoton":
        P = _diag_matrix(photon.ctx.n)
        basis = np.stack([photon.u, photon.v])
        tparts = basis @ P[:, :2]  # rows: T-coordinates of u and v
        frame = np.linalg.inv(tparts) @ basis
        frame.setflags(write=False)
        return cls(photon, frame)

    @property
    def ctx(self) -> FormContext:
        return self.photon.ctx

    def vector_at(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.cos(theta)[..., None] * self.frame[0] + np.sin(theta)[..., None] * self.frame[1]

    def x_at(self, theta: np.ndarray) -> np.ndarray:
        w = self.vector_at(theta) @ _diag_matrix(self.ctx.n)
        return w[..., 2:]

    def at(self, theta: float) -> CoverPoint:
        return CoverPoint(self.x_at(theta), theta)

    def distance(self, p: CoverPoint) -> float:
        """Sphere distance from p to the photon point over the same theta."""
        return float(sphere_dist(p.x, self.x_at(p.theta)))

    def contains(self, p: CoverPoint, tol: float | None = None) -> bool:
        tol = self.ctx.tol if tol is None else tol
        return self.distance(p) <= tol


def standard_lifted_photon(ctx: FormContext) -> LiftedPhoton:
    """Lift of P(span{e_0, e_1}); its point over theta = 0 is the lift of [e_0]."""
    return LiftedPhoton.of(standard_photon(ctx))


def base_point(ctx: FormContext) -> CoverPoint:
    """The lift (S_1, 0) of [e_0]."""
    x = np.zeros(ctx.n)
    x[0] = 1.0
    return CoverPoint(x, 0.0)


def chart_origin(ctx: FormContext) -> CoverPoint:
    """The lift of iota(0) = [e_{n+1}] lying in Min-(base_point)."""
    x = np.zeros(ctx.n)
    x[0] = -1.0
    return CoverPoint(x, 0.0)
