"""The maximal unipotent subgroup of O(n,2) and its lift to the universal cover.

An element acts on the Minkowski chart affinely, v -> L v + u, where L is the
null rotation

    L_w(x) = x - x_n w + (<x, w> - x_n |w|^2 / 2) e_1,    w in span(e_2..e_{n-1}).

Its matrix in O(n,2) is upper triangular with ones on the diagonal, so log and
exp are finite series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .cover import (
    CoverPoint,
    LiftedPhoton,
    _diag_matrix,
    alpha,
    patch_offsets,
    project_vectors,
    sphere_dist,
)
from .errors import OnPhoton, StepFailure
from .quadric import EinPoint, FormContext, chart_inverse, minkowski_bilinear, minkowski_quad

STEP_LIMIT = math.pi / 4
MAX_GRID = 1 << 16


def null_rotation(ctx: FormContext, w: np.ndarray) -> np.ndarray:
    """n x n matrix of L_w on Minkowski coordinates."""
    n = ctx.n
    w = np.asarray(w, dtype=float)
    if w.shape != (n - 2,):
        raise ValueError(f"w must have length {n - 2}")
    L = np.eye(n)
    L[0, 1 : n - 1] = w
    L[0, n - 1] = -0.5 * float(w @ w)
    L[1 : n - 1, n - 1] = -w
    return L


def embed_v(ctx: FormContext, y: np.ndarray) -> np.ndarray:
    """Place a vector of span(e_2..e_{n-1}) into R^n."""
    out = np.zeros(ctx.n)
    out[1 : ctx.n - 1] = y
    return out


def conformal_matrix(ctx: FormContext, L: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Matrix M in O(n,2) with M iota(x) = iota(L x + u) for L in O(n-1,1)."""
    n = ctx.n
    u = np.asarray(u, dtype=float)
    T = np.eye(n + 2)
    T[0, 1 : n + 1] = -(ctx.minkowski_gram @ u)
    T[0, n + 1] = -0.5 * float(minkowski_quad(ctx, u))
    T[1 : n + 1, n + 1] = u
    ML = np.eye(n + 2)
    ML[1 : n + 1, 1 : n + 1] = L
    return T @ ML


def nilpotent_log(M: np.ndarray) -> np.ndarray:
    N = M - np.eye(M.shape[0])
    out = np.zeros_like(N)
    power = np.eye(M.shape[0])
    for k in range(1, M.shape[0]):
        power = power @ N
        out += ((-1) ** (k + 1) / k) * power
    return out


def nilpotent_exp(X: np.ndarray) -> np.ndarray:
    out = np.eye(X.shape[0])
    term = np.eye(X.shape[0])
    for k in range(1, X.shape[0]):
        term = term @ X / k
        out = out + term
    return out


@dataclass(frozen=True, eq=False)
class UnipotentElement:
    """Element of the unipotent group, stored as (w, u) with the matrix cached."""

    ctx: FormContext = field(repr=False)
    w: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        n = self.ctx.n
        w = np.array(self.w, dtype=float).reshape(-1)
        u = np.array(self.u, dtype=float).reshape(-1)
        if w.shape != (n - 2,) or u.shape != (n,):
            raise ValueError(f"expected w of length {n - 2} and u of length {n}")
        w.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "u", u)

    @cached_property
    def linear(self) -> np.ndarray:
        return null_rotation(self.ctx, self.w)

    @cached_property
    def matrix(self) -> np.ndarray:
        M = conformal_matrix(self.ctx, self.linear, self.u)
        M.setflags(write=False)
        return M

    @cached_property
    def log(self) -> np.ndarray:
        return nilpotent_log(self.matrix)

    @property
    def ell(self) -> np.ndarray:
        """Linear-part invariant: L v = v - <v, e_1> ell mod R e_1."""
        return embed_v(self.ctx, self.w)

    @property
    def dee(self) -> float:
        """<e_1, u>, which equals the x_n coordinate of u."""
        return float(self.u[-1])

    def apply_affine(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.linear.T + self.u

    def apply(self, p: EinPoint) -> EinPoint:
        return EinPoint(self.matrix @ p.rep)

    def __matmul__(self, other: "UnipotentElement") -> "UnipotentElement":
        return compose(self, other)

    def __repr__(self) -> str:
        return f"UnipotentElement(w={self.w.tolist()}, u={self.u.tolist()})"


def from_affine(ctx: FormContext, w: np.ndarray, u: np.ndarray) -> UnipotentElement:
    return UnipotentElement(ctx, w, u)


def from_matrix(ctx: FormContext, M: np.ndarray) -> UnipotentElement:
    """Recover (w, u) from a matrix of the group."""
    n = ctx.n
    M = np.asarray(M, dtype=float)
    u = M[1 : n + 1, n + 1].copy()
    w = -M[2:n, n].copy()
    return UnipotentElement(ctx, w, u)


def identity(ctx: FormContext) -> UnipotentElement:
    return UnipotentElement(ctx, np.zeros(ctx.n - 2), np.zeros(ctx.n))


def compose(g: UnipotentElement, h: UnipotentElement) -> UnipotentElement:
    """g after h."""
    return UnipotentElement(g.ctx, g.w + h.w, g.linear @ h.u + g.u)


def inverse(g: UnipotentElement) -> UnipotentElement:
    # L_w^{-1} = L_{-w}
    return UnipotentElement(g.ctx, -g.w, -(null_rotation(g.ctx, -g.w) @ g.u))


def power(g: UnipotentElement, k: int) -> UnipotentElement:
    result = identity(g.ctx)
    base = g if k >= 0 else inverse(g)
    k = abs(int(k))
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def commutator_translation(g: UnipotentElement, h: UnipotentElement) -> np.ndarray:
    """Translation part of g h g^-1 h^-1, namely (L_g - 1) u_h - (L_h - 1) u_g."""
    return (g.linear @ h.u - h.u) - (h.linear @ g.u - g.u)


def tau(ctx: FormContext, s: float) -> UnipotentElement:
    """Null translation flow tau^s: translation of the chart by -s e_1.

    In homogeneous coordinates x_0 -> x_0 + s x_n and x_1 -> x_1 - s x_{n+1}.
    """
    u = np.zeros(ctx.n)
    u[0] = -float(s)
    return UnipotentElement(ctx, np.zeros(ctx.n - 2), u)


def tau_point(ctx: FormContext, s: float, p: EinPoint) -> EinPoint:
    return tau(ctx, s).apply(p)


# --- lifting to the cover -------------------------------------------------


def _path_coefficients(X: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Coefficients c_k with exp(sX) v = sum_k s^k c_k; X has shape (m, d, d) or (d, d)."""
    d = V.shape[-1]
    coeffs = [V]
    term = V
    for k in range(1, d):
        if X.ndim == 2:
            term = term @ X.T / k
        else:
            term = np.einsum("mij,mj->mi", X, term) / k
        coeffs.append(term)
    return np.stack(coeffs)  # (d, m, d)


def _lift_paths(ctx: FormContext, coeffs: np.ndarray, theta0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Continue the T-angle of the polynomial vector paths sum_k s^k c_k over s in [0, 1].

    The grid is halved wherever the angular step reaches STEP_LIMIT, and each
    accepted step is cross-checked at its midpoint.
    """
    P = _diag_matrix(ctx.n)
    ab = coeffs @ P[:, :2]  # (K, m, 2) polynomial coefficients of the T-part
    deg = ab.shape[0]

    def angles(s: np.ndarray) -> np.ndarray:
        powers = s[None, :] ** np.arange(deg)[:, None]  # (K, G)
        val = np.einsum("kmc,kg->mgc", ab, powers)
        return np.arctan2(val[..., 1], val[..., 0])  # (m, G)

    def wrap(a: np.ndarray) -> np.ndarray:
        return (a + math.pi) % (2 * math.pi) - math.pi

    grid = np.linspace(0.0, 1.0, 2 * deg + 1)
    ang = angles(grid)
    while True:
        mids = 0.5 * (grid[:-1] + grid[1:])
        amid = angles(mids)
        left = wrap(amid - ang[:, :-1])
        right = wrap(ang[:, 1:] - amid)
        whole = wrap(ang[:, 1:] - ang[:, :-1])
        bad = (np.abs(whole) >= STEP_LIMIT) | (np.abs(left + right - whole) > 1e-9)
        split = np.any(bad, axis=0)
        if not split.any():
            break
        if grid.size + split.sum() > MAX_GRID:
            raise StepFailure("path continuation needs more than %d steps" % MAX_GRID)
        grid = np.concatenate([grid, mids[split]])
        order = np.argsort(grid, kind="stable")
        grid = grid[order]
        ang = np.concatenate([ang, amid[:, split]], axis=1)[:, order]
    total = wrap(np.diff(ang, axis=1)).sum(axis=1)
    end = coeffs.sum(axis=0) @ P  # value at s = 1 in the diagonal basis
    r = np.hypot(end[:, 0], end[:, 1])
    return end[:, 2:] / r[:, None], theta0 + total


def lift_act_arrays(
    ctx: FormContext, X: np.ndarray, xs: np.ndarray, thetas: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Canonical lift of exp(X) (or of exp(X_j) row by row) acting on cover points."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    V = project_vectors(ctx, xs, thetas)
    coeffs = _path_coefficients(np.asarray(X, dtype=float), V)
    return _lift_paths(ctx, coeffs, thetas)


def canonical_lift_act(g: UnipotentElement, p: CoverPoint) -> CoverPoint:
    """Action of the identity-component lift of g on the cover.

    The point follows s -> exp(s log g) p for s in [0, 1]. The path is followed
    on honest vectors, so its T-angle is continuous and gives theta directly.
    """
    xs, ths = lift_act_arrays(g.ctx, g.log, p.x[None, :], np.array([p.theta]))
    return CoverPoint(xs[0], ths[0])


@dataclass(frozen=True, eq=False)
class LiftedElement:
    """alpha^i composed with the canonical lift of a unipotent element."""

    alpha_power: int
    body: UnipotentElement

    @property
    def ctx(self) -> FormContext:
        return self.body.ctx

    def __matmul__(self, other: "LiftedElement") -> "LiftedElement":
        return LiftedElement(self.alpha_power + other.alpha_power, compose(self.body, other.body))

    def inverse(self) -> "LiftedElement":
        return LiftedElement(-self.alpha_power, inverse(self.body))

    def power(self, k: int) -> "LiftedElement":
        return LiftedElement(self.alpha_power * int(k), power(self.body, k))


def act(g: LiftedElement, p: CoverPoint) -> CoverPoint:
    return alpha(canonical_lift_act(g.body, p), g.alpha_power)


def act_arrays(g: LiftedElement, xs: np.ndarray, thetas: np.ndarray, times: float = 1.0):
    """Action of g^times (times may be any real for alpha_power 0) on arrays of points."""
    ox, oth = lift_act_arrays(g.ctx, times * g.body.log, xs, thetas)
    k = g.alpha_power * times
    if k != int(k):
        raise ValueError("fractional powers need alpha_power 0")
    k = int(k)
    return (-ox if k % 2 else ox), oth + k * math.pi


def orbit_arrays(g: LiftedElement, p: CoverPoint, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Points g^i p for each integer i in `indices`, computed in one batch."""
    indices = np.asarray(indices, dtype=int)
    X = indices[:, None, None] * g.body.log[None, :, :]
    m = indices.size
    ox, oth = lift_act_arrays(g.ctx, X, np.repeat(p.x[None, :], m, axis=0), np.full(m, p.theta))
    k = g.alpha_power * indices
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return ox * sign[:, None], oth + k * math.pi


def tau_limit(ctx: FormContext, p: CoverPoint, delta: LiftedPhoton, forward: bool = True) -> CoverPoint:
    """Limit of tau^t p as t -> +inf (forward) or -inf.

    Only the standard photon P(span{e_0, e_1}) is supported, since tau is the
    flow attached to it. Let q_j be the point of delta over theta = j pi.
    Points on the lightcone between q_{i-1} and q_i flow forward to q_i. Points
    of Min-(q_i) flow forward to the point of delta over (i pi, (i+1) pi) that
    projects to rho_bar(p). Backward limits are the forward limits shifted by
    alpha^-1.
    """
    xs, ths, ok = tau_limit_arrays(ctx, delta, p.x[None, :], np.array([p.theta]), forward)
    if not ok[0]:
        raise OnPhoton("point lies on the photon")
    return CoverPoint(xs[0], ths[0])


def tau_limit_arrays(
    ctx: FormContext, delta: LiftedPhoton, xs: np.ndarray, ths: np.ndarray, forward: bool = True
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    base = delta.at(0.0)
    xs = np.atleast_2d(xs)
    ths = np.atleast_1d(ths)
    d = sphere_dist(xs, base.x)
    on_photon = sphere_dist(xs, delta.x_at(ths)) <= ctx.tol
    k, code, _ = patch_offsets(d, ths - base.theta, ctx.tol)
    # index i with p in Min-(q_i) or on L(q_{i-1}, q_i)
    i_even = 2 * k + 1  # Min+(q_{2k}) = Min-(q_{2k+1})
    i_odd = 2 * k  # Min+(q_{2k-1}) = Min-(q_{2k})
    i = np.where(code == 0, i_even, i_odd)
    # rho_bar(p) = [x_n e_0 - x_{n+1} e_1]; its angle on the photon is atan2(-x_{n+1}, x_n)
    V = project_vectors(ctx, xs, ths)
    phi = np.arctan2(-V[:, ctx.n + 1], V[:, ctx.n])
    phi = np.mod(phi, math.pi)
    theta_lim = np.where(code == 2, 0.0, i * math.pi + phi)
    # shells: theta - theta_0 = j pi + d_j with d_j in (0, pi) puts p on L(q_j, q_{j+1})
    shell_j = np.floor((ths - base.theta) / math.pi)
    theta_lim = np.where(code == 2, (shell_j + 1) * math.pi, theta_lim) + base.theta
    if not forward:
        theta_lim = theta_lim - math.pi
    ok = ~on_photon
    return delta.x_at(theta_lim), theta_lim, ok
