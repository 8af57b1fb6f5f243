"""Holonomy groups inside the lifted unipotent group.

Four configurations are recognised:

1. a single generator alpha^i g with i != 0;
2. a single generator g with a translation part that is nontrivial along e_n
   (and timelike when g is a pure translation);
3. a Heisenberg lattice defined by an endomorphism theta without real
   eigenvalues, extended by a fibre generator alpha^i g_D with g_D in ker D;
4. a group of pure unipotent lifts (alpha power 0 throughout).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .causal import CausalKind, margin, relate
from .cover import CoverPoint, alpha, base_point, chart_origin, sphere_dist
from .errors import Inconsistent, NonIntegral, NotInKerD, NotSpanning
from .quadric import FormContext, minkowski_quad
from .unipotent import (
    LiftedElement,
    UnipotentElement,
    act,
    commutator_translation,
    embed_v,
    from_affine,
    tau,
)


def theta_endomorphism(elements: Sequence[UnipotentElement], tol: float | None = None) -> np.ndarray:
    """Linear map theta with ubar_h = theta(ell_h) for every element h.

    ubar_h is the span(e_2..e_{n-1}) part of the translation u_h, ell_h the
    linear-part vector w. Elements must lie in ker D (u_n = 0).
    """
    if not elements:
        raise NotSpanning("no elements supplied")
    ctx = elements[0].ctx
    tol = ctx.tol if tol is None else tol
    for h in elements:
        if abs(h.dee) > tol:
            raise NotInKerD(f"D(h) = {h.dee:.3e}")
    Lm = np.stack([h.w for h in elements], axis=1)  # (n-2, m)
    Um = np.stack([h.u[1:-1] for h in elements], axis=1)
    if np.linalg.matrix_rank(Lm, tol=tol) < ctx.n - 2:
        raise NotSpanning("linear parts do not span")
    theta = Um @ np.linalg.pinv(Lm)
    resid = np.abs(theta @ Lm - Um).max()
    if resid > tol * max(1.0, np.abs(Um).max()) * 10:
        raise Inconsistent(f"residual {resid:.3e}")
    return theta


@dataclass(frozen=True, eq=False)
class HeisenbergSpec:
    """n = 2k + 2, theta on R^{2k}, and a lattice basis of R^{2k} (rows)."""

    k: int
    theta: np.ndarray
    basis: np.ndarray | None = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float)
        if theta.shape != (2 * self.k, 2 * self.k):
            raise ValueError(f"theta must be {2 * self.k}x{2 * self.k}")
        basis = np.eye(2 * self.k) if self.basis is None else np.array(self.basis, dtype=float)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "basis", basis)

    @property
    def n(self) -> int:
        return 2 * self.k + 2

    def real_eigenvalues(self, tol: float = 1e-9) -> list[float]:
        ev = np.linalg.eigvals(self.theta)
        return sorted(float(e.real) for e in ev if abs(e.imag) <= tol)


def heisenberg_element(ctx: FormContext, theta: np.ndarray, ell: np.ndarray, c: float = 0.0) -> UnipotentElement:
    """The element of H with linear part ell and translation theta(ell) + c e_1."""
    ell = np.asarray(ell, dtype=float)
    u = embed_v(ctx, theta @ ell)
    u[0] = c
    return from_affine(ctx, ell, u)


def heisenberg_group(spec: HeisenbergSpec, ctx: FormContext | None = None) -> list[UnipotentElement]:
    """Generators of H: one per basis vector (scaled) plus the central tau^1."""
    ctx = ctx or FormContext(spec.n)
    gens = [heisenberg_element(ctx, spec.theta, spec.scale * b) for b in spec.basis]
    gens.append(tau(ctx, 1.0))
    return gens


def central_value(g: UnipotentElement, tol: float = 1e-9) -> float | None:
    """e_1-coefficient of g if g is a pure translation along e_1, else None."""
    if np.abs(g.w).max(initial=0.0) > tol or np.abs(g.u[1:]).max() > tol:
        return None
    return float(g.u[0])


def _rational_gcd(values: Sequence[float], tol: float, max_den: int = 10_000) -> float:
    fracs = []
    for v in values:
        f = Fraction(v).limit_denominator(max_den)
        if abs(float(f) - v) > tol * max(1.0, abs(v)):
            raise NonIntegral(f"{v!r} is not rational with denominator <= {max_den}")
        fracs.append(abs(f))
    fracs = [f for f in fracs if f != 0]
    if not fracs:
        return 0.0
    g = fracs[0]
    for f in fracs[1:]:
        a, b = g, f
        while b:
            a, b = b, a % b
        g = a
    return float(g)


@dataclass(frozen=True, eq=False)
class HeisenbergLattice:
    generators: list[UnipotentElement]
    central: UnipotentElement
    period: float
    commutators: np.ndarray


def heisenberg_lattice(
    spec: HeisenbergSpec, period: float | None = None, ctx: FormContext | None = None
) -> HeisenbergLattice:
    """Lattice of H generated by scale * basis vectors and a central translation.

    Pairwise commutators are translations c_ij e_1. The central period is their
    rational gcd unless `period` is given, in which case every c_ij must be an
    integer multiple of it.
    """
    ctx = ctx or FormContext(spec.n)
    gens = [heisenberg_element(ctx, spec.theta, spec.scale * b) for b in spec.basis]
    m = len(gens)
    comm = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            t = commutator_translation(gens[i], gens[j])
            comm[i, j] = t[0]
    vals = [comm[i, j] for i in range(m) for j in range(i + 1, m)]
    if period is None:
        period = _rational_gcd(vals, 1e-9)
        if period == 0:
            period = 1.0
    else:
        for v in vals:
            q = v / period
            if abs(q - round(q)) > 1e-9:
                raise NonIntegral(f"commutator {v} is not a multiple of {period}")
    central = from_affine(ctx, np.zeros(ctx.n - 2), period * ctx.me(1))
    return HeisenbergLattice(gens, central, float(period), comm)


# --- case classification ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class HolonomyCaseSpec:
    case: int
    ctx: FormContext
    generators: list[LiftedElement]
    heisenberg: HeisenbergSpec | None = None


@dataclass
class Condition:
    name: str
    anchor: str
    passed: bool
    detail: str = ""


@dataclass
class CaseReport:
    case: int
    conditions: list[Condition] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def add(self, name: str, anchor: str, passed: bool, detail: str = "") -> None:
        self.conditions.append(Condition(name, anchor, bool(passed), detail))


def case_check(spec: HolonomyCaseSpec) -> CaseReport:
    ctx = spec.ctx
    tol = ctx.tol
    rep = CaseReport(spec.case)
    gens = spec.generators
    for g in gens:
        if g.ctx.n != ctx.n:
            rep.add("dimension", "all generators act on the same Ein^{n,1}", False, f"n={g.ctx.n}")
            return rep

    if spec.case == 1:
        rep.add("single_generator", "cyclic holonomy", len(gens) == 1, f"{len(gens)} generators")
        if gens:
            i = gens[0].alpha_power
            rep.add("alpha_power_nonzero", "generator is alpha^i g with i != 0", i != 0, f"i={i}")
    elif spec.case == 2:
        rep.add("single_generator", "cyclic holonomy", len(gens) == 1, f"{len(gens)} generators")
        if gens:
            g = gens[0]
            rep.add("alpha_power_zero", "generator lies in the identity component", g.alpha_power == 0,
                    f"i={g.alpha_power}")
            rep.add("D_nonzero", "translation part nontrivial modulo the orthogonal of e_1",
                    abs(g.body.dee) > tol, f"D={g.body.dee:.6g}")
            if np.abs(g.body.w).max(initial=0.0) <= tol:
                qv = float(minkowski_quad(ctx, g.body.u))
                rep.add("translation_timelike", "pure translations must be timelike", qv < -tol,
                        f"q(u)={qv:.6g}")
    elif spec.case == 3:
        n_ok = ctx.n % 2 == 0 and ctx.n >= 4
        rep.add("n_even", "n = 2k + 2 with k >= 1", n_ok, f"n={ctx.n}")
        lattice = [g.body for g in gens if g.alpha_power == 0]
        fibre = [g for g in gens if g.alpha_power != 0]
        in_ker = [abs(h.dee) <= tol for h in lattice]
        rep.add("lattice_in_kerD", "lattice generators have u_n = 0", bool(lattice) and all(in_ker),
                f"{sum(in_ker)}/{len(lattice)}")
        theta = None
        if n_ok and lattice and all(in_ker):
            try:
                theta = theta_endomorphism(lattice)
                rep.add("theta_defined", "lattice is the graph of an endomorphism theta", True,
                        np.array2string(theta, precision=6, separator=", ").replace("\n", ""))
            except (NotSpanning, Inconsistent) as exc:
                rep.add("theta_defined", "lattice is the graph of an endomorphism theta", False, str(exc))
        if theta is not None:
            ev = np.linalg.eigvals(theta)
            real = [float(e.real) for e in ev if abs(e.imag) <= 1e-9]
            rep.add("theta_no_real_eigenvalues", "proper action needs theta without real eigenvalues",
                    not real, f"real eigenvalues: {real}")
        rep.add("single_fibre_generator", "exactly one generator with nonzero alpha power",
                len(fibre) == 1, f"{len(fibre)} found")
        if len(fibre) == 1:
            gD = fibre[0].body
            rep.add("fibre_in_kerD", "fibre generator alpha^i g_D has g_D in ker D", abs(gD.dee) <= tol,
                    f"D={gD.dee:.6g}")
            if lattice:
                periods = [c for c in (central_value(h, tol) for h in lattice) if c]
                period = min(abs(c) for c in periods) if periods else None
                ok = period is not None
                detail = "no central generator in lattice"
                if ok:
                    vals = []
                    for h in lattice:
                        t = commutator_translation(gD, h)
                        along = abs(t[1:]).max() <= 1e-9 * max(1.0, abs(t).max())
                        mult = t[0] / period
                        vals.append(f"{t[0]:.6g}")
                        ok = ok and along and abs(mult - round(mult)) <= 1e-9
                    detail = f"period={period:.6g}, commutators={vals}"
                rep.add("fibre_normalises_lattice", "commutators with the fibre generator are central lattice elements",
                        ok, detail)
    elif spec.case == 4:
        ok = all(g.alpha_power == 0 for g in gens)
        rep.add("alpha_power_zero", "all generators lie in the identity component", ok,
                f"powers={[g.alpha_power for g in gens]}")
    else:
        rep.add("case", "case must be 1, 2, 3 or 4", False, f"case={spec.case}")
    return rep


# --- case 2 fundamental domain ----------------------------------------------


Placement = Literal["interior", "boundary", "outside"]


def fundamental_domain_contains(
    ctx: FormContext, q0: CoverPoint, gamma: LiftedElement, x: CoverPoint, band: float | None = None
) -> Placement:
    """Locate x relative to D = J+(q0) & I-(alpha gamma q0)."""
    band = ctx.tol if band is None else band
    top = alpha(act(gamma, q0), 1)
    lo = margin(q0, x)
    hi = margin(x, top)
    return classify_domain(np.array([lo]), np.array([hi]), band)[0]


def classify_domain(lo: np.ndarray, hi: np.ndarray, band: float) -> np.ndarray:
    """Placement codes from the margins to the bottom (J+) and top (I-) boundaries."""
    out = np.full(lo.shape, "outside", dtype=object)
    inside = (lo > band) & (hi > band)
    edge = (lo >= -band) & (hi >= -band) & ~inside
    out[inside] = "interior"
    out[edge] = "boundary"
    return out


def default_q0(ctx: FormContext) -> CoverPoint:
    """Lift of the chart origin inside Min-(lift of [e_0])."""
    return chart_origin(ctx)


def chronological_power(gamma: LiftedElement, q0: CoverPoint, max_power: int = 64) -> int:
    """Smallest k (signed) with q0 << gamma^k q0, searching |k| <= max_power; 0 if none."""
    ctx = gamma.ctx
    for k in range(1, max_power + 1):
        for s in (k, -k):
            rel = relate(ctx, q0, act(gamma.power(s), q0))
            if rel.kind is CausalKind.CHRONOLOGICAL and rel.sign > 0:
                return s
    return 0


def orbit(gamma: LiftedElement, q0: CoverPoint, i: int) -> CoverPoint:
    return act(gamma.power(i), q0)


def orbit_distances(ctx: FormContext, points: tuple[np.ndarray, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Cover distances from orbit points to alpha p0 and alpha^-1 p0."""
    xs, ths = points
    p0 = base_point(ctx)
    out = []
    for k in (1, -1):
        t = alpha(p0, k)
        out.append(np.hypot(sphere_dist(xs, t.x), ths - t.theta))
    return out[0], out[1]


__all__ = [
    "CaseReport",
    "Condition",
    "HeisenbergLattice",
    "HeisenbergSpec",
    "HolonomyCaseSpec",
    "case_check",
    "chronological_power",
    "classify_domain",
    "default_q0",
    "fundamental_domain_contains",
    "heisenberg_element",
    "heisenberg_group",
    "heisenberg_lattice",
    "orbit",
    "orbit_distances",
    "theta_endomorphism",
]
