"""Randomised numerical checks of the causal and group-theoretic identities.

Each check draws from its own random stream, derived from (seed, check name),
so adding or reordering checks never changes another check's samples.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.csgraph import shortest_path
from scipy.spatial import cKDTree

from .causal import CausalKind, Segment, in_min, margin, margins, on_segment, relate, tau_field, time_vector
from .cover import (
    CoverPoint,
    Region,
    alpha,
    base_point,
    chart_origin,
    lift_many_to_patch,
    lift_to_patch,
    patch_index,
    patch_offsets,
    project_vectors,
    sphere_dist,
    standard_lifted_photon,
)
from .errors import DegenerateGamma, ScanExhausted
from .holonomy import (
    HeisenbergSpec,
    chronological_power,
    classify_domain,
    heisenberg_element,
    heisenberg_lattice,
)
from .quadric import (
    EinPoint,
    FormContext,
    bilinear,
    chart_vector,
    lightcone_inverse,
    lightcone_vector,
    minkowski_bilinear,
)
from .unipotent import (
    LiftedElement,
    UnipotentElement,
    act,
    commutator_translation,
    compose,
    from_affine,
    identity,
    inverse,
    lift_act_arrays,
    nilpotent_exp,
    orbit_arrays,
    tau,
    tau_limit_arrays,
)

TWO_PI = 2.0 * math.pi


@dataclass
class SampleConfig:
    n: int = 4
    samples: int = 10_000
    seed: int = 0
    tol: float = 1e-9
    k_range: int = 2000
    word_ball: int = 6

    @property
    def ctx(self) -> FormContext:
        return FormContext(self.n, self.tol)

    def with_n(self, n: int) -> "SampleConfig":
        return SampleConfig(n, self.samples, self.seed, self.tol, self.k_range, self.word_ball)


@dataclass
class CheckReport:
    name: str
    anchor: str
    samples: int
    failures: int
    max_residual: float
    seed: int
    threshold: float | None = None
    skipped: int = 0
    passed: bool = True
    elapsed: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        out = asdict(self)
        if not timings:
            out.pop("elapsed")
        return _jsonable(out)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: samples={self.samples} failures={self.failures} "
                f"skipped={self.skipped} max_residual={self.max_residual:.3e}")


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return repr(v)
        return v
    return obj


def stream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def sample_sphere(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    x = rng.normal(size=(m, n))
    return x / np.linalg.norm(x, axis=1)[:, None]


def sample_cover(rng: np.random.Generator, m: int, n: int, lo: float = -3 * math.pi, hi: float = 3 * math.pi):
    return sample_sphere(rng, m, n), rng.uniform(lo, hi, m)


def sample_patch(rng: np.random.Generator, m: int, n: int, side: str, band: float = 0.0):
    """Points of Min+(p0) or Min-(p0), p0 = (S_1, 0), drawn from the uniform product measure."""
    xs, ths = [], []
    got = 0
    e = np.zeros(n)
    e[0] = 1.0
    lo, hi = (-math.pi, math.pi) if side == "minus" else (0.0, TWO_PI)
    while got < m:
        x, th = sample_cover(rng, 2 * (m - got) + 16, n, lo, hi)
        d = sphere_dist(x, e)
        if side == "minus":
            keep = (th > -d + band) & (th < d - band)
        else:
            keep = (th > d + band) & (th < TWO_PI - d - band)
        xs.append(x[keep])
        ths.append(th[keep])
        got += int(keep.sum())
    return np.concatenate(xs)[:m], np.concatenate(ths)[:m]


def _timed(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    def wrapper(*args, **kwargs) -> CheckReport:
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.elapsed = time.perf_counter() - t0
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- causal identities -------------------------------------------------------


@_timed
def check_complement(cfg: SampleConfig, ns: tuple[int, ...] | None = None) -> CheckReport:
    """The complement of I+(p) is J-(alpha p) and the complement of J+(p) is I-(alpha p)."""
    ns = ns or (cfg.n,)
    rng = stream(cfg.seed, "complement")
    band = 10 * cfg.tol
    total = fails = skipped = 0
    resid = 0.0
    per_n = {}
    for n in ns:
        px, pth = sample_cover(rng, cfg.samples, n)
        qx, qth = sample_cover(rng, cfg.samples, n)
        m_fut = margins(px, pth, qx, qth)  # q in J+(p) iff >= 0
        ax, ath = -px, pth + math.pi
        m_alpha = margins(qx, qth, ax, ath)  # q in J-(alpha p) iff >= 0
        skip = (np.abs(m_fut) <= band) | (np.abs(m_alpha) <= band)
        not_I = ~(m_fut > cfg.tol)
        in_J_alpha = m_alpha >= -cfg.tol
        not_J = ~(m_fut >= -cfg.tol)
        in_I_alpha = m_alpha > cfg.tol
        bad = ((not_I != in_J_alpha) | (not_J != in_I_alpha)) & ~skip
        r = np.abs(m_fut + m_alpha)
        total += cfg.samples
        fails += int(bad.sum())
        skipped += int(skip.sum())
        resid = max(resid, float(r.max()))
        per_n[str(n)] = {"failures": int(bad.sum()), "skipped": int(skip.sum())}
    frac = skipped / total
    return CheckReport(
        "complement",
        "complement of the chronological future equals the causal past of the alpha-translate, and vice versa",
        total, fails, resid, cfg.seed, threshold=1e-12, skipped=skipped,
        passed=fails == 0 and frac < 0.01 and resid < 1e-12,
        details={"per_n": per_n, "skipped_fraction": frac, "band": band},
    )


@_timed
def check_min_boundary(cfg: SampleConfig) -> CheckReport:
    """Boundary of Min+(p) is L[p, alpha^2 p]; Min+(p) = Min-(alpha p); patch_index agrees with in_min."""
    ctx = cfg.ctx
    rng = stream(cfg.seed, "min_boundary")
    band = 10 * cfg.tol
    delta = standard_lifted_photon(ctx)
    m = cfg.samples
    fails: dict[str, int] = {}

    # random points against random bases on the photon
    phis = rng.uniform(-3 * math.pi, 3 * math.pi, m)
    bx, bth = delta.x_at(phis), phis
    px, pth = sample_cover(rng, m, ctx.n)
    lo = margins(bx, bth, px, pth)
    hi = margins(px, pth, bx, bth + TWO_PI)
    plus = (lo > cfg.tol) & (hi > cfg.tol)
    ax, ath = -bx, bth + math.pi
    lo2 = margins(-ax, ath - math.pi, px, pth)
    hi2 = margins(px, pth, -ax, ath + math.pi)
    minus_alpha = (lo2 > cfg.tol) & (hi2 > cfg.tol)
    fails["min_plus_equals_min_minus_alpha"] = int((plus != minus_alpha).sum())
    d = sphere_dist(px, bx)
    k, code, _ = patch_offsets(d, pth - bth, cfg.tol)
    near = (np.abs(lo) <= band) | (np.abs(hi) <= band)
    idx_plus = (code == 0) & (k == 0)
    fails["patch_index_vs_in_min"] = int(((idx_plus != plus) & ~near).sum())
    resid = float(np.abs((lo - lo2)).max())

    # constructed boundary points, lower and upper sheets, for several k
    m_b = max(m // 10, 50)
    ks = rng.integers(-2, 3, m_b)
    upper = rng.random(m_b) < 0.5
    qx = sample_sphere(rng, m_b, ctx.n)
    seg_fail = shell_fail = inside_fail = nudge_fail = 0
    for j in range(m_b):
        base = CoverPoint(bx[j], bth[j])
        dj = float(sphere_dist(qx[j], base.x))
        off = TWO_PI - dj if upper[j] else dj
        q = CoverPoint(qx[j], base.theta + 2 * math.pi * ks[j] + off)
        pi_k, region = patch_index(ctx, q, base)
        if region is not Region.LIGHTCONE_SHELL or pi_k != ks[j]:
            shell_fail += 1
        seg = Segment(delta, base.theta, 0, 2, open_left=False, open_right=False)
        if on_segment(ctx, q, seg) != (ks[j] == 0):
            seg_fail += 1
        if ks[j] == 0:
            if in_min(ctx, q, base, "plus"):
                inside_fail += 1
            if 1e-5 < dj < math.pi - 1e-5:
                nudge = CoverPoint(q.x, q.theta + (-1e-6 if upper[j] else 1e-6))
                if not in_min(ctx, nudge, base, "plus"):
                    nudge_fail += 1
    fails["boundary_on_segment"] = seg_fail
    fails["boundary_patch_shell"] = shell_fail
    fails["boundary_not_interior"] = inside_fail
    fails["boundary_adherent"] = nudge_fail
    total_fail = sum(fails.values())
    return CheckReport(
        "min_boundary",
        "boundary of Min+(p) is L[p, alpha^2 p]; Min+(p) = Min-(alpha p)",
        m + m_b, total_fail, resid, cfg.seed, threshold=1e-12, skipped=int(near.sum()),
        passed=total_fail == 0, details={"failures": fails},
    )


def _segment_distance(delta, xs: np.ndarray, ths: np.ndarray, a: float, b: float) -> np.ndarray:
    """Product-metric distance from cover points to the photon over theta in [a, b]."""
    grid = np.linspace(a, b, 257)
    vals = np.stack([np.hypot(sphere_dist(xs, delta.x_at(np.full(len(ths), g))), ths - g) for g in grid], axis=1)
    j = np.argmin(vals, axis=1)
    lo = grid[np.maximum(j - 1, 0)]
    hi = grid[np.minimum(j + 1, len(grid) - 1)]
    f = lambda ph: np.hypot(sphere_dist(xs, delta.x_at(ph)), ths - ph)  # noqa: E731
    gr = (math.sqrt(5) - 1) / 2
    for _ in range(60):
        c = hi - gr * (hi - lo)
        d = lo + gr * (hi - lo)
        left = f(c) < f(d)
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    return np.minimum(f(0.5 * (lo + hi)), vals.min(axis=1))


@_timed
def check_tau_limits(cfg: SampleConfig, per_side: int = 1000, t: float = 1e3) -> CheckReport:
    """Min+-(p) flows to Delta(p, alpha p) as t -> -+inf; exp/matrix agreement; tau is future-pointing."""
    ctx = cfg.ctx
    n = ctx.n
    rng = stream(cfg.seed, "tau_limits")
    delta = standard_lifted_photon(ctx)
    details: dict[str, Any] = {}
    fails = 0
    resid = 0.0

    # matrix against nilpotent series and a dense matrix exponential
    N = np.zeros((n + 2, n + 2))
    N[0, n] = 1.0
    N[1, n + 1] = -1.0
    xs, ths = sample_cover(rng, per_side, n)
    reps = project_vectors(ctx, xs, ths)
    ss = rng.uniform(-10, 10, per_side)
    r_exp = 0.0
    for s, v in zip(ss, reps):
        a = tau(ctx, s).matrix @ v
        b = nilpotent_exp(s * N) @ v
        c = expm(s * N) @ v
        r_exp = max(r_exp, float(np.abs(a - b).max()), float(np.abs(a - c).max()))
    details["exp_residual"] = r_exp
    fails += int(r_exp >= 1e-10)
    resid = max(resid, r_exp)

    # limits
    dist_tol = 1e-2
    side_fail = {}
    max_dist = 0.0
    for side in ("minus", "plus"):
        px, pth = sample_patch(rng, per_side, n, side)
        # the flow towards Delta(p0, alpha p0)
        s = t if side == "minus" else -t
        fx, fth = lift_act_arrays(ctx, tau(ctx, s).log, px, pth)
        dist = _segment_distance(delta, fx, fth, 0.0, math.pi)
        # the opposite flow lands in the alpha-shifted segment for Min+, alpha^-1-shifted for Min-
        gx, gth = lift_act_arrays(ctx, tau(ctx, -s).log, px, pth)
        a, b = (math.pi, TWO_PI) if side == "plus" else (-math.pi, 0.0)
        dist2 = _segment_distance(delta, gx, gth, a, b)
        # closed-form limit from tau_limit
        lx, lth, ok = tau_limit_arrays(ctx, delta, px, pth, forward=(s > 0))
        in_seg = (lth > -cfg.tol) & (lth < math.pi + cfg.tol)
        bad = (dist > dist_tol) | (dist2 > dist_tol) | ~in_seg | ~ok
        # slow points: the error decays like 1/t, so flowing ten times longer should fix them
        slow = np.flatnonzero((dist > dist_tol) | (dist2 > dist_tol))
        longer = 0.0
        if slow.size:
            hx, hth = lift_act_arrays(ctx, tau(ctx, 10 * s).log, px[slow], pth[slow])
            kx, kth = lift_act_arrays(ctx, tau(ctx, -10 * s).log, px[slow], pth[slow])
            longer = float(max(_segment_distance(delta, hx, hth, 0.0, math.pi).max(),
                               _segment_distance(delta, kx, kth, a, b).max()))
        side_fail[side] = {
            "max_distance_of_slow_points_at_10t": longer,
            "failures": int(bad.sum()),
            "max_distance": float(max(dist.max(), dist2.max())),
            "limit_outside_segment": int((~in_seg).sum()),
            "max_distance_to_closed_form_limit": float(np.hypot(sphere_dist(fx, lx), fth - lth).max()),
        }
        fails += int(bad.sum())
        max_dist = max(max_dist, float(dist.max()), float(dist2.max()))
    details["limits"] = side_fail
    details["flow_time"] = t

    # <Y_tau, time vector> <= 0 with equality exactly on the photon
    xs, ths = sample_cover(rng, per_side, n)
    reps = project_vectors(ctx, xs, ths)
    reps = reps / np.linalg.norm(reps, axis=1)[:, None]
    pairing = bilinear(ctx, tau_field(ctx, reps), time_vector(ctx, reps))
    off_photon = np.linalg.norm(reps[:, 2:], axis=1) > math.sqrt(2 * 1e-9)
    sign_fail = int((pairing > cfg.tol).sum()) + int(((np.abs(pairing) <= cfg.tol) & off_photon).sum())
    phis = rng.uniform(0, math.pi, per_side)
    on = np.zeros((per_side, n + 2))
    on[:, 0] = np.cos(phis)
    on[:, 1] = np.sin(phis)
    zero_fail = int((np.abs(bilinear(ctx, tau_field(ctx, on), time_vector(ctx, on))) > 1e-9).sum())
    details["orientation"] = {"positive_pairings": sign_fail, "nonzero_on_photon": zero_fail,
                              "max_pairing": float(pairing.max())}
    fails += sign_fail + zero_fail
    return CheckReport(
        "tau_limits",
        "Min+(p) and Min-(p) flow under tau to Delta(p, alpha p) as t -> -inf and +inf",
        4 * per_side, fails, max(resid, max_dist), cfg.seed, threshold=dist_tol, passed=fails == 0,
        details={**details, "max_limit_distance": max_dist},
    )


# --- unipotent algebra ----------------------------------------------------------


@_timed
def check_unipotent_algebra(cfg: SampleConfig, elements: int = 1000, triples: int = 100) -> CheckReport:
    """Matrix, affine and commutator descriptions of the unipotent group agree, and the lift is a homomorphism."""
    ctx = cfg.ctx
    n = ctx.n
    rng = stream(cfg.seed, "unipotent_algebra")
    Q = ctx.gram
    I = np.eye(n + 2)
    e1 = ctx.me(1)
    res = dict.fromkeys(["orthogonality", "nilpotency", "chart_conjugation", "linear_action",
                         "commutator", "dee_homomorphism"], 0.0)
    for _ in range(elements):
        g = from_affine(ctx, rng.normal(size=n - 2), rng.normal(size=n))
        h = from_affine(ctx, rng.normal(size=n - 2), rng.normal(size=n))
        M = g.matrix
        scale = max(1.0, float(np.abs(M).max()))
        res["orthogonality"] = max(res["orthogonality"], float(np.abs(M.T @ Q @ M - Q).max()) / scale**2)
        res["nilpotency"] = max(res["nilpotency"],
                                float(np.abs(np.linalg.matrix_power(M - I, n + 2)).max()) / scale ** (n + 2))
        x = rng.normal(size=n)
        img = M @ chart_vector(ctx, x)
        res["chart_conjugation"] = max(res["chart_conjugation"],
                                       float(np.abs(img[1:-1] / img[-1] - g.apply_affine(x)).max()) / scale)
        v = rng.normal(size=n)
        off = g.linear @ v - v + float(minkowski_bilinear(ctx, v, e1)) * g.ell
        res["linear_action"] = max(res["linear_action"], float(np.abs(off[1:]).max()) / scale)
        # matrix oracle for the commutator
        C = M @ h.matrix @ np.linalg.inv(M) @ np.linalg.inv(h.matrix)
        rot = C[1:-1, 1:-1] - np.eye(n)
        formula = commutator_translation(g, h)
        cs = max(1.0, float(np.abs(C).max()))
        res["commutator"] = max(res["commutator"], float(np.abs(rot).max()) / cs,
                                float(np.abs(C[1:-1, -1] - formula).max()) / cs)
        res["dee_homomorphism"] = max(res["dee_homomorphism"], abs(compose(g, h).dee - g.dee - h.dee))
    algebra = max(res.values())

    lift = 0.0
    for _ in range(triples):
        g = from_affine(ctx, rng.normal(size=n - 2), rng.normal(size=n))
        h = from_affine(ctx, rng.normal(size=n - 2), rng.normal(size=n))
        px, pt = sample_cover(rng, 1, n)
        hx, ht = lift_act_arrays(ctx, h.log, px, pt)
        ghx, ght = lift_act_arrays(ctx, g.log, hx, ht)
        cx, ct = lift_act_arrays(ctx, compose(g, h).log, px, pt)
        lift = max(lift, float(np.hypot(sphere_dist(ghx, cx), ght - ct).max()))
    fails = int(algebra >= 1e-10) + int(lift >= 1e-8)
    return CheckReport(
        "unipotent_algebra",
        "matrix and affine descriptions agree; commutators are translations; the lift is a homomorphism",
        elements + triples, fails, algebra, cfg.seed, threshold=1e-10, passed=fails == 0,
        details={**res, "lift_homomorphism": lift, "lift_threshold": 1e-8},
    )


# --- case 2 -------------------------------------------------------------------


def sample_omega(rng: np.random.Generator, m: int, n: int, band: float):
    """Uniform points of Min-(p0) + L(p0, alpha p0) + Min+(p0), i.e. -d < theta < 2 pi - d."""
    xs, ths = [], []
    got = 0
    e = np.zeros(n)
    e[0] = 1.0
    while got < m:
        x, th = sample_cover(rng, 2 * (m - got) + 16, n, -math.pi, TWO_PI)
        d = sphere_dist(x, e)
        keep = (th > -d + band) & (th < TWO_PI - d - band)
        xs.append(x[keep])
        ths.append(th[keep])
        got += int(keep.sum())
    return np.concatenate(xs)[:m], np.concatenate(ths)[:m]


@_timed
def check_tiling(
    cfg: SampleConfig,
    gamma: LiftedElement,
    q0: CoverPoint | None = None,
    strict: bool = False,
    window: int = 20,
    cross_checks: int = 200,
) -> CheckReport:
    """The translates gamma^i D of D = J+(q0) & I-(alpha gamma q0) tile Omega.

    Orbit points o_i = gamma^i q0 are computed by the canonical lift for
    |i| <= k_range. For each sample the largest i with x in J+(o_i) is found by
    bisection, then membership in gamma^j D is tested for every j within
    `window` of it, and a subsample is cross-checked by pulling x back with
    gamma^-i and testing D directly.
    """
    ctx = gamma.ctx
    n = ctx.n
    rng = stream(cfg.seed, "tiling")
    q0 = q0 or chart_origin(ctx)
    band = 10 * cfg.tol
    kpow = chronological_power(gamma, q0, max_power=8)
    if kpow:
        g = gamma.power(kpow)
    else:
        # no power is chronological; still orient the orbit towards the causal future
        g = gamma if margin(q0, act(gamma, q0)) >= -band else gamma.inverse()
    K = int(cfg.k_range)
    idx = np.arange(-K, K + 2)
    ox, oth = orbit_arrays(g, q0, idx)
    # the top boundary of gamma^i D is alpha o_{i+1}
    m = cfg.samples
    xs, ths = sample_omega(rng, m, n, band)

    def in_Jplus(i_arr: np.ndarray) -> np.ndarray:
        j = i_arr + K
        return margins(ox[j], oth[j], xs, ths) >= -band

    lo_b = np.full(m, -K)
    hi_b = np.full(m, K)
    below = ~in_Jplus(lo_b)
    above = in_Jplus(hi_b)
    # J+(o_i) decreases in i; keep in_Jplus(lo_b) true and search for the last true index
    for _ in range(int(math.ceil(math.log2(2 * K + 2))) + 1):
        mid = (lo_b + hi_b + 1) // 2
        ok = in_Jplus(mid)
        lo_b = np.where(ok, mid, lo_b)
        hi_b = np.where(ok, hi_b, mid - 1)
    istar = np.where(above, K, lo_b)
    exhausted = below | (above & ~(margins(xs, ths, -ox[2 * K + 1], oth[2 * K + 1] + math.pi) >= -band))

    def place(i_arr: np.ndarray) -> np.ndarray:
        j = np.clip(i_arr, -K, K) + K
        lo_m = margins(ox[j], oth[j], xs, ths)
        hi_m = margins(xs, ths, -ox[j + 1], oth[j + 1] + math.pi)  # alpha o_{i+1}
        return classify_domain(lo_m, hi_m, band)

    home = place(istar)
    covered = (home != "outside") & ~exhausted
    interior_hits = np.zeros(m, dtype=int)
    for off in range(-window, window + 1):
        j = istar + off
        valid = (j >= -K) & (j <= K)
        interior_hits += ((place(j) == "interior") & valid).astype(int)
    multiplicity = int((interior_hits > 1).sum())
    coverage_fail = int((~covered).sum())
    if strict and coverage_fail:
        raise ScanExhausted(f"{coverage_fail} samples not reached within |i| <= {K}")

    # direct pull-back cross-check
    c = min(cross_checks, m)
    sel = rng.choice(m, size=c, replace=False)
    sel = sel[covered[sel]]
    X = (-istar[sel])[:, None, None] * g.body.log[None, :, :]
    bx, bth = lift_act_arrays(ctx, X, xs[sel], ths[sel])
    shift = -istar[sel] * g.alpha_power
    bx = np.where((shift % 2 == 0)[:, None], bx, -bx)
    bth = bth + shift * math.pi
    pl = classify_domain(margins(q0.x, q0.theta, bx, bth),
                         margins(bx, bth, -ox[K + 1], oth[K + 1] + math.pi), 1e-7)
    cross_fail = int((pl == "outside").sum())
    # the orbit stays in Min-(p0)
    lifted_x, lifted_th, off_shell = lift_many_to_patch(ctx, project_vectors(ctx, ox, oth), base_point(ctx), "minus")
    orbit_resid = float(np.hypot(sphere_dist(lifted_x, ox), lifted_th - oth)[off_shell].max())

    coverage = float(covered.mean())
    # up to 0.1% of samples may stay unreached near the two ends of Omega; they count as skipped
    tolerated = coverage >= 0.999
    fails = multiplicity + cross_fail + int(orbit_resid > 1e-9) + (0 if tolerated else coverage_fail)
    return CheckReport(
        "tiling",
        "translates of J+(q0) & I-(alpha gamma q0) tile Min-(p) + L(p, alpha p) + Min+(p)",
        m, fails, orbit_resid, cfg.seed, threshold=1e-9, skipped=coverage_fail if tolerated else 0,
        passed=fails == 0,
        details={
            "coverage": coverage,
            "multiplicity_failures": multiplicity,
            "coverage_failures": coverage_fail,
            "scan_exhausted": int(exhausted.sum()),
            "interior": int((home == "interior").sum()),
            "boundary": int((home == "boundary").sum()),
            "cross_check_failures": cross_fail,
            "cross_checked": int(len(sel)),
            "k_range": K,
            "power_used": kpow if kpow else (1 if g is gamma else -1),
            "orbit_points_on_shell": int((~off_shell).sum()),
            "q0_chronological": bool(kpow != 0),
        },
    )


def orbit_sum(ctx: FormContext, w: np.ndarray, v: np.ndarray, i: int) -> np.ndarray:
    """sum_{j<i} U^j v computed term by term from the closed form of U^j."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    W = np.zeros(ctx.n)
    W[1:-1] = w
    e1 = ctx.me(1)
    vn = v[-1]
    vw = float(minkowski_bilinear(ctx, v, W))
    ww = float(w @ w)
    j = np.arange(i, dtype=float)
    return (i * v - vn * j.sum() * W + (vw * j.sum() - 0.5 * vn * ww * (j * j).sum()) * e1)


@_timed
def check_asymptotics(cfg: SampleConfig, gamma: UnipotentElement, i_lo: int = 100, i_hi: int = 1000) -> CheckReport:
    """<orbit_i, e_n - e_1> grows like c i^3 with c = -v_n |w|^2 / 6."""
    ctx = gamma.ctx
    w, v = gamma.w, gamma.u
    if float(w @ w) <= ctx.tol or abs(v[-1]) <= ctx.tol:
        raise DegenerateGamma("need w != 0 and v_n != 0")
    ii = np.arange(i_lo, i_hi + 1)
    probe = ctx.me(ctx.n) - ctx.me(1)
    M = gamma.matrix
    vals = []
    resid = 0.0
    Mi = np.linalg.matrix_power(M, int(i_lo))
    for i in ii:
        o = Mi[1:-1, -1] / Mi[-1, -1]  # chart image of the origin
        s = orbit_sum(ctx, w, v, int(i))
        resid = max(resid, float(np.abs(o - s).max() / max(1.0, np.abs(s).max())))
        vals.append(float(minkowski_bilinear(ctx, s, probe)))
        Mi = M @ Mi
    vals = np.array(vals)
    scale = float(i_hi)
    A = np.stack([(ii / scale) ** k for k in range(4)], axis=1)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    c_fit = coef[3] / scale**3
    c_pred = -v[-1] * float(w @ w) / 6.0
    rel = abs(c_fit - c_pred) / abs(c_pred)
    passed = rel < 0.01 and resid < 1e-9
    return CheckReport(
        "asymptotics",
        "the orbit of the chart origin grows cubically along e_n - e_1 with coefficient -v_n |w|^2 / 6",
        len(ii), int(not passed), rel, cfg.seed, threshold=0.01, passed=passed,
        details={"c_fit": c_fit, "c_predicted": c_pred, "relative_error": rel, "matrix_vs_sum_residual": resid},
    )


# --- case 3 -------------------------------------------------------------------


def _solve_hyperplane(theta: np.ndarray, r: float, x: np.ndarray, y: np.ndarray, tol: float):
    """Element (ell, c) of H carrying x to y, both on {x_n = r}; returns (ell, c, unique, exists)."""
    A = theta - r * np.eye(theta.shape[0])
    rhs = y[1:-1] - x[1:-1]
    sv = np.linalg.svd(A, compute_uv=False)
    unique = sv[-1] > tol * max(1.0, sv[0]) * 1e3
    ell, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    exists = float(np.abs(A @ ell - rhs).max()) <= 1e-9 * max(1.0, np.abs(rhs).max())
    c = y[0] - x[0] - float(x[1:-1] @ ell) + 0.5 * r * float(ell @ ell)
    return ell, c, bool(unique), bool(exists)


@_timed
def check_simply_transitive(
    cfg: SampleConfig, spec: HeisenbergSpec, hyperplanes: tuple[float, ...] | None = None, pairs: int = 1000
) -> CheckReport:
    """H acts simply transitively on each hyperplane {x_n = r} and on the lightcone chart."""
    ctx = FormContext(spec.n, cfg.tol)
    n = ctx.n
    rng = stream(cfg.seed, f"simply_transitive_{spec.k}")
    hyperplanes = hyperplanes if hyperplanes is not None else tuple(rng.uniform(-2, 2, 3))
    theta = spec.theta
    details: dict[str, Any] = {}
    fails = 0
    resid = 0.0
    for r in hyperplanes:
        x = rng.normal(size=(pairs, n))
        y = rng.normal(size=(pairs, n))
        x[:, -1] = r
        y[:, -1] = r
        nonunique = missing = bad = 0
        rmax = 0.0
        for a, b in zip(x, y):
            ell, c, unique, exists = _solve_hyperplane(theta, r, a, b, cfg.tol)
            if not unique:
                nonunique += 1
            if not exists:
                missing += 1
                continue
            h = heisenberg_element(ctx, theta, ell, c)
            img = h.matrix @ chart_vector(ctx, a)
            err = float(np.abs(img[1:-1] / img[-1] - b).max())
            rmax = max(rmax, err)
            bad += err >= 1e-9
        details[f"hyperplane_{r:.6g}"] = {"nonunique": nonunique, "no_solution": missing, "residual_failures": bad,
                                         "max_residual": rmax}
        fails += nonunique + missing + bad
        resid = max(resid, rmax)
    # lightcone chart: (t, y) -> (t - c - <theta ell, y - ell>, y - ell)
    rmax = 0.0
    bad = 0
    for _ in range(pairs):
        t0, t1 = rng.normal(size=2)
        y0, y1 = rng.normal(size=(2, n - 2))
        ell = y0 - y1
        c = t0 - t1 - float((theta @ ell) @ y1)
        h = heisenberg_element(ctx, theta, ell, c)
        img = h.matrix @ lightcone_vector(ctx, t0, y0)
        tt, yy = lightcone_inverse(ctx, EinPoint(img))
        err = max(abs(tt - t1), float(np.abs(yy - y1).max()))
        rmax = max(rmax, err)
        bad += err >= 1e-9
    details["lightcone"] = {"residual_failures": bad, "max_residual": rmax}
    fails += bad
    resid = max(resid, rmax)
    return CheckReport(
        "simply_transitive",
        "the Heisenberg group acts simply transitively on the hyperplanes x_n = r and on the lightcone",
        pairs * (len(hyperplanes) + 1), fails, resid, cfg.seed, threshold=1e-9, passed=fails == 0,
        details={**details, "k": spec.k, "real_eigenvalues": spec.real_eigenvalues()},
    )


def _element_key(g: LiftedElement, digits: int = 8) -> tuple:
    return (g.alpha_power, tuple(np.round(np.concatenate([g.body.w, g.body.u]), digits) + 0.0))


def word_ball(generators: list[LiftedElement], radius: int) -> list[list[LiftedElement]]:
    """Elements by word length, up to `radius`, deduplicated."""
    ctx = generators[0].ctx
    moves = generators + [g.inverse() for g in generators]
    e = LiftedElement(0, identity(ctx))
    seen = {_element_key(e)}
    levels = [[e]]
    frontier = [e]
    for _ in range(radius):
        nxt = []
        for h in frontier:
            for s in moves:
                g = h @ s
                key = _element_key(g)
                if key not in seen:
                    seen.add(key)
                    nxt.append(g)
        levels.append(nxt)
        frontier = nxt
    return levels


def compact_samples(rng: np.random.Generator, center: CoverPoint, radius: float, m: int,
                    extra: tuple[np.ndarray, np.ndarray] | None = None):
    """Points of the metric ball of `radius` about `center`, plus optional extra points inside it."""
    n = center.n
    pts_x, pts_t = [center.x[None, :]], [np.array([center.theta])]
    # random directions in the tangent space of the sphere, and theta offsets
    v = rng.normal(size=(m, n))
    v -= (v @ center.x)[:, None] * center.x
    v /= np.linalg.norm(v, axis=1)[:, None]
    rad = radius * rng.random(m) ** (1.0 / n)
    ang = rng.uniform(0, math.pi, m)
    a, dt = rad * np.sin(ang), rad * np.cos(ang)
    x = np.cos(a)[:, None] * center.x + np.sin(a)[:, None] * v
    pts_x.append(x)
    pts_t.append(center.theta + dt)
    if extra is not None:
        ex, et = extra
        keep = np.hypot(sphere_dist(ex, center.x), et - center.theta) <= radius
        pts_x.append(ex[keep])
        pts_t.append(et[keep])
    return np.concatenate(pts_x), np.concatenate(pts_t)


@_timed
def check_properness(
    cfg: SampleConfig,
    generators: list[LiftedElement],
    center: CoverPoint | None = None,
    radius: float = 0.5,
    points: int = 64,
    extra: tuple[np.ndarray, np.ndarray] | None = None,
    label: str = "",
) -> CheckReport:
    """Count group elements g of word length <= word_ball with g K meeting K."""
    ctx = generators[0].ctx
    rng = stream(cfg.seed, "properness" + label)
    center = center or chart_origin(ctx)
    kx, kt = compact_samples(rng, center, radius, points, extra)
    levels = word_ball(generators, cfg.word_ball)
    counts = []
    running = 0
    for level in levels:
        for g in level:
            gx, gt = lift_act_arrays(ctx, g.body.log, kx, kt)
            k = g.alpha_power
            if k:
                gx = gx if k % 2 == 0 else -gx
                gt = gt + k * math.pi
            dist = np.hypot(sphere_dist(gx, center.x), gt - center.theta)
            running += bool((dist <= radius).any())
        counts.append(running)
    suspect = len(counts) >= 2 and counts[-1] > counts[-2]
    return CheckReport(
        "properness" + (f"_{label}" if label else ""),
        "proper discontinuity: finitely many g with g K meeting K",
        len(kx), int(suspect), float(counts[-1]), cfg.seed, passed=not suspect,
        details={"counts_by_word_length": counts, "elements_by_word_length": [len(lv) for lv in levels],
                 "unbounded_suspect": suspect, "radius": radius},
    )


@_timed
def check_real_eigenvalue_obstruction(cfg: SampleConfig, spec: HeisenbergSpec, pairs: int = 200,
                                      radius: float = 0.1) -> CheckReport:
    """With a real eigenvalue r of theta, H has noncompact stabilizers on {x_n = r}.

    Detection means: the hyperplane solve is non-unique for every pair on H_r,
    and the number of lattice elements returning a small ball centred on H_r
    keeps growing with word length, while the same ball centred off every H_r
    gives a count that stabilises.
    """
    ctx = FormContext(spec.n, cfg.tol)
    n = ctx.n
    rng = stream(cfg.seed, f"real_eigenvalue_{spec.k}")
    reals = spec.real_eigenvalues()
    details: dict[str, Any] = {"real_eigenvalues": reals}
    if not reals:
        return CheckReport("real_eigenvalue_obstruction", "theta has a real eigenvalue", 0, 1, 0.0, cfg.seed,
                           passed=False, details=details)
    lat = heisenberg_lattice(spec, ctx=ctx)
    gens = [LiftedElement(0, g) for g in [*lat.generators, lat.central]]
    undetected = 0
    for r in reals:
        x = rng.normal(size=(pairs, n))
        y = rng.normal(size=(pairs, n))
        x[:, -1] = r
        y[:, -1] = r
        unique = sum(_solve_hyperplane(spec.theta, r, a, b, cfg.tol)[2] for a, b in zip(x, y))
        details[f"unique_on_H_{r:.6g}"] = int(unique)
        undetected += int(unique)
    # stabilizer directions need not be generators, so growth is measured from half the ball to the full ball
    half = cfg.word_ball // 2
    grows = True
    off = max(reals) + 0.5
    for label, xn in [(f"{r:.6g}", r) for r in reals] + [("off", off)]:
        pt = np.zeros(n)
        pt[1:-1] = rng.normal(size=n - 2) * 0.3
        pt[-1] = xn
        c = lift_to_patch(ctx, EinPoint(chart_vector(ctx, pt)), base_point(ctx), "minus")
        counts = check_properness(cfg, gens, center=c, radius=radius, label=label).details["counts_by_word_length"]
        details[f"counts_H_{label}"] = counts
        if label == "off":
            stable = counts[-1] == counts[half]
        else:
            on = counts
            grows = grows and counts[-1] > counts[half]
    fails = undetected + int(not grows) + int(not stable)
    return CheckReport(
        "real_eigenvalue_obstruction",
        "a real eigenvalue of theta gives noncompact stabilizers on the matching hyperplane",
        pairs * len(reals), fails, float(on[-1]), cfg.seed, passed=fails == 0,
        details={**details, "radius": radius},
    )


# --- vector fields -----------------------------------------------------------


def lightcone_fields_z(z: np.ndarray) -> np.ndarray:
    """Fields Y_i, i = 2..n-1, on the leaf space of the lightcone in the chart x_1 = 1.

    z holds (z_2, ..., z_n). Y_i = z_n d_i + sum_j z_i z_j d_j + z_n z_i d_n.
    Row i-2 of the result is Y_i.
    """
    zv, zn = z[:-1], z[-1]
    k = zv.size
    out = np.zeros((k, k + 1))
    for a in range(k):
        out[a, :k] = zv[a] * zv
        out[a, a] += zn
        out[a, k] = zn * zv[a]
    return out


def lightcone_to_z(y: np.ndarray) -> np.ndarray:
    """Leaf-space chart x_1 = 1 of the lightcone point parametrised by y."""
    s = -0.5 * float(y @ y)
    return np.concatenate([y / s, [1.0 / s]])


def second_chart_fields(x: np.ndarray) -> np.ndarray:
    """Pushforwards of d/dy_i (i = 2..n-1) and d/dy_n into the chart x -> [x_1 : -q/2 : x_V : 1 : x_n].

    Rows are Y_2..Y_{n-1}, Y_n in coordinates (x_1, x_2..x_{n-1}, x_n).
    """
    n = x.size
    x1, xv, xn = x[0], x[1:-1], x[-1]
    out = np.zeros((n - 1, n))
    for a in range(n - 2):
        out[a, 0] = -xv[a]
        out[a, 1 + a] = xn
    out[-1, 0] = 0.5 * float(xv @ xv)
    out[-1, 1:-1] = -xn * xv
    out[-1, -1] = -xn * xn
    return out


def first_to_second(y: np.ndarray) -> np.ndarray:
    """Coordinate change from the chart iota(y) to the second chart."""
    q = 2 * y[0] * y[-1] + float(y[1:-1] @ y[1:-1])
    yn = y[-1]
    return np.concatenate([[-q / (2 * yn)], y[1:-1] / yn, [1.0 / yn]])


def _jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.stack(cols, axis=1)


def _bracket(field: Callable[[np.ndarray], np.ndarray], a: int, b: int, x: np.ndarray, h: float) -> np.ndarray:
    Xa = lambda p: field(p)[a]  # noqa: E731
    Xb = lambda p: field(p)[b]  # noqa: E731
    return _jacobian(Xb, x, h) @ Xa(x) - _jacobian(Xa, x, h) @ Xb(x)


@_timed
def check_vector_fields(cfg: SampleConfig, points: int = 200) -> CheckReport:
    """Extension to the photon, commutation modulo the photon direction, and invariance under the group."""
    ctx = cfg.ctx
    n = ctx.n
    rng = stream(cfg.seed, "vector_fields")
    details: dict[str, Any] = {}
    fails = 0
    eps = 10.0 ** -np.arange(1, 7)

    # (a) lightcone fields vanish approaching the photon point [e_1] (z -> 0)
    mono_fail = 0
    for _ in range(points):
        u = rng.normal(size=n - 2)
        u /= np.linalg.norm(u)
        norms = []
        for e in eps:
            z = np.concatenate([e * u, [-0.5 * e * e]])
            norms.append(np.linalg.norm(lightcone_fields_z(z), axis=1).max())
        mono_fail += int(not np.all(np.diff(norms) < 0) or norms[-1] > 1e-9)
    # Y_n has vanishing transverse part approaching x_n = 0 in the second chart
    trans_fail = 0
    for _ in range(points):
        x = rng.normal(size=n)
        vals = []
        for e in eps:
            x[-1] = e
            vals.append(abs(second_chart_fields(x)[-1, -1]))
        trans_fail += int(not np.all(np.diff(vals) < 0) or vals[-1] > 1e-9)
    # the formulas agree with finite-difference pushforwards of the coordinate fields
    push_resid = 0.0
    for _ in range(points):
        y = rng.normal(size=n)
        if abs(y[-1]) < 0.2:
            y[-1] = 0.2 * np.sign(y[-1] or 1.0)
        J = _jacobian(first_to_second, y, 1e-6)
        F = second_chart_fields(first_to_second(y))
        push_resid = max(push_resid, float(np.abs(J[:, 1:] .T - F).max() / max(1.0, np.abs(F).max())))
        yv = rng.normal(size=n - 2)
        Jz = _jacobian(lightcone_to_z, yv, 1e-6)
        Fz = lightcone_fields_z(lightcone_to_z(yv))
        push_resid = max(push_resid, float(np.abs(Jz.T - Fz).max() / max(1.0, np.abs(Fz).max())))
    details["extension"] = {"monotone_failures": mono_fail, "transverse_failures": trans_fail,
                            "pushforward_residual": push_resid}
    fails += mono_fail + trans_fail + int(push_resid > 1e-6)

    # (b) brackets vanish modulo the photon direction d_1
    br = 0.0
    for _ in range(points // 4):
        x = rng.normal(size=n)
        for a in range(n - 1):
            for b in range(a + 1, n - 1):
                v = _bracket(second_chart_fields, a, b, x, 1e-4)
                br = max(br, float(np.abs(v[1:]).max()))
        z = rng.normal(size=n - 1) * 0.5
        for a in range(n - 2):
            for b in range(a + 1, n - 2):
                v = _bracket(lightcone_fields_z, a, b, z, 1e-4)
                br = max(br, float(np.abs(v).max()))
    details["bracket_residual"] = br
    fails += int(br >= 1e-5)

    # (c) invariance under the unipotent group modulo the foliation
    inv = 0.0
    for _ in range(points // 4):
        g = from_affine(ctx, rng.normal(size=n - 2), rng.normal(size=n))
        M = g.matrix

        def on_lightcone(p: np.ndarray) -> np.ndarray:
            tt, yy = lightcone_inverse(ctx, EinPoint(M @ lightcone_vector(ctx, p[0], p[1:])))
            return np.concatenate([[tt], yy])

        p = np.concatenate([rng.normal(size=1), rng.normal(size=n - 2)])
        J = _jacobian(on_lightcone, p, 1e-5)
        inv = max(inv, float(np.abs(J[1:, 1:] - np.eye(n - 2)).max()))

        def on_chart(x: np.ndarray) -> np.ndarray:
            img = M @ chart_vector(ctx, x)
            return img[1:-1] / img[-1]

        x = rng.normal(size=n)
        J = _jacobian(on_chart, x, 1e-5)
        # Y_i = d/dx_i is preserved modulo e_1; Y_n modulo e_1-perp (leaves x_n = const)
        inv = max(inv, float(np.abs(J[1:, 1 : n - 1] - np.eye(n)[1:, 1 : n - 1]).max()))
        inv = max(inv, abs(J[-1, -1] - 1.0))
    details["invariance_residual"] = inv
    fails += int(inv >= 1e-7)
    return CheckReport(
        "vector_fields",
        "lightcone fields extend by zero to the photon, commute modulo the photon direction and are group invariant",
        points, fails, max(br, inv), cfg.seed, threshold=1e-5, passed=fails == 0, details=details,
    )


# --- essentiality --------------------------------------------------------------


@_timed
def check_essential_indicator(
    cfg: SampleConfig, case: int, lattice: list[UnipotentElement] | None = None, t: float = 1e3
) -> CheckReport:
    """Numerical proxy for essentiality of the null translation flow.

    Cases 1 and 2: small simplices in Min-(p0), measured in the product metric
    of the cover, lose volume under tau^t (the flow collapses them onto the photon).
    Case 4: tau acts on the Minkowski chart by an isometric translation.
    Case 3: tau commutes with the lattice and some tau^c lies in it, so the
    flow on the quotient factors through a circle of length c.
    """
    ctx = cfg.ctx
    n = ctx.n
    rng = stream(cfg.seed, f"essential_{case}")
    details: dict[str, Any] = {"case": case}
    if case in (1, 2):
        ratios = []
        for _ in range(32):
            cx, ct = sample_patch(rng, 1, n, "minus", band=0.2)
            c = CoverPoint(cx[0], ct[0])
            # right-corner simplex on an orthonormal frame of the tangent space at c
            frame = np.linalg.qr(np.concatenate([c.x[:, None], rng.normal(size=(n, n - 1))], axis=1))[0][:, 1:]
            kx = np.concatenate([c.x[None, :], np.cos(0.05) * c.x + np.sin(0.05) * frame.T, c.x[None, :]])
            kt = np.concatenate([np.full(n, c.theta), [c.theta + 0.05]])
            fx, ft = lift_act_arrays(ctx, tau(ctx, t).log, kx, kt)

            def vol(xx, tt):
                # n-volume of the simplex in the product embedding S^{n-1} x R in R^{n+1}
                s = np.concatenate([xx, tt[:, None]], axis=1)
                E = s[1:] - s[0]
                return math.sqrt(max(np.linalg.det(E @ E.T), 0.0))

            ratios.append(vol(fx, ft) / vol(kx, kt))
        ratio = float(max(ratios))
        fires = ratio < 1e-2
        details.update({"max_volume_ratio": ratio, "flow_time": t})
        return CheckReport("essential_indicator", "tau collapses compact sets onto the photon",
                           32, int(not fires), ratio, cfg.seed, threshold=1e-2, passed=fires, details=details)
    if case == 4:
        pts = rng.normal(size=(64, n))
        img = np.stack([tau(ctx, t).apply_affine(p) for p in pts])
        diff0 = pts[:, None, :] - pts[None, :, :]
        diff1 = img[:, None, :] - img[None, :, :]
        G = ctx.minkowski_gram
        r = float(np.abs(np.einsum("abi,ij,abj->ab", diff0, G, diff0)
                         - np.einsum("abi,ij,abj->ab", diff1, G, diff1)).max())
        d0 = np.linalg.norm(diff0, axis=-1).max()
        d1 = np.linalg.norm(diff1, axis=-1).max()
        r = max(r, abs(d0 - d1))
        details.update({"interval_residual": r, "diameter_before": d0, "diameter_after": d1})
        return CheckReport("essential_indicator", "tau is an isometric translation of the chart",
                           64, int(r > 1e-9), r, cfg.seed, threshold=1e-9, passed=r <= 1e-9, details=details)
    if case == 3:
        lattice = lattice or []
        periods = []
        for g in lattice:
            if np.abs(g.w).max(initial=0.0) <= cfg.tol and np.abs(g.u[1:]).max() <= cfg.tol and abs(g.u[0]) > cfg.tol:
                periods.append(abs(float(g.u[0])))
        comm = max((float(np.abs(compose(compose(tau(ctx, 1.0), g), compose(tau(ctx, -1.0), inverse(g))).matrix
                                - np.eye(n + 2)).max()) for g in lattice), default=0.0)
        ok = bool(periods) and comm <= 1e-12
        period = min(periods) if periods else None
        details.update({"period": period, "commutator_residual": comm})
        return CheckReport("essential_indicator", "tau factors through a circle on the quotient",
                           len(lattice), int(not ok), comm, cfg.seed, threshold=1e-12, passed=ok, details=details)
    raise ValueError(f"unknown case {case}")


# --- brute-force causal oracle -------------------------------------------------


def fibonacci_sphere(m: int) -> np.ndarray:
    i = np.arange(m) + 0.5
    phi = np.arccos(1 - 2 * i / m)
    golden = math.pi * (3 - math.sqrt(5))
    th = golden * i
    return np.stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)], axis=1)


@_timed
def check_causal_oracle(cfg: SampleConfig, mesh: int = 2500, levels: int = 6, eps: float = 0.2,
                        pairs: int = 1000) -> CheckReport:
    """Breadth-first reachability on a discretised S^2 x [0, 2 pi] against relate (n = 3).

    Nodes are mesh points times theta-levels of height h = pi / levels. An edge
    joins (i, m) to (j, m + 1) when d(x_i, x_j) <= (1 + eps) h. A target at
    level m is reachable iff its hop distance from the source is at most m.
    Disagreements with the exact relation are tolerated within one cell,
    |m h - d| <= h.
    """
    ctx = FormContext(3, cfg.tol)
    rng = stream(cfg.seed, "causal_oracle")
    pts = fibonacci_sphere(mesh)
    pts = np.concatenate([pts, -pts])  # include exact antipodes
    h = math.pi / levels
    r = (1 + eps) * h
    chord = 2 * math.sin(r / 2)
    tree = cKDTree(pts)
    nbrs = tree.query_pairs(chord, output_type="ndarray")
    N = len(pts)
    adj = sparse.coo_matrix((np.ones(len(nbrs)), (nbrs[:, 0], nbrs[:, 1])), shape=(N, N)).tocsr()
    n_src = 20
    sources = rng.choice(N, size=n_src, replace=False)
    hops = shortest_path(adj, directed=False, unweighted=True, indices=sources)
    per = pairs // n_src
    disagreements = slack_used = 0
    axis_fail = anti_fail = 0
    resid = 0.0
    for s_i, src in enumerate(sources):
        targets = rng.choice(N, size=per, replace=False)
        lv = rng.integers(0, 2 * levels + 1, per)
        p = CoverPoint(pts[src], 0.0)
        for tgt, m in zip(targets, lv):
            q = CoverPoint(pts[tgt], m * h)
            rel = relate(ctx, p, q)
            exact = rel.kind in (CausalKind.CHRONOLOGICAL, CausalKind.NULL, CausalKind.EQUAL) and rel.sign >= 0
            grid = hops[s_i, tgt] <= m
            if exact != grid:
                d = float(sphere_dist(pts[src], pts[tgt]))
                gap = abs(m * h - d)
                resid = max(resid, gap)
                if gap <= h:
                    slack_used += 1
                else:
                    disagreements += 1
        # axis pairs: same sphere point at every level
        for m in range(2 * levels + 1):
            rel = relate(ctx, p, CoverPoint(pts[src], m * h))
            axis_fail += int(rel.sign < 0 or hops[s_i, src] > m)
        anti = (src + mesh) % N
        rel = relate(ctx, p, CoverPoint(pts[anti], math.pi))
        grid_anti = hops[s_i, anti] <= levels
        anti_fail += int(not (rel.kind is CausalKind.NULL and grid_anti))
    fails = disagreements + axis_fail + anti_fail
    return CheckReport(
        "causal_oracle",
        "causal futures in the cover agree with brute-force reachability on a grid",
        per * n_src, fails, resid, cfg.seed, threshold=h, passed=fails == 0,
        details={"mesh_points": N, "levels_per_pi": levels, "slope_slack": eps, "within_one_cell": slack_used,
                 "disagreements": disagreements, "axis_failures": axis_fail, "antipodal_failures": anti_fail},
    )
