import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from einkit.causal import in_future, in_min
from einkit.cover import (
    CoverPoint,
    Region,
    alpha,
    base_point,
    chart_origin,
    diag_basis,
    lift_near,
    lift_to_patch,
    patch_index,
    project,
    project_vectors,
    sphere_dist,
    spiral_coords,
    standard_lifted_photon,
)
from einkit.errors import Ambiguous, NotInPatch
from einkit.quadric import EinPoint, FormContext, bilinear, chart_vector, quad

NS = [3, 4, 5]
angles = st.floats(-20, 20, allow_nan=False)


def cover_points(n):
    return st.builds(
        lambda v, t: CoverPoint(v / np.linalg.norm(v), t),
        st.lists(st.floats(-1, 1, allow_nan=False), min_size=n, max_size=n)
        .map(np.array)
        .filter(lambda v: np.linalg.norm(v) > 1e-3),
        angles,
    )


@pytest.mark.parametrize("n", NS)
def test_diag_basis_diagonalises(n):
    ctx = FormContext(n)
    P = diag_basis(ctx).matrix
    D = P.T @ ctx.gram @ P
    assert np.allclose(D, np.diag([-1.0, -1.0] + [1.0] * n), atol=1e-15)
    assert np.allclose(P.T @ P, np.eye(n + 2), atol=1e-15)
    B = diag_basis(ctx)
    assert quad(ctx, B.T1) == pytest.approx(-1.0)
    assert quad(ctx, B.S[:, 0]) == pytest.approx(1.0)
    assert bilinear(ctx, B.T1, B.S[:, 0]) == pytest.approx(0.0)


@pytest.mark.parametrize("n", NS)
def test_projection_is_null(n):
    ctx = FormContext(n)
    rng = np.random.default_rng(n)
    xs = rng.normal(size=(1000, n))
    xs /= np.linalg.norm(xs, axis=1)[:, None]
    v = project_vectors(ctx, xs, rng.uniform(-10, 10, 1000))
    assert np.abs(quad(ctx, v)).max() < 1e-12


@settings(max_examples=200)
@given(cover_points(4), st.integers(-5, 5))
def test_project_alpha_invariant(p, k):
    ctx = FormContext(4)
    assert project(ctx, alpha(p, k)).isclose(project(ctx, p), 1e-9)
    assert project(ctx, CoverPoint(p.x, p.theta + 2 * math.pi)).isclose(project(ctx, p), 1e-9)


@given(cover_points(4), st.integers(-4, 4), st.integers(-4, 4))
def test_alpha_group_law(p, a, b):
    q = alpha(alpha(p, a), b)
    r = alpha(p, a + b)
    assert np.allclose(q.x, r.x) and q.theta == pytest.approx(r.theta)
    back = alpha(alpha(p, 1), -1)
    assert np.allclose(back.x, p.x) and back.theta == pytest.approx(p.theta)


def test_alpha_two_is_time_shift():
    p = CoverPoint([0.6, 0.8, 0.0], 0.3)
    q = alpha(p, 2)
    assert np.allclose(q.x, p.x) and q.theta == pytest.approx(0.3 + 2 * math.pi)


def test_alpha_preserves_future():
    ctx = FormContext(4)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        xs = rng.normal(size=(2, 4))
        xs /= np.linalg.norm(xs, axis=1)[:, None]
        p, q = CoverPoint(xs[0], rng.uniform(-5, 5)), CoverPoint(xs[1], rng.uniform(-5, 5))
        k = int(rng.integers(-3, 4))
        assert in_future(ctx, p, q, strict=True) == in_future(ctx, alpha(p, k), alpha(q, k), strict=True)


@given(cover_points(3))
def test_spiral_coords(p):
    z = spiral_coords(p)
    assert np.linalg.norm(z) == pytest.approx(math.exp(p.theta))
    assert np.allclose(spiral_coords(alpha(p)), -math.exp(math.pi) * z)
    assert np.allclose(spiral_coords(CoverPoint(p.x, 0.0)), p.x)


@pytest.mark.parametrize("n", NS)
def test_lift_near_fixed_point_and_alpha(n):
    ctx = FormContext(n)
    rng = np.random.default_rng(n)
    for _ in range(200):
        x = rng.normal(size=n)
        p = CoverPoint(x / np.linalg.norm(x), rng.uniform(-8, 8))
        q = lift_near(ctx, project(ctx, p), p)
        assert q.distance(p) < 1e-9
        # reference a little beyond alpha p picks that branch
        ref = CoverPoint(alpha(p).x, alpha(p).theta + 0.1)
        assert lift_near(ctx, project(ctx, alpha(p)), ref).distance(alpha(p)) < 1e-9


def test_lift_near_loop_around_circle():
    # (cos s x0 + sin s y, s), s in [0, pi], closes up in Ein; continuing the lift ends at alpha p
    ctx = FormContext(3)
    x0, y = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    p = CoverPoint(x0, 0.0)
    ref = p
    for s in np.linspace(0, math.pi, 65)[1:]:
        q = CoverPoint(math.cos(s) * x0 + math.sin(s) * y, s)
        ref = lift_near(ctx, project(ctx, q), ref)
        assert ref.distance(q) < 1e-9
    assert project(ctx, ref).isclose(project(ctx, p), 1e-9)
    assert ref.distance(alpha(p)) < 1e-9


def test_lift_near_ambiguous():
    ctx = FormContext(3)
    p = CoverPoint([1.0, 0.0, 0.0], 0.0)
    # reference orthogonal on the sphere and halfway in theta between p and alpha p
    ref = CoverPoint([0.0, 1.0, 0.0], math.pi / 2)
    with pytest.raises(Ambiguous):
        lift_near(ctx, project(ctx, p), ref)


def test_patch_index_examples():
    ctx = FormContext(4)
    b = CoverPoint([1.0, 0.0, 0.0, 0.0], 0.0)
    assert patch_index(ctx, b, b).region is Region.LIGHTCONE_SHELL
    assert patch_index(ctx, CoverPoint(b.x, math.pi), b) == (0, Region.MIN_PLUS_EVEN)
    assert patch_index(ctx, CoverPoint(b.x, -math.pi), b) == (-1, Region.MIN_PLUS_EVEN)
    assert patch_index(ctx, CoverPoint(b.x, 2 * math.pi), b).region is Region.LIGHTCONE_SHELL
    assert patch_index(ctx, CoverPoint(-b.x, 0.0), b) == (0, Region.MIN_PLUS_ODD)


def _scan_oracle(d, delta, tol):
    """Exhaustive scan over k for the trichotomy."""
    hits = []
    kmax = int(math.ceil(abs(delta) / (2 * math.pi))) + 1
    for k in range(-kmax, kmax + 1):
        r = delta - 2 * math.pi * k
        if d + tol < r < 2 * math.pi - d - tol:
            hits.append((k, Region.MIN_PLUS_EVEN))
        if -d + tol < r < d - tol:
            hits.append((k, Region.MIN_PLUS_ODD))
    return hits


@pytest.mark.parametrize("n", NS)
def test_patch_partition_against_scan(n):
    ctx = FormContext(n)
    rng = np.random.default_rng(10 + n)
    base = CoverPoint(np.eye(n)[0], 0.3)
    for _ in range(10_000 // len(NS)):
        x = rng.normal(size=n)
        p = CoverPoint(x / np.linalg.norm(x), rng.uniform(-10, 10))
        d = float(sphere_dist(p.x, base.x))
        hits = _scan_oracle(d, p.theta - base.theta, ctx.tol)
        idx = patch_index(ctx, p, base)
        if not hits:
            assert idx.region is Region.LIGHTCONE_SHELL
            continue
        assert len(hits) == 1
        assert (idx.k, idx.region) == hits[0]
        # agrees with the causal definition of the patches
        shift = 2 * idx.k if idx.region is Region.MIN_PLUS_EVEN else 2 * idx.k - 1
        assert in_min(ctx, p, alpha(base, shift), "plus")


@pytest.mark.parametrize("n", NS)
def test_lift_to_patch(n):
    ctx = FormContext(n)
    rng = np.random.default_rng(n)
    p0 = base_point(ctx)
    for x in rng.normal(size=(300, n)):
        e = EinPoint(chart_vector(ctx, x))
        q = lift_to_patch(ctx, e, p0, "minus")
        assert in_min(ctx, q, p0, "minus")
        assert project(ctx, q).isclose(e, 1e-9)
        r = lift_to_patch(ctx, e, p0, "plus")
        assert r.distance(alpha(q)) < 1e-9
    with pytest.raises(NotInPatch):
        lift_to_patch(ctx, EinPoint(ctx.e(1)), p0)


def test_chart_origin_lies_in_min_minus():
    for n in NS:
        ctx = FormContext(n)
        o = chart_origin(ctx)
        assert in_min(ctx, o, base_point(ctx), "minus")
        assert project(ctx, o).isclose(EinPoint(ctx.e(n + 1)))


@pytest.mark.parametrize("n", NS)
def test_lifted_photon(n):
    ctx = FormContext(n)
    delta = standard_lifted_photon(ctx)
    assert delta.at(0.0).distance(base_point(ctx)) < 1e-12
    for t in np.linspace(-7, 7, 29):
        q = delta.at(t)
        assert delta.photon.contains(project(ctx, q))
        # alpha moves along the photon by pi
        assert alpha(q).distance(delta.at(t + math.pi)) < 1e-12
    # unit speed: sphere distance equals the theta increment for small steps
    assert float(sphere_dist(delta.x_at(0.0), delta.x_at(0.01))) == pytest.approx(0.01)


def test_cover_point_validation():
    with pytest.raises(ValueError):
        CoverPoint([0.0, 0.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        CoverPoint([2.0, 0.0, 0.0], 0.0)
