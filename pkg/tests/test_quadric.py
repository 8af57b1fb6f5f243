import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from einkit.errors import NotInPatch, NotNull, OnPhoton
from einkit.quadric import (
    CausalType,
    EinPoint,
    FormContext,
    Photon,
    bilinear,
    canonical_rep,
    causal_type,
    chart_inverse,
    lightcone_inverse,
    minkowski_chart,
    on_lightcone,
    param_lightcone,
    quad,
    rho_bar,
    standard_photon,
)

NS = [3, 4, 5, 6]
finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("n", NS)
def test_gram_signature(n):
    ctx = FormContext(n)
    ev = np.linalg.eigvalsh(ctx.gram)
    assert (ev > 0).sum() == n and (ev < 0).sum() == 2
    ev = np.linalg.eigvalsh(ctx.minkowski_gram)
    assert (ev > 0).sum() == n - 1 and (ev < 0).sum() == 1


def test_rejects_small_n():
    with pytest.raises(ValueError):
        FormContext(2)


@pytest.mark.parametrize("n", NS)
def test_bilinear_basis_values(n):
    ctx = FormContext(n)
    assert bilinear(ctx, ctx.e(0), ctx.e(n + 1)) == 1.0
    assert bilinear(ctx, ctx.e(1), ctx.e(n)) == 1.0
    assert bilinear(ctx, ctx.e(2), ctx.e(2)) == 1.0
    assert bilinear(ctx, ctx.e(0), ctx.e(0)) == 0.0


@given(arrays(float, 6, elements=finite), arrays(float, 6, elements=finite))
def test_bilinear_symmetric_and_polar(u, v):
    ctx = FormContext(4)
    assert bilinear(ctx, u, v) == pytest.approx(bilinear(ctx, v, u))
    lhs = quad(ctx, u + v) - quad(ctx, u) - quad(ctx, v)
    assert lhs == pytest.approx(2 * bilinear(ctx, u, v), abs=1e-9)
    # q_{n,2}(x) = 2 x_0 x_{n+1} + 2 x_1 x_n + sum of squares
    assert quad(ctx, u) == pytest.approx(2 * u[0] * u[5] + 2 * u[1] * u[4] + u[2] ** 2 + u[3] ** 2, abs=1e-9)


@pytest.mark.parametrize(
    "vec, kind",
    [
        ([1, 0, 0, 0], CausalType.NULL),
        ([0, 1, 0, 0], CausalType.SPACELIKE),
        ([-1, 0, 0, 1], CausalType.TIMELIKE),
        ([1, 0, 0, 1], CausalType.SPACELIKE),
        ([0, 0, 0, 0], CausalType.NULL),
    ],
)
def test_causal_type(vec, kind):
    assert causal_type(FormContext(4), np.array(vec, float)) is kind


@pytest.mark.parametrize("n", NS)
def test_chart_examples(n):
    ctx = FormContext(n)
    assert minkowski_chart(ctx, np.zeros(n)).isclose(EinPoint(ctx.e(n + 1)))
    expected = np.zeros(n + 2)
    expected[1] = expected[n + 1] = 1.0
    assert minkowski_chart(ctx, ctx.me(1)).isclose(EinPoint(expected))
    assert np.allclose(chart_inverse(ctx, EinPoint(ctx.e(n + 1))), 0)
    with pytest.raises(NotInPatch):
        chart_inverse(ctx, EinPoint(ctx.e(0)))


@pytest.mark.parametrize("n", NS)
def test_chart_round_trip_and_null(n):
    ctx = FormContext(n)
    rng = np.random.default_rng(n)
    xs = rng.normal(size=(1000, n))
    for x in xs:
        p = minkowski_chart(ctx, x)
        assert abs(quad(ctx, p.rep)) < 1e-12
        assert np.abs(chart_inverse(ctx, p) - x).max() < 1e-12 * max(1.0, np.abs(x).max() ** 2)
        # chart points are never on the lightcone of [e_0]
        assert not on_lightcone(ctx, EinPoint(ctx.e(0)), p)


def test_on_lightcone_examples():
    ctx = FormContext(4)
    p0 = EinPoint(ctx.e(0))
    assert on_lightcone(ctx, p0, EinPoint(ctx.e(1)))
    assert not on_lightcone(ctx, p0, EinPoint(ctx.e(5)))


@given(arrays(float, 5, elements=finite).filter(lambda v: np.abs(v).max() > 1e-3))
def test_canonical_rep_idempotent_and_sign_stable(v):
    r = canonical_rep(v)
    assert np.allclose(canonical_rep(r), r)
    assert np.allclose(canonical_rep(-3.0 * v), r)
    assert np.linalg.norm(r) == pytest.approx(1.0)


def test_einpoint_validation():
    ctx = FormContext(4)
    with pytest.raises(NotNull):
        EinPoint.from_vector(ctx, ctx.e(0) + ctx.e(5))
    with pytest.raises(ValueError):
        EinPoint.from_vector(ctx, np.zeros(6))
    assert EinPoint.from_vector(ctx, -2 * ctx.e(0)).isclose(EinPoint(ctx.e(0)))


def test_rho_bar_examples():
    ctx = FormContext(4)
    ph = standard_photon(ctx)
    assert rho_bar(ctx, ph, EinPoint(ctx.e(5))).isclose(EinPoint(ctx.e(1)))
    with pytest.raises(OnPhoton):
        rho_bar(ctx, ph, EinPoint(ctx.e(0) + ctx.e(1)))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_rho_bar_fibre_property(n):
    ctx = FormContext(n)
    ph = standard_photon(ctx)
    rng = np.random.default_rng(0)
    for x in rng.normal(size=(1000, n)):
        p = minkowski_chart(ctx, x)
        q = rho_bar(ctx, ph, p)
        assert ph.contains(q)
        assert on_lightcone(ctx, q, p)


def test_rho_bar_basis_independent():
    ctx = FormContext(4)
    a, b = ctx.e(0), ctx.e(1)
    ph1 = Photon.span(ctx, a, b)
    ph2 = Photon.span(ctx, a + 2 * b, 3 * a - b)
    rng = np.random.default_rng(1)
    for x in rng.normal(size=(200, 4)):
        p = minkowski_chart(ctx, x)
        assert rho_bar(ctx, ph1, p).isclose(rho_bar(ctx, ph2, p), 1e-9)


def test_rho_bar_constant_on_fibres():
    # for q = cos(phi) e_0 + sin(phi) e_1, B(iota(x), q) = cos(phi) + sin(phi) x_n,
    # so chart points with x_n = -cot(phi) lie on L(q) off the photon
    ctx = FormContext(4)
    ph = standard_photon(ctx)
    rng = np.random.default_rng(2)
    for phi in rng.uniform(0.3, np.pi - 0.3, 200):
        q = np.cos(phi) * ctx.e(0) + np.sin(phi) * ctx.e(1)
        x = rng.normal(size=4)
        x[-1] = -1.0 / np.tan(phi)
        p = minkowski_chart(ctx, x)
        assert on_lightcone(ctx, EinPoint(q), p)
        assert rho_bar(ctx, ph, p).isclose(EinPoint(q), 1e-9)


def test_lightcone_intersection_is_photon():
    # L([e_0]) & L([e_1]) is {x_{n+1} = 0 = x_n}; there q reduces to |y|^2, so the null
    # vectors are exactly those of span{e_0, e_1}
    ctx = FormContext(4)
    rng = np.random.default_rng(3)
    ph = standard_photon(ctx)
    for _ in range(100):
        v = np.zeros(6)
        v[:4] = rng.normal(size=4)
        assert quad(ctx, v) == pytest.approx(v[2] ** 2 + v[3] ** 2)
        v[2:4] = 0.0
        assert quad(ctx, v) == 0.0
        assert ph.contains(EinPoint(v))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_param_lightcone(n):
    ctx = FormContext(n)
    assert param_lightcone(ctx, 0.0, np.zeros(n - 2)).isclose(EinPoint(ctx.e(n)))
    rng = np.random.default_rng(n)
    p0 = EinPoint(ctx.e(0))
    ph = standard_photon(ctx)
    pts = []
    for _ in range(1000):
        t, y = rng.normal(), rng.normal(size=n - 2)
        p = param_lightcone(ctx, t, y)
        assert on_lightcone(ctx, p0, p)
        assert not ph.contains(p)
        t2, y2 = lightcone_inverse(ctx, p)
        assert abs(t2 - t) < 1e-10 and np.abs(y2 - y).max() < 1e-10
        pts.append(p.rep)
    pts = np.array(pts)
    # injectivity: distinct parameters give distinct points
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1) + np.eye(len(pts))
    assert d.min() > 1e-8


@settings(max_examples=50)
@given(st.integers(3, 7))
def test_photon_span_orthonormal(n):
    ctx = FormContext(n)
    ph = standard_photon(ctx)
    assert abs(ph.u @ ph.v) < 1e-12
    assert np.linalg.norm(ph.u) == pytest.approx(1.0)
    with pytest.raises(NotNull):
        Photon.span(ctx, ctx.e(0), ctx.e(n + 1))
