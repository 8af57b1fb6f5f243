import math

import numpy as np
import pytest

from einkit.cover import CoverPoint, alpha, base_point, chart_origin
from einkit.errors import Inconsistent, NonIntegral, NotInKerD, NotSpanning
from einkit.holonomy import (
    HeisenbergSpec,
    HolonomyCaseSpec,
    case_check,
    central_value,
    chronological_power,
    fundamental_domain_contains,
    heisenberg_group,
    heisenberg_lattice,
    orbit,
    theta_endomorphism,
)
from einkit.quadric import FormContext
from einkit.unipotent import LiftedElement, act, commutator_translation, from_affine, identity, tau

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def translation(ctx, u, power=0):
    return LiftedElement(power, from_affine(ctx, np.zeros(ctx.n - 2), u))


def test_theta_endomorphism_recovers_theta():
    rng = np.random.default_rng(0)
    for k in (1, 2):
        theta = rng.normal(size=(2 * k, 2 * k))
        gens = heisenberg_group(HeisenbergSpec(k, theta))
        assert np.abs(theta_endomorphism(gens) - theta).max() < 1e-10


def test_theta_endomorphism_errors():
    ctx = FormContext(4)
    with pytest.raises(NotSpanning):
        theta_endomorphism([tau(ctx, 1.0), from_affine(ctx, np.zeros(2), [0, 1, 0, 0])])
    gens = heisenberg_group(HeisenbergSpec(1, ROT))
    with pytest.raises(NotInKerD):
        theta_endomorphism(gens + [from_affine(ctx, np.zeros(2), [0, 0, 0, 1.0])])
    with pytest.raises(Inconsistent):
        theta_endomorphism(gens + [from_affine(ctx, [1.0, 0.0], [0, 5.0, 5.0, 0])])


def test_heisenberg_commutators_are_central():
    rng = np.random.default_rng(1)
    spec = HeisenbergSpec(2, rng.normal(size=(4, 4)))
    gens = heisenberg_group(spec)
    for g in gens:
        for h in gens:
            t = commutator_translation(g, h)
            assert np.abs(t[1:]).max() < 1e-12


def test_rotation_commutator_is_symplectic_pairing():
    # for g_a, g_b with u = theta(a), theta(b): commutator value <a, theta b> - <b, theta a>
    spec = HeisenbergSpec(1, ROT)
    g1, g2, _ = heisenberg_group(spec)
    a, b = np.eye(2)
    expected = a @ ROT @ b - b @ ROT @ a
    assert commutator_translation(g1, g2)[0] == pytest.approx(expected)
    assert abs(expected) == pytest.approx(2.0)


@pytest.mark.parametrize("scale, period", [(1 / math.sqrt(2), 1.0), (1.0, 2.0), (0.5, 0.5)])
def test_lattice_period(scale, period):
    lat = heisenberg_lattice(HeisenbergSpec(1, ROT, scale=scale))
    assert lat.period == pytest.approx(period)
    assert central_value(lat.central) == pytest.approx(period)
    # generators lie in H: their (ell, ubar) pairs satisfy ubar = theta ell
    assert np.abs(theta_endomorphism(lat.generators) - ROT).max() < 1e-10


def test_lattice_non_integral():
    with pytest.raises(NonIntegral):
        heisenberg_lattice(HeisenbergSpec(1, ROT), period=0.75)
    with pytest.raises(NonIntegral):
        heisenberg_lattice(HeisenbergSpec(1, ROT, scale=math.pi ** 0.25))


def test_real_eigenvalues_flag():
    assert HeisenbergSpec(1, ROT).real_eigenvalues() == []
    assert HeisenbergSpec(1, [[1.0, 1.0], [0.0, -1.0]]).real_eigenvalues() == [-1.0, 1.0]
    with pytest.raises(ValueError):
        HeisenbergSpec(1, np.eye(3))


def test_case_one():
    ctx = FormContext(4)
    ok = case_check(HolonomyCaseSpec(1, ctx, [LiftedElement(2, identity(ctx))]))
    assert ok.passed
    bad = case_check(HolonomyCaseSpec(1, ctx, [LiftedElement(0, identity(ctx))]))
    assert not bad.passed


def test_case_two():
    ctx = FormContext(4)
    timelike = translation(ctx, ctx.me(4) - ctx.me(1))
    assert case_check(HolonomyCaseSpec(2, ctx, [timelike])).passed
    null = case_check(HolonomyCaseSpec(2, ctx, [translation(ctx, ctx.me(1))]))
    assert not null.passed
    assert [c.name for c in null.conditions if not c.passed] == ["D_nonzero", "translation_timelike"]
    spacelike = translation(ctx, ctx.me(4) + ctx.me(1))
    assert not case_check(HolonomyCaseSpec(2, ctx, [spacelike])).passed
    # a non-trivial linear part lifts the timelike requirement
    generic = LiftedElement(0, from_affine(ctx, [0.7, -0.4], [0.3, 0.2, -0.5, 1.0]))
    assert case_check(HolonomyCaseSpec(2, ctx, [generic])).passed


def _case3_generators(theta, scale=1 / math.sqrt(2)):
    lat = heisenberg_lattice(HeisenbergSpec(1, theta, scale=scale))
    ctx = lat.central.ctx
    gens = [LiftedElement(0, g) for g in lat.generators] + [LiftedElement(0, lat.central)]
    return ctx, gens + [LiftedElement(1, identity(ctx))]


def test_case_three():
    ctx, gens = _case3_generators(ROT)
    assert case_check(HolonomyCaseSpec(3, ctx, gens)).passed
    ctx, gens = _case3_generators(np.array([[1.0, 1.0], [0.0, -1.0]]), scale=0.5)
    rep = case_check(HolonomyCaseSpec(3, ctx, gens))
    assert not rep.passed
    assert [c.name for c in rep.conditions if not c.passed] == ["theta_no_real_eigenvalues"]


def test_case_three_needs_even_n():
    ctx = FormContext(5)
    gens = [LiftedElement(0, tau(ctx, 1.0)), LiftedElement(1, identity(ctx))]
    rep = case_check(HolonomyCaseSpec(3, ctx, gens))
    assert not rep.passed and not rep.conditions[0].passed


def test_case_four_and_unknown():
    ctx = FormContext(4)
    assert case_check(HolonomyCaseSpec(4, ctx, [translation(ctx, ctx.me(2))])).passed
    assert not case_check(HolonomyCaseSpec(4, ctx, [translation(ctx, ctx.me(2), 1)])).passed
    assert not case_check(HolonomyCaseSpec(7, ctx, [])).passed


def test_fundamental_domain_examples():
    ctx = FormContext(4)
    gamma = translation(ctx, ctx.me(4) - ctx.me(1))
    q0 = chart_origin(ctx)
    assert fundamental_domain_contains(ctx, q0, gamma, q0) == "boundary"
    inner = CoverPoint(q0.x, q0.theta + 0.05)
    assert fundamental_domain_contains(ctx, q0, gamma, inner) == "interior"
    assert fundamental_domain_contains(ctx, q0, gamma, act(gamma, inner)) == "outside"
    assert fundamental_domain_contains(ctx, q0, gamma, alpha(q0, -1)) == "outside"


def test_chronological_power():
    ctx = FormContext(4)
    q0 = chart_origin(ctx)
    assert chronological_power(translation(ctx, ctx.me(4) - ctx.me(1)), q0) == 1
    assert chronological_power(translation(ctx, ctx.me(1) - ctx.me(4)), q0) == -1
    assert chronological_power(translation(ctx, ctx.me(2)), q0, max_power=4) == 0


def test_orbit_homomorphism():
    ctx = FormContext(4)
    gamma = LiftedElement(0, from_affine(ctx, [0.7, -0.4], [0.3, 0.2, -0.5, 1.0]))
    q0 = chart_origin(ctx)
    assert orbit(gamma, q0, 0).distance(q0) < 1e-12
    for i, j in [(1, 2), (3, -1), (-2, -2), (5, 0)]:
        assert orbit(gamma, q0, i + j).distance(act(gamma.power(i), orbit(gamma, q0, j))) < 1e-8


def test_timelike_orbit_approaches_alpha_p0():
    ctx = FormContext(4)
    gamma = translation(ctx, ctx.me(4) - ctx.me(1))
    q = orbit(gamma, chart_origin(ctx), 10_000)
    assert abs(q.theta - (base_point(ctx).theta + math.pi)) < 1e-2
