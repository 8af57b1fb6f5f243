"""Named groups of verification checks driven by a RunConfig."""

from __future__ import annotations

import math

import numpy as np

from .config import RunConfig
from .holonomy import HeisenbergSpec, heisenberg_lattice
from .quadric import FormContext
from .unipotent import LiftedElement, from_affine
from .verify import (
    CheckReport,
    SampleConfig,
    check_asymptotics,
    check_causal_oracle,
    check_complement,
    check_essential_indicator,
    check_min_boundary,
    check_properness,
    check_real_eigenvalue_obstruction,
    check_simply_transitive,
    check_tau_limits,
    check_tiling,
    check_unipotent_algebra,
    check_vector_fields,
)

SUITES = ("all", "causal", "case2", "case3", "fields")


def timelike_translation(ctx: FormContext) -> LiftedElement:
    """Translation of the chart by the future timelike vector e_n - e_1."""
    u = ctx.me(ctx.n) - ctx.me(1)
    return LiftedElement(0, from_affine(ctx, np.zeros(ctx.n - 2), u))


def generic_generator(ctx: FormContext) -> LiftedElement:
    """A generator with w != 0 and v_n = 1."""
    n = ctx.n
    w = np.resize([0.7, -0.4], n - 2)
    u = np.concatenate([[0.3], np.resize([0.2, -0.5], n - 2), [1.0]])
    return LiftedElement(0, from_affine(ctx, w, u))


def rotation_spec(k: int) -> HeisenbergSpec:
    """theta = block rotations by a quarter turn, scaled so the central period is 1."""
    theta = np.zeros((2 * k, 2 * k))
    for j in range(k):
        theta[2 * j, 2 * j + 1] = -1.0
        theta[2 * j + 1, 2 * j] = 1.0
    return HeisenbergSpec(k, theta, scale=1 / math.sqrt(2))


def real_eigenvalue_spec() -> HeisenbergSpec:
    return HeisenbergSpec(1, np.array([[1.0, 1.0], [0.0, -1.0]]), scale=0.5)


def causal_checks(cfg: SampleConfig) -> list[CheckReport]:
    return [
        check_complement(cfg, ns=(3, 4, 5)),
        check_min_boundary(cfg),
        check_tau_limits(cfg),
        check_unipotent_algebra(cfg),
        check_causal_oracle(cfg),
    ]


def case2_checks(cfg: SampleConfig, generators: list[LiftedElement]) -> list[CheckReport]:
    ctx = cfg.ctx
    gens = generators or [timelike_translation(ctx), generic_generator(ctx)]
    out = []
    for j, g in enumerate(gens):
        rep = check_tiling(cfg, g)
        rep.name = f"tiling_{j}"
        out.append(rep)
        if g.alpha_power == 0 and float(g.body.w @ g.body.w) > cfg.tol and abs(g.body.dee) > cfg.tol:
            rep = check_asymptotics(cfg, g.body)
            rep.name = f"asymptotics_{j}"
            out.append(rep)
    return out


def case3_checks(cfg: SampleConfig, spec: HeisenbergSpec | None) -> list[CheckReport]:
    specs = [spec] if spec is not None else [rotation_spec(1), rotation_spec(2)]
    out = []
    for s in specs:
        if s.real_eigenvalues():
            out.append(check_real_eigenvalue_obstruction(cfg, s))
            continue
        rep = check_simply_transitive(cfg, s, hyperplanes=(0.0, 1.0, -1.0))
        rep.name = f"simply_transitive_k{s.k}"
        out.append(rep)
        ctx = FormContext(s.n, cfg.tol)
        lat = heisenberg_lattice(s, ctx=ctx)
        gens = [LiftedElement(0, g) for g in [*lat.generators, lat.central]]
        out.append(check_properness(cfg, gens, label=f"k{s.k}"))
        sub = SampleConfig(s.n, cfg.samples, cfg.seed, cfg.tol, cfg.k_range, cfg.word_ball)
        rep = check_essential_indicator(sub, 3, [*lat.generators, lat.central])
        rep.name = f"essential_indicator_case3_k{s.k}"
        out.append(rep)
    if spec is None:
        out.append(check_real_eigenvalue_obstruction(cfg, real_eigenvalue_spec()))
    return out


def fields_checks(cfg: SampleConfig) -> list[CheckReport]:
    out = []
    for n in (4, 5):
        rep = check_vector_fields(cfg.with_n(n))
        rep.name = f"vector_fields_n{n}"
        out.append(rep)
    for case in (1, 2, 4):
        rep = check_essential_indicator(cfg, case)
        rep.name = f"essential_indicator_case{case}"
        out.append(rep)
    return out


def run_suite(config: RunConfig, suite: str = "all") -> list[CheckReport]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    cfg = config.sample_config()
    out: list[CheckReport] = []
    if suite in ("all", "causal"):
        out += causal_checks(cfg)
    if suite in ("all", "case2"):
        out += case2_checks(cfg, config.lifted_generators() if config.case in (None, 2) else [])
    if suite in ("all", "case3"):
        out += case3_checks(cfg, config.heisenberg_spec())
    if suite in ("all", "fields"):
        out += fields_checks(cfg)
    return out
