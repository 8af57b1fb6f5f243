"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Sample sizes and tolerances are the production ones (10^4 samples, seed 0).
"""

import json

import numpy as np
import pytest

from einkit.cli import main
from einkit.quadric import FormContext
from einkit.suite import generic_generator, real_eigenvalue_spec, rotation_spec, timelike_translation
from einkit.unipotent import LiftedElement, from_affine
from einkit.verify import (
    SampleConfig,
    check_asymptotics,
    check_causal_oracle,
    check_complement,
    check_min_boundary,
    check_real_eigenvalue_obstruction,
    check_simply_transitive,
    check_tau_limits,
    check_tiling,
    check_unipotent_algebra,
    check_vector_fields,
)

CFG = SampleConfig(n=4, samples=10_000, seed=0, tol=1e-9)


@pytest.fixture
def report(capsys):
    def emit(k: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {k}: {title} [{detail}]")
        assert ok, detail

    return emit


def test_criterion_1_complement(report):
    rep = check_complement(CFG, ns=(3, 4, 5))
    per_n = rep.details["per_n"]
    ok = (rep.samples == 3 * 10_000 and rep.failures == 0 and rep.details["skipped_fraction"] < 0.01
          and all(v["failures"] == 0 for v in per_n.values()))
    report(1, "complement identities for n = 3, 4, 5", ok,
           f"failures={rep.failures} skipped_fraction={rep.details['skipped_fraction']:.2e}")


def test_criterion_2_patches(report):
    rep = check_min_boundary(CFG)
    ok = rep.passed and rep.failures == 0 and rep.samples >= 10_000
    report(2, "patch identities and Min+(p) = Min-(alpha p)", ok, f"failures={rep.details['failures']}")


def test_criterion_3_tau_flow(report):
    rep = check_tau_limits(CFG, per_side=1000, t=1e3)
    d = rep.details
    ok = (d["exp_residual"] < 1e-10 and d["max_limit_distance"] <= 1e-2
          and all(s["failures"] == 0 for s in d["limits"].values())
          and d["orientation"]["positive_pairings"] == 0 and d["orientation"]["nonzero_on_photon"] == 0)
    report(3, "tau matrix, limits at t = 1e3 within 1e-2, time orientation", ok,
           f"exp_residual={d['exp_residual']:.1e} max_limit_distance={d['max_limit_distance']:.3e} "
           f"failures={ {k: v['failures'] for k, v in d['limits'].items()} }")


def test_criterion_4_unipotent_algebra(report):
    rep = check_unipotent_algebra(CFG, elements=1000, triples=100)
    ok = rep.passed and rep.failures == 0
    report(4, "chart conjugation, linear action, commutator, lift homomorphism", ok,
           f"max_residual={rep.max_residual:.1e}")


def test_criterion_5_case2(report):
    ctx = FormContext(4)
    lines, ok = [], True
    for label, g in (("timelike", timelike_translation(ctx)), ("generic", generic_generator(ctx))):
        rep = check_tiling(CFG, g)
        d = rep.details
        good = rep.passed and d["multiplicity_failures"] == 0 and d["coverage"] >= 0.999
        ok &= good
        lines.append(f"{label}: coverage={d['coverage']:.4f} multiplicity={d['multiplicity_failures']}")
    asym = check_asymptotics(CFG, generic_generator(ctx).body)
    ok &= asym.passed and asym.details["relative_error"] < 0.01
    lines.append(f"cubic coefficient rel_err={asym.details['relative_error']:.1e}")
    null = check_tiling(CFG, LiftedElement(0, from_affine(ctx, np.zeros(2), ctx.me(1))))
    ok &= null.details["coverage_failures"] > 0 and not null.passed
    lines.append(f"null control coverage_failures={null.details['coverage_failures']}")
    report(5, "case 2 tiling, cubic growth, null negative control", ok, "; ".join(lines))


def test_criterion_6_case3(report):
    lines, ok = [], True
    for k in (1, 2):
        rep = check_simply_transitive(CFG, rotation_spec(k), hyperplanes=(0.0, 1.0, -1.0), pairs=1000)
        ok &= rep.passed and rep.max_residual < 1e-9
        lines.append(f"k={k}: max_residual={rep.max_residual:.1e}")
    obs = check_real_eigenvalue_obstruction(CFG, real_eigenvalue_spec())
    ok &= obs.passed
    lines.append(f"real eigenvalue counts on H_1: {obs.details['counts_H_1']}")
    report(6, "simply transitive Heisenberg action and real-eigenvalue obstruction", ok, "; ".join(lines))


def test_criterion_7_vector_fields(report):
    lines, ok = [], True
    for n in (4, 5):
        rep = check_vector_fields(CFG.with_n(n))
        d = rep.details
        good = (rep.passed and d["extension"]["monotone_failures"] == 0
                and d["bracket_residual"] < 1e-5 and d["invariance_residual"] < 1e-7)
        ok &= good
        lines.append(f"n={n}: bracket={d['bracket_residual']:.1e} invariance={d['invariance_residual']:.1e}")
    report(7, "leafwise vector fields", ok, "; ".join(lines))


def test_criterion_8_causal_oracle(report):
    rep = check_causal_oracle(SampleConfig(n=3, samples=10_000, seed=0))
    ok = rep.passed and rep.details["disagreements"] == 0
    report(8, "grid reachability agrees with the causal relation for n = 3", ok,
           f"disagreements={rep.details['disagreements']} within_one_cell={rep.details['within_one_cell']}")


def test_criterion_9_determinism(report, tmp_path, monkeypatch):
    monkeypatch.delenv("EINKIT_SEED", raising=False)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 4, "case": 2, "seed": 5, "samples": 2000}))
    blobs = {}
    for run in range(2):
        out = tmp_path / f"run{run}"
        out.mkdir()
        main(["verify", str(cfg), "--suite", "case2", "--json", str(out / "case2.json")])
        main(["verify", str(cfg), "--suite", "fields", "--json", str(out / "fields.json")])
        for kind in ("photon", "lightcone", "domain"):
            main(["figure", "--kind", kind, "--out", str(out / f"{kind}.svg")])
        blobs[run] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    same = [name for name in blobs[0] if blobs[0][name] == blobs[1].get(name)]
    ok = len(same) == len(blobs[0]) == 5
    report(9, "byte-identical JSON reports and SVG figures across runs", ok, f"identical={same}")
