"""Run configuration: JSON files validated against a shipped schema."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import ConfigError
from .holonomy import HeisenbergSpec, HolonomyCaseSpec
from .quadric import FormContext
from .unipotent import LiftedElement, from_affine
from .verify import SampleConfig

SEED_ENV = "EINKIT_SEED"


@lru_cache(maxsize=None)
def schema(name: str = "runconfig") -> dict[str, Any]:
    text = resources.files("einkit").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class GeneratorConfig:
    w: tuple[float, ...]
    u: tuple[float, ...]
    alpha_power: int = 0


@dataclass(frozen=True)
class HeisenbergConfig:
    k: int
    theta: tuple[tuple[float, ...], ...]
    scale: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    n: int
    case: int | None = None
    generators: tuple[GeneratorConfig, ...] = field(default_factory=tuple)
    heisenberg: HeisenbergConfig | None = None
    seed: int = 0
    samples: int = 10_000
    tol: float = 1e-9

    @property
    def ctx(self) -> FormContext:
        return FormContext(self.n, self.tol)

    def sample_config(self) -> SampleConfig:
        return SampleConfig(n=self.n, samples=self.samples, seed=self.seed, tol=self.tol)

    def lifted_generators(self) -> list[LiftedElement]:
        ctx = self.ctx
        return [LiftedElement(g.alpha_power, from_affine(ctx, g.w, g.u)) for g in self.generators]

    def heisenberg_spec(self) -> HeisenbergSpec | None:
        if self.heisenberg is None:
            return None
        h = self.heisenberg
        return HeisenbergSpec(h.k, np.array(h.theta, dtype=float), scale=h.scale)

    def case_spec(self) -> HolonomyCaseSpec:
        if self.case is None:
            raise ConfigError("config does not declare a case")
        return HolonomyCaseSpec(self.case, self.ctx, self.lifted_generators(), self.heisenberg_spec())


def parse_config(data: Any, env: dict[str, str] | None = None) -> RunConfig:
    """Validate a decoded JSON document and build a RunConfig.

    The seed is taken from EINKIT_SEED when that variable is set.
    """
    try:
        jsonschema.validate(data, schema("runconfig"))
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"schema: {exc.message}") from None
    n = data["n"]
    gens = []
    for i, g in enumerate(data.get("generators", [])):
        if len(g["w"]) != n - 2 or len(g["u"]) != n:
            raise ConfigError(f"generator {i}: expected w of length {n - 2} and u of length {n}")
        gens.append(GeneratorConfig(tuple(g["w"]), tuple(g["u"]), g.get("alpha_power", 0)))
    heis = None
    if data.get("heisenberg") is not None:
        h = data["heisenberg"]
        k = h["k"]
        theta = h["theta"]
        if len(theta) != 2 * k or any(len(row) != 2 * k for row in theta):
            raise ConfigError(f"heisenberg.theta must be {2 * k}x{2 * k}")
        if n != 2 * k + 2:
            raise ConfigError(f"heisenberg.k = {k} needs n = {2 * k + 2}, got n = {n}")
        heis = HeisenbergConfig(k, tuple(tuple(r) for r in theta), h.get("scale", 1.0))
    seed = data.get("seed", 0)
    env = os.environ if env is None else env
    if env.get(SEED_ENV):
        try:
            seed = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer") from None
    return RunConfig(n, data.get("case"), tuple(gens), heis, seed, data.get("samples", 10_000), data.get("tol", 1e-9))


def load_config(path: str | Path, env: dict[str, str] | None = None) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} at line {exc.lineno}") from None
    return parse_config(data, env)


def validate_reports(reports: list[dict[str, Any]]) -> None:
    jsonschema.validate(reports, schema("checkreport"))
