"""JSON experiment configuration: schema, validation and conversion.

Example::

    {
      "scenario": {
        "framework": "two_sample", "n": 500, "m": 500,
        "gen_y": {"type": "gaussian", "mean": 0, "std": 0.1, "dim": 50},
        "gen_z": {"type": "gaussian", "mean": 0, "std": 0.1, "dim": 50},
        "attack": {"type": "replace", "target": "first_sample",
                   "gen": {"type": "gaussian", "mean": 1000, "std": 0.1, "dim": 50}}
      },
      "tests": [
        {"name": "dcmmd", "procedure": "dc", "kind": "mmd", "r": 100, "permutations": 100}
      ],
      "corruption_grid": [0, 100, 200],
      "repetitions": 100,
      "base_seed": 0
    }
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from robustkern.corruption import GaussianIID, GeometricIID, PairCoupling, ReplaceWithGenerator
from robustkern.errors import ConfigError
from robustkern.harness import ExperimentSpec, Scenario, TestSpec
from robustkern.kernels import KernelSpec
from robustkern.statistics import HSIC, MMD
from robustkern.testing import TestConfig

_BANDWIDTH = {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "median"}]}
_KERNEL = {"enum": ["gaussian", "laplace"]}
_COUNT = {"type": "integer", "minimum": 0}
_POSITIVE = {"type": "integer", "minimum": 1}

_GENERATOR = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "gaussian"},
                "mean": {"type": "number"},
                "std": {"type": "number", "exclusiveMinimum": 0},
                "dim": _POSITIVE,
            },
            "required": ["type", "std", "dim"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "geometric"},
                "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "dim": _POSITIVE,
            },
            "required": ["type", "p", "dim"],
            "additionalProperties": False,
        },
    ]
}

_ATTACK = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "replace"},
                "target": {"enum": ["first_sample", "second_sample", "pairs"]},
                "gen": _GENERATOR,
                "random_indices": {"type": "boolean"},
            },
            "required": ["type", "gen"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "pair_coupling"},
                "rule": {"enum": ["gaussian_mixture", "geometric_shift"]},
                "dim": _POSITIVE,
                "center": {"type": "number"},
                "std": {"type": "number", "exclusiveMinimum": 0},
                "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "shift": {"type": "number"},
                "noise_std": {"type": "number", "exclusiveMinimum": 0},
                "random_indices": {"type": "boolean"},
            },
            "required": ["type", "rule", "dim"],
            "additionalProperties": False,
        },
    ]
}

_TEST = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "procedure": {"enum": ["classical", "dc", "dp"]},
        "kind": {"enum": ["mmd", "hsic"]},
        "kernel": _KERNEL,
        "bandwidth": _BANDWIDTH,
        "kernel_z": _KERNEL,
        "bandwidth_z": _BANDWIDTH,
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "beta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "r": _COUNT,
        "permutations": _POSITIVE,
        "epsilon": {"anyOf": [{"type": "number", "exclusiveMinimum": 0}, {"type": "null"}]},
    },
    "required": ["name", "procedure", "kind"],
    "additionalProperties": False,
}

EXPERIMENT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "scenario": {
            "type": "object",
            "properties": {
                "framework": {"enum": ["two_sample", "independence"]},
                "n": {"type": "integer", "minimum": 2},
                "m": {"type": "integer", "minimum": 2},
                "gen_y": _GENERATOR,
                "gen_z": _GENERATOR,
                "attack": _ATTACK,
            },
            "required": ["framework", "n", "gen_y", "gen_z", "attack"],
            "additionalProperties": False,
        },
        "tests": {"type": "array", "items": _TEST, "minItems": 1},
        "corruption_grid": {"type": "array", "items": _COUNT, "minItems": 1},
        "repetitions": _POSITIVE,
        "base_seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    },
    "required": ["scenario", "tests", "corruption_grid", "repetitions"],
    "additionalProperties": False,
}


def _path(error) -> str:
    parts = [str(p) for p in error.absolute_path]
    return "/".join(parts) or "<root>"


def validate(raw: dict) -> None:
    """Raise ConfigError naming the key path of every schema violation."""
    validator = jsonschema.Draft202012Validator(EXPERIMENT_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        lines = [f"{_path(e)}: {e.message}" for e in errors]
        raise ConfigError("invalid experiment config:\n  " + "\n  ".join(lines))


def _generator(d: dict):
    if d["type"] == "gaussian":
        return GaussianIID(float(d.get("mean", 0.0)), float(d["std"]), int(d["dim"]))
    return GeometricIID(float(d["p"]), int(d["dim"]))


def _attack(d: dict):
    d = dict(d)
    kind = d.pop("type")
    if kind == "replace":
        return ReplaceWithGenerator(
            _generator(d["gen"]), d.get("target", "first_sample"), 0, d.get("random_indices", False)
        )
    return PairCoupling(**d)


def _kernel(family, bandwidth) -> KernelSpec:
    return KernelSpec(family, None if bandwidth in (None, "median") else float(bandwidth))


def _test(d: dict) -> TestSpec:
    ky = _kernel(d.get("kernel", "gaussian"), d.get("bandwidth", "median"))
    if d["kind"] == "mmd":
        kind = MMD(ky)
    else:
        kz = _kernel(d.get("kernel_z", d.get("kernel", "gaussian")), d.get("bandwidth_z", "median"))
        kind = HSIC(ky, kz)
    cfg = TestConfig(
        alpha=d.get("alpha", 0.05),
        r=d.get("r", 0),
        num_permutations=d.get("permutations", 500),
        epsilon=d.get("epsilon"),
        beta=d.get("beta"),
    )
    if d["procedure"] == "classical" and cfg.r != 0:
        raise ConfigError(f"tests/{d['name']}: classical test requires r = 0")
    if d["procedure"] == "dp":
        cfg.resolved_epsilon()
    return TestSpec(d["name"], d["procedure"], kind, cfg)


def experiment_from_dict(raw: dict) -> ExperimentSpec:
    validate(raw)
    sc = raw["scenario"]
    scenario = Scenario(
        sc["framework"],
        sc["n"],
        _generator(sc["gen_y"]),
        _generator(sc["gen_z"]),
        _attack(sc["attack"]),
        sc.get("m"),
    )
    for t in raw["tests"]:
        if (t["kind"] == "mmd") != (sc["framework"] == "two_sample"):
            raise ConfigError(f"tests/{t['name']}: kind {t['kind']!r} does not match framework {sc['framework']!r}")
    return ExperimentSpec(
        scenario,
        tuple(_test(t) for t in raw["tests"]),
        tuple(raw["corruption_grid"]),
        raw["repetitions"],
        raw.get("base_seed", 0),
    )


def load_experiment(path) -> ExperimentSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return experiment_from_dict(raw)
