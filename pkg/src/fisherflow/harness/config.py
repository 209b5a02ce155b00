"""Experiment configuration: defaults, JSON config files, and flag overrides.

Precedence is fixed: built-in defaults, then the config file, then
command-line flags.  Every malformed value raises ConfigError, which the
CLI maps to exit code 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError

MODEL_NAMES = ("full", "product", "tied")
BAYESNET_PREFIX = "bayesnet:"
# Canonical objective spellings, keyed by lower-case form.
_OBJECTIVES = {
    "kl_visible": "kl_visible",
    "dist_to_q": "dist_to_Q",
    "dq": "dq",
    "elbo": "elbo",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by the invariance suite and the trajectory runner.

    ``target`` is the visible target distribution: the string "random"
    (drawn from the seeded generator) or an explicit probability vector.
    ``q_init`` fixes the recognition distribution for the elbo/dq
    objectives: "projection" (project the initial point onto the data
    manifold) or an explicit joint probability vector.
    """

    nv: int = 3
    nh: int = 4
    model: str = "full"
    objective: str = "elbo"
    seed: int = 0
    step: float = 0.01
    iters: int = 1000
    tol: float = 1e-8
    target: str | tuple[float, ...] = "random"
    q_init: str | tuple[float, ...] = "projection"


def _require_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(f"'{name}' must be an integer, got {value!r}")
    return int(value)


def _require_real(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating)):
        raise ConfigError(f"'{name}' must be a number, got {value!r}")
    return float(value)


def _check_vector(name: str, value) -> tuple[float, ...]:
    try:
        vec = tuple(float(x) for x in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{name}' must be a probability vector") from exc
    if len(vec) < 2 or any(x <= 0.0 for x in vec):
        raise ConfigError(f"'{name}' entries must be positive (length >= 2)")
    total = sum(vec)
    if abs(total - 1.0) > 1e-6:
        raise ConfigError(f"'{name}' sums to {total!r}, expected 1")
    return vec


def validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """Normalize and range-check a config; returns the canonical form."""
    nv = _require_int("nv", cfg.nv)
    nh = _require_int("nh", cfg.nh)
    if nv < 2 or nh < 2:
        raise ConfigError(f"nv and nh must be >= 2, got {nv}, {nh}")
    seed = _require_int("seed", cfg.seed)
    iters = _require_int("iters", cfg.iters)
    if iters < 1:
        raise ConfigError(f"iters must be >= 1, got {iters}")
    step = _require_real("step", cfg.step)
    if step <= 0.0:
        raise ConfigError(f"step must be positive, got {step}")
    tol = _require_real("tol", cfg.tol)
    if tol <= 0.0:
        raise ConfigError(f"tol must be positive, got {tol}")

    if not isinstance(cfg.model, str):
        raise ConfigError(f"'model' must be a string, got {cfg.model!r}")
    model = cfg.model.strip()
    if model not in MODEL_NAMES and not model.startswith(BAYESNET_PREFIX):
        raise ConfigError(
            f"unknown model {model!r}; expected one of {MODEL_NAMES} "
            f"or '{BAYESNET_PREFIX}<file>'"
        )
    if model.startswith(BAYESNET_PREFIX) and not model[len(BAYESNET_PREFIX) :]:
        raise ConfigError("'bayesnet:' needs a file path after the colon")

    if not isinstance(cfg.objective, str):
        raise ConfigError(f"'objective' must be a string, got {cfg.objective!r}")
    objective = _OBJECTIVES.get(cfg.objective.strip().lower())
    if objective is None:
        raise ConfigError(
            f"unknown objective {cfg.objective!r}; expected one of "
            f"{sorted(set(_OBJECTIVES.values()))}"
        )

    target = cfg.target
    if isinstance(target, str):
        if target != "random":
            raise ConfigError(f"'target' must be \"random\" or a vector, got {target!r}")
    else:
        target = _check_vector("target", target)

    q_init = cfg.q_init
    if isinstance(q_init, str):
        if q_init != "projection":
            raise ConfigError(
                f"'q_init' must be \"projection\" or a vector, got {q_init!r}"
            )
    else:
        q_init = _check_vector("q_init", q_init)

    return ExperimentConfig(
        nv=nv,
        nh=nh,
        model=model,
        objective=objective,
        seed=seed,
        step=step,
        iters=iters,
        tol=tol,
        target=target,
        q_init=q_init,
    )


_FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def _apply(cfg: ExperimentConfig, values: dict, origin: str) -> ExperimentConfig:
    unknown = set(values) - set(_FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown {origin} keys: {sorted(unknown)}")
    cleaned = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
    return replace(cfg, **cleaned)


def load_config_file(path) -> dict:
    """Raw key/value pairs from a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    return doc


def build_config(
    config_path: str | Path | None = None, overrides: dict | None = None
) -> ExperimentConfig:
    """Defaults, overlaid with a config file, overlaid with flag overrides."""
    cfg = ExperimentConfig()
    if config_path is not None:
        cfg = _apply(cfg, load_config_file(config_path), "config-file")
    if overrides:
        cfg = _apply(cfg, overrides, "override")
    return validate_config(cfg)
