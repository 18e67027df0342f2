"""JSON experiment configs: loading, validation, CLI overrides.

One config file drives every subcommand; each reads only the sections it
needs (see README for the schema).  All validation failures raise
``ConfigParseError`` with the offending field path so the CLI can exit
with status 1 and a usable diagnostic.
"""

import json
from pathlib import Path

from . import posteriors, rewards
from .errors import ConfigParseError
from .simulate import BanditInstance, ExperimentConfig, PolicySpec


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigParseError(f"config file not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


def apply_overrides(config: dict, overrides) -> dict:
    """Apply ``key.path=value`` overrides; values parse as JSON, else string."""
    for item in overrides or []:
        if "=" not in item:
            raise ConfigParseError(f"override {item!r} must look like key=value")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = config
        parts = key.split(".")
        for i, part in enumerate(parts[:-1]):
            node = _descend(node, part, key, create=True)
        last = parts[-1]
        if isinstance(node, list):
            node[_list_index(last, key, len(node))] = value
        elif isinstance(node, dict):
            node[last] = value
        else:
            raise ConfigParseError(f"override {key!r} walks through a non-container")
    return config


def _descend(node, part, key, create=False):
    if isinstance(node, list):
        return node[_list_index(part, key, len(node))]
    if isinstance(node, dict):
        if part not in node and create:
            node[part] = {}
        if part not in node:
            raise ConfigParseError(f"override {key!r}: no field {part!r}")
        return node[part]
    raise ConfigParseError(f"override {key!r} walks through a non-container")


def _list_index(part, key, length):
    try:
        idx = int(part)
    except ValueError:
        raise ConfigParseError(f"override {key!r}: list index {part!r} is not an integer")
    if not 0 <= idx < length:
        raise ConfigParseError(f"override {key!r}: index {idx} out of range")
    return idx


def _require(d: dict, field: str, where: str):
    if field not in d:
        raise ConfigParseError(f"{where}: missing required field {field!r}")
    return d[field]


def build_reward_model(family: str, params, where: str = "model"):
    try:
        if family == "bernoulli":
            return rewards.Bernoulli(float(params))
        if family == "categorical":
            if isinstance(params, dict):
                return rewards.Categorical(
                    tuple(params["probs"]), tuple(params["values"]) if "values" in params else None
                )
            return rewards.Categorical(tuple(params))
        if family == "gaussian":
            if isinstance(params, dict):
                return rewards.GaussianKnownVar(float(params["mean"]), float(params.get("var", 1.0)))
            mean_val, var = params
            return rewards.GaussianKnownVar(float(mean_val), float(var))
        if family == "poisson":
            return rewards.Poisson(float(params))
    except ConfigParseError:
        raise
    except Exception as e:
        raise ConfigParseError(f"{where}: bad {family} parameters {params!r}: {e}") from e
    raise ConfigParseError(
        f"{where}: unknown family {family!r}; expected bernoulli, categorical, gaussian or poisson"
    )


def build_instance(d: dict, where: str = "instance") -> BanditInstance:
    family = _require(d, "family", where)
    params = _require(d, "params", where)
    if not isinstance(params, list) or len(params) < 2:
        raise ConfigParseError(f"{where}.params must list parameters for at least 2 arms")
    arms = tuple(build_reward_model(family, p, f"{where}.params[{i}]") for i, p in enumerate(params))
    try:
        return BanditInstance(arms, allow_ties=bool(d.get("allow_ties", False)))
    except ValueError as e:
        raise ConfigParseError(f"{where}: {e}") from e


def build_prior(d: dict, where: str = "prior") -> posteriors.PriorSpec:
    family = _require(d, "family", where)
    try:
        if family == "beta":
            return posteriors.BetaPrior(float(d.get("a0", 1.0)), float(d.get("b0", 1.0)))
        if family == "dirichlet":
            return posteriors.DirichletPrior(
                tuple(_require(d, "conc", where)),
                tuple(d["values"]) if "values" in d else None,
            )
        if family == "gaussian":
            return posteriors.GaussianPrior(
                float(d.get("mean0", 0.0)),
                float(d.get("precision0", 1.0)),
                float(d.get("likelihood_var", 1.0)),
            )
        if family == "gamma":
            return posteriors.GammaPrior(float(d.get("shape0", 1.0)), float(d.get("rate0", 1.0)))
    except ConfigParseError:
        raise
    except Exception as e:
        raise ConfigParseError(f"{where}: bad {family} prior: {e}") from e
    raise ConfigParseError(
        f"{where}: unknown prior family {family!r}; expected beta, dirichlet, gaussian or gamma"
    )


def _policy_spec(d: dict, where: str) -> PolicySpec:
    kind = _require(d, "kind", where)
    try:
        return PolicySpec(
            kind=kind,
            alpha=float(d["alpha"]) if d.get("alpha") is not None else None,
            ucbv_var_coef=float(d.get("var_coef", 2.0)),
            ucbv_bias_coef=float(d.get("bias_coef", 3.0)),
        )
    except ValueError as e:
        raise ConfigParseError(f"{where}: {e}") from e


def parse_simulate_config(d: dict) -> ExperimentConfig:
    instance = build_instance(_require(d, "instance", "config"))
    raw_policies = _require(d, "policies", "config")
    if not isinstance(raw_policies, list) or not raw_policies:
        raise ConfigParseError("config.policies must be a nonempty list")
    policies = tuple(_policy_spec(p, f"policies[{i}]") for i, p in enumerate(raw_policies))
    prior = build_prior(d["prior"]) if d.get("prior") else None
    try:
        return ExperimentConfig(
            instance=instance,
            horizon=int(_require(d, "horizon", "config")),
            replicates=int(_require(d, "replicates", "config")),
            policies=policies,
            base_seed=int(_require(d, "base_seed", "config")),
            init_pulls=int(d.get("init_pulls", 1)),
            prior=prior,
        )
    except ValueError as e:
        raise ConfigParseError(f"config: {e}") from e
