"""Command-line front end.

Subcommands: simulate, bounds, concentration, divergence, prior-mass.
Every subcommand takes --config (JSON), --output-dir, and repeatable
--set key.path=value overrides that beat file values.  Exit status:
0 success, 1 config error, 2 failed verification (a concentration or
prior-mass check with holds=false).
"""

import argparse
import itertools
import os
import sys
from pathlib import Path

from . import __version__, analysis, artifacts
from .config import (
    build_reward_model,
    apply_overrides,
    build_instance,
    build_prior,
    load_config,
    parse_simulate_config,
)
from .errors import AlphaBanditsError, ConfigParseError
from .rewards import GaussianKnownVar, renyi_divergence, renyi_quadrature_oracle, kl_divergence
from .simulate import aggregate, run_experiment

R0_CAVEAT = (
    "note: the r0 constant in these bounds is configured, not derived; "
    "treat r0-dependent values as shapes rather than certified constants"
)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("ALPHA_BANDITS_THREADS")
    return int(env) if env else 1


def _load(args) -> dict:
    return apply_overrides(load_config(args.config), args.set)


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(d: dict, field: str, where: str):
    if field not in d:
        raise ConfigParseError(f"{where}: missing required field {field!r}")
    return d[field]


def cmd_simulate(args) -> int:
    cfg = _load(args)
    experiment = parse_simulate_config(cfg)
    out = _outdir(args)
    traces = run_experiment(experiment, n_jobs=_threads(args))
    summaries = aggregate(traces, artifacts.SUMMARY_PERCENTILES)
    artifacts.write_traces_csv(out / "traces.csv", traces)
    artifacts.write_summary_csv(out / "summary.csv", summaries)
    artifacts.write_manifest(
        out / "manifest.json", cfg, experiment, __version__,
        ["traces.csv", "summary.csv"],
    )
    print(
        f"simulate: {len(traces)} traces "
        f"({len(experiment.policies)} policies x {experiment.replicates} replicates, "
        f"T={experiment.horizon}) -> {out}"
    )
    return 0


def cmd_bounds(args) -> int:
    cfg = _load(args)
    section = cfg.get("analysis", {})
    instance = build_instance(cfg["instance"]) if "instance" in cfg else None
    if "gaps" in cfg:
        gaps = tuple(float(g) for g in cfg["gaps"])
    elif instance is not None:
        gaps = tuple(float(g) for g in instance.gaps if g > 0)
    else:
        raise ConfigParseError("config: bounds needs either 'gaps' or 'instance'")
    try:
        inputs = analysis.BoundInputs(
            gaps=gaps,
            horizon=int(_require(cfg, "horizon", "config")),
            alpha=float(_require(section, "alpha", "config.analysis")),
            D=float(section.get("D", 1.0)),
            r0=float(section.get("r0", 1.0)),
        )
        report = analysis.bound_report(inputs, instance)
    except (ValueError, AlphaBanditsError) as e:
        raise ConfigParseError(f"config: {e}") from e
    out = _outdir(args)
    artifacts.write_json(out / "bounds.json", report.to_dict())
    print(R0_CAVEAT)
    print(
        f"bounds: c_alpha={report.c_alpha:.6g} thm1={report.thm1_bound:.6g} "
        f"thm2={report.thm2_bound:.6g} thm3={report.thm3_bound:.6g} -> {out / 'bounds.json'}"
    )
    return 0


def _as_list(value):
    return value if isinstance(value, list) else [value]


def cmd_concentration(args) -> int:
    cfg = _load(args)
    section = _require(cfg, "concentration", "config")
    prior = build_prior(_require(section, "prior", "config.concentration"))
    true_cfg = _require(section, "true", "config.concentration")
    true_model = build_reward_model(
        _require(true_cfg, "family", "config.concentration.true"),
        _require(true_cfg, "param", "config.concentration.true"),
        "config.concentration.true",
    )
    try:
        mc = analysis.MonteCarloSettings(
            outer=int(section.get("outer", 500)),
            inner=int(section.get("inner", 5000)),
            seed=int(section.get("seed", 0)),
            n_jobs=_threads(args),
        )
    except ValueError as e:
        raise ConfigParseError(f"config.concentration: {e}") from e
    alphas = _as_list(_require(section, "alpha", "config.concentration"))
    nablas = _as_list(_require(section, "nabla", "config.concentration"))
    ns = _as_list(_require(section, "n", "config.concentration"))
    d_const = float(section.get("D", 1.0))

    rows = []
    all_hold = True
    for alpha, nabla, n in itertools.product(alphas, nablas, ns):
        try:
            res = analysis.verify_concentration(
                prior, true_model, float(alpha), float(nabla), int(n), mc, D=d_const
            )
        except (ValueError, AlphaBanditsError) as e:
            raise ConfigParseError(f"config.concentration: {e}") from e
        rows.append((float(alpha), float(nabla), int(n), res))
        all_hold = all_hold and res.holds
        status = "PASS" if res.holds else "FAIL"
        print(
            f"{status} alpha={alpha} nabla={nabla} n={n} "
            f"empirical={res.empirical:.6g} bound={res.bound:.6g} mc_se={res.mc_se:.3g}"
        )

    out = _outdir(args)
    with open(out / "concentration.csv", "w", newline="") as f:
        f.write("alpha,nabla,n,empirical,bound,mc_se,holds\n")
        for alpha, nabla, n, res in rows:
            f.write(
                f"{alpha!r},{nabla!r},{n},{res.empirical!r},{res.bound!r},"
                f"{res.mc_se!r},{str(res.holds).lower()}\n"
            )
    return 0 if all_hold else 2


def cmd_divergence(args) -> int:
    cfg = _load(args)
    section = _require(cfg, "divergence", "config")
    family = _require(section, "family", "config.divergence")
    model_a = build_reward_model(family, _require(section, "a", "config.divergence"), "config.divergence.a")
    model_b = build_reward_model(family, _require(section, "b", "config.divergence"), "config.divergence.b")
    alpha = float(_require(section, "alpha", "config.divergence"))
    try:
        record = {
            "family": family,
            "alpha": alpha,
            "renyi": renyi_divergence(model_a, model_b, alpha),
            "kl": kl_divergence(model_a, model_b),
        }
        if isinstance(model_a, GaussianKnownVar) and alpha != 1.0:
            record["quadrature"] = renyi_quadrature_oracle(model_a, model_b, alpha)
    except AlphaBanditsError as e:
        raise ConfigParseError(f"config.divergence: {e}") from e
    out = _outdir(args)
    artifacts.write_json(out / "divergence.json", record)
    print(f"divergence: renyi={record['renyi']:.6g} kl={record['kl']:.6g} -> {out / 'divergence.json'}")
    return 0


def cmd_prior_mass(args) -> int:
    cfg = _load(args)
    section = _require(cfg, "prior_mass", "config")
    prior = build_prior(_require(section, "prior", "config.prior_mass"))
    try:
        res = analysis.check_prior_mass_b1(
            prior,
            float(_require(section, "theta0", "config.prior_mass")),
            float(_require(section, "alpha", "config.prior_mass")),
            float(_require(section, "eps", "config.prior_mass")),
            int(_require(section, "n", "config.prior_mass")),
        )
    except (ValueError, AlphaBanditsError) as e:
        raise ConfigParseError(f"config.prior_mass: {e}") from e
    out = _outdir(args)
    artifacts.write_json(
        out / "prior_mass.json",
        {"holds": res.holds, "lhs": res.lhs, "rhs": res.rhs, "ball": list(res.ball)},
    )
    status = "PASS" if res.holds else "FAIL"
    print(f"{status} prior-mass lhs={res.lhs:.6g} rhs={res.rhs:.6g}")
    return 0 if res.holds else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alpha-bandits",
        description="Tempered-posterior Thompson sampling simulator and bound calculators",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "simulate": (cmd_simulate, "run replicated bandit experiments, write traces/summary CSVs"),
        "bounds": (cmd_bounds, "evaluate regret bound calculators, write bounds.json"),
        "concentration": (cmd_concentration, "verify the posterior concentration inequality"),
        "divergence": (cmd_divergence, "evaluate closed-form divergences for one model pair"),
        "prior-mass": (cmd_prior_mass, "check the prior-mass condition on a divergence ball"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--output-dir", default=".", help="directory for output artifacts")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config field (dotted path, JSON value); repeatable",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker processes (fallback: ALPHA_BANDITS_THREADS, then 1)",
        )
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
