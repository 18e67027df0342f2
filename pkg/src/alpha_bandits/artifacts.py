"""Deterministic CSV/JSON artifact writers.

CSV files use '.' decimals, no thousands separators, LF line endings and a
mandatory header row; floats are written with shortest round-trip repr.
Identical inputs therefore produce byte-identical files on any platform.
"""

import hashlib
import json
from pathlib import Path

from .rng import derive_seed

TRACES_HEADER = "algorithm,alpha,replicate,t,cum_regret"
SUMMARY_HEADER = "algorithm,alpha,t,p10,p50,p90"
SUMMARY_PERCENTILES = (10.0, 50.0, 90.0)


def _fmt(x) -> str:
    return repr(float(x))


def _fmt_alpha(alpha) -> str:
    return "" if alpha is None else _fmt(alpha)


def write_traces_csv(path, traces) -> None:
    """One row per (policy, replicate, step) with 1-based step index."""
    with open(path, "w", newline="") as f:
        f.write(TRACES_HEADER + "\n")
        for tr in traces:
            prefix = f"{tr.algorithm_label},{_fmt_alpha(tr.alpha)},{tr.replicate_id},"
            f.writelines(
                f"{prefix}{t},{_fmt(v)}\n" for t, v in enumerate(tr.cum_regret, start=1)
            )


def write_summary_csv(path, summaries) -> None:
    """Percentile curves (p10/p50/p90) per (algorithm, alpha) group."""
    with open(path, "w", newline="") as f:
        f.write(SUMMARY_HEADER + "\n")
        for s in summaries:
            if tuple(s.percentiles) != SUMMARY_PERCENTILES:
                raise ValueError(f"summary.csv expects percentiles {SUMMARY_PERCENTILES}")
            prefix = f"{s.algorithm_label},{_fmt_alpha(s.alpha)},"
            p10, p50, p90 = s.curves
            f.writelines(
                f"{prefix}{t},{_fmt(a)},{_fmt(b)},{_fmt(c)}\n"
                for t, (a, b, c) in enumerate(zip(p10, p50, p90), start=1)
            )


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_manifest(path, resolved_config: dict, experiment, version: str, outputs) -> None:
    """Record the post-override config, its hash, derived seeds and version.

    Re-running ``simulate`` on the embedded config reproduces the recorded
    outputs byte for byte.
    """
    seeds = [
        {
            "kind": spec.kind,
            "alpha": spec.alpha,
            "seeds": [
                derive_seed(experiment.base_seed, pi, r) for r in range(experiment.replicates)
            ],
        }
        for pi, spec in enumerate(experiment.policies)
    ]
    write_json(
        path,
        {
            "toolkit_version": version,
            "config_sha256": config_hash(resolved_config),
            "config": resolved_config,
            "base_seed": experiment.base_seed,
            "seeds": seeds,
            "outputs": list(outputs),
        },
    )
