"""Benchmark harness: run matrices, metrics, noise wrappers."""

from kinder.bench.noise import NoisyEnv, wrap_act_noise, wrap_obs_noise
from kinder.bench.runner import (
    BASELINES,
    CSV_COLUMNS,
    EpisodeResult,
    MetricRow,
    RunSpec,
    compute_metrics,
    episode_seed,
    fnv64,
    read_episodes_jsonl,
    read_results,
    render_table,
    results_from_csv,
    results_to_csv,
    run_episode,
    run_matrix,
    write_episodes_jsonl,
    write_results,
)

__all__ = [
    "BASELINES",
    "CSV_COLUMNS",
    "EpisodeResult",
    "MetricRow",
    "NoisyEnv",
    "RunSpec",
    "compute_metrics",
    "episode_seed",
    "fnv64",
    "read_episodes_jsonl",
    "read_results",
    "render_table",
    "results_from_csv",
    "results_to_csv",
    "run_episode",
    "run_matrix",
    "wrap_act_noise",
    "wrap_obs_noise",
    "write_episodes_jsonl",
    "write_results",
]
