"""Predictive-sampling MPC over control points with warm starts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kinder.envcore import ActionDelta, KinematicEnv
from kinder.state import SceneState

ACTION_DIM = 5
ACTION_RANGE = 2.0  # each component spans [-1, 1]


@dataclass(frozen=True)
class MpcConfig:
    """Predictive-sampling settings."""

    num_candidates: int = 10
    horizon: int = 100
    num_control_points: int = 10
    noise_sigma: float = 0.3
    replan_every: int = 1
    iters_per_step: int = 1
    anneal: bool = False

    def __post_init__(self) -> None:
        assert self.num_control_points <= self.horizon
        assert self.noise_sigma > 0


def zero_control_points(cfg: MpcConfig) -> np.ndarray:
    return np.zeros((cfg.num_control_points, ACTION_DIM))


def interpolate_controls(points: np.ndarray, horizon: int) -> np.ndarray:
    """Linear interpolation of control points onto per-step actions."""
    n = points.shape[0]
    knots = np.linspace(0.0, horizon - 1.0, num=n)
    steps = np.arange(horizon, dtype=float)
    out = np.empty((horizon, points.shape[1]))
    for j in range(points.shape[1]):
        out[:, j] = np.interp(steps, knots, points[:, j])
    return out


def _rollout_score(
    env_model: KinematicEnv, state: SceneState, actions: np.ndarray
) -> tuple[int, int]:
    """Score key (lower is better): success flag then steps-to-success."""
    sim = env_model.clone()
    sim.set_state(state)
    for t in range(actions.shape[0]):
        out = sim.step(ActionDelta.from_array(actions[t]))
        if out.terminated:
            return (0, t + 1)
    return (1, 0)


def mpc_act(
    env_model: KinematicEnv,
    state: SceneState,
    cfg: MpcConfig,
    warm: np.ndarray,
    rng: np.random.Generator,
    stats: dict | None = None,
) -> tuple[ActionDelta, np.ndarray]:
    """One planning iteration: returns the action to execute plus the
    shifted best control points for the next step's warm start.

    Candidate 0 is the unperturbed warm start; ties keep the incumbent.
    When given, stats records whether a perturbed candidate improved on it.
    """
    sigma = cfg.noise_sigma * ACTION_RANGE
    best_points = warm
    best_actions = interpolate_controls(warm, cfg.horizon)
    best_key = _rollout_score(env_model, state, best_actions)
    improved = False
    for _ in range(cfg.num_candidates - 1):
        cand = warm + rng.normal(0.0, sigma, size=warm.shape)
        actions = interpolate_controls(cand, cfg.horizon)
        key = _rollout_score(env_model, state, actions)
        if key < best_key:
            best_key = key
            best_points = cand
            best_actions = actions
            improved = True
    if stats is not None:
        stats["improved"] = improved
        stats["best_key"] = best_key
    action = ActionDelta.from_array(best_actions[0])
    shifted = _shift_one_step(best_points, best_actions, cfg)
    return action, shifted


def _shift_one_step(
    points: np.ndarray, actions: np.ndarray, cfg: MpcConfig
) -> np.ndarray:
    """Resample control points one step later along the best trajectory."""
    del points
    horizon = actions.shape[0]
    knots = np.linspace(0.0, horizon - 1.0, num=cfg.num_control_points)
    sample_times = np.minimum(knots + 1.0, horizon - 1.0)
    out = np.empty((cfg.num_control_points, actions.shape[1]))
    steps = np.arange(horizon, dtype=float)
    for j in range(actions.shape[1]):
        out[:, j] = np.interp(sample_times, steps, actions[:, j])
    return out


class MpcController:
    """Per-episode planning state: warm start plus optional extensions.

    Runs iters_per_step sampling rounds per environment step and, when the
    anneal extension is on, shrinks sigma by 0.8 whenever a round improves
    on the incumbent.
    """

    def __init__(self, cfg: MpcConfig, rng: np.random.Generator) -> None:
        self.cfg = cfg
        self.rng = rng
        self.warm = zero_control_points(cfg)
        self.sigma = cfg.noise_sigma

    def act(self, env_model: KinematicEnv, state: SceneState) -> ActionDelta:
        action = ActionDelta()
        for _ in range(max(1, self.cfg.iters_per_step)):
            cfg = (
                self.cfg
                if self.sigma == self.cfg.noise_sigma
                else MpcConfig(
                    num_candidates=self.cfg.num_candidates,
                    horizon=self.cfg.horizon,
                    num_control_points=self.cfg.num_control_points,
                    noise_sigma=self.sigma,
                    replan_every=self.cfg.replan_every,
                    iters_per_step=self.cfg.iters_per_step,
                    anneal=self.cfg.anneal,
                )
            )
            stats: dict = {}
            action, self.warm = mpc_act(env_model, state, cfg, self.warm, self.rng, stats)
            if self.cfg.anneal and stats.get("improved"):
                self.sigma *= 0.8
        return action
