"""Observation and action noise wrappers around a bare environment.

Noise perturbs only what the agent sees or commands; the environment's
internal ground truth stays noiseless.
"""

from __future__ import annotations

import numpy as np

from kinder.envcore import ActionDelta, KinematicEnv, StepOutcome
from kinder.state import SceneState


def _fnv64(*values: int) -> int:
    h = np.uint64(0xCBF29CE484222325)
    prime = np.uint64(0x100000001B3)
    with np.errstate(over="ignore"):
        for v in values:
            word = np.uint64(v % (1 << 64))
            for shift in range(0, 64, 8):
                byte = np.uint64((int(word) >> shift) & 0xFF)
                h = np.uint64(h ^ byte)
                h = np.uint64(h * prime)
    return int(h)


class NoisyEnv:
    """Wraps an env, adding Gaussian noise to observations and/or actions."""

    def __init__(self, env: KinematicEnv, obs_sigma: float = 0.0,
                 act_sigma: float = 0.0) -> None:
        assert obs_sigma >= 0 and act_sigma >= 0
        self.env = env
        self.obs_sigma = obs_sigma
        self.act_sigma = act_sigma
        self._rng = np.random.default_rng(0)

    @property
    def env_name(self) -> str:
        return self.env.env_name

    @property
    def variant(self):
        return self.env.variant

    @property
    def robot_spec(self):
        return self.env.robot_spec

    @property
    def state(self) -> SceneState:
        return self.env.state

    def check_goal(self, state: SceneState) -> bool:
        return self.env.check_goal(state)

    def reset(self, seed: int) -> SceneState:
        self._rng = np.random.default_rng(_fnv64(seed, 0x6E6F697365))
        state = self.env.reset(seed)
        return self.observe(state)

    def observe(self, state: SceneState) -> SceneState:
        """Ground-truth state with iid Gaussian noise on continuous features."""
        if self.obs_sigma == 0.0:
            return state
        updates: dict[str, dict[str, float]] = {}
        for name, otype, vec in state.objects:
            per_obj: dict[str, float] = {}
            for i, feature in enumerate(otype.features):
                if feature in otype.binary_features:
                    continue
                per_obj[feature] = float(vec[i]) + float(
                    self._rng.normal(0.0, self.obs_sigma)
                )
            updates[name] = per_obj
        return state.with_updates(updates)

    def step(self, action: ActionDelta) -> StepOutcome:
        if self.act_sigma > 0.0:
            noisy = action.as_array() + self._rng.normal(0.0, self.act_sigma, size=5)
            action = ActionDelta.from_array(noisy)
        out = self.env.step(action)
        if self.obs_sigma == 0.0:
            return out
        return StepOutcome(
            state=self.observe(out.state),
            reward=out.reward,
            terminated=out.terminated,
            info=out.info,
        )


def wrap_obs_noise(env: KinematicEnv, sigma: float) -> NoisyEnv:
    """Observation-noise wrapper; sigma 0 leaves the env bit-identical."""
    return NoisyEnv(env, obs_sigma=sigma)


def wrap_act_noise(env: KinematicEnv, sigma: float) -> NoisyEnv:
    """Action-noise wrapper; sigma 0 leaves the env bit-identical."""
    return NoisyEnv(env, act_sigma=sigma)
