"""Kinematic and social-force predictors.

All of them roll the observed history forward frame by frame and return
K prediction sets; the deterministic ones simply repeat a single rollout
K times so every predictor exposes the same output shape.
"""

from __future__ import annotations

import numpy as np

from ..core import PredictionSet
from ..errors import DataValidationError
from .registry import PredictorSpec, as_rng, history_array, register, require_frames

ANGLE_SIGMA_DEFAULT = float(np.deg2rad(25.0))

OMEGA_EPS = 1e-4


def _tile(rollout: np.ndarray, k: int) -> PredictionSet:
    return PredictionSet(np.repeat(rollout[None], k, axis=0))


def _constant_rollout(last_pos: np.ndarray, velocity: np.ndarray, t_pred: int) -> np.ndarray:
    steps = np.arange(1, t_pred + 1, dtype=float)
    return last_pos[:, None, :] + steps[None, :, None] * velocity[:, None, :]


def cvm(history, k, t_pred, rng, **_) -> PredictionSet:
    """Constant-velocity rollout of the last observed step."""
    hist = history_array(history)
    require_frames(hist, 2, "cvm")
    velocity = hist[:, -1] - hist[:, -2]
    return _tile(_constant_rollout(hist[:, -1], velocity, t_pred), k)


def cvm_s(history, k, t_pred, rng, angle_sigma=ANGLE_SIGMA_DEFAULT) -> PredictionSet:
    """CVM with per-set, per-agent angular noise on the velocity direction.

    Set 0 stays the exact deterministic rollout; the remaining sets rotate
    each agent's last-step velocity by an angle drawn from N(0, sigma^2).
    """
    rng = as_rng(rng)
    hist = history_array(history)
    require_frames(hist, 2, "cvm_s")
    if angle_sigma <= 0:
        raise DataValidationError(f"angle_sigma must be positive, got {angle_sigma}")
    velocity = hist[:, -1] - hist[:, -2]
    sets = [_constant_rollout(hist[:, -1], velocity, t_pred)]
    if k > 1:
        angles = rng.normal(0.0, angle_sigma, size=(k - 1, hist.shape[0]))
        for set_angles in angles:
            cos, sin = np.cos(set_angles), np.sin(set_angles)
            rotated = np.stack(
                [
                    cos * velocity[:, 0] - sin * velocity[:, 1],
                    sin * velocity[:, 0] + cos * velocity[:, 1],
                ],
                axis=1,
            )
            sets.append(_constant_rollout(hist[:, -1], rotated, t_pred))
    return PredictionSet(np.stack(sets, axis=0))


def constant_acc(history, k, t_pred, rng, **_) -> PredictionSet:
    """Second-difference acceleration applied to the velocity each frame."""
    hist = history_array(history)
    require_frames(hist, 3, "constant_acc")
    velocity = hist[:, -1] - hist[:, -2]
    accel = velocity - (hist[:, -2] - hist[:, -3])
    pos = hist[:, -1].copy()
    vel = velocity.copy()
    frames = []
    for _t in range(t_pred):
        vel = vel + accel
        pos = pos + vel
        frames.append(pos.copy())
    return _tile(np.stack(frames, axis=1), k)


def ctrv(history, k, t_pred, rng, omega_eps=OMEGA_EPS) -> PredictionSet:
    """Constant turn rate and speed, both estimated from the last two steps."""
    hist = history_array(history)
    require_frames(hist, 3, "ctrv")
    v_last = hist[:, -1] - hist[:, -2]
    v_prev = hist[:, -2] - hist[:, -3]
    speed = np.linalg.norm(v_last, axis=1)
    heading = np.arctan2(v_last[:, 1], v_last[:, 0])
    heading_prev = np.arctan2(v_prev[:, 1], v_prev[:, 0])
    # wrap the heading difference into (-pi, pi]
    omega = np.arctan2(
        np.sin(heading - heading_prev), np.cos(heading - heading_prev)
    )
    straight = np.abs(omega) < omega_eps

    pos = hist[:, -1].copy()
    theta = heading.copy()
    frames = []
    for _t in range(t_pred):
        theta = np.where(straight, theta, theta + omega)
        step = speed[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        pos = pos + step
        frames.append(pos.copy())
    return _tile(np.stack(frames, axis=1), k)


def linreg(history, k, t_pred, rng, **_) -> PredictionSet:
    """Per-coordinate least-squares line over frame indices, extrapolated."""
    hist = history_array(history)
    require_frames(hist, 2, "linreg")
    agents, t_obs, _ = hist.shape
    idx = np.arange(t_obs, dtype=float)
    design = np.stack([idx, np.ones_like(idx)], axis=1)
    targets = hist.transpose(1, 0, 2).reshape(t_obs, agents * 2)
    coef, *_rest = np.linalg.lstsq(design, targets, rcond=None)
    future_idx = np.arange(t_obs, t_obs + t_pred, dtype=float)
    future_design = np.stack([future_idx, np.ones_like(future_idx)], axis=1)
    rollout = (future_design @ coef).reshape(t_pred, agents, 2).transpose(1, 0, 2)
    return _tile(rollout, k)


def social_force(
    history,
    k,
    t_pred,
    rng,
    strength=2.1,
    falloff=0.3,
    radius=2.0,
    speed_cap_factor=2.0,
) -> PredictionSet:
    """Goal attraction plus exponential pairwise repulsion.

    The goal is the constant-velocity endpoint; each frame the agent aims
    at it with its initial speed, neighbors inside ``radius`` push away
    with magnitude strength*exp(-d/falloff), and speed is capped. Set 0
    uses ``strength`` as given, the others perturb it multiplicatively.
    """
    rng = as_rng(rng)
    hist = history_array(history)
    require_frames(hist, 2, "social_force")
    agents = hist.shape[0]
    v0 = hist[:, -1] - hist[:, -2]
    speed0 = np.linalg.norm(v0, axis=1)
    goal = hist[:, -1] + v0 * t_pred
    v_max = speed_cap_factor * speed0

    factors = np.ones(k)
    if k > 1:
        factors[1:] = rng.uniform(0.5, 1.5, size=k - 1)

    sets = []
    for factor in factors:
        a_k = strength * factor
        pos = hist[:, -1].copy()
        frames = []
        for _t in range(t_pred):
            to_goal = goal - pos
            dist_goal = np.linalg.norm(to_goal, axis=1)
            safe = np.maximum(dist_goal, 1e-12)
            step_speed = np.minimum(speed0, dist_goal)
            vel = to_goal / safe[:, None] * step_speed[:, None]

            if agents > 1 and a_k != 0.0:
                delta = pos[:, None, :] - pos[None, :, :]
                dist = np.linalg.norm(delta, axis=2)
                np.fill_diagonal(dist, np.inf)
                near = dist < radius
                mag = np.where(near, a_k * np.exp(-dist / falloff), 0.0)
                push = delta / np.maximum(dist, 1e-12)[:, :, None]
                vel = vel + (mag[:, :, None] * push).sum(axis=1)

            norms = np.linalg.norm(vel, axis=1)
            over = norms > v_max
            scale = np.where(over, v_max / np.maximum(norms, 1e-12), 1.0)
            vel = vel * scale[:, None]
            pos = pos + vel
            frames.append(pos.copy())
        sets.append(np.stack(frames, axis=1))
    return PredictionSet(np.stack(sets, axis=0))


register(PredictorSpec("cvm", {}, deterministic=True), cvm)
register(
    PredictorSpec("cvm_s", {"angle_sigma": ANGLE_SIGMA_DEFAULT}, deterministic=False),
    cvm_s,
)
register(PredictorSpec("const_acc", {}, deterministic=True), constant_acc)
register(PredictorSpec("ctrv", {"omega_eps": OMEGA_EPS}, deterministic=True), ctrv)
register(PredictorSpec("linreg", {}, deterministic=True), linreg)
register(
    PredictorSpec(
        "social_force",
        {"strength": 2.1, "falloff": 0.3, "radius": 2.0, "speed_cap_factor": 2.0},
        deterministic=False,
    ),
    social_force,
)
