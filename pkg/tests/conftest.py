import numpy as np
import pytest

from trajforge.core import PredictionSet, TrajTensor


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_traj(arr, unit=None):
    if unit is None:
        return TrajTensor(np.asarray(arr, dtype=float))
    return TrajTensor(np.asarray(arr, dtype=float), unit)


def make_preds(arr):
    return PredictionSet(np.asarray(arr, dtype=float))


def linear_scene(scene_id, agents=2, t_obs=8, t_pred=12, vx=0.5, vy=0.25, offset=0.0):
    """Straight-line motion; ground truth continues the line exactly."""
    frames = np.arange(t_obs + t_pred, dtype=float)
    coords = np.zeros((agents, t_obs + t_pred, 2))
    for a in range(agents):
        coords[a, :, 0] = vx * frames + offset + 3.0 * a
        coords[a, :, 1] = vy * frames + offset
    from trajforge.core import Scene

    return Scene(
        history=TrajTensor(coords[:, :t_obs]),
        future=TrajTensor(coords[:, t_obs:]),
        scene_id=scene_id,
    )


def curved_scene(scene_id, agents=2, t_obs=8, t_pred=12, curvature=0.05):
    """Discrete parabola; constant-acceleration rollout continues it exactly."""
    frames = np.arange(t_obs + t_pred, dtype=float)
    coords = np.zeros((agents, t_obs + t_pred, 2))
    for a in range(agents):
        coords[a, :, 0] = curvature * frames**2 + 2.0 * a
        coords[a, :, 1] = 0.3 * frames
    from trajforge.core import Scene

    return Scene(
        history=TrajTensor(coords[:, :t_obs]),
        future=TrajTensor(coords[:, t_obs:]),
        scene_id=scene_id,
    )


CVM_V2_BODY = """\
import numpy as np

def predict_trajectory_v2(trajectory):
    last = trajectory[:, -1, :]
    vel = trajectory[:, -1, :] - trajectory[:, -2, :]
    steps = np.arange(1, 13)[None, :, None]
    one = last[:, None, :] + steps * vel[:, None, :]
    return np.repeat(one[None], 20, axis=0)
"""


def native_code(name):
    """Candidate code that the in-process runner routes to a registry entry."""
    return f"# native-predictor: {name}\n" + CVM_V2_BODY


def wrap_reply(code):
    return f"```python\n{code}```"


def write_synthetic_root(root, splits=None, motion="linear", agents=3, frames=25):
    """A tiny on-disk dataset tree: <root>/<split>/{train,val,test}/one.txt."""
    from trajforge.data import ALL_SPLITS, RawTrack, write_trajectory_file

    for split in splits if splits is not None else ALL_SPLITS:
        for subset in ("train", "val", "test"):
            directory = root / split / subset
            directory.mkdir(parents=True, exist_ok=True)
            tracks = []
            for a in range(agents):
                samples = []
                for f in range(frames):
                    if motion == "curved":
                        x = 0.05 * f**2 + 2.0 * a
                        y = 0.3 * f + 0.5 * a
                    else:
                        x = 0.4 * f + 2.0 * a
                        y = 0.2 * f + 0.5 * a
                    samples.append((f, x, y))
                tracks.append(RawTrack(agent_id=a, samples=samples))
            write_trajectory_file(directory / "one.txt", tracks)
    return root
