"""Trajectory file parsing, scene windowing and benchmark splits.

Input files are plain text with one observation per line, four
whitespace-separated columns: ``frame_id agent_id x y``. The expected
directory layout is ``<root>/<split>/{train,val,test}/*.txt`` with splits
eth, hotel, univ, zara1, zara2 (meters) and sdd (pixels).

Scenes are cut by sliding a 20-frame window (8 observed + 12 future by
default) over the sorted set of frames present in a file; an agent joins
a scene only if it is observed at every frame of the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import Scene, TrajTensor, Unit
from ..errors import ContractViolation, DataValidationError, ParseError

ETH_UCY_SPLITS = ("eth", "hotel", "univ", "zara1", "zara2")
ALL_SPLITS = ETH_UCY_SPLITS + ("sdd",)

SPLIT_UNITS = {name: Unit.METERS for name in ETH_UCY_SPLITS}
SPLIT_UNITS["sdd"] = Unit.PIXELS


@dataclass
class RawTrack:
    """All observations of one agent, frame-sorted."""

    agent_id: int
    samples: list[tuple[int, float, float]]

    def __post_init__(self):
        frames = [f for f, _, _ in self.samples]
        for prev, cur in zip(frames, frames[1:]):
            if cur <= prev:
                raise DataValidationError(
                    f"agent {self.agent_id}: frames not strictly increasing "
                    f"({prev} then {cur})"
                )
        strides = {cur - prev for prev, cur in zip(frames, frames[1:])}
        if len(strides) > 1:
            raise DataValidationError(
                f"agent {self.agent_id}: non-uniform frame stride {sorted(strides)}"
            )

    @property
    def frames(self) -> list[int]:
        return [f for f, _, _ in self.samples]


@dataclass
class DatasetSplit:
    name: str
    scenes: list[Scene]
    unit: Unit

    def __post_init__(self):
        if self.name not in ALL_SPLITS:
            raise DataValidationError(f"unknown split name {self.name!r}")


def parse_trajectory_file(path, fmt: str = "columns") -> list[RawTrack]:
    """Read a 4-column trajectory file into per-agent tracks.

    Rows are grouped by agent id and sorted by frame. An empty file
    yields an empty list; a malformed line raises with its line number.
    """
    if fmt != "columns":
        raise ContractViolation(f"unsupported trajectory file format {fmt!r}")
    path = Path(path)
    by_agent: dict[int, list[tuple[int, float, float]]] = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) < 4:
                raise ParseError(path, line_no, f"expected 4 columns, got {len(fields)}")
            try:
                frame = int(float(fields[0]))
                agent = int(float(fields[1]))
                x = float(fields[2])
                y = float(fields[3])
            except ValueError as exc:
                raise ParseError(path, line_no, f"bad numeric field: {exc}") from None
            if not (np.isfinite(x) and np.isfinite(y)):
                raise ParseError(path, line_no, "non-finite position")
            by_agent.setdefault(agent, []).append((frame, x, y))

    tracks = []
    for agent in sorted(by_agent):
        samples = sorted(by_agent[agent], key=lambda s: s[0])
        tracks.append(RawTrack(agent_id=agent, samples=samples))
    return tracks


def write_trajectory_file(path, tracks: list[RawTrack]) -> None:
    """Serialize tracks back to the 4-column layout (frame-major order)."""
    rows = []
    for track in tracks:
        for frame, x, y in track.samples:
            rows.append((frame, track.agent_id, x, y))
    rows.sort()
    with open(path, "w") as fh:
        for frame, agent, x, y in rows:
            fh.write(f"{frame} {agent} {x:.6f} {y:.6f}\n")


def build_scenes(
    tracks: list[RawTrack],
    t_obs: int = 8,
    t_pred: int = 12,
    stride: int = 1,
    unit: Unit = Unit.METERS,
    source: str = "",
) -> list[Scene]:
    """Cut fixed-length scenes from tracks by sliding window.

    Windows advance by ``stride`` positions over the sorted list of all
    frames present in the input. Agents only partially present in a
    window are excluded; windows with no qualifying agent are dropped.
    """
    if t_obs < 2 or t_pred < 1 or stride < 1:
        raise ContractViolation(
            f"invalid windowing parameters t_obs={t_obs} t_pred={t_pred} stride={stride}"
        )
    window = t_obs + t_pred
    positions: dict[int, dict[int, tuple[float, float]]] = {
        track.agent_id: {f: (x, y) for f, x, y in track.samples} for track in tracks
    }
    all_frames = sorted({f for track in tracks for f in track.frames})
    if len(all_frames) < window:
        return []

    scenes = []
    for start in range(0, len(all_frames) - window + 1, stride):
        frames = all_frames[start : start + window]
        members = [
            agent
            for agent in sorted(positions)
            if all(f in positions[agent] for f in frames)
        ]
        if not members:
            continue
        coords = np.array(
            [[positions[agent][f] for f in frames] for agent in members], dtype=float
        )
        scene_id = f"{source}:{frames[0]}" if source else str(frames[0])
        scenes.append(
            Scene(
                history=TrajTensor(coords[:, :t_obs], unit),
                future=TrajTensor(coords[:, t_obs:], unit),
                scene_id=scene_id,
            )
        )
    return scenes


def leave_one_out_names(split_name: str) -> tuple[list[str], str]:
    """Train/test split names under the leave-one-out protocol."""
    if split_name not in ETH_UCY_SPLITS:
        raise DataValidationError(
            f"leave-one-out split must be one of {ETH_UCY_SPLITS}, got {split_name!r}"
        )
    train = [name for name in ETH_UCY_SPLITS if name != split_name]
    return train, split_name


def load_split(
    root,
    name: str,
    subset: str = "test",
    t_obs: int = 8,
    t_pred: int = 12,
    stride: int = 1,
) -> DatasetSplit:
    """Load every trajectory file under ``<root>/<name>/<subset>/``."""
    if name not in ALL_SPLITS:
        raise DataValidationError(f"unknown split name {name!r}")
    directory = Path(root) / name / subset
    if not directory.is_dir():
        raise DataValidationError(
            f"missing dataset directory {directory} "
            f"(expected layout <root>/<split>/{{train,val,test}}/*.txt)"
        )
    unit = SPLIT_UNITS[name]
    scenes: list[Scene] = []
    for path in sorted(directory.glob("*.txt")):
        tracks = parse_trajectory_file(path)
        scenes.extend(
            build_scenes(tracks, t_obs, t_pred, stride, unit, source=path.stem)
        )
    return DatasetSplit(name=name, scenes=scenes, unit=unit)


def leave_one_out(
    root,
    split_name: str,
    t_obs: int = 8,
    t_pred: int = 12,
    stride: int = 1,
) -> tuple[list[DatasetSplit], DatasetSplit]:
    """Train splits (other four, train subset) and the held-out test split."""
    train_names, test_name = leave_one_out_names(split_name)
    train = [
        load_split(root, name, "train", t_obs, t_pred, stride) for name in train_names
    ]
    test = load_split(root, test_name, "test", t_obs, t_pred, stride)
    return train, test
