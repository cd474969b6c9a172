from .loader import (
    ETH_UCY_SPLITS,
    ALL_SPLITS,
    DatasetSplit,
    RawTrack,
    build_scenes,
    leave_one_out,
    leave_one_out_names,
    load_split,
    parse_trajectory_file,
    write_trajectory_file,
)

__all__ = [
    "ETH_UCY_SPLITS",
    "ALL_SPLITS",
    "DatasetSplit",
    "RawTrack",
    "build_scenes",
    "leave_one_out",
    "leave_one_out_names",
    "load_split",
    "parse_trajectory_file",
    "write_trajectory_file",
]
