"""Single-frame RGBD novel-view synthesis toolkit.

Unprojects registered color+depth frames into colored point clouds,
re-renders them from new camera poses with z-buffered point splatting,
and builds paired/unpaired image-translation datasets from the results,
alongside classical hole-filling baselines and fidelity metrics.
"""

__version__ = "0.1.0"

from .errors import (
    AllHolesError,
    BehindCameraError,
    CalibrationError,
    InvalidDepthError,
    PixelBoundsError,
    RgbdWarpError,
    SequenceError,
)
from .geometry import (
    CameraIntrinsics,
    Pose,
    compose,
    invert,
    project,
    project_points,
    relative_pose,
    rotation_x,
    rotation_y,
    rotation_z,
    unproject,
)
from .pointcloud import (
    ColoredPointCloud,
    RgbdFrame,
    cloud_from_rgbd,
    save_ply,
    transform_cloud,
)
from .render import (
    MAX_SPLAT_RADIUS,
    RenderConfig,
    RenderOutput,
    RenderStats,
    render,
    reproject,
)
from .inpaint import FILL_METHODS, fill_holes
from .metrics import coverage, psnr, ssim
from .dataset import (
    IngestConfig,
    PairRecord,
    PerturbationRanges,
    Sequence,
    UnpairedRecord,
    gen_paired,
    gen_unpaired,
    load_sequence,
    parse_intrinsics,
    perturbation_pose,
    pose_from_raw34,
    read_manifest,
    write_manifest,
)

__all__ = [
    "AllHolesError",
    "BehindCameraError",
    "CalibrationError",
    "CameraIntrinsics",
    "ColoredPointCloud",
    "FILL_METHODS",
    "IngestConfig",
    "InvalidDepthError",
    "MAX_SPLAT_RADIUS",
    "PairRecord",
    "PerturbationRanges",
    "PixelBoundsError",
    "Pose",
    "RenderConfig",
    "RenderOutput",
    "RenderStats",
    "RgbdFrame",
    "RgbdWarpError",
    "Sequence",
    "SequenceError",
    "UnpairedRecord",
    "cloud_from_rgbd",
    "compose",
    "coverage",
    "fill_holes",
    "gen_paired",
    "gen_unpaired",
    "invert",
    "load_sequence",
    "parse_intrinsics",
    "perturbation_pose",
    "pose_from_raw34",
    "project",
    "project_points",
    "psnr",
    "read_manifest",
    "relative_pose",
    "render",
    "reproject",
    "rotation_x",
    "rotation_y",
    "rotation_z",
    "save_ply",
    "ssim",
    "transform_cloud",
    "unproject",
    "write_manifest",
]
