"""Inverse-kinematics retargeting of 3D keypoint sequences onto a
biomechanically constrained kinematic chain."""

from ._core import (
    BodyModel,
    KinefitError,
    axis_angle_to_matrix,
    euler_xyz_to_matrix,
    frame_loss,
    generate,
    ik_frame,
    ik_sequence,
    ik_temporal,
    matrix_to_axis_angle,
    matrix_to_euler_xyz,
    mpjas,
    relative_angle,
    solution_space,
    temporal_error,
)

__version__ = "0.1.0"

__all__ = [
    "BodyModel",
    "KinefitError",
    "axis_angle_to_matrix",
    "euler_xyz_to_matrix",
    "frame_loss",
    "generate",
    "ik_frame",
    "ik_sequence",
    "ik_temporal",
    "matrix_to_axis_angle",
    "matrix_to_euler_xyz",
    "mpjas",
    "relative_angle",
    "solution_space",
    "temporal_error",
]
