"""Generalized camera set pose estimation for image set localization."""

from camset._core import (
    DEFAULT_RATIO_THRESHOLD,
    MIN_DLT_CORRESPONDENCES,
    CameraIntrinsics,
    CameraModel,
    CameraPose,
    CameraSetModel,
    Descriptor,
    DescriptorIndex,
    DltDiagnostics,
    Error,
    GroundTruth,
    LmConfig,
    LocalizationResult,
    PipelineConfig,
    PointDescriptor,
    PointMatch,
    RansacConfig,
    RansacResult,
    RefineSummary,
    ScenePointCloud,
    SetCamera,
    SetObservation,
    Sim3Transform,
    Status,
    SyntheticConfig,
    SyntheticDataset,
    calibrate,
    camera_pose_in_global,
    estimate_pose_dlt,
    generate_synthetic,
    load_model,
    load_result,
    load_scene,
    load_truth,
    localize,
    match_bidirectional,
    prediction_angles,
    ransac_estimate,
    refine_sim3,
    rotation_angle_deg,
    rotation_exp,
    rotation_log,
    save_model,
    save_result,
    save_scene,
    save_truth,
    uncalibrate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
