"""Smoke tests for the python bindings: each main operation runs end to end
and agrees with known ground truth on small synthetic problems."""

import numpy as np
import pytest

import camset


def random_similarity(rng):
    rotation = camset.rotation_exp(rng.normal(size=3))
    scale = float(rng.uniform(0.5, 2.0))
    center = rng.uniform(-1.0, 1.0, size=3)
    return camset.Sim3Transform(scale, rotation, center)


def make_correspondences(transform, count, rng, noise=0.0):
    points = rng.uniform(-20.0, 20.0, size=(count, 3))
    centers = rng.uniform(-1.0, 1.0, size=(count, 3))
    directions = np.empty((count, 3))
    for i in range(count):
        d = transform.apply(points[i]) - centers[i]
        d = d / np.linalg.norm(d)
        if noise > 0.0:
            d = d + rng.normal(scale=noise, size=3)
            d = d / np.linalg.norm(d)
        directions[i] = d
    return directions, centers, points


def transform_errors(estimate, truth):
    rot = camset.rotation_angle_deg(estimate.rotation, truth.rotation)
    center = np.linalg.norm(estimate.center - truth.center)
    scale = abs(estimate.scale - truth.scale) / truth.scale
    return rot, center, scale


def test_dlt_recovers_similarity():
    rng = np.random.default_rng(1)
    truth = random_similarity(rng)
    directions, centers, points = make_correspondences(truth, 24, rng)
    estimate, diagnostics = camset.estimate_pose_dlt(directions, centers, points)
    rot, center, scale = transform_errors(estimate, truth)
    assert rot < 1e-6 and center < 1e-7 and scale < 1e-8
    assert diagnostics.num_correspondences == 24
    angles = camset.prediction_angles(directions, centers, points, estimate)
    assert float(np.max(angles)) < 1e-6


def test_too_few_correspondences_raises():
    rng = np.random.default_rng(2)
    truth = random_similarity(rng)
    directions, centers, points = make_correspondences(truth, 5, rng)
    with pytest.raises(camset.Error):
        camset.estimate_pose_dlt(directions, centers, points)


def test_ransac_survives_outliers():
    rng = np.random.default_rng(3)
    truth = random_similarity(rng)
    directions, centers, points = make_correspondences(truth, 40, rng)
    corrupt = rng.choice(40, size=12, replace=False)
    for i in corrupt:
        d = rng.normal(size=3)
        directions[i] = d / np.linalg.norm(d)
    config = camset.RansacConfig()
    config.rng_seed = 3
    result = camset.ransac_estimate(directions, centers, points, config)
    rot, center, _ = transform_errors(result.transform, truth)
    assert rot < 1e-6 and center < 1e-6
    inliers = {i for i, flag in enumerate(result.inlier_mask) if flag}
    assert inliers == set(range(40)) - set(corrupt.tolist())


def test_refinement_reduces_cost():
    rng = np.random.default_rng(4)
    truth = random_similarity(rng)
    directions, centers, points = make_correspondences(truth, 30, rng, noise=1e-3)
    initial, _ = camset.estimate_pose_dlt(directions, centers, points)
    summary = camset.refine_sim3(initial, directions, centers, points)
    assert summary.final_cost <= summary.initial_cost
    assert summary.iterations >= 1


def test_calibration_roundtrip():
    panoramic = camset.CameraIntrinsics.panoramic(1024, 512)
    rectilinear = camset.CameraIntrinsics.rectilinear(800.0, 1600, 1200)
    rng = np.random.default_rng(5)
    for intrinsics in (panoramic, rectilinear):
        width, height = intrinsics.image_size
        pixels = rng.uniform((0.5, 0.5), (width - 0.5, height - 0.5), size=(200, 2))
        for pixel in pixels:
            ray = camset.calibrate(pixel, intrinsics)
            back = camset.uncalibrate(ray, intrinsics)
            assert np.linalg.norm(back - pixel) < 1e-9


def test_matching_finds_planted_pairs():
    rng = np.random.default_rng(6)
    dim = 16
    scene = camset.ScenePointCloud()
    scene.points = [rng.uniform(-5.0, 5.0, size=3) for _ in range(30)]
    plants = []
    descriptors = []
    for i in range(30):
        d = rng.normal(size=dim)
        d = d / np.linalg.norm(d)
        entry = camset.PointDescriptor()
        entry.point = i
        entry.descriptor = camset.Descriptor(d)
        descriptors.append(entry)
        plants.append(d)
    scene.descriptors = descriptors
    index = camset.DescriptorIndex.build(scene)
    assert len(index) == 30 and index.dimension == dim

    local = [(np.asarray(scene.points[i]), [plants[i]]) for i in range(10)]
    matches = camset.match_bidirectional(local, index, 0.6)
    assert {(m.local_index, m.scene_index) for m in matches} == {
        (i, i) for i in range(10)
    }


def test_pipeline_and_io_roundtrip(tmp_path):
    config = camset.SyntheticConfig()
    config.seed = 7
    config.num_query_cameras = 3
    config.num_query_points = 50
    config.num_distractor_points = 100
    config.descriptor_dim = 16
    dataset = camset.generate_synthetic(config)

    scene_path = str(tmp_path / "scene.txt")
    camset.save_scene(scene_path, dataset.scene)
    scene = camset.load_scene(scene_path)
    assert len(scene.points) == len(dataset.scene.points)

    model_path = str(tmp_path / "model.txt")
    camset.save_model(model_path, dataset.query)
    query = camset.load_model(model_path)

    index = camset.DescriptorIndex.build(scene)
    result = camset.localize(scene, index, query, camset.PipelineConfig())
    assert result.registered()
    truth_pose = dataset.true_poses_global[dataset.query.target_camera]
    location = np.linalg.norm(result.target_pose_global.center() - truth_pose.center())
    orientation = camset.rotation_angle_deg(
        result.target_pose_global.rotation, truth_pose.rotation
    )
    assert location < 1e-6 and orientation < 1e-6

    result_path = str(tmp_path / "result.txt")
    camset.save_result(result_path, result)
    loaded = camset.load_result(result_path)
    assert loaded.status == result.status
    assert loaded.inlier_count == result.inlier_count
    assert (
        np.linalg.norm(
            loaded.target_pose_global.center() - result.target_pose_global.center()
        )
        < 1e-12
    )
