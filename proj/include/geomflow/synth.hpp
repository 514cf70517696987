// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/types.hpp"

#include <string>

namespace geomflow {
namespace synth {

enum class Trajectory : uint8_t { Static, Orbit, Dolly };

// Infinite plane normal . x = offset.
struct Plane {
    Eigen::Vector3d normal = Eigen::Vector3d(0, 1, 0);
    double offset = 2.0;
};

// Static axis-aligned box.
struct Box {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Vector3d half = Eigen::Vector3d::Ones();
};

enum class MoverShape : uint8_t { Sphere, Box };

/// Rigid mover with constant linear velocity (per frame) and constant angular
/// velocity (axis * radians per frame) about its own center.
struct Mover {
    MoverShape shape = MoverShape::Sphere;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();  // at frame 0
    double radius = 0.5;                               // sphere
    Eigen::Vector3d half = Eigen::Vector3d(0.5, 0.5, 0.5);  // box
    Eigen::Vector3d lin_vel = Eigen::Vector3d::Zero();
    Eigen::Vector3d ang_vel = Eigen::Vector3d::Zero();

    Eigen::Vector3d center_at(int frame) const { return center + frame * lin_vel; }
    Eigen::Matrix3d rotation_at(int frame) const;
    /// World position at frame+1 of the surface point p hit at `frame`.
    Eigen::Vector3d advance(const Eigen::Vector3d& p, int frame) const;
};

struct SceneConfig {
    int height = 64, width = 64;
    int frames = 8;
    Trajectory trajectory = Trajectory::Orbit;
    Eigen::Vector3d target = Eigen::Vector3d::Zero();
    double orbit_radius = 7.0, orbit_height = -1.0, orbit_step = 0.12, orbit_phase = 0.0;
    double dolly_start = -8.0, dolly_speed = 0.2;
    Eigen::Vector3d static_eye = Eigen::Vector3d(0.5, -1.0, -7.0);
    std::vector<Plane> planes;
    std::vector<Box> boxes;
    std::vector<Mover> movers;
    uint64_t seed = 0;
};

/// Parses the key=value scene description (see FORMATS.md for the schema).
SceneConfig parse_scene_config(const std::string& text);

/// Procedurally built orbit scene: ground plane, static boxes and a few
/// movers, randomized by seed. Used as the standard test fixture.
SceneConfig default_scene(uint64_t seed);

CameraPose camera_pose_at(const SceneConfig& config, int frame);
CameraIntrinsics make_intrinsics(const SceneConfig& config);

struct SynthResult {
    SequenceSample world;   // first-camera canonical frame, canonicalized poses
    SequenceSample camera;  // per-frame camera coordinates, raw poses
    // Per-frame mover index at each pixel; -1 for background or miss.
    std::vector<Grid<int>> owners;
};

/// Ray-casts the analytic primitives at pixel centers. Exact ground truth:
/// no meshes, no resampling. Throws if every ray misses.
SynthResult generate(const SceneConfig& config);

struct NoiseSpec {
    double point_sigma = 0.0;
    double flow_sigma = 0.0;
    double similarity_scale = 1.0;
    Eigen::Vector3d similarity_shift = Eigen::Vector3d::Zero();
};

/// Fabricates a "prediction" from ground truth: gaussian noise on valid
/// points/flows, then a global similarity transform.
SequenceSample perturb(const SequenceSample& seq, const NoiseSpec& spec, uint64_t seed);

}  // namespace synth
}  // namespace geomflow
