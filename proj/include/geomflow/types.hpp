// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geomflow {

/// Dense row-major H×W grid of arbitrary cell type.
template <typename T>
struct Grid {
    int height = 0;
    int width = 0;
    std::vector<T> cells;

    Grid() = default;
    Grid(int h, int w, const T& fill = T{}) : height(h), width(w), cells(static_cast<size_t>(h) * w, fill) {}

    T& at(int r, int c) { return cells[static_cast<size_t>(r) * width + c]; }
    const T& at(int r, int c) const { return cells[static_cast<size_t>(r) * width + c]; }
    size_t size() const { return cells.size(); }
    bool same_shape(int h, int w) const { return height == h && width == w; }
};

using Vec3Grid = Grid<Eigen::Vector3d>;
using ScalarGrid = Grid<double>;
using BoolGrid = Grid<uint8_t>;

// Value stored in invalid cells of point maps, flows and depth maps.
inline constexpr double kInvalidValue = 0.0;

struct CameraIntrinsics {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    bool valid() const {
        return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width && cy >= 0 && cy < height;
    }
};

/// Rigid camera-to-world transform. x_world = rotation * x_cam + translation.
struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static CameraPose identity() { return {}; }

    Eigen::Vector3d to_world(const Eigen::Vector3d& x_cam) const { return rotation * x_cam + translation; }
    Eigen::Vector3d to_camera(const Eigen::Vector3d& x_world) const {
        return rotation.transpose() * (x_world - translation);
    }
    CameraPose inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }

    bool is_rigid(double tol = 1e-6) const {
        const Eigen::Matrix3d rtr = rotation.transpose() * rotation;
        return (rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
               std::abs(rotation.determinant() - 1.0) <= tol;
    }
};

enum class FrameKind : uint8_t { Camera, World, WorldNormalized };

/// Coordinate frame a point map or flow is expressed in. `camera_index` is
/// meaningful only for FrameKind::Camera.
struct FrameTag {
    FrameKind kind = FrameKind::Camera;
    int camera_index = -1;

    static FrameTag camera(int i) { return {FrameKind::Camera, i}; }
    static FrameTag world() { return {FrameKind::World, -1}; }
    static FrameTag world_normalized() { return {FrameKind::WorldNormalized, -1}; }

    bool operator==(const FrameTag&) const = default;
};

std::string to_string(const FrameTag& tag);

/// Per-pixel 3D coordinates of one frame with a validity mask. Invalid pixels
/// hold kInvalidValue in all channels.
struct PointMap {
    Vec3Grid data;
    BoolGrid mask;
    FrameTag tag;

    int height() const { return data.height; }
    int width() const { return data.width; }
};

/// Per-pixel 3D motion vector from frame i to i+1. Masked-out entries are zero.
struct SceneFlow {
    Vec3Grid data;
    BoolGrid mask;
    FrameTag tag;

    int height() const { return data.height; }
    int width() const { return data.width; }
};

enum class NormMode : uint8_t { Canonical, Max };

struct NormParams {
    Eigen::Vector3d mu = Eigen::Vector3d::Zero();
    double scale = 1.0;
    NormMode mode = NormMode::Canonical;
};

// Floor for normalization scales.
inline constexpr double kScaleEpsilon = 1e-8;

/// N-frame bundle of point maps, forward flows (N-1 of them), poses and masks.
struct SequenceSample {
    std::vector<PointMap> point_maps;
    std::vector<SceneFlow> flows;
    std::vector<CameraPose> poses;
    CameraIntrinsics intrinsics;
    std::optional<std::vector<BoolGrid>> deformability;  // true = dynamic pixel
    std::optional<NormParams> norm;

    int frames() const { return static_cast<int>(point_maps.size()); }
    int height() const { return point_maps.empty() ? 0 : point_maps.front().height(); }
    int width() const { return point_maps.empty() ? 0 : point_maps.front().width(); }
};

/// Checks every structural invariant of a sequence. Returns one message per
/// violation; empty means well-formed. Never throws.
std::vector<std::string> validate_sequence(const SequenceSample& seq);

}  // namespace geomflow
