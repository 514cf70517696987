// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/types.hpp"

namespace geomflow {

struct DepthMap {
    ScalarGrid data;  // depth along camera z, valid entries strictly positive
    BoolGrid mask;
};

struct NormalMap {
    Vec3Grid data;  // unit normals; invalid entries zero
    BoolGrid mask;
};

// Depth at or below this is treated as invalid.
inline constexpr double kMinDepth = 1e-9;

/// Re-expresses all poses relative to the first one: output[0] is identity and
/// relative motion between consecutive poses is preserved.
std::vector<CameraPose> normalize_poses(const std::vector<CameraPose>& poses);

/// Maps a camera-frame point map into the world (first-camera) frame using a
/// canonicalized pose. Invalid pixels stay at the placeholder.
PointMap cam_to_world_points(const PointMap& pm, const CameraPose& pose);

/// Pixel-aligned depth of a world-frame point map seen from `pose`: the camera
/// z of each point at its own grid location. Non-positive z is invalid.
DepthMap project_depth(const PointMap& pm, const CameraPose& pose, const CameraIntrinsics& K);

/// Central-difference surface normals. A pixel is valid only when the full
/// 5-point stencil is valid and the cross product is nonzero. Orientation is
/// cross(d/dy, d/dx), which faces the camera for a fronto-parallel plane under
/// the x-right, y-down, z-forward convention.
NormalMap compute_normals(const PointMap& pm);

/// Fills invalid pixels from a mask-weighted average pyramid (coarse-to-fine).
/// Valid pixels and the mask are unchanged; the fill is cosmetic only.
PointMap pyramid_pad(const PointMap& pm);

}  // namespace geomflow
