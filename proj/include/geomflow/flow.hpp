// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/types.hpp"

namespace geomflow {

/// Converts a camera-frame scene flow into the world frame:
/// V = (R_{i+1}(x + v) + t_{i+1}) - (R_i x + t_i), with canonicalized poses.
/// Camera-frame flow is defined so that x + v is the moved point expressed in
/// the next camera's coordinates. Output mask is the AND of the inputs.
SceneFlow flow_to_world(const PointMap& pm_cam_i, const SceneFlow& flow_cam_i, const CameraPose& pose_i,
                        const CameraPose& pose_ip1);

/// The deformed point map X + V on the joint valid mask.
PointMap deform(const PointMap& pm, const SceneFlow& flow);

/// Zeroes flow outside dynamic regions; the validity mask is unchanged.
SceneFlow apply_deformability(const SceneFlow& flow, const BoolGrid& dyn_mask);

}  // namespace geomflow
