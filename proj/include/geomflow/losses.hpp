// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/geometry.hpp"
#include "geomflow/types.hpp"

#include <string>

namespace geomflow {

/// Scalar loss plus the analytic gradient with respect to the prediction
/// (same H×W×3 layout as the predicted map).
struct LossResult {
    double value = 0.0;
    Vec3Grid grad;
};

struct LossWeights {
    double lambda_point = 1.0;
    double lambda_l1_depth = 1.0;
    double lambda_patch_depth = 1.0;
    double lambda_normal = 0.2;
    double lambda_reg = 0.01;
    std::vector<int> patch_scales = {4, 16, 64};
};

/// Mean squared point-map error over the valid set; grad = 2(pred-gt)/n.
LossResult point_loss(const PointMap& pred, const PointMap& gt, const BoolGrid& mask);

/// Mean absolute depth difference after projecting both point maps to
/// pixel-aligned depth. Gradient flows only along the camera z axis.
LossResult depth_l1_loss(const PointMap& pred_pm, const PointMap& gt_pm, const CameraPose& pose,
                         const CameraIntrinsics& K);

/// Multi-scale patch depth loss: per scale the depth maps are split into s×s
/// patches, the masked patch mean is subtracted from each, and the mean
/// absolute residual difference is accumulated. Invariant to a global depth
/// bias of the prediction.
LossResult patch_depth_loss(const PointMap& pred_pm, const PointMap& gt_pm, const CameraPose& pose,
                            const CameraIntrinsics& K, const std::vector<int>& scales);

/// Mean (1 - <n_pred, n_gt>) over pixels where both normal stencils are valid.
LossResult normal_loss(const PointMap& pred_pm, const PointMap& gt_pm, const BoolGrid& mask);

/// Weighted sum: lambda_point * point + lambda_l1_depth * L1 depth
/// + lambda_patch_depth * patch depth + lambda_normal * normal.
LossResult geometry_loss(const PointMap& pred_pm, const PointMap& gt_pm, const CameraPose& pose,
                         const CameraIntrinsics& K, const LossWeights& weights);

/// Scene-flow MSE on the valid set plus lambda_reg times the mean squared
/// flow magnitude over ALL pixels (zero-flow regularization; this second term
/// deliberately reaches masked-out pixels).
LossResult motion_loss(const SceneFlow& pred_flow, const SceneFlow& gt_flow, const BoolGrid& valid_mask,
                       const LossWeights& weights);

struct GradCheckReport {
    std::string loss_id;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Central finite-difference check (h = 1e-4) of one loss's analytic gradient
/// at `trial_count` random coordinates. loss_id is one of: point, depth_l1,
/// patch_depth, normal, motion.
GradCheckReport gradcheck(const std::string& loss_id, int trial_count, uint64_t seed);

}  // namespace geomflow
