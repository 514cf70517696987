// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geomflow/types.hpp"

#include <string>

namespace geomflow {

struct AlignParams {
    double s = 1.0;
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    bool degenerate = false;
};

struct MetricsReport {
    double rel_p = 0.0;   // percent
    double delta_p = 0.0; // percent
    double tau = 0.25;
    double epe = 0.0;     // GT metric units
    double apd = 0.0;     // percent
    double gamma = 0.05;
    AlignParams align;
    long long n_points = 0;
    long long n_flows = 0;
};

// GT points closer to the origin than this are excluded from relative errors.
inline constexpr double kRelPGuard = 1e-6;

/// Closed-form least-squares scale and shift aligning pred to gt over all
/// valid points pooled across frames (min_{s,t} sum ||s*pred + t - gt||^2).
/// A non-positive optimal scale is clamped to kScaleEpsilon and flagged.
AlignParams solve_scale_shift(const std::vector<PointMap>& pred, const std::vector<PointMap>& gt,
                              const std::vector<BoolGrid>& masks);

/// Mean relative point error ||pred - gt|| / ||gt|| over evaluated points,
/// times 100. Alignment must already be applied to pred.
double rel_p(const std::vector<PointMap>& pred_aligned, const std::vector<PointMap>& gt,
             const std::vector<BoolGrid>& masks);

/// Percent of evaluated points with relative error strictly below tau.
double delta_p(const std::vector<PointMap>& pred_aligned, const std::vector<PointMap>& gt,
               const std::vector<BoolGrid>& masks, double tau);

/// Mean endpoint error ||s*pred - gt|| of scale-aligned flow (scale only,
/// never shift).
double epe(const std::vector<SceneFlow>& pred_flow, const std::vector<SceneFlow>& gt_flow,
           const std::vector<BoolGrid>& masks, const AlignParams& align);

/// Percent of valid flow vectors with endpoint error strictly below gamma.
double apd(const std::vector<SceneFlow>& pred_flow, const std::vector<SceneFlow>& gt_flow,
           const std::vector<BoolGrid>& masks, const AlignParams& align, double gamma);

/// Full world-space protocol: solve alignment on geometry, apply it, then
/// compute all four metrics.
MetricsReport evaluate_sequence(const SequenceSample& pred, const SequenceSample& gt, double tau, double gamma);

/// Flat key-value text form of a report, one metric per line, 6 decimals.
std::string format_report(const MetricsReport& report);

}  // namespace geomflow
