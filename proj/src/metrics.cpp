// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace geomflow {

namespace {

void require_matching(size_t a, size_t b, const char* op) {
    if (a != b) throw std::invalid_argument(std::string(op) + ": frame count mismatch");
}

template <typename Fn>
void for_each_valid(const std::vector<PointMap>& pred, const std::vector<PointMap>& gt,
                    const std::vector<BoolGrid>& masks, Fn&& fn) {
    for (size_t f = 0; f < pred.size(); ++f)
        for (size_t i = 0; i < pred[f].data.size(); ++i)
            if (masks[f].cells[i] && pred[f].mask.cells[i] && gt[f].mask.cells[i])
                fn(pred[f].data.cells[i], gt[f].data.cells[i]);
}

}  // namespace

AlignParams solve_scale_shift(const std::vector<PointMap>& pred, const std::vector<PointMap>& gt,
                              const std::vector<BoolGrid>& masks) {
    require_matching(pred.size(), gt.size(), "solve_scale_shift");
    Eigen::Vector3d sum_p = Eigen::Vector3d::Zero(), sum_g = Eigen::Vector3d::Zero();
    long long n = 0;
    for_each_valid(pred, gt, masks, [&](const Eigen::Vector3d& p, const Eigen::Vector3d& g) {
        sum_p += p;
        sum_g += g;
        ++n;
    });
    if (n == 0) throw std::invalid_argument("solve_scale_shift: no valid points");
    const Eigen::Vector3d mean_p = sum_p / n, mean_g = sum_g / n;

    double num = 0.0, den = 0.0;
    for_each_valid(pred, gt, masks, [&](const Eigen::Vector3d& p, const Eigen::Vector3d& g) {
        num += (p - mean_p).dot(g - mean_g);
        den += (p - mean_p).squaredNorm();
    });
    AlignParams out;
    if (den == 0.0) {
        out.s = kScaleEpsilon;
        out.degenerate = true;
    } else {
        out.s = num / den;
        if (out.s <= 0.0) {
            out.s = kScaleEpsilon;
            out.degenerate = true;
        }
    }
    out.t = mean_g - out.s * mean_p;
    return out;
}

double rel_p(const std::vector<PointMap>& pred_aligned, const std::vector<PointMap>& gt,
             const std::vector<BoolGrid>& masks) {
    require_matching(pred_aligned.size(), gt.size(), "rel_p");
    double acc = 0.0;
    long long n = 0;
    for_each_valid(pred_aligned, gt, masks, [&](const Eigen::Vector3d& p, const Eigen::Vector3d& g) {
        const double gn = g.norm();
        if (gn < kRelPGuard) return;
        acc += (p - g).norm() / gn;
        ++n;
    });
    if (n == 0) throw std::invalid_argument("rel_p: no evaluable points");
    return 100.0 * acc / static_cast<double>(n);
}

double delta_p(const std::vector<PointMap>& pred_aligned, const std::vector<PointMap>& gt,
               const std::vector<BoolGrid>& masks, double tau) {
    require_matching(pred_aligned.size(), gt.size(), "delta_p");
    long long inliers = 0, n = 0;
    for_each_valid(pred_aligned, gt, masks, [&](const Eigen::Vector3d& p, const Eigen::Vector3d& g) {
        const double gn = g.norm();
        if (gn < kRelPGuard) return;
        if ((p - g).norm() / gn < tau) ++inliers;
        ++n;
    });
    if (n == 0) throw std::invalid_argument("delta_p: no evaluable points");
    return 100.0 * static_cast<double>(inliers) / static_cast<double>(n);
}

double epe(const std::vector<SceneFlow>& pred_flow, const std::vector<SceneFlow>& gt_flow,
           const std::vector<BoolGrid>& masks, const AlignParams& align) {
    require_matching(pred_flow.size(), gt_flow.size(), "epe");
    double acc = 0.0;
    long long n = 0;
    for (size_t f = 0; f < pred_flow.size(); ++f) {
        for (size_t i = 0; i < pred_flow[f].data.size(); ++i) {
            if (!(masks[f].cells[i] && pred_flow[f].mask.cells[i] && gt_flow[f].mask.cells[i])) continue;
            acc += (align.s * pred_flow[f].data.cells[i] - gt_flow[f].data.cells[i]).norm();
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("epe: no valid flow pixels");
    return acc / static_cast<double>(n);
}

double apd(const std::vector<SceneFlow>& pred_flow, const std::vector<SceneFlow>& gt_flow,
           const std::vector<BoolGrid>& masks, const AlignParams& align, double gamma) {
    require_matching(pred_flow.size(), gt_flow.size(), "apd");
    long long inliers = 0, n = 0;
    for (size_t f = 0; f < pred_flow.size(); ++f) {
        for (size_t i = 0; i < pred_flow[f].data.size(); ++i) {
            if (!(masks[f].cells[i] && pred_flow[f].mask.cells[i] && gt_flow[f].mask.cells[i])) continue;
            if ((align.s * pred_flow[f].data.cells[i] - gt_flow[f].data.cells[i]).norm() < gamma) ++inliers;
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("apd: no valid flow pixels");
    return 100.0 * static_cast<double>(inliers) / static_cast<double>(n);
}

MetricsReport evaluate_sequence(const SequenceSample& pred, const SequenceSample& gt, double tau, double gamma) {
    require_matching(pred.point_maps.size(), gt.point_maps.size(), "evaluate_sequence");
    require_matching(pred.flows.size(), gt.flows.size(), "evaluate_sequence(flows)");
    if (pred.height() != gt.height() || pred.width() != gt.width())
        throw std::invalid_argument("evaluate_sequence: shape mismatch");

    std::vector<BoolGrid> point_masks;
    for (size_t f = 0; f < pred.point_maps.size(); ++f)
        point_masks.emplace_back(pred.height(), pred.width(), 1);
    std::vector<BoolGrid> flow_masks;
    for (size_t f = 0; f < pred.flows.size(); ++f) flow_masks.emplace_back(pred.height(), pred.width(), 1);

    MetricsReport report;
    report.tau = tau;
    report.gamma = gamma;
    report.align = solve_scale_shift(pred.point_maps, gt.point_maps, point_masks);

    std::vector<PointMap> aligned = pred.point_maps;
    for (PointMap& pm : aligned)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) pm.data.cells[i] = report.align.s * pm.data.cells[i] + report.align.t;

    report.rel_p = rel_p(aligned, gt.point_maps, point_masks);
    report.delta_p = delta_p(aligned, gt.point_maps, point_masks, tau);
    report.epe = epe(pred.flows, gt.flows, flow_masks, report.align);
    report.apd = apd(pred.flows, gt.flows, flow_masks, report.align, gamma);

    for (size_t f = 0; f < pred.point_maps.size(); ++f)
        for (size_t i = 0; i < pred.point_maps[f].data.size(); ++i)
            if (pred.point_maps[f].mask.cells[i] && gt.point_maps[f].mask.cells[i]) ++report.n_points;
    for (size_t f = 0; f < pred.flows.size(); ++f)
        for (size_t i = 0; i < pred.flows[f].data.size(); ++i)
            if (pred.flows[f].mask.cells[i] && gt.flows[f].mask.cells[i]) ++report.n_flows;
    return report;
}

std::string format_report(const MetricsReport& report) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "rel_p %.6f\n"
                  "delta_p %.6f\n"
                  "tau %.6f\n"
                  "epe %.6f\n"
                  "apd %.6f\n"
                  "gamma %.6f\n"
                  "scale %.6f\n"
                  "shift_x %.6f\n"
                  "shift_y %.6f\n"
                  "shift_z %.6f\n"
                  "n_points %lld\n"
                  "n_flows %lld\n",
                  report.rel_p, report.delta_p, report.tau, report.epe, report.apd, report.gamma, report.align.s,
                  report.align.t.x(), report.align.t.y(), report.align.t.z(), report.n_points, report.n_flows);
    return buf;
}

}  // namespace geomflow
