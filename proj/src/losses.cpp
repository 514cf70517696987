// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/losses.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace geomflow {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_same_shape(int h1, int w1, int h2, int w2, const char* op) {
    if (h1 != h2 || w1 != w2) throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

LossResult point_loss(const PointMap& pred, const PointMap& gt, const BoolGrid& mask) {
    require_same_shape(pred.height(), pred.width(), gt.height(), gt.width(), "point_loss");
    LossResult out;
    out.grad = Vec3Grid(pred.height(), pred.width(), Eigen::Vector3d::Zero());
    long long n = 0;
    for (size_t i = 0; i < pred.data.size(); ++i)
        if (mask.cells[i] && pred.mask.cells[i] && gt.mask.cells[i]) ++n;
    if (n == 0) return out;
    double acc = 0.0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        if (!(mask.cells[i] && pred.mask.cells[i] && gt.mask.cells[i])) continue;
        const Eigen::Vector3d d = pred.data.cells[i] - gt.data.cells[i];
        acc += d.squaredNorm();
        out.grad.cells[i] = 2.0 * d / static_cast<double>(n);
    }
    out.value = acc / static_cast<double>(n);
    return out;
}

LossResult depth_l1_loss(const PointMap& pred_pm, const PointMap& gt_pm, const CameraPose& pose,
                         const CameraIntrinsics& K) {
    require_same_shape(pred_pm.height(), pred_pm.width(), gt_pm.height(), gt_pm.width(), "depth_l1_loss");
    const DepthMap dp = project_depth(pred_pm, pose, K);
    const DepthMap dg = project_depth(gt_pm, pose, K);
    LossResult out;
    out.grad = Vec3Grid(pred_pm.height(), pred_pm.width(), Eigen::Vector3d::Zero());
    long long n = 0;
    for (size_t i = 0; i < dp.data.size(); ++i)
        if (dp.mask.cells[i] && dg.mask.cells[i]) ++n;
    if (n == 0) return out;
    const Eigen::Vector3d axis_z = pose.rotation.col(2);
    double acc = 0.0;
    for (size_t i = 0; i < dp.data.size(); ++i) {
        if (!(dp.mask.cells[i] && dg.mask.cells[i])) continue;
        const double d = dp.data.cells[i] - dg.data.cells[i];
        acc += std::abs(d);
        out.grad.cells[i] = (sgn(d) / static_cast<double>(n)) * axis_z;
    }
    out.value = acc / static_cast<double>(n);
    return out;
}

LossResult patch_depth_loss(const PointMap& pred_pm, const PointMap& gt_pm, const CameraPose& pose,
                            const CameraIntrinsics& K, const std::vector<int>& scales) {
    require_same_shape(pred_pm.height(), pred_pm.width(), gt_pm.height(), gt_pm.width(), "patch_depth_loss");
    const int h = pred_pm.height(), w = pred_pm.width();
    const DepthMap dp = project_depth(pred_pm, pose, K);
    const DepthMap dg = project_depth(gt_pm, pose, K);
    LossResult out;
    out.grad = Vec3Grid(h, w, Eigen::Vector3d::Zero());
    long long n_valid = 0;
    for (size_t i = 0; i < dp.data.size(); ++i)
        if (dp.mask.cells[i] && dg.mask.cells[i]) ++n_valid;
    if (n_valid == 0) return out;

    const Eigen::Vector3d axis_z = pose.rotation.col(2);
    ScalarGrid grad_d(h, w, 0.0);
    for (int s : scales) {
        double acc = 0.0;
        // Trailing partial patches keep their actual (smaller) size.
        for (int pr = 0; pr < h; pr += s) {
            for (int pc = 0; pc < w; pc += s) {
                const int r1 = std::min(pr + s, h), c1 = std::min(pc + s, w);
                double sum_p = 0.0, sum_g = 0.0;
                long long np = 0;
                for (int r = pr; r < r1; ++r) {
                    for (int c = pc; c < c1; ++c) {
                        if (!(dp.mask.at(r, c) && dg.mask.at(r, c))) continue;
                        sum_p += dp.data.at(r, c);
                        sum_g += dg.data.at(r, c);
                        ++np;
                    }
                }
                if (np == 0) continue;
                const double mean_p = sum_p / np, mean_g = sum_g / np;
                double sign_sum = 0.0;
                for (int r = pr; r < r1; ++r) {
                    for (int c = pc; c < c1; ++c) {
                        if (!(dp.mask.at(r, c) && dg.mask.at(r, c))) continue;
                        const double e = (dp.data.at(r, c) - mean_p) - (dg.data.at(r, c) - mean_g);
                        acc += std::abs(e);
                        sign_sum += sgn(e);
                    }
                }
                for (int r = pr; r < r1; ++r) {
                    for (int c = pc; c < c1; ++c) {
                        if (!(dp.mask.at(r, c) && dg.mask.at(r, c))) continue;
                        const double e = (dp.data.at(r, c) - mean_p) - (dg.data.at(r, c) - mean_g);
                        grad_d.at(r, c) += (sgn(e) - sign_sum / np) / static_cast<double>(n_valid);
                    }
                }
            }
        }
        out.value += acc / static_cast<double>(n_valid);
    }
    for (size_t i = 0; i < grad_d.size(); ++i)
        if (grad_d.cells[i] != 0.0) out.grad.cells[i] = grad_d.cells[i] * axis_z;
    return out;
}

LossResult normal_loss(const PointMap& pred_pm, const PointMap& gt_pm, const BoolGrid& mask) {
    require_same_shape(pred_pm.height(), pred_pm.width(), gt_pm.height(), gt_pm.width(), "normal_loss");
    const int h = pred_pm.height(), w = pred_pm.width();
    const NormalMap np = compute_normals(pred_pm);
    const NormalMap ng = compute_normals(gt_pm);
    LossResult out;
    out.grad = Vec3Grid(h, w, Eigen::Vector3d::Zero());
    long long n = 0;
    for (int r = 1; r < h - 1; ++r)
        for (int c = 1; c < w - 1; ++c)
            if (mask.at(r, c) && np.mask.at(r, c) && ng.mask.at(r, c)) ++n;
    if (n == 0) return out;
    double acc = 0.0;
    for (int r = 1; r < h - 1; ++r) {
        for (int c = 1; c < w - 1; ++c) {
            if (!(mask.at(r, c) && np.mask.at(r, c) && ng.mask.at(r, c))) continue;
            const Eigen::Vector3d& nn = np.data.at(r, c);
            const Eigen::Vector3d& g = ng.data.at(r, c);
            // unit vectors: the dot can only exceed 1 through rounding noise
            acc += std::max(0.0, 1.0 - nn.dot(g));

            const Eigen::Vector3d tx = pred_pm.data.at(r, c + 1) - pred_pm.data.at(r, c - 1);
            const Eigen::Vector3d ty = pred_pm.data.at(r + 1, c) - pred_pm.data.at(r - 1, c);
            const double ulen = ty.cross(tx).norm();
            // d/du of (1 - <u/|u|, g>), scaled by 1/n
            const Eigen::Vector3d wu = -(g - nn.dot(g) * nn) / (ulen * static_cast<double>(n));
            const Eigen::Vector3d dtx = wu.cross(ty);  // [ty]x^T wu
            const Eigen::Vector3d dty = tx.cross(wu);  // (-[tx]x)^T wu
            out.grad.at(r, c + 1) += dtx;
            out.grad.at(r, c - 1) -= dtx;
            out.grad.at(r + 1, c) += dty;
            out.grad.at(r - 1, c) -= dty;
        }
    }
    out.value = acc / static_cast<double>(n);
    return out;
}

LossResult geometry_loss(const PointMap& pred_pm, const PointMap& gt_pm, const CameraPose& pose,
                         const CameraIntrinsics& K, const LossWeights& weights) {
    const BoolGrid all(pred_pm.height(), pred_pm.width(), 1);
    const LossResult lp = point_loss(pred_pm, gt_pm, all);
    const LossResult ld = depth_l1_loss(pred_pm, gt_pm, pose, K);
    const LossResult lpd = patch_depth_loss(pred_pm, gt_pm, pose, K, weights.patch_scales);
    const LossResult ln = normal_loss(pred_pm, gt_pm, all);
    LossResult out;
    out.value = weights.lambda_point * lp.value + weights.lambda_l1_depth * ld.value +
                weights.lambda_patch_depth * lpd.value + weights.lambda_normal * ln.value;
    out.grad = Vec3Grid(pred_pm.height(), pred_pm.width(), Eigen::Vector3d::Zero());
    for (size_t i = 0; i < out.grad.size(); ++i)
        out.grad.cells[i] = weights.lambda_point * lp.grad.cells[i] + weights.lambda_l1_depth * ld.grad.cells[i] +
                            weights.lambda_patch_depth * lpd.grad.cells[i] + weights.lambda_normal * ln.grad.cells[i];
    return out;
}

LossResult motion_loss(const SceneFlow& pred_flow, const SceneFlow& gt_flow, const BoolGrid& valid_mask,
                       const LossWeights& weights) {
    require_same_shape(pred_flow.height(), pred_flow.width(), gt_flow.height(), gt_flow.width(), "motion_loss");
    const size_t n_all = pred_flow.data.size();
    LossResult out;
    out.grad = Vec3Grid(pred_flow.height(), pred_flow.width(), Eigen::Vector3d::Zero());
    long long n_valid = 0;
    for (size_t i = 0; i < n_all; ++i)
        if (valid_mask.cells[i] && pred_flow.mask.cells[i] && gt_flow.mask.cells[i]) ++n_valid;

    double recon = 0.0, reg = 0.0;
    for (size_t i = 0; i < n_all; ++i) {
        const Eigen::Vector3d& v = pred_flow.data.cells[i];
        reg += v.squaredNorm();
        out.grad.cells[i] = (2.0 * weights.lambda_reg / static_cast<double>(n_all)) * v;
        if (n_valid > 0 && valid_mask.cells[i] && pred_flow.mask.cells[i] && gt_flow.mask.cells[i]) {
            const Eigen::Vector3d d = v - gt_flow.data.cells[i];
            recon += d.squaredNorm();
            out.grad.cells[i] += 2.0 * d / static_cast<double>(n_valid);
        }
    }
    out.value = (n_valid > 0 ? recon / static_cast<double>(n_valid) : 0.0) +
                weights.lambda_reg * reg / static_cast<double>(n_all);
    return out;
}

namespace {

struct GradCheckSetup {
    std::function<double(const Vec3Grid&)> value;
    std::function<Vec3Grid(const Vec3Grid&)> grad;
    Vec3Grid x0;
    double tolerance = 1e-5;
    // L1 terms are non-differentiable where a residual crosses zero; trials
    // are drawn away from those measure-zero kinks.
    std::function<bool(size_t)> trial_ok;
};

PointMap smooth_surface(int h, int w, const CameraIntrinsics& K, double phase_r, double phase_c, std::mt19937_64& rng,
                        double noise, double invalid_frac) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PointMap pm;
    pm.data = Vec3Grid(h, w, Eigen::Vector3d::Zero());
    pm.mask = BoolGrid(h, w, 1);
    pm.tag = FrameTag::world();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double z = 2.0 + 0.4 * std::sin(2.0 * M_PI * r / h + phase_r) +
                             0.4 * std::cos(2.0 * M_PI * c / w + phase_c) + noise * gauss(rng);
            pm.data.at(r, c) =
                Eigen::Vector3d((c + 0.5 - K.cx) / K.fx * z, (r + 0.5 - K.cy) / K.fy * z, z);
            if (uni(rng) < invalid_frac) {
                pm.mask.at(r, c) = 0;
                pm.data.at(r, c).setZero();
            }
        }
    }
    return pm;
}

CameraPose small_random_pose(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Eigen::Vector3d axis = Eigen::Vector3d(uni(rng), uni(rng), uni(rng)).normalized();
    const double angle = 0.2 * uni(rng);
    CameraPose p;
    p.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    p.translation = 0.1 * Eigen::Vector3d(uni(rng), uni(rng), uni(rng));
    return p;
}

GradCheckSetup make_setup(const std::string& loss_id, std::mt19937_64& rng) {
    const int h = 16, w = 16;
    CameraIntrinsics K{20.0, 20.0, w / 2.0, h / 2.0, w, h};
    GradCheckSetup s;
    if (loss_id == "motion") {
        std::normal_distribution<double> gauss(0.0, 0.3);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        SceneFlow gt, pred_template;
        gt.data = Vec3Grid(h, w, Eigen::Vector3d::Zero());
        gt.mask = BoolGrid(h, w, 1);
        gt.tag = FrameTag::world();
        pred_template = gt;
        BoolGrid mask(h, w, 1);
        for (size_t i = 0; i < gt.data.size(); ++i) {
            gt.data.cells[i] = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
            pred_template.data.cells[i] = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
            if (uni(rng) < 0.15) mask.cells[i] = 0;
        }
        s.x0 = pred_template.data;
        LossWeights weights;
        auto eval = [=](const Vec3Grid& x) {
            SceneFlow pred = pred_template;
            pred.data = x;
            return motion_loss(pred, gt, mask, weights);
        };
        s.value = [eval](const Vec3Grid& x) { return eval(x).value; };
        s.grad = [eval](const Vec3Grid& x) { return eval(x).grad; };
        return s;
    }

    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const double noise = (loss_id == "normal") ? 0.0 : 0.02;
    const PointMap gt = smooth_surface(h, w, K, phase(rng), phase(rng), rng, noise, 0.1);
    PointMap pred_template = smooth_surface(h, w, K, phase(rng), phase(rng), rng, noise, 0.1);
    const CameraPose pose = small_random_pose(rng);
    const BoolGrid all(h, w, 1);
    s.x0 = pred_template.data;

    std::function<LossResult(const PointMap&)> eval;
    if (loss_id == "point") {
        eval = [=](const PointMap& p) { return point_loss(p, gt, all); };
    } else if (loss_id == "depth_l1" || loss_id == "patch_depth") {
        const DepthMap dp = project_depth(pred_template, pose, K);
        const DepthMap dg = project_depth(gt, pose, K);
        BoolGrid ok(h, w, 0);
        for (size_t i = 0; i < ok.size(); ++i)
            ok.cells[i] = dp.mask.cells[i] && dg.mask.cells[i] &&
                          std::abs(dp.data.cells[i] - dg.data.cells[i]) > 1e-3;
        const std::vector<int> scales = {4, 16};
        if (loss_id == "patch_depth") {
            for (int sc : scales) {
                for (int pr = 0; pr < h; pr += sc) {
                    for (int pc = 0; pc < w; pc += sc) {
                        const int r1 = std::min(pr + sc, h), c1 = std::min(pc + sc, w);
                        double sum = 0.0;
                        long long np = 0;
                        for (int r = pr; r < r1; ++r)
                            for (int c = pc; c < c1; ++c)
                                if (dp.mask.at(r, c) && dg.mask.at(r, c)) {
                                    sum += dp.data.at(r, c) - dg.data.at(r, c);
                                    ++np;
                                }
                        if (np == 0) continue;
                        const double mean = sum / np;
                        for (int r = pr; r < r1; ++r)
                            for (int c = pc; c < c1; ++c)
                                if (dp.mask.at(r, c) && dg.mask.at(r, c) &&
                                    std::abs(dp.data.at(r, c) - dg.data.at(r, c) - mean) <= 1e-3)
                                    ok.at(r, c) = 0;
                    }
                }
            }
        }
        s.trial_ok = [ok](size_t i) { return ok.cells[i] != 0; };
        if (loss_id == "depth_l1")
            eval = [=](const PointMap& p) { return depth_l1_loss(p, gt, pose, K); };
        else
            eval = [=](const PointMap& p) { return patch_depth_loss(p, gt, pose, K, scales); };
    } else if (loss_id == "normal") {
        s.tolerance = 1e-4;
        eval = [=](const PointMap& p) { return normal_loss(p, gt, all); };
    } else {
        throw std::invalid_argument("gradcheck: unknown loss_id '" + loss_id + "'");
    }
    s.value = [eval, pred_template](const Vec3Grid& x) {
        PointMap p = pred_template;
        p.data = x;
        return eval(p).value;
    };
    s.grad = [eval, pred_template](const Vec3Grid& x) {
        PointMap p = pred_template;
        p.data = x;
        return eval(p).grad;
    };
    return s;
}

}  // namespace

GradCheckReport gradcheck(const std::string& loss_id, int trial_count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    GradCheckSetup s = make_setup(loss_id, rng);
    const Vec3Grid analytic = s.grad(s.x0);
    const double h_step = 1e-4;
    std::uniform_int_distribution<size_t> pick(0, s.x0.size() - 1);
    std::uniform_int_distribution<int> chan(0, 2);

    GradCheckReport report;
    report.loss_id = loss_id;
    report.tolerance = s.tolerance;
    for (int t = 0; t < trial_count; ++t) {
        size_t i = pick(rng);
        for (int attempt = 0; attempt < 1000 && s.trial_ok && !s.trial_ok(i); ++attempt) i = pick(rng);
        const int ch = chan(rng);
        Vec3Grid x = s.x0;
        x.cells[i][ch] += h_step;
        const double fp = s.value(x);
        x.cells[i][ch] = s.x0.cells[i][ch] - h_step;
        const double fm = s.value(x);
        const double fd = (fp - fm) / (2.0 * h_step);
        const double an = analytic.cells[i][ch];
        const double rel = std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
        report.max_rel_error = std::max(report.max_rel_error, rel);
    }
    report.pass = report.max_rel_error < report.tolerance;
    return report;
}

}  // namespace geomflow
