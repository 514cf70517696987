// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace geomflow {

std::vector<CameraPose> normalize_poses(const std::vector<CameraPose>& poses) {
    if (poses.empty()) throw std::invalid_argument("normalize_poses: empty pose list");
    const Eigen::Matrix3d r0t = poses.front().rotation.transpose();
    const Eigen::Vector3d t0 = poses.front().translation;
    std::vector<CameraPose> out;
    out.reserve(poses.size());
    for (const CameraPose& p : poses) out.push_back({r0t * p.rotation, r0t * (p.translation - t0)});
    return out;
}

PointMap cam_to_world_points(const PointMap& pm, const CameraPose& pose) {
    if (pm.tag.kind != FrameKind::Camera)
        throw std::invalid_argument("cam_to_world_points: expected camera-frame point map, got " + to_string(pm.tag));
    PointMap out;
    out.data = Vec3Grid(pm.height(), pm.width(), Eigen::Vector3d::Constant(kInvalidValue));
    out.mask = pm.mask;
    out.tag = FrameTag::world();
    for (size_t i = 0; i < pm.data.size(); ++i)
        if (pm.mask.cells[i]) out.data.cells[i] = pose.to_world(pm.data.cells[i]);
    return out;
}

DepthMap project_depth(const PointMap& pm, const CameraPose& pose, const CameraIntrinsics&) {
    if (pm.tag.kind == FrameKind::Camera)
        throw std::invalid_argument("project_depth: expected world-frame point map, got " + to_string(pm.tag));
    DepthMap out;
    out.data = ScalarGrid(pm.height(), pm.width(), kInvalidValue);
    out.mask = BoolGrid(pm.height(), pm.width(), 0);
    const Eigen::Vector3d axis_z = pose.rotation.col(2);
    for (size_t i = 0; i < pm.data.size(); ++i) {
        if (!pm.mask.cells[i]) continue;
        const double z = axis_z.dot(pm.data.cells[i] - pose.translation);
        if (z > kMinDepth) {
            out.data.cells[i] = z;
            out.mask.cells[i] = 1;
        }
    }
    return out;
}

NormalMap compute_normals(const PointMap& pm) {
    const int h = pm.height(), w = pm.width();
    if (h < 3 || w < 3) throw std::invalid_argument("compute_normals: image must be at least 3x3");
    NormalMap out;
    out.data = Vec3Grid(h, w, Eigen::Vector3d::Zero());
    out.mask = BoolGrid(h, w, 0);
    for (int r = 1; r < h - 1; ++r) {
        for (int c = 1; c < w - 1; ++c) {
            if (!pm.mask.at(r, c) || !pm.mask.at(r, c - 1) || !pm.mask.at(r, c + 1) || !pm.mask.at(r - 1, c) ||
                !pm.mask.at(r + 1, c))
                continue;
            const Eigen::Vector3d tx = pm.data.at(r, c + 1) - pm.data.at(r, c - 1);
            const Eigen::Vector3d ty = pm.data.at(r + 1, c) - pm.data.at(r - 1, c);
            const Eigen::Vector3d u = ty.cross(tx);
            const double len = u.norm();
            if (len == 0.0) continue;
            out.data.at(r, c) = u / len;
            out.mask.at(r, c) = 1;
        }
    }
    return out;
}

namespace {

struct PyramidLevel {
    Vec3Grid mean;
    ScalarGrid weight;
};

}  // namespace

PointMap pyramid_pad(const PointMap& pm) {
    const int h = pm.height(), w = pm.width();
    std::vector<PyramidLevel> levels;
    {
        PyramidLevel base;
        base.mean = Vec3Grid(h, w, Eigen::Vector3d::Zero());
        base.weight = ScalarGrid(h, w, 0.0);
        bool any_valid = false;
        for (size_t i = 0; i < pm.data.size(); ++i) {
            if (pm.mask.cells[i]) {
                base.mean.cells[i] = pm.data.cells[i];
                base.weight.cells[i] = 1.0;
                any_valid = true;
            }
        }
        if (!any_valid) throw std::invalid_argument("pyramid_pad: no valid pixels");
        levels.push_back(std::move(base));
    }
    while (levels.back().mean.height > 1 || levels.back().mean.width > 1) {
        const PyramidLevel& fine = levels.back();
        PyramidLevel coarse;
        const int ch = (fine.mean.height + 1) / 2;
        const int cw = (fine.mean.width + 1) / 2;
        coarse.mean = Vec3Grid(ch, cw, Eigen::Vector3d::Zero());
        coarse.weight = ScalarGrid(ch, cw, 0.0);
        for (int r = 0; r < ch; ++r) {
            for (int c = 0; c < cw; ++c) {
                Eigen::Vector3d acc = Eigen::Vector3d::Zero();
                double wsum = 0.0;
                for (int dr = 0; dr < 2; ++dr) {
                    for (int dc = 0; dc < 2; ++dc) {
                        const int fr = 2 * r + dr, fc = 2 * c + dc;
                        if (fr >= fine.mean.height || fc >= fine.mean.width) continue;
                        const double fw = fine.weight.at(fr, fc);
                        acc += fw * fine.mean.at(fr, fc);
                        wsum += fw;
                    }
                }
                if (wsum > 0.0) {
                    coarse.mean.at(r, c) = acc / wsum;
                    coarse.weight.at(r, c) = wsum;
                }
            }
        }
        levels.push_back(std::move(coarse));
    }

    PointMap out = pm;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (pm.mask.at(r, c)) continue;
            for (size_t l = 1; l < levels.size(); ++l) {
                const int lr = r >> l, lc = c >> l;
                if (levels[l].weight.at(lr, lc) > 0.0) {
                    out.data.at(r, c) = levels[l].mean.at(lr, lc);
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace geomflow
