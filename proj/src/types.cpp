// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/types.hpp"

#include <cmath>

namespace geomflow {

std::string to_string(const FrameTag& tag) {
    switch (tag.kind) {
        case FrameKind::Camera:
            return "camera(" + std::to_string(tag.camera_index) + ")";
        case FrameKind::World:
            return "world";
        case FrameKind::WorldNormalized:
            return "world-normalized";
    }
    return "?";
}

namespace {

bool all_finite(const Eigen::Vector3d& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

void check_map(const Vec3Grid& data, const BoolGrid& mask, int h, int w, int frame, const char* what,
               bool masked_must_be_zero, std::vector<std::string>& out) {
    const std::string where = std::string(what) + "[" + std::to_string(frame) + "]";
    if (!data.same_shape(h, w) || !mask.same_shape(h, w)) {
        out.push_back(where + ": shape mismatch (expected " + std::to_string(h) + "x" + std::to_string(w) + ")");
        return;
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Eigen::Vector3d& v = data.at(r, c);
            if (!all_finite(v)) {
                out.push_back(where + ": non-finite value at (" + std::to_string(r) + "," + std::to_string(c) + ")");
                return;  // one report per map is enough
            }
            if (!mask.at(r, c) && masked_must_be_zero && v != Eigen::Vector3d::Zero()) {
                out.push_back(where + ": masked-out entry not zero at (" + std::to_string(r) + "," +
                              std::to_string(c) + ")");
                return;
            }
        }
    }
}

}  // namespace

std::vector<std::string> validate_sequence(const SequenceSample& seq) {
    std::vector<std::string> out;
    const int n = seq.frames();
    if (n < 2) {
        out.push_back("frames: sequence needs at least 2 frames, got " + std::to_string(n));
        return out;
    }
    const int h = seq.height();
    const int w = seq.width();
    if (h <= 0 || w <= 0) {
        out.push_back("point_maps[0]: empty image");
        return out;
    }
    if (static_cast<int>(seq.flows.size()) != n - 1)
        out.push_back("flows: expected " + std::to_string(n - 1) + " flows for " + std::to_string(n) +
                      " frames, got " + std::to_string(seq.flows.size()));
    if (static_cast<int>(seq.poses.size()) != n)
        out.push_back("poses: expected " + std::to_string(n) + ", got " + std::to_string(seq.poses.size()));
    if (!seq.intrinsics.valid()) out.push_back("intrinsics: invalid pinhole parameters");

    for (int i = 0; i < n; ++i)
        check_map(seq.point_maps[i].data, seq.point_maps[i].mask, h, w, i, "point_maps", true, out);
    for (size_t i = 0; i < seq.flows.size(); ++i)
        check_map(seq.flows[i].data, seq.flows[i].mask, h, w, static_cast<int>(i), "flows", true, out);
    for (size_t i = 0; i < seq.poses.size(); ++i) {
        if (!seq.poses[i].is_rigid())
            out.push_back("poses[" + std::to_string(i) + "]: rotation not orthonormal with det +1");
        if (!all_finite(seq.poses[i].translation))
            out.push_back("poses[" + std::to_string(i) + "]: non-finite translation");
    }
    if (seq.deformability) {
        if (static_cast<int>(seq.deformability->size()) != n - 1)
            out.push_back("deformability: expected " + std::to_string(n - 1) + " masks, got " +
                          std::to_string(seq.deformability->size()));
        for (size_t i = 0; i < seq.deformability->size(); ++i)
            if (!(*seq.deformability)[i].same_shape(h, w))
                out.push_back("deformability[" + std::to_string(i) + "]: shape mismatch");
    }
    if (seq.norm && seq.norm->scale < kScaleEpsilon)
        out.push_back("norm: scale below epsilon");
    return out;
}

}  // namespace geomflow
