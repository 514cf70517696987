// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geomflow {

namespace {

// Neumaier-compensated sum; plain accumulation loses too many digits when the
// sequence sits far from the origin.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

void require_world(const SequenceSample& seq, const char* op) {
    for (const PointMap& pm : seq.point_maps)
        if (pm.tag.kind != FrameKind::World) throw std::invalid_argument(std::string(op) + ": points must be world-frame");
}

// Shifts points and pose translations by -mu and divides everything by scale.
SequenceSample apply_norm(const SequenceSample& seq, const Eigen::Vector3d& mu, double scale, NormMode mode) {
    SequenceSample out = seq;
    for (PointMap& pm : out.point_maps) {
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) pm.data.cells[i] = (pm.data.cells[i] - mu) / scale;
        pm.tag = FrameTag::world_normalized();
    }
    for (SceneFlow& fl : out.flows) {
        for (size_t i = 0; i < fl.data.size(); ++i)
            if (fl.mask.cells[i]) fl.data.cells[i] /= scale;
        fl.tag = FrameTag::world_normalized();
    }
    for (CameraPose& p : out.poses) p.translation = (p.translation - mu) / scale;
    out.norm = NormParams{mu, scale, mode};
    return out;
}

}  // namespace

std::pair<SequenceSample, NormParams> canonical_normalize(const SequenceSample& seq) {
    require_world(seq, "canonical_normalize");
    KahanSum sx, sy, sz;
    long long count = 0;
    for (const PointMap& pm : seq.point_maps) {
        for (size_t i = 0; i < pm.data.size(); ++i) {
            if (!pm.mask.cells[i]) continue;
            sx.add(pm.data.cells[i].x());
            sy.add(pm.data.cells[i].y());
            sz.add(pm.data.cells[i].z());
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("canonical_normalize: no valid points");
    const Eigen::Vector3d mu(sx.value() / count, sy.value() / count, sz.value() / count);

    KahanSum dist;
    for (const PointMap& pm : seq.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) dist.add((pm.data.cells[i] - mu).norm());
    const double scale = std::max(dist.value() / count, kScaleEpsilon);

    NormParams params{mu, scale, NormMode::Canonical};
    return {apply_norm(seq, mu, scale, NormMode::Canonical), params};
}

SequenceSample canonical_denormalize(const SequenceSample& seq, const NormParams& params) {
    if (params.mode != NormMode::Canonical)
        throw std::invalid_argument("canonical_denormalize: params.mode must be canonical");
    SequenceSample out = seq;
    for (PointMap& pm : out.point_maps) {
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) pm.data.cells[i] = pm.data.cells[i] * params.scale + params.mu;
        pm.tag = FrameTag::world();
    }
    for (SceneFlow& fl : out.flows) {
        for (size_t i = 0; i < fl.data.size(); ++i)
            if (fl.mask.cells[i]) fl.data.cells[i] *= params.scale;
        fl.tag = FrameTag::world();
    }
    for (CameraPose& p : out.poses) p.translation = p.translation * params.scale + params.mu;
    out.norm.reset();
    return out;
}

std::pair<SequenceSample, NormParams> max_normalize(const SequenceSample& seq) {
    require_world(seq, "max_normalize");
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    long long count = 0;
    for (const PointMap& pm : seq.point_maps) {
        for (size_t i = 0; i < pm.data.size(); ++i) {
            if (!pm.mask.cells[i]) continue;
            lo = lo.cwiseMin(pm.data.cells[i]);
            hi = hi.cwiseMax(pm.data.cells[i]);
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("max_normalize: no valid points");
    const Eigen::Vector3d mu = 0.5 * (lo + hi);
    const double scale = std::max(0.5 * (hi - lo).maxCoeff(), kScaleEpsilon);

    NormParams params{mu, scale, NormMode::Max};
    return {apply_norm(seq, mu, scale, NormMode::Max), params};
}

}  // namespace geomflow
