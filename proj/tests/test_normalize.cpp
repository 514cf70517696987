// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/flow.hpp"
#include "geomflow/normalize.hpp"

#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace geomflow;
using Eigen::Vector3d;

namespace {

SequenceSample two_point_sequence() {
    SequenceSample seq;
    seq.intrinsics = {10, 10, 1, 1, 2, 2};
    for (int i = 0; i < 2; ++i) {
        PointMap pm;
        pm.data = Vec3Grid(1, 2, Vector3d::Zero());
        pm.mask = BoolGrid(1, 2, 0);
        pm.tag = FrameTag::world();
        seq.point_maps.push_back(pm);
        seq.poses.push_back(CameraPose::identity());
    }
    SceneFlow fl;
    fl.data = Vec3Grid(1, 2, Vector3d::Zero());
    fl.mask = BoolGrid(1, 2, 0);
    fl.tag = FrameTag::world();
    seq.flows.push_back(fl);
    // one valid point per frame
    seq.point_maps[0].data.at(0, 0) = Vector3d(1, 2, 3);
    seq.point_maps[0].mask.at(0, 0) = 1;
    seq.point_maps[1].data.at(0, 0) = Vector3d(3, 2, 1);
    seq.point_maps[1].mask.at(0, 0) = 1;
    return seq;
}

void point_stats(const SequenceSample& seq, Vector3d& mu, double& mean_dist) {
    mu.setZero();
    long long n = 0;
    for (const PointMap& pm : seq.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) {
                mu += pm.data.cells[i];
                ++n;
            }
    mu /= static_cast<double>(n);
    mean_dist = 0;
    for (const PointMap& pm : seq.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) mean_dist += (pm.data.cells[i] - mu).norm();
    mean_dist /= static_cast<double>(n);
}

double max_sequence_diff(const SequenceSample& a, const SequenceSample& b) {
    double m = 0.0;
    for (size_t f = 0; f < a.point_maps.size(); ++f)
        m = std::max(m, oracles::max_abs_diff(a.point_maps[f].data, b.point_maps[f].data));
    for (size_t f = 0; f < a.flows.size(); ++f)
        m = std::max(m, oracles::max_abs_diff(a.flows[f].data, b.flows[f].data));
    for (size_t f = 0; f < a.poses.size(); ++f)
        m = std::max(m, (a.poses[f].translation - b.poses[f].translation).cwiseAbs().maxCoeff());
    return m;
}

}  // namespace

TEST_CASE("canonical_normalize: two-point example") {
    const auto [out, params] = canonical_normalize(two_point_sequence());
    CHECK((params.mu - Vector3d(2, 2, 2)).norm() < 1e-12);
    CHECK(params.scale == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK((out.point_maps[0].data.at(0, 0) - Vector3d(-0.70710678, 0, 0.70710678)).norm() < 1e-6);
    CHECK((out.point_maps[1].data.at(0, 0) - Vector3d(0.70710678, 0, -0.70710678)).norm() < 1e-6);
    CHECK(out.point_maps[0].tag == FrameTag::world_normalized());
}

TEST_CASE("canonical_normalize: already-normalized sequences are fixed points") {
    std::mt19937_64 rng(31);
    SequenceSample seq = oracles::random_sequence(rng, 3, 8, 8);
    const SequenceSample once = canonical_normalize(seq).first;
    SequenceSample once_world = once;
    for (PointMap& pm : once_world.point_maps) pm.tag = FrameTag::world();
    const SequenceSample twice = canonical_normalize(once_world).first;
    CHECK(max_sequence_diff(once, twice) < 1e-9);
}

TEST_CASE("canonical_normalize: output statistics are centered and unit-scale") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        const SequenceSample seq = oracles::random_sequence(rng, 4, 8, 8);
        const auto [out, params] = canonical_normalize(seq);
        Vector3d mu;
        double mean_dist;
        point_stats(out, mu, mean_dist);
        CHECK(mu.norm() < 1e-9);
        CHECK(mean_dist == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("canonical_denormalize inverts canonical_normalize") {
    std::mt19937_64 rng(33);
    const SequenceSample seq = oracles::random_sequence(rng, 3, 8, 8);
    const auto [normalized, params] = canonical_normalize(seq);
    const SequenceSample back = canonical_denormalize(normalized, params);
    CHECK(max_sequence_diff(seq, back) < 1e-9);

    // identity params
    SequenceSample tagged = normalized;
    const SequenceSample same = canonical_denormalize(tagged, NormParams{Vector3d::Zero(), 1.0, NormMode::Canonical});
    CHECK(max_sequence_diff(normalized, same) == 0.0);

    // explicit affine map
    SequenceSample unit = two_point_sequence();
    for (PointMap& pm : unit.point_maps) pm.tag = FrameTag::world_normalized();
    const SequenceSample mapped =
        canonical_denormalize(unit, NormParams{Vector3d(1, 1, 1), 2.0, NormMode::Canonical});
    CHECK(mapped.point_maps[0].data.at(0, 0) == Vector3d(3, 5, 7));

    CHECK_THROWS(canonical_denormalize(unit, NormParams{Vector3d::Zero(), 1.0, NormMode::Max}));
}

TEST_CASE("canonical_normalize is invariant to global scale and translation") {
    std::mt19937_64 rng(34);
    const SequenceSample seq = oracles::random_sequence(rng, 3, 8, 8);
    const SequenceSample base = canonical_normalize(seq).first;
    for (double k : {0.01, 100.0}) {
        SequenceSample scaled = seq;
        for (PointMap& pm : scaled.point_maps)
            for (auto& v : pm.data.cells) v *= k;
        for (SceneFlow& fl : scaled.flows)
            for (auto& v : fl.data.cells) v *= k;
        for (CameraPose& p : scaled.poses) p.translation *= k;
        CHECK(max_sequence_diff(base, canonical_normalize(scaled).first) < 1e-9);
    }
    const Vector3d shift(17.0, -4.0, 9.0);
    SequenceSample moved = seq;
    for (PointMap& pm : moved.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) pm.data.cells[i] += shift;
    for (CameraPose& p : moved.poses) p.translation += shift;
    CHECK(max_sequence_diff(base, canonical_normalize(moved).first) < 1e-9);
}

TEST_CASE("canonical normalization commutes with deformation") {
    std::mt19937_64 rng(35);
    const SequenceSample seq = oracles::random_sequence(rng, 3, 8, 8);
    const auto [normalized, params] = canonical_normalize(seq);
    const PointMap deformed_raw = deform(seq.point_maps[0], seq.flows[0]);
    const PointMap deformed_norm = deform(normalized.point_maps[0], normalized.flows[0]);
    for (size_t i = 0; i < deformed_raw.data.size(); ++i)
        if (deformed_raw.mask.cells[i]) {
            const Vector3d expect = (deformed_raw.data.cells[i] - params.mu) / params.scale;
            CHECK((deformed_norm.data.cells[i] - expect).norm() < 1e-9);
        }
}

TEST_CASE("max_normalize maps the bounding box into [-1,1]") {
    std::mt19937_64 rng(36);
    SequenceSample seq = oracles::random_sequence(rng, 2, 8, 8);
    // force a known bbox
    seq.point_maps[0].data.at(0, 0) = Vector3d(-2, -2, -2);
    seq.point_maps[0].mask.at(0, 0) = 1;
    seq.point_maps[1].data.at(0, 1) = Vector3d(2, 2, 2);
    seq.point_maps[1].mask.at(0, 1) = 1;
    for (size_t f = 0; f < 2; ++f)
        for (auto& v : seq.point_maps[f].data.cells) v = v.cwiseMax(-2.0).cwiseMin(2.0);
    const auto [out, params] = max_normalize(seq);
    CHECK(params.scale == doctest::Approx(2.0).epsilon(1e-12));
    for (const PointMap& pm : out.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) CHECK(pm.data.cells[i].cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    CHECK(out.point_maps[0].data.at(0, 0) == Vector3d(-1, -1, -1));
}

TEST_CASE("max_normalize: offset cluster and degenerate cases") {
    SequenceSample seq = two_point_sequence();
    seq.point_maps[0].data.at(0, 0) = Vector3d(9.5, 10.5, 10.0);
    seq.point_maps[1].data.at(0, 0) = Vector3d(10.5, 9.5, 10.0);
    auto [out, params] = max_normalize(seq);
    CHECK((params.mu - Vector3d(10, 10, 10)).norm() < 1e-12);
    for (const PointMap& pm : out.point_maps)
        if (pm.mask.at(0, 0)) CHECK(pm.data.at(0, 0).cwiseAbs().maxCoeff() <= 1.0 + 1e-12);

    // all points identical: scale clamps to epsilon, output zero
    seq.point_maps[1].data.at(0, 0) = Vector3d(9.5, 10.5, 10.0);
    auto [degen, dparams] = max_normalize(seq);
    CHECK(dparams.scale == kScaleEpsilon);
    CHECK(degen.point_maps[0].data.at(0, 0) == Vector3d::Zero());
}
