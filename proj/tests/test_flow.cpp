// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/flow.hpp"
#include "geomflow/geometry.hpp"

#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace geomflow;
using Eigen::Vector3d;

namespace {

SceneFlow zero_flow(int h, int w, int frame) {
    SceneFlow fl;
    fl.data = Vec3Grid(h, w, Vector3d::Zero());
    fl.mask = BoolGrid(h, w, 1);
    fl.tag = FrameTag::camera(frame);
    return fl;
}

}  // namespace

TEST_CASE("flow_to_world: static point, static camera") {
    std::mt19937_64 rng(21);
    const PointMap pm = oracles::random_point_map(rng, 4, 4, FrameTag::camera(0));
    const SceneFlow out = flow_to_world(pm, zero_flow(4, 4, 0), CameraPose::identity(), CameraPose::identity());
    for (size_t i = 0; i < out.data.size(); ++i) CHECK(out.data.cells[i].norm() == 0.0);
}

TEST_CASE("flow_to_world: camera motion cancels for static world points") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        const auto canon = normalize_poses({oracles::random_pose(rng), oracles::random_pose(rng)});
        PointMap pm;
        pm.data = Vec3Grid(4, 4);
        pm.mask = BoolGrid(4, 4, 1);
        pm.tag = FrameTag::camera(0);
        SceneFlow fl = zero_flow(4, 4, 0);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        for (size_t i = 0; i < pm.data.size(); ++i) {
            const Vector3d x_world(uni(rng), uni(rng), uni(rng));
            // apparent camera-frame motion of a fixed world point
            pm.data.cells[i] = canon[0].to_camera(x_world);
            fl.data.cells[i] = canon[1].to_camera(x_world) - canon[0].to_camera(x_world);
        }
        const SceneFlow out = flow_to_world(pm, fl, canon[0], canon[1]);
        for (size_t i = 0; i < out.data.size(); ++i) CHECK(out.data.cells[i].norm() < 1e-12);
    }
}

TEST_CASE("flow_to_world matches the per-point homogeneous oracle") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto canon = normalize_poses({oracles::random_pose(rng), oracles::random_pose(rng)});
        const PointMap pm = oracles::random_point_map(rng, 4, 4, FrameTag::camera(0));
        SceneFlow fl = zero_flow(4, 4, 0);
        std::uniform_real_distribution<double> uni(-0.5, 0.5);
        for (auto& v : fl.data.cells) v = Vector3d(uni(rng), uni(rng), uni(rng));
        fl.mask.at(1, 2) = 0;

        const SceneFlow out = flow_to_world(pm, fl, canon[0], canon[1]);
        const Eigen::Matrix4d m0 = oracles::to_homogeneous(canon[0]);
        const Eigen::Matrix4d m1 = oracles::to_homogeneous(canon[1]);
        for (size_t i = 0; i < out.data.size(); ++i) {
            if (!pm.mask.cells[i] || !fl.mask.cells[i]) {
                CHECK(!out.mask.cells[i]);
                CHECK(out.data.cells[i] == Vector3d::Zero());
                continue;
            }
            const Vector3d expect = oracles::apply_homogeneous(m1, pm.data.cells[i] + fl.data.cells[i]) -
                                    oracles::apply_homogeneous(m0, pm.data.cells[i]);
            CHECK((out.data.cells[i] - expect).norm() < 1e-12);
        }
    }
}

TEST_CASE("flow_to_world is equivariant under a global rigid transform") {
    std::mt19937_64 rng(24);
    const auto canon = normalize_poses({oracles::random_pose(rng), oracles::random_pose(rng)});
    const PointMap pm = oracles::random_point_map(rng, 5, 5, FrameTag::camera(0), 0.0);
    SceneFlow fl = zero_flow(5, 5, 0);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (auto& v : fl.data.cells) v = Vector3d(uni(rng), uni(rng), uni(rng));
    const SceneFlow base = flow_to_world(pm, fl, canon[0], canon[1]);

    const CameraPose g = oracles::random_pose(rng);
    std::vector<CameraPose> moved;
    for (const CameraPose& p : canon)
        moved.push_back({g.rotation * p.rotation, g.rotation * p.translation + g.translation});
    const SceneFlow transformed = flow_to_world(pm, fl, moved[0], moved[1]);
    for (size_t i = 0; i < base.data.size(); ++i)
        CHECK((transformed.data.cells[i] - g.rotation * base.data.cells[i]).norm() < 1e-12);
}

TEST_CASE("deform: zero and constant flows") {
    std::mt19937_64 rng(25);
    const PointMap pm = oracles::random_point_map(rng, 4, 4, FrameTag::world());
    SceneFlow fl = zero_flow(4, 4, 0);
    fl.tag = FrameTag::world();
    PointMap out = deform(pm, fl);
    for (size_t i = 0; i < pm.data.size(); ++i)
        if (out.mask.cells[i]) CHECK(out.data.cells[i] == pm.data.cells[i]);

    for (auto& v : fl.data.cells) v = Vector3d(1, 0, 0);
    out = deform(pm, fl);
    for (size_t i = 0; i < pm.data.size(); ++i)
        if (out.mask.cells[i]) CHECK(out.data.cells[i] == pm.data.cells[i] + Vector3d(1, 0, 0));
}

TEST_CASE("apply_deformability zeroes exactly the non-dynamic cells") {
    std::mt19937_64 rng(26);
    SceneFlow fl = zero_flow(4, 4, 0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : fl.data.cells) v = Vector3d(uni(rng), uni(rng), uni(rng));

    BoolGrid all_true(4, 4, 1);
    CHECK(oracles::max_abs_diff(apply_deformability(fl, all_true).data, fl.data) == 0.0);

    BoolGrid all_false(4, 4, 0);
    for (const auto& v : apply_deformability(fl, all_false).data.cells) CHECK(v == Vector3d::Zero());

    BoolGrid checker(4, 4, 0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) checker.at(r, c) = (r + c) % 2;
    const SceneFlow out = apply_deformability(fl, checker);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            if ((r + c) % 2)
                CHECK(out.data.at(r, c) == fl.data.at(r, c));
            else
                CHECK(out.data.at(r, c) == Vector3d::Zero());
            CHECK(out.mask.at(r, c) == fl.mask.at(r, c));
        }
}
