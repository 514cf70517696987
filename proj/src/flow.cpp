// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/flow.hpp"

#include <stdexcept>

namespace geomflow {

SceneFlow flow_to_world(const PointMap& pm_cam_i, const SceneFlow& flow_cam_i, const CameraPose& pose_i,
                        const CameraPose& pose_ip1) {
    if (pm_cam_i.tag.kind != FrameKind::Camera || flow_cam_i.tag.kind != FrameKind::Camera)
        throw std::invalid_argument("flow_to_world: inputs must be camera-frame");
    if (pm_cam_i.height() != flow_cam_i.height() || pm_cam_i.width() != flow_cam_i.width())
        throw std::invalid_argument("flow_to_world: shape mismatch");
    SceneFlow out;
    out.data = Vec3Grid(pm_cam_i.height(), pm_cam_i.width(), Eigen::Vector3d::Zero());
    out.mask = BoolGrid(pm_cam_i.height(), pm_cam_i.width(), 0);
    out.tag = FrameTag::world();
    for (size_t i = 0; i < out.data.size(); ++i) {
        if (!pm_cam_i.mask.cells[i] || !flow_cam_i.mask.cells[i]) continue;
        const Eigen::Vector3d& x = pm_cam_i.data.cells[i];
        const Eigen::Vector3d moved = pose_ip1.to_world(x + flow_cam_i.data.cells[i]);
        out.data.cells[i] = moved - pose_i.to_world(x);
        out.mask.cells[i] = 1;
    }
    return out;
}

PointMap deform(const PointMap& pm, const SceneFlow& flow) {
    if (pm.height() != flow.height() || pm.width() != flow.width())
        throw std::invalid_argument("deform: shape mismatch");
    PointMap out;
    out.data = Vec3Grid(pm.height(), pm.width(), Eigen::Vector3d::Constant(kInvalidValue));
    out.mask = BoolGrid(pm.height(), pm.width(), 0);
    out.tag = pm.tag;
    for (size_t i = 0; i < out.data.size(); ++i) {
        if (!pm.mask.cells[i] || !flow.mask.cells[i]) continue;
        out.data.cells[i] = pm.data.cells[i] + flow.data.cells[i];
        out.mask.cells[i] = 1;
    }
    return out;
}

SceneFlow apply_deformability(const SceneFlow& flow, const BoolGrid& dyn_mask) {
    if (!dyn_mask.same_shape(flow.height(), flow.width()))
        throw std::invalid_argument("apply_deformability: shape mismatch");
    SceneFlow out = flow;
    for (size_t i = 0; i < out.data.size(); ++i)
        if (!dyn_mask.cells[i]) out.data.cells[i].setZero();
    return out;
}

}  // namespace geomflow
