// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/cli.hpp"

#include "geomflow/flow.hpp"
#include "geomflow/geometry.hpp"
#include "geomflow/io.hpp"
#include "geomflow/losses.hpp"
#include "geomflow/metrics.hpp"
#include "geomflow/normalize.hpp"
#include "geomflow/synth.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace geomflow {
namespace cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

int fail(std::ostream& err, const std::string& what) {
    err << "error: " << what << "\n";
    return 1;
}

}  // namespace

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    try {
        synth::SceneConfig cfg;
        if (!args.config_path.empty()) {
            cfg = synth::parse_scene_config(read_file(args.config_path));
            if (args.seed_set) cfg.seed = args.seed;
        } else {
            cfg = synth::default_scene(args.seed);
        }
        const synth::SynthResult result = synth::generate(cfg);
        io::write_sequence(result.world, std::filesystem::path(args.out_dir) / "gt_world");
        io::write_sequence(result.camera, std::filesystem::path(args.out_dir) / "gt_camera");
        out << "wrote " << args.out_dir << "/gt_world and " << args.out_dir << "/gt_camera ("
            << result.world.frames() << " frames, " << result.world.height() << "x" << result.world.width()
            << ")\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
}

int cmd_preprocess(const PreprocessArgs& args, std::ostream& out, std::ostream& err) {
    try {
        SequenceSample seq = io::read_sequence(args.in_dir);
        if (seq.point_maps.empty() || seq.point_maps.front().tag.kind != FrameKind::Camera)
            return fail(err, "preprocess: input must be a camera-frame sequence");
        const std::vector<CameraPose> canon = normalize_poses(seq.poses);

        SequenceSample world;
        world.intrinsics = seq.intrinsics;
        world.poses = canon;
        world.deformability = seq.deformability;
        for (int i = 0; i < seq.frames(); ++i)
            world.point_maps.push_back(cam_to_world_points(seq.point_maps[i], canon[i]));
        for (size_t i = 0; i < seq.flows.size(); ++i) {
            SceneFlow fl = flow_to_world(seq.point_maps[i], seq.flows[i], canon[i], canon[i + 1]);
            if (seq.deformability) fl = apply_deformability(fl, (*seq.deformability)[i]);
            world.flows.push_back(std::move(fl));
        }
        if (args.norm == "canonical")
            world = canonical_normalize(world).first;
        else if (args.norm == "max")
            world = max_normalize(world).first;
        else if (args.norm != "none")
            return fail(err, "preprocess: --norm must be canonical, max or none");
        if (args.pad)
            for (PointMap& pm : world.point_maps) pm = pyramid_pad(pm);
        io::write_sequence(world, args.out_dir);
        out << "wrote " << args.out_dir << " (" << world.frames() << " frames, norm=" << args.norm << ")\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const SequenceSample pred = io::read_sequence(args.pred_dir);
        const SequenceSample gt = io::read_sequence(args.gt_dir);
        const MetricsReport report = evaluate_sequence(pred, gt, args.tau, args.gamma);
        const std::string text = format_report(report);
        out << text;
        if (!args.report_path.empty()) {
            std::ofstream f(args.report_path, std::ios::trunc);
            f << text;
            if (!f) return fail(err, "cannot write report: " + args.report_path);
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
}

int cmd_loss(const LossArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const SequenceSample pred = io::read_sequence(args.pred_dir);
        const SequenceSample gt = io::read_sequence(args.gt_dir);
        if (pred.frames() != gt.frames()) return fail(err, "loss: frame count mismatch");
        LossWeights weights;
        if (!args.weights_path.empty()) {
            std::istringstream in(read_file(args.weights_path));
            std::string key;
            double value;
            while (in >> key >> value) {
                if (key == "lambda_point") weights.lambda_point = value;
                else if (key == "lambda_l1_depth") weights.lambda_l1_depth = value;
                else if (key == "lambda_patch_depth") weights.lambda_patch_depth = value;
                else if (key == "lambda_normal") weights.lambda_normal = value;
                else if (key == "lambda_reg") weights.lambda_reg = value;
                else return fail(err, "loss: unknown weight key '" + key + "'");
            }
        }
        const BoolGrid all(gt.height(), gt.width(), 1);
        double point = 0, l1 = 0, patch = 0, normal = 0, geometry = 0, motion = 0;
        for (int i = 0; i < gt.frames(); ++i) {
            const CameraPose& pose = gt.poses[i];
            point += point_loss(pred.point_maps[i], gt.point_maps[i], all).value;
            l1 += depth_l1_loss(pred.point_maps[i], gt.point_maps[i], pose, gt.intrinsics).value;
            patch += patch_depth_loss(pred.point_maps[i], gt.point_maps[i], pose, gt.intrinsics,
                                      weights.patch_scales).value;
            normal += normal_loss(pred.point_maps[i], gt.point_maps[i], all).value;
            geometry += geometry_loss(pred.point_maps[i], gt.point_maps[i], pose, gt.intrinsics, weights).value;
        }
        for (size_t i = 0; i < gt.flows.size(); ++i)
            motion += motion_loss(pred.flows[i], gt.flows[i], all, weights).value;
        const double nf = gt.frames();
        out << "point " << fmt(point / nf) << "\n"
            << "depth_l1 " << fmt(l1 / nf) << "\n"
            << "patch_depth " << fmt(patch / nf) << "\n"
            << "normal " << fmt(normal / nf) << "\n"
            << "geometry " << fmt(geometry / nf) << "\n"
            << "motion " << fmt(gt.flows.empty() ? 0.0 : motion / static_cast<double>(gt.flows.size())) << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
}

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err) {
    try {
        bool all_pass = true;
        for (const char* id : {"point", "depth_l1", "patch_depth", "normal", "motion"}) {
            const GradCheckReport r = gradcheck(id, args.trials, args.seed);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%-12s max_rel_error %.3e tolerance %.0e %s\n", r.loss_id.c_str(),
                          r.max_rel_error, r.tolerance, r.pass ? "pass" : "FAIL");
            out << buf;
            all_pass = all_pass && r.pass;
        }
        if (!all_pass) return fail(err, "gradcheck: tolerance exceeded");
        return 0;
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const SequenceSample seq = io::read_sequence(args.in_dir);
        const std::vector<std::string> violations = validate_sequence(seq);
        for (const std::string& v : violations) out << v << "\n";
        if (violations.empty()) {
            out << "ok\n";
            return 0;
        }
        return fail(err, "validate: " + std::to_string(violations.size()) + " violation(s)");
    } catch (const std::exception& e) {
        return fail(err, e.what());
    }
}

}  // namespace cli
}  // namespace geomflow
