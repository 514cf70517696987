// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/cli.hpp"

#include "geomflow/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace geomflow;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "geomflow_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

constexpr const char* kSceneText = R"(resolution = 24x24
frames = 3
trajectory = orbit
orbit_radius = 6
orbit_height = -1
orbit_step = 0.15
plane = 0, 1, 0, 2
box = 0.5, 1.2, 0, 0.5, 0.8, 0.5
mover_sphere = 0, -0.5, 0.5, 0.6, 0.1, 0, 0.05, 0, 0.2, 0
)";

fs::path write_scene(const fs::path& dir) {
    const fs::path path = dir / "scene.txt";
    std::ofstream(path) << kSceneText;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("synth -> validate -> preprocess -> eval -> loss pipeline") {
    const fs::path dir = temp_dir("pipeline");
    const fs::path scene = write_scene(dir);

    std::ostringstream out, err;
    cli::SynthArgs synth_args;
    synth_args.config_path = scene.string();
    synth_args.out_dir = (dir / "data").string();
    REQUIRE(cli::cmd_synth(synth_args, out, err) == 0);
    REQUIRE(err.str().empty());
    CHECK(out.str().find("3 frames, 24x24") != std::string::npos);
    REQUIRE(fs::exists(dir / "data" / "gt_world" / "manifest.txt"));
    REQUIRE(fs::exists(dir / "data" / "gt_camera" / "manifest.txt"));

    out.str("");
    cli::ValidateArgs val_args{(dir / "data" / "gt_world").string()};
    CHECK(cli::cmd_validate(val_args, out, err) == 0);
    CHECK(out.str() == "ok\n");

    out.str("");
    cli::PreprocessArgs pre_args;
    pre_args.in_dir = (dir / "data" / "gt_camera").string();
    pre_args.out_dir = (dir / "norm").string();
    REQUIRE(cli::cmd_preprocess(pre_args, out, err) == 0);
    REQUIRE(err.str().empty());

    const SequenceSample norm = io::read_sequence(dir / "norm");
    CHECK(norm.point_maps[0].tag == FrameTag::world_normalized());
    REQUIRE(norm.norm.has_value());
    CHECK(norm.norm->mode == NormMode::Canonical);
    CHECK((norm.poses[0].rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-6);
    // pose 0 sits at -mu/scale after normalization
    CHECK((norm.poses[0].translation + norm.norm->mu / norm.norm->scale).norm() < 1e-4);
    Eigen::Vector3d mu = Eigen::Vector3d::Zero();
    double dist = 0;
    long long count = 0;
    for (const PointMap& pm : norm.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) {
                mu += pm.data.cells[i];
                ++count;
            }
    mu /= static_cast<double>(count);
    for (const PointMap& pm : norm.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) dist += (pm.data.cells[i] - mu).norm();
    dist /= static_cast<double>(count);
    CHECK(mu.norm() < 1e-4);
    CHECK(dist == doctest::Approx(1.0).epsilon(1e-4));

    // evaluating ground truth against itself is a perfect score
    out.str("");
    cli::EvalArgs eval_args;
    eval_args.pred_dir = eval_args.gt_dir = (dir / "data" / "gt_world").string();
    eval_args.report_path = (dir / "report.txt").string();
    REQUIRE(cli::cmd_eval(eval_args, out, err) == 0);
    CHECK(out.str().find("rel_p 0.000000\n") != std::string::npos);
    CHECK(out.str().find("delta_p 100.000000\n") != std::string::npos);
    CHECK(out.str().find("epe 0.000000\n") != std::string::npos);
    CHECK(slurp(dir / "report.txt") == out.str());

    out.str("");
    cli::LossArgs loss_args;
    loss_args.pred_dir = loss_args.gt_dir = (dir / "data" / "gt_world").string();
    REQUIRE(cli::cmd_loss(loss_args, out, err) == 0);
    CHECK(out.str().find("point 0.000000\n") != std::string::npos);
    CHECK(out.str().find("depth_l1 0.000000\n") != std::string::npos);
    CHECK(out.str().find("geometry 0.000000\n") != std::string::npos);
    CHECK(out.str().find("motion ") != std::string::npos);
}

TEST_CASE("preprocess supports max normalization and padding") {
    const fs::path dir = temp_dir("pre_modes");
    std::ostringstream out, err;
    cli::SynthArgs synth_args;
    synth_args.config_path = write_scene(dir).string();
    synth_args.out_dir = (dir / "data").string();
    REQUIRE(cli::cmd_synth(synth_args, out, err) == 0);

    cli::PreprocessArgs pre;
    pre.in_dir = (dir / "data" / "gt_camera").string();
    pre.out_dir = (dir / "max").string();
    pre.norm = "max";
    REQUIRE(cli::cmd_preprocess(pre, out, err) == 0);
    const SequenceSample maxed = io::read_sequence(dir / "max");
    REQUIRE(maxed.norm.has_value());
    CHECK(maxed.norm->mode == NormMode::Max);
    for (const PointMap& pm : maxed.point_maps)
        for (size_t i = 0; i < pm.data.size(); ++i)
            if (pm.mask.cells[i]) CHECK(pm.data.cells[i].cwiseAbs().maxCoeff() <= 1.0 + 1e-6);

    pre.out_dir = (dir / "padded").string();
    pre.norm = "none";
    pre.pad = true;
    REQUIRE(cli::cmd_preprocess(pre, out, err) == 0);
    const SequenceSample padded = io::read_sequence(dir / "padded");
    // the scene has sky pixels; padding fills their data but not their mask
    bool saw_filled = false;
    for (size_t i = 0; i < padded.point_maps[0].data.size(); ++i)
        if (!padded.point_maps[0].mask.cells[i] && padded.point_maps[0].data.cells[i] != Eigen::Vector3d::Zero())
            saw_filled = true;
    CHECK(saw_filled);

    pre.norm = "bogus";
    CHECK(cli::cmd_preprocess(pre, out, err) == 1);
    CHECK(err.str().find("error:") != std::string::npos);
}

TEST_CASE("synth is deterministic: same seed gives byte-identical outputs") {
    const fs::path dir = temp_dir("determinism");
    std::ostringstream out, err;
    cli::SynthArgs a;
    a.seed = 5;
    a.seed_set = true;
    a.out_dir = (dir / "a").string();
    cli::SynthArgs b = a;
    b.out_dir = (dir / "b").string();
    REQUIRE(cli::cmd_synth(a, out, err) == 0);
    REQUIRE(cli::cmd_synth(b, out, err) == 0);
    for (const auto& entry : fs::directory_iterator(dir / "a" / "gt_world")) {
        const fs::path other = dir / "b" / "gt_world" / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
}

TEST_CASE("loss weights file changes the reported geometry total") {
    const fs::path dir = temp_dir("weights");
    std::ostringstream out, err;
    cli::SynthArgs synth_args;
    synth_args.config_path = write_scene(dir).string();
    synth_args.out_dir = (dir / "data").string();
    REQUIRE(cli::cmd_synth(synth_args, out, err) == 0);

    cli::PreprocessArgs pre;
    pre.in_dir = (dir / "data" / "gt_camera").string();
    pre.out_dir = (dir / "shifted").string();
    pre.norm = "none";
    REQUIRE(cli::cmd_preprocess(pre, out, err) == 0);

    // use the unnormalized world lift as an imperfect "prediction"
    cli::LossArgs loss_args;
    loss_args.pred_dir = (dir / "shifted").string();
    loss_args.gt_dir = (dir / "data" / "gt_world").string();
    out.str("");
    REQUIRE(cli::cmd_loss(loss_args, out, err) == 0);
    const std::string base = out.str();

    const fs::path weights = dir / "weights.txt";
    std::ofstream(weights) << "lambda_reg 0.5\n";
    loss_args.weights_path = weights.string();
    out.str("");
    REQUIRE(cli::cmd_loss(loss_args, out, err) == 0);
    CHECK(out.str() != base);

    std::ofstream(weights) << "lambda_bogus 1\n";
    CHECK(cli::cmd_loss(loss_args, out, err) == 1);
}

TEST_CASE("gradcheck command reports per-loss lines and exits zero") {
    std::ostringstream out, err;
    cli::GradcheckArgs args;
    args.trials = 20;
    args.seed = 3;
    REQUIRE(cli::cmd_gradcheck(args, out, err) == 0);
    for (const char* id : {"point", "depth_l1", "patch_depth", "normal", "motion"})
        CHECK(out.str().find(id) != std::string::npos);
    CHECK(out.str().find("pass") != std::string::npos);
    CHECK(out.str().find("FAIL") == std::string::npos);
}

TEST_CASE("commands fail cleanly on bad input") {
    const fs::path dir = temp_dir("failures");
    std::ostringstream out, err;

    cli::SynthArgs synth_args;
    synth_args.config_path = (dir / "absent.txt").string();
    synth_args.out_dir = (dir / "x").string();
    CHECK(cli::cmd_synth(synth_args, out, err) == 1);
    CHECK(err.str().rfind("error:", 0) == 0);

    err.str("");
    cli::EvalArgs eval_args;
    eval_args.pred_dir = eval_args.gt_dir = (dir / "nope").string();
    CHECK(cli::cmd_eval(eval_args, out, err) == 1);
    CHECK(!err.str().empty());

    // preprocess refuses world-frame input
    err.str("");
    synth_args.config_path = write_scene(dir).string();
    synth_args.out_dir = (dir / "data").string();
    REQUIRE(cli::cmd_synth(synth_args, out, err) == 0);
    cli::PreprocessArgs pre;
    pre.in_dir = (dir / "data" / "gt_world").string();
    pre.out_dir = (dir / "y").string();
    CHECK(cli::cmd_preprocess(pre, out, err) == 1);

    // validate flags a corrupted sequence
    err.str("");
    out.str("");
    const fs::path broken = dir / "data" / "gt_world";
    std::ofstream(broken / "pose_0001", std::ios::binary | std::ios::trunc);  // empty file
    CHECK(cli::cmd_validate({broken.string()}, out, err) == 1);
}
