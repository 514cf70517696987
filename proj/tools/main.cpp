// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#include "geomflow/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"World-frame 4D geometry and scene-flow toolkit"};
    app.require_subcommand(1);

    geomflow::cli::SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic ground-truth scene");
    synth->add_option("--config", synth_args.config_path, "Scene config file (key=value lines)");
    CLI::Option* seed_opt = synth->add_option("--seed", synth_args.seed, "RNG seed");
    synth->add_option("--out", synth_args.out_dir, "Output directory")->required();

    geomflow::cli::PreprocessArgs pre_args;
    CLI::App* pre = app.add_subcommand("preprocess", "Camera-frame sequence to normalized world frame");
    pre->add_option("--in", pre_args.in_dir, "Input camera-frame sequence dir")->required();
    pre->add_option("--out", pre_args.out_dir, "Output sequence dir")->required();
    pre->add_option("--norm", pre_args.norm, "Normalization: canonical|max|none")->default_val("canonical");
    pre->add_flag("--pad", pre_args.pad, "Pyramid-pad invalid pixels");

    geomflow::cli::EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "World-space evaluation protocol");
    eval->add_option("--pred", eval_args.pred_dir, "Predicted sequence dir")->required();
    eval->add_option("--gt", eval_args.gt_dir, "Ground-truth sequence dir")->required();
    eval->add_option("--tau", eval_args.tau, "Inlier threshold for delta_p")->default_val(0.25);
    eval->add_option("--gamma", eval_args.gamma, "Inlier threshold for APD (metric units)")->required();
    eval->add_option("--report", eval_args.report_path, "Also write the report to this file");

    geomflow::cli::LossArgs loss_args;
    CLI::App* loss = app.add_subcommand("loss", "Geometry and motion loss values");
    loss->add_option("--pred", loss_args.pred_dir, "Predicted sequence dir")->required();
    loss->add_option("--gt", loss_args.gt_dir, "Ground-truth sequence dir")->required();
    loss->add_option("--weights", loss_args.weights_path, "Weights file (key value lines)");

    geomflow::cli::GradcheckArgs gc_args;
    CLI::App* gc = app.add_subcommand("gradcheck", "Finite-difference checks of all loss gradients");
    gc->add_option("--trials", gc_args.trials, "Trials per loss")->default_val(100);
    gc->add_option("--seed", gc_args.seed, "RNG seed")->default_val(0);

    geomflow::cli::ValidateArgs val_args;
    CLI::App* val = app.add_subcommand("validate", "Check sequence invariants");
    val->add_option("--in", val_args.in_dir, "Sequence dir")->required();

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        synth_args.seed_set = seed_opt->count() > 0;
        return geomflow::cli::cmd_synth(synth_args, std::cout, std::cerr);
    }
    if (pre->parsed()) return geomflow::cli::cmd_preprocess(pre_args, std::cout, std::cerr);
    if (eval->parsed()) return geomflow::cli::cmd_eval(eval_args, std::cout, std::cerr);
    if (loss->parsed()) return geomflow::cli::cmd_loss(loss_args, std::cout, std::cerr);
    if (gc->parsed()) return geomflow::cli::cmd_gradcheck(gc_args, std::cout, std::cerr);
    if (val->parsed()) return geomflow::cli::cmd_validate(val_args, std::cout, std::cerr);
    return 1;
}
