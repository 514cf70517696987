// Copyright Contributors to the geomflow project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace geomflow {
namespace cli {

// Each command returns the process exit code and prints exactly one
// diagnostic line to `err` on failure.

struct SynthArgs {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
};
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

struct PreprocessArgs {
    std::string in_dir;
    std::string out_dir;
    std::string norm = "canonical";  // canonical|max|none
    bool pad = false;
};
int cmd_preprocess(const PreprocessArgs& args, std::ostream& out, std::ostream& err);

struct EvalArgs {
    std::string pred_dir;
    std::string gt_dir;
    double tau = 0.25;
    double gamma = 0.05;
    std::string report_path;  // optional
};
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct LossArgs {
    std::string pred_dir;
    std::string gt_dir;
    std::string weights_path;  // optional key=value file
};
int cmd_loss(const LossArgs& args, std::ostream& out, std::ostream& err);

struct GradcheckArgs {
    int trials = 100;
    uint64_t seed = 0;
};
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err);

struct ValidateArgs {
    std::string in_dir;
};
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace geomflow
