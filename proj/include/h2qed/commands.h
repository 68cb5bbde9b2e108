// Copyright 2026 The h2qed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef H2QED_COMMANDS_H
#define H2QED_COMMANDS_H

#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

namespace h2qed::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitIngestion = 3,
    kExitNumeric = 4,
};

int exit_code_for(const std::exception &error);

struct ExactOptions {
    std::string coefficients;
    std::string out_dir = ".";
};

struct SweepOptions {
    std::string family = "physical";
    double noise_p = 0;
    /// Per-arity overrides of the rates derived from noise_p; negative keeps the derived value.
    double p1 = -1;
    double p2 = -1;
    bool exact = false;
    std::uint64_t shots = 8192;
    int grid = 257;
    std::uint64_t seed = 0;
    std::string readout_model = "none";
    bool unfold = false;
    double unfold_tol = 1e-6;
    int unfold_max_iters = 1000;
    bool merge_pi_branch = true;
    int threads = 0;
    std::string out_dir = ".";
};

struct CurveOptions {
    std::string coefficients;
    std::vector<std::string> terms;
    std::string out_dir = ".";
};

struct NoiseScanOptions {
    std::string coefficients;
    double r = 0.75;
    /// Empty selects 0, 0.02, ..., 0.58.
    std::vector<double> p_values;
    int grid = 257;
    int threads = 0;
    std::string out_dir = ".";
};

struct UnfoldDemoOptions {
    int n = 6;
    double theta = 0.6;
    std::string readout_model = "default";
    std::uint64_t shots = 1000000;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    int max_iters = 1000;
    std::string out_dir = ".";
};

struct ScoreMappingsOptions {
    /// INI file, one section per profile with keys `readout`, `noise_p`, `unfold`.
    std::string profiles;
    std::string family = "physical";
    bool exact = false;
    std::uint64_t shots = 8192;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_dir = ".";
};

/// Files written by a command, relative to its output directory, plus a
/// human-readable summary for stdout/stderr.
struct Report {
    std::vector<std::string> outputs;
    std::vector<std::string> notes;
    std::vector<std::string> warnings;
};

Report cmd_exact(const ExactOptions &options);
Report cmd_sweep(const SweepOptions &options);
Report cmd_curve(const CurveOptions &options);
Report cmd_noise_scan(const NoiseScanOptions &options);
Report cmd_unfold_demo(const UnfoldDemoOptions &options);
Report cmd_score_mappings(const ScoreMappingsOptions &options);

/// Reruns the command recorded in a manifest. A non-empty `out_dir` replaces
/// the recorded output directory. Inputs whose digest changed are rejected.
Report cmd_replay(const std::filesystem::path &manifest, const std::string &out_dir);

inline constexpr const char *kManifestName = "manifest.json";

}  // namespace h2qed::cli

#endif  // H2QED_COMMANDS_H
