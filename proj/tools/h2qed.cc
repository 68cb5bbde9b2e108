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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "h2qed/commands.h"

namespace {

using namespace h2qed::cli;

void print(const Report &report) {
    for (const std::string &note : report.notes) {
        std::cout << note << '\n';
    }
    for (const std::string &warning : report.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
    for (const std::string &file : report.outputs) {
        std::cerr << "wrote " << file << '\n';
    }
}

CLI::Option *add_on_off(CLI::App *app, const std::string &name, bool &target, const std::string &help) {
    return app
        ->add_option_function<std::string>(
            name, [&target](const std::string &v) { target = v == "on"; }, help)
        ->check(CLI::IsMember({"on", "off"}))
        ->default_str(target ? "on" : "off");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulated VQE for H2 on physical and [[4,2,2]]-encoded circuits"};
    app.set_config("--config", "", "INI file; [section] names match subcommands, flags override it");
    app.require_subcommand(1);

    ExactOptions exact;
    auto *c_exact = app.add_subcommand("exact", "Exact ground energies and noiseless ansatz minima per R");
    c_exact->add_option("--coefficients", exact.coefficients, "Coefficient CSV")->required();
    c_exact->add_option("--out", exact.out_dir, "Output directory")->capture_default_str();

    SweepOptions sweep;
    auto *c_sweep = app.add_subcommand("sweep", "Estimate the Hamiltonian terms over the theta grid");
    c_sweep->add_option("--family", sweep.family, "physical or encoded")
        ->check(CLI::IsMember({"physical", "encoded"}))
        ->capture_default_str();
    c_sweep->add_option("--noise-p", sweep.noise_p, "Two-qubit depolarizing rate p (p1 = p/16)")->capture_default_str();
    c_sweep->add_option("--p1", sweep.p1, "Single-qubit depolarizing rate, overrides noise-p / 16");
    c_sweep->add_option("--p2", sweep.p2, "Two-qubit depolarizing rate, overrides noise-p");
    auto *shots = c_sweep->add_option("--shots", sweep.shots, "Shots per circuit")->capture_default_str();
    c_sweep->add_flag("--exact", sweep.exact, "Use probabilities instead of sampling")->excludes(shots);
    c_sweep->add_option("--grid", sweep.grid, "Odd number of theta points on [-pi, pi]")->capture_default_str();
    c_sweep->add_option("--seed", sweep.seed, "Master seed")->capture_default_str();
    c_sweep->add_option("--readout-model", sweep.readout_model, "none, default, e01:e10 or e01:e10/... per qubit")
        ->capture_default_str();
    add_on_off(c_sweep, "--unfold", sweep.unfold, "Unfold readout error before decoding");
    c_sweep->add_option("--unfold-tol", sweep.unfold_tol, "L1 step tolerance")->capture_default_str();
    c_sweep->add_option("--unfold-max-iters", sweep.unfold_max_iters, "Iteration cap")->capture_default_str();
    add_on_off(c_sweep, "--merge-pi", sweep.merge_pi_branch, "Fold the encoded a2 = 1 branch onto theta + pi");
    c_sweep->add_option("--threads", sweep.threads, "Worker threads, 0 = all cores")->capture_default_str();
    c_sweep->add_option("--out", sweep.out_dir, "Output directory")->capture_default_str();

    CurveOptions curve;
    auto *c_curve = app.add_subcommand("curve", "Minimize E(theta) per R for one or more sweeps");
    c_curve->add_option("--coefficients", curve.coefficients, "Coefficient CSV")->required();
    c_curve->add_option("--terms", curve.terms, "Terms CSV files sharing one grid")->required();
    c_curve->add_option("--out", curve.out_dir, "Output directory")->capture_default_str();

    NoiseScanOptions scan;
    auto *c_scan = app.add_subcommand("noise-scan", "Energy error versus depolarizing rate at one R");
    c_scan->add_option("--coefficients", scan.coefficients, "Coefficient CSV")->required();
    c_scan->add_option("--r", scan.r, "Internuclear separation in Angstrom")->capture_default_str();
    c_scan->add_option("--p", scan.p_values, "Noise rates (default 0, 0.02, ..., 0.58)")->delimiter(',');
    c_scan->add_option("--grid", scan.grid, "Odd number of theta points")->capture_default_str();
    c_scan->add_option("--threads", scan.threads, "Worker threads, 0 = all cores")->capture_default_str();
    c_scan->add_option("--out", scan.out_dir, "Output directory")->capture_default_str();

    UnfoldDemoOptions demo;
    auto *c_demo = app.add_subcommand("unfold-demo", "Raw versus unfolded readout spectra");
    c_demo->add_option("--n", demo.n, "Register width, 2 or 6")->capture_default_str();
    c_demo->add_option("--theta", demo.theta, "Ansatz angle of the truth spectrum")->capture_default_str();
    c_demo->add_option("--readout-model", demo.readout_model, "none, default, e01:e10 or per qubit")
        ->capture_default_str();
    c_demo->add_option("--shots", demo.shots, "Shots for data and for each calibration circuit")
        ->capture_default_str();
    c_demo->add_option("--seed", demo.seed, "Master seed")->capture_default_str();
    c_demo->add_option("--tol", demo.tol, "L1 step tolerance")->capture_default_str();
    c_demo->add_option("--max-iters", demo.max_iters, "Iteration cap")->capture_default_str();
    c_demo->add_option("--out", demo.out_dir, "Output directory")->capture_default_str();

    ScoreMappingsOptions score;
    auto *c_score = app.add_subcommand("score-mappings", "Rank readout/noise profiles by X1X2 probe distance");
    c_score->add_option("--profiles", score.profiles, "INI file with one section per profile")->required();
    c_score->add_option("--family", score.family, "physical or encoded")
        ->check(CLI::IsMember({"physical", "encoded"}))
        ->capture_default_str();
    auto *score_shots = c_score->add_option("--shots", score.shots, "Shots per circuit")->capture_default_str();
    c_score->add_flag("--exact", score.exact, "Use probabilities instead of sampling")->excludes(score_shots);
    c_score->add_option("--seed", score.seed, "Master seed")->capture_default_str();
    c_score->add_option("--threads", score.threads, "Worker threads, 0 = all cores")->capture_default_str();
    c_score->add_option("--out", score.out_dir, "Output directory")->capture_default_str();

    std::string manifest;
    std::string replay_out;
    auto *c_replay = app.add_subcommand("replay", "Rerun a recorded manifest");
    c_replay->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
    c_replay->add_option("--out", replay_out, "Output directory (default: the recorded one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Report report;
        if (*c_exact) {
            report = cmd_exact(exact);
        } else if (*c_sweep) {
            report = cmd_sweep(sweep);
        } else if (*c_curve) {
            report = cmd_curve(curve);
        } else if (*c_scan) {
            report = cmd_noise_scan(scan);
        } else if (*c_demo) {
            report = cmd_unfold_demo(demo);
        } else if (*c_score) {
            report = cmd_score_mappings(score);
        } else {
            report = cmd_replay(manifest, replay_out);
        }
        print(report);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}
