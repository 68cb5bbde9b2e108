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

#include "h2qed/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "h2qed/errors.h"
#include "h2qed/io.h"
#include "h2qed/unfold.h"
#include "h2qed/vqe.h"

#ifndef H2QED_VERSION
#define H2QED_VERSION "0.0.0"
#endif

namespace h2qed::cli {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExactOptions, coefficients, out_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SweepOptions, family, noise_p, p1, p2, exact, shots, grid, seed, readout_model,
                                                unfold, unfold_tol, unfold_max_iters, merge_pi_branch, threads, out_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CurveOptions, coefficients, terms, out_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NoiseScanOptions, coefficients, r, p_values, grid, threads, out_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(UnfoldDemoOptions, n, theta, readout_model, shots, seed, tol, max_iters,
                                                out_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScoreMappingsOptions, profiles, family, exact, shots, seed, threads,
                                                out_dir)

namespace {

using Clock = std::chrono::steady_clock;
using Files = std::vector<std::pair<std::string, std::string>>;

std::string absolute_path(const std::string &path) {
    return std::filesystem::absolute(path).lexically_normal().string();
}

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw UsageError(what);
    }
}

void require_probability(double p, const char *name) {
    require(p >= 0 && p <= 1, std::string(name) + " must lie in [0, 1]");
}

/// Writes every result file, then the manifest. Nothing touches the output
/// directory before the whole run has succeeded.
Report finish(const std::string &command, const nlohmann::json &config, const std::vector<std::string> &inputs,
              const std::string &out_dir, const Files &files, Clock::time_point start, Report report = {}) {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    for (const auto &[name, contents] : files) {
        io::write_file_atomic(dir / name, contents);
        report.outputs.push_back(name);
    }
    nlohmann::ordered_json digests = nlohmann::ordered_json::object();
    for (const std::string &input : inputs) {
        digests[input] = io::sha256_file(input);
    }
    const auto elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    nlohmann::ordered_json manifest{{"command", command},
                                    {"version", H2QED_VERSION},
                                    {"config", config},
                                    {"inputs", digests},
                                    {"outputs", report.outputs},
                                    {"started_utc", stamp},
                                    {"wall_clock_seconds", elapsed}};
    io::write_file_atomic(dir / kManifestName, manifest.dump(2) + '\n');
    report.outputs.push_back(kManifestName);
    return report;
}

std::vector<double> default_p_values() {
    std::vector<double> p;
    for (int i = 0; i < 30; ++i) {
        p.push_back(0.02 * i);
    }
    return p;
}

std::string crossover_json(const NoiseScan &scan) {
    nlohmann::ordered_json out{{"R", scan.row.r}};
    out["crossover_p"] = scan.crossover ? nlohmann::ordered_json(*scan.crossover) : nlohmann::ordered_json(nullptr);
    return out.dump(2) + '\n';
}

struct Profile {
    std::string name;
    std::string readout = "none";
    double noise_p = 0;
    bool unfold = true;
};

std::vector<Profile> read_profiles(const std::string &path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw IngestionError(path, e.line(), e.message());
    }
    std::vector<Profile> profiles;
    for (const auto &[name, section] : tree) {
        if (section.empty()) {
            throw IngestionError(path, 0, "key '" + name + "' outside a profile section");
        }
        Profile p;
        p.name = name;
        for (const auto &[key, value] : section) {
            const std::string text = value.get_value<std::string>();
            if (key == "readout") {
                p.readout = text;
            } else if (key == "noise_p") {
                const auto parsed = value.get_value_optional<double>();
                if (!parsed) {
                    throw IngestionError(path, 0, "profile '" + name + "': noise_p is not a number");
                }
                p.noise_p = *parsed;
            } else if (key == "unfold") {
                if (text != "on" && text != "off") {
                    throw IngestionError(path, 0, "profile '" + name + "': unfold must be on or off");
                }
                p.unfold = text == "on";
            } else {
                throw IngestionError(path, 0, "profile '" + name + "': unknown key '" + key + "'");
            }
        }
        profiles.push_back(p);
    }
    return profiles;
}

}  // namespace

int exit_code_for(const std::exception &error) {
    if (dynamic_cast<const UsageError *>(&error)) {
        return kExitUsage;
    }
    if (dynamic_cast<const IngestionError *>(&error) || dynamic_cast<const FormatError *>(&error)) {
        return kExitIngestion;
    }
    if (dynamic_cast<const Error *>(&error)) {
        return kExitNumeric;
    }
    return kExitFailure;
}

Report cmd_exact(const ExactOptions &options) {
    const auto start = Clock::now();
    ExactOptions o = options;
    o.coefficients = absolute_path(o.coefficients);
    const CoefficientTable table = io::read_coefficients(o.coefficients);

    std::vector<CurvePoint> curve;
    for (const CoefficientRow &row : table.rows()) {
        // Noiseless ansatz optimum next to the full ground energy.
        const double a = row.g[1] + row.g[2];
        const double b = row.g[4];
        CurvePoint p;
        p.r = row.r;
        p.theta_star = (a == 0 && b == 0) ? 0.0 : std::atan2(-b, -a);
        p.energy = row.g[0] + row.g[3] - std::hypot(a, b);
        p.energy_exact = exact_ground_energy(row.g);
        p.delta = p.energy - p.energy_exact;
        p.chemical_accuracy = std::abs(p.delta) < kChemicalAccuracy;
        curve.push_back(p);
    }
    return finish("exact", o, {o.coefficients}, o.out_dir, {{"exact_curve.csv", io::curve_csv(curve)}}, start);
}

Report cmd_sweep(const SweepOptions &options) {
    const auto start = Clock::now();
    SweepSettings s;
    s.family = parse_family(options.family);
    require_probability(options.noise_p, "noise-p");
    if (options.p1 >= 0) {
        require_probability(options.p1, "p1");
    }
    if (options.p2 >= 0) {
        require_probability(options.p2, "p2");
    }
    require(options.exact || options.shots >= 1, "shots must be positive");
    require(options.threads >= 0, "threads must be non-negative");
    const ThetaGrid grid(options.grid);
    const int width = s.family == Family::kEncoded ? code422::kNumQubits : 2;
    s.readout = io::parse_readout_model(options.readout_model, width);
    if (s.readout) {
        s.readout->validate();
    }
    require(!options.unfold || s.readout, "--unfold on requires --readout-model");
    require(options.unfold_tol > 0, "unfold tolerance must be positive");
    require(options.unfold_max_iters >= 1, "unfold iteration cap must be at least 1");

    s.grid_points = grid.points();
    s.noise = NoiseConfig::from_p(options.noise_p);
    if (options.p1 >= 0) {
        s.noise.p1 = options.p1;
    }
    if (options.p2 >= 0) {
        s.noise.p2 = options.p2;
    }
    s.unfold = options.unfold;
    s.unfold_settings.tol = options.unfold_tol;
    s.unfold_settings.max_iters = options.unfold_max_iters;
    if (!options.exact) {
        s.shots = options.shots;
    }
    s.seed = options.seed;
    s.merge_pi_branch = options.merge_pi_branch;
    s.threads = options.threads;

    const SweepResult result = run_sweep(s);
    Files files{{"terms.csv", io::terms_csv(result.terms)}};
    if (s.family == Family::kEncoded) {
        files.emplace_back("discards.json", io::discards_json(result.discards));
    }
    if (s.unfold) {
        const ResponseMatrix response = s.shots ? calibrate_response(*s.readout, width, *s.shots,
                                                                     mix_seed(s.seed, ~std::uint64_t{0}))
                                                : build_response(*s.readout, width);
        files.emplace_back("response.csv", io::response_csv(response));
    }
    Report report;
    const auto empty = std::count_if(result.terms.rows.begin(), result.terms.rows.end(),
                                     [](const TermRow &row) { return row.empty; });
    if (empty > 0) {
        report.warnings.push_back(std::to_string(empty) + " grid points have an empty postselected branch");
    }
    return finish("sweep", options, {}, options.out_dir, files, start, report);
}

Report cmd_curve(const CurveOptions &options) {
    const auto start = Clock::now();
    CurveOptions o = options;
    require(!o.terms.empty(), "curve needs at least one terms file");
    o.coefficients = absolute_path(o.coefficients);
    for (std::string &t : o.terms) {
        t = absolute_path(t);
    }
    const CoefficientTable table = io::read_coefficients(o.coefficients);
    std::vector<TermEstimates> sweeps;
    for (const std::string &t : o.terms) {
        sweeps.push_back(io::read_terms(t));
    }
    for (std::size_t k = 1; k < sweeps.size(); ++k) {
        const auto &a = sweeps.front().rows;
        const auto &b = sweeps[k].rows;
        const bool same = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const auto &x, const auto &y) {
                              return std::abs(x.theta - y.theta) < 1e-12;
                          });
        if (!same) {
            throw FormatError("theta grid of " + o.terms[k] + " differs from " + o.terms.front());
        }
    }
    Files files;
    std::vector<std::string> inputs{o.coefficients};
    for (std::size_t k = 0; k < sweeps.size(); ++k) {
        files.emplace_back("curve_" + std::to_string(k + 1) + ".csv", io::curve_csv(potential_curve(table, sweeps[k])));
        inputs.push_back(o.terms[k]);
    }
    return finish("curve", o, inputs, o.out_dir, files, start);
}

Report cmd_noise_scan(const NoiseScanOptions &options) {
    const auto start = Clock::now();
    NoiseScanOptions o = options;
    if (o.p_values.empty()) {
        o.p_values = default_p_values();
    }
    for (double p : o.p_values) {
        require_probability(p, "noise-p");
    }
    require(o.threads >= 0, "threads must be non-negative");
    static_cast<void>(ThetaGrid(o.grid));
    o.coefficients = absolute_path(o.coefficients);
    const CoefficientTable table = io::read_coefficients(o.coefficients);
    const CoefficientRow &row = table.nearest(o.r);

    Report report;
    if (std::abs(row.r - o.r) > 1e-9) {
        report.warnings.push_back("R = " + io::format_double(o.r) + " not in table, using nearest row R = " +
                                  io::format_double(row.r));
    }
    const NoiseScan scan = noise_scan(row, o.p_values, o.grid, o.threads);
    report.notes.push_back(scan.crossover ? "crossover p* = " + io::format_double(*scan.crossover)
                                          : std::string("no crossover in the scanned range"));
    return finish("noise-scan", o, {o.coefficients}, o.out_dir,
                  {{"noise_scan.csv", io::noise_scan_csv(scan)}, {"crossover.json", crossover_json(scan)}}, start,
                  report);
}

Report cmd_unfold_demo(const UnfoldDemoOptions &options) {
    const auto start = Clock::now();
    require(options.n == 2 || options.n == 6, "unfold-demo supports n = 2 or n = 6");
    require(options.shots >= 1, "shots must be positive");
    require(options.tol > 0, "unfold tolerance must be positive");
    require(options.max_iters >= 1, "unfold iteration cap must be at least 1");
    ReadoutModel model = io::parse_readout_model(options.readout_model, options.n)
                             .value_or(ReadoutModel::uniform(options.n, 0, 0));
    model.validate();

    const Circuit circuit = options.n == 2 ? physical_ansatz_circuit(options.theta, MeasBasis::Z)
                                           : encoded_ansatz_circuit(options.theta, MeasBasis::Z);
    const std::vector<double> truth = probabilities(run(circuit));
    const Counts raw = sample_counts(apply_readout(truth, model), options.shots, mix_seed(options.seed, 0));
    const ResponseMatrix response = calibrate_response(model, options.n, options.shots, mix_seed(options.seed, 1));
    UnfoldSettings settings;
    settings.tol = options.tol;
    settings.max_iters = options.max_iters;
    const std::vector<double> measured = raw.normalized();
    const UnfoldResult unfolded = unfold(response, measured, settings);

    std::string csv = "outcome,truth,raw,corrected\n";
    for (std::size_t i = 0; i < truth.size(); ++i) {
        csv += std::to_string(i) + ',' + io::format_double(truth[i]) + ',' + io::format_double(measured[i]) + ',' +
               io::format_double(unfolded.spectrum[i]) + '\n';
    }
    const double l1_raw = l1_distance(measured, truth);
    const double l1_corrected = l1_distance(unfolded.spectrum, truth);
    const nlohmann::ordered_json summary{{"l1_raw", l1_raw},
                                         {"l1_corrected", l1_corrected},
                                         {"iterations", unfolded.iterations},
                                         {"converged", unfolded.converged},
                                         {"monotone_fit", unfolded.monotone_fit}};
    Report report;
    report.notes.push_back("L1 to truth: raw " + io::format_double(l1_raw) + ", corrected " +
                           io::format_double(l1_corrected));
    if (!unfolded.monotone_fit) {
        report.warnings.push_back("data fit was not monotone across iterations");
    }
    return finish("unfold-demo", options, {}, options.out_dir,
                  {{"unfold_demo.csv", csv}, {"unfold_summary.json", summary.dump(2) + '\n'},
                   {"response.csv", io::response_csv(response)}},
                  start, report);
}

Report cmd_score_mappings(const ScoreMappingsOptions &options) {
    const auto start = Clock::now();
    ScoreMappingsOptions o = options;
    const Family family = parse_family(o.family);
    require(o.exact || o.shots >= 1, "shots must be positive");
    require(o.threads >= 0, "threads must be non-negative");
    o.profiles = absolute_path(o.profiles);
    const std::vector<Profile> profiles = read_profiles(o.profiles);
    require(profiles.size() >= 2, "score-mappings needs at least 2 profiles");

    const int width = family == Family::kEncoded ? code422::kNumQubits : 2;
    std::vector<SweepSettings> runs;
    for (const Profile &p : profiles) {
        SweepSettings s;
        s.family = family;
        try {
            require_probability(p.noise_p, "noise_p");
            s.readout = io::parse_readout_model(p.readout, width);
            if (s.readout) {
                s.readout->validate();
            }
        } catch (const UsageError &e) {
            throw IngestionError(o.profiles, 0, "profile '" + p.name + "': " + e.what());
        }
        s.noise = NoiseConfig::from_p(p.noise_p);
        s.unfold = p.unfold && s.readout.has_value();
        if (!o.exact) {
            s.shots = o.shots;
        }
        s.seed = o.seed;
        s.threads = o.threads;
        runs.push_back(s);
    }

    std::array<double, 7> exact{};
    const auto angles = probe_angles();
    std::transform(angles.begin(), angles.end(), exact.begin(), [](double t) { return std::sin(t); });
    std::vector<std::pair<double, std::size_t>> scores;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        scores.emplace_back(score_mapping(probe_x1x2(runs[k]), exact), k);
    }
    std::stable_sort(scores.begin(), scores.end(), [](const auto &a, const auto &b) { return a.first < b.first; });

    std::string csv = "rank,profile,score\n";
    for (std::size_t rank = 0; rank < scores.size(); ++rank) {
        csv += std::to_string(rank + 1) + ',' + profiles[scores[rank].second].name + ',' +
               io::format_double(scores[rank].first) + '\n';
    }
    return finish("score-mappings", o, {o.profiles}, o.out_dir, {{"scores.csv", csv}}, start);
}

Report cmd_replay(const std::filesystem::path &manifest_path, const std::string &out_dir) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(io::read_file(manifest_path));
    } catch (const nlohmann::json::exception &e) {
        throw IngestionError(manifest_path.string(), 0, e.what());
    }
    if (!manifest.contains("command") || !manifest.contains("config") || !manifest.contains("inputs")) {
        throw IngestionError(manifest_path.string(), 0, "not a run manifest");
    }
    for (const auto &[path, digest] : manifest["inputs"].items()) {
        if (io::sha256_file(path) != digest.get<std::string>()) {
            throw IngestionError(path, 0, "input changed since the recorded run");
        }
    }
    nlohmann::json config = manifest["config"];
    if (!out_dir.empty()) {
        config["out_dir"] = out_dir;
    }
    const std::string command = manifest["command"].get<std::string>();
    try {
        if (command == "exact") {
            return cmd_exact(config.get<ExactOptions>());
        }
        if (command == "sweep") {
            return cmd_sweep(config.get<SweepOptions>());
        }
        if (command == "curve") {
            return cmd_curve(config.get<CurveOptions>());
        }
        if (command == "noise-scan") {
            return cmd_noise_scan(config.get<NoiseScanOptions>());
        }
        if (command == "unfold-demo") {
            return cmd_unfold_demo(config.get<UnfoldDemoOptions>());
        }
        if (command == "score-mappings") {
            return cmd_score_mappings(config.get<ScoreMappingsOptions>());
        }
    } catch (const nlohmann::json::exception &e) {
        throw IngestionError(manifest_path.string(), 0, e.what());
    }
    throw IngestionError(manifest_path.string(), 0, "unknown command '" + command + "'");
}

}  // namespace h2qed::cli
