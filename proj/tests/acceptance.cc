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

// Acceptance report: one PASS/FAIL line per criterion. The exit status is 0
// only when the failing set equals --known-failures exactly, so a criterion
// that starts passing or a new failure both break the build.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "h2qed/code422.h"
#include "h2qed/commands.h"
#include "h2qed/io.h"
#include "h2qed/unfold.h"
#include "h2qed/vqe.h"

using namespace h2qed;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kNoiselessTol = 1e-9;
constexpr double kNoiselessSeconds = 10;
constexpr double kClosedFormTol = 1e-9;
constexpr int kClosedFormCases = 100;
constexpr double kCrossoverLow = 0.20;
constexpr double kCrossoverHigh = 0.40;
constexpr double kCrossoverSeconds = 120;
constexpr int kCrossoverPoints = 30;
constexpr double kDominanceP = 0.05;
constexpr double kDominanceSeconds = 60;
constexpr double kDetectTol = 1e-12;
constexpr double kUnfoldL1 = 1e-2;
constexpr int kUnfoldIters = 100;
constexpr std::uint64_t kUnfoldShots = 1000000;
constexpr double kUnfoldSeconds = 5;
constexpr double kProbabilityTol = 1e-9;
constexpr double kScalingFactor = 2;

const CoefficientRow kSyntheticRow{0.75, {-0.35, -0.39, -0.39, 0.011, 0.18}};

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

fs::path scratch_dir(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("h2qed_acceptance_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    return dir;
}

std::optional<CoefficientTable> load_table(const std::string &path) {
    if (!fs::exists(path)) {
        return std::nullopt;
    }
    return io::read_coefficients(path);
}

SweepSettings exact_settings(Family family, double p = 0) {
    SweepSettings s;
    s.family = family;
    s.noise = NoiseConfig::from_p(p);
    return s;
}

Outcome noiseless_equivalence() {
    const auto start = Clock::now();
    double worst = 0;
    for (Family f : {Family::kPhysical, Family::kEncoded}) {
        const SweepResult sweep = run_sweep(exact_settings(f));
        if (sweep.terms.rows.size() != 257) {
            return {false, "grid has " + std::to_string(sweep.terms.rows.size()) + " rows"};
        }
        for (const TermRow &row : sweep.terms.rows) {
            const std::array<double, 4> expected{std::cos(row.theta), std::cos(row.theta), 1, std::sin(row.theta)};
            for (std::size_t t = 0; t < 4; ++t) {
                worst = std::max(worst, std::abs(row.value[t] - expected[t]));
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst < kNoiselessTol && elapsed < kNoiselessSeconds,
            "max |term - analytic| = " + fmt(worst) + " (< " + fmt(kNoiselessTol) + "), " + fmt(elapsed) + " s (< " +
                fmt(kNoiselessSeconds) + " s)"};
}

Outcome closed_form_minimum() {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<CoefficientRow> rows;
    for (int k = 0; k < kClosedFormCases; ++k) {
        rows.push_back({static_cast<double>(k), {u(rng), u(rng), u(rng), u(rng), u(rng)}});
    }
    const CoefficientTable table(rows);
    double worst = 0;
    for (Family f : {Family::kPhysical, Family::kEncoded}) {
        const auto curve = potential_curve(table, run_sweep(exact_settings(f)).terms);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto &g = rows[k].g;
            worst = std::max(worst, std::abs(curve[k].energy - (g[0] + g[3] - std::hypot(g[1] + g[2], g[4]))));
        }
    }
    return {worst < kClosedFormTol, "max |E* - closed form| = " + fmt(worst) + " over " +
                                        std::to_string(kClosedFormCases) + " g vectors, both families (< " +
                                        fmt(kClosedFormTol) + ")"};
}

Outcome crossover(const std::optional<CoefficientTable> &table, const std::string &table_path) {
    const auto start = Clock::now();
    const fs::path dir = scratch_dir("noise_scan");
    cli::NoiseScanOptions o;
    o.r = 0.75;
    o.out_dir = dir.string();
    for (int i = 0; i < kCrossoverPoints; ++i) {
        o.p_values.push_back(0.02 * i);
    }
    std::optional<double> p_star;
    if (table) {
        o.coefficients = table_path;
        cli::cmd_noise_scan(o);
        const auto json = nlohmann::json::parse(io::read_file(dir / "crossover.json"));
        if (!json["crossover_p"].is_null()) {
            p_star = json["crossover_p"].get<double>();
        }
    } else {
        p_star = noise_scan(kSyntheticRow, o.p_values, o.grid).crossover;
    }
    const double elapsed = seconds_since(start);
    const bool fast = elapsed < kCrossoverSeconds;
    const std::string when = fmt(elapsed) + " s (< " + fmt(kCrossoverSeconds) + " s)";
    if (!table) {
        const bool ok = p_star && std::isfinite(*p_star);
        return {ok && fast, "synthetic row (coefficient file absent): crossover " +
                                (p_star ? "p* = " + fmt(*p_star) : std::string("missing")) + ", " + when};
    }
    const bool inside = p_star && *p_star >= kCrossoverLow && *p_star <= kCrossoverHigh;
    return {inside && fast, "R = 0.75: p* = " + (p_star ? fmt(*p_star) : std::string("none")) + " (target [" +
                                fmt(kCrossoverLow) + ", " + fmt(kCrossoverHigh) + "]), " + when};
}

Outcome dominance(const std::optional<CoefficientTable> &table) {
    const auto start = Clock::now();
    const CoefficientTable rows = table ? *table : CoefficientTable({kSyntheticRow});
    const auto physical = potential_curve(rows, run_sweep(exact_settings(Family::kPhysical, kDominanceP)).terms);
    const auto encoded = potential_curve(rows, run_sweep(exact_settings(Family::kEncoded, kDominanceP)).terms);
    std::vector<double> losing;
    for (std::size_t k = 0; k < physical.size(); ++k) {
        if (!(std::abs(encoded[k].delta) < std::abs(physical[k].delta))) {
            losing.push_back(physical[k].r);
        }
    }
    const double elapsed = seconds_since(start);
    std::string detail = std::to_string(physical.size() - losing.size()) + "/" + std::to_string(physical.size()) +
                         " separations with encoded |dE| < physical |dE|";
    if (!losing.empty()) {
        detail += ", encoded worse for R in [" + fmt(losing.front()) + ", " + fmt(losing.back()) + "]";
    }
    detail += ", " + fmt(elapsed) + " s (< " + fmt(kDominanceSeconds) + " s)";
    return {losing.empty() && elapsed < kDominanceSeconds, detail};
}

/// Noiseless run with `pauli` applied to `qubit` right after gate `after`.
std::vector<double> faulty_probabilities(const Circuit &c, int after, int qubit, char pauli) {
    Eigen::MatrixXcd op(2, 2);
    if (pauli == 'X') {
        op << 0, 1, 1, 0;
    } else {
        op << 1, 0, 0, -1;
    }
    const std::array<int, 1> target{qubit};
    auto state = new_zero_state(c.num_qubits);
    if (after < 0) {
        apply_unitary(state, op, target);
    }
    for (int k = 0; k < static_cast<int>(c.ops.size()); ++k) {
        apply_gate(state, c.ops[k]);
        if (k == after) {
            apply_unitary(state, op, target);
        }
    }
    return probabilities(state);
}

code422::DecodeResult decode(const std::vector<double> &probs, const Permutation &relabel) {
    return code422::decode_counts(Counts::from_tallies(code422::kNumQubits, probs), relabel);
}

Outcome detection_coverage() {
    double worst_kept = 0;   // kept fraction left by a detectable error
    double worst_shift = 0;  // change of the relevant expectation under the undetectable one
    int cases = 0;
    for (int k = 0; k < 17; ++k) {
        const double theta = -kPi + 2 * kPi * k / 16;
        const int after = static_cast<int>(encoded_ansatz_circuit(theta, MeasBasis::Z).ops.size()) - 1;
        for (MeasBasis basis : {MeasBasis::Z, MeasBasis::XTransformed}) {
            const Circuit c = encoded_ansatz_circuit(theta, basis);
            const auto clean = decode(probabilities(run(c)), c.relabel);
            const char detectable = basis == MeasBasis::Z ? 'X' : 'Z';
            const char blind = basis == MeasBasis::Z ? 'Z' : 'X';
            for (int q = code422::kQ1; q <= code422::kQ4; ++q) {
                ++cases;
                worst_kept = std::max(worst_kept, decode(faulty_probabilities(c, after, q, detectable), c.relabel).kept());
                const auto d = decode(faulty_probabilities(c, after, q, blind), c.relabel);
                const std::vector<Term> terms = basis == MeasBasis::Z
                                                    ? std::vector<Term>{Term::kZ1, Term::kZ2, Term::kZ1Z2}
                                                    : std::vector<Term>{Term::kX1X2};
                for (Term t : terms) {
                    for (bool pi_branch : {false, true}) {
                        const Counts &a = pi_branch ? d.kept_theta_pi : d.kept_theta;
                        const Counts &b = pi_branch ? clean.kept_theta_pi : clean.kept_theta;
                        worst_shift = std::max(worst_shift,
                                               std::abs(expectation_from_counts(a, t) - expectation_from_counts(b, t)));
                    }
                }
            }
        }
    }
    return {worst_kept < kDetectTol && worst_shift < kDetectTol,
            std::to_string(cases) + " injections per type: max kept fraction after X (Z basis) / Z (X basis) = " +
                fmt(worst_kept) + ", max |d<term>| for the blind type = " + fmt(worst_shift) + " (< " +
                fmt(kDetectTol) + ")"};
}

Outcome prep_flagging() {
    const Circuit prep = code422::prep_circuit();
    int discarded = 0;
    int harmless = 0;
    int silent = 0;
    for (int after = -1; after < static_cast<int>(prep.ops.size()); ++after) {
        for (int q : {code422::kQ1, code422::kQ2, code422::kQ3, code422::kQ4, code422::kA1}) {
            const auto d = decode(faulty_probabilities(prep, after, q, 'X'), prep.relabel);
            if (d.kept() < kDetectTol) {
                ++discarded;
                continue;
            }
            // Kept shots must still read logical 00 with probability one.
            const double wrong = 1 - d.kept_theta[0] / d.kept();
            if (wrong < kDetectTol) {
                ++harmless;
            } else {
                ++silent;
            }
        }
    }
    return {silent == 0, std::to_string(discarded) + " fault sites fully discarded, " + std::to_string(harmless) +
                             " leave Z statistics unchanged, " + std::to_string(silent) + " corrupt silently"};
}

Outcome unfolding_round_trip() {
    const auto start = Clock::now();
    const auto truth = probabilities(run(encoded_ansatz_circuit(0.9, MeasBasis::Z)));
    const auto model = ReadoutModel::default_asymmetric(code422::kNumQubits);
    const Spectrum measured =
        sample_counts(apply_readout(truth, model), kUnfoldShots, mix_seed(7, 0)).normalized();
    const ResponseMatrix r = build_response(model, code422::kNumQubits);

    Spectrum t(truth.size(), 1.0 / static_cast<double>(truth.size()));
    bool valid = true;
    int used = 0;
    for (int l = 1; l <= kUnfoldIters; ++l) {
        Spectrum next = ibu_step(r, measured, t);
        double sum = 0;
        for (double v : next) {
            valid = valid && v >= 0;
            sum += v;
        }
        valid = valid && std::abs(sum - 1) < kProbabilityTol;
        const double change = l1_distance(next, t);
        t = std::move(next);
        used = l;
        if (change < UnfoldSettings{}.tol) {
            break;
        }
    }
    const double l1 = l1_distance(t, truth);
    const double raw = l1_distance(measured, truth);
    const double elapsed = seconds_since(start);
    return {valid && l1 < kUnfoldL1 && elapsed < kUnfoldSeconds,
            "L1 to truth " + fmt(l1) + " after " + std::to_string(used) + " iterations (raw " + fmt(raw) + "; < " +
                fmt(kUnfoldL1) + " within " + std::to_string(kUnfoldIters) + "), every iterate a probability: " +
                (valid ? "yes" : "no") + ", " + fmt(elapsed) + " s (< " + fmt(kUnfoldSeconds) + " s)"};
}

Outcome shot_scaling() {
    std::string detail;
    bool pass = true;
    for (Family f : {Family::kPhysical, Family::kEncoded}) {
        SweepSettings s = exact_settings(f, 0.05);
        s.grid_points = 65;
        const auto exact = run_sweep(s);
        std::vector<double> rms;
        for (std::uint64_t shots : {1u << 10, 1u << 13, 1u << 16}) {
            s.shots = shots;
            s.seed = 8;
            const auto sampled = run_sweep(s);
            double sq = 0;
            int n = 0;
            for (std::size_t k = 0; k + 1 < exact.terms.rows.size(); ++k) {
                for (std::size_t t = 0; t < 4; ++t) {
                    const double d = sampled.terms.rows[k].value[t] - exact.terms.rows[k].value[t];
                    sq += d * d;
                    ++n;
                }
            }
            rms.push_back(std::sqrt(sq / n));
        }
        detail += std::string(to_string(f)) + " RMS " + fmt(rms[0]) + ", " + fmt(rms[1]) + ", " + fmt(rms[2]) + "; ";
        for (std::size_t i = 0; i + 1 < rms.size(); ++i) {
            const double ratio = rms[i] / rms[i + 1];
            pass = pass && ratio > std::sqrt(8.0) / kScalingFactor && ratio < std::sqrt(8.0) * kScalingFactor;
        }
    }
    return {pass, detail + "successive ratios within x" + fmt(kScalingFactor) + " of sqrt(8)"};
}

Outcome determinism(const std::string &table_path) {
    const fs::path root = scratch_dir("determinism");
    std::vector<std::string> mismatches;
    auto compare = [&](const fs::path &a, const fs::path &b) {
        for (const auto &entry : fs::directory_iterator(a)) {
            const std::string name = entry.path().filename().string();
            if (name == cli::kManifestName) {
                continue;
            }
            if (!fs::exists(b / name) || io::read_file(a / name) != io::read_file(b / name)) {
                mismatches.push_back((a.filename() / name).string());
            }
        }
    };
    int outputs = 0;

    cli::SweepOptions sweep;
    sweep.family = "encoded";
    sweep.shots = 8192;
    sweep.seed = 7;
    sweep.grid = 65;
    sweep.noise_p = 0.03;
    sweep.readout_model = "default";
    sweep.unfold = true;
    sweep.out_dir = (root / "sweep_a").string();
    outputs += static_cast<int>(cli::cmd_sweep(sweep).outputs.size()) - 1;
    sweep.threads = 1;
    sweep.out_dir = (root / "sweep_b").string();
    cli::cmd_sweep(sweep);
    cli::cmd_replay(root / "sweep_a" / cli::kManifestName, (root / "sweep_replay").string());
    compare(root / "sweep_a", root / "sweep_b");
    compare(root / "sweep_a", root / "sweep_replay");

    cli::UnfoldDemoOptions demo;
    demo.seed = 3;
    demo.out_dir = (root / "demo_a").string();
    outputs += static_cast<int>(cli::cmd_unfold_demo(demo).outputs.size()) - 1;
    cli::cmd_replay(root / "demo_a" / cli::kManifestName, (root / "demo_replay").string());
    compare(root / "demo_a", root / "demo_replay");

    if (fs::exists(table_path)) {
        cli::CurveOptions curve;
        curve.coefficients = table_path;
        curve.terms = {(root / "sweep_a" / "terms.csv").string()};
        curve.out_dir = (root / "curve_a").string();
        outputs += static_cast<int>(cli::cmd_curve(curve).outputs.size()) - 1;
        cli::cmd_replay(root / "curve_a" / cli::kManifestName, (root / "curve_replay").string());
        compare(root / "curve_a", root / "curve_replay");
    }
    std::string detail = std::to_string(outputs) + " result files compared across reruns, thread counts and replays";
    if (!mismatches.empty()) {
        detail += "; differing: " + mismatches.front();
    }
    return {mismatches.empty(), detail};
}

std::set<int> parse_list(const std::string &text) {
    std::set<int> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.insert(std::stoi(item));
        }
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    std::string table_path = H2QED_DATA_DIR "/h2_sto3g_coefficients.csv";
    std::set<int> known;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--known-failures" && i + 1 < argc) {
            known = parse_list(argv[++i]);
        } else if (arg == "--coefficients" && i + 1 < argc) {
            table_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--coefficients FILE] [--known-failures 1,2,...]\n");
            return 2;
        }
    }
    const auto table = load_table(table_path);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"noiseless equivalence", noiseless_equivalence},
        {"closed-form minimum", closed_form_minimum},
        {"crossover reproduction", [&] { return crossover(table, table_path); }},
        {"p = 5% dominance", [&] { return dominance(table); }},
        {"error-detection coverage", detection_coverage},
        {"prep fault flagging", prep_flagging},
        {"unfolding round trip", unfolding_round_trip},
        {"shot-noise scaling", shot_scaling},
        {"determinism", [&] { return determinism(table_path); }},
    };

    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception &e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        if (!outcome.pass) {
            failed.insert(id);
        }
        std::printf("criterion %d: %s  %s: %s\n", id, outcome.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::error_code ignored;
    fs::remove_all(fs::temp_directory_path() / ("h2qed_acceptance_" + std::to_string(::getpid())), ignored);

    std::printf("%zu/%zu criteria pass", criteria.size() - failed.size(), criteria.size());
    if (!known.empty()) {
        std::printf("; known failures:");
        for (int k : known) {
            std::printf(" %d", k);
        }
    }
    std::printf("\n");
    if (failed != known) {
        std::printf("failing set differs from the known-failure list\n");
        return 1;
    }
    return 0;
}
