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

#include "h2qed/vqe.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <memory>
#include <thread>

#include <Eigen/Eigenvalues>

#include "h2qed/errors.h"

namespace h2qed {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename Fn>
void parallel_for(int count, int threads, Fn &&fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(count, 1));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < count && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        if (!failed.exchange(true)) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

double wrap_angle(double theta) {
    while (theta > kPi) {
        theta -= 2 * kPi;
    }
    while (theta < -kPi) {
        theta += 2 * kPi;
    }
    return theta;
}

/// Histogram of one circuit, reduced to the logical register.
struct CircuitOutcome {
    Counts theta_branch{2};
    Counts pi_branch{2};
    double raw_theta = 0;  // pre-correction kept shots, for shot-noise estimates
    double raw_pi = 0;
    BranchTally tally;
};

Counts to_logical(const Counts &physical, const Permutation &relabel) {
    Counts logical(2);
    for (std::size_t i = 0; i < physical.size(); ++i) {
        if (physical[i] != 0) {
            logical.add(relabel.map_index(i), physical[i]);
        }
    }
    return logical;
}

CircuitOutcome evaluate(const SweepSettings &s, const std::optional<ResponseMatrix> &response, double theta, MeasBasis basis,
                        std::uint64_t stream) {
    const Circuit circuit = s.family == Family::kEncoded ? encoded_ansatz_circuit(theta, basis)
                                                         : physical_ansatz_circuit(theta, basis);
    std::vector<double> probs = probabilities(run_noisy(circuit, s.noise));
    if (s.readout) {
        probs = apply_readout(probs, *s.readout);
    }
    const Counts raw = s.shots ? sample_counts(probs, *s.shots, mix_seed(s.seed, stream))
                               : Counts::from_tallies(circuit.num_qubits, probs);
    const Counts corrected = response ? correct_counts(raw, *response, s.unfold_settings) : raw;

    CircuitOutcome out;
    if (s.family == Family::kPhysical) {
        out.theta_branch = to_logical(corrected, circuit.relabel);
        out.raw_theta = raw.shots();
        return out;
    }
    const code422::DecodeResult decoded = code422::decode_counts(corrected, circuit.relabel);
    out.theta_branch = decoded.kept_theta;
    out.pi_branch = decoded.kept_theta_pi;
    out.tally = {decoded.shots_in, decoded.discarded_flag, decoded.discarded_parity, decoded.kept_theta.shots(),
                 decoded.kept_theta_pi.shots()};
    if (response) {
        const code422::DecodeResult raw_decoded = code422::decode_counts(raw, circuit.relabel);
        out.raw_theta = raw_decoded.kept_theta.shots();
        out.raw_pi = raw_decoded.kept_theta_pi.shots();
    } else {
        out.raw_theta = decoded.kept_theta.shots();
        out.raw_pi = decoded.kept_theta_pi.shots();
    }
    return out;
}

struct Bin {
    Counts counts{2};
    double raw = 0;
};

}  // namespace

std::string_view to_string(Family family) {
    return family == Family::kEncoded ? "encoded" : "physical";
}

Family parse_family(std::string_view text) {
    if (text == "physical") {
        return Family::kPhysical;
    }
    if (text == "encoded") {
        return Family::kEncoded;
    }
    throw UsageError("unknown circuit family '" + std::string(text) + "'");
}

Circuit physical_ansatz_circuit(double theta, MeasBasis basis) {
    Circuit c(2);
    c.append(Gate::ry(0, theta));
    c.append(Gate::cnot(0, 1));
    if (basis == MeasBasis::XTransformed) {
        c.append(Gate::h(0));
        c.append(Gate::h(1));
        c.meas_basis = MeasBasis::XTransformed;
    }
    return c;
}

Circuit encoded_ansatz_circuit(double theta, MeasBasis basis) {
    Circuit c = code422::prep_circuit();
    code422::append_rotation_gadget(c, theta);
    code422::logical_cnot(c, code422::CnotDirection::kOneToTwo);
    if (basis == MeasBasis::XTransformed) {
        code422::logical_basis_change(c);
    }
    return c;
}

double expectation_from_counts(const Counts &logical, Term term) {
    if (logical.num_bits() != 2) {
        throw FormatError("term estimates need a two-bit logical histogram");
    }
    if (!(logical.shots() > 0)) {
        throw EmptyBranchError("empty postselected histogram");
    }
    double acc = 0;
    for (unsigned i = 0; i < 4; ++i) {
        const int b1 = static_cast<int>(i & 1u);
        const int b2 = static_cast<int>((i >> 1) & 1u);
        int parity = 0;
        switch (term) {
            case Term::kZ1:
                parity = b1;
                break;
            case Term::kZ2:
                parity = b2;
                break;
            case Term::kZ1Z2:
            case Term::kX1X2:
                parity = b1 ^ b2;
                break;
        }
        acc += (parity ? -1.0 : 1.0) * logical[i];
    }
    return acc / logical.shots();
}

ThetaGrid::ThetaGrid(int points) : points_(points) {
    if (points < 3 || points % 2 == 0) {
        throw UsageError("theta grid needs an odd number of points >= 3, got " + std::to_string(points));
    }
}

double ThetaGrid::step() const {
    return 2 * kPi / unique_bins();
}

double ThetaGrid::theta(int index) const {
    if (index == points_ - 1) {
        return kPi;
    }
    return -kPi + index * step();
}

SweepResult run_sweep(const SweepSettings &s) {
    const ThetaGrid grid(s.grid_points);
    s.noise.validate();
    if (s.unfold && !s.readout) {
        throw UsageError("unfolding requires a readout model");
    }
    if (s.shots && *s.shots < 1) {
        throw UsageError("shots must be positive");
    }
    const int width = s.family == Family::kEncoded ? code422::kNumQubits : 2;
    if (s.readout && s.readout->num_qubits() != width) {
        throw UsageError("readout model covers " + std::to_string(s.readout->num_qubits()) + " qubits, circuit has " +
                         std::to_string(width));
    }

    std::optional<ResponseMatrix> response;
    if (s.unfold) {
        // Shot mode calibrates like the hardware procedure; exact mode uses the model itself.
        response = s.shots ? calibrate_response(*s.readout, width, *s.shots, mix_seed(s.seed, ~std::uint64_t{0}))
                           : build_response(*s.readout, width);
    }

    const int points = grid.points();
    std::vector<CircuitOutcome> z_out(static_cast<std::size_t>(points));
    std::vector<CircuitOutcome> x_out(static_cast<std::size_t>(points));
    parallel_for(2 * points, s.threads, [&](int job) {
        const int k = job / 2;
        const bool x_basis = job % 2;
        auto &slot = x_basis ? x_out[k] : z_out[k];
        slot = evaluate(s, response, grid.theta(k), x_basis ? MeasBasis::XTransformed : MeasBasis::Z,
                        static_cast<std::uint64_t>(job));
    });

    const int bins = grid.unique_bins();
    std::vector<Bin> z_bins(static_cast<std::size_t>(bins));
    std::vector<Bin> x_bins(static_cast<std::size_t>(bins));
    auto accumulate = [&](std::vector<Bin> &target, const std::vector<CircuitOutcome> &source) {
        for (int k = 0; k < points; ++k) {
            const int b = grid.bin(k);
            target[b].counts.merge(source[k].theta_branch);
            target[b].raw += source[k].raw_theta;
            if (s.family == Family::kEncoded && s.merge_pi_branch) {
                const int shifted = (b + grid.shift()) % bins;
                target[shifted].counts.merge(source[k].pi_branch);
                target[shifted].raw += source[k].raw_pi;
            }
        }
    };
    accumulate(z_bins, z_out);
    accumulate(x_bins, x_out);

    SweepResult result;
    result.terms.rows.resize(static_cast<std::size_t>(points));
    const double nan = std::nan("");
    for (int k = 0; k < points; ++k) {
        TermRow &row = result.terms.rows[k];
        row.theta = grid.theta(k);
        const Bin &z = z_bins[grid.bin(k)];
        const Bin &x = x_bins[grid.bin(k)];
        const bool z_empty = !(z.counts.shots() > 0) || !(z.raw > 0);
        const bool x_empty = !(x.counts.shots() > 0) || !(x.raw > 0);
        row.empty = z_empty || x_empty;
        for (std::size_t t = 0; t < kTerms.size(); ++t) {
            const bool from_x = kTerms[t] == Term::kX1X2;
            const Bin &bin = from_x ? x : z;
            if (from_x ? x_empty : z_empty) {
                row.value[t] = nan;
                row.sigma[t] = nan;
                continue;
            }
            const double v = expectation_from_counts(bin.counts, kTerms[t]);
            row.value[t] = v;
            row.sigma[t] = s.shots ? std::sqrt(std::max(0.0, 1 - v * v) / bin.raw) : 0.0;
        }
    }

    if (s.family == Family::kEncoded) {
        result.discards.resize(static_cast<std::size_t>(points));
        for (int k = 0; k < points; ++k) {
            result.discards[k] = {grid.theta(k), z_out[k].tally, x_out[k].tally};
        }
    }
    return result;
}

CoefficientTable::CoefficientTable(std::vector<CoefficientRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw FormatError("coefficient table is empty");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!std::isfinite(rows_[i].r)) {
            throw FormatError("non-finite separation");
        }
        for (double g : rows_[i].g) {
            if (!std::isfinite(g)) {
                throw FormatError("non-finite coefficient at R = " + std::to_string(rows_[i].r));
            }
        }
        if (i > 0 && !(rows_[i].r > rows_[i - 1].r)) {
            throw FormatError("separations must be strictly increasing");
        }
    }
}

const CoefficientRow &CoefficientTable::nearest(double r) const {
    return *std::min_element(rows_.begin(), rows_.end(), [r](const CoefficientRow &a, const CoefficientRow &b) {
        return std::abs(a.r - r) < std::abs(b.r - r);
    });
}

double energy(const std::array<double, 4> &terms, const std::array<double, 5> &g) {
    return g[0] + g[1] * terms[0] + g[2] * terms[1] + g[3] * terms[2] + g[4] * terms[3];
}

double energy_sigma(const std::array<double, 4> &sigmas, const std::array<double, 5> &g) {
    double var = 0;
    for (std::size_t t = 0; t < 4; ++t) {
        var += g[t + 1] * g[t + 1] * sigmas[t] * sigmas[t];
    }
    return std::sqrt(var);
}

EnergyMinimum minimize_energy(std::span<const double> thetas, std::span<const double> energies,
                              std::span<const bool> excluded) {
    if (thetas.size() != energies.size() || (!excluded.empty() && excluded.size() != thetas.size())) {
        throw FormatError("theta, energy and exclusion lists differ in length");
    }
    if (thetas.size() < 3) {
        throw UsageError("minimization needs at least 3 grid points");
    }
    std::size_t n = thetas.size();
    const bool periodic = std::abs(thetas.back() - thetas.front() - 2 * kPi) < 1e-9;
    std::vector<double> e(energies.begin(), energies.end());
    std::vector<bool> skip(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        skip[i] = (!excluded.empty() && excluded[i]) || std::isnan(e[i]);
    }
    if (periodic) {
        // The last point repeats the first angle.
        if (!skip[0] && !skip[n - 1]) {
            e[0] = 0.5 * (e[0] + e[n - 1]);
        } else if (skip[0] && !skip[n - 1]) {
            e[0] = e[n - 1];
            skip[0] = false;
        }
        --n;
    }

    int best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (skip[i]) {
            continue;
        }
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const double tol = 1e-14 * std::max(1.0, std::abs(e[best]));
        if (e[i] < e[best] - tol || (std::abs(e[i] - e[best]) <= tol && std::abs(thetas[i]) < std::abs(thetas[best]))) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) {
        throw EmptyBranchError("every grid point is excluded");
    }

    EnergyMinimum result{thetas[best], e[best], best};
    const auto b = static_cast<std::size_t>(best);
    std::size_t lo = 0;
    std::size_t hi = 0;
    if (periodic) {
        lo = (b + n - 1) % n;
        hi = (b + 1) % n;
    } else if (b > 0 && b + 1 < n) {
        lo = b - 1;
        hi = b + 1;
    } else {
        return result;
    }
    if (skip[lo] || skip[hi]) {
        return result;
    }
    const double h = periodic ? 2 * kPi / static_cast<double>(n) : thetas[hi] - thetas[b];
    const double curvature = e[hi] + e[lo] - 2 * e[b];
    if (!(curvature > 0) || !(h > 0)) {
        return result;
    }
    // E(x) = c + a cos x + b sin x through x = -h, 0, h.
    const double a = curvature / (2 * (std::cos(h) - 1));
    const double s = (e[hi] - e[lo]) / (2 * std::sin(h));
    const double c = e[b] - a;
    const double offset = std::atan2(-s, -a);
    if (std::abs(offset) > h) {
        return result;
    }
    result.theta = wrap_angle(thetas[b] + offset);
    result.energy = c - std::hypot(a, s);
    return result;
}

double exact_ground_energy(const std::array<double, 5> &g) {
    // Basis index b1 + 2 b2, Z eigenvalue (-1)^b.
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i) {
        const double z1 = (i & 1) ? -1 : 1;
        const double z2 = (i & 2) ? -1 : 1;
        h(i, i) = g[0] + g[1] * z1 + g[2] * z2 + g[3] * z1 * z2;
        h(i, 3 - i) = g[4];  // X1 X2 flips both bits
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

std::vector<CurvePoint> potential_curve(const CoefficientTable &table, const TermEstimates &terms) {
    if (terms.rows.size() < 3) {
        throw FormatError("sweep has fewer than 3 grid points");
    }
    std::vector<double> thetas;
    std::vector<bool> excluded_storage;
    for (const TermRow &row : terms.rows) {
        thetas.push_back(row.theta);
        excluded_storage.push_back(row.empty);
    }
    const std::unique_ptr<bool[]> excluded(new bool[excluded_storage.size()]);
    std::copy(excluded_storage.begin(), excluded_storage.end(), excluded.get());

    std::vector<CurvePoint> curve;
    for (const CoefficientRow &coeffs : table.rows()) {
        std::vector<double> energies;
        energies.reserve(terms.rows.size());
        for (const TermRow &row : terms.rows) {
            energies.push_back(row.empty ? std::nan("") : energy(row.value, coeffs.g));
        }
        const EnergyMinimum min =
            minimize_energy(thetas, energies, std::span<const bool>(excluded.get(), excluded_storage.size()));
        CurvePoint point;
        point.r = coeffs.r;
        point.theta_star = min.theta;
        point.energy = min.energy;
        point.energy_exact = exact_ground_energy(coeffs.g);
        point.delta = point.energy - point.energy_exact;
        point.chemical_accuracy = std::abs(point.delta) < kChemicalAccuracy;
        curve.push_back(point);
    }
    return curve;
}

std::array<double, 7> probe_angles() {
    return {-3 * kPi / 4, -kPi / 2, -kPi / 4, 0.0, kPi / 4, kPi / 2, 3 * kPi / 4};
}

double score_mapping(std::span<const double> estimates, std::span<const double> exact) {
    if (estimates.size() != 7 || exact.size() != 7) {
        throw FormatError("mapping scores need exactly 7 probe values, got " + std::to_string(estimates.size()) + " and " +
                          std::to_string(exact.size()));
    }
    double d = 0;
    for (std::size_t i = 0; i < 7; ++i) {
        d += std::abs(estimates[i] - exact[i]);
    }
    return d;
}

std::array<double, 7> probe_x1x2(SweepSettings settings) {
    // A 9-point grid has spacing pi/4 and contains every probe angle at indices 1..7.
    settings.grid_points = 9;
    const SweepResult sweep = run_sweep(settings);
    std::array<double, 7> out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sweep.terms.rows[i + 1].value[3];
    }
    return out;
}

NoiseScan noise_scan(const CoefficientRow &row, std::span<const double> p_values, int grid_points, int threads) {
    NoiseScan scan;
    scan.row = row;
    const CoefficientTable table({row});
    for (double p : p_values) {
        NoiseScanRow out{p, 0, 0};
        for (Family family : {Family::kPhysical, Family::kEncoded}) {
            SweepSettings s;
            s.family = family;
            s.grid_points = grid_points;
            s.noise = NoiseConfig::from_p(p);
            s.threads = threads;
            const auto curve = potential_curve(table, run_sweep(s).terms);
            (family == Family::kPhysical ? out.error_physical : out.error_encoded) = std::abs(curve.front().delta);
        }
        scan.rows.push_back(out);
    }
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
        const double d = scan.rows[i].error_encoded - scan.rows[i].error_physical;
        if (d > 1e-12) {
            if (i == 0) {
                scan.crossover = scan.rows[0].p;
            } else {
                const double d0 = scan.rows[i - 1].error_encoded - scan.rows[i - 1].error_physical;
                const double p0 = scan.rows[i - 1].p;
                scan.crossover = p0 + (scan.rows[i].p - p0) * (-d0) / (d - d0);
            }
            break;
        }
    }
    return scan;
}

}  // namespace h2qed
