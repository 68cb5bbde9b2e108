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

#include "h2qed/unfold.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "h2qed/code422.h"
#include "h2qed/errors.h"
#include "h2qed/vqe.h"

using namespace h2qed;

namespace {

void expect_probability(const Spectrum &t) {
    double sum = 0;
    for (double v : t) {
        ASSERT_GE(v, 0);
        sum += v;
    }
    ASSERT_NEAR(sum, 1, 1e-9);
}

/// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0;
    double shift = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        const double candidate = (cumulative - 1) / static_cast<double>(k + 1);
        if (u[k] - candidate > 0) {
            shift = candidate;
        }
    }
    for (double &x : v) {
        x = std::max(0.0, x - shift);
    }
    return v;
}

Spectrum random_spectrum(std::mt19937_64 &rng, std::size_t dim) {
    std::uniform_real_distribution<double> unit(0.05, 1);
    Spectrum t(dim);
    for (double &v : t) {
        v = unit(rng);
    }
    const double sum = std::accumulate(t.begin(), t.end(), 0.0);
    for (double &v : t) {
        v /= sum;
    }
    return t;
}

std::vector<double> encoded_truth(double theta) {
    return probabilities(run(encoded_ansatz_circuit(theta, MeasBasis::Z)));
}

}  // namespace

TEST(unfold, identity_step_returns_measured) {
    const ResponseMatrix id(2, Eigen::MatrixXd::Identity(4, 4));
    const std::vector<double> m{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> t{0.25, 0.25, 0.25, 0.25};
    const auto next = ibu_step(id, m, t);
    for (std::size_t i = 0; i < 4; ++i) {
        ASSERT_NEAR(next[i], m[i], 1e-15);
    }
    const auto result = unfold(id, m);
    ASSERT_TRUE(result.converged);
    ASSERT_EQ(result.iterations, 1);
}

TEST(unfold, fixed_point) {
    std::mt19937_64 rng(1);
    const ResponseMatrix r = build_response(ReadoutModel::default_asymmetric(3), 3);
    for (int trial = 0; trial < 20; ++trial) {
        const Spectrum t = random_spectrum(rng, 8);
        const auto m = r.apply(t);
        const auto next = ibu_step(r, m, t);
        ASSERT_LT(l1_distance(next, t), 1e-10);
    }
}

TEST(unfold, hand_evaluated_step) {
    Eigen::MatrixXd m(2, 2);
    m << 0.9, 0.05, 0.1, 0.95;
    const ResponseMatrix r(1, m);
    const std::vector<double> measured{0.5, 0.5};
    const std::vector<double> uniform{0.5, 0.5};
    const auto next = ibu_step(r, measured, uniform);
    ASSERT_NEAR(next[0], 208.0 / 399, 1e-15);
    ASSERT_NEAR(next[1], 191.0 / 399, 1e-15);
}

TEST(unfold, support_error) {
    const ResponseMatrix id(1, Eigen::MatrixXd::Identity(2, 2));
    const std::vector<double> m{0.5, 0.5};
    const std::vector<double> t{1, 0};
    ASSERT_THROW(ibu_step(id, m, t), SupportError);
    UnfoldSettings s;
    s.prior = Spectrum{1, 0};
    ASSERT_THROW(unfold(id, m, s), SupportError);
}

TEST(unfold, settings_validation) {
    const ResponseMatrix id(1, Eigen::MatrixXd::Identity(2, 2));
    const std::vector<double> m{0.5, 0.5};
    UnfoldSettings s;
    s.max_iters = 0;
    ASSERT_THROW(unfold(id, m, s), UsageError);
    s.max_iters = 10;
    s.tol = 0;
    ASSERT_THROW(unfold(id, m, s), UsageError);
    const std::vector<double> bad{0.7, 0.7};
    ASSERT_THROW(unfold(id, bad), ProbabilityError);
    const std::vector<double> wrong{1.0};
    ASSERT_THROW(unfold(id, wrong), FormatError);
}

TEST(unfold, matrix_inverse_oracle) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0, 1);
    int cases = 0;
    while (cases < 50) {
        // Near-identity column-stochastic matrix with generic (non-product) structure.
        Eigen::MatrixXd noise(4, 4);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                noise(i, j) = unit(rng);
            }
        }
        for (int j = 0; j < 4; ++j) {
            noise.col(j) /= noise.col(j).sum();
        }
        const double mix = 0.3 * unit(rng);
        const Eigen::MatrixXd rm = (1 - mix) * Eigen::MatrixXd::Identity(4, 4) + mix * noise;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rm);
        if (svd.singularValues()(0) / svd.singularValues()(3) >= 10) {
            continue;
        }
        ++cases;
        const ResponseMatrix r(2, rm);
        const Spectrum truth = random_spectrum(rng, 4);
        const auto m = r.apply(truth);
        const Eigen::VectorXd inv = rm.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(m.data(), 4));
        const auto direct = project_to_simplex({inv.data(), inv.data() + 4});

        UnfoldSettings s;
        s.tol = 1e-12;
        s.max_iters = 200000;
        const auto result = unfold(r, m, s);
        ASSERT_LT(l1_distance(result.spectrum, direct), 1e-3) << "case " << cases;
    }
}

TEST(unfold, simplex_projection_oracle_sanity) {
    const auto p = project_to_simplex({0.7, 0.6, -0.2});
    ASSERT_NEAR(p[0], 0.55, 1e-15);
    ASSERT_NEAR(p[1], 0.45, 1e-15);
    ASSERT_EQ(p[2], 0);
}

TEST(unfold, six_qubit_round_trip) {
    const auto truth = encoded_truth(0.9);
    const ResponseMatrix r = build_response(ReadoutModel::default_asymmetric(6), 6);
    const auto m = r.apply(truth);
    Spectrum t(64, 1.0 / 64);
    double fit = l1_distance(r.apply(t), m);
    bool recovered = false;
    for (int l = 1; l <= 100; ++l) {
        t = ibu_step(r, m, t);
        expect_probability(t);
        const double next_fit = l1_distance(r.apply(t), m);
        ASSERT_LE(next_fit, fit + 1e-12) << "iteration " << l;
        fit = next_fit;
        if (l1_distance(t, truth) < 1e-2) {
            recovered = true;
            break;
        }
    }
    ASSERT_TRUE(recovered);
}

TEST(unfold, iterates_stay_probabilities_on_sampled_data) {
    const auto truth = encoded_truth(-1.7);
    const auto model = ReadoutModel::default_asymmetric(6);
    const auto sampled = sample_counts(apply_readout(truth, model), 100000, 3).normalized();
    const ResponseMatrix r = build_response(model, 6);
    Spectrum t(64, 1.0 / 64);
    for (int l = 0; l < 300; ++l) {
        t = ibu_step(r, sampled, t);
        expect_probability(t);
    }
}

TEST(unfold, correct_counts_contract) {
    const ResponseMatrix id = build_response(ReadoutModel::uniform(2, 0, 0), 2);
    const Counts c = Counts::from_tallies(2, {10, 0, 5, 17});
    const Counts same = correct_counts(c, id);
    for (std::size_t i = 0; i < 4; ++i) {
        ASSERT_NEAR(same[i], c[i], 1e-9);
    }

    const auto model = ReadoutModel::default_asymmetric(6);
    const Counts noisy = sample_counts(apply_readout(encoded_truth(0.2), model), 8192, 5);
    const Counts corrected = correct_counts(noisy, build_response(model, 6));
    ASSERT_NEAR(corrected.shots(), noisy.shots(), 1e-6);
    ASSERT_THROW(correct_counts(c, build_response(model, 6)), FormatError);
}

TEST(unfold, correction_precedes_postselection) {
    // Unfolding the six-qubit spectrum and then decoding recovers the logical
    // distribution; decoding first and unfolding the logical histogram does not.
    const double theta = 1.1;
    const Circuit circuit = encoded_ansatz_circuit(theta, MeasBasis::Z);
    const auto truth = probabilities(run(circuit));
    const auto model = ReadoutModel::default_asymmetric(6);
    const Counts measured = Counts::from_tallies(6, apply_readout(truth, model));

    const auto logical = [&](const Counts &c) {
        return code422::decode_counts(c, circuit.relabel).kept_theta.normalized();
    };
    const auto exact = logical(Counts::from_tallies(6, truth));

    UnfoldSettings tight;
    tight.tol = 1e-10;
    tight.max_iters = 100000;
    const auto first = logical(correct_counts(measured, build_response(model, 6), tight));

    const Counts decoded = code422::decode_counts(measured, circuit.relabel).kept_theta;
    const auto later = correct_counts(decoded, build_response(ReadoutModel::default_asymmetric(2), 2), tight).normalized();

    const double err_first = l1_distance(first, exact);
    const double err_later = l1_distance(later, exact);
    ASSERT_LT(err_first, 1e-3);
    ASSERT_GT(err_later, 10 * err_first);
}
