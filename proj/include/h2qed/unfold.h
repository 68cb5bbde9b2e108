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

#ifndef H2QED_UNFOLD_H
#define H2QED_UNFOLD_H

#include <optional>
#include <span>
#include <vector>

#include "h2qed/noise.h"
#include "h2qed/sim.h"

namespace h2qed {

/// Probability vector over 2^n bins.
using Spectrum = std::vector<double>;

struct UnfoldSettings {
    int max_iters = 1000;
    double tol = 1e-6;  // L1 change between successive iterates
    /// Starting spectrum; uniform when empty.
    std::optional<Spectrum> prior;
};

struct UnfoldResult {
    Spectrum spectrum;
    /// Index of the iterate at which the next update moved less than tol, or
    /// max_iters when that never happened.
    int iterations = 0;
    bool converged = false;
    /// False if L1(R t - m) ever increased between iterates.
    bool monotone_fit = true;
};

/// One iterative Bayesian update:
///   t'_i = sum_j m_j R_ji t_i / sum_k R_jk t_k.
/// Throws SupportError when some m_j > 0 has a vanishing denominator.
Spectrum ibu_step(const ResponseMatrix &response, std::span<const double> measured, std::span<const double> current);

UnfoldResult unfold(const ResponseMatrix &response, std::span<const double> measured, const UnfoldSettings &settings = {});

/// Unfolds a histogram and rescales it back to the original shot total. The
/// result carries fractional tallies.
Counts correct_counts(const Counts &counts, const ResponseMatrix &response, const UnfoldSettings &settings = {});

/// L1 distance between two equal-length vectors.
double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace h2qed

#endif  // H2QED_UNFOLD_H
