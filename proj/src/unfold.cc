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
#include <string>

#include "h2qed/errors.h"

namespace h2qed {

namespace {

void check_spectrum(std::span<const double> s, std::size_t dim, const char *what) {
    if (s.size() != dim) {
        throw FormatError(std::string(what) + " length does not match response matrix");
    }
    double total = 0;
    for (double v : s) {
        if (!(v >= 0)) {
            throw ProbabilityError(std::string(what) + " has a negative or NaN entry");
        }
        total += v;
    }
    if (std::abs(total - 1) > 1e-9) {
        throw ProbabilityError(std::string(what) + " does not sum to 1");
    }
}

}  // namespace

double l1_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw FormatError("L1 distance of vectors with different lengths");
    }
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += std::abs(a[i] - b[i]);
    }
    return d;
}

Spectrum ibu_step(const ResponseMatrix &response, std::span<const double> measured, std::span<const double> current) {
    const std::size_t dim = response.dim();
    if (measured.size() != dim || current.size() != dim) {
        throw FormatError("spectrum length does not match response matrix");
    }
    const std::vector<double> folded = response.apply(current);
    Spectrum next(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        if (measured[j] == 0) {
            continue;
        }
        if (!(folded[j] > 0)) {
            throw SupportError("measured bin " + std::to_string(j) + " has mass the response model cannot produce");
        }
        const double w = measured[j] / folded[j];
        for (std::size_t i = 0; i < dim; ++i) {
            next[i] += response(j, i) * current[i] * w;
        }
    }
    double total = 0;
    for (double v : next) {
        total += v;
    }
    for (double &v : next) {
        v /= total;
    }
    return next;
}

UnfoldResult unfold(const ResponseMatrix &response, std::span<const double> measured, const UnfoldSettings &settings) {
    if (settings.max_iters < 1) {
        throw UsageError("max_iters must be at least 1");
    }
    if (!(settings.tol > 0)) {
        throw UsageError("tol must be positive");
    }
    const std::size_t dim = response.dim();
    check_spectrum(measured, dim, "measured spectrum");

    UnfoldResult result;
    Spectrum current;
    if (settings.prior) {
        check_spectrum(*settings.prior, dim, "prior");
        current = *settings.prior;
    } else {
        current.assign(dim, 1.0 / static_cast<double>(dim));
    }

    double fit = l1_distance(response.apply(current), measured);
    for (int l = 0; l < settings.max_iters; ++l) {
        Spectrum next = ibu_step(response, measured, current);
        const double change = l1_distance(next, current);
        const double next_fit = l1_distance(response.apply(next), measured);
        if (next_fit > fit + 1e-12) {
            result.monotone_fit = false;
        }
        fit = next_fit;
        current = std::move(next);
        if (change < settings.tol) {
            result.converged = true;
            result.iterations = l;
            break;
        }
        result.iterations = l + 1;
    }
    result.spectrum = std::move(current);
    return result;
}

Counts correct_counts(const Counts &counts, const ResponseMatrix &response, const UnfoldSettings &settings) {
    if (counts.num_bits() != response.num_qubits()) {
        throw FormatError("histogram width does not match response matrix");
    }
    const std::vector<double> measured = counts.normalized();
    const UnfoldResult unfolded = unfold(response, measured, settings);
    std::vector<double> tallies(unfolded.spectrum);
    for (double &v : tallies) {
        v *= counts.shots();
    }
    return Counts::from_tallies(counts.num_bits(), std::move(tallies));
}

}  // namespace h2qed
