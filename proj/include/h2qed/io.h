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

#ifndef H2QED_IO_H
#define H2QED_IO_H

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "h2qed/noise.h"
#include "h2qed/vqe.h"

namespace h2qed::io {

/// Shortest round-tripping decimal form ("%.17g"); NaN prints as "nan".
std::string format_double(double value);

/// Coefficient table: header `R,g1,g2,g3,g4,g5`, lines starting with `#` are comments.
CoefficientTable parse_coefficients(std::istream &in, const std::string &name);
CoefficientTable read_coefficients(const std::filesystem::path &path);

std::string terms_csv(const TermEstimates &terms);
TermEstimates parse_terms(std::istream &in, const std::string &name);
TermEstimates read_terms(const std::filesystem::path &path);

std::string curve_csv(const std::vector<CurvePoint> &curve);
std::vector<CurvePoint> parse_curve(std::istream &in, const std::string &name);
std::vector<CurvePoint> read_curve(const std::filesystem::path &path);

/// Row-major, one row per measured outcome.
std::string response_csv(const ResponseMatrix &response);
ResponseMatrix parse_response(std::istream &in, const std::string &name);

std::string noise_scan_csv(const NoiseScan &scan);
std::string discards_json(const std::vector<DiscardStats> &discards);

/// "none", "default", "e01:e10" for every qubit, or "e01:e10/e01:e10/..." per qubit.
/// Returns nullopt for "none".
std::optional<ReadoutModel> parse_readout_model(std::string_view text, int num_qubits);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);
std::string read_file(const std::filesystem::path &path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path &path);

}  // namespace h2qed::io

#endif  // H2QED_IO_H
