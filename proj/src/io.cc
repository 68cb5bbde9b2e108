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

#include "h2qed/io.h"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "h2qed/errors.h"

namespace h2qed::io {

namespace {

constexpr std::string_view kCoefficientHeader = "R,g1,g2,g3,g4,g5";
constexpr std::string_view kTermsHeader = "theta,z1,z2,z1z2,x1x2,sigma_z1,sigma_z2,sigma_z1z2,sigma_x1x2,empty";
constexpr std::string_view kCurveHeader = "R,theta_star,E,E_exact,dE,chemical_accuracy";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            return fields;
        }
        start = comma + 1;
    }
}

/// Line-oriented CSV reader that skips comments and blank lines and remembers
/// the line number for error messages.
class CsvReader {
   public:
    CsvReader(std::istream &in, std::string name) : in_(in), name_(std::move(name)) {
    }

    bool next(std::vector<std::string_view> &fields) {
        while (std::getline(in_, line_)) {
            ++number_;
            const std::string_view view = trim(line_);
            if (view.empty() || view.front() == '#') {
                continue;
            }
            fields = split(view);
            return true;
        }
        if (in_.bad()) {
            fail("read error");
        }
        return false;
    }

    void expect_header(std::string_view header) {
        std::vector<std::string_view> fields;
        if (!next(fields)) {
            fail("missing header '" + std::string(header) + "'");
        }
        if (trim(line_) != header) {
            fail("expected header '" + std::string(header) + "', got '" + std::string(trim(line_)) + "'");
        }
    }

    double number(std::string_view field) const {
        double value = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
            fail("not a number: '" + std::string(field) + "'");
        }
        return value;
    }

    bool flag(std::string_view field) const {
        if (field == "0") {
            return false;
        }
        if (field == "1") {
            return true;
        }
        fail("expected 0 or 1, got '" + std::string(field) + "'");
    }

    void expect_width(const std::vector<std::string_view> &fields, std::size_t width) const {
        if (fields.size() != width) {
            fail("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw IngestionError(name_, number_, what);
    }

    const std::string &name() const {
        return name_;
    }

   private:
    std::istream &in_;
    std::string name_;
    std::string line_;
    std::size_t number_ = 0;
};

template <typename Parse>
auto read_with(const std::filesystem::path &path, Parse parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError(path.string(), 0, "cannot open file");
    }
    return parse(in, path.string());
}

double parse_probability(std::string_view text) {
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !(value >= 0 && value <= 1)) {
        throw UsageError("bad readout error probability '" + std::string(text) + "'");
    }
    return value;
}

QubitReadout parse_pair(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw UsageError("readout entries look like e01:e10, got '" + std::string(text) + "'");
    }
    return {parse_probability(text.substr(0, colon)), parse_probability(text.substr(colon + 1))};
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CoefficientTable parse_coefficients(std::istream &in, const std::string &name) {
    CsvReader csv(in, name);
    csv.expect_header(kCoefficientHeader);
    std::vector<CoefficientRow> rows;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        csv.expect_width(f, 6);
        CoefficientRow row;
        row.r = csv.number(f[0]);
        for (std::size_t j = 0; j < 5; ++j) {
            row.g[j] = csv.number(f[j + 1]);
            if (!std::isfinite(row.g[j])) {
                csv.fail("non-finite coefficient");
            }
        }
        if (!std::isfinite(row.r) || (!rows.empty() && !(row.r > rows.back().r))) {
            csv.fail("separations must be finite and strictly increasing");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw IngestionError(name, 0, "no coefficient rows");
    }
    return CoefficientTable(std::move(rows));
}

CoefficientTable read_coefficients(const std::filesystem::path &path) {
    return read_with(path, [](std::istream &in, const std::string &name) { return parse_coefficients(in, name); });
}

std::string terms_csv(const TermEstimates &terms) {
    std::string out(kTermsHeader);
    out += '\n';
    for (const TermRow &row : terms.rows) {
        out += format_double(row.theta);
        for (double v : row.value) {
            out += ',' + format_double(v);
        }
        for (double s : row.sigma) {
            out += ',' + format_double(s);
        }
        out += row.empty ? ",1\n" : ",0\n";
    }
    return out;
}

TermEstimates parse_terms(std::istream &in, const std::string &name) {
    CsvReader csv(in, name);
    csv.expect_header(kTermsHeader);
    TermEstimates terms;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        csv.expect_width(f, 10);
        TermRow row;
        row.theta = csv.number(f[0]);
        for (std::size_t t = 0; t < 4; ++t) {
            row.value[t] = csv.number(f[1 + t]);
            row.sigma[t] = csv.number(f[5 + t]);
        }
        row.empty = csv.flag(f[9]);
        terms.rows.push_back(row);
    }
    if (terms.rows.size() < 3) {
        throw IngestionError(name, 0, "a sweep needs at least 3 grid points");
    }
    return terms;
}

TermEstimates read_terms(const std::filesystem::path &path) {
    return read_with(path, [](std::istream &in, const std::string &name) { return parse_terms(in, name); });
}

std::string curve_csv(const std::vector<CurvePoint> &curve) {
    std::string out(kCurveHeader);
    out += '\n';
    for (const CurvePoint &p : curve) {
        out += format_double(p.r) + ',' + format_double(p.theta_star) + ',' + format_double(p.energy) + ',' +
               format_double(p.energy_exact) + ',' + format_double(p.delta) + (p.chemical_accuracy ? ",1\n" : ",0\n");
    }
    return out;
}

std::vector<CurvePoint> parse_curve(std::istream &in, const std::string &name) {
    CsvReader csv(in, name);
    csv.expect_header(kCurveHeader);
    std::vector<CurvePoint> curve;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        csv.expect_width(f, 6);
        curve.push_back({csv.number(f[0]), csv.number(f[1]), csv.number(f[2]), csv.number(f[3]), csv.number(f[4]),
                         csv.flag(f[5])});
    }
    return curve;
}

std::vector<CurvePoint> read_curve(const std::filesystem::path &path) {
    return read_with(path, [](std::istream &in, const std::string &name) { return parse_curve(in, name); });
}

std::string response_csv(const ResponseMatrix &response) {
    std::string out;
    const auto dim = static_cast<Eigen::Index>(response.dim());
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            out += (j ? "," : "") + format_double(response.matrix()(i, j));
        }
        out += '\n';
    }
    return out;
}

ResponseMatrix parse_response(std::istream &in, const std::string &name) {
    CsvReader csv(in, name);
    std::vector<std::vector<double>> rows;
    std::vector<std::string_view> f;
    while (csv.next(f)) {
        if (!rows.empty()) {
            csv.expect_width(f, rows.front().size());
        }
        std::vector<double> row;
        for (std::string_view field : f) {
            row.push_back(csv.number(field));
        }
        rows.push_back(std::move(row));
    }
    const std::size_t dim = rows.size();
    int n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    if (dim < 2 || (std::size_t{1} << n) != dim || rows.front().size() != dim) {
        throw IngestionError(name, 0, "response matrix must be square with a power-of-two dimension");
    }
    Eigen::MatrixXd m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    try {
        return ResponseMatrix(n, std::move(m));
    } catch (const Error &e) {
        throw IngestionError(name, 0, e.what());
    }
}

std::string noise_scan_csv(const NoiseScan &scan) {
    std::string out = "p,error_physical,error_encoded\n";
    for (const NoiseScanRow &row : scan.rows) {
        out += format_double(row.p) + ',' + format_double(row.error_physical) + ',' + format_double(row.error_encoded) +
               '\n';
    }
    return out;
}

std::string discards_json(const std::vector<DiscardStats> &discards) {
    auto tally = [](const BranchTally &t) {
        return nlohmann::ordered_json{{"shots_in", t.shots_in},
                                      {"discarded_flag", t.discarded_flag},
                                      {"discarded_parity", t.discarded_parity},
                                      {"kept_theta", t.kept_theta},
                                      {"kept_theta_pi", t.kept_theta_pi}};
    };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const DiscardStats &d : discards) {
        rows.push_back({{"theta", d.theta}, {"z_basis", tally(d.z_basis)}, {"x_basis", tally(d.x_basis)}});
    }
    return rows.dump(2) + '\n';
}

std::optional<ReadoutModel> parse_readout_model(std::string_view text, int num_qubits) {
    if (text == "none") {
        return std::nullopt;
    }
    if (text == "default") {
        return ReadoutModel::default_asymmetric(num_qubits);
    }
    ReadoutModel model;
    if (text.find('/') == std::string_view::npos) {
        model.qubits.assign(static_cast<std::size_t>(num_qubits), parse_pair(text));
        return model;
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t slash = text.find('/', start);
        model.qubits.push_back(parse_pair(text.substr(start, slash - start)));
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
    if (model.num_qubits() != num_qubits) {
        throw UsageError("readout model lists " + std::to_string(model.num_qubits()) + " qubits, circuit has " +
                         std::to_string(num_qubits));
    }
    return model;
}

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.close();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error("cannot write " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError(path.string(), 0, "cannot open file");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_file(const std::filesystem::path &path) {
    const std::string bytes = read_file(path);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr)) {
        throw Error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 15];
    }
    return hex;
}

}  // namespace h2qed::io
