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

#include "h2qed/code422.h"

#include <bit>
#include <cmath>
#include <string>

#include "h2qed/errors.h"

namespace h2qed::code422 {

namespace {

struct WordEntry {
    LogicalWord word;
    std::string_view first;
    std::string_view second;
};

constexpr std::array<WordEntry, 4> kCodeWords{{
    {{0, 0}, "0000", "1111"},
    {{0, 1}, "0011", "1100"},
    {{1, 0}, "0101", "1010"},
    {{1, 1}, "0110", "1001"},
}};

const std::array<std::optional<LogicalWord>, 16> &lookup_table() {
    static const auto table = [] {
        std::array<std::optional<LogicalWord>, 16> t{};
        for (const auto &entry : kCodeWords) {
            t[code_bits(entry.first)] = entry.word;
            t[code_bits(entry.second)] = entry.word;
        }
        return t;
    }();
    return table;
}

}  // namespace

unsigned code_bits(std::string_view q1_to_q4) {
    if (q1_to_q4.size() != kNumCodeQubits) {
        throw FormatError("code string must have 4 characters");
    }
    unsigned out = 0;
    for (std::size_t k = 0; k < q1_to_q4.size(); ++k) {
        if (q1_to_q4[k] == '1') {
            out |= 1u << k;
        } else if (q1_to_q4[k] != '0') {
            throw FormatError("code string must be binary");
        }
    }
    return out;
}

std::array<unsigned, 2> LogicalWord::constituents() const {
    for (const auto &entry : kCodeWords) {
        if (entry.word == *this) {
            return {code_bits(entry.first), code_bits(entry.second)};
        }
    }
    throw FormatError("logical bits must be 0 or 1");
}

std::optional<LogicalWord> decode_word(unsigned code) {
    if (code >= 16) {
        throw FormatError("code string wider than 4 bits");
    }
    return lookup_table()[code];
}

DensityState encode_state(int b1, int b2) {
    if ((b1 != 0 && b1 != 1) || (b2 != 0 && b2 != 1)) {
        throw FormatError("logical bits must be 0 or 1");
    }
    const auto [c1, c2] = LogicalWord{b1, b2}.constituents();
    std::vector<Complex> psi(16, 0.0);
    psi[c1] = 1 / std::sqrt(2.0);
    psi[c2] = 1 / std::sqrt(2.0);
    return DensityState::pure(psi);
}

Circuit prep_circuit() {
    Circuit c(kNumQubits);
    c.append(Gate::h(kQ1));
    c.append(Gate::cnot(kQ1, kQ2));
    c.append(Gate::cnot(kQ2, kQ3));
    c.append(Gate::cnot(kQ3, kQ4));
    // a1 ends in q1 xor q4, which is 0 on both GHZ branches.
    c.append(Gate::cnot(kQ1, kA1));
    c.append(Gate::cnot(kQ4, kA1));
    return c;
}

void logical_cnot(Circuit &circuit, CnotDirection direction) {
    if (circuit.num_qubits != kNumQubits) {
        throw FormatError("logical CNOT needs the six-qubit encoded register");
    }
    if (direction == CnotDirection::kOneToTwo) {
        circuit.relabel.swap(kQ1, kQ2);
    } else {
        circuit.relabel.swap(kQ1, kQ3);
    }
}

std::vector<Gate> rotation_gadget(double theta) {
    // Controlled logical X1 = X(q2) X(q4).
    return {Gate::h(kA2), Gate::cnot(kA2, kQ2), Gate::cnot(kA2, kQ4), Gate::ry(kA2, -theta)};
}

void append_rotation_gadget(Circuit &circuit, double theta) {
    for (const Gate &g : rotation_gadget(theta)) {
        circuit.append(g);
    }
}

void logical_basis_change(Circuit &circuit) {
    if (circuit.meas_basis != MeasBasis::Z) {
        throw BasisError("measurement basis already transformed");
    }
    for (int q = kQ1; q <= kQ4; ++q) {
        circuit.append(Gate::h(q));
    }
    circuit.relabel.swap(kQ2, kQ3);
    circuit.meas_basis = MeasBasis::XTransformed;
}

DecodeResult decode_counts(const Counts &counts, const Permutation &relabel) {
    if (counts.num_bits() != kNumQubits) {
        throw FormatError("decode expects 6-bit outcomes, got " + std::to_string(counts.num_bits()));
    }
    if (relabel.size() != kNumQubits) {
        throw FormatError("decode expects a 6-qubit relabel");
    }
    DecodeResult result;
    for (std::size_t physical = 0; physical < counts.size(); ++physical) {
        const double w = counts[physical];
        if (w == 0) {
            continue;
        }
        result.shots_in += w;
        const std::size_t outcome = relabel.map_index(physical);
        if ((outcome >> kA1) & 1u) {
            result.discarded_flag += w;
            continue;
        }
        const auto word = decode_word(static_cast<unsigned>(outcome & 0xFu));
        if (!word) {
            result.discarded_parity += w;
            continue;
        }
        if ((outcome >> kA2) & 1u) {
            result.kept_theta_pi.add(word->index(), w);
        } else {
            result.kept_theta.add(word->index(), w);
        }
    }
    return result;
}

}  // namespace h2qed::code422
