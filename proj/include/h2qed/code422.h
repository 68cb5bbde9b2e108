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

#ifndef H2QED_CODE422_H
#define H2QED_CODE422_H

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "h2qed/sim.h"

namespace h2qed::code422 {

// Physical layout of the encoded register. Decoded bitstrings use the same
// positions after the relabel permutation is applied.
inline constexpr int kQ1 = 0;
inline constexpr int kQ2 = 1;
inline constexpr int kQ3 = 2;
inline constexpr int kQ4 = 3;
inline constexpr int kA1 = 4;  // preparation flag
inline constexpr int kA2 = 5;  // rotation ancilla
inline constexpr int kNumQubits = 6;
inline constexpr int kNumCodeQubits = 4;

/// Parses a code-qubit string written q1 q2 q3 q4 left to right ("0101").
unsigned code_bits(std::string_view q1_to_q4);

/// Logical basis word of the [[4,2,2]] code and its two even-parity constituents:
///   00 <- 0000, 1111    01 <- 0011, 1100    10 <- 0101, 1010    11 <- 0110, 1001
struct LogicalWord {
    int b1 = 0;
    int b2 = 0;

    /// Two-bit logical index, b1 in bit 0.
    unsigned index() const {
        return static_cast<unsigned>(b1) | (static_cast<unsigned>(b2) << 1);
    }
    std::array<unsigned, 2> constituents() const;

    bool operator==(const LogicalWord &) const = default;
};

/// Logical word for a 4-bit code string, or nullopt outside the code space.
std::optional<LogicalWord> decode_word(unsigned code);

/// Pure 4-qubit code word (|c1> + |c2>) / sqrt(2).
DensityState encode_state(int b1, int b2);

/// Six-qubit register prepared in the logical |00> with a flag check on a1:
/// H(q1) CNOT(q1,q2) CNOT(q2,q3) CNOT(q3,q4) CNOT(q1,a1) CNOT(q4,a1).
Circuit prep_circuit();

enum class CnotDirection { kOneToTwo, kTwoToOne };

/// Logical CNOT realized as a free relabeling: 1->2 is SWAP(q1,q2), 2->1 is SWAP(q1,q3).
void logical_cnot(Circuit &circuit, CnotDirection direction);

/// Ancilla-mediated logical Ry(theta) on logical qubit 1:
/// H(a2) CNOT(a2,q2) CNOT(a2,q4) Ry(-theta)(a2).
/// Outcome a2 = 0 leaves Ry(theta) applied, a2 = 1 leaves Ry(theta + pi).
std::vector<Gate> rotation_gadget(double theta);
void append_rotation_gadget(Circuit &circuit, double theta);

/// Transversal H on q1..q4. H^{(x)4} also swaps the logical qubits, which the
/// q2 <-> q3 relabel undoes.
void logical_basis_change(Circuit &circuit);

struct DecodeResult {
    Counts kept_theta{2};     // a2 = 0
    Counts kept_theta_pi{2};  // a2 = 1
    double discarded_flag = 0;
    double discarded_parity = 0;
    double shots_in = 0;

    double kept() const {
        return kept_theta.shots() + kept_theta_pi.shots();
    }
};

/// Postselects a six-qubit histogram in physical bit order: drops a1 = 1, then
/// odd code parity, maps the rest to logical words and routes them by a2.
DecodeResult decode_counts(const Counts &counts, const Permutation &relabel);

}  // namespace h2qed::code422

#endif  // H2QED_CODE422_H
