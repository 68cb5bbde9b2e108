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

#ifndef H2QED_SIM_H
#define H2QED_SIM_H

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace h2qed {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;

// Bit convention used everywhere: qubit k is bit k of a basis-state index
// (qubit 0 is the least-significant bit).

/// Dense density matrix over n qubits.
class DensityState {
   public:
    explicit DensityState(Eigen::MatrixXcd rho);

    static DensityState zero(int num_qubits);
    /// |psi><psi| for a normalized amplitude vector of length 2^n.
    static DensityState pure(std::span<const Complex> amplitudes);

    int num_qubits() const {
        return num_qubits_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(rho_.rows());
    }
    const Eigen::MatrixXcd &matrix() const {
        return rho_;
    }
    Eigen::MatrixXcd &matrix() {
        return rho_;
    }

    Complex trace() const;
    double purity() const;
    /// Largest |rho_ij - conj(rho_ji)|.
    double hermiticity_error() const;
    double min_eigenvalue() const;

   private:
    int num_qubits_;
    Eigen::MatrixXcd rho_;
};

/// |0...0><0...0| on n qubits, 1 <= n <= kMaxQubits.
DensityState new_zero_state(int num_qubits);

enum class GateKind { X, H, Ry, CNOT };

class Gate {
   public:
    static Gate x(int qubit);
    static Gate h(int qubit);
    /// Ry(theta) = exp(-i theta Y / 2).
    static Gate ry(int qubit, double angle);
    static Gate cnot(int control, int target);

    GateKind kind() const {
        return kind_;
    }
    double angle() const {
        return angle_;
    }
    int arity() const {
        return arity_;
    }
    std::span<const int> targets() const {
        return {targets_.data(), static_cast<std::size_t>(arity_)};
    }
    /// 2x2 or 4x4 unitary. For two-qubit gates local bit k belongs to targets()[k].
    Eigen::MatrixXcd matrix() const;

    bool operator==(const Gate &) const = default;

   private:
    Gate(GateKind kind, double angle, std::array<int, 2> targets, int arity);

    GateKind kind_;
    double angle_;
    std::array<int, 2> targets_;
    int arity_;
};

/// Qubit relabeling. `at(k)` is the physical qubit currently carrying label k.
/// A SWAP implemented by relabeling is `swap(a, b)` on the labels.
class Permutation {
   public:
    explicit Permutation(std::vector<int> image);
    static Permutation identity(int size);

    int size() const {
        return static_cast<int>(image_.size());
    }
    int at(int label) const {
        return image_[label];
    }
    const std::vector<int> &image() const {
        return image_;
    }
    void swap(int a, int b);
    bool is_identity() const;
    /// Maps a physical basis-state index to the index in label order.
    std::size_t map_index(std::size_t physical) const;

    bool operator==(const Permutation &) const = default;

   private:
    std::vector<int> image_;
};

enum class MeasBasis { Z, XTransformed };

/// Gate list plus the relabel bookkeeping of free SWAPs and the terminal
/// measurement basis. All measurements are terminal.
struct Circuit {
    explicit Circuit(int num_qubits);

    /// Targets are physical qubit indices.
    void append(const Gate &gate);

    int num_qubits;
    std::vector<Gate> ops;
    Permutation relabel;
    MeasBasis meas_basis = MeasBasis::Z;
};

/// rho -> U rho U^dagger with U acting on `targets` (1 or 2 qubits).
void apply_unitary(DensityState &state, const Eigen::MatrixXcd &unitary, std::span<const int> targets);
void apply_gate(DensityState &state, const Gate &gate);

/// Noiseless evolution of |0...0> through the circuit's gates.
DensityState run(const Circuit &circuit);

/// Diagonal of rho re-indexed into label order. Entries down to -1e-12 are
/// clamped to zero and the vector is renormalized.
std::vector<double> probabilities(const DensityState &state, const Permutation &relabel);
std::vector<double> probabilities(const DensityState &state);

/// Tr(rho P) for a Pauli string; paulis[k] in {I,X,Y,Z} acts on qubit k.
double pauli_expectation(const DensityState &state, std::string_view paulis);

/// Projects `qubit` onto |value> and renormalizes. Returns the probability of
/// the outcome; a zero-probability outcome leaves the zero matrix and returns 0.
double postselect(DensityState &state, int qubit, int value);

/// Reduced state on `keep` (in that order: keep[k] becomes qubit k).
DensityState partial_trace(const DensityState &state, std::span<const int> keep);

/// Histogram over n-bit outcomes. Tallies are real so that readout-corrected
/// counts can flow through the same type.
class Counts {
   public:
    explicit Counts(int num_bits);

    int num_bits() const {
        return num_bits_;
    }
    std::size_t size() const {
        return tallies_.size();
    }
    double shots() const {
        return shots_;
    }
    double operator[](std::size_t outcome) const {
        return tallies_[outcome];
    }
    const std::vector<double> &tallies() const {
        return tallies_;
    }
    void add(std::size_t outcome, double weight);
    void merge(const Counts &other);
    /// Tallies divided by shots. Throws EmptyBranchError on an empty histogram.
    std::vector<double> normalized() const;

    static Counts from_tallies(int num_bits, std::vector<double> tallies);

   private:
    int num_bits_;
    std::vector<double> tallies_;
    double shots_ = 0;
};

/// Multinomial draw of `shots` outcomes, deterministic in `seed`.
Counts sample_counts(std::span<const double> probs, std::uint64_t shots, std::uint64_t seed);

/// Stable seed derivation for independent substreams (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace h2qed

#endif  // H2QED_SIM_H
