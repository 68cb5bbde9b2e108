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

#include "h2qed/sim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "h2qed/errors.h"

namespace h2qed {

namespace {

constexpr double kClampTolerance = 1e-12;
constexpr double kSumTolerance = 1e-9;

void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
    }
}

void check_target(int qubit, int num_qubits) {
    if (qubit < 0 || qubit >= num_qubits) {
        throw TargetError("qubit " + std::to_string(qubit) + " out of range for " + std::to_string(num_qubits) + " qubits");
    }
}

int qubits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    if ((Eigen::Index{1} << n) != dim) {
        throw SizeError("matrix dimension " + std::to_string(dim) + " is not a power of two");
    }
    return n;
}

}  // namespace

DensityState::DensityState(Eigen::MatrixXcd rho) : num_qubits_(0), rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) {
        throw SizeError("density matrix must be square");
    }
    num_qubits_ = qubits_for_dim(rho_.rows());
    check_qubit_count(num_qubits_);
}

DensityState DensityState::zero(int num_qubits) {
    check_qubit_count(num_qubits);
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return DensityState(std::move(rho));
}

DensityState DensityState::pure(std::span<const Complex> amplitudes) {
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(amplitudes.size()));
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        psi(static_cast<Eigen::Index>(i)) = amplitudes[i];
    }
    return DensityState(psi * psi.adjoint());
}

Complex DensityState::trace() const {
    return rho_.trace();
}

double DensityState::purity() const {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho_.cwiseAbs2().sum();
}

double DensityState::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

DensityState new_zero_state(int num_qubits) {
    return DensityState::zero(num_qubits);
}

Gate::Gate(GateKind kind, double angle, std::array<int, 2> targets, int arity)
    : kind_(kind), angle_(angle), targets_(targets), arity_(arity) {
    for (int k = 0; k < arity_; ++k) {
        if (targets_[k] < 0) {
            throw TargetError("negative qubit index");
        }
    }
    if (arity_ == 2 && targets_[0] == targets_[1]) {
        throw TargetError("two-qubit gate with duplicate target " + std::to_string(targets_[0]));
    }
}

Gate Gate::x(int qubit) {
    return Gate(GateKind::X, 0, {qubit, 0}, 1);
}

Gate Gate::h(int qubit) {
    return Gate(GateKind::H, 0, {qubit, 0}, 1);
}

Gate Gate::ry(int qubit, double angle) {
    return Gate(GateKind::Ry, angle, {qubit, 0}, 1);
}

Gate Gate::cnot(int control, int target) {
    return Gate(GateKind::CNOT, 0, {control, target}, 2);
}

Eigen::MatrixXcd Gate::matrix() const {
    switch (kind_) {
        case GateKind::X: {
            Eigen::MatrixXcd m(2, 2);
            m << 0, 1, 1, 0;
            return m;
        }
        case GateKind::H: {
            const double r = 1 / std::sqrt(2.0);
            Eigen::MatrixXcd m(2, 2);
            m << r, r, r, -r;
            return m;
        }
        case GateKind::Ry: {
            const double c = std::cos(angle_ / 2);
            const double s = std::sin(angle_ / 2);
            Eigen::MatrixXcd m(2, 2);
            m << c, -s, s, c;
            return m;
        }
        case GateKind::CNOT: {
            // Local index = control_bit + 2 * target_bit.
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
            m(0, 0) = 1;
            m(2, 2) = 1;
            m(3, 1) = 1;
            m(1, 3) = 1;
            return m;
        }
    }
    return {};
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (int v : image_) {
        if (v < 0 || v >= static_cast<int>(image_.size()) || seen[v]) {
            throw FormatError("relabel is not a permutation");
        }
        seen[v] = true;
    }
}

Permutation Permutation::identity(int size) {
    std::vector<int> image(static_cast<std::size_t>(size));
    std::iota(image.begin(), image.end(), 0);
    return Permutation(std::move(image));
}

void Permutation::swap(int a, int b) {
    if (a < 0 || b < 0 || a >= size() || b >= size()) {
        throw TargetError("relabel swap out of range");
    }
    std::swap(image_[a], image_[b]);
}

bool Permutation::is_identity() const {
    for (int k = 0; k < size(); ++k) {
        if (image_[k] != k) {
            return false;
        }
    }
    return true;
}

std::size_t Permutation::map_index(std::size_t physical) const {
    std::size_t out = 0;
    for (int k = 0; k < size(); ++k) {
        out |= ((physical >> image_[k]) & 1u) << k;
    }
    return out;
}

Circuit::Circuit(int n) : num_qubits(n), relabel(Permutation::identity(n)) {
    check_qubit_count(n);
}

void Circuit::append(const Gate &gate) {
    for (int q : gate.targets()) {
        check_target(q, num_qubits);
    }
    ops.push_back(gate);
}

void apply_unitary(DensityState &state, const Eigen::MatrixXcd &unitary, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    if (k < 1 || k > 2) {
        throw TargetError("unitaries act on one or two qubits");
    }
    for (int q : targets) {
        check_target(q, state.num_qubits());
    }
    if (k == 2 && targets[0] == targets[1]) {
        throw TargetError("duplicate targets");
    }
    const std::size_t local = std::size_t{1} << k;
    if (static_cast<std::size_t>(unitary.rows()) != local || static_cast<std::size_t>(unitary.cols()) != local) {
        throw SizeError("unitary size does not match target count");
    }

    std::array<std::size_t, 4> offsets{};
    std::size_t mask = 0;
    for (std::size_t l = 0; l < local; ++l) {
        for (int b = 0; b < k; ++b) {
            if ((l >> b) & 1u) {
                offsets[l] |= std::size_t{1} << targets[b];
            }
        }
    }
    for (int b = 0; b < k; ++b) {
        mask |= std::size_t{1} << targets[b];
    }

    Eigen::MatrixXcd &rho = state.matrix();
    const std::size_t dim = state.dim();
    std::array<Complex, 4> in{};
    std::array<Complex, 4> out{};

    // rho <- U rho
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t base = 0; base < dim; ++base) {
            if (base & mask) {
                continue;
            }
            for (std::size_t l = 0; l < local; ++l) {
                in[l] = rho(base | offsets[l], c);
            }
            for (std::size_t l = 0; l < local; ++l) {
                Complex acc = 0;
                for (std::size_t m = 0; m < local; ++m) {
                    acc += unitary(l, m) * in[m];
                }
                out[l] = acc;
            }
            for (std::size_t l = 0; l < local; ++l) {
                rho(base | offsets[l], c) = out[l];
            }
        }
    }
    // rho <- rho U^dagger
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & mask) {
            continue;
        }
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t l = 0; l < local; ++l) {
                in[l] = rho(r, base | offsets[l]);
            }
            for (std::size_t l = 0; l < local; ++l) {
                Complex acc = 0;
                for (std::size_t m = 0; m < local; ++m) {
                    acc += in[m] * std::conj(unitary(l, m));
                }
                out[l] = acc;
            }
            for (std::size_t l = 0; l < local; ++l) {
                rho(r, base | offsets[l]) = out[l];
            }
        }
    }
}

void apply_gate(DensityState &state, const Gate &gate) {
    apply_unitary(state, gate.matrix(), gate.targets());
}

DensityState run(const Circuit &circuit) {
    DensityState state = DensityState::zero(circuit.num_qubits);
    for (const Gate &gate : circuit.ops) {
        apply_gate(state, gate);
    }
    return state;
}

std::vector<double> probabilities(const DensityState &state, const Permutation &relabel) {
    if (relabel.size() != state.num_qubits()) {
        throw FormatError("relabel size does not match qubit count");
    }
    const std::size_t dim = state.dim();
    std::vector<double> probs(dim, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        double p = state.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        if (p < -kClampTolerance) {
            throw ProbabilityError("diagonal entry " + std::to_string(p) + " below clamp tolerance");
        }
        p = std::max(p, 0.0);
        probs[relabel.map_index(i)] = p;
        total += p;
    }
    if (total <= 0) {
        throw ProbabilityError("state has zero trace");
    }
    for (double &p : probs) {
        p /= total;
    }
    return probs;
}

std::vector<double> probabilities(const DensityState &state) {
    return probabilities(state, Permutation::identity(state.num_qubits()));
}

double pauli_expectation(const DensityState &state, std::string_view paulis) {
    if (static_cast<int>(paulis.size()) != state.num_qubits()) {
        throw FormatError("Pauli string length does not match qubit count");
    }
    std::size_t flip = 0;
    for (std::size_t q = 0; q < paulis.size(); ++q) {
        const char p = paulis[q];
        if (p == 'X' || p == 'Y') {
            flip |= std::size_t{1} << q;
        } else if (p != 'I' && p != 'Z') {
            throw FormatError(std::string("unknown Pauli '") + p + "'");
        }
    }
    // Tr(rho P) = sum_c phase(c) rho(c, c ^ flip) where P|c> = phase(c)|c ^ flip>.
    Complex acc = 0;
    for (std::size_t c = 0; c < state.dim(); ++c) {
        Complex phase = 1;
        for (std::size_t q = 0; q < paulis.size(); ++q) {
            const bool bit = (c >> q) & 1u;
            if (paulis[q] == 'Z' && bit) {
                phase = -phase;
            } else if (paulis[q] == 'Y') {
                phase *= bit ? Complex(0, -1) : Complex(0, 1);
            }
        }
        acc += phase * state.matrix()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c ^ flip));
    }
    return acc.real();
}

double postselect(DensityState &state, int qubit, int value) {
    check_target(qubit, state.num_qubits());
    Eigen::MatrixXcd &rho = state.matrix();
    const std::size_t bit = std::size_t{1} << qubit;
    const std::size_t want = value ? bit : 0;
    for (std::size_t r = 0; r < state.dim(); ++r) {
        for (std::size_t c = 0; c < state.dim(); ++c) {
            if ((r & bit) != want || (c & bit) != want) {
                rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 0;
            }
        }
    }
    const double p = rho.trace().real();
    if (p > 0) {
        rho /= p;
    }
    return p;
}

DensityState partial_trace(const DensityState &state, std::span<const int> keep) {
    const int n = state.num_qubits();
    std::size_t keep_mask = 0;
    for (int q : keep) {
        check_target(q, n);
        if (keep_mask & (std::size_t{1} << q)) {
            throw TargetError("duplicate qubit in partial trace");
        }
        keep_mask |= std::size_t{1} << q;
    }
    auto reduce = [&](std::size_t index) {
        std::size_t out = 0;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            out |= ((index >> keep[k]) & 1u) << k;
        }
        return out;
    };
    const Eigen::Index out_dim = Eigen::Index{1} << keep.size();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
    for (std::size_t r = 0; r < state.dim(); ++r) {
        for (std::size_t c = 0; c < state.dim(); ++c) {
            if ((r & ~keep_mask) != (c & ~keep_mask)) {
                continue;
            }
            out(static_cast<Eigen::Index>(reduce(r)), static_cast<Eigen::Index>(reduce(c))) +=
                state.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return DensityState(std::move(out));
}

Counts::Counts(int num_bits) : num_bits_(num_bits) {
    check_qubit_count(num_bits);
    tallies_.assign(std::size_t{1} << num_bits, 0.0);
}

void Counts::add(std::size_t outcome, double weight) {
    if (outcome >= tallies_.size()) {
        throw FormatError("outcome " + std::to_string(outcome) + " wider than " + std::to_string(num_bits_) + " bits");
    }
    tallies_[outcome] += weight;
    shots_ += weight;
}

void Counts::merge(const Counts &other) {
    if (other.num_bits_ != num_bits_) {
        throw FormatError("cannot merge histograms of different bit widths");
    }
    for (std::size_t i = 0; i < tallies_.size(); ++i) {
        tallies_[i] += other.tallies_[i];
    }
    shots_ += other.shots_;
}

std::vector<double> Counts::normalized() const {
    if (!(shots_ > 0)) {
        throw EmptyBranchError("histogram has no shots");
    }
    std::vector<double> out(tallies_);
    for (double &v : out) {
        v /= shots_;
    }
    return out;
}

Counts Counts::from_tallies(int num_bits, std::vector<double> tallies) {
    Counts counts(num_bits);
    if (tallies.size() != counts.tallies_.size()) {
        throw FormatError("tally vector length does not match bit width");
    }
    for (std::size_t i = 0; i < tallies.size(); ++i) {
        counts.add(i, tallies[i]);
    }
    return counts;
}

Counts sample_counts(std::span<const double> probs, std::uint64_t shots, std::uint64_t seed) {
    int bits = 0;
    while ((std::size_t{1} << bits) < probs.size()) {
        ++bits;
    }
    if ((std::size_t{1} << bits) != probs.size() || bits == 0) {
        throw FormatError("probability vector length must be a power of two >= 2");
    }
    double total = 0;
    for (double p : probs) {
        if (!(p >= -kClampTolerance)) {
            throw ProbabilityError("negative probability " + std::to_string(p));
        }
        total += std::max(p, 0.0);
    }
    if (std::abs(total - 1) > kSumTolerance) {
        throw ProbabilityError("probabilities sum to " + std::to_string(total));
    }

    // Conditional binomial decomposition of the multinomial.
    std::mt19937_64 rng(seed);
    Counts counts(bits);
    std::uint64_t remaining = shots;
    double remaining_mass = total;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        const double p = std::max(probs[i], 0.0);
        std::uint64_t drawn = 0;
        if (i + 1 == probs.size()) {
            drawn = remaining;
        } else if (p > 0) {
            // Rounding must not leak shots into trailing zero-probability bins.
            const bool rest_empty = remaining_mass - p <= 1e-14 * total;
            const double q = rest_empty ? 1.0 : std::clamp(p / remaining_mass, 0.0, 1.0);
            std::binomial_distribution<std::uint64_t> dist(remaining, q);
            drawn = dist(rng);
        }
        remaining_mass -= p;
        remaining -= drawn;
        if (drawn) {
            counts.add(i, static_cast<double>(drawn));
        }
    }
    return counts;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace h2qed
