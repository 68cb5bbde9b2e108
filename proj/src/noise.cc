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

#include "h2qed/noise.h"

#include <cmath>
#include <string>

#include "h2qed/errors.h"

namespace h2qed {

namespace {

void check_rate(double p, const char *name) {
    if (!(p >= 0 && p <= 1)) {
        throw ProbabilityError(std::string(name) + " = " + std::to_string(p) + " outside [0, 1]");
    }
}

void check_qubit(const DensityState &state, int q) {
    if (q < 0 || q >= state.num_qubits()) {
        throw TargetError("channel target " + std::to_string(q) + " out of range");
    }
}

}  // namespace

NoiseConfig NoiseConfig::from_p(double p) {
    NoiseConfig config{p / 16, p};
    config.validate();
    return config;
}

void NoiseConfig::validate() const {
    check_rate(p1, "p1");
    check_rate(p2, "p2");
}

ReadoutModel ReadoutModel::uniform(int num_qubits, double eps01, double eps10) {
    ReadoutModel model;
    model.qubits.assign(static_cast<std::size_t>(num_qubits), QubitReadout{eps01, eps10});
    model.validate();
    return model;
}

ReadoutModel ReadoutModel::default_asymmetric(int num_qubits) {
    return uniform(num_qubits, 0.01, 0.05);
}

bool ReadoutModel::is_noiseless() const {
    for (const auto &q : qubits) {
        if (q.eps01 != 0 || q.eps10 != 0) {
            return false;
        }
    }
    return true;
}

void ReadoutModel::validate() const {
    for (const auto &q : qubits) {
        check_rate(q.eps01, "eps01");
        check_rate(q.eps10, "eps10");
    }
}

ResponseMatrix::ResponseMatrix(int num_qubits, Eigen::MatrixXd matrix) : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        throw SizeError("response matrix must be 2^n x 2^n");
    }
    if (matrix_.minCoeff() < 0 || matrix_.maxCoeff() > 1) {
        throw ProbabilityError("response matrix entries must lie in [0, 1]");
    }
    if (stochasticity_error() > 1e-9) {
        throw ProbabilityError("response matrix is not column-stochastic");
    }
}

double ResponseMatrix::stochasticity_error() const {
    return (matrix_.colwise().sum().array() - 1.0).abs().maxCoeff();
}

std::vector<double> ResponseMatrix::apply(std::span<const double> truth) const {
    if (truth.size() != dim()) {
        throw FormatError("spectrum length does not match response matrix");
    }
    Eigen::Map<const Eigen::VectorXd> t(truth.data(), static_cast<Eigen::Index>(truth.size()));
    Eigen::VectorXd m = matrix_ * t;
    return {m.data(), m.data() + m.size()};
}

void depolarize1(DensityState &state, int qubit, double p1) {
    check_rate(p1, "p1");
    check_qubit(state, qubit);
    if (p1 == 0) {
        return;
    }
    // The Pauli average is Tr_q(rho) (x) I/2: entries whose row and column agree
    // on the qubit are averaged with their partner, the rest are killed.
    Eigen::MatrixXcd &rho = state.matrix();
    const std::size_t m = std::size_t{1} << qubit;
    const std::size_t dim = state.dim();
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) {
            const auto ri = static_cast<Eigen::Index>(r);
            const auto ci = static_cast<Eigen::Index>(c);
            if ((r & m) != (c & m)) {
                rho(ri, ci) *= 1 - p1;
            } else if (!(r & m)) {
                const auto rj = static_cast<Eigen::Index>(r | m);
                const auto cj = static_cast<Eigen::Index>(c | m);
                const Complex mean = 0.5 * (rho(ri, ci) + rho(rj, cj));
                rho(ri, ci) = (1 - p1) * rho(ri, ci) + p1 * mean;
                rho(rj, cj) = (1 - p1) * rho(rj, cj) + p1 * mean;
            }
        }
    }
}

void depolarize2(DensityState &state, int qubit_i, int qubit_j, double p2) {
    check_rate(p2, "p2");
    check_qubit(state, qubit_i);
    check_qubit(state, qubit_j);
    if (qubit_i == qubit_j) {
        throw TargetError("two-qubit channel with duplicate target " + std::to_string(qubit_i));
    }
    if (p2 == 0) {
        return;
    }
    // Average over 16 Pauli pairs = Tr_ij(rho) (x) I/4.
    Eigen::MatrixXcd &rho = state.matrix();
    const std::size_t mi = std::size_t{1} << qubit_i;
    const std::size_t mj = std::size_t{1} << qubit_j;
    const std::size_t mask = mi | mj;
    const std::array<std::size_t, 4> flips{0, mi, mj, mi | mj};
    const std::size_t dim = state.dim();
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t r = 0; r < dim; ++r) {
            const auto ri = static_cast<Eigen::Index>(r);
            const auto ci = static_cast<Eigen::Index>(c);
            if ((r & mask) != (c & mask)) {
                rho(ri, ci) *= 1 - p2;
            } else if (!(r & mask)) {
                Complex sum = 0;
                for (std::size_t f : flips) {
                    sum += rho(static_cast<Eigen::Index>(r | f), static_cast<Eigen::Index>(c | f));
                }
                const Complex mean = 0.25 * sum;
                for (std::size_t f : flips) {
                    Complex &v = rho(static_cast<Eigen::Index>(r | f), static_cast<Eigen::Index>(c | f));
                    v = (1 - p2) * v + p2 * mean;
                }
            }
        }
    }
}

DensityState run_noisy(const Circuit &circuit, const NoiseConfig &noise) {
    noise.validate();
    DensityState state = DensityState::zero(circuit.num_qubits);
    for (const Gate &gate : circuit.ops) {
        apply_gate(state, gate);
        const auto t = gate.targets();
        if (gate.arity() == 1) {
            depolarize1(state, t[0], noise.p1);
        } else {
            depolarize2(state, t[0], t[1], noise.p2);
        }
    }
    return state;
}

std::vector<double> apply_readout(std::span<const double> probs, const ReadoutModel &model) {
    model.validate();
    const int n = model.num_qubits();
    if (probs.size() != (std::size_t{1} << n)) {
        throw FormatError("probability vector does not match readout model width");
    }
    std::vector<double> out(probs.begin(), probs.end());
    for (int q = 0; q < n; ++q) {
        const std::size_t m = std::size_t{1} << q;
        const double e01 = model.qubits[q].eps01;
        const double e10 = model.qubits[q].eps10;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i & m) {
                continue;
            }
            const double t0 = out[i];
            const double t1 = out[i | m];
            out[i] = (1 - e01) * t0 + e10 * t1;
            out[i | m] = e01 * t0 + (1 - e10) * t1;
        }
    }
    return out;
}

ResponseMatrix build_response(const ReadoutModel &model, int num_qubits) {
    model.validate();
    if (model.num_qubits() != num_qubits) {
        throw FormatError("readout model covers " + std::to_string(model.num_qubits()) + " qubits, expected " +
                          std::to_string(num_qubits));
    }
    Eigen::MatrixXd r = Eigen::MatrixXd::Ones(1, 1);
    // Kronecker order puts qubit 0 in the least-significant position.
    for (int q = 0; q < num_qubits; ++q) {
        Eigen::Matrix2d single;
        single << 1 - model.qubits[q].eps01, model.qubits[q].eps10, model.qubits[q].eps01, 1 - model.qubits[q].eps10;
        Eigen::MatrixXd next(r.rows() * 2, r.cols() * 2);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                next.block(a * r.rows(), b * r.cols(), r.rows(), r.cols()) = single(a, b) * r;
            }
        }
        r = std::move(next);
    }
    return ResponseMatrix(num_qubits, std::move(r));
}

ResponseMatrix calibrate_response(const ReadoutModel &model, int num_qubits, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw UsageError("calibration needs at least one shot");
    }
    if (model.num_qubits() != num_qubits) {
        throw FormatError("readout model width does not match calibration width");
    }
    const std::size_t dim = std::size_t{1} << num_qubits;
    Eigen::MatrixXd r(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t truth = 0; truth < dim; ++truth) {
        Circuit circuit(num_qubits);
        for (int q = 0; q < num_qubits; ++q) {
            if ((truth >> q) & 1u) {
                circuit.append(Gate::x(q));
            }
        }
        const auto measured = apply_readout(probabilities(run(circuit)), model);
        const Counts counts = sample_counts(measured, shots, mix_seed(seed, truth));
        for (std::size_t i = 0; i < dim; ++i) {
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(truth)) = counts[i] / counts.shots();
        }
    }
    return ResponseMatrix(num_qubits, std::move(r));
}

}  // namespace h2qed
